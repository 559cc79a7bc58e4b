//! Job configuration: ring and crossed-module construction, root system,
//! suite selection. Parsed from TOML.

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chevalley::{default_orientation, StructureConstants};
use crate::quotients::DEFAULT_GENERATOR_CAP;
use crate::rings::diagonal_blocks;
use crate::roots::RootDatum;
use crate::words::RelId;
use crate::{Algebra, Context, Elem, Error, FiniteRing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Cyclic,
    #[default]
    Matrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossedChoice {
    #[default]
    Ideal,
    Homotope,
    ZeroMap,
    Trivial,
}

/// The crossed module over the scalar ring `Z/m`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossedSpec {
    #[serde(default)]
    pub kind: CrossedChoice,
    /// Ideal seeds, as coordinate lists over the scalar ring.
    #[serde(default)]
    pub generators: Vec<Vec<u64>>,
    /// Central twisting element of a homotope.
    #[serde(default)]
    pub s: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub modulus: u64,
    #[serde(default)]
    pub construction: Construction,
    /// Matrix size; required for the matrix construction.
    #[serde(default)]
    pub size: Option<usize>,
    #[serde(default)]
    pub crossed: CrossedSpec,
    /// Index partition of the diagonal; one singleton per index if absent.
    #[serde(default)]
    pub family: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootSpec {
    pub system: String,
    /// Directed Dynkin edges between simple-root indices.
    #[serde(default)]
    pub orientation: Option<Vec<(usize, usize)>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Relations,
    Elimination,
    Chevalley,
    Ft,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Relations, Suite::Elimination, Suite::Chevalley, Suite::Ft];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Relations => "relations",
            Suite::Elimination => "elimination",
            Suite::Chevalley => "chevalley",
            Suite::Ft => "ft",
        }
    }
}

/// Parses a comma separated suite list; `all` expands, `none` or an empty
/// string selects nothing.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>, Error> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.to_ascii_lowercase().as_str() {
            "all" => out.extend(Suite::ALL),
            "none" => {}
            "relations" => out.push(Suite::Relations),
            "elimination" => out.push(Suite::Elimination),
            "chevalley" => out.push(Suite::Chevalley),
            "ft" => out.push(Suite::Ft),
            other => return Err(Error::Config(format!("unknown suite {other:?}"))),
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn parse_relations(s: &str) -> Result<Vec<RelId>, Error> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(RelId::from_str).collect()
}

fn default_suites() -> Vec<Suite> {
    Suite::ALL.to_vec()
}
fn default_samples() -> usize {
    100
}
fn default_cap() -> usize {
    DEFAULT_GENERATOR_CAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default = "default_suites")]
    pub suites: Vec<Suite>,
    /// Restricts every suite to these relation ids when present.
    #[serde(default)]
    pub relations: Option<Vec<RelId>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    #[serde(default)]
    pub jobs: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_cap")]
    pub generator_cap: usize,
}

impl Default for JobSpec {
    fn default() -> Self {
        JobSpec {
            suites: default_suites(),
            relations: None,
            samples: default_samples(),
            seed: 0,
            jobs: 0,
            out: None,
            generator_cap: default_cap(),
        }
    }
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default = "one")]
    pub schema_version: u32,
    pub ring: RingSpec,
    #[serde(default)]
    pub roots: Option<RootSpec>,
    #[serde(default)]
    pub job: JobSpec,
}

impl FromStr for JobConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let cfg: JobConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.schema_version != crate::SCHEMA_VERSION {
            return Err(Error::Config(format!("unsupported schema_version {}", cfg.schema_version)));
        }
        Ok(cfg)
    }
}

impl JobConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    /// Mat(size, Z/m) with `A = Mat(size, 𝔞)`, ready for the linear suites.
    pub fn matrix(size: usize, modulus: u64, ideal: u64) -> Self {
        JobConfig {
            schema_version: crate::SCHEMA_VERSION,
            ring: RingSpec {
                modulus,
                construction: Construction::Matrix,
                size: Some(size),
                crossed: CrossedSpec { kind: CrossedChoice::Ideal, generators: vec![vec![ideal]], s: None },
                family: None,
            },
            roots: None,
            job: JobSpec::default(),
        }
    }

    /// The crossed module over the scalar ring.
    pub fn base_algebra(&self) -> Result<Arc<Algebra>, Error> {
        let k = Arc::new(FiniteRing::cyclic(self.ring.modulus)?);
        let c = &self.ring.crossed;
        let alg = match c.kind {
            CrossedChoice::Ideal => {
                if c.generators.is_empty() {
                    return Err(Error::Config("ideal crossed module needs generators".into()));
                }
                Algebra::ideal(k, &c.generators.iter().map(|g| Elem(g.clone())).collect::<Vec<_>>())?
            }
            CrossedChoice::Homotope => {
                let s = c.s.clone().ok_or_else(|| Error::Config("homotope needs s".into()))?;
                Algebra::homotope(k, &Elem(s))?
            }
            CrossedChoice::ZeroMap => Algebra::zero_map(k)?,
            CrossedChoice::Trivial => Algebra::trivial(k)?,
        };
        Ok(Arc::new(alg))
    }

    /// The linear context; only matrix constructions carry idempotents.
    pub fn context(&self) -> Result<Arc<Context>, Error> {
        if self.ring.construction != Construction::Matrix {
            return Err(Error::Config("linear suites need a matrix construction".into()));
        }
        let size = self.ring.size.ok_or_else(|| Error::Config("matrix construction needs size".into()))?;
        let base = self.base_algebra()?;
        let mk = Arc::new(FiniteRing::matrix(size, base.ring())?);
        let ma = Arc::new(base.matrix_lift(size, mk)?);
        let blocks = self.ring.family.clone().unwrap_or_else(|| (0..size).map(|i| vec![i]).collect());
        if blocks.iter().flatten().any(|&i| i >= size) {
            return Err(Error::Config("family index out of range".into()));
        }
        let family = diagonal_blocks(size, base.ring(), &blocks);
        Ok(Arc::new(Context::with_min(ma, family, 3, Some(blocks))?))
    }

    pub fn structure_constants(&self) -> Result<StructureConstants, Error> {
        let roots = self.roots.as_ref().ok_or_else(|| Error::Config("no [roots] section".into()))?;
        let d = Arc::new(RootDatum::parse(&roots.system)?);
        let orientation = roots.orientation.clone().unwrap_or_else(|| default_orientation(&d));
        StructureConstants::build(d, orientation)
    }

    /// Linear relation ids selected by the filter.
    pub fn linear_ids(&self) -> Vec<RelId> {
        let all = RelId::linear();
        match &self.job.relations {
            Some(f) => all.into_iter().filter(|r| f.contains(r)).collect(),
            None => all,
        }
    }

    pub fn chevalley_ids(&self) -> Vec<RelId> {
        let all = crate::chevalley::chevalley_ids();
        match &self.job.relations {
            Some(f) => all.into_iter().filter(|r| f.contains(r)).collect(),
            None => all,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
schema_version = 1

[ring]
modulus = 8
construction = "matrix"
size = 4
crossed = { kind = "ideal", generators = [[2]] }

[roots]
system = "A3"

[job]
suites = ["relations", "ft"]
relations = ["Conj2", "hw"]
samples = 10
seed = 42
"#;

    #[test]
    fn parses_and_builds() {
        let cfg: JobConfig = SAMPLE.parse().unwrap();
        assert_eq!(cfg.job.suites, vec![Suite::Relations, Suite::Ft]);
        assert_eq!(cfg.linear_ids(), vec![RelId::Conj2, RelId::Hw]);
        let ctx = cfg.context().unwrap();
        assert_eq!(ctx.n(), 4);
        assert_eq!(cfg.structure_constants().unwrap().datum().rank(), 3);
        assert_eq!(cfg.base_algebra().unwrap().size(), 4);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!("ring = 3".parse::<JobConfig>(), Err(Error::Config(_))));
        let wrong_version = SAMPLE.replace("schema_version = 1", "schema_version = 9");
        assert!(matches!(wrong_version.parse::<JobConfig>(), Err(Error::Config(_))));
        let unknown = SAMPLE.replace("seed = 42", "seed = 42\ncolour = 1");
        assert!(unknown.parse::<JobConfig>().is_err());
        let bad_family = SAMPLE.replace("size = 4", "size = 4\nfamily = [[0, 1], [2, 3]]");
        assert!(matches!(bad_family.parse::<JobConfig>().unwrap().context(), Err(Error::InvalidFamily(_))));
        assert!(parse_suites("relations,bogus").is_err());
        assert!(parse_relations("St1,Nope").is_err());
    }

    #[test]
    fn suite_lists() {
        assert_eq!(parse_suites("all").unwrap(), Suite::ALL.to_vec());
        assert!(parse_suites("").unwrap().is_empty());
        assert!(parse_suites("none").unwrap().is_empty());
        assert_eq!(parse_suites("ft, relations,ft").unwrap(), vec![Suite::Relations, Suite::Ft]);
    }

    #[test]
    fn partitioned_family() {
        let cfg: JobConfig = SAMPLE.replace("size = 4", "size = 4\nfamily = [[0, 1], [2], [3]]").parse().unwrap();
        assert_eq!(cfg.context().unwrap().n(), 3);
    }
}
