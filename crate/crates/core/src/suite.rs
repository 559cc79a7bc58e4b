//! Batch verification suites and the JSON report they produce.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::chevalley::{reversed_orientation, ChevalleyEngine, StructureConstants};
use crate::config::{JobConfig, Suite};
use crate::elimination::{psi_classes, EliminationChain, MergedContext, Relativization};
use crate::eval::Evaluator;
use crate::quotients::{context_fingerprint, ft_presentation, ft_presentation_chevalley, FtGroup, FtSummary, Scope};
use crate::words::{conjugation_form, random_special_closed, Catalog, ExtremeChoice, Gen, RelId, Word};
use crate::{derive_seed, Context, Elem, Error};

/// Pass counts of one named check plus a dump of every failing case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub passed: usize,
    pub failures: Vec<Value>,
}

impl CheckReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub pass: bool,
    pub checks: Vec<CheckReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ft: Vec<FtSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub seed: u64,
    pub samples: usize,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.suites.iter().flat_map(|s| &s.checks).find(|c| c.name == name)
    }
}

/// Process exit status for a run: 0 all pass, 1 verification failure,
/// 2 configuration or context error.
pub fn exit_code(outcome: &Result<Report, Error>) -> u8 {
    match outcome {
        Ok(r) if r.pass => 0,
        Ok(_) => 1,
        Err(_) => 2,
    }
}

/// Runs `count` independent cases in parallel; `case` returns a failure
/// dump or `None`. Results are merged in case order.
pub fn run_check<F>(name: impl Into<String>, count: usize, case: F) -> CheckReport
where
    F: Fn(usize) -> Option<Value> + Sync + Send,
{
    let failures: Vec<Value> = (0..count).into_par_iter().map(&case).collect::<Vec<_>>().into_iter().flatten().collect();
    CheckReport { name: name.into(), checked: count, passed: count - failures.len(), failures }
}

fn rng_for(seed: u64, tag: &str, t: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, tag, t as u64))
}

fn err_dump(t: usize, e: &Error) -> Value {
    json!({ "index": t, "error": e.to_string() })
}

/// Executes the configured suites on a dedicated worker pool.
pub fn run(cfg: &JobConfig) -> Result<Report, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.job.jobs)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| run_inline(cfg))
}

fn run_inline(cfg: &JobConfig) -> Result<Report, Error> {
    let needs_ctx = cfg.job.suites.iter().any(|s| matches!(s, Suite::Relations | Suite::Elimination))
        || (cfg.job.suites.contains(&Suite::Ft) && cfg.roots.is_none());
    let ctx = if needs_ctx || cfg.ring.construction == crate::config::Construction::Matrix && !cfg.job.suites.is_empty() {
        match cfg.context() {
            Ok(c) => Some(c),
            Err(e) if needs_ctx => return Err(e),
            Err(_) => None,
        }
    } else {
        None
    };
    let mut suites = Vec::new();
    for &s in &cfg.job.suites {
        let (checks, ft, notes) = match s {
            Suite::Relations => {
                let (c, n) = relations_suite(cfg, ctx.as_ref().expect("context built"));
                (c, vec![], n)
            }
            Suite::Elimination => {
                let (c, n) = elimination_suite(cfg, ctx.as_ref().expect("context built"))?;
                (c, vec![], n)
            }
            Suite::Chevalley => (chevalley_suite(cfg)?, vec![], vec![]),
            Suite::Ft => {
                let (c, f) = ft_suite(cfg, ctx.as_deref())?;
                (c, f, vec![])
            }
        };
        let pass = checks.iter().all(CheckReport::pass) && ft.iter().all(|f| f.certified);
        suites.push(SuiteReport { suite: s, pass, checks, ft, notes });
    }
    Ok(Report {
        schema_version: crate::SCHEMA_VERSION,
        seed: cfg.job.seed,
        samples: cfg.job.samples,
        pass: suites.iter().all(|s| s.pass),
        suites,
    })
}

/// Every selected linear relation plus the conjugation algorithm.
pub fn relations_suite(cfg: &JobConfig, ctx: &Context) -> (Vec<CheckReport>, Vec<String>) {
    let (seed, samples) = (cfg.job.seed, cfg.job.samples);
    let mut checks = relation_checks(ctx, &cfg.linear_ids(), seed, samples);
    checks.push(conjugation_check(ctx, seed, samples));
    (checks, vec![])
}

/// Seeded random instances of each id, compared under the evaluation oracle.
pub fn relation_checks(ctx: &Context, ids: &[RelId], seed: u64, samples: usize) -> Vec<CheckReport> {
    let cat = Catalog::new(ctx);
    let ev = Evaluator::new(ctx);
    ids.iter()
        .copied()
        .map(|id| {
            run_check(format!("relation:{id}"), samples, |t| {
                let mut rng = rng_for(seed, id.name(), t);
                match cat.random_instance(id, &mut rng) {
                    Ok(inst) => {
                        let v = ev.verify(&inst, seed, t);
                        (!v.pass).then(|| serde_json::to_value(v).expect("verdict serializes"))
                    }
                    Err(e) => Some(err_dump(t, &e)),
                }
            })
        })
        .collect()
}

/// The conjugation rewrite evaluates like direct conjugation, under both
/// extreme-root choices.
pub fn conjugation_check(ctx: &Context, seed: u64, samples: usize) -> CheckReport {
    let n = ctx.n();
    let cat = Catalog::new(ctx);
    let ev = Evaluator::new(ctx);
    run_check(format!("conjugation:n{n}"), samples, |t| {
        let mut rng = rng_for(seed, "conjugation", t);
        let sigma = random_special_closed(n, &mut rng);
        let g: Vec<(usize, usize, Elem)> = sigma.iter().map(|&(k, l)| (k, l, ctx.sample_r(k, l, &mut rng))).collect();
        let gw = Word::product(g.iter().map(|(k, l, p)| cat.big_x(*k, *l, p)));
        let mut h = Word::empty();
        for _ in 0..rng.gen_range(1..=3) {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            h = h.mul(&cat.x(i, j, &ctx.sample_a(i, j, &mut rng)));
        }
        let direct = ev.word(&Word::conj(&gw, &h));
        let forms = [ExtremeChoice::Least, ExtremeChoice::Greatest].map(|c| conjugation_form(ctx, &g, &h, c));
        let ok = forms.iter().all(|f| match f {
            Ok(w) => ev.word(w) == direct && w.letters().iter().all(|l| matches!(l.sym, Gen::Z { .. })),
            Err(_) => false,
        });
        (!ok).then(|| json!({ "index": t, "sigma": sigma, "h": h }))
    })
}

/// A named rank-2 subsystem with two elimination orders for it.
type OrderPair = (String, Vec<(usize, usize)>, Vec<(usize, usize)>);

fn rank2_subsystems(n: usize) -> Vec<OrderPair> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push((format!("A2({i},{j},{k})"), vec![(i, j), (j, k)], vec![(j, k), (i, k)]));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in i + 1..n {
                for l in k + 1..n {
                    if k != j && l != j {
                        out.push((format!("A1xA1({i},{j};{k},{l})"), vec![(i, j), (k, l)], vec![(k, l), (i, j)]));
                    }
                }
            }
        }
    }
    out
}

/// The two merges exercised by the elimination checks.
pub fn standard_merges(ctx: &Arc<Context>) -> Result<Vec<MergedContext>, Error> {
    let n = ctx.n();
    [(0, 1), (n - 1, 1)].iter().map(|&(l, m)| MergedContext::new(ctx.clone(), l, m)).collect()
}

/// `F_α` sends merged-context relation instances to evaluation-equal pairs.
/// Ids whose index pattern does not fit the merged context are returned as
/// notes instead.
pub fn elimination_f_checks(
    ctx: &Context,
    merges: &[MergedContext],
    ids: &[RelId],
    seed: u64,
    samples: usize,
) -> (Vec<CheckReport>, Vec<String>) {
    let ev = Evaluator::new(ctx);
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for &id in ids {
        let probe = Catalog::new(merges[0].merged()).random_instance(id, &mut rng_for(seed, "elim:probe", 0));
        if let Err(Error::Precondition(why)) = probe {
            notes.push(format!("elimination:F:{id} skipped on the merged context: {why}"));
            continue;
        }
        checks.push(run_check(format!("elimination:F:{id}"), samples, |t| {
            let mc = &merges[t % merges.len()];
            let mut rng = rng_for(seed, &format!("elim:{id}"), t);
            let res = Catalog::new(mc.merged()).random_instance(id, &mut rng).and_then(|inst| {
                let (l, r) = (mc.f_word(&inst.lhs)?, mc.f_word(&inst.rhs)?);
                let (el, er) = (ev.word(&l), ev.word(&r));
                Ok(el == er && el == Evaluator::new(mc.merged()).word(&inst.lhs))
            });
            match res {
                Ok(true) => None,
                Ok(false) => Some(json!({ "index": t, "merge": mc.root() })),
                Err(e) => Some(err_dump(t, &e)),
            }
        }));
    }
    (checks, notes)
}

/// `F_α ∘ G_α` is the identity at evaluation level on random symbols.
pub fn elimination_fg_check(ctx: &Context, merges: &[MergedContext], seed: u64, samples: usize) -> CheckReport {
    let ev = Evaluator::new(ctx);
    let cat = Catalog::new(ctx);
    run_check(format!("elimination:FG:n{}", ctx.n()), samples, |t| {
        let mc = &merges[t % merges.len()];
        let mut rng = rng_for(seed, "elim:fg", t);
        let g = cat.random_symbol(t % 4 == 0, &mut rng);
        match mc.g_alpha(&g).and_then(|w| mc.f_word(&w)) {
            Ok(back) if ev.word(&back) == ev.word(&Word::gen(g.clone())) => None,
            Ok(_) => Some(json!({ "index": t, "symbol": g, "merge": mc.root() })),
            Err(e) => Some(err_dump(t, &e)),
        }
    })
}

/// Both elimination orders of every rank-2 subsystem agree; `samples`
/// words per subsystem.
pub fn elimination_square_check(ctx: &Arc<Context>, seed: u64, samples: usize) -> Result<CheckReport, Error> {
    let n = ctx.n();
    let ev = Evaluator::new(ctx);
    let chains: Vec<(String, EliminationChain, EliminationChain)> = rank2_subsystems(n)
        .iter()
        .map(|(name, o1, o2)| {
            let psi = psi_classes(n, o1);
            Ok((name.clone(), EliminationChain::new(ctx.clone(), o1, &psi)?, EliminationChain::new(ctx.clone(), o2, &psi)?))
        })
        .collect::<Result<_, Error>>()?;
    Ok(run_check(format!("elimination:square:n{n}"), chains.len() * samples, |t| {
        let (name, c1, c2) = &chains[t / samples];
        let mut rng = rng_for(seed, "elim:square", t);
        let w = Word::gen(Catalog::new(c1.quotient()).random_symbol(t % 5 == 0, &mut rng));
        match (c1.f_psi(&w), c2.f_psi(&w)) {
            (Ok(a), Ok(b)) if ev.word(&a) == ev.word(&b) => None,
            (Err(e), _) | (_, Err(e)) => Some(err_dump(t, &e)),
            _ => Some(json!({ "index": t, "subsystem": name, "word": w })),
        }
    }))
}

/// Root elimination and relativization checks; needs `n ≥ 4`.
pub fn elimination_suite(cfg: &JobConfig, ctx: &Arc<Context>) -> Result<(Vec<CheckReport>, Vec<String>), Error> {
    let (seed, samples) = (cfg.job.seed, cfg.job.samples);
    let n = ctx.n();
    if n < 4 {
        return Ok((vec![], vec![format!("elimination skipped: needs at least 4 idempotents, have {n}")]));
    }
    let merges = standard_merges(ctx)?;
    let (mut checks, notes) = elimination_f_checks(ctx, &merges, &cfg.linear_ids(), seed, samples);
    checks.push(elimination_fg_check(ctx, &merges, seed, samples));
    checks.push(elimination_square_check(ctx, seed, samples)?);
    checks.extend(relativization_checks(cfg, ctx)?);
    Ok((checks, notes))
}

/// ζ/ξ round trips and ξ-images of the defining relations.
pub fn relativization_checks(cfg: &JobConfig, ctx: &Arc<Context>) -> Result<Vec<CheckReport>, Error> {
    let (seed, samples) = (cfg.job.seed, cfg.job.samples);
    let rel = Relativization::new(ctx.clone())?;
    let up = rel.upper();
    let evu = Evaluator::new(up);
    let evc = Evaluator::new(ctx);
    let cat = Catalog::new(up);
    let mut checks = vec![run_check("relativization:round_trip", samples, |t| {
        let mut rng = rng_for(seed, "rel:trip", t);
        let outer = t % 3 == 0;
        let w = Word::gen(cat.random_symbol(outer, &mut rng));
        let x = rel.xi_word(&w);
        let back = evu.word(&rel.zeta_word(&x));
        let here = evu.word(&w);
        // outer parameters may move their A-part between the two copies
        let trip = if outer { rel.collapse(&back) == rel.collapse(&here) } else { back == here };
        (!(trip && evc.word(&x) == rel.collapse(&here))).then(|| json!({ "index": t, "word": w }))
    })];
    let wanted = cfg.linear_ids();
    for id in [RelId::Add1, RelId::Dis, RelId::Conj2, RelId::Hw].into_iter().filter(|r| wanted.contains(r)) {
        checks.push(run_check(format!("relativization:xi:{id}"), samples, |t| {
            let mut rng = rng_for(seed, &format!("rel:{id}"), t);
            match cat.random_instance(id, &mut rng) {
                Ok(inst) if evc.word(&rel.xi_word(&inst.lhs)) == evc.word(&rel.xi_word(&inst.rhs)) => None,
                Ok(inst) => Some(json!({ "index": t, "indices": inst.indices })),
                Err(e) => Some(err_dump(t, &e)),
            }
        }));
    }
    Ok(checks)
}

fn n_rel_check(name: &str, built: Result<StructureConstants, Error>) -> CheckReport {
    match built {
        Ok(sc) => {
            let rep = sc.verify_n_rel();
            CheckReport {
                name: name.into(),
                checked: rep.pairs_checked,
                passed: rep.pairs_checked - rep.failures.len(),
                failures: rep.failures.iter().map(|f| json!(f)).collect(),
            }
        }
        Err(e) => CheckReport { name: name.into(), checked: 1, passed: 0, failures: vec![json!(e.to_string())] },
    }
}

/// Structure-constant identities and the simply laced catalog.
pub fn chevalley_suite(cfg: &JobConfig) -> Result<Vec<CheckReport>, Error> {
    let (seed, samples) = (cfg.job.seed, cfg.job.samples);
    let consts = cfg.structure_constants()?;
    let d = consts.datum().clone();
    let mut checks = vec![
        n_rel_check(&format!("n_rel:{}", d.name()), Ok(consts.clone())),
        n_rel_check(&format!("n_rel:{}:reversed", d.name()), StructureConstants::build(d.clone(), reversed_orientation(&d))),
    ];
    let engine = ChevalleyEngine::new(consts, cfg.base_algebra()?)?;
    let cat = engine.catalog();
    for id in cfg.chevalley_ids() {
        let tag = format!("chevalley:{id}");
        checks.push(run_check(format!("chevalley:{}:{id}", d.name()), samples, |t| {
            let mut rng = rng_for(seed, &tag, t);
            match cat.random_instance(id, &mut rng).and_then(|inst| engine.verify(&inst, seed, t)) {
                Ok(v) if v.pass => None,
                Ok(v) => Some(serde_json::to_value(v).expect("verdict serializes")),
                Err(e) => Some(err_dump(t, &e)),
            }
        }));
    }
    Ok(checks)
}

fn chevalley_fingerprint(cfg: &JobConfig) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(&(&cfg.ring.modulus, &cfg.ring.crossed, &cfg.roots)).expect("serializes"));
    hex::encode(h.finalize())
}

/// FT groups in both scopes and the quotient-map check.
pub fn ft_suite(cfg: &JobConfig, ctx: Option<&Context>) -> Result<(Vec<CheckReport>, Vec<FtSummary>), Error> {
    let (seed, samples, cap) = (cfg.job.seed, cfg.job.samples, cfg.job.generator_cap);
    let mut checks = Vec::new();
    let mut summaries = Vec::new();
    if let Some(ctx) = ctx {
        let g = FtGroup::new(ft_presentation(ctx, cap)?)?;
        summaries.push(g.summary(context_fingerprint(ctx), Scope::Linear));
        let cat = Catalog::new(ctx);
        for id in cfg.linear_ids() {
            checks.push(run_check(format!("ft:linear:{id}"), samples, |t| {
                let mut rng = rng_for(seed, id.name(), t);
                let res = cat.random_instance(id, &mut rng).and_then(|inst| {
                    Ok(g.kills(&g.image_linear(&inst.lhs)?, &g.image_linear(&inst.rhs)?))
                });
                match res {
                    Ok(true) => None,
                    Ok(false) => Some(json!({ "index": t })),
                    Err(e) => Some(err_dump(t, &e)),
                }
            }));
        }
    }
    if cfg.roots.is_some() {
        let consts = cfg.structure_constants()?;
        let base = cfg.base_algebra()?;
        let g = FtGroup::new(ft_presentation_chevalley(&consts, &base, cap)?)?;
        summaries.push(g.summary(chevalley_fingerprint(cfg), Scope::Chevalley));
        let engine = ChevalleyEngine::new(consts, base)?;
        let cat = engine.catalog();
        for id in cfg.chevalley_ids() {
            let tag = format!("chevalley:{id}");
            checks.push(run_check(format!("ft:chevalley:{id}"), samples, |t| {
                let mut rng = rng_for(seed, &tag, t);
                let res = cat.random_instance(id, &mut rng).and_then(|inst| {
                    Ok(g.kills(&g.image_chevalley(&inst.lhs)?, &g.image_chevalley(&inst.rhs)?))
                });
                match res {
                    Ok(true) => None,
                    Ok(false) => Some(json!({ "index": t })),
                    Err(e) => Some(err_dump(t, &e)),
                }
            }));
        }
    }
    for s in &summaries {
        checks.push(CheckReport {
            name: format!("ft:{:?}:certified", s.scope).to_lowercase(),
            checked: 1,
            passed: usize::from(s.certified),
            failures: if s.certified { vec![] } else { vec![json!(s.fingerprint)] },
        });
    }
    Ok((checks, summaries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RootSpec;

    fn small(samples: usize) -> JobConfig {
        let mut c = JobConfig::matrix(4, 8, 2);
        c.job.samples = samples;
        c.job.seed = 7;
        c
    }

    #[test]
    fn empty_selection_is_an_empty_passing_report() {
        let mut c = small(3);
        c.job.suites.clear();
        let r = run(&c).unwrap();
        assert!(r.pass && r.suites.is_empty());
    }

    #[test]
    fn relations_pass_and_are_deterministic_across_pools() {
        let mut c = small(6);
        c.job.suites = vec![Suite::Relations];
        c.job.jobs = 1;
        let a = run(&c).unwrap();
        c.job.jobs = 4;
        let b = run(&c).unwrap();
        assert!(a.pass, "{}", a.to_json());
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.check("relation:HW").is_some());
    }

    #[test]
    fn all_suites_on_a_small_job() {
        let mut c = small(3);
        c.roots = Some(RootSpec { system: "A3".into(), orientation: None });
        let r = run(&c).unwrap();
        assert!(r.pass, "{}", r.to_json());
        assert_eq!(r.suites.len(), 4);
        let ft = &r.suites[3].ft;
        assert_eq!(ft.len(), 2);
    }

    #[test]
    fn chevalley_without_roots_is_a_config_error() {
        let mut c = small(2);
        c.job.suites = vec![Suite::Chevalley];
        assert!(matches!(run(&c), Err(Error::Config(_))));
    }

    #[test]
    fn exit_codes() {
        let mut c = small(2);
        c.job.suites = vec![Suite::Relations];
        c.job.relations = Some(vec![RelId::St1]);
        let mut r = run(&c).unwrap();
        assert_eq!(exit_code(&Ok(r.clone())), 0);
        r.suites[0].checks[0].failures.push(json!({ "index": 0 }));
        r.suites[0].pass = false;
        r.pass = false;
        assert_eq!(exit_code(&Ok(r)), 1);
        assert_eq!(exit_code(&Err(Error::Config("x".into()))), 2);
    }

    #[test]
    fn rank2_enumeration_covers_a4() {
        let s = rank2_subsystems(5);
        assert_eq!(s.iter().filter(|x| x.0.starts_with("A2")).count(), 10);
        assert_eq!(s.iter().filter(|x| x.0.starts_with("A1xA1")).count(), 15);
    }
}
