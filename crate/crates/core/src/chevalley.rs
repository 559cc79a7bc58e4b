//! Simply laced Steinberg data: structure constants, the `z_α` relation
//! catalog and verification through `A_3` embeddings into the linear model.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eval::{Evaluator, Verdict};
use crate::modular::Elem;
use crate::rings::{mat, Algebra, Context};
use crate::roots::{Config, RootDatum};
use crate::words::{Gen, Params, RelId, RelationInstance, Symbol, Word};
use crate::{derive_seed, Error};

/// Generators `z_α(a, p)` (`a ∈ 𝔞`, `p ∈ K`) and `X_α(p)` of `st(Φ, K)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChevGen {
    Z { root: usize, a: Elem, p: Elem },
    X { root: usize, p: Elem },
}

impl Symbol for ChevGen {
    fn is_identity(&self) -> bool {
        match self {
            ChevGen::Z { a, .. } => a.is_zero(),
            ChevGen::X { p, .. } => p.is_zero(),
        }
    }
}

impl ChevGen {
    pub fn root(&self) -> usize {
        match self {
            ChevGen::Z { root, .. } | ChevGen::X { root, .. } => *root,
        }
    }
}

/// Directed Dynkin edges over simple-root positions.
pub type Orientation = Vec<(usize, usize)>;

/// Edges pointing toward the higher node.
pub fn default_orientation(datum: &RootDatum) -> Orientation {
    datum.dynkin_edges()
}

pub fn reversed_orientation(datum: &RootDatum) -> Orientation {
    datum.dynkin_edges().into_iter().map(|(i, j)| (j, i)).collect()
}

/// Signs `N_{αβ}` for every summable pair.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    datum: Arc<RootDatum>,
    orientation: Orientation,
    n: HashMap<(usize, usize), i8>,
}

/// Failures of the six sign identities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NRelReport {
    pub pairs_checked: usize,
    pub failures: Vec<(usize, usize, &'static str)>,
}

impl NRelReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

impl StructureConstants {
    /// Builds the table from a bimultiplicative asymmetry function and
    /// checks the sign identities before returning it.
    pub fn build(datum: Arc<RootDatum>, orientation: Orientation) -> Result<Self, Error> {
        let r = datum.rank();
        let mut edges = datum.dynkin_edges();
        let mut given: Vec<(usize, usize)> = orientation.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
        edges.sort_unstable();
        given.sort_unstable();
        if edges != given || orientation.iter().any(|&(i, j)| i >= r || j >= r) {
            return Err(Error::Config("orientation must direct every Dynkin edge exactly once".into()));
        }
        let eps = |a: usize, b: usize| -> i8 {
            let (x, y) = (datum.simple_coords(a), datum.simple_coords(b));
            let mut e: i64 = (0..r).map(|i| (x[i] * y[i]) as i64).sum();
            for &(i, j) in &orientation {
                e += (x[i] * y[j]) as i64;
            }
            if e.rem_euclid(2) == 0 {
                1
            } else {
                -1
            }
        };
        let sign = |a: usize| if datum.is_positive(a) { 1i8 } else { -1 };
        let mut n = HashMap::new();
        for a in 0..datum.len() {
            for b in 0..datum.len() {
                if let Some(c) = datum.add(a, b) {
                    n.insert((a, b), eps(a, b) * sign(a) * sign(b) * sign(c));
                }
            }
        }
        let sc = StructureConstants { datum, orientation, n };
        let report = sc.verify_n_rel();
        if !report.passes() {
            return Err(Error::Roots(format!("structure constants violate {} identities", report.failures.len())));
        }
        Ok(sc)
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn orientation(&self) -> &Orientation {
        &self.orientation
    }

    /// `N_{αβ}`; `None` when `α + β` is not a root.
    pub fn get(&self, a: usize, b: usize) -> Option<i8> {
        self.n.get(&(a, b)).copied()
    }

    fn n(&self, a: usize, b: usize) -> i8 {
        self.get(a, b).expect("summable pair")
    }

    /// Flips one entry; used to exercise the identity checker.
    pub fn flip(&mut self, a: usize, b: usize) {
        if let Some(v) = self.n.get_mut(&(a, b)) {
            *v = -*v;
        }
    }

    /// `N_{αβ} = −N_{βα} = −N_{−α,−β} = N_{−β,−α} = N_{β,−α−β} = N_{−α−β,α}`.
    pub fn verify_n_rel(&self) -> NRelReport {
        let d = &self.datum;
        let mut rep = NRelReport::default();
        let mut keys: Vec<(usize, usize)> = self.n.keys().copied().collect();
        keys.sort_unstable();
        for (a, b) in keys {
            rep.pairs_checked += 1;
            let v = self.n(a, b);
            let (na, nb) = (d.neg(a), d.neg(b));
            let nab = d.neg(d.add(a, b).unwrap());
            let checks: [(&'static str, i8); 5] = [
                ("N_ab = -N_ba", -self.get(b, a).unwrap_or(0)),
                ("N_ab = -N_-a-b", -self.get(na, nb).unwrap_or(0)),
                ("N_ab = N_-b-a", self.get(nb, na).unwrap_or(0)),
                ("N_ab = N_b,-a-b", self.get(b, nab).unwrap_or(0)),
                ("N_ab = N_-a-b,a", self.get(nab, a).unwrap_or(0)),
            ];
            for (name, w) in checks {
                if w != v {
                    rep.failures.push((a, b, name));
                }
            }
        }
        rep
    }
}

/// Sign-twisted identification of an `A_3` subsystem with `Mat(4)` roots.
#[derive(Clone, Debug)]
pub struct SubsystemEmbedding {
    pub chain: [usize; 3],
    /// root ↦ (pair `(i, j)` of `e_i − e_j`, twist `χ`)
    pub map: HashMap<usize, ((usize, usize), i8)>,
}

impl SubsystemEmbedding {
    /// Solves `χ_α χ_β N^lin_{αβ} = χ_{α+β} N_{αβ}` over `Z/2`.
    pub fn new(consts: &StructureConstants, chain: [usize; 3]) -> Result<Self, Error> {
        let d = consts.datum();
        let sc = |r: usize| d.simple_coords(r).to_vec();
        let g: Vec<Vec<i32>> = chain.iter().map(|&c| sc(c)).collect();
        let mut pairs: HashMap<usize, (usize, usize)> = HashMap::new();
        for c in [-1i32, 0, 1] {
            for c2 in [-1i32, 0, 1] {
                for c3 in [-1i32, 0, 1] {
                    let cs = [c, c2, c3];
                    let nz: Vec<usize> = (0..3).filter(|&t| cs[t] != 0).collect();
                    if nz.is_empty() {
                        continue;
                    }
                    // only consecutive runs of equal sign are roots of A_3
                    let (s, t) = (nz[0], *nz.last().unwrap());
                    if nz.len() != t - s + 1 || nz.iter().any(|&u| cs[u] != cs[s]) {
                        continue;
                    }
                    let v: Vec<i32> = (0..d.rank()).map(|k| (0..3).map(|u| cs[u] * g[u][k]).sum()).collect();
                    let r = (0..d.len()).find(|&r| d.simple_coords(r) == v.as_slice());
                    let r = r.ok_or_else(|| Error::Roots("chain span is not an A_3 subsystem".into()))?;
                    let p = if cs[s] > 0 { (s, t + 1) } else { (t + 1, s) };
                    pairs.insert(r, p);
                }
            }
        }
        let roots: Vec<usize> = {
            let mut v: Vec<usize> = pairs.keys().copied().collect();
            v.sort_unstable();
            v
        };
        let pos = |r: usize| roots.iter().position(|&x| x == r).unwrap();
        // rows: bitmask of unknowns plus right-hand side in bit 12
        let mut rows: Vec<u32> = Vec::new();
        for &a in &roots {
            for &b in &roots {
                if let Some(c) = d.add(a, b) {
                    let lin: i8 = if pairs[&a].1 == pairs[&b].0 { 1 } else { -1 };
                    let rhs = u32::from(lin != consts.n(a, b));
                    rows.push((1 << pos(a)) ^ (1 << pos(b)) ^ (1 << pos(c)) ^ (rhs << 12));
                }
            }
        }
        let mut pivots: Vec<(usize, u32)> = Vec::new();
        for mut row in rows {
            for &(col, pr) in &pivots {
                if row >> col & 1 == 1 {
                    row ^= pr;
                }
            }
            if row & 0xfff == 0 {
                if row != 0 {
                    return Err(Error::Roots("sign twist system is inconsistent".into()));
                }
                continue;
            }
            let col = row.trailing_zeros() as usize;
            for (_, pr) in pivots.iter_mut() {
                if *pr >> col & 1 == 1 {
                    *pr ^= row;
                }
            }
            pivots.push((col, row));
        }
        let mut bits = [0u32; 12];
        for &(col, row) in &pivots {
            bits[col] = row >> 12 & 1;
        }
        let map = roots
            .iter()
            .map(|&r| (r, (pairs[&r], if bits[pos(r)] == 1 { -1 } else { 1 })))
            .collect();
        Ok(SubsystemEmbedding { chain, map })
    }
}

/// Verifies `z_α` relations over `Φ` with scalars `K` and ideal `𝔞`.
pub struct ChevalleyEngine {
    consts: StructureConstants,
    base: Arc<Algebra>,
    linear: Arc<Context>,
    cache: Mutex<HashMap<Vec<usize>, Arc<SubsystemEmbedding>>>,
}

impl ChevalleyEngine {
    pub fn new(consts: StructureConstants, base: Arc<Algebra>) -> Result<Self, Error> {
        if consts.datum().rank() < 3 {
            return Err(Error::Roots("embedding needs rank at least 3".into()));
        }
        let linear = Arc::new(Context::matrix(4, &base)?);
        Ok(ChevalleyEngine { consts, base, linear, cache: Mutex::new(HashMap::new()) })
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.consts
    }

    pub fn datum(&self) -> &RootDatum {
        self.consts.datum()
    }

    pub fn linear(&self) -> &Arc<Context> {
        &self.linear
    }

    /// Embedding of an `A_3` subsystem containing the span of `support`.
    pub fn embedding(&self, support: &[usize]) -> Result<Arc<SubsystemEmbedding>, Error> {
        let mut key = self.datum().span_closure(support);
        key.sort_unstable();
        if let Some(e) = self.cache.lock().expect("cache").get(&key) {
            return Ok(e.clone());
        }
        let chain = self
            .datum()
            .a3_chain_containing(&key)
            .ok_or_else(|| Error::Roots("no A_3 subsystem contains the support".into()))?;
        let e = Arc::new(SubsystemEmbedding::new(&self.consts, chain)?);
        self.cache.lock().expect("cache").insert(key, e.clone());
        Ok(e)
    }

    /// Transports a word into `Mat(4)` through an embedding.
    pub fn transport(&self, emb: &SubsystemEmbedding, w: &Word<ChevGen>) -> Result<Word<Gen>, Error> {
        let ad = self.base.dim();
        let kd = self.base.ring().dim();
        let zm = self.base.zm();
        let sgn = |s: i8, x: &Elem| if s < 0 { zm.neg_v(x) } else { x.clone() };
        w.map(|g| {
            let r = g.root();
            let &((i, j), chi) = emb.map.get(&r).ok_or_else(|| Error::Roots("root outside the embedding".into()))?;
            Ok(Word::gen(match g {
                ChevGen::Z { a, p, .. } => {
                    let chi_neg = emb.map[&self.datum().neg(r)].1;
                    Gen::Z {
                        i,
                        j,
                        a: mat::entry(4, ad, i, j, &sgn(chi, a)),
                        p: mat::entry(4, kd, j, i, &sgn(chi_neg, p)),
                    }
                }
                ChevGen::X { p, .. } => Gen::X { i, j, p: mat::entry(4, kd, i, j, &sgn(chi, p)) },
            }))
        })
    }

    /// Roots used by a word.
    pub fn support(w: &Word<ChevGen>) -> Vec<usize> {
        let mut s: Vec<usize> = w.letters().iter().map(|l| l.sym.root()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// The rank ≤ 2 configuration spanned by an instance.
    pub fn certify(&self, inst: &RelationInstance<ChevGen>) -> Result<Config, Error> {
        let mut s = Self::support(&inst.lhs);
        s.extend(Self::support(&inst.rhs));
        s.extend(inst.indices.iter().copied());
        self.datum()
            .configuration(&s)
            .filter(|c| *c != Config::Empty || inst.lhs.is_empty())
            .ok_or_else(|| Error::Roots("instance support is not of type A1, A1xA1 or A2".into()))
    }

    pub fn verify(&self, inst: &RelationInstance<ChevGen>, seed: u64, index: usize) -> Result<Verdict, Error> {
        let config = self.certify(inst)?;
        let mut s = Self::support(&inst.lhs);
        s.extend(Self::support(&inst.rhs));
        s.extend(inst.indices.iter().copied());
        let emb = self.embedding(&s)?;
        let ev = Evaluator::new(&self.linear);
        let l = ev.word(&self.transport(&emb, &inst.lhs)?);
        let r = ev.word(&self.transport(&emb, &inst.rhs)?);
        Ok(Verdict {
            relation_id: inst.id.name().to_string(),
            seed,
            index,
            indices: inst.indices.iter().map(|i| i + 1).collect(),
            parameters: inst.params.iter().map(|(k, v)| (k.clone(), v.0.clone())).collect(),
            pass: l == r,
            lhs_eval: l.0,
            rhs_eval: r.0,
            map: Some(format!("embed:{config:?}")),
        })
    }

    pub fn catalog(&self) -> ChevCatalog<'_> {
        ChevCatalog { consts: &self.consts, base: &self.base }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pattern {
    One,
    Sum,
    Diff,
    Orth,
    NonSum,
    Any,
}

fn chev_layout(id: RelId) -> Option<(Pattern, &'static [(&'static str, bool)])> {
    use Pattern::*;
    // (name, is_ideal)
    Some(match id {
        RelId::St1 => (One, &[("p", false), ("q", false)]),
        RelId::St2 => (Sum, &[("p", false), ("q", false)]),
        RelId::St3 => (NonSum, &[("p", false), ("q", false)]),
        RelId::Rel1 => (NonSum, &[("p", false), ("a", true)]),
        RelId::Rel2 => (Sum, &[("p", false), ("a", true)]),
        RelId::Rel3 => (Any, &[("a", true), ("b", true), ("q", false)]),
        RelId::Add1 => (One, &[("a", true), ("a2", true), ("p", false)]),
        RelId::Add2 => (Diff, &[("a", true), ("a2", true), ("b", true), ("b2", true), ("p", false)]),
        RelId::Add3 => (
            Diff,
            &[("a", true), ("a2", true), ("b", true), ("b2", true), ("p", false), ("q", false)],
        ),
        RelId::Conj1 => (Sum, &[("c", true), ("r", false), ("a", true), ("b", true)]),
        RelId::Mult => (Sum, &[("a", true), ("b", true), ("p", false)]),
        RelId::Dis => (Orth, &[("a", true), ("p", false), ("b", true), ("q", false)]),
        RelId::Sym => (Diff, &[("a", true), ("b", true), ("p", false), ("q", false)]),
        RelId::Conj2 | RelId::Conj2p => (
            Sum,
            &[("c", true), ("r", false), ("a", true), ("b", true), ("p", false), ("q", false)],
        ),
        RelId::Hw => (Sum, &[("a", true), ("q", false), ("r", false), ("p", false)]),
        RelId::Rel4 => (One, &[("a", true), ("p", false), ("b", true)]),
        _ => return None,
    })
}

/// Relation ids of the simply laced catalog.
pub fn chevalley_ids() -> Vec<RelId> {
    RelId::ALL.iter().copied().filter(|&id| chev_layout(id).is_some()).collect()
}

/// Builds `z_α` words and relation instances.
pub struct ChevCatalog<'a> {
    consts: &'a StructureConstants,
    base: &'a Algebra,
}

impl<'a> ChevCatalog<'a> {
    pub fn new(consts: &'a StructureConstants, base: &'a Algebra) -> Self {
        ChevCatalog { consts, base }
    }

    fn d(&self) -> &RootDatum {
        self.consts.datum()
    }

    fn nn(&self, a: usize, b: usize) -> Result<i8, Error> {
        self.consts
            .get(a, b)
            .ok_or_else(|| Error::Precondition("roots are not summable".into()))
    }

    fn sum(&self, a: usize, b: usize) -> Result<usize, Error> {
        self.d().add(a, b).ok_or_else(|| Error::Precondition("roots are not summable".into()))
    }

    fn diff(&self, a: usize, b: usize) -> Result<usize, Error> {
        self.sum(a, self.d().neg(b))
    }

    fn sa(&self, s: i8, a: &Elem) -> Elem {
        if s < 0 {
            self.base.neg(a)
        } else {
            a.clone()
        }
    }

    fn sk(&self, s: i8, p: &Elem) -> Elem {
        if s < 0 {
            self.base.ring().neg(p)
        } else {
            p.clone()
        }
    }

    pub fn z(&self, r: usize, a: &Elem, p: &Elem) -> Word<ChevGen> {
        Word::gen(ChevGen::Z { root: r, a: a.clone(), p: p.clone() })
    }

    pub fn x(&self, r: usize, a: &Elem) -> Word<ChevGen> {
        self.z(r, a, &self.base.ring().zero())
    }

    pub fn big_x(&self, r: usize, p: &Elem) -> Word<ChevGen> {
        Word::gen(ChevGen::X { root: r, p: p.clone() })
    }

    /// `z_α(a, p) x_β(b) x_{β−α}(N_{−α,β} bp)`.
    pub fn z2(&self, al: usize, be: usize, a: &Elem, b: &Elem, p: &Elem) -> Result<Word<ChevGen>, Error> {
        let bma = self.diff(be, al)?;
        let na = self.d().neg(al);
        let bp = self.base.rmul(b, p);
        Ok(self.z(al, a, p).mul(&self.x(be, b)).mul(&self.x(bma, &self.sa(self.nn(na, be)?, &bp))))
    }

    /// `z_{α[α−β]}(a, N_{−β,α} aq; p) · z_{β[β−α]}(b, N_{−α,β} bp; q)`.
    #[allow(clippy::too_many_arguments)]
    pub fn z4(&self, al: usize, be: usize, a: &Elem, b: &Elem, p: &Elem, q: &Elem) -> Result<Word<ChevGen>, Error> {
        let d = self.d();
        let amb = self.diff(al, be)?;
        let bma = self.diff(be, al)?;
        let aq = self.sa(self.nn(d.neg(be), al)?, &self.base.rmul(a, q));
        let bp = self.sa(self.nn(d.neg(al), be)?, &self.base.rmul(b, p));
        Ok(self.z2(al, amb, a, &aq, p)?.mul(&self.z2(be, bma, b, &bp, q)?))
    }

    fn pattern_ok(&self, pat: Pattern, roots: &[usize]) -> bool {
        let d = self.d();
        match pat {
            Pattern::One | Pattern::Any => true,
            Pattern::Sum => d.add(roots[0], roots[1]).is_some(),
            Pattern::Diff => d.add(roots[0], d.neg(roots[1])).is_some(),
            Pattern::Orth => d.dot(roots[0], roots[1]) == 0,
            Pattern::NonSum => d.add(roots[0], roots[1]).is_none() && roots[1] != d.neg(roots[0]),
        }
    }

    pub fn instance(&self, id: RelId, roots: &[usize], ps: &Params) -> Result<RelationInstance<ChevGen>, Error> {
        let (pat, lay) =
            chev_layout(id).ok_or_else(|| Error::Precondition(format!("{id} has no simply laced form")))?;
        let arity = if pat == Pattern::One { 1 } else { 2 };
        if roots.len() != arity || roots.iter().any(|&r| r >= self.d().len()) {
            return Err(Error::Precondition(format!("{id} takes {arity} roots")));
        }
        if !self.pattern_ok(pat, roots) {
            return Err(Error::Precondition(format!("{id}: root constraint violated")));
        }
        for &(name, ideal) in lay {
            let v = ps.get(name).ok_or_else(|| Error::Precondition(format!("{id}: missing {name}")))?;
            let ok = if ideal { self.base.contains(v) } else { self.base.ring().contains(v) };
            if !ok {
                return Err(Error::ComponentMismatch(format!("{id}: {name} outside its scalar domain")));
            }
        }
        let (lhs, rhs) = self.sides(id, roots, ps)?;
        Ok(RelationInstance { id, indices: roots.to_vec(), params: ps.clone(), lhs, rhs })
    }

    fn sides(&self, id: RelId, rt: &[usize], ps: &Params) -> Result<(Word<ChevGen>, Word<ChevGen>), Error> {
        let g = |k: &str| &ps[k];
        let d = self.d();
        let k = self.base.ring();
        let alg = self.base;
        let al = rt[0];
        Ok(match id {
            RelId::St1 => (
                self.big_x(al, g("p")).mul(&self.big_x(al, g("q"))),
                self.big_x(al, &k.add(g("p"), g("q"))),
            ),
            RelId::St2 => {
                let be = rt[1];
                (
                    Word::commutator(&self.big_x(al, g("p")), &self.big_x(be, g("q"))),
                    self.big_x(self.sum(al, be)?, &self.sk(self.nn(al, be)?, &k.mul(g("p"), g("q")))),
                )
            }
            RelId::St3 => (Word::commutator(&self.big_x(al, g("p")), &self.big_x(rt[1], g("q"))), Word::empty()),
            RelId::Rel1 => {
                let h = self.x(rt[1], g("a"));
                (Word::conj(&self.big_x(al, g("p")), &h), h)
            }
            RelId::Rel2 => {
                let be = rt[1];
                let pa = self.sa(self.nn(al, be)?, &alg.lmul(g("p"), g("a")));
                (
                    Word::conj(&self.big_x(al, g("p")), &self.x(be, g("a"))),
                    self.x(self.sum(al, be)?, &pa).mul(&self.x(be, g("a"))),
                )
            }
            RelId::Rel3 => {
                let h = self.z(rt[1], g("b"), g("q"));
                let da = alg.d(g("a")).unwrap_or_else(|| k.zero());
                (Word::conj(&self.big_x(al, &da), &h), Word::conj(&self.x(al, g("a")), &h))
            }
            RelId::Add1 => (
                self.z(al, g("a"), g("p")).mul(&self.z(al, g("a2"), g("p"))),
                self.z(al, &alg.add(g("a"), g("a2")), g("p")),
            ),
            RelId::Add2 => {
                let be = rt[1];
                (
                    self.z2(al, be, g("a"), g("b"), g("p"))?.mul(&self.z2(al, be, g("a2"), g("b2"), g("p"))?),
                    self.z2(al, be, &alg.add(g("a"), g("a2")), &alg.add(g("b"), g("b2")), g("p"))?,
                )
            }
            RelId::Add3 => {
                let be = rt[1];
                let (p, q) = (g("p"), g("q"));
                (
                    self.z4(al, be, g("a"), g("b"), p, q)?.mul(&self.z4(al, be, g("a2"), g("b2"), p, q)?),
                    self.z4(al, be, &alg.add(g("a"), g("a2")), &alg.add(g("b"), g("b2")), p, q)?,
                )
            }
            RelId::Conj1 => {
                let be = rt[1];
                let e = self.nn(al, be)?;
                let ab = self.sum(al, be)?;
                let (c, r, a, b) = (g("c"), g("r"), g("a"), g("b"));
                let bc = alg.mul(b, c);
                let acr = alg.rmul(&alg.mul(a, c), r);
                let a1 = alg.sub(&alg.add(a, &self.sa(e, &bc)), &acr);
                let b1 = alg.sub(&alg.add(b, &alg.rmul(&bc, r)), &self.sa(e, &alg.rmul(&acr, r)));
                (
                    Word::conj(&self.z(al, c, r), &self.x(ab, a).mul(&self.x(be, b))),
                    self.x(ab, &a1).mul(&self.x(be, &b1)),
                )
            }
            RelId::Mult => {
                let be = rt[1];
                let e = self.nn(al, be)?;
                let (a, b, p) = (g("a"), g("b"), g("p"));
                let l = self.x(d.neg(be), &self.sa(e, &alg.rmul(a, p))).mul(&self.x(al, a));
                let r = self.x(be, b).mul(&self.x(d.neg(al), &self.sa(-e, &alg.rmul(b, p))));
                (Word::commutator(&l, &r), self.z(self.sum(al, be)?, &alg.mul(a, b), p))
            }
            RelId::Dis => (
                Word::commutator(&self.z(al, g("a"), g("p")), &self.z(rt[1], g("b"), g("q"))),
                Word::empty(),
            ),
            RelId::Sym => {
                let be = rt[1];
                (
                    self.z4(al, be, g("a"), g("b"), g("p"), g("q"))?,
                    self.z4(be, al, g("b"), g("a"), g("q"), g("p"))?,
                )
            }
            RelId::Conj2 | RelId::Conj2p => {
                let be = rt[1];
                let e = self.nn(al, be)?;
                let ab = self.sum(al, be)?;
                let (c, r, a, b, p, q) = (g("c"), g("r"), g("a"), g("b"), g("p"), g("q"));
                let bc = alg.mul(b, c);
                let acr = alg.rmul(&alg.mul(a, c), r);
                let a1 = alg.sub(&alg.add(a, &self.sa(e, &bc)), &acr);
                let b1 = alg.sub(&alg.add(b, &alg.rmul(&bc, r)), &self.sa(e, &alg.rmul(&acr, r)));
                // u = cpr + ε cqr², v = −(ε cp + cqr)
                let cpr = alg.rmul(&alg.rmul(c, p), r);
                let cqr = alg.rmul(&alg.rmul(c, q), r);
                let u = alg.add(&cpr, &self.sa(e, &alg.rmul(&cqr, r)));
                let v = alg.neg(&alg.add(&self.sa(e, &alg.rmul(c, p)), &cqr));
                let lhs = Word::conj(&self.z(al, c, r), &self.z4(ab, be, a, b, p, q)?);
                let rhs = if id == RelId::Conj2 {
                    let h = self.x(d.neg(ab), &u).mul(&self.x(d.neg(be), &v));
                    Word::conj(&h, &self.z4(ab, be, &a1, &b1, p, q)?)
                } else {
                    let du = alg.d(&u).unwrap_or_else(|| k.zero());
                    let dv = alg.d(&v).unwrap_or_else(|| k.zero());
                    self.z4(ab, be, &a1, &b1, &k.add(p, &du), &k.add(q, &dv))?
                };
                (lhs, rhs)
            }
            RelId::Hw => {
                let be = rt[1];
                let e = self.nn(al, be)?;
                let ab = self.sum(al, be)?;
                let (a, q, r, p) = (g("a"), g("q"), g("r"), g("p"));
                let eaq = self.sa(e, &alg.rmul(a, q));
                let r1 = k.sub(r, &self.sk(e, &k.mul(p, q)));
                let eap = self.sa(-e, &alg.rmul(a, p));
                (self.z4(ab, be, a, &eaq, &r1, p)?, self.z4(al, ab, &eap, a, q, r)?)
            }
            RelId::Rel4 => {
                let (a, p, b) = (g("a"), g("p"), g("b"));
                let db = alg.d(b).unwrap_or_else(|| k.zero());
                (
                    self.z(al, a, &k.add(p, &db)),
                    Word::conj(&self.x(d.neg(al), b), &self.z(al, a, p)),
                )
            }
            _ => return Err(Error::Precondition(format!("{id} has no simply laced form"))),
        })
    }

    pub fn random_instance<G: Rng + ?Sized>(&self, id: RelId, rng: &mut G) -> Result<RelationInstance<ChevGen>, Error> {
        let (pat, lay) =
            chev_layout(id).ok_or_else(|| Error::Precondition(format!("{id} has no simply laced form")))?;
        let n = self.d().len();
        let arity = if pat == Pattern::One { 1 } else { 2 };
        let mut roots = vec![0; arity];
        let mut found = false;
        for _ in 0..10_000 {
            for r in roots.iter_mut() {
                *r = rng.gen_range(0..n);
            }
            if self.pattern_ok(pat, &roots) {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::Precondition(format!("{id}: no admissible roots in {}", self.d().name())));
        }
        let ps: BTreeMap<String, Elem> = lay
            .iter()
            .map(|&(name, ideal)| {
                let v = if ideal { self.base.sample_any(rng) } else { self.base.ring().sample(rng) };
                (name.to_string(), v)
            })
            .collect();
        self.instance(id, &roots, &ps)
    }

    pub fn random_instances(&self, id: RelId, count: usize, seed: u64) -> Result<Vec<RelationInstance<ChevGen>>, Error> {
        let tag = format!("chevalley:{id}");
        (0..count)
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &tag, t as u64));
                self.random_instance(id, &mut rng)
            })
            .collect()
    }
}
