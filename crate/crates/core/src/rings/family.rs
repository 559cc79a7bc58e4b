//! Idempotent families, Peirce components and the evaluation context.

use std::sync::{Arc, OnceLock};

use rand::Rng;
use serde::Serialize;

use super::{mat, Algebra, FiniteRing, SemidirectRing};
use crate::modular::{Elem, ModSpan};
use crate::Error;

/// Outcome of checking a candidate idempotent family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub n: usize,
    pub size_ok: bool,
    pub idempotent: Vec<bool>,
    pub orthogonal: bool,
    pub complete: bool,
    pub full: Vec<bool>,
}

impl FamilyReport {
    pub fn passes(&self) -> bool {
        self.size_ok
            && self.orthogonal
            && self.complete
            && self.idempotent.iter().all(|&b| b)
            && self.full.iter().all(|&b| b)
    }

    fn failure(&self) -> String {
        let mut bad = Vec::new();
        if !self.size_ok {
            bad.push(format!("n = {} < 3", self.n));
        }
        if let Some(i) = self.idempotent.iter().position(|b| !b) {
            bad.push(format!("e_{} is not idempotent", i + 1));
        }
        if !self.orthogonal {
            bad.push("not orthogonal".into());
        }
        if !self.complete {
            bad.push("sum is not 1".into());
        }
        if let Some(i) = self.full.iter().position(|b| !b) {
            bad.push(format!("e_{} is not full", i + 1));
        }
        bad.join(", ")
    }
}

/// Checks idempotency, orthogonality, completeness and fullness; `min_n` is
/// the smallest accepted family size.
pub fn validate_idempotent_family(ring: &FiniteRing, family: &[Elem], min_n: usize) -> FamilyReport {
    let n = family.len();
    let idempotent = family
        .iter()
        .map(|e| ring.contains(e) && ring.mul(e, e) == *e)
        .collect();
    let orthogonal = (0..n).all(|i| (0..n).all(|j| i == j || ring.mul(&family[i], &family[j]).is_zero()));
    let sum = family.iter().fold(ring.zero(), |acc, e| ring.add(&acc, e));
    let complete = sum == ring.one();
    let full = family
        .iter()
        .map(|e| ring.ideal_closure(std::slice::from_ref(e)).same_span(ring.span()))
        .collect();
    FamilyReport {
        n,
        size_ok: n >= min_n,
        idempotent,
        orthogonal,
        complete,
        full,
    }
}

/// Solves `x = Σ u_t v_t` with `u_t ∈ e_iAe_k`, `v_t ∈ e_kRe_j` for fixed
/// `(i, k, j)`.
#[derive(Debug)]
pub struct FullnessSolver {
    pairs: Vec<(Elem, Elem)>,
    span: ModSpan,
}

impl FullnessSolver {
    fn new(ctx: &Context, i: usize, k: usize, j: usize) -> Self {
        let mut pairs = Vec::new();
        let mut prods = Vec::new();
        for u in ctx.a_component(i, k).basis() {
            for v in ctx.r_component(k, j).basis() {
                prods.push(ctx.alg.rmul(&u, &v));
                pairs.push((u.clone(), v));
            }
        }
        let span = ModSpan::tracking_from_gens(ctx.ring.modulus(), ctx.alg.dim(), &prods);
        FullnessSolver { pairs, span }
    }

    pub fn decompose(&self, x: &Elem, alg: &Algebra) -> Option<Vec<(Elem, Elem)>> {
        let coeffs = self.span.solve(x)?;
        let zm = alg.zm();
        Some(
            coeffs
                .iter()
                .zip(&self.pairs)
                .filter(|(c, _)| **c != 0)
                .map(|(c, (u, v))| (zm.scale_v(*c, u), v.clone()))
                .collect(),
        )
    }
}

/// A crossed module together with a validated family of idempotents; the
/// shared, immutable input of every verification.
#[derive(Debug)]
pub struct Context {
    ring: Arc<FiniteRing>,
    alg: Arc<Algebra>,
    sd: SemidirectRing,
    family: Vec<Elem>,
    labels: Vec<Vec<usize>>,
    r_comp: Vec<ModSpan>,
    a_comp: Vec<ModSpan>,
    fullness: Vec<OnceLock<Option<Arc<FullnessSolver>>>>,
}

impl Context {
    /// Validates the family (n ≥ 3) and precomputes Peirce components.
    pub fn new(alg: Arc<Algebra>, family: Vec<Elem>) -> Result<Self, Error> {
        Self::with_min(alg, family, 3, None)
    }

    /// As [`Context::new`] with an explicit minimum family size and optional
    /// labels naming the original indices behind each idempotent.
    pub fn with_min(
        alg: Arc<Algebra>,
        family: Vec<Elem>,
        min_n: usize,
        labels: Option<Vec<Vec<usize>>>,
    ) -> Result<Self, Error> {
        let ring = alg.ring().clone();
        let report = validate_idempotent_family(&ring, &family, min_n);
        if !report.passes() {
            return Err(Error::InvalidFamily(report.failure()));
        }
        let n = family.len();
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| vec![i]).collect());
        let mut r_comp = Vec::with_capacity(n * n);
        let mut a_comp = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let rs: Vec<Elem> = ring
                    .generators()
                    .iter()
                    .map(|g| ring.mul(&ring.mul(&family[i], g), &family[j]))
                    .collect();
                r_comp.push(ModSpan::from_gens(ring.modulus(), ring.dim(), &rs));
                let as_: Vec<Elem> = alg
                    .generators()
                    .iter()
                    .map(|g| alg.lmul(&family[i], &alg.rmul(g, &family[j])))
                    .collect();
                a_comp.push(ModSpan::from_gens(ring.modulus(), alg.dim(), &as_));
            }
        }
        Ok(Context {
            sd: alg.semidirect(),
            ring,
            alg,
            family,
            labels,
            r_comp,
            a_comp,
            fullness: (0..n * n * n).map(|_| OnceLock::new()).collect(),
        })
    }

    /// `Mat(size, K)` with the diagonal idempotents and `A = Mat(size, 𝔞)`.
    pub fn matrix(size: usize, base: &Algebra) -> Result<Self, Error> {
        let k = base.ring();
        let mk = Arc::new(FiniteRing::matrix(size, k)?);
        let ma = Arc::new(base.matrix_lift(size, mk.clone())?);
        let family = diagonal_blocks(size, k, &(0..size).map(|i| vec![i]).collect::<Vec<_>>());
        Self::new(ma, family)
    }

    pub fn n(&self) -> usize {
        self.family.len()
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn alg(&self) -> &Arc<Algebra> {
        &self.alg
    }

    /// The evaluation ring `A ⋊ R`.
    pub fn sd(&self) -> &SemidirectRing {
        &self.sd
    }

    pub fn idempotent(&self, i: usize) -> &Elem {
        &self.family[i]
    }

    pub fn family(&self) -> &[Elem] {
        &self.family
    }

    /// Original indices merged into idempotent `i`.
    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    pub fn r_component(&self, i: usize, j: usize) -> &ModSpan {
        &self.r_comp[i * self.n() + j]
    }

    pub fn a_component(&self, i: usize, j: usize) -> &ModSpan {
        &self.a_comp[i * self.n() + j]
    }

    /// `e_i x e_j` for `x ∈ R`.
    pub fn peirce_r(&self, i: usize, x: &Elem, j: usize) -> Result<Elem, Error> {
        if x.dim() != self.ring.dim() {
            return Err(Error::ComponentMismatch("ring element of wrong dimension".into()));
        }
        Ok(self.ring.mul(&self.ring.mul(&self.family[i], x), &self.family[j]))
    }

    /// `e_i a e_j` for `a ∈ A`.
    pub fn peirce_a(&self, i: usize, a: &Elem, j: usize) -> Result<Elem, Error> {
        if a.dim() != self.alg.dim() {
            return Err(Error::ComponentMismatch("algebra element of wrong dimension".into()));
        }
        Ok(self.alg.lmul(&self.family[i], &self.alg.rmul(a, &self.family[j])))
    }

    pub fn in_r(&self, i: usize, j: usize, p: &Elem) -> bool {
        p.dim() == self.ring.dim() && self.r_component(i, j).contains(p)
    }

    pub fn in_a(&self, i: usize, j: usize, a: &Elem) -> bool {
        a.dim() == self.alg.dim() && self.a_component(i, j).contains(a)
    }

    pub fn sample_r<G: Rng + ?Sized>(&self, i: usize, j: usize, rng: &mut G) -> Elem {
        self.r_component(i, j).sample(rng)
    }

    pub fn sample_a<G: Rng + ?Sized>(&self, i: usize, j: usize, rng: &mut G) -> Elem {
        self.a_component(i, j).sample(rng)
    }

    /// `d(a)`; the zero element when `A` carries no structure map.
    pub fn d(&self, a: &Elem) -> Elem {
        self.alg.d(a).unwrap_or_else(|| self.ring.zero())
    }

    /// Returns pairs `(u_t, v_t)` with `u_t ∈ e_iAe_k`, `v_t ∈ e_kRe_j`,
    /// `Σ u_t v_t = x`.
    pub fn fullness_decomposition(&self, x: &Elem, i: usize, j: usize, k: usize) -> Result<Vec<(Elem, Elem)>, Error> {
        if k == i || k == j {
            return Err(Error::Precondition(format!("k = {} must differ from i and j", k + 1)));
        }
        if !self.in_a(i, j, x) {
            return Err(Error::ComponentMismatch(format!("payload not in e_{}Ae_{}", i + 1, j + 1)));
        }
        if x.is_zero() {
            return Ok(Vec::new());
        }
        let n = self.n();
        let slot = &self.fullness[(i * n + k) * n + j];
        let solver = slot
            .get_or_init(|| Some(Arc::new(FullnessSolver::new(self, i, k, j))))
            .clone()
            .ok_or_else(|| Error::Fullness("solver unavailable".into()))?;
        solver
            .decompose(x, &self.alg)
            .ok_or_else(|| Error::Fullness(format!("e_{}Ae_{}Re_{} misses the payload", i + 1, k + 1, j + 1)))
    }

    /// The context for `A` over `A ⋊ R` with the lifted family `0 ⊕ e_i`.
    pub fn over_semidirect(&self) -> Result<Context, Error> {
        let (alg, sd) = self.alg.over_semidirect()?;
        let family = self.family.iter().map(|e| sd.embed_r(e)).collect();
        Context::with_min(Arc::new(alg), family, 2, Some(self.labels.clone()))
    }

    /// The opposite context; payload coordinates are unchanged.
    pub fn opposite(&self) -> Result<Context, Error> {
        let op = Arc::new(self.ring.opposite());
        let alg = Arc::new(self.alg.opposite(op));
        Context::with_min(alg, self.family.clone(), 2, Some(self.labels.clone()))
    }

    /// Merges the idempotents of each class into one; classes are sorted by
    /// their least member and indices refer to this context.
    pub fn merge(&self, classes: &[Vec<usize>]) -> Result<Context, Error> {
        let mut classes: Vec<Vec<usize>> = classes.iter().map(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c
        }).collect();
        classes.sort();
        let family = classes
            .iter()
            .map(|c| c.iter().fold(self.ring.zero(), |acc, &i| self.ring.add(&acc, &self.family[i])))
            .collect();
        let labels = classes
            .iter()
            .map(|c| {
                let mut l: Vec<usize> = c.iter().flat_map(|&i| self.labels[i].iter().copied()).collect();
                l.sort_unstable();
                l
            })
            .collect();
        Context::with_min(self.alg.clone(), family, 2, Some(labels))
    }
}

/// Block-diagonal idempotents `Σ_{a ∈ block} E_aa` of `Mat(size, base)`.
pub fn diagonal_blocks(size: usize, base: &FiniteRing, blocks: &[Vec<usize>]) -> Vec<Elem> {
    let bd = base.dim();
    blocks
        .iter()
        .map(|b| {
            let mut e = Elem::zero(size * size * bd);
            for &a in b {
                let one = mat::entry(size, bd, a, a, &base.one());
                for (x, y) in e.0.iter_mut().zip(&one.0) {
                    *x += *y;
                }
            }
            e
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn mat3_z4() -> (Arc<FiniteRing>, Arc<FiniteRing>) {
        let k = Arc::new(FiniteRing::cyclic(4).unwrap());
        let r = Arc::new(FiniteRing::matrix(3, &k).unwrap());
        (k, r)
    }

    fn unit(a: usize, b: usize, c: u64) -> Elem {
        mat::entry(3, 1, a, b, &Elem(vec![c]))
    }

    #[test]
    fn diagonal_family_passes() {
        let (k, r) = mat3_z4();
        let fam = diagonal_blocks(3, &k, &[vec![0], vec![1], vec![2]]);
        assert!(validate_idempotent_family(&r, &fam, 3).passes());
    }

    #[test]
    fn family_size_and_completeness() {
        let k = FiniteRing::cyclic(4).unwrap();
        assert!(!validate_idempotent_family(&k, &[k.one()], 3).size_ok);
        let (k, r) = mat3_z4();
        let fam = diagonal_blocks(3, &k, &[vec![0], vec![1, 2]]);
        let rep = validate_idempotent_family(&r, &fam[..1], 1);
        assert!(!rep.complete);
        assert!(rep.orthogonal && rep.full[0]);
    }

    #[test]
    fn non_full_idempotent_detected() {
        // In Z/4 × Z/4 × Z/4 (diagonal matrices) the unit vectors are not full.
        let k = Arc::new(FiniteRing::cyclic(4).unwrap());
        let mut t = super::super::MulTable::new(3);
        for i in 0..3 {
            t.push(i, i, i, 1);
        }
        let gens: Vec<Elem> = (0..3).map(|i| Elem::unit_vector(3, i)).collect();
        let r = FiniteRing::from_table(4, 3, t, Elem(vec![1, 1, 1]), gens.clone(), super::super::RingShape::Cyclic).unwrap();
        let rep = validate_idempotent_family(&r, &gens, 3);
        assert!(rep.orthogonal && rep.complete);
        assert!(rep.full.iter().all(|f| !f));
        let _ = k;
    }

    #[test]
    fn peirce_extracts_entry() {
        let k = Arc::new(FiniteRing::cyclic(4).unwrap());
        let a = Algebra::ideal(k.clone(), &[Elem(vec![2])]).unwrap();
        let ctx = Context::matrix(3, &a).unwrap();
        let ring = ctx.ring().clone();
        let j = (0..3)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .fold(ring.zero(), |acc, (a, b)| ring.add(&acc, &unit(a, b, 1)));
        assert_eq!(ctx.peirce_r(0, &j, 1).unwrap(), unit(0, 1, 1));
        assert!(ctx.peirce_r(0, &ring.one(), 1).unwrap().is_zero());
        assert!(ctx.peirce_r(0, &ring.zero(), 1).unwrap().is_zero());
        let once = ctx.peirce_r(0, &j, 2).unwrap();
        assert_eq!(ctx.peirce_r(0, &once, 2).unwrap(), once);
    }

    #[test]
    fn fullness_decomposition_examples() {
        let k = Arc::new(FiniteRing::cyclic(4).unwrap());
        let a = Algebra::ideal(k, &[Elem(vec![2])]).unwrap();
        let ctx = Context::matrix(3, &a).unwrap();
        assert!(ctx.fullness_decomposition(&ctx.alg().zero(), 0, 1, 2).unwrap().is_empty());
        let x = unit(0, 1, 2);
        let pairs = ctx.fullness_decomposition(&x, 0, 1, 2).unwrap();
        assert_eq!(pairs, vec![(unit(0, 2, 2), unit(2, 1, 1))]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = ctx.sample_a(1, 2, &mut rng);
            let pairs = ctx.fullness_decomposition(&x, 1, 2, 0).unwrap();
            let sum = pairs
                .iter()
                .fold(ctx.alg().zero(), |acc, (u, v)| ctx.alg().add(&acc, &ctx.alg().rmul(u, v)));
            assert_eq!(sum, x);
            for (u, v) in &pairs {
                assert!(ctx.in_a(1, 0, u) && ctx.in_r(0, 2, v));
            }
        }
    }

    #[test]
    fn off_diagonal_quasi_inverse_is_negation() {
        let k = Arc::new(FiniteRing::cyclic(8).unwrap());
        let a = Algebra::ideal(k, &[Elem(vec![2])]).unwrap();
        let ctx = Context::matrix(3, &a).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let x = ctx.sample_a(0, 2, &mut rng);
            assert_eq!(ctx.alg().quasi_inverse(&x).unwrap(), ctx.alg().neg(&x));
            let y = ctx.alg().sample_any(&mut rng);
            if let Some(b) = ctx.alg().quasi_inverse(&y) {
                assert_eq!(ctx.alg().quasi_inverse(&b).unwrap(), y);
            }
        }
    }

    #[test]
    fn lifted_family_in_semidirect_context() {
        let k = Arc::new(FiniteRing::cyclic(4).unwrap());
        let a = Algebra::ideal(k, &[Elem(vec![2])]).unwrap();
        let ctx = Context::matrix(3, &a).unwrap();
        let up = ctx.over_semidirect().unwrap();
        assert_eq!(up.n(), 3);
        assert_eq!(up.ring().size(), ctx.sd().ring().size());
    }
}
