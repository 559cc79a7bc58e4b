//! Evaluation of words in `GL(A ⋊ R)` and instance verification.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::modular::Elem;
use crate::rings::Context;
use crate::words::{Gen, RelationInstance, Word};
use crate::Error;

/// Outcome of checking one relation instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub relation_id: String,
    pub seed: u64,
    pub index: usize,
    /// One-based indices of the instance.
    pub indices: Vec<usize>,
    pub parameters: BTreeMap<String, Vec<u64>>,
    pub pass: bool,
    pub lhs_eval: Vec<u64>,
    pub rhs_eval: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
}

/// Evaluates linear words in the units of `A ⋊ R`.
#[derive(Clone, Copy)]
pub struct Evaluator<'a> {
    ctx: &'a Context,
}

impl<'a> Evaluator<'a> {
    pub fn new(ctx: &'a Context) -> Self {
        Evaluator { ctx }
    }

    /// Image of one letter: `(1+p)(1±a)(1−p)` or `1 ± p`.
    pub fn letter(&self, g: &Gen, inv: bool) -> Elem {
        let sd = self.ctx.sd();
        let ring = sd.ring();
        match g {
            Gen::Z { a, p, .. } => {
                let a = if inv { self.ctx.alg().neg(a) } else { a.clone() };
                let l = ring.mul(&sd.one_plus_r(p), &sd.one_plus_a(&a));
                ring.mul(&l, &sd.one_plus_r(&self.ctx.ring().neg(p)))
            }
            Gen::X { p, .. } => {
                if inv {
                    sd.one_plus_r(&self.ctx.ring().neg(p))
                } else {
                    sd.one_plus_r(p)
                }
            }
        }
    }

    pub fn word(&self, w: &Word<Gen>) -> Elem {
        let ring = self.ctx.sd().ring();
        w.letters()
            .iter()
            .fold(ring.one(), |acc, l| ring.mul(&acc, &self.letter(&l.sym, l.inv)))
    }

    /// The `A` coordinates of `x − 1`.
    pub fn a_part(&self, x: &Elem) -> Elem {
        self.ctx.sd().split(x).0
    }

    pub fn verify(&self, inst: &RelationInstance<Gen>, seed: u64, index: usize) -> Verdict {
        let l = self.word(&inst.lhs);
        let r = self.word(&inst.rhs);
        Verdict {
            relation_id: inst.id.name().to_string(),
            seed,
            index,
            indices: inst.indices.iter().map(|i| i + 1).collect(),
            parameters: inst.params.iter().map(|(k, v)| (k.clone(), v.0.clone())).collect(),
            pass: l == r,
            lhs_eval: l.0,
            rhs_eval: r.0,
            map: None,
        }
    }
}

/// Conjugates a generator by a diagonal unit `r = Σ e_i r e_i` of `R`.
pub fn diag_act(ctx: &Context, r: &Elem, g: &Gen) -> Result<Gen, Error> {
    let ring = ctx.ring();
    let n = ctx.n();
    for i in 0..n {
        for j in 0..n {
            if i != j && !ctx.peirce_r(i, r, j)?.is_zero() {
                return Err(Error::Precondition("acting element is not diagonal".into()));
            }
        }
    }
    let rinv = ring
        .inverse(r)
        .ok_or_else(|| Error::Precondition("acting element is not a unit".into()))?;
    let conj_r = |p: &Elem| ring.mul(&ring.mul(r, p), &rinv);
    let conj_a = |a: &Elem| ctx.alg().lmul(r, &ctx.alg().rmul(a, &rinv));
    Ok(match g {
        Gen::Z { i, j, a, p } => Gen::Z { i: *i, j: *j, a: conj_a(a), p: conj_r(p) },
        Gen::X { i, j, p } => Gen::X { i: *i, j: *j, p: conj_r(p) },
    })
}

/// Writes `u` as the ordered product `Π (1 + p_α)` over the pairs of a
/// special closed set, or returns `None` when `u` is not of that form.
///
/// Factors are determined by increasing height along a topological order of
/// the pairs; the full product is checked at the end.
pub fn unipotent_factorization(
    ctx: &Context,
    u: &Elem,
    sigma: &[(usize, usize)],
) -> Option<Vec<(usize, usize, Elem)>> {
    let n = ctx.n();
    let ring = ctx.ring();
    let mut indeg = vec![0usize; n];
    for &(_, j) in sigma {
        indeg[j] += 1;
    }
    let mut pos = vec![usize::MAX; n];
    let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut t = 0;
    while let Some(v) = queue.pop() {
        pos[v] = t;
        t += 1;
        for &(i, j) in sigma {
            if i == v {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    queue.push(j);
                }
            }
        }
    }
    if t < n {
        return None;
    }
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by_key(|&s| pos[sigma[s].1] - pos[sigma[s].0]);
    let mut factors: Vec<Elem> = vec![ring.zero(); sigma.len()];
    let product = |f: &[Elem]| f.iter().fold(ring.one(), |acc, p| ring.mul(&acc, &ring.one_plus(p)));
    let um = ring.sub(u, &ring.one());
    for s in order {
        let (i, j) = sigma[s];
        let cur = ring.sub(&product(&factors), &ring.one());
        let want = ctx.peirce_r(i, &um, j).ok()?;
        let have = ctx.peirce_r(i, &cur, j).ok()?;
        factors[s] = ring.sub(&want, &have);
    }
    if product(&factors) != *u {
        return None;
    }
    Some(sigma.iter().zip(factors).map(|(&(i, j), p)| (i, j, p)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{Algebra, FiniteRing};
    use crate::words::{conjugation_form, random_special_closed, transpose, Catalog, ExtremeChoice, Params, RelId};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn ctx(size: usize, m: u64, ideal: u64) -> Context {
        let k = Arc::new(FiniteRing::cyclic(m).unwrap());
        let alg = Algebra::ideal(k.clone(), &[Elem(vec![ideal])]).unwrap();
        Context::matrix(size, &alg).unwrap()
    }

    #[test]
    fn every_linear_relation_holds_on_mat4_z4() {
        let c = ctx(4, 4, 2);
        let cat = Catalog::new(&c);
        let ev = Evaluator::new(&c);
        for id in RelId::linear() {
            for inst in cat.random_instances(id, 30, 7).unwrap() {
                let v = ev.verify(&inst, 7, 0);
                assert!(v.pass, "{id} failed: {:?}", inst.params);
            }
        }
    }

    #[test]
    fn perturbed_relation_is_detected() {
        let c = ctx(3, 8, 2);
        let cat = Catalog::new(&c);
        let ev = Evaluator::new(&c);
        let mut failures = 0;
        for mut inst in cat.random_instances(RelId::Conj1, 40, 2).unwrap() {
            let (i, k) = (inst.indices[0], inst.indices[2]);
            inst.rhs = inst.rhs.mul(&cat.x(i, k, &inst.params["a"]));
            failures += usize::from(!ev.verify(&inst, 2, 0).pass);
        }
        assert!(failures > 30);
    }

    #[test]
    fn relations_hold_for_full_ideal_and_zero_map() {
        let k = Arc::new(FiniteRing::cyclic(6).unwrap());
        let zero = Algebra::zero_map(k.clone()).unwrap();
        for alg in [Algebra::ideal(k.clone(), &[Elem(vec![1])]).unwrap(), zero] {
            let c = Context::matrix(4, &alg).unwrap();
            let cat = Catalog::new(&c);
            let ev = Evaluator::new(&c);
            for id in RelId::linear() {
                for inst in cat.random_instances(id, 10, 3).unwrap() {
                    assert!(ev.verify(&inst, 3, 0).pass, "{id}");
                }
            }
        }
    }

    #[test]
    fn wrong_component_is_rejected() {
        let c = ctx(3, 4, 2);
        let cat = Catalog::new(&c);
        let mut ps = Params::new();
        let n = c.ring().dim();
        let bad = Elem::unit_vector(c.alg().dim(), 0);
        ps.insert("a".into(), bad);
        ps.insert("a2".into(), c.alg().zero());
        ps.insert("p".into(), Elem::zero(n));
        assert!(matches!(cat.instance(RelId::Add1, &[0, 1], &ps), Err(Error::ComponentMismatch(_))));
        assert!(matches!(cat.instance(RelId::Add1, &[1, 1], &ps), Err(Error::Precondition(_))));
    }

    #[test]
    fn mult_matches_direct_matrix_product() {
        // z_12(ab, p) with a = 2E_13, b = 2E_32, p = E_21 over Mat(3, Z/8)
        let c = ctx(3, 8, 2);
        let cat = Catalog::new(&c);
        let ring = c.ring();
        let e = |i: usize, j: usize, v: u64| crate::rings::mat::entry(3, 1, i, j, &Elem(vec![v]));
        let mut ps = Params::new();
        ps.insert("a".into(), e(0, 2, 2));
        ps.insert("b".into(), e(2, 1, 2));
        ps.insert("p".into(), e(1, 0, 1));
        let inst = cat.instance(RelId::Mult, &[0, 1, 2], &ps).unwrap();
        let ev = Evaluator::new(&c);
        let got = ev.a_part(&ev.word(&inst.rhs));
        // (1+p)(1+a)(1−p) − 1 = a + pa − ap − pap with a = 4E_12
        let a = e(0, 1, 4);
        let p = e(1, 0, 1);
        let want = ring.sub(
            &ring.add(&a, &ring.mul(&p, &a)),
            &ring.add(&ring.mul(&a, &p), &ring.mul(&ring.mul(&p, &a), &p)),
        );
        assert_eq!(got, want);
        assert!(ev.verify(&inst, 0, 0).pass);
    }

    #[test]
    fn transpose_is_anti_homomorphism_into_opposite() {
        let c = ctx(4, 8, 2);
        let op = c.opposite().unwrap();
        let cat = Catalog::new(&c);
        let ev = Evaluator::new(&c);
        let evo = Evaluator::new(&op);
        for id in RelId::linear() {
            for inst in cat.random_instances(id, 5, 11).unwrap() {
                for w in [&inst.lhs, &inst.rhs] {
                    let negated = w
                        .map::<Gen, ()>(|g| {
                            Ok(Word::gen(match g {
                                Gen::Z { i, j, a, p } => {
                                    Gen::Z { i: *i, j: *j, a: a.clone(), p: c.ring().neg(p) }
                                }
                                other => other.clone(),
                            }))
                        })
                        .unwrap();
                    assert_eq!(evo.word(&transpose(w)), ev.word(&negated), "{id}");
                }
            }
        }
    }

    #[test]
    fn conjugation_form_matches_direct_conjugation() {
        let c = ctx(4, 4, 2);
        let cat = Catalog::new(&c);
        let ev = Evaluator::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let sigma = random_special_closed(4, &mut rng);
            let g: Vec<(usize, usize, Elem)> =
                sigma.iter().map(|&(k, l)| (k, l, c.sample_r(k, l, &mut rng))).collect();
            let gw = Word::product(g.iter().map(|(k, l, p)| cat.big_x(*k, *l, p)));
            let mut h = Word::empty();
            for _ in 0..2 {
                let i = rand::Rng::gen_range(&mut rng, 0..4);
                let j = (i + rand::Rng::gen_range(&mut rng, 1..4)) % 4;
                h = h.mul(&cat.x(i, j, &c.sample_a(i, j, &mut rng)));
            }
            let direct = ev.word(&Word::conj(&gw, &h));
            let least = conjugation_form(&c, &g, &h, ExtremeChoice::Least).unwrap();
            let greatest = conjugation_form(&c, &g, &h, ExtremeChoice::Greatest).unwrap();
            assert!(least.letters().iter().all(|l| matches!(l.sym, Gen::Z { .. })));
            assert_eq!(ev.word(&least), direct);
            assert_eq!(ev.word(&greatest), direct);
        }
    }

    #[test]
    fn unipotent_factorization_round_trips() {
        let c = ctx(4, 8, 2);
        let ring = c.ring();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let sigma = random_special_closed(4, &mut rng);
            let u = sigma.iter().fold(ring.one(), |acc, &(k, l)| {
                ring.mul(&acc, &ring.one_plus(&c.sample_r(k, l, &mut rng)))
            });
            let f = unipotent_factorization(&c, &u, &sigma).expect("factorizable");
            let back = f.iter().fold(ring.one(), |acc, (_, _, p)| ring.mul(&acc, &ring.one_plus(p)));
            assert_eq!(back, u);
        }
        // a lower-triangular entry is outside an upper set
        let sigma = vec![(0, 1)];
        let u = ring.one_plus(&crate::rings::mat::entry(4, 1, 1, 0, &Elem(vec![1])));
        assert!(unipotent_factorization(&c, &u, &sigma).is_none());
    }

    #[test]
    fn diagonal_action_commutes_with_evaluation() {
        let c = ctx(3, 4, 2);
        let ev = Evaluator::new(&c);
        let ring = c.ring();
        let d = |v: [u64; 3]| {
            (0..3).fold(ring.zero(), |acc, i| {
                ring.add(&acc, &crate::rings::mat::entry(3, 1, i, i, &Elem(vec![v[i]])))
            })
        };
        let r = d([1, 3, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Gen::Z { i: 0, j: 1, a: c.sample_a(0, 1, &mut rng), p: c.sample_r(1, 0, &mut rng) };
        let acted = diag_act(&c, &r, &g).unwrap();
        let sd = c.sd();
        let re = sd.embed_r(&r);
        let rinv = sd.embed_r(&ring.inverse(&r).unwrap());
        let want = sd.ring().mul(&sd.ring().mul(&re, &ev.letter(&g, false)), &rinv);
        assert_eq!(ev.letter(&acted, false), want);
        assert!(diag_act(&c, &d([2, 1, 1]), &g).is_err());
    }
}
