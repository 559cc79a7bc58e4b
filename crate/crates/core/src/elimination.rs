//! Root elimination: merging two idempotents, the maps `F_α`, `F_Ψ`, `G_α`,
//! and the relativization rewrites `ζ`, `ξ`.

use std::sync::Arc;

use crate::modular::{Elem, ModSpan};
use crate::rings::Context;
use crate::words::{Catalog, Gen, Word};
use crate::Error;

/// A context in which `e_l` and `e_m` are replaced by `e_∞ = e_l + e_m`.
#[derive(Debug, Clone)]
pub struct MergedContext {
    parent: Arc<Context>,
    merged: Arc<Context>,
    l: usize,
    m: usize,
    inf: usize,
    to_merged: Vec<usize>,
    /// Parent index behind each merged index other than `∞`.
    from_merged: Vec<Option<usize>>,
}

impl MergedContext {
    pub fn new(parent: Arc<Context>, l: usize, m: usize) -> Result<Self, Error> {
        let n = parent.n();
        if l == m || l >= n || m >= n {
            return Err(Error::Precondition(format!("cannot merge indices {} and {}", l + 1, m + 1)));
        }
        let mut classes: Vec<Vec<usize>> = (0..n).filter(|&i| i != l && i != m).map(|i| vec![i]).collect();
        classes.push(vec![l.min(m), l.max(m)]);
        classes.sort();
        let merged = Arc::new(parent.merge(&classes)?);
        let mut to_merged = vec![0; n];
        let mut from_merged = vec![None; n - 1];
        for (t, c) in classes.iter().enumerate() {
            for &i in c {
                to_merged[i] = t;
            }
            if c.len() == 1 {
                from_merged[t] = Some(c[0]);
            }
        }
        let inf = to_merged[l];
        Ok(MergedContext { parent, merged, l, m, inf, to_merged, from_merged })
    }

    pub fn parent(&self) -> &Arc<Context> {
        &self.parent
    }

    pub fn merged(&self) -> &Arc<Context> {
        &self.merged
    }

    /// The eliminated root as the pair `(l, m)`.
    pub fn root(&self) -> (usize, usize) {
        (self.l, self.m)
    }

    /// Index of `e_∞` in the merged family.
    pub fn inf(&self) -> usize {
        self.inf
    }

    pub fn to_merged(&self, i: usize) -> usize {
        self.to_merged[i]
    }

    fn check(&self, g: &Gen) -> Result<(), Error> {
        let c = &self.merged;
        let (i, j) = g.indices();
        if i == j || i >= c.n() || j >= c.n() {
            return Err(Error::Precondition(format!("bad merged indices ({}, {})", i + 1, j + 1)));
        }
        let ok = match g {
            Gen::Z { a, p, .. } => c.in_a(i, j, a) && c.in_r(j, i, p),
            Gen::X { p, .. } => c.in_r(i, j, p),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ComponentMismatch(format!("symbol at ({}, {}) of merged context", i + 1, j + 1)))
        }
    }

    /// `F_α` on one symbol of the merged context.
    pub fn f_alpha(&self, g: &Gen) -> Result<Word<Gen>, Error> {
        self.check(g)?;
        let pc = &*self.parent;
        let cat = Catalog::new(pc);
        let (l, m) = (self.l, self.m);
        let up = |t: usize| self.from_merged[t].expect("finite index");
        Ok(match g {
            Gen::Z { i, j, a, p } if *i == self.inf => {
                let jj = up(*j);
                cat.z4(
                    l,
                    m,
                    jj,
                    &pc.peirce_a(l, a, jj)?,
                    &pc.peirce_a(m, a, jj)?,
                    &pc.peirce_r(jj, p, l)?,
                    &pc.peirce_r(jj, p, m)?,
                )
            }
            Gen::Z { i, j, a, p } if *j == self.inf => {
                let ii = up(*i);
                cat.z4t(
                    ii,
                    l,
                    m,
                    &pc.peirce_a(ii, a, l)?,
                    &pc.peirce_a(ii, a, m)?,
                    &pc.peirce_r(l, p, ii)?,
                    &pc.peirce_r(m, p, ii)?,
                )
            }
            Gen::Z { i, j, a, p } => cat.z(up(*i), up(*j), a, p),
            Gen::X { i, j, p } if *i == self.inf => {
                let jj = up(*j);
                cat.big_x(l, jj, &pc.peirce_r(l, p, jj)?).mul(&cat.big_x(m, jj, &pc.peirce_r(m, p, jj)?))
            }
            Gen::X { i, j, p } if *j == self.inf => {
                let ii = up(*i);
                cat.big_x(ii, l, &pc.peirce_r(ii, p, l)?).mul(&cat.big_x(ii, m, &pc.peirce_r(ii, p, m)?))
            }
            Gen::X { i, j, p } => cat.big_x(up(*i), up(*j), p),
        })
    }

    pub fn f_word(&self, w: &Word<Gen>) -> Result<Word<Gen>, Error> {
        w.map(|g| self.f_alpha(g))
    }

    /// Least parent index outside `{l, m}`.
    fn aux(&self) -> Result<usize, Error> {
        (0..self.parent.n())
            .find(|&k| k != self.l && k != self.m)
            .ok_or_else(|| Error::Precondition("elimination needs a third index".into()))
    }

    /// `G_α` on one symbol of the parent context.
    pub fn g_alpha(&self, g: &Gen) -> Result<Word<Gen>, Error> {
        let pc = &*self.parent;
        let mc = &*self.merged;
        let cat = Catalog::new(mc);
        let (i, j) = g.indices();
        let on = |t: usize| t == self.l || t == self.m;
        if !(on(i) && on(j)) {
            let (a, b) = (self.to_merged[i], self.to_merged[j]);
            return Ok(match g {
                Gen::Z { a: x, p, .. } => cat.z(a, b, x, p),
                Gen::X { p, .. } => cat.big_x(a, b, p),
            });
        }
        let k = self.aux()?;
        let kk = self.to_merged[k];
        let inf = self.inf;
        match g {
            Gen::Z { a: c, p: r, .. } => {
                let alg = pc.alg();
                let ring = pc.ring();
                let mut out = Word::empty();
                for (u, v) in pc.fullness_decomposition(c, i, j, k)? {
                    let ru = alg.lmul(r, &u);
                    let a1 = alg.neg(&alg.add(&u, &ru));
                    let p1 = ring.sub(&v, &ring.mul(&v, r));
                    out = out.mul(&cat.z(inf, kk, &a1, &p1)).mul(&cat.x(inf, kk, &alg.add(&u, &ru)));
                }
                Ok(out)
            }
            Gen::X { p, .. } => {
                // X_ij(Σ s_t t_t) = Π [X_ik(s_t), X_kj(t_t)]
                let mut out = Word::empty();
                for (s, t) in ring_decomposition(pc, p, i, j, k)? {
                    let (a, b) = (self.to_merged[i], self.to_merged[j]);
                    out = out.mul(&Word::commutator(&cat.big_x(a, kk, &s), &cat.big_x(kk, b, &t)));
                }
                Ok(out)
            }
        }
    }

    pub fn g_word(&self, w: &Word<Gen>) -> Result<Word<Gen>, Error> {
        w.map(|g| self.g_alpha(g))
    }
}

/// Writes `x ∈ e_iRe_j` as `Σ s_t t_t` with `s_t ∈ e_iRe_k`, `t_t ∈ e_kRe_j`.
pub fn ring_decomposition(ctx: &Context, x: &Elem, i: usize, j: usize, k: usize) -> Result<Vec<(Elem, Elem)>, Error> {
    if !ctx.in_r(i, j, x) {
        return Err(Error::ComponentMismatch(format!("element not in e_{}Re_{}", i + 1, j + 1)));
    }
    let ring = ctx.ring();
    let mut pairs = Vec::new();
    let mut prods = Vec::new();
    for s in ctx.r_component(i, k).basis() {
        for t in ctx.r_component(k, j).basis() {
            prods.push(ring.mul(&s, &t));
            pairs.push((s.clone(), t));
        }
    }
    let span = ModSpan::tracking_from_gens(ring.modulus(), ring.dim(), &prods);
    let coeffs = span
        .solve(x)
        .ok_or_else(|| Error::Fullness(format!("e_{}Re_{}Re_{} misses the element", i + 1, k + 1, j + 1)))?;
    Ok(coeffs
        .iter()
        .zip(pairs)
        .filter(|(c, _)| **c != 0)
        .map(|(c, (s, t))| (ring.scale(*c, &s), t))
        .collect())
}

/// Union-find classes of the indices `0..n` joined by the given pairs.
pub fn psi_classes(n: usize, pairs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra.max(rb)] = ra.min(rb);
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match classes.iter_mut().find(|c| c[0] == r) {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    classes.sort();
    classes
}

/// A sequence of single-root eliminations; `F_Ψ` is their composite.
#[derive(Debug, Clone)]
pub struct EliminationChain {
    steps: Vec<MergedContext>,
    root: Arc<Context>,
}

impl EliminationChain {
    /// `order` lists pairs of original indices; each step merges the current
    /// classes containing them. `psi` are the expected final classes.
    pub fn new(parent: Arc<Context>, order: &[(usize, usize)], psi: &[Vec<usize>]) -> Result<Self, Error> {
        let mut steps = Vec::new();
        let mut cur = parent.clone();
        for &(a, b) in order {
            let find = |x: usize| cur.labels().iter().position(|c| c.contains(&x));
            let (ia, ib) = match (find(a), find(b)) {
                (Some(ia), Some(ib)) if ia != ib => (ia, ib),
                _ => return Err(Error::Precondition(format!("step ({}, {}) merges nothing", a + 1, b + 1))),
            };
            let step = MergedContext::new(cur.clone(), ia, ib)?;
            cur = step.merged().clone();
            steps.push(step);
        }
        let mut want: Vec<Vec<usize>> = psi.to_vec();
        for c in want.iter_mut() {
            c.sort_unstable();
        }
        want.sort();
        if cur.labels() != want.as_slice() {
            return Err(Error::Precondition("elimination order does not realize the subsystem".into()));
        }
        Ok(EliminationChain { steps, root: parent })
    }

    pub fn parent(&self) -> &Arc<Context> {
        &self.root
    }

    /// The fully merged context.
    pub fn quotient(&self) -> &Arc<Context> {
        self.steps.last().map(|s| s.merged()).unwrap_or(&self.root)
    }

    pub fn f_psi(&self, w: &Word<Gen>) -> Result<Word<Gen>, Error> {
        self.steps.iter().rev().try_fold(w.clone(), |acc, s| s.f_word(&acc))
    }
}

/// The pair of contexts `C = (R, A)` and `U = (A ⋊ R, A)` linked by `ζ`, `ξ`.
#[derive(Debug, Clone)]
pub struct Relativization {
    base: Arc<Context>,
    upper: Arc<Context>,
}

impl Relativization {
    pub fn new(base: Arc<Context>) -> Result<Self, Error> {
        let upper = Arc::new(base.over_semidirect()?);
        Ok(Relativization { base, upper })
    }

    pub fn base(&self) -> &Arc<Context> {
        &self.base
    }

    pub fn upper(&self) -> &Arc<Context> {
        &self.upper
    }

    /// `ζ: z_ij(a, p) ↦ z_ij(a, 0 ⊕ p)`.
    pub fn zeta(&self, g: &Gen) -> Word<Gen> {
        let sd = self.base.sd();
        Word::gen(match g {
            Gen::Z { i, j, a, p } => Gen::Z { i: *i, j: *j, a: a.clone(), p: sd.embed_r(p) },
            Gen::X { i, j, p } => Gen::X { i: *i, j: *j, p: sd.embed_r(p) },
        })
    }

    /// `ξ: z_ij(a, p_A ⊕ p_R) ↦ x_ji(p_A) z_ij(a, p_R) x_ji(−p_A)`; an outer
    /// `X_ij(p_A ⊕ p_R)` becomes `x_ij(p_A) X_ij(p_R)`.
    pub fn xi(&self, g: &Gen) -> Word<Gen> {
        let sd = self.base.sd();
        let cat = Catalog::new(&self.base);
        match g {
            Gen::Z { i, j, a, p } => {
                let (pa, pr) = sd.split(p);
                Word::conj(&cat.x(*j, *i, &pa), &cat.z(*i, *j, a, &pr))
            }
            Gen::X { i, j, p } => {
                let (pa, pr) = sd.split(p);
                cat.x(*i, *j, &pa).mul(&cat.big_x(*i, *j, &pr))
            }
        }
    }

    pub fn zeta_word(&self, w: &Word<Gen>) -> Word<Gen> {
        w.map::<Gen, ()>(|g| Ok(self.zeta(g))).expect("infallible")
    }

    pub fn xi_word(&self, w: &Word<Gen>) -> Word<Gen> {
        w.map::<Gen, ()>(|g| Ok(self.xi(g))).expect("infallible")
    }

    /// The ring map `A ⋊ (A ⋊ R) → A ⋊ R`, `(a, (b, p)) ↦ (a + b, p)`.
    pub fn collapse(&self, x: &Elem) -> Elem {
        let ad = self.base.alg().dim();
        let zm = self.base.alg().zm();
        let a = Elem(x.0[..ad].to_vec());
        let b = Elem(x.0[ad..2 * ad].to_vec());
        let mut out = zm.add_v(&a, &b).0;
        out.extend_from_slice(&x.0[2 * ad..]);
        Elem(out)
    }
}
