//! Finite unital rings, non-unital algebras over them, crossed modules and
//! the semidirect ring `A ⋊ R`.
//!
//! Every structure is a submodule of an ambient coordinate space `(Z/m)^k`
//! carrying a bilinear structure-constant table. The ambient table must be
//! associative; the structure itself is the span of its generators, which
//! lets ideals such as `2·Mat(4, Z/8)` (not free over `Z/8`) sit inside the
//! coordinates of the enclosing ring.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::modular::{Elem, ModSpan, Zm};
use crate::Error;

mod family;

pub use family::{diagonal_blocks, validate_idempotent_family, Context, FamilyReport, FullnessSolver};

/// Structure constants: `rows[i]` lists `(j, k, c)` with `b_i * b_j += c * b_k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MulTable {
    rows: Vec<Vec<(u32, u32, u64)>>,
}

impl MulTable {
    pub fn new(left_dim: usize) -> Self {
        MulTable {
            rows: vec![Vec::new(); left_dim],
        }
    }

    pub fn push(&mut self, i: usize, j: usize, k: usize, c: u64) {
        if c != 0 {
            self.rows[i].push((j as u32, k as u32, c));
        }
    }

    /// Builds a table from a closure computing `b_i * b_j` as a vector.
    pub fn from_fn(
        left_dim: usize,
        right_dim: usize,
        mut f: impl FnMut(usize, usize) -> Elem,
    ) -> Self {
        let mut t = MulTable::new(left_dim);
        for i in 0..left_dim {
            for j in 0..right_dim {
                let v = f(i, j);
                for (k, &c) in v.0.iter().enumerate() {
                    t.push(i, j, k, c);
                }
            }
        }
        t
    }

    pub fn apply(&self, zm: Zm, x: &Elem, y: &Elem, out_dim: usize) -> Elem {
        let m = zm.m();
        let mut acc = vec![0u64; out_dim];
        for (i, &xi) in x.0.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for &(j, k, c) in &self.rows[i] {
                let yj = y.0[j as usize];
                if yj == 0 {
                    continue;
                }
                let t = zm.mul(zm.mul(xi, yj), c);
                let slot = &mut acc[k as usize];
                *slot = (*slot + t) % m;
            }
        }
        Elem(acc)
    }

    /// The table of the opposite product: `b_j *op b_i = b_i * b_j`.
    pub fn transposed(&self, right_dim: usize) -> Self {
        let mut t = MulTable::new(right_dim);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, k, c) in row {
                t.rows[j as usize].push((i as u32, k, c));
            }
        }
        t
    }
}

/// How a ring was built; used for fingerprints and display.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RingShape {
    Cyclic,
    Matrix { size: usize, base: Box<RingShape> },
    Semidirect { ideal: String, base: Box<RingShape> },
    Opposite { base: Box<RingShape> },
}

/// A finite unital ring, realized inside `(Z/m)^dim`.
#[derive(Clone, Debug)]
pub struct FiniteRing {
    zm: Zm,
    dim: usize,
    table: MulTable,
    one: Elem,
    span: ModSpan,
    gens: Vec<Elem>,
    shape: RingShape,
}

impl PartialEq for FiniteRing {
    fn eq(&self, other: &Self) -> bool {
        self.zm == other.zm
            && self.dim == other.dim
            && self.table == other.table
            && self.one == other.one
            && self.span.same_span(&other.span)
    }
}

impl FiniteRing {
    /// Assembles a ring from raw data and checks the unit and associativity
    /// on the generators.
    pub fn from_table(
        modulus: u64,
        dim: usize,
        table: MulTable,
        one: Elem,
        gens: Vec<Elem>,
        shape: RingShape,
    ) -> Result<Self, Error> {
        if modulus < 2 {
            return Err(Error::InvalidRing(format!("modulus {modulus} < 2")));
        }
        let span = ModSpan::from_gens(modulus, dim, &gens);
        let ring = FiniteRing {
            zm: Zm(modulus),
            dim,
            table,
            one,
            gens: span.basis(),
            span,
            shape,
        };
        ring.check_axioms()?;
        Ok(ring)
    }

    /// `Z/m`.
    pub fn cyclic(modulus: u64) -> Result<Self, Error> {
        let mut t = MulTable::new(1);
        t.push(0, 0, 0, 1 % modulus.max(1));
        Self::from_table(modulus, 1, t, Elem(vec![1]), vec![Elem(vec![1])], RingShape::Cyclic)
    }

    /// `Mat(size, base)` with basis `E_ab ⊗ b_s`, index `(a*size + b)*base_dim + s`.
    pub fn matrix(size: usize, base: &FiniteRing) -> Result<Self, Error> {
        let bd = base.dim;
        let dim = size * size * bd;
        let idx = |a: usize, b: usize, s: usize| (a * size + b) * bd + s;
        let mut table = MulTable::new(dim);
        for a in 0..size {
            for b in 0..size {
                for s in 0..bd {
                    for &(t, u, c) in &base.table.rows[s] {
                        for d in 0..size {
                            table.push(idx(a, b, s), idx(b, d, t as usize), idx(a, d, u as usize), c);
                        }
                    }
                }
            }
        }
        let mut one = Elem::zero(dim);
        for a in 0..size {
            for s in 0..bd {
                one.0[idx(a, a, s)] = base.one.0[s];
            }
        }
        let mut gens = Vec::new();
        for a in 0..size {
            for b in 0..size {
                for g in &base.gens {
                    gens.push(lift_entry(size, bd, a, b, g));
                }
            }
        }
        Self::from_table(
            base.zm.m(),
            dim,
            table,
            one,
            gens,
            RingShape::Matrix {
                size,
                base: Box::new(base.shape.clone()),
            },
        )
    }

    pub fn zm(&self) -> Zm {
        self.zm
    }

    pub fn modulus(&self) -> u64 {
        self.zm.m()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &RingShape {
        &self.shape
    }

    pub fn table(&self) -> &MulTable {
        &self.table
    }

    pub fn zero(&self) -> Elem {
        Elem::zero(self.dim)
    }

    pub fn one(&self) -> Elem {
        self.one.clone()
    }

    /// Howell basis of the additive group; these generate it over `Z/m`.
    pub fn generators(&self) -> &[Elem] {
        &self.gens
    }

    pub fn span(&self) -> &ModSpan {
        &self.span
    }

    pub fn size(&self) -> u128 {
        self.span.size()
    }

    pub fn contains(&self, x: &Elem) -> bool {
        x.dim() == self.dim && self.span.contains(x)
    }

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        self.zm.add_v(x, y)
    }

    pub fn sub(&self, x: &Elem, y: &Elem) -> Elem {
        self.zm.sub_v(x, y)
    }

    pub fn neg(&self, x: &Elem) -> Elem {
        self.zm.neg_v(x)
    }

    pub fn scale(&self, c: u64, x: &Elem) -> Elem {
        self.zm.scale_v(c, x)
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        self.table.apply(self.zm, x, y, self.dim)
    }

    /// `1 + x`.
    pub fn one_plus(&self, x: &Elem) -> Elem {
        self.add(&self.one, x)
    }

    pub fn is_central(&self, s: &Elem) -> bool {
        self.gens.iter().all(|g| self.mul(s, g) == self.mul(g, s))
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        self.span.sample(rng)
    }

    /// Left inverse solve: the unique `y` with `x * y = 1`, if `x` is a unit.
    pub fn inverse(&self, x: &Elem) -> Option<Elem> {
        // Columns x * g for each generator g; solve sum c_g (x g) = 1.
        let cols: Vec<Elem> = self.gens.iter().map(|g| self.mul(x, g)).collect();
        let span = ModSpan::tracking_from_gens(self.modulus(), self.dim, &cols);
        let c = span.solve(&self.one)?;
        let mut y = self.zero();
        for (ci, g) in c.iter().zip(&self.gens) {
            self.zm.axpy(&mut y, *ci, g);
        }
        // In a finite ring a one-sided inverse is two-sided.
        (self.mul(&y, x) == self.one).then_some(y)
    }

    fn check_axioms(&self) -> Result<(), Error> {
        for x in &self.gens {
            if self.mul(&self.one, x) != *x || self.mul(x, &self.one) != *x {
                return Err(Error::InvalidRing("unit element does not act as identity".into()));
            }
        }
        for (a, x) in self.gens.iter().enumerate() {
            for y in &self.gens {
                let xy = self.mul(x, y);
                if !self.span.contains(&xy) {
                    return Err(Error::InvalidRing("generators not closed under product".into()));
                }
                for z in &self.gens {
                    if self.mul(&xy, z) != self.mul(x, &self.mul(y, z)) {
                        return Err(Error::InvalidRing(format!(
                            "associativity fails on generator triple starting at {a}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The opposite ring on the same coordinates.
    pub fn opposite(&self) -> FiniteRing {
        FiniteRing {
            zm: self.zm,
            dim: self.dim,
            table: self.table.transposed(self.dim),
            one: self.one.clone(),
            span: self.span.clone(),
            gens: self.gens.clone(),
            shape: RingShape::Opposite {
                base: Box::new(self.shape.clone()),
            },
        }
    }

    /// Two-sided ideal generated by `seeds`, as a span, by closing under left
    /// and right multiplication with the ring generators.
    pub fn ideal_closure(&self, seeds: &[Elem]) -> ModSpan {
        let mut span = ModSpan::new(self.modulus(), self.dim);
        let mut queue: Vec<Elem> = Vec::new();
        for s in seeds {
            if span.insert(s) {
                queue.push(s.clone());
            }
        }
        while let Some(x) = queue.pop() {
            for g in &self.gens {
                for y in [self.mul(g, &x), self.mul(&x, g)] {
                    if span.insert(&y) {
                        queue.push(y);
                    }
                }
            }
        }
        span
    }
}

fn lift_entry(size: usize, bd: usize, a: usize, b: usize, x: &Elem) -> Elem {
    let mut v = Elem::zero(size * size * bd);
    for s in 0..bd {
        v.0[(a * size + b) * bd + s] = x.0[s];
    }
    v
}

/// Matrix helpers for rings built with [`FiniteRing::matrix`].
pub mod mat {
    use super::*;

    /// `x·E_ab` for `x` in the base ring.
    pub fn entry(size: usize, base_dim: usize, a: usize, b: usize, x: &Elem) -> Elem {
        lift_entry(size, base_dim, a, b, x)
    }

    /// The base-ring entry at `(a, b)`.
    pub fn get(size: usize, base_dim: usize, m: &Elem, a: usize, b: usize) -> Elem {
        let start = (a * size + b) * base_dim;
        Elem(m.0[start..start + base_dim].to_vec())
    }
}

/// A non-unital `R`-algebra `A` with an optional structure map `d: A → R`.
#[derive(Clone, Debug)]
pub struct Algebra {
    ring: Arc<FiniteRing>,
    dim: usize,
    prod: MulTable,
    left: MulTable,
    right: MulTable,
    span: ModSpan,
    gens: Vec<Elem>,
    /// Image of each ambient basis vector under `d`.
    d: Option<Vec<Elem>>,
    kind: CrossedKind,
}

/// Which standard construction produced an algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CrossedKind {
    Ideal,
    Homotope { s: Vec<u64> },
    Zero,
    MatrixLift { size: usize, base: Box<CrossedKind> },
    OverSemidirect { base: Box<CrossedKind> },
    Opposite { base: Box<CrossedKind> },
    Custom,
}

impl Algebra {
    /// Raw constructor; validates the algebra and (if present) crossed
    /// module axioms on generators.
    #[allow(clippy::too_many_arguments)]
    pub fn from_tables(
        ring: Arc<FiniteRing>,
        dim: usize,
        prod: MulTable,
        left: MulTable,
        right: MulTable,
        gens: &[Elem],
        d: Option<Vec<Elem>>,
        kind: CrossedKind,
    ) -> Result<Self, Error> {
        let span = ModSpan::from_gens(ring.modulus(), dim, gens);
        let alg = Algebra {
            gens: span.basis(),
            ring,
            dim,
            prod,
            left,
            right,
            span,
            d,
            kind,
        };
        alg.validate()?;
        Ok(alg)
    }

    /// The inclusion `I → R` of the two-sided ideal generated by `seeds`.
    pub fn ideal(ring: Arc<FiniteRing>, seeds: &[Elem]) -> Result<Self, Error> {
        let dim = ring.dim();
        let span = ring.ideal_closure(seeds);
        let d = (0..dim).map(|i| Elem::unit_vector(dim, i)).collect();
        let t = ring.table().clone();
        Self::from_tables(ring, dim, t.clone(), t.clone(), t, &span.basis(), Some(d), CrossedKind::Ideal)
    }

    /// The homotope `R^(s)`: product `a * b = a s b`, `d(a) = a s`.
    pub fn homotope(ring: Arc<FiniteRing>, s: &Elem) -> Result<Self, Error> {
        if !ring.contains(s) || !ring.is_central(s) {
            return Err(Error::NonCentral);
        }
        let dim = ring.dim();
        let basis: Vec<Elem> = (0..dim).map(|i| Elem::unit_vector(dim, i)).collect();
        let prod = MulTable::from_fn(dim, dim, |i, j| ring.mul(&ring.mul(&basis[i], s), &basis[j]));
        let d = basis.iter().map(|b| ring.mul(b, s)).collect();
        let t = ring.table().clone();
        let gens = ring.generators().to_vec();
        Self::from_tables(
            ring,
            dim,
            prod,
            t.clone(),
            t,
            &gens,
            Some(d),
            CrossedKind::Homotope { s: s.0.clone() },
        )
    }

    /// `R` as a bimodule with zero product and `d = 0`.
    pub fn zero_map(ring: Arc<FiniteRing>) -> Result<Self, Error> {
        let dim = ring.dim();
        let t = ring.table().clone();
        let gens = ring.generators().to_vec();
        let d = vec![Elem::zero(dim); dim];
        Self::from_tables(ring, dim, MulTable::new(dim), t.clone(), t, &gens, Some(d), CrossedKind::Zero)
    }

    /// The trivial algebra `A = 0`.
    pub fn trivial(ring: Arc<FiniteRing>) -> Result<Self, Error> {
        Self::ideal(ring, &[])
    }

    /// `Mat(size, A)` over `mat_ring = Mat(size, R)`, entrywise `d`.
    pub fn matrix_lift(&self, size: usize, mat_ring: Arc<FiniteRing>) -> Result<Self, Error> {
        let ad = self.dim;
        let rd = self.ring.dim();
        let dim = size * size * ad;
        let aidx = |a: usize, b: usize, s: usize| (a * size + b) * ad + s;
        let ridx = |a: usize, b: usize, s: usize| (a * size + b) * rd + s;
        let lift = |src: &MulTable, left_idx: &dyn Fn(usize, usize, usize) -> usize,
                    right_idx: &dyn Fn(usize, usize, usize) -> usize,
                    left_dim: usize, left_base: usize| {
            let mut t = MulTable::new(left_dim);
            for a in 0..size {
                for b in 0..size {
                    for s in 0..left_base {
                        for &(u, w, c) in &src.rows[s] {
                            for e in 0..size {
                                t.push(left_idx(a, b, s), right_idx(b, e, u as usize), aidx(a, e, w as usize), c);
                            }
                        }
                    }
                }
            }
            t
        };
        let prod = lift(&self.prod, &aidx, &aidx, dim, ad);
        let left = lift(&self.left, &ridx, &aidx, size * size * rd, rd);
        let right = lift(&self.right, &aidx, &ridx, dim, ad);
        let mut gens = Vec::new();
        for a in 0..size {
            for b in 0..size {
                for g in &self.gens {
                    gens.push(lift_entry(size, ad, a, b, g));
                }
            }
        }
        let d = self.d.as_ref().map(|d| {
            let mut out = Vec::with_capacity(dim);
            for a in 0..size {
                for b in 0..size {
                    for img in d.iter() {
                        out.push(lift_entry(size, rd, a, b, img));
                    }
                }
            }
            out
        });
        Self::from_tables(
            mat_ring,
            dim,
            prod,
            left,
            right,
            &gens,
            d,
            CrossedKind::MatrixLift {
                size,
                base: Box::new(self.kind.clone()),
            },
        )
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn kind(&self) -> &CrossedKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn zm(&self) -> Zm {
        self.ring.zm()
    }

    pub fn zero(&self) -> Elem {
        Elem::zero(self.dim)
    }

    pub fn generators(&self) -> &[Elem] {
        &self.gens
    }

    pub fn span(&self) -> &ModSpan {
        &self.span
    }

    pub fn sample_any<G: rand::Rng + ?Sized>(&self, rng: &mut G) -> Elem {
        self.span.sample(rng)
    }

    pub fn is_trivial(&self) -> bool {
        self.span.is_zero()
    }

    pub fn size(&self) -> u128 {
        self.span.size()
    }

    pub fn contains(&self, a: &Elem) -> bool {
        a.dim() == self.dim && self.span.contains(a)
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        self.zm().add_v(a, b)
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.zm().sub_v(a, b)
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        self.zm().neg_v(a)
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        self.prod.apply(self.zm(), a, b, self.dim)
    }

    /// `p · a`.
    pub fn lmul(&self, p: &Elem, a: &Elem) -> Elem {
        self.left.apply(self.zm(), p, a, self.dim)
    }

    /// `a · p`.
    pub fn rmul(&self, a: &Elem, p: &Elem) -> Elem {
        self.right.apply(self.zm(), a, p, self.dim)
    }

    pub fn has_structure_map(&self) -> bool {
        self.d.is_some()
    }

    /// `d(a)`, or `None` for a bare algebra.
    pub fn d(&self, a: &Elem) -> Option<Elem> {
        let d = self.d.as_ref()?;
        let zm = self.zm();
        let mut out = self.ring.zero();
        for (c, img) in a.0.iter().zip(d) {
            zm.axpy(&mut out, *c, img);
        }
        Some(out)
    }

    /// Checks the bimodule/algebra identities and the crossed-module axioms
    /// on all generator pairs and triples.
    pub fn validate(&self) -> Result<(), Error> {
        let r = &self.ring;
        let one = r.one();
        let rg = r.generators();
        for a in &self.gens {
            if self.lmul(&one, a) != *a || self.rmul(a, &one) != *a {
                return Err(Error::InvalidAlgebra("unit does not act trivially".into()));
            }
        }
        for a in &self.gens {
            for b in &self.gens {
                let ab = self.mul(a, b);
                if !self.span.contains(&ab) {
                    return Err(Error::InvalidAlgebra("product leaves the algebra".into()));
                }
                for c in &self.gens {
                    if self.mul(&ab, c) != self.mul(a, &self.mul(b, c)) {
                        return Err(Error::InvalidAlgebra("product not associative".into()));
                    }
                }
                for p in rg {
                    if self.lmul(p, &ab) != self.mul(&self.lmul(p, a), b)
                        || self.rmul(&ab, p) != self.mul(a, &self.rmul(b, p))
                        || self.mul(&self.rmul(a, p), b) != self.mul(a, &self.lmul(p, b))
                    {
                        return Err(Error::InvalidAlgebra("bimodule compatibility fails".into()));
                    }
                }
            }
            for p in rg {
                let pa = self.lmul(p, a);
                let ap = self.rmul(a, p);
                if !self.span.contains(&pa) || !self.span.contains(&ap) {
                    return Err(Error::InvalidAlgebra("actions leave the algebra".into()));
                }
                for q in rg {
                    if self.lmul(&r.mul(p, q), a) != self.lmul(p, &self.lmul(q, a))
                        || self.rmul(a, &r.mul(p, q)) != self.rmul(&self.rmul(a, p), q)
                        || self.rmul(&self.lmul(p, a), q) != self.lmul(p, &self.rmul(a, q))
                    {
                        return Err(Error::InvalidAlgebra("actions not associative".into()));
                    }
                }
            }
        }
        if self.d.is_some() {
            for a in &self.gens {
                let da = self.d(a).unwrap();
                if !r.contains(&da) {
                    return Err(Error::InvalidCrossedModule("d(a) outside R".into()));
                }
                for p in rg {
                    if self.d(&self.lmul(p, a)).unwrap() != r.mul(p, &da)
                        || self.d(&self.rmul(a, p)).unwrap() != r.mul(&da, p)
                    {
                        return Err(Error::InvalidCrossedModule("d is not R-bilinear".into()));
                    }
                }
                for b in &self.gens {
                    let db = self.d(b).unwrap();
                    let ab = self.mul(a, b);
                    if self.d(&ab).unwrap() != r.mul(&da, &db) {
                        return Err(Error::InvalidCrossedModule("d is not multiplicative".into()));
                    }
                    if self.lmul(&da, b) != ab || self.rmul(a, &db) != ab {
                        return Err(Error::InvalidCrossedModule("ab = d(a)b = a d(b) fails".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// The semidirect ring `A ⋊ R` on coordinates `[A | R]`.
    pub fn semidirect(&self) -> SemidirectRing {
        SemidirectRing::new(self)
    }

    /// `A` viewed as an algebra over `A ⋊ R` with `d(a) = a ⊕ 0`.
    pub fn over_semidirect(&self) -> Result<(Algebra, SemidirectRing), Error> {
        let sd = self.semidirect();
        let ad = self.dim;
        let rd = self.ring.dim();
        let total = ad + rd;
        let ring = Arc::new(sd.ring().clone());
        let a_basis: Vec<Elem> = (0..ad).map(|i| Elem::unit_vector(ad, i)).collect();
        let split = |i: usize| -> (Elem, Elem) {
            let v = Elem::unit_vector(total, i);
            (Elem(v.0[..ad].to_vec()), Elem(v.0[ad..].to_vec()))
        };
        let left = MulTable::from_fn(total, ad, |i, j| {
            let (b, p) = split(i);
            self.add(&self.mul(&b, &a_basis[j]), &self.lmul(&p, &a_basis[j]))
        });
        let right = MulTable::from_fn(ad, total, |i, j| {
            let (b, p) = split(j);
            self.add(&self.mul(&a_basis[i], &b), &self.rmul(&a_basis[i], &p))
        });
        let d = (0..ad)
            .map(|i| {
                let mut v = Elem::zero(total);
                v.0[i] = 1;
                v
            })
            .collect();
        let alg = Algebra::from_tables(
            ring,
            ad,
            self.prod.clone(),
            left,
            right,
            &self.gens,
            Some(d),
            CrossedKind::OverSemidirect {
                base: Box::new(self.kind.clone()),
            },
        )?;
        Ok((alg, sd))
    }

    /// The opposite algebra over the opposite ring.
    pub fn opposite(&self, op_ring: Arc<FiniteRing>) -> Algebra {
        Algebra {
            ring: op_ring,
            dim: self.dim,
            prod: self.prod.transposed(self.dim),
            left: transpose_action(&self.right, self.dim, self.ring.dim()),
            right: transpose_action(&self.left, self.ring.dim(), self.dim),
            span: self.span.clone(),
            gens: self.gens.clone(),
            d: self.d.clone(),
            kind: CrossedKind::Opposite {
                base: Box::new(self.kind.clone()),
            },
        }
    }

    /// Quasi-inverse of `a`: the `b` with `a + b + ab = a + b + ba = 0`.
    pub fn quasi_inverse(&self, a: &Elem) -> Option<Elem> {
        let sd = self.semidirect();
        let u = sd.one_plus_a(a);
        let inv = sd.ring().inverse(&u)?;
        let (b, p) = sd.split(&sd.ring().sub(&inv, &sd.ring().one()));
        debug_assert!(p.is_zero());
        Some(b)
    }
}

fn transpose_action(t: &MulTable, left_dim: usize, right_dim: usize) -> MulTable {
    let _ = left_dim;
    t.transposed(right_dim)
}

/// The ring `A ⋊ R`, elements `a ⊕ p` stored as `[a | p]`.
#[derive(Clone, Debug)]
pub struct SemidirectRing {
    ring: FiniteRing,
    a_dim: usize,
}

impl SemidirectRing {
    fn new(alg: &Algebra) -> Self {
        let ad = alg.dim;
        let r = &alg.ring;
        let rd = r.dim();
        let total = ad + rd;
        let mut table = MulTable::new(total);
        for (i, row) in alg.prod.rows.iter().enumerate() {
            for &(j, k, c) in row {
                table.push(i, j as usize, k as usize, c);
            }
        }
        for (i, row) in alg.right.rows.iter().enumerate() {
            for &(j, k, c) in row {
                table.push(i, ad + j as usize, k as usize, c);
            }
        }
        for (i, row) in alg.left.rows.iter().enumerate() {
            for &(j, k, c) in row {
                table.push(ad + i, j as usize, k as usize, c);
            }
        }
        for (i, row) in r.table.rows.iter().enumerate() {
            for &(j, k, c) in row {
                table.push(ad + i, ad + j as usize, ad + k as usize, c);
            }
        }
        let mut one = Elem::zero(total);
        one.0[ad..].copy_from_slice(&r.one.0);
        let gens: Vec<Elem> = alg
            .gens
            .iter()
            .map(|a| pair(a, &r.zero()))
            .chain(r.gens.iter().map(|p| pair(&alg.zero(), p)))
            .collect();
        let span = ModSpan::from_gens(r.modulus(), total, &gens);
        let ring = FiniteRing {
            zm: r.zm,
            dim: total,
            table,
            one,
            gens: span.basis(),
            span,
            shape: RingShape::Semidirect {
                ideal: format!("{:?}", alg.kind),
                base: Box::new(r.shape.clone()),
            },
        };
        SemidirectRing { ring, a_dim: ad }
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn a_dim(&self) -> usize {
        self.a_dim
    }

    pub fn pair(&self, a: &Elem, p: &Elem) -> Elem {
        pair(a, p)
    }

    pub fn split(&self, x: &Elem) -> (Elem, Elem) {
        (Elem(x.0[..self.a_dim].to_vec()), Elem(x.0[self.a_dim..].to_vec()))
    }

    pub fn embed_a(&self, a: &Elem) -> Elem {
        let mut v = Elem::zero(self.ring.dim());
        v.0[..self.a_dim].copy_from_slice(&a.0);
        v
    }

    pub fn embed_r(&self, p: &Elem) -> Elem {
        let mut v = Elem::zero(self.ring.dim());
        v.0[self.a_dim..].copy_from_slice(&p.0);
        v
    }

    /// `1 + (a ⊕ 0)`.
    pub fn one_plus_a(&self, a: &Elem) -> Elem {
        self.ring.add(&self.ring.one, &self.embed_a(a))
    }

    /// `1 + (0 ⊕ p)`.
    pub fn one_plus_r(&self, p: &Elem) -> Elem {
        self.ring.add(&self.ring.one, &self.embed_r(p))
    }

    /// Whether `{a ⊕ 0}` is a two-sided ideal (checked on generators).
    pub fn a_is_ideal(&self) -> bool {
        let gens = self.ring.generators();
        gens.iter().all(|x| {
            let (a, _) = self.split(x);
            let ax = self.embed_a(&a);
            gens.iter().all(|y| {
                let l = self.ring.mul(&ax, y);
                let r = self.ring.mul(y, &ax);
                self.split(&l).1.is_zero() && self.split(&r).1.is_zero()
            })
        })
    }
}

fn pair(a: &Elem, p: &Elem) -> Elem {
    let mut v = a.0.clone();
    v.extend_from_slice(&p.0);
    Elem(v)
}

impl fmt::Display for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} over Z/{} (dim {})", self.shape, self.modulus(), self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(m: u64) -> Arc<FiniteRing> {
        Arc::new(FiniteRing::cyclic(m).unwrap())
    }

    #[test]
    fn matrix_ring_multiplies_like_matrices() {
        let base = FiniteRing::cyclic(4).unwrap();
        let r = FiniteRing::matrix(3, &base).unwrap();
        let e = |a, b| mat::entry(3, 1, a, b, &Elem(vec![1]));
        assert_eq!(r.mul(&e(0, 1), &e(1, 2)), e(0, 2));
        assert!(r.mul(&e(0, 1), &e(0, 2)).is_zero());
        assert_eq!(r.size(), 4u128.pow(9));
    }

    #[test]
    fn semidirect_of_ideal_in_z4() {
        // (2 ⊕ 1)(2 ⊕ 1) = (2·2 + 2 + 2) ⊕ 1 = 0 ⊕ 1
        let r = z(4);
        let a = Algebra::ideal(r.clone(), &[Elem(vec![2])]).unwrap();
        let sd = a.semidirect();
        let x = sd.pair(&Elem(vec![2]), &Elem(vec![1]));
        assert_eq!(sd.ring().mul(&x, &x), sd.pair(&Elem(vec![0]), &Elem(vec![1])));
        assert!(sd.a_is_ideal());
        assert_eq!(sd.ring().one(), sd.pair(&Elem(vec![0]), &Elem(vec![1])));
    }

    #[test]
    fn semidirect_of_trivial_algebra_is_base_ring() {
        let r = z(6);
        let a = Algebra::trivial(r.clone()).unwrap();
        let sd = a.semidirect();
        assert_eq!(sd.ring().size(), r.size());
    }

    #[test]
    fn homotope_examples() {
        let r = z(8);
        let h = Algebra::homotope(r.clone(), &Elem(vec![2])).unwrap();
        assert_eq!(h.d(&Elem(vec![3])).unwrap(), Elem(vec![6]));
        assert_eq!(h.mul(&Elem(vec![3]), &Elem(vec![5])), Elem(vec![6]));
        let zero = Algebra::homotope(r.clone(), &Elem(vec![0])).unwrap();
        assert!(zero.mul(&Elem(vec![3]), &Elem(vec![5])).is_zero());
        assert!(zero.d(&Elem(vec![3])).unwrap().is_zero());
        let id = Algebra::homotope(r, &Elem(vec![1])).unwrap();
        assert_eq!(id.d(&Elem(vec![5])).unwrap(), Elem(vec![5]));
        assert_eq!(id.mul(&Elem(vec![3]), &Elem(vec![5])), Elem(vec![7]));
    }

    #[test]
    fn homotope_rejects_non_central() {
        let base = FiniteRing::cyclic(4).unwrap();
        let r = Arc::new(FiniteRing::matrix(2, &base).unwrap());
        let s = mat::entry(2, 1, 0, 1, &Elem(vec![1]));
        assert!(matches!(Algebra::homotope(r, &s), Err(Error::NonCentral)));
    }

    #[test]
    fn quasi_inverses() {
        let r = z(4);
        let a = Algebra::ideal(r.clone(), &[Elem(vec![2])]).unwrap();
        assert_eq!(a.quasi_inverse(&Elem(vec![0])).unwrap(), Elem(vec![0]));
        assert_eq!(a.quasi_inverse(&Elem(vec![2])).unwrap(), Elem(vec![2]));
        // A = R = Z/4: a = 1 gives 1 + a = 2, not a unit.
        let full = Algebra::ideal(r, &[Elem(vec![1])]).unwrap();
        assert!(full.quasi_inverse(&Elem(vec![1])).is_none());
        assert_eq!(full.quasi_inverse(&Elem(vec![2])).unwrap(), Elem(vec![2]));
    }

    #[test]
    fn matrix_lift_of_scalar_ideal() {
        let k = z(8);
        let a = Algebra::ideal(k.clone(), &[Elem(vec![2])]).unwrap();
        let mk = Arc::new(FiniteRing::matrix(3, &k).unwrap());
        let ma = a.matrix_lift(3, mk.clone()).unwrap();
        let direct = Algebra::ideal(mk.clone(), &[mk.scale(2, &mk.one())]).unwrap();
        assert!(ma.span().same_span(direct.span()));
        let x = mat::entry(3, 1, 0, 1, &Elem(vec![2]));
        let y = mat::entry(3, 1, 1, 2, &Elem(vec![6]));
        assert_eq!(ma.mul(&x, &y), mat::entry(3, 1, 0, 2, &Elem(vec![4])));
    }

    #[test]
    fn opposite_reverses_products() {
        let base = FiniteRing::cyclic(4).unwrap();
        let r = FiniteRing::matrix(2, &base).unwrap();
        let op = r.opposite();
        let e = |a, b| mat::entry(2, 1, a, b, &Elem(vec![1]));
        assert_eq!(op.mul(&e(1, 0), &e(0, 1)), r.mul(&e(0, 1), &e(1, 0)));
    }
}
