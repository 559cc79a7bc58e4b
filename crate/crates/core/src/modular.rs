//! Linear algebra over `Z/m` for composite `m`.
//!
//! Submodules of `(Z/m)^k` are kept in Howell form: an upper echelon basis
//! whose pivots divide `m` and which is closed under the "annihilator
//! multiples" `(m / d) * row`. In that form reduction by the rows is an exact
//! membership test, and the rows with pivots inside a trailing block of
//! coordinates generate the intersection with that block.

use serde::{Deserialize, Serialize};

/// Greatest common divisor on unsigned integers.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended gcd on signed integers: returns `(g, s, t)` with `s*a + t*b = g >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// A coordinate vector over `Z/m`. The modulus lives with the owning structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub Vec<u64>);

impl Elem {
    pub fn zero(dim: usize) -> Self {
        Elem(vec![0; dim])
    }

    pub fn unit_vector(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        Elem(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

/// Arithmetic helpers for a fixed modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Zm(pub u64);

impl Zm {
    #[inline]
    pub fn m(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn reduce_i(self, x: i128) -> u64 {
        x.rem_euclid(self.0 as i128) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.0
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.0 - b) % self.0
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    pub fn add_v(self, a: &Elem, b: &Elem) -> Elem {
        Elem(a.0.iter().zip(&b.0).map(|(&x, &y)| self.add(x, y)).collect())
    }

    pub fn sub_v(self, a: &Elem, b: &Elem) -> Elem {
        Elem(a.0.iter().zip(&b.0).map(|(&x, &y)| self.sub(x, y)).collect())
    }

    pub fn neg_v(self, a: &Elem) -> Elem {
        Elem(a.0.iter().map(|&x| self.sub(0, x)).collect())
    }

    pub fn scale_v(self, c: u64, a: &Elem) -> Elem {
        Elem(a.0.iter().map(|&x| self.mul(c % self.0, x)).collect())
    }

    /// `acc += c * a` in place.
    pub fn axpy(self, acc: &mut Elem, c: u64, a: &Elem) {
        if c % self.0 == 0 {
            return;
        }
        for (x, &y) in acc.0.iter_mut().zip(&a.0) {
            *x = (*x + self.mul(c, y)) % self.0;
        }
    }

    /// Symmetric representative in `(-m/2, m/2]`.
    pub fn signed(self, x: u64) -> i64 {
        let x = x % self.0;
        if 2 * x > self.0 {
            x as i64 - self.0 as i64
        } else {
            x as i64
        }
    }
}

#[derive(Clone, Debug)]
struct Row {
    v: Vec<u64>,
    coeff: Vec<u64>,
}

/// A submodule of `(Z/m)^dim` in Howell form, optionally tracking how each
/// row is expressed in terms of the inserted generators.
#[derive(Clone, Debug)]
pub struct ModSpan {
    zm: Zm,
    dim: usize,
    rows: Vec<Option<Row>>,
    track: bool,
    ngens: usize,
    gens: Vec<Elem>,
}

impl ModSpan {
    pub fn new(m: u64, dim: usize) -> Self {
        Self::build(m, dim, false)
    }

    /// A span that records coefficients so that [`ModSpan::solve`] can return
    /// an expression of a member in terms of the generators.
    pub fn tracking(m: u64, dim: usize) -> Self {
        Self::build(m, dim, true)
    }

    fn build(m: u64, dim: usize, track: bool) -> Self {
        assert!(m >= 2, "modulus must be at least 2");
        ModSpan {
            zm: Zm(m),
            dim,
            rows: vec![None; dim],
            track,
            ngens: 0,
            gens: Vec::new(),
        }
    }

    pub fn from_gens<'a>(m: u64, dim: usize, gens: impl IntoIterator<Item = &'a Elem>) -> Self {
        let mut s = Self::new(m, dim);
        for g in gens {
            s.insert(g);
        }
        s
    }

    pub fn tracking_from_gens<'a>(
        m: u64,
        dim: usize,
        gens: impl IntoIterator<Item = &'a Elem>,
    ) -> Self {
        let mut s = Self::tracking(m, dim);
        for g in gens {
            s.insert(g);
        }
        s
    }

    pub fn modulus(&self) -> u64 {
        self.zm.m()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator_count(&self) -> usize {
        self.ngens
    }

    /// The generators in insertion order (kept only when tracking).
    pub fn generators(&self) -> &[Elem] {
        &self.gens
    }

    /// Inserts a generator; returns `true` if the span grew.
    pub fn insert(&mut self, v: &Elem) -> bool {
        assert_eq!(v.dim(), self.dim, "dimension mismatch");
        let before = self.log_size();
        let coeff = if self.track {
            for r in self.rows.iter_mut().flatten() {
                r.coeff.push(0);
            }
            let mut c = vec![0; self.ngens + 1];
            c[self.ngens] = 1;
            self.gens.push(v.clone());
            c
        } else {
            Vec::new()
        };
        self.ngens += 1;
        let m = self.zm.m();
        let mut work = vec![Row {
            v: v.0.iter().map(|x| x % m).collect(),
            coeff,
        }];
        while let Some(mut w) = work.pop() {
            for c in 0..self.dim {
                let x = w.v[c];
                if x == 0 {
                    continue;
                }
                match self.rows[c].take() {
                    None => {
                        // Combine with the implicit row m*e_c.
                        let (g, _, t) = ext_gcd(m as i128, x as i128);
                        let g = g as u64;
                        let t = self.zm.reduce_i(t);
                        let new = self.scale_row(&w, t);
                        let rest = self.scale_row(&w, m / g);
                        let ann = self.scale_row(&new, m / g);
                        self.rows[c] = Some(new);
                        work.push(ann);
                        w = rest;
                    }
                    Some(h) => {
                        let d = h.v[c];
                        if x % d == 0 {
                            let q = x / d;
                            w = self.sub_row(&w, &h, q);
                            self.rows[c] = Some(h);
                            continue;
                        }
                        let (g, s, t) = ext_gcd(d as i128, x as i128);
                        let s = self.zm.reduce_i(s);
                        let t = self.zm.reduce_i(t);
                        let new = self.add_rows(&h, s, &w, t);
                        let rest = {
                            let a = self.scale_row(&w, d / g as u64);
                            self.sub_row(&a, &h, x / g as u64)
                        };
                        let ann = self.scale_row(&new, m / g as u64);
                        debug_assert_eq!(new.v[c], g as u64 % m);
                        self.rows[c] = Some(new);
                        work.push(ann);
                        w = rest;
                    }
                }
            }
        }
        self.log_size() != before
    }

    fn scale_row(&self, r: &Row, c: u64) -> Row {
        Row {
            v: r.v.iter().map(|&x| self.zm.mul(x, c)).collect(),
            coeff: r.coeff.iter().map(|&x| self.zm.mul(x, c)).collect(),
        }
    }

    fn add_rows(&self, a: &Row, s: u64, b: &Row, t: u64) -> Row {
        let zm = self.zm;
        Row {
            v: a.v.iter().zip(&b.v).map(|(&x, &y)| zm.add(zm.mul(x, s), zm.mul(y, t))).collect(),
            coeff: a
                .coeff
                .iter()
                .zip(&b.coeff)
                .map(|(&x, &y)| zm.add(zm.mul(x, s), zm.mul(y, t)))
                .collect(),
        }
    }

    fn sub_row(&self, a: &Row, b: &Row, q: u64) -> Row {
        let zm = self.zm;
        Row {
            v: a.v.iter().zip(&b.v).map(|(&x, &y)| zm.sub(x, zm.mul(y, q))).collect(),
            coeff: a.coeff.iter().zip(&b.coeff).map(|(&x, &y)| zm.sub(x, zm.mul(y, q))).collect(),
        }
    }

    /// The pivot list; the span grows exactly when some pivot shrinks.
    fn log_size(&self) -> Vec<u64> {
        self.pivots()
    }

    /// Pivot of each coordinate, `m` where there is no row.
    pub fn pivots(&self) -> Vec<u64> {
        self.rows
            .iter()
            .enumerate()
            .map(|(c, r)| r.as_ref().map_or(self.zm.m(), |r| r.v[c]))
            .collect()
    }

    pub fn contains(&self, x: &Elem) -> bool {
        self.reduce(x).0.is_zero()
    }

    /// Reduces `x` by the rows; returns the remainder and the accumulated
    /// quotient coefficients (in generator terms when tracking).
    fn reduce(&self, x: &Elem) -> (Elem, Vec<u64>) {
        assert_eq!(x.dim(), self.dim, "dimension mismatch");
        let m = self.zm.m();
        let mut v: Vec<u64> = x.0.iter().map(|a| a % m).collect();
        let mut coeff = vec![0u64; if self.track { self.ngens } else { 0 }];
        for c in 0..self.dim {
            let a = v[c];
            if a == 0 {
                continue;
            }
            let Some(h) = &self.rows[c] else {
                return (Elem(v), coeff);
            };
            let d = h.v[c];
            if a % d != 0 {
                return (Elem(v), coeff);
            }
            let q = a / d;
            for (vi, &hi) in v.iter_mut().zip(&h.v) {
                *vi = self.zm.sub(*vi, self.zm.mul(hi, q));
            }
            for (ci, &hi) in coeff.iter_mut().zip(&h.coeff) {
                *ci = self.zm.add(*ci, self.zm.mul(hi, q));
            }
        }
        (Elem(v), coeff)
    }

    /// Coefficients `c` with `sum c_g * gen_g = x`, if `x` is in the span.
    /// Requires a tracking span.
    pub fn solve(&self, x: &Elem) -> Option<Vec<u64>> {
        assert!(self.track, "solve requires a tracking span");
        let (rest, coeff) = self.reduce(x);
        rest.is_zero().then_some(coeff)
    }

    /// Number of elements of the submodule.
    pub fn size(&self) -> u128 {
        self.pivots().iter().map(|&d| (self.zm.m() / d) as u128).product()
    }

    /// The Howell basis rows.
    pub fn basis(&self) -> Vec<Elem> {
        self.rows.iter().flatten().map(|r| Elem(r.v.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_none())
    }

    pub fn contains_span(&self, other: &ModSpan) -> bool {
        other.basis().iter().all(|b| self.contains(b))
    }

    pub fn same_span(&self, other: &ModSpan) -> bool {
        self.size() == other.size() && self.contains_span(other)
    }

    /// Uniformly random element: random `Z/m` combination of the basis rows.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        let mut acc = Elem::zero(self.dim);
        for r in self.rows.iter().flatten() {
            let c = rng.gen_range(0..self.zm.m());
            self.zm.axpy(&mut acc, c, &Elem(r.v.clone()));
        }
        acc
    }
}

/// Generators of the kernel `{c in (Z/m)^g : sum c_i v_i = 0}` of a list of
/// vectors in `(Z/m)^dim`.
pub fn syzygies(m: u64, dim: usize, vectors: &[Elem]) -> Vec<Vec<u64>> {
    let g = vectors.len();
    let mut span = ModSpan::new(m, dim + g);
    for (i, v) in vectors.iter().enumerate() {
        let mut w = v.0.clone();
        w.extend((0..g).map(|j| u64::from(i == j)));
        span.insert(&Elem(w));
    }
    span.basis()
        .into_iter()
        .filter(|b| b.0[..dim].iter().all(|&x| x == 0))
        .map(|b| b.0[dim..].to_vec())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn brute_span(m: u64, gens: &[Elem]) -> std::collections::BTreeSet<Vec<u64>> {
        let zm = Zm(m);
        let dim = gens[0].dim();
        let mut set = std::collections::BTreeSet::new();
        set.insert(vec![0; dim]);
        loop {
            let mut grew = false;
            let current: Vec<_> = set.iter().cloned().collect();
            for x in current {
                for g in gens {
                    let y = zm.add_v(&Elem(x.clone()), g).0;
                    grew |= set.insert(y);
                }
            }
            if !grew {
                return set;
            }
        }
    }

    #[test]
    fn ext_gcd_identity() {
        for a in -20i128..20 {
            for b in -20i128..20 {
                let (g, s, t) = ext_gcd(a, b);
                assert_eq!(s * a + t * b, g);
                assert!(g >= 0);
            }
        }
    }

    #[test]
    fn span_matches_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for m in [4u64, 6, 8, 12] {
            for _ in 0..40 {
                let gens: Vec<Elem> = (0..rng.gen_range(1..4))
                    .map(|_| Elem((0..3).map(|_| rng.gen_range(0..m)).collect()))
                    .collect();
                let span = ModSpan::from_gens(m, 3, &gens);
                let brute = brute_span(m, &gens);
                assert_eq!(span.size(), brute.len() as u128, "m={m} gens={gens:?}");
                for x in 0..m.pow(3) {
                    let v = vec![x % m, (x / m) % m, x / (m * m)];
                    assert_eq!(span.contains(&Elem(v.clone())), brute.contains(&v));
                }
            }
        }
    }

    #[test]
    fn solve_reconstructs() {
        let m = 8;
        let gens = vec![Elem(vec![2, 4, 0]), Elem(vec![0, 2, 6]), Elem(vec![4, 0, 4])];
        let span = ModSpan::tracking_from_gens(m, 3, &gens);
        let zm = Zm(m);
        let target = zm.add_v(&zm.scale_v(3, &gens[0]), &zm.scale_v(5, &gens[1]));
        let c = span.solve(&target).unwrap();
        let mut acc = Elem::zero(3);
        for (ci, g) in c.iter().zip(&gens) {
            zm.axpy(&mut acc, *ci, g);
        }
        assert_eq!(acc, target);
        assert!(span.solve(&Elem(vec![1, 0, 0])).is_none());
    }

    #[test]
    fn syzygies_annihilate() {
        let m = 4;
        let vs = vec![Elem(vec![2, 1]), Elem(vec![0, 2]), Elem(vec![2, 3])];
        let syz = syzygies(m, 2, &vs);
        let zm = Zm(m);
        for s in &syz {
            let mut acc = Elem::zero(2);
            for (c, v) in s.iter().zip(&vs) {
                zm.axpy(&mut acc, *c, v);
            }
            assert!(acc.is_zero());
        }
        // Brute force: every kernel vector lies in the span of the syzygies.
        let ker_span = ModSpan::from_gens(m, 3, syz.iter().map(|s| Elem(s.clone())).collect::<Vec<_>>().iter());
        for c in 0..m.pow(3) {
            let cv = vec![c % m, (c / m) % m, c / (m * m)];
            let mut acc = Elem::zero(2);
            for (ci, v) in cv.iter().zip(&vs) {
                zm.axpy(&mut acc, *ci, v);
            }
            if acc.is_zero() {
                assert!(ker_span.contains(&Elem(cv)));
            }
        }
    }
}
