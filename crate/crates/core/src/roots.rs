//! Simply laced root systems in their standard lattice models, closed and
//! special closed subsets, quotients of type-A systems and the subsystem
//! family used for colimit coverage.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::Error;

/// Root system family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    A,
    D,
    E,
}

/// Integer coordinates; E-type roots are stored doubled.
pub type Coords = Vec<i32>;

/// A simply laced root system with its addition table and a positive system.
#[derive(Clone, Debug)]
pub struct RootDatum {
    family: Family,
    rank: usize,
    roots: Vec<Coords>,
    index: HashMap<Coords, usize>,
    /// Inner products are `raw dot / scale`.
    scale: i32,
    neg: Vec<usize>,
    sum: Vec<Vec<Option<usize>>>,
    positive: Vec<bool>,
    simple: Vec<usize>,
    simple_coords: Vec<Vec<i32>>,
}

impl RootDatum {
    /// Parses selectors such as `"A3"`, `"D4"`, `"E6"`.
    pub fn parse(name: &str) -> Result<Self, Error> {
        let name = name.trim();
        let (head, tail) = name.split_at(1.min(name.len()));
        let rank: usize = tail
            .parse()
            .map_err(|_| Error::Roots(format!("cannot parse root system {name:?}")))?;
        match head {
            "A" | "a" => Self::type_a(rank),
            "D" | "d" => Self::type_d(rank),
            "E" | "e" => Self::type_e(rank),
            _ => Err(Error::Roots(format!("unsupported root system {name:?}"))),
        }
    }

    /// `A_rank`: roots `e_i − e_j` in `Z^{rank+1}`.
    pub fn type_a(rank: usize) -> Result<Self, Error> {
        if rank == 0 {
            return Err(Error::Roots("A_0 has no roots".into()));
        }
        let n = rank + 1;
        let mut roots = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let mut v = vec![0; n];
                    v[i] = 1;
                    v[j] = -1;
                    roots.push(v);
                }
            }
        }
        Ok(Self::build(Family::A, rank, roots, 1))
    }

    /// `D_rank` (rank ≥ 4): roots `±e_i ± e_j`.
    pub fn type_d(rank: usize) -> Result<Self, Error> {
        if rank < 4 {
            return Err(Error::Roots(format!("D_{rank} requires rank >= 4")));
        }
        Ok(Self::build(Family::D, rank, pm_pairs(rank, 1), 1))
    }

    /// `E_6`, `E_7`, `E_8` inside the doubled `E_8` lattice.
    pub fn type_e(rank: usize) -> Result<Self, Error> {
        if !(6..=8).contains(&rank) {
            return Err(Error::Roots(format!("E_{rank} does not exist")));
        }
        let mut e8 = pm_pairs(8, 2);
        for mask in 0u32..256 {
            if mask.count_ones() % 2 == 0 {
                e8.push((0..8).map(|b| if mask >> b & 1 == 1 { -1 } else { 1 }).collect());
            }
        }
        let dot = |a: &Coords, b: &Coords| a.iter().zip(b).map(|(x, y)| x * y).sum::<i32>();
        // e7 + e8 and e6 − e7 span an A_2; E_7 and E_6 are the orthogonal roots.
        let mut t1 = vec![0; 8];
        t1[6] = 2;
        t1[7] = 2;
        let mut t2 = vec![0; 8];
        t2[5] = 2;
        t2[6] = -2;
        let roots = match rank {
            8 => e8,
            7 => e8.into_iter().filter(|r| dot(r, &t1) == 0).collect(),
            _ => e8
                .into_iter()
                .filter(|r| dot(r, &t1) == 0 && dot(r, &t2) == 0)
                .collect(),
        };
        Ok(Self::build(Family::E, rank, roots, 4))
    }

    fn build(family: Family, rank: usize, roots: Vec<Coords>, scale: i32) -> Self {
        let index: HashMap<Coords, usize> = roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let neg = roots
            .iter()
            .map(|r| index[&r.iter().map(|x| -x).collect::<Coords>()])
            .collect();
        let sum = roots
            .iter()
            .map(|a| {
                roots
                    .iter()
                    .map(|b| index.get(&a.iter().zip(b).map(|(x, y)| x + y).collect::<Coords>()).copied())
                    .collect()
            })
            .collect();
        // Generic functional: weights 5^(d-1-i) never vanish on a root.
        let d = roots[0].len();
        let weight: Vec<i64> = (0..d).map(|i| 5i64.pow((d - 1 - i) as u32)).collect();
        let f = |r: &Coords| r.iter().zip(&weight).map(|(x, w)| *x as i64 * w).sum::<i64>();
        let positive: Vec<bool> = roots.iter().map(|r| f(r) > 0).collect();
        let mut datum = RootDatum {
            family,
            rank,
            roots,
            index,
            scale,
            neg,
            sum,
            positive,
            simple: Vec::new(),
            simple_coords: Vec::new(),
        };
        let mut simple: Vec<usize> = (0..datum.len())
            .filter(|&r| datum.positive[r])
            .filter(|&r| {
                !(0..datum.len()).any(|b| {
                    datum.positive[b] && datum.sum[r][datum.neg[b]].is_some_and(|c| datum.positive[c])
                })
            })
            .collect();
        simple.sort_by_key(|&r| std::cmp::Reverse(f(&datum.roots[r])));
        datum.simple_coords = datum.compute_simple_coords(&simple);
        datum.simple = simple;
        datum
    }

    fn compute_simple_coords(&self, simple: &[usize]) -> Vec<Vec<i32>> {
        let l = simple.len();
        let mut coords: Vec<Option<Vec<i32>>> = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for (k, &s) in simple.iter().enumerate() {
            let mut c = vec![0; l];
            c[k] = 1;
            coords[s] = Some(c);
            queue.push_back(s);
        }
        while let Some(r) = queue.pop_front() {
            for (k, &s) in simple.iter().enumerate() {
                if let Some(t) = self.sum[r][s] {
                    if coords[t].is_none() && self.positive[t] {
                        let mut c = coords[r].clone().unwrap();
                        c[k] += 1;
                        coords[t] = Some(c);
                        queue.push_back(t);
                    }
                }
            }
        }
        (0..self.len())
            .map(|r| {
                if self.positive[r] {
                    coords[r].clone().expect("positive root reachable from simple roots")
                } else {
                    coords[self.neg[r]].clone().unwrap().iter().map(|x| -x).collect()
                }
            })
            .collect()
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn name(&self) -> String {
        format!("{:?}{}", self.family, self.rank)
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn coords(&self, r: usize) -> &Coords {
        &self.roots[r]
    }

    pub fn find(&self, c: &Coords) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn neg(&self, r: usize) -> usize {
        self.neg[r]
    }

    /// Index of `α + β` if it is a root.
    pub fn add(&self, a: usize, b: usize) -> Option<usize> {
        self.sum[a][b]
    }

    pub fn dot(&self, a: usize, b: usize) -> i32 {
        self.roots[a].iter().zip(&self.roots[b]).map(|(x, y)| x * y).sum::<i32>() / self.scale
    }

    pub fn is_positive(&self, r: usize) -> bool {
        self.positive[r]
    }

    /// Simple roots, in Dynkin node order.
    pub fn simple(&self) -> &[usize] {
        &self.simple
    }

    /// Coordinates of a root in the simple-root basis.
    pub fn simple_coords(&self, r: usize) -> &[i32] {
        &self.simple_coords[r]
    }

    /// Dynkin edges `(i, j)` with `i < j`.
    pub fn dynkin_edges(&self) -> Vec<(usize, usize)> {
        let s = &self.simple;
        let mut e = Vec::new();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                if self.dot(s[i], s[j]) != 0 {
                    e.push((i, j));
                }
            }
        }
        e
    }

    /// For type A with `n` indices: the root `e_i − e_j`.
    pub fn pair_root(&self, i: usize, j: usize) -> Option<usize> {
        if self.family != Family::A || i == j {
            return None;
        }
        let n = self.rank + 1;
        if i >= n || j >= n {
            return None;
        }
        let mut v = vec![0; n];
        v[i] = 1;
        v[j] = -1;
        self.find(&v)
    }

    /// For type A: the pair `(i, j)` of the root `e_i − e_j`.
    pub fn root_pair(&self, r: usize) -> Option<(usize, usize)> {
        if self.family != Family::A {
            return None;
        }
        let c = &self.roots[r];
        Some((c.iter().position(|&x| x == 1)?, c.iter().position(|&x| x == -1)?))
    }

    pub fn is_closed(&self, set: &[usize]) -> bool {
        let s: BTreeSet<usize> = set.iter().copied().collect();
        s.iter().all(|&a| s.iter().all(|&b| self.sum[a][b].is_none_or(|c| s.contains(&c))))
    }

    /// Closed and free of opposite pairs.
    pub fn is_special_closed(&self, set: &[usize]) -> bool {
        let s: BTreeSet<usize> = set.iter().copied().collect();
        self.is_closed(set) && s.iter().all(|&a| !s.contains(&self.neg[a]))
    }

    /// Elements of a special closed set that are not sums of two elements.
    pub fn extreme_roots(&self, set: &[usize]) -> Result<Vec<usize>, Error> {
        if !self.is_special_closed(set) {
            return Err(Error::Roots("extreme roots need a special closed subset".into()));
        }
        let s: BTreeSet<usize> = set.iter().copied().collect();
        Ok(s.iter()
            .copied()
            .filter(|&a| !s.iter().any(|&b| self.sum[a][self.neg[b]].is_some_and(|c| s.contains(&c))))
            .collect())
    }

    /// Inner-product classification of a pair of roots.
    pub fn rank2_type(&self, a: usize, b: usize) -> Rank2 {
        match self.dot(a, b) {
            2 | -2 => Rank2::Collinear,
            0 => Rank2::A1xA1,
            _ => Rank2::A2,
        }
    }

    /// Smallest subsystem containing `set`: all roots in its rational span.
    pub fn span_closure(&self, set: &[usize]) -> Vec<usize> {
        let base: Vec<Vec<i64>> = set.iter().map(|&r| self.roots[r].iter().map(|&x| x as i64).collect()).collect();
        let rk = rank_of(&base);
        (0..self.len())
            .filter(|&r| {
                let mut m = base.clone();
                m.push(self.roots[r].iter().map(|&x| x as i64).collect());
                rank_of(&m) == rk
            })
            .collect()
    }

    /// Rank of the span of a root set.
    pub fn span_rank(&self, set: &[usize]) -> usize {
        rank_of(&set.iter().map(|&r| self.roots[r].iter().map(|&x| x as i64).collect()).collect::<Vec<_>>())
    }

    /// Type of the subsystem spanned by a root set of rank ≤ 2.
    pub fn configuration(&self, set: &[usize]) -> Option<Config> {
        let sub = self.span_closure(set);
        match (self.span_rank(set), sub.len()) {
            (0, _) => Some(Config::Empty),
            (1, 2) => Some(Config::A1),
            (2, 4) => Some(Config::A1xA1),
            (2, 6) => Some(Config::A2),
            _ => None,
        }
    }

    /// All subsystems of types `A_1` and `A_3`, as sorted root index sets.
    pub fn subsystem_family_g(&self) -> Vec<Subsystem> {
        let mut out = Vec::new();
        for r in 0..self.len() {
            if r < self.neg[r] {
                out.push(Subsystem {
                    kind: SubsystemKind::A1,
                    roots: vec![r, self.neg[r]],
                });
            }
        }
        let mut seen = BTreeSet::new();
        for c in self.a3_chains() {
            let mut s = self.span_closure(&c);
            s.sort_unstable();
            if s.len() == 12 && seen.insert(s.clone()) {
                out.push(Subsystem {
                    kind: SubsystemKind::A3,
                    roots: s,
                });
            }
        }
        out
    }

    fn a3_chains(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for b in 0..self.len() {
                if self.dot(a, b) != -1 {
                    continue;
                }
                for c in 0..self.len() {
                    if self.dot(b, c) == -1 && self.dot(a, c) == 0 {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    /// A chain `γ1, γ2, γ3` (an `A_3` simple system) whose span contains
    /// every root of `set`, preferring chains through the given roots.
    pub fn a3_chain_containing(&self, set: &[usize]) -> Option<[usize; 3]> {
        let sub = self.span_closure(set);
        let in_span = |c: &[usize; 3]| {
            let span = self.span_closure(c);
            sub.iter().all(|r| span.contains(r))
        };
        // Candidate first roots come from the support to keep the search short.
        let mut firsts: Vec<usize> = sub.clone();
        firsts.extend(0..self.len());
        for &a in &firsts {
            for b in 0..self.len() {
                if self.dot(a, b) != -1 {
                    continue;
                }
                for c in 0..self.len() {
                    if self.dot(b, c) == -1 && self.dot(a, c) == 0 {
                        let chain = [a, b, c];
                        if in_span(&chain) {
                            return Some(chain);
                        }
                    }
                }
            }
        }
        None
    }

    /// Quotient of a type-A datum by a subsystem `Ψ` (closed, `Ψ = −Ψ`).
    pub fn quotient(&self, psi: &[usize]) -> Result<SubsystemQuotient, Error> {
        if self.family != Family::A {
            return Err(Error::Roots("quotients are only built for type A".into()));
        }
        let s: BTreeSet<usize> = psi.iter().copied().collect();
        if !self.is_closed(psi) || s.iter().any(|&r| !s.contains(&self.neg[r])) {
            return Err(Error::Roots("Ψ is not a subsystem".into()));
        }
        let n = self.rank + 1;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &r in &s {
            let (i, j) = self.root_pair(r).unwrap();
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a.max(b)] = a.min(b);
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = vec![0; n];
        for i in 0..n {
            let root = find(&mut parent, i);
            match classes.iter().position(|c| c[0] == root) {
                Some(k) => {
                    classes[k].push(i);
                    class_of[i] = k;
                }
                None => {
                    class_of[i] = classes.len();
                    classes.push(vec![i]);
                }
            }
        }
        let q = classes.len();
        let quotient = if q >= 2 { Some(RootDatum::type_a(q - 1)?) } else { None };
        let projection = (0..self.len())
            .map(|r| {
                let (i, j) = self.root_pair(r).unwrap();
                let (a, b) = (class_of[i], class_of[j]);
                if a == b {
                    None
                } else {
                    quotient.as_ref().and_then(|d| d.pair_root(a, b))
                }
            })
            .collect();
        Ok(SubsystemQuotient {
            classes,
            class_of,
            quotient,
            projection,
        })
    }
}

fn pm_pairs(d: usize, unit: i32) -> Vec<Coords> {
    let mut out = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            for si in [unit, -unit] {
                for sj in [unit, -unit] {
                    let mut v = vec![0; d];
                    v[i] = si;
                    v[j] = sj;
                    out.push(v);
                }
            }
        }
    }
    out
}

/// Rank over the rationals by fraction-free elimination.
fn rank_of(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i64>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let (a, b) = (m[rank][c], m[r][c]);
                for k in 0..cols {
                    m[r][k] = m[r][k] * a - m[rank][k] * b;
                }
                let g = m[r].iter().fold(0i64, |g, &x| gcd_i(g, x));
                if g > 1 {
                    m[r].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd_i(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd_i(b, a % b)
    }
}

/// Relative position of two roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rank2 {
    Collinear,
    A1xA1,
    A2,
}

/// Type of the subsystem spanned by an instance's roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Config {
    Empty,
    A1,
    A1xA1,
    A2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SubsystemKind {
    A1,
    A3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Subsystem {
    pub kind: SubsystemKind,
    pub roots: Vec<usize>,
}

/// Index partition and projection for `Φ/Ψ`.
#[derive(Clone, Debug)]
pub struct SubsystemQuotient {
    /// Classes sorted by least member.
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    /// `None` when everything collapses to one class.
    pub quotient: Option<RootDatum>,
    /// `π_Ψ` on roots outside `Ψ`.
    pub projection: Vec<Option<usize>>,
}

impl fmt::Display for RootDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a3() -> RootDatum {
        RootDatum::type_a(3).unwrap()
    }

    #[test]
    fn root_counts() {
        for (name, count) in [
            ("A1", 2),
            ("A3", 12),
            ("A4", 20),
            ("D4", 24),
            ("D5", 40),
            ("E6", 72),
            ("E7", 126),
            ("E8", 240),
        ] {
            let d = RootDatum::parse(name).unwrap();
            assert_eq!(d.len(), count, "{name}");
            assert_eq!(d.simple().len(), d.rank(), "{name}");
            for r in 0..d.len() {
                assert_eq!(d.dot(r, r), 2);
                assert_eq!(d.neg(d.neg(r)), r);
            }
        }
    }

    #[test]
    fn special_closed_examples() {
        let d = a3();
        let r = |i, j| d.pair_root(i, j).unwrap();
        assert!(d.is_special_closed(&[]));
        assert!(!d.is_special_closed(&[r(0, 1), r(1, 0)]));
        assert!(!d.is_special_closed(&[r(0, 1), r(1, 2)]));
        assert!(d.is_special_closed(&[r(0, 1), r(1, 2), r(0, 2)]));
    }

    #[test]
    fn extreme_root_examples() {
        let d = a3();
        let r = |i, j| d.pair_root(i, j).unwrap();
        assert_eq!(d.extreme_roots(&[r(0, 1)]).unwrap(), vec![r(0, 1)]);
        let mut e = d.extreme_roots(&[r(0, 1), r(1, 2), r(0, 2)]).unwrap();
        e.sort();
        let mut want = vec![r(0, 1), r(1, 2)];
        want.sort();
        assert_eq!(e, want);
        assert!(d.extreme_roots(&[r(0, 1), r(1, 2)]).is_err());
    }

    #[test]
    fn removing_extreme_keeps_special_closed() {
        let d = RootDatum::type_a(4).unwrap();
        let pos: Vec<usize> = (0..d.len()).filter(|&r| d.is_positive(r)).collect();
        // Every closed subset of the positive roots generated by two roots.
        for &a in &pos {
            for &b in &pos {
                let mut s = vec![a, b];
                if let Some(c) = d.add(a, b) {
                    s.push(c);
                }
                s.dedup();
                if !d.is_special_closed(&s) {
                    continue;
                }
                for x in d.extreme_roots(&s).unwrap() {
                    let rest: Vec<usize> = s.iter().copied().filter(|&y| y != x).collect();
                    assert!(d.is_special_closed(&rest));
                }
            }
        }
    }

    #[test]
    fn quotient_examples() {
        let d = a3();
        let r = |i, j| d.pair_root(i, j).unwrap();
        let q = d.quotient(&[]).unwrap();
        assert_eq!(q.classes.len(), 4);
        let q = d.quotient(&[r(0, 1), r(1, 0)]).unwrap();
        assert_eq!(q.classes, vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(q.quotient.as_ref().unwrap().name(), "A2");
        let q = d.quotient(&[r(0, 1), r(1, 0), r(2, 3), r(3, 2)]).unwrap();
        assert_eq!(q.classes, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(q.quotient.as_ref().unwrap().name(), "A1");
        assert!(d.quotient(&[r(0, 1)]).is_err());
    }

    #[test]
    fn staged_quotients_agree() {
        let d = RootDatum::type_a(4).unwrap();
        let r = |i, j| d.pair_root(i, j).unwrap();
        let psi = [r(0, 1), r(1, 0)];
        let big = [r(0, 1), r(1, 0), r(0, 2), r(2, 0), r(1, 2), r(2, 1)];
        let q1 = d.quotient(&psi).unwrap();
        let qd = q1.quotient.as_ref().unwrap();
        // In Φ/Ψ the image of e_1 − e_3 is e_{class 0} − e_{class 1}.
        let xi = [qd.pair_root(0, 1).unwrap(), qd.pair_root(1, 0).unwrap()];
        let q2 = qd.quotient(&xi).unwrap();
        let direct = d.quotient(&big).unwrap();
        let staged: Vec<Vec<usize>> = q2
            .classes
            .iter()
            .map(|c| {
                let mut v: Vec<usize> = c.iter().flat_map(|&k| q1.classes[k].clone()).collect();
                v.sort();
                v
            })
            .collect();
        assert_eq!(staged, direct.classes);
    }

    #[test]
    fn rank2_examples() {
        let d = a3();
        let r = |i, j| d.pair_root(i, j).unwrap();
        assert_eq!(d.rank2_type(r(0, 1), r(0, 1)), Rank2::Collinear);
        assert_eq!(d.rank2_type(r(0, 1), r(2, 3)), Rank2::A1xA1);
        assert_eq!(d.rank2_type(r(0, 1), r(1, 2)), Rank2::A2);
        assert_eq!(d.dot(r(0, 1), r(1, 2)), -1);
    }

    #[test]
    fn family_g_counts() {
        let a1 = RootDatum::type_a(1).unwrap();
        assert_eq!(a1.subsystem_family_g().len(), 1);
        let g = a3().subsystem_family_g();
        assert_eq!(g.iter().filter(|s| s.kind == SubsystemKind::A1).count(), 6);
        assert_eq!(g.iter().filter(|s| s.kind == SubsystemKind::A3).count(), 1);
    }

    #[test]
    fn d4_pairs_have_rank2_types() {
        let d = RootDatum::type_d(4).unwrap();
        for a in 0..d.len() {
            for b in 0..d.len() {
                let c = d.configuration(&[a, b]).unwrap();
                match d.rank2_type(a, b) {
                    Rank2::Collinear => assert_eq!(c, Config::A1),
                    Rank2::A1xA1 => assert_eq!(c, Config::A1xA1),
                    Rank2::A2 => assert_eq!(c, Config::A2),
                }
            }
        }
    }

    #[test]
    fn simple_coordinates_are_sign_coherent() {
        for name in ["A3", "D5", "E6", "E7"] {
            let d = RootDatum::parse(name).unwrap();
            for r in 0..d.len() {
                let c = d.simple_coords(r);
                assert!(c.iter().all(|&x| x >= 0) || c.iter().all(|&x| x <= 0));
                assert_eq!(c.iter().all(|&x| x >= 0), d.is_positive(r));
            }
            assert_eq!(d.dynkin_edges().len(), d.rank() - 1);
        }
    }
}
