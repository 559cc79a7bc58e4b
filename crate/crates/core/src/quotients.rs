//! The transvection quotient: an abelian presentation of the relative group
//! modulo the image of the unrelativized one, reduced by Smith normal form.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chevalley::{ChevGen, ChevalleyEngine, StructureConstants};
use crate::modular::{syzygies, Elem, ModSpan};
use crate::rings::{Algebra, Context};
use crate::words::{Catalog, Gen, RelId, Word};
use crate::Error;

/// Default cap on the number of generators (matrix columns).
pub const DEFAULT_GENERATOR_CAP: usize = 5000;

/// Which catalog the presentation models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Linear,
    Chevalley,
}

/// Home of a generator family: an index pair or a root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockKey {
    Pair(usize, usize),
    Root(usize),
}

#[derive(Clone, Debug)]
struct Block {
    key: BlockKey,
    a_basis: Vec<Elem>,
    a_solver: ModSpan,
    p_basis: Vec<Elem>,
    p_solver: ModSpan,
    offset: usize,
}

impl Block {
    fn new(key: BlockKey, m: u64, a_basis: Vec<Elem>, a_dim: usize, p_basis: Vec<Elem>, p_dim: usize) -> Self {
        let a_solver = ModSpan::tracking_from_gens(m, a_dim, &a_basis);
        let p_solver = ModSpan::tracking_from_gens(m, p_dim, &p_basis);
        Block { key, a_basis, a_solver, p_basis, p_solver, offset: 0 }
    }

    fn width(&self) -> usize {
        self.a_basis.len() * self.p_basis.len()
    }

    fn col(&self, s: usize, t: usize) -> usize {
        self.offset + s * self.p_basis.len() + t
    }
}

/// Column labels and the integer relation matrix of the FT group.
#[derive(Clone, Debug)]
pub struct AbelianPresentation {
    modulus: u64,
    blocks: Vec<Block>,
    index: HashMap<BlockKey, usize>,
    cols: usize,
    pub rows: Vec<Vec<i64>>,
    seen: HashSet<Vec<i64>>,
}

impl AbelianPresentation {
    fn from_blocks(modulus: u64, mut blocks: Vec<Block>, cap: usize) -> Result<Self, Error> {
        let mut off = 0;
        for b in blocks.iter_mut() {
            b.offset = off;
            off += b.width();
        }
        if off > cap {
            return Err(Error::TooLarge(off, cap));
        }
        let index = blocks.iter().enumerate().map(|(t, b)| (b.key, t)).collect();
        let mut p = AbelianPresentation { modulus, blocks, index, cols: off, rows: Vec::new(), seen: HashSet::new() };
        p.add_tensor_relations();
        Ok(p)
    }

    pub fn generator_count(&self) -> usize {
        self.cols
    }

    pub fn relation_count(&self) -> usize {
        self.rows.len()
    }

    /// Syzygies and torsion of both tensor factors.
    fn add_tensor_relations(&mut self) {
        let m = self.modulus;
        let mut rows = Vec::new();
        for b in &self.blocks {
            let dim_a = b.a_basis.first().map_or(0, |x| x.dim());
            let dim_p = b.p_basis.first().map_or(0, |x| x.dim());
            let mut sa = syzygies(m, dim_a, &b.a_basis);
            sa.extend((0..b.a_basis.len()).map(|s| (0..b.a_basis.len()).map(|u| if u == s { m } else { 0 }).collect()));
            let mut sp = syzygies(m, dim_p, &b.p_basis);
            sp.extend((0..b.p_basis.len()).map(|t| (0..b.p_basis.len()).map(|u| if u == t { m } else { 0 }).collect()));
            for syz in &sa {
                for t in 0..b.p_basis.len() {
                    let mut row = vec![0i64; self.cols];
                    for (s, &c) in syz.iter().enumerate() {
                        row[b.col(s, t)] = c as i64;
                    }
                    rows.push(row);
                }
            }
            for syz in &sp {
                for s in 0..b.a_basis.len() {
                    let mut row = vec![0i64; self.cols];
                    for (t, &c) in syz.iter().enumerate() {
                        row[b.col(s, t)] = c as i64;
                    }
                    rows.push(row);
                }
            }
        }
        for r in rows {
            if r.iter().any(|&x| x != 0) && self.seen.insert(r.clone()) {
                self.rows.push(r);
            }
        }
    }

    /// Coordinates of `z̄(a, p)` in block `key`.
    pub fn z_vector(&self, key: BlockKey, a: &Elem, p: &Elem) -> Result<Vec<i64>, Error> {
        let b = &self.blocks[*self
            .index
            .get(&key)
            .ok_or_else(|| Error::Precondition(format!("no generators at {key:?}")))?];
        let ca = b
            .a_solver
            .solve(a)
            .ok_or_else(|| Error::ComponentMismatch(format!("payload outside the block {key:?}")))?;
        let cp = b
            .p_solver
            .solve(p)
            .ok_or_else(|| Error::ComponentMismatch(format!("parameter outside the block {key:?}")))?;
        let mut v = vec![0i64; self.cols];
        let m = self.modulus as i64;
        for (s, &x) in ca.iter().enumerate() {
            for (t, &y) in cp.iter().enumerate() {
                v[b.col(s, t)] = (x as i64 * y as i64) % m;
            }
        }
        Ok(v)
    }

    fn push_combo(&mut self, terms: &[(i64, BlockKey, Elem, Elem)]) -> Result<(), Error> {
        let mut row = vec![0i64; self.cols];
        for (c, key, a, p) in terms {
            for (r, x) in row.iter_mut().zip(self.z_vector(*key, a, p)?) {
                *r += c * x;
            }
        }
        if row.iter().any(|&x| x != 0) && self.seen.insert(row.clone()) {
            self.rows.push(row);
        }
        Ok(())
    }

    /// A copy whose rows generate the same lattice with none implied by the
    /// others. Single-entry rows are tried first so that mixed relations
    /// survive.
    pub fn irredundant(&self) -> AbelianPresentation {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| self.rows[r].iter().filter(|&&x| x != 0).count());
        let mut keep = vec![true; self.rows.len()];
        for r in order {
            keep[r] = false;
            let others: Vec<Vec<i64>> = (0..self.rows.len()).filter(|&t| keep[t]).map(|t| self.rows[t].clone()).collect();
            if !smith_normal_form(&others, self.cols).in_row_lattice(&self.rows[r]) {
                keep[r] = true;
            }
        }
        let mut out = self.clone();
        out.rows = (0..self.rows.len()).filter(|&t| keep[t]).map(|t| self.rows[t].clone()).collect();
        out.seen = out.rows.iter().cloned().collect();
        out
    }

    /// A copy with columns and rows reordered by the given permutations.
    pub fn permuted(&self, col_perm: &[usize], row_perm: &[usize]) -> Vec<Vec<i64>> {
        row_perm
            .iter()
            .map(|&r| {
                let src = &self.rows[r];
                col_perm.iter().map(|&c| src[c]).collect()
            })
            .collect()
    }
}

/// Presentation of the linear FT group over a context.
pub fn ft_presentation(ctx: &Context, cap: usize) -> Result<AbelianPresentation, Error> {
    let n = ctx.n();
    let m = ctx.ring().modulus();
    let (ad, rd) = (ctx.alg().dim(), ctx.ring().dim());
    let mut blocks = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                blocks.push(Block::new(
                    BlockKey::Pair(i, j),
                    m,
                    ctx.a_component(i, j).basis(),
                    ad,
                    ctx.r_component(j, i).basis(),
                    rd,
                ));
            }
        }
    }
    let mut pres = AbelianPresentation::from_blocks(m, blocks, cap)?;
    let alg = ctx.alg();
    let ring = ctx.ring();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let key = BlockKey::Pair(i, j);
            let p_basis = ctx.r_component(j, i).basis();
            let a_basis = ctx.a_component(i, j).basis();
            // FT3: products (e_i x)(y e_j)
            let mut prods = ModSpan::new(m, ad);
            for x in alg.generators() {
                for y in alg.generators() {
                    prods.insert(&alg.mul(&alg.lmul(ctx.idempotent(i), x), &alg.rmul(y, ctx.idempotent(j))));
                }
            }
            for w in prods.basis() {
                for p in &p_basis {
                    pres.push_combo(&[(1, key, w.clone(), p.clone())])?;
                }
            }
            // FT4: parameters d(b) with b in e_jAe_i
            let ds = ModSpan::from_gens(m, rd, &ctx.a_component(j, i).basis().iter().map(|b| ctx.d(b)).collect::<Vec<_>>());
            for a in &a_basis {
                for p in ds.basis() {
                    pres.push_combo(&[(1, key, a.clone(), p)])?;
                }
            }
            // FT5 through every third index
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                for a in &a_basis {
                    for p in ctx.r_component(j, k).basis() {
                        for q in ctx.r_component(k, i).basis() {
                            pres.push_combo(&[
                                (1, key, a.clone(), ring.mul(&p, &q)),
                                (-1, BlockKey::Pair(i, k), alg.rmul(a, &p), q.clone()),
                                (-1, BlockKey::Pair(k, j), alg.lmul(&q, a), p.clone()),
                            ])?;
                        }
                    }
                }
            }
        }
    }
    Ok(pres)
}

/// Presentation of the simply laced FT group with scalars `K` and ideal `𝔞`.
pub fn ft_presentation_chevalley(consts: &StructureConstants, base: &Algebra, cap: usize) -> Result<AbelianPresentation, Error> {
    let d = consts.datum();
    if d.rank() < 3 {
        return Err(Error::Roots("the simply laced quotient needs rank at least 3".into()));
    }
    let k = base.ring();
    let m = k.modulus();
    let a_basis = base.span().basis();
    let p_basis = k.span().basis();
    let blocks = (0..d.len())
        .map(|r| Block::new(BlockKey::Root(r), m, a_basis.clone(), base.dim(), p_basis.clone(), k.dim()))
        .collect();
    let mut pres = AbelianPresentation::from_blocks(m, blocks, cap)?;
    let prods = ModSpan::from_gens(m, base.dim(), &a_basis.iter().flat_map(|x| a_basis.iter().map(|y| base.mul(x, y))).collect::<Vec<_>>());
    let ds = ModSpan::from_gens(
        m,
        k.dim(),
        &a_basis.iter().map(|b| base.d(b).unwrap_or_else(|| k.zero())).collect::<Vec<_>>(),
    );
    for r in 0..d.len() {
        let key = BlockKey::Root(r);
        for w in prods.basis() {
            for p in &p_basis {
                pres.push_combo(&[(1, key, w.clone(), p.clone())])?;
            }
        }
        for a in &a_basis {
            for p in ds.basis() {
                pres.push_combo(&[(1, key, a.clone(), p)])?;
            }
        }
    }
    for al in 0..d.len() {
        for be in 0..d.len() {
            let Some(ab) = d.add(al, be) else { continue };
            for a in &a_basis {
                for p in &p_basis {
                    for q in &p_basis {
                        pres.push_combo(&[
                            (1, BlockKey::Root(ab), a.clone(), k.mul(p, q)),
                            (-1, BlockKey::Root(al), base.rmul(a, p), q.clone()),
                            (-1, BlockKey::Root(be), base.lmul(q, a), p.clone()),
                        ])?;
                    }
                }
            }
        }
    }
    Ok(pres)
}

/// `U·M·V = D` with `U`, `V` unimodular and `D` diagonal with a divisibility chain.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
    pub diag: Vec<BigInt>,
    pub rows: usize,
    pub cols: usize,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j))).collect()).collect()
}

fn lift(matrix: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    matrix.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn row_axpy(m: &mut [Vec<BigInt>], dst: usize, c: &BigInt, src: usize) {
    if c.is_zero() {
        return;
    }
    let s = m[src].clone();
    for (d, x) in m[dst].iter_mut().zip(s.iter()) {
        *d += c * x;
    }
}

fn col_axpy(m: &mut [Vec<BigInt>], dst: usize, c: &BigInt, src: usize) {
    if c.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let t = c * &row[src];
        row[dst] += t;
    }
}

fn col_swap(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Quotient rounded to the nearest integer, so the remainder is at most half the divisor.
fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if (r.magnitude() << 1) > *b.magnitude() {
        if b.is_positive() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Smith normal form of an integer matrix with transform accumulation.
pub fn smith_normal_form(matrix: &[Vec<i64>], cols: usize) -> Snf {
    let rows = matrix.len();
    let mut d = lift(matrix);
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in d.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.magnitude() < d[bi][bj].magnitude()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        col_swap(&mut d, t, pj);
        col_swap(&mut v, t, pj);
        loop {
            // reduce the pivot row and column with symmetric remainders
            for i in t + 1..rows {
                if !d[i][t].is_zero() {
                    let q = -nearest_quotient(&d[i][t], &d[t][t]);
                    row_axpy(&mut d, i, &q, t);
                    row_axpy(&mut u, i, &q, t);
                }
            }
            for j in t + 1..cols {
                if !d[t][j].is_zero() {
                    let q = -nearest_quotient(&d[t][j], &d[t][t]);
                    col_axpy(&mut d, j, &q, t);
                    col_axpy(&mut v, j, &q, t);
                }
            }
            // a nonzero remainder is smaller than the pivot and replaces it
            let col_rem = (t + 1..rows).filter(|&i| !d[i][t].is_zero()).min_by(|&a, &b| d[a][t].magnitude().cmp(d[b][t].magnitude()));
            let row_rem = (t + 1..cols).filter(|&j| !d[t][j].is_zero()).min_by(|&a, &b| d[t][a].magnitude().cmp(d[t][b].magnitude()));
            match (col_rem, row_rem) {
                (Some(i), Some(j)) if d[t][j].magnitude() < d[i][t].magnitude() => {
                    col_swap(&mut d, t, j);
                    col_swap(&mut v, t, j);
                    continue;
                }
                (Some(i), _) => {
                    d.swap(t, i);
                    u.swap(t, i);
                    continue;
                }
                (None, Some(j)) => {
                    col_swap(&mut d, t, j);
                    col_swap(&mut v, t, j);
                    continue;
                }
                (None, None) => {}
            }
            // enforce divisibility into the trailing block
            let p = d[t][t].clone();
            let bad = (t + 1..rows).find(|&i| d[i].iter().skip(t + 1).any(|x| !(x % &p).is_zero()));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    row_axpy(&mut d, t, &one, i);
                    row_axpy(&mut u, t, &one, i);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
        diag.push(d[t][t].clone());
        t += 1;
    }
    Snf { u, v, diag, rows, cols }
}

fn matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>], inner: usize, out_cols: usize) -> Vec<Vec<BigInt>> {
    a.iter()
        .map(|row| {
            (0..out_cols)
                .map(|j| (0..inner).filter(|&k| !row[k].is_zero()).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Invariant factors greater than one.
    pub fn invariant_factors(&self) -> Vec<u64> {
        self.diag
            .iter()
            .filter(|x| !x.is_one())
            .map(|x| x.to_u64().expect("invariant factor fits in u64"))
            .collect()
    }

    pub fn free_rank(&self) -> usize {
        self.cols - self.rank()
    }

    /// Recomputes `U·M·V` and compares it with the diagonal form; also
    /// checks the divisibility chain.
    pub fn certify(&self, matrix: &[Vec<i64>]) -> bool {
        let um = matmul(&self.u, &lift(matrix), self.rows, self.cols);
        let umv = matmul(&um, &self.v, self.cols, self.cols);
        let diag_ok = umv.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, x)| match self.diag.get(i) {
                Some(di) if i == j => x == di,
                _ => x.is_zero(),
            })
        });
        let chain_ok = self.diag.windows(2).all(|w| (&w[1] % &w[0]).is_zero());
        diag_ok && chain_ok
    }

    /// Whether a vector lies in the row lattice of the reduced matrix.
    pub fn in_row_lattice(&self, x: &[i64]) -> bool {
        (0..self.cols).all(|j| {
            let y: BigInt = (0..self.cols).filter(|&k| x[k] != 0).map(|k| BigInt::from(x[k]) * &self.v[k][j]).sum();
            match self.diag.get(j) {
                Some(dj) => (y % dj).is_zero(),
                None => y.is_zero(),
            }
        })
    }
}

/// Summary record of an FT computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FtSummary {
    pub schema_version: u32,
    pub fingerprint: String,
    pub scope: Scope,
    pub generator_count: usize,
    pub relation_count: usize,
    pub invariant_factors: Vec<u64>,
    pub free_rank: usize,
    pub certified: bool,
}

/// A presentation together with its certified Smith form.
#[derive(Clone, Debug)]
pub struct FtGroup {
    pub presentation: AbelianPresentation,
    pub snf: Snf,
    pub certified: bool,
}

impl FtGroup {
    pub fn new(presentation: AbelianPresentation) -> Result<Self, Error> {
        let snf = smith_normal_form(&presentation.rows, presentation.cols);
        let certified = snf.certify(&presentation.rows);
        Ok(FtGroup { presentation, snf, certified })
    }

    pub fn is_trivial(&self) -> bool {
        self.snf.invariant_factors().is_empty() && self.snf.free_rank() == 0
    }

    pub fn summary(&self, fingerprint: String, scope: Scope) -> FtSummary {
        FtSummary {
            schema_version: crate::SCHEMA_VERSION,
            fingerprint,
            scope,
            generator_count: self.presentation.generator_count(),
            relation_count: self.presentation.relation_count(),
            invariant_factors: self.snf.invariant_factors(),
            free_rank: self.snf.free_rank(),
            certified: self.certified,
        }
    }

    /// Image of a linear word: `z` letters map to generator classes, outer
    /// letters to zero.
    pub fn image_linear(&self, w: &Word<Gen>) -> Result<Vec<i64>, Error> {
        let mut acc = vec![0i64; self.presentation.cols];
        for l in w.letters() {
            if let Gen::Z { i, j, a, p } = &l.sym {
                let v = self.presentation.z_vector(BlockKey::Pair(*i, *j), a, p)?;
                let s = if l.inv { -1 } else { 1 };
                for (x, y) in acc.iter_mut().zip(v) {
                    *x += s * y;
                }
            }
        }
        Ok(acc)
    }

    pub fn image_chevalley(&self, w: &Word<ChevGen>) -> Result<Vec<i64>, Error> {
        let mut acc = vec![0i64; self.presentation.cols];
        for l in w.letters() {
            if let ChevGen::Z { root, a, p } = &l.sym {
                let v = self.presentation.z_vector(BlockKey::Root(*root), a, p)?;
                let s = if l.inv { -1 } else { 1 };
                for (x, y) in acc.iter_mut().zip(v) {
                    *x += s * y;
                }
            }
        }
        Ok(acc)
    }

    /// Whether both sides of a relation have the same image.
    pub fn kills(&self, lhs: &[i64], rhs: &[i64]) -> bool {
        let diff: Vec<i64> = lhs.iter().zip(rhs).map(|(a, b)| a - b).collect();
        self.snf.in_row_lattice(&diff)
    }
}

/// Outcome of pushing sampled relation instances through the quotient map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientCheck {
    pub checked: usize,
    /// `(relation, sample index)` of every instance with a nonzero image.
    pub failures: Vec<(String, usize)>,
}

impl QuotientCheck {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that sampled linear relation instances die in the FT group.
pub fn verify_quotient_map(ctx: &Context, group: &FtGroup, ids: &[RelId], samples: usize, seed: u64) -> Result<QuotientCheck, Error> {
    let cat = Catalog::new(ctx);
    let mut out = QuotientCheck { checked: 0, failures: Vec::new() };
    for &id in ids {
        for (t, inst) in cat.random_instances(id, samples, seed)?.iter().enumerate() {
            out.checked += 1;
            if !group.kills(&group.image_linear(&inst.lhs)?, &group.image_linear(&inst.rhs)?) {
                out.failures.push((id.name().to_string(), t));
            }
        }
    }
    Ok(out)
}

/// Chevalley counterpart of [`verify_quotient_map`].
pub fn verify_quotient_map_chevalley(
    engine: &ChevalleyEngine,
    group: &FtGroup,
    ids: &[RelId],
    samples: usize,
    seed: u64,
) -> Result<QuotientCheck, Error> {
    let cat = engine.catalog();
    let mut out = QuotientCheck { checked: 0, failures: Vec::new() };
    for &id in ids {
        for (t, inst) in cat.random_instances(id, samples, seed)?.iter().enumerate() {
            out.checked += 1;
            if !group.kills(&group.image_chevalley(&inst.lhs)?, &group.image_chevalley(&inst.rhs)?) {
                out.failures.push((id.name().to_string(), t));
            }
        }
    }
    Ok(out)
}

/// Stable hash of a context's defining data.
pub fn context_fingerprint(ctx: &Context) -> String {
    let ring = ctx.ring();
    let alg = ctx.alg();
    let mut h = Sha256::new();
    h.update(ring.modulus().to_le_bytes());
    h.update((ring.dim() as u64).to_le_bytes());
    h.update((alg.dim() as u64).to_le_bytes());
    let feed = |h: &mut Sha256, e: &Elem| {
        for x in &e.0 {
            h.update(x.to_le_bytes());
        }
    };
    for e in ctx.family() {
        feed(&mut h, e);
    }
    let rb: Vec<Elem> = (0..ring.dim()).map(|i| Elem::unit_vector(ring.dim(), i)).collect();
    let ab: Vec<Elem> = (0..alg.dim()).map(|i| Elem::unit_vector(alg.dim(), i)).collect();
    for x in &rb {
        for y in &rb {
            feed(&mut h, &ring.mul(x, y));
        }
    }
    for a in alg.generators() {
        for p in &rb {
            feed(&mut h, &alg.lmul(p, a));
            feed(&mut h, &alg.rmul(a, p));
        }
        for b in &ab {
            feed(&mut h, &alg.mul(a, b));
        }
        feed(&mut h, &ctx.d(a));
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::default_orientation;
    use crate::rings::FiniteRing;
    use crate::roots::RootDatum;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn ideal_ctx(size: usize, m: u64, g: u64) -> Context {
        let k = Arc::new(FiniteRing::cyclic(m).unwrap());
        let alg = Algebra::ideal(k, &[Elem(vec![g])]).unwrap();
        Context::matrix(size, &alg).unwrap()
    }

    #[test]
    fn snf_small_cases() {
        let z = smith_normal_form(&[vec![0, 0], vec![0, 0]], 2);
        assert!(z.invariant_factors().is_empty());
        assert_eq!(z.free_rank(), 2);
        let d = smith_normal_form(&[vec![2, 0], vec![0, 4]], 2);
        assert_eq!(d.invariant_factors(), vec![2, 4]);
        let m = vec![vec![2, 0], vec![0, 3]];
        let s = smith_normal_form(&m, 2);
        assert_eq!(s.invariant_factors(), vec![6]);
        assert!(s.certify(&m));
    }

    #[test]
    fn snf_certifies_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let m: Vec<Vec<i64>> = (0..20).map(|_| (0..30).map(|_| rng.gen_range(-3..=3)).collect()).collect();
            let s = smith_normal_form(&m, 30);
            assert!(s.certify(&m));
            // every row lies in its own lattice, a unit vector usually does not
            for r in &m {
                assert!(s.in_row_lattice(r));
            }
        }
    }

    #[test]
    fn trivial_cases() {
        let k = Arc::new(FiniteRing::cyclic(4).unwrap());
        let zero = Algebra::trivial(k.clone()).unwrap();
        let c = Context::matrix(3, &zero).unwrap();
        let g = FtGroup::new(ft_presentation(&c, DEFAULT_GENERATOR_CAP).unwrap()).unwrap();
        assert_eq!(g.presentation.generator_count(), 0);
        assert!(g.is_trivial());
        let full = ideal_ctx(3, 4, 1);
        let g = FtGroup::new(ft_presentation(&full, DEFAULT_GENERATOR_CAP).unwrap()).unwrap();
        assert!(g.certified && g.is_trivial());
    }

    #[test]
    fn z4_mod_2_linear_and_chevalley_agree() {
        let c = ideal_ctx(4, 4, 2);
        let g = FtGroup::new(ft_presentation(&c, DEFAULT_GENERATOR_CAP).unwrap()).unwrap();
        assert!(g.certified);
        assert_eq!(g.snf.invariant_factors(), vec![2, 2, 2]);
        assert_eq!(g.snf.free_rank(), 0);
        let d = Arc::new(RootDatum::parse("A3").unwrap());
        let consts = StructureConstants::build(d.clone(), default_orientation(&d)).unwrap();
        let k = Arc::new(FiniteRing::cyclic(4).unwrap());
        let base = Algebra::ideal(k, &[Elem(vec![2])]).unwrap();
        let gc = FtGroup::new(ft_presentation_chevalley(&consts, &base, DEFAULT_GENERATOR_CAP).unwrap()).unwrap();
        assert_eq!(gc.snf.invariant_factors(), vec![2, 2, 2]);
    }

    #[test]
    fn permuted_bases_give_same_factors() {
        let c = ideal_ctx(4, 4, 2);
        let p = ft_presentation(&c, DEFAULT_GENERATOR_CAP).unwrap();
        let base = smith_normal_form(&p.rows, p.generator_count()).invariant_factors();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let mut cp: Vec<usize> = (0..p.generator_count()).collect();
            let mut rp: Vec<usize> = (0..p.relation_count()).collect();
            cp.shuffle(&mut rng);
            rp.shuffle(&mut rng);
            let m = p.permuted(&cp, &rp);
            let s = smith_normal_form(&m, p.generator_count());
            assert!(s.certify(&m));
            assert_eq!(s.invariant_factors(), base);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let c = ideal_ctx(4, 8, 2);
        assert!(matches!(ft_presentation(&c, 5), Err(Error::TooLarge(_, 5))));
    }

    #[test]
    fn defining_relations_vanish() {
        let c = ideal_ctx(4, 8, 2);
        let g = FtGroup::new(ft_presentation(&c, DEFAULT_GENERATOR_CAP).unwrap()).unwrap();
        let cat = Catalog::new(&c);
        for id in RelId::linear() {
            for inst in cat.random_instances(id, 20, 4).unwrap() {
                let (l, r) = (g.image_linear(&inst.lhs).unwrap(), g.image_linear(&inst.rhs).unwrap());
                assert!(g.kills(&l, &r), "{id}");
            }
        }
        // x letters are zero: z̄(a, 0) has no coordinates
        let a = crate::rings::mat::entry(4, 1, 0, 1, &Elem(vec![2]));
        assert!(g.image_linear(&cat.x(0, 1, &a)).unwrap().iter().all(|&x| x == 0));
    }

    #[test]
    fn dropping_relations_exposes_conj2() {
        let c = ideal_ctx(4, 8, 2);
        let full = ft_presentation(&c, DEFAULT_GENERATOR_CAP).unwrap();
        let p = full.irredundant();
        assert!(p.relation_count() < full.relation_count());
        let same = FtGroup::new(p.clone()).unwrap();
        assert_eq!(same.snf.invariant_factors(), FtGroup::new(full).unwrap().snf.invariant_factors());
        let insts = Catalog::new(&c).random_instances(RelId::Conj2, 300, 8).unwrap();
        let mut exposed = false;
        for drop in (0..p.relation_count()).rev() {
            let mut q = p.clone();
            q.rows.remove(drop);
            let g = FtGroup::new(q).unwrap();
            for inst in &insts {
                let (l, r) = (g.image_linear(&inst.lhs).unwrap(), g.image_linear(&inst.rhs).unwrap());
                if !g.kills(&l, &r) {
                    exposed = true;
                    break;
                }
            }
            if exposed {
                break;
            }
        }
        assert!(exposed);
    }

    #[test]
    fn chevalley_relations_vanish() {
        let d = Arc::new(RootDatum::parse("A3").unwrap());
        let consts = StructureConstants::build(d.clone(), default_orientation(&d)).unwrap();
        let k = Arc::new(FiniteRing::cyclic(8).unwrap());
        let base = Arc::new(Algebra::ideal(k, &[Elem(vec![2])]).unwrap());
        let g = FtGroup::new(ft_presentation_chevalley(&consts, &base, DEFAULT_GENERATOR_CAP).unwrap()).unwrap();
        let eng = ChevalleyEngine::new(consts, base).unwrap();
        for id in crate::chevalley::chevalley_ids() {
            for inst in eng.catalog().random_instances(id, 10, 3).unwrap() {
                let (l, r) = (g.image_chevalley(&inst.lhs).unwrap(), g.image_chevalley(&inst.rhs).unwrap());
                assert!(g.kills(&l, &r), "{id}");
            }
        }
    }

    #[test]
    fn hw_images_vanish() {
        let c = ideal_ctx(4, 8, 2);
        let g = FtGroup::new(ft_presentation(&c, DEFAULT_GENERATOR_CAP).unwrap()).unwrap();
        let r = verify_quotient_map(&c, &g, &[RelId::Hw], 500, 21).unwrap();
        assert_eq!(r.checked, 500);
        assert!(r.pass(), "{:?}", r.failures);
    }

    #[test]
    fn ft5_through_different_middle_indices_agree() {
        let c = ideal_ctx(4, 8, 2);
        let g = FtGroup::new(ft_presentation(&c, DEFAULT_GENERATOR_CAP).unwrap()).unwrap();
        let e = |a, b, x: u64| crate::rings::mat::entry(4, 1, a, b, &Elem(vec![x]));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let (x, y, z) = (2 * rng.gen_range(0..4), rng.gen_range(0..8), rng.gen_range(0..8));
            let a = e(0, 1, x);
            let via = |k: usize| {
                let (p, q) = (e(1, k, y), e(k, 0, z));
                let alg = c.alg();
                let mut v = g.presentation.z_vector(BlockKey::Pair(0, k), &alg.rmul(&a, &p), &q).unwrap();
                let w = g.presentation.z_vector(BlockKey::Pair(k, 1), &alg.lmul(&q, &a), &p).unwrap();
                v.iter_mut().zip(w).for_each(|(s, t)| *s += t);
                v
            };
            assert!(g.kills(&via(2), &via(3)));
        }
    }

    #[test]
    fn conjugating_by_outer_words_is_invisible() {
        let c = ideal_ctx(4, 8, 2);
        let g = FtGroup::new(ft_presentation(&c, DEFAULT_GENERATOR_CAP).unwrap()).unwrap();
        let cat = Catalog::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let z = Word::product((0..3).map(|_| Word::gen(cat.random_symbol(false, &mut rng))));
            let h = Word::product((0..3).map(|_| Word::gen(cat.random_symbol(true, &mut rng))));
            let conj = Word::conj(&h, &z);
            assert!(g.kills(&g.image_linear(&conj).unwrap(), &g.image_linear(&z).unwrap()));
        }
    }

    #[test]
    fn fingerprint_is_stable_and_discriminating() {
        let a = context_fingerprint(&ideal_ctx(3, 4, 2));
        assert_eq!(a, context_fingerprint(&ideal_ctx(3, 4, 2)));
        assert_ne!(a, context_fingerprint(&ideal_ctx(3, 4, 1)));
        assert_eq!(a.len(), 64);
    }
}
