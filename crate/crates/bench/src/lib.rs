//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use relsteinberg::{Algebra, Context, Elem, FiniteRing};

/// `Mat(size, Z/m)` with diagonal idempotents and `A = Mat(size, gZ/m)`.
pub fn matrix_context(size: usize, m: u64, g: u64) -> Arc<Context> {
    let k = Arc::new(FiniteRing::cyclic(m).expect("modulus"));
    let alg = Algebra::ideal(k, &[Elem(vec![g])]).expect("ideal");
    Arc::new(Context::matrix(size, &alg).expect("context"))
}

/// A deterministic pseudo-random integer matrix with entries in `[-3, 3]`.
pub fn small_matrix(rows: usize, cols: usize, seed: u64) -> Vec<Vec<i64>> {
    let mut s = seed;
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((s >> 33) % 7) as i64 - 3
                })
                .collect()
        })
        .collect()
}
