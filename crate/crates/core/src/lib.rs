//! Exact verification engine for presentations of relative Steinberg groups
//! over finite rings.

pub mod modular;
pub mod rings;
pub mod roots;
pub mod words;
pub mod eval;
pub mod elimination;
pub mod chevalley;
pub mod quotients;
pub mod config;
pub mod suite;

pub use modular::{Elem, ModSpan, Zm};
pub use rings::{Algebra, Context, FiniteRing, SemidirectRing};

/// Errors raised while building contexts or instances.
#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("invalid crossed module: {0}")]
    InvalidCrossedModule(String),
    #[error("element is not central")]
    NonCentral,
    #[error("invalid idempotent family: {0}")]
    InvalidFamily(String),
    #[error("element outside the expected Peirce component: {0}")]
    ComponentMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("fullness decomposition unavailable: {0}")]
    Fullness(String),
    #[error("root system: {0}")]
    Roots(String),
    #[error("config: {0}")]
    Config(String),
    #[error("presentation too large: {0} generators exceeds cap {1}")]
    TooLarge(usize, usize),
}

/// Derives an independent stream seed from a base seed, a tag and a counter.
pub fn derive_seed(seed: u64, tag: &str, k: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = seed ^ h.rotate_left(17) ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Version tag written into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;
