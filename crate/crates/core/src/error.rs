use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("h and v have different degrees ({0} vs {1})")]
    DegreeMismatch(usize, usize),

    #[error("permutation pair does not act transitively")]
    NotTransitive,

    #[error("surface has genus {0}, expected 2")]
    NotGenusTwo(usize),

    #[error("surface is not reduced")]
    NotReduced,

    #[error("inter-zero vector has order {order} in Z^2/Lambda but the index is {index}")]
    CyclicQuotient { order: u64, index: u64 },

    #[error("no seed propagates to a consistent hyperelliptic involution")]
    NoInvolution,

    #[error("found {0} Weierstrass points instead of 6")]
    WeierstrassCount(usize),

    #[error("generators do not span a full-rank lattice")]
    DegenerateLattice,

    #[error("degree {n} exceeds the configured bound {bound}")]
    BoundExceeded { n: usize, bound: usize },

    #[error("census is not closed under the SL2(Z) action")]
    NotActionClosed,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("product has degree {0}, above the cap of 3")]
    DegreeCap(usize),

    #[error("expected a homogeneous expression of degree {expected}")]
    NonHomogeneous { expected: usize },

    #[error("matrix does not preserve the polarized module: {0}")]
    NotInGroup(String),

    #[error("theta series does not converge: {0}")]
    NonConvergent(String),

    #[error("corrupt cache {path}: {reason}")]
    CorruptCache { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
