use alloc::string::String;

/// Errors raised by the numerical kernels and optimizers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (|A - A^H|_F = {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("matrix is not unitary (|U^H U - I|_F = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("rank of rho_C ({rank}) exceeds d_A ({d_a}); the entropy-difference ceiling is unreachable")]
    RankTooLarge { rank: usize, d_a: usize },

    #[error("operation requires d_A = d_B, got {d_a} and {d_b}")]
    AsymmetricDims { d_a: usize, d_b: usize },

    #[error("cannot split {len} numbers into {k} sets")]
    TooFewNumbers { len: usize, k: usize },

    #[error("{len} numbers cannot fill {k_a} sets of {k_b}")]
    NotRectangular { len: usize, k_a: usize, k_b: usize },

    #[error("recurrent partitioning did not finish within {cap} iterations")]
    IterationCapExceeded { cap: usize },

    #[error("instance of {len} numbers exceeds the enumeration limit {max}")]
    InstanceTooLarge { len: usize, max: usize },

    #[error("exhaustive permutation search over {size} cells is refused (limit {max})")]
    TooLarge { size: usize, max: usize },

    #[error("operation requires d_A = d_B = 2, got {d_a}x{d_b}")]
    WrongDims { d_a: usize, d_b: usize },

    #[error("parameter length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigensolver failed to converge")]
    NoConvergence,
}

pub type Result<T> = core::result::Result<T, Error>;
