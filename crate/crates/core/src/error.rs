use thiserror::Error;

/// Errors produced by the numerical-range toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point with modulus {modulus} is not inside the open unit disk")]
    OutsideDisk { modulus: f64 },

    #[error("the fixed point must be non-zero for this construction")]
    ZeroFixedPoint,

    #[error("order must be at least 2, got {0}")]
    InvalidOrder(u32),

    #[error("multiplier index {k} does not generate a map of order {p}")]
    NotPrimitive { k: u32, p: u32 },

    #[error("symbol has order {actual}, expected {expected}")]
    WrongOrder { expected: u32, actual: u32 },

    #[error("degenerate Moebius matrix (relative determinant {det:e})")]
    DegenerateMoebius { det: f64 },

    #[error("pole of modulus {modulus} lies in the closed unit disk")]
    PoleInDisk { modulus: f64 },

    #[error("truncation orders differ: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("non-finite coefficient at index {0}")]
    NonFinite(usize),

    #[error("zero vector where a non-zero vector is required")]
    ZeroVector,

    #[error("expected a unit vector, got norm {0}")]
    NotUnit(f64),

    #[error("eigensolver did not converge (best residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("support sweep failed at angle {alpha}: {message}")]
    SweepFailed { alpha: f64, message: String },

    #[error("support lines {index} and {next} are nearly parallel (angle gap {gap:e})")]
    ParallelSupportLines { index: usize, next: usize, gap: f64 },

    #[error("angle grid is not closed under rotation by 2pi/{p}")]
    GridNotShiftClosed { p: u32 },

    #[error("no sign change of the determinant on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("root failed the unsquared residual check (residual {residual:e})")]
    ResidualCheck { residual: f64 },

    #[error("degenerate angle: lambda^2 + lambda*zeta + zeta^2 vanishes")]
    DegenerateAngle,

    #[error("envelope derivative denominator {0:e} is too small")]
    SingularEnvelope(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
