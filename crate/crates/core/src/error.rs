use thiserror::Error;

/// Errors raised by system construction and the geometric operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CfsError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not self-adjoint (relative deviation {deviation:.3e})")]
    NotSelfAdjoint { deviation: f64 },

    #[error("point `{id}` has signature ({pos}, {neg}), exceeding spin dimension {n}")]
    SignatureBound {
        id: String,
        pos: usize,
        neg: usize,
        n: usize,
    },

    #[error("invalid weight {weight} for point `{id}`")]
    InvalidWeight { id: String, weight: f64 },

    #[error("universal measure has no point of positive weight")]
    NoPositiveWeight,

    #[error("empty system")]
    EmptySystem,

    #[error("point {index} is singular (rank {rank}, expected {expected})")]
    SingularPoint {
        index: usize,
        rank: usize,
        expected: usize,
    },

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("spin dimension {0} is not supported by this construction (requires n = 2)")]
    UnsupportedSpinDimension(usize),

    #[error("points {x} and {y} are not spin-connectable: {reason}")]
    NotSpinConnectable { x: usize, y: usize, reason: String },

    #[error("invalid Clifford subspace: {0}")]
    Clifford(String),

    #[error("no unitary intertwiner between the Clifford frames (residual {residual:.3e})")]
    NoIntertwiner { residual: f64 },

    #[error("no admissible phase maps the Clifford subspaces onto each other (best residual {best:.3e} at phi = {phi:.6})")]
    PhaseResidual { best: f64, phi: f64 },

    #[error("retraction left the manifold: eigenvalues {eigenvalues:?}")]
    LeftManifold { eigenvalues: Vec<f64> },

    #[error("tangent vector is based at point {found}, expected {expected}")]
    BaseMismatch { expected: usize, found: usize },

    #[error("the ball of radius {delta} around point {index} has zero measure")]
    EmptyBall { index: usize, delta: f64 },

    #[error("size {size} exceeds the cap of {cap} points")]
    SizeCap { size: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical failure: {0}")]
    Numeric(String),
}

/// Placeholder index for errors raised by operations on bare operators; the
/// system-level wrappers fill in the real indices.
pub const UNINDEXED: usize = usize::MAX;

impl CfsError {
    /// Replaces placeholder indices by `x` (first point) and `y` (second point).
    pub fn at_indices(self, x: usize, y: usize) -> Self {
        let fix = |i: usize, v: usize| if i == UNINDEXED { v } else { i };
        match self {
            CfsError::SingularPoint {
                index,
                rank,
                expected,
            } => CfsError::SingularPoint {
                index: fix(index, x),
                rank,
                expected,
            },
            CfsError::NotSpinConnectable { x: a, y: b, reason } => CfsError::NotSpinConnectable {
                x: fix(a, x),
                y: fix(b, y),
                reason,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, CfsError>;
