use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (‖M − M†‖_F = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is too small for this operation")]
    DimensionTooSmall(usize),

    #[error("invalid dimension {0}")]
    BadDimension(usize),

    #[error("invalid rank {rank} for dimension {dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("not a valid density matrix: {0}")]
    InvalidDensity(String),

    #[error("vector of norm {0} is not a unit vector")]
    NotUnitVector(f64),

    #[error("operators do not satisfy UV = e^(iΦ)VU for any single phase (residual {residual:.3e})")]
    NotWeylPair { residual: f64 },

    #[error("state is an eigenvector of the operator; decomposition is degenerate")]
    DegenerateDecomposition,

    #[error("bound denominator vanishes ({0:.3e})")]
    DegenerateDenominator(f64),

    #[error("states are not orthogonal (|⟨ψ|φ⟩| = {0:.3e})")]
    NotOrthogonal(f64),

    #[error("directions are parallel (|a·b| = 1)")]
    ParallelDirections,

    #[error("a variance vanishes ({0:.3e}); the critical-state equation is singular")]
    DegenerateVariance(f64),

    #[error("matrix is not unitary (‖M†M − I‖_F = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("bound `{name}` exceeds the uncertainty sum (slack {slack:.3e})")]
    BoundViolated { name: &'static str, slack: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
