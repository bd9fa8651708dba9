use crate::matrix::Permutation;
use thiserror::Error;

/// Everything that can go wrong while decomposing, evolving, or rebuilding a flow.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("matrix is numerically singular")]
    SingularInput,

    #[error("leading principal minor {0} vanishes")]
    ZeroMinor(usize),

    #[error("spectrum has an eigenvalue with imaginary part {imag:.3e}")]
    ComplexSpectrum { imag: f64 },

    #[error("eigenvalues {index} and {next} are separated by only {gap:.3e}", next = index + 1)]
    DegenerateSpectrum { index: usize, gap: f64 },

    #[error("eigenvalue {value:.6e} is not positive")]
    NonpositiveSpectrum { value: f64 },

    #[error("matrix is not in the chart of {pi}: leading minor {minor} of the eigenvector frame vanishes")]
    NotInChart { pi: Permutation, minor: usize },

    #[error("flow exponent {exponent:.3e} leaves the representable range")]
    Overflow { exponent: f64 },

    #[error("function values are not strictly decreasing along the chart diagonal")]
    OrderMismatch,

    #[error("anchor coordinate is zero; the straight-line chart is undefined there")]
    ZeroAnchor,

    #[error("function is not strictly monotonic on the spectrum")]
    NonmonotonicFunction,

    #[error("singular values {index} and {next} are separated by only {gap:.3e}", next = index + 1)]
    DegenerateSingularValues { index: usize, gap: f64 },

    #[error("matrix is not in the singular-value chart of ({pi}, {rho})")]
    NotInSvdChart { pi: Permutation, rho: Permutation },

    #[error("evolved conjugator deviates from unit lower triangular by {deviation:.3e}")]
    NonUnitConjugator { deviation: f64 },

    #[error("operation supports n <= {max}, got n = {n}")]
    UnsupportedDimension { n: usize, max: usize },

    #[error("time-scheduled functions are not supported by this operation")]
    ScheduledUnsupported,

    #[error("schedule must be a nonempty list of segments with positive durations")]
    InvalidSchedule,

    #[error("unrecognized function specification {spec:?}")]
    InvalidFunctionSpec { spec: String },

    #[error("step size must be positive and finite")]
    InvalidStep,

    #[error("{op} failed to converge")]
    IterationLimit { op: &'static str },

    #[error("coordinate matrix must be strictly lower triangular")]
    NotStrictlyLower,

    #[error("generator must be lower triangular")]
    NotLowerTriangular,

    #[error("spectral weights must be positive")]
    NonpositiveWeight,
}

pub type Result<T> = std::result::Result<T, Error>;
