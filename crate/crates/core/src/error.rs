use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("domain error in `{expr}` at {x}: {reason}")]
    Domain { expr: String, x: f64, reason: String },

    #[error("grid must contain at least {min} points, got {len}")]
    GridTooShort { len: usize, min: usize },

    #[error("grid points must be strictly increasing (violated at index {index})")]
    GridNotIncreasing { index: usize },

    #[error("operation requires a uniform grid")]
    NonUniformGrid,

    #[error("sample count {values} does not match grid size {grid}")]
    LengthMismatch { grid: usize, values: usize },

    #[error("functions are sampled on different grids")]
    GridMismatch,

    #[error("non-finite sample {value} at {x}")]
    NonFiniteSample { x: f64, value: f64 },

    #[error("sampled function has excluded points; operation requires fully included samples")]
    ExcludedSamples,

    #[error("quadrature failed to converge on [{a}, {b}]; deepest interval [{deep_a}, {deep_b}] has error estimate {estimate}")]
    QuadratureNonConvergence {
        a: f64,
        b: f64,
        deep_a: f64,
        deep_b: f64,
        estimate: f64,
    },

    #[error("base point {x} is not a grid point")]
    BaseNotOnGrid { x: f64 },

    #[error("samples are not strictly monotone (violated at index {index})")]
    NotMonotone { index: usize },

    #[error("query {x} outside interpolation range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("overflow during integration; last valid index {last_valid}")]
    Overflow { last_valid: usize },

    #[error("leading coefficient vanishes at x = {x}: equation is singular there")]
    SingularCoefficient { x: f64 },

    #[error("gauge function must be positive; value {value} at x = {x}")]
    NonPositiveGauge { x: f64, value: f64 },

    #[error("invalid problem: {reason}")]
    InvalidProblem { reason: String },

    #[error("family member with lambda = {lambda} is inadmissible: {reason}")]
    InadmissibleLambda { lambda: f64, reason: String },

    #[error("argument out of supported range: {reason}")]
    UnsupportedArgument { reason: String },

    #[error("pole of the gamma function at {x}")]
    GammaPole { x: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
