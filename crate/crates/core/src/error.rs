use num_complex::Complex64;

/// Crate-wide error type.
///
/// Numerical routines refuse to propagate NaN silently: any non-finite
/// intermediate surfaces as [`Error::NonFinite`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite value produced by {context} at argument {at}")]
    NonFinite { context: &'static str, at: f64 },

    #[error("pole of the gamma function at z = {re} + {im}i")]
    GammaPole { re: f64, im: f64 },

    #[error("argument outside the valid domain: {0}")]
    Domain(String),

    #[error("node budget exhausted after {nodes} evaluations (best value {best}, error estimate {error_estimate:.3e})")]
    BudgetExhausted {
        nodes: usize,
        best: Complex64,
        error_estimate: f64,
    },

    #[error("phase could not be resolved into half-cycle panels near x = {at}")]
    UnresolvablePhase { at: f64 },

    #[error("derivative of order {requested} requested, but only {declared} declared")]
    DerivativeOrder { requested: usize, declared: usize },

    #[error("no stationary point of the phase inside the support")]
    NoStationaryPoint,

    #[error("phase derivative changes sign more than once in the support")]
    AmbiguousStationaryPoint,

    #[error("stationary point {x0:.6} outside the admissible range [{lo:.6}, {hi:.6}]")]
    HypothesisViolation { x0: f64, lo: f64, hi: f64 },

    #[error("evaluation point hits the singular set of the family: {0}")]
    SingularPoint(String),

    #[error("parse error in coefficient file, line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("Hecke multiplicativity violated for ({m}, {n}) -> {mn}: |λ({m})λ({n}) - λ({mn})| = {deviation:.3e}")]
    Multiplicativity {
        m: u64,
        n: u64,
        mn: u64,
        deviation: f64,
    },

    #[error("coefficient table too short: need n ≤ {needed}, have n ≤ {available}")]
    InsufficientCoefficients { needed: u64, available: u64 },

    #[error("truncation tail {tail:.3e} above tolerance {tol:.3e}")]
    TruncationTail { tail: f64, tol: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
