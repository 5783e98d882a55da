use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid architecture {m}oo{n}: need 1 <= M <= N <= 20")]
    InvalidArchitecture { m: u32, n: u32 },

    #[error("invalid test policy: {0}")]
    InvalidTestPolicy(String),

    #[error("failure rate must be positive and finite, got {0}")]
    InvalidFailureRate(f64),

    #[error("binomial C({n}, {k}) requires 0 <= k <= n <= 20")]
    BinomialDomain { n: u32, k: u32 },

    #[error("S({m}, {n}, {x}) requires 1 <= M <= x <= N <= 20")]
    CoefficientDomain { m: u32, n: u32, x: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("time {t} h outside the proof-test interval [0, {t1}] h")]
    TimeOutOfRange { t: f64, t1: f64 },

    #[error("reliability is only defined for a barrier without effective partial tests")]
    PartialTestsUnsupported,

    #[error("barrier is failed with certainty at t = {t} h; conditional one-hour unreliability is undefined")]
    CertainFailure { t: f64 },

    #[error(
        "adaptive quadrature did not converge on [{a}, {b}]: error estimate {estimate:e} \
         exceeds tolerance {tolerance:e} at depth {depth}"
    )]
    QuadratureNotConverged {
        a: f64,
        b: f64,
        estimate: f64,
        tolerance: f64,
        depth: u32,
    },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid simulation config: {0}")]
    InvalidSimulationConfig(String),

    #[error(
        "insufficient conditioning events: window stratum {stratum} starting at {window_start} h \
         saw the barrier up in {up_events} of {samples} samples"
    )]
    InsufficientConditioning {
        stratum: usize,
        window_start: f64,
        up_events: u64,
        samples: u64,
    },
}

impl Error {
    /// True for failures of the numerical machinery (as opposed to invalid
    /// inputs).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::CertainFailure { .. }
                | Error::QuadratureNotConverged { .. }
                | Error::InsufficientConditioning { .. }
        )
    }
}
