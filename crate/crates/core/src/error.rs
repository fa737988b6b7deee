use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Why a model produces no (or effectively no) successful departures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    /// `P(X > S)` fell below the applicable threshold.
    Zeta(f64),
    /// A single cycle needed more events than the configured guard allows.
    EventLimit(u64),
}

impl core::fmt::Display for Divergence {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Divergence::Zeta(z) => write!(f, "P(X>S) = {z:e} is effectively zero"),
            Divergence::EventLimit(n) => {
                write!(f, "a cycle exceeded {n} events without a departure, P(X>S) ≈ 0")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("deterministic X and S with equal values: the event X > S is ill-posed")]
    DegeneratePair,
    #[error("quadrature oracle did not converge: error estimate {estimate:e} > tolerance {tol:e}")]
    OracleNotConverged { estimate: f64, tol: f64 },
    #[error("no successful departures: {0}")]
    FreshnessDiverges(Divergence),
    #[error("need at least {needed} cycles, got {got}")]
    InsufficientCycles { needed: usize, got: usize },
}
