use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The requested step cannot resolve the carrier oscillation.
    #[error("time step {dt} ps exceeds the sampling bound {limit} ps")]
    StepTooLarge { dt: f64, limit: f64 },

    /// An eigenphase of the one-period propagator sits on the branch cut of the logarithm.
    #[error("eigenphase {phase} rad is within the branch-cut margin of ±π{}", at_time(.time))]
    BranchAmbiguity { phase: f64, time: Option<f64> },

    /// The exciton gap used by the Schrieffer-Wolff reduction vanishes.
    #[error("Schrieffer-Wolff denominator {gap} meV is degenerate{}", at_time(.time))]
    DegenerateDenominator { gap: f64, time: Option<f64> },

    #[error("final occupation is monotone over the scanned pulse-area range")]
    NoMaximumFound,

    #[error("{name} = {value} is outside [-1, 1]")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

fn at_time(time: &Option<f64>) -> String {
    match time {
        Some(t) => format!(" at t = {t} ps"),
        None => String::new(),
    }
}

impl Error {
    /// Attach the coarse time at which a stroboscopic extraction failed.
    pub fn at(self, t: f64) -> Self {
        match self {
            Error::BranchAmbiguity { phase, .. } => Error::BranchAmbiguity {
                phase,
                time: Some(t),
            },
            Error::DegenerateDenominator { gap, .. } => {
                Error::DegenerateDenominator { gap, time: Some(t) }
            }
            other => other,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
