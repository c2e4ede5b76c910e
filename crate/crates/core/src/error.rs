use thiserror::Error;

use crate::coefficients::Violation;
use crate::evolution::RunReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("coefficients outside the well-posed regime: {}", join_violations(.0))]
    RegimeInvalid(Vec<Violation>),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("estimate `{estimate}` requires s >= {threshold}, got s = {s}")]
    BelowThreshold {
        estimate: &'static str,
        s: f64,
        threshold: f64,
    },

    #[error("horizon T = {horizon} exceeds the guaranteed existence time {bound}")]
    ExceedsExistenceTime { horizon: f64, bound: f64 },

    #[error("Picard iteration did not converge in {} iterations (last difference {:e})",
        .history.len(), .history.last().copied().unwrap_or(f64::NAN))]
    PicardNonConvergence { history: Vec<f64> },

    #[error("simulation aborted at t = {time}: state became non-finite")]
    SimulationAborted { time: f64, report: Box<RunReport> },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
