use thiserror::Error;

use crate::spectra::GroundStateRecord;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inconsistent input: {0}")]
    Consistency(String),

    #[error("eigensolver did not converge in sector M={sector}")]
    NumericalFailure { sector: usize },

    /// The sector scan hit its hard cap while the ground energy was still
    /// going down. The partial record is kept so callers can inspect it or
    /// retry with a larger cap.
    #[error("sector scan reached cap M={cap} while E0(M) was still decreasing (best so far M={})", partial.winning_m)]
    IncompleteScan {
        cap: usize,
        partial: Box<GroundStateRecord>,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("photon distribution did not converge by M={last_m}: last L1 distance {last_distance:e}")]
    ConvergenceFailure { last_m: usize, last_distance: f64 },

    #[error("sweep sample {index} (lambda={lambda})")]
    Sweep {
        index: usize,
        lambda: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("phase-diagram node (mu12={mu12}, mu23={mu23})")]
    GridNode {
        mu12: f64,
        mu23: f64,
        #[source]
        source: Box<Error>,
    },
}
