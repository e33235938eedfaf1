use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration failed at t = {time:e} s: {detail}")]
    IntegrationFailure { time: f64, detail: String },

    #[error("block decomposition failed: residual {residual:e} exceeds tolerance")]
    ConstructionFailure { residual: f64 },

    /// Wei-Norman coordinates hit `sin(alpha2) = 0` away from the origin.
    #[error("coordinate singularity at t = {time:e} s (|sin alpha2| = {value:e})")]
    Singularity { time: f64, value: f64 },

    #[error(
        "optimizer stagnated at fidelity {achieved} below seed fidelity {seed} after {evaluations} evaluations"
    )]
    OptimizationFailure {
        achieved: f64,
        seed: f64,
        evaluations: usize,
    },

    #[error("synthesis failed: {reason} (best fidelity {best_fidelity})")]
    SynthesisFailure { reason: String, best_fidelity: f64 },

    #[error("stage {stage}: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn in_stage(self, stage: usize) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
