//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input file could not be parsed; carries the offending line number.
    #[error("{path}:{line}: {message}")]
    MalformedInput {
        path: String,
        line: usize,
        message: String,
    },

    /// The instance itself is unusable (empty graph, negative weight, ...).
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// A nearest-neighbor query had no unpaired candidate left.
    #[error("no unpaired candidate node available")]
    NoCandidate,

    /// A solver was asked for more variables than it can handle.
    #[error("solver '{solver}' cannot handle {vars} variables (limit {limit})")]
    Capacity {
        solver: &'static str,
        vars: usize,
        limit: usize,
    },

    /// Solver name not recognized at configuration time.
    #[error("unknown solver '{0}' (available: exact, tabu, qaoa)")]
    UnknownSolver(String),

    /// A solver returned a result that fails the solver contract
    /// (inconsistent objective or worse than the warm start).
    #[error("solver '{solver}' violated its contract: {message}")]
    SolverContract { solver: String, message: String },

    /// Every multistart refinement instance failed.
    #[error("all {0} refinement instances failed")]
    AllInstancesFailed(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Wraps an error with the pipeline stage it occurred in.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Annotate an error with the pipeline stage it surfaced in.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
