use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph not connected")]
    Disconnected,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("more partitions than nodes ({partitions} > {nodes})")]
    TooManyPartitions { partitions: usize, nodes: usize },
    #[error("unplaced state `{0}`")]
    UnplacedState(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("enumeration budget exceeded: {combinations} placement combinations > budget {budget}")]
    BudgetExceeded { combinations: u128, budget: u128 },
    #[error("PMR supports a single state (scenario has {0})")]
    PmrMultiState(usize),
    #[error("unknown solver `{0}`")]
    UnknownSolver(String),
    #[error("formula undefined at zero sync rate")]
    ZeroSyncRate,
    #[error("degenerate least-squares design: {0}")]
    DegenerateFit(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors that stem from the instance being too large or infeasible
    /// rather than from malformed input.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::UnplacedState(_))
    }
}
