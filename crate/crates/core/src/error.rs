use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("row for context [{context}] is not stochastic (sum = {sum})")]
    NonStochastic { context: String, sum: f64 },

    #[error("state [{0}] is not reachable from the initial state")]
    UnreachableState(String),

    #[error("reachable state [{0}] has no transition row")]
    MissingState(String),

    #[error("chain is not ergodic: {0}")]
    NonErgodic(String),

    #[error("symbol {0:?} is not covered by the partition")]
    UnknownSymbol(String),

    #[error("unknown block label {0:?}")]
    UnknownLabel(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("component for block {0} is not memoryless")]
    NotMemoryless(String),

    #[error("part {0} has zero probability under the memoryless component")]
    ZeroMassPart(String),

    #[error("switch exhibits alphabet domination; compatible partitions are not characterized")]
    DominationPresent,

    #[error("FSM sources do not share the same state set and next-state function")]
    StructureMismatch,

    #[error("search space of {count} partitions exceeds the budget of {budget}")]
    SearchSpaceTooLarge { count: u128, budget: u128 },

    #[error("no acceptable random switch after {0} attempts")]
    RejectionBudgetExceeded(usize),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by a configured computation budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::SearchSpaceTooLarge { .. } | Error::RejectionBudgetExceeded(_)
        )
    }
}
