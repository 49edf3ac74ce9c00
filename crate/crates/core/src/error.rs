use thiserror::Error;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("budget exceeded: {requested} elements requested, budget is {budget}")]
    BudgetExceeded { requested: u128, budget: u128 },

    #[error("infeasible construction at simple root alpha_{root}: {reason}")]
    Infeasible { root: usize, reason: String },

    #[error("empty estimate: {0}")]
    EmptyEstimate(String),

    #[error("invalid linear form: {0}")]
    InvalidForm(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Short machine-readable tag used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::Infeasible { .. } => "infeasible",
            Error::EmptyEstimate(_) => "empty_estimate",
            Error::InvalidForm(_) => "invalid_form",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
