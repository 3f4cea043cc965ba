use thiserror::Error;

use crate::terms::StoreError;

use super::clause::ClauseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("existence error: unknown procedure {name}/{arity}")]
    UnknownPredicate { name: String, arity: usize },
    #[error("instantiation error in {context}")]
    Instantiation { context: &'static str },
    #[error("type error: expected {expected}, found {culprit}")]
    Type {
        expected: &'static str,
        culprit: String,
    },
    #[error("evaluation error: division by zero")]
    ZeroDivisor,
    #[error("evaluation error: integer overflow in {0}")]
    IntOverflow(&'static str),
    #[error("step budget of {0} exceeded")]
    StepBudget(u64),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("permission error: cannot redefine builtin {name}/{arity}")]
    BuiltinRedefinition { name: String, arity: usize },
    #[error(transparent)]
    InvalidClause(#[from] ClauseError),
    #[error("no current answer: the machine has not succeeded")]
    NoAnswer,
}

impl EngineError {
    pub(crate) fn type_error(expected: &'static str, culprit: &crate::terms::Term) -> Self {
        EngineError::Type {
            expected,
            culprit: culprit.to_string(),
        }
    }

    /// Short machine-readable kind, used when errors cross the host boundary.
    pub fn kind(&self) -> &'static str {
        match self {
            EngineError::UnknownPredicate { .. } => "existence_error",
            EngineError::Instantiation { .. } => "instantiation_error",
            EngineError::Type { .. } => "type_error",
            EngineError::ZeroDivisor | EngineError::IntOverflow(_) => "evaluation_error",
            EngineError::StepBudget(_) => "resource_error",
            EngineError::Store(StoreError::Exhausted(_)) => "resource_error",
            EngineError::Store(StoreError::Cycle(_)) => "cycle_error",
            EngineError::BuiltinRedefinition { .. } => "permission_error",
            EngineError::InvalidClause(_) => "clause_error",
            EngineError::NoAnswer => "state_error",
        }
    }
}
