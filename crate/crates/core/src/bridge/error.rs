use std::fmt;

use thiserror::Error;

use crate::engine::EngineError;
use crate::reader::{Pos, ReadError};

use super::convert::ConvertError;

/// Category of a [`BoundaryError`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Existence,
    Instantiation,
    Type,
    Evaluation,
    Resource,
    Cycle,
    Permission,
    Clause,
    State,
    NonGround,
    Unsupported,
    IntegerRange,
    UnknownVariable,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Syntax => "syntax_error",
            ErrorKind::Existence => "existence_error",
            ErrorKind::Instantiation => "instantiation_error",
            ErrorKind::Type => "type_error",
            ErrorKind::Evaluation => "evaluation_error",
            ErrorKind::Resource => "resource_error",
            ErrorKind::Cycle => "cycle_error",
            ErrorKind::Permission => "permission_error",
            ErrorKind::Clause => "clause_error",
            ErrorKind::State => "state_error",
            ErrorKind::NonGround => "non_ground_answer",
            ErrorKind::Unsupported => "unsupported_value",
            ErrorKind::IntegerRange => "integer_range",
            ErrorKind::UnknownVariable => "unknown_variable",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The single error type seen by host code.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct BoundaryError {
    pub kind: ErrorKind,
    pub message: String,
    /// Goal text of the query that failed, if any.
    pub goal: Option<String>,
    /// Source position for syntax errors.
    pub position: Option<Pos>,
}

impl fmt::Display for BoundaryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(p) = self.position {
            write!(f, " at {p}")?;
        }
        write!(f, ": {}", self.message)?;
        if let Some(g) = &self.goal {
            write!(f, " (goal: {g})")?;
        }
        Ok(())
    }
}

impl BoundaryError {
    pub(crate) fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        BoundaryError {
            kind,
            message: message.into(),
            goal: None,
            position: None,
        }
    }

    pub(crate) fn in_goal(mut self, goal: &str) -> Self {
        self.goal = Some(goal.to_owned());
        self
    }
}

impl From<ReadError> for BoundaryError {
    fn from(e: ReadError) -> Self {
        BoundaryError {
            kind: ErrorKind::Syntax,
            message: match e.clause {
                Some(c) => format!("clause {c}: {}", e.kind),
                None => e.kind.to_string(),
            },
            goal: None,
            position: Some(e.pos),
        }
    }
}

impl From<EngineError> for BoundaryError {
    fn from(e: EngineError) -> Self {
        use crate::terms::StoreError;
        let kind = match &e {
            EngineError::UnknownPredicate { .. } => ErrorKind::Existence,
            EngineError::Instantiation { .. } => ErrorKind::Instantiation,
            EngineError::Type { .. } => ErrorKind::Type,
            EngineError::ZeroDivisor | EngineError::IntOverflow(_) => ErrorKind::Evaluation,
            EngineError::StepBudget(_) | EngineError::Store(StoreError::Exhausted(_)) => {
                ErrorKind::Resource
            }
            EngineError::Store(StoreError::Cycle(_)) => ErrorKind::Cycle,
            EngineError::BuiltinRedefinition { .. } => ErrorKind::Permission,
            EngineError::InvalidClause(_) => ErrorKind::Clause,
            EngineError::NoAnswer => ErrorKind::State,
        };
        BoundaryError::new(kind, e.to_string())
    }
}

impl From<ConvertError> for BoundaryError {
    fn from(e: ConvertError) -> Self {
        let kind = match e {
            ConvertError::NonGround(_) => ErrorKind::NonGround,
            ConvertError::Unsupported(_) => ErrorKind::Unsupported,
            ConvertError::IntRange(_) => ErrorKind::IntegerRange,
        };
        BoundaryError::new(kind, e.to_string())
    }
}
