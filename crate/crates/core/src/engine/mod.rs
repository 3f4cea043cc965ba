//! Clause database, unification and the resolution machine.

mod arith;
mod builtins;
mod clause;
mod database;
mod error;
mod machine;

pub use arith::{eval, Number};
pub use builtins::{is_builtin, MAX_CALL_ARITY};
pub use clause::{Clause, ClauseError};
pub use database::{Database, IndexKey, Predicate};
pub use error::EngineError;
pub use machine::{substitute, Machine, MachineConfig, Solve, Status, UnknownPolicy};
