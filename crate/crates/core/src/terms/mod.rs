//! Symbols, terms, and the variable store with its trail.

mod store;
mod symbol;
mod term;

pub use store::{Bindings, StoreError, Trail, TrailMark, VarStore};
pub use symbol::{atoms, intern, Sym};
pub use term::{Compound, PredKey, Term, VarId};
