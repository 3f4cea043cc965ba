use rustc_hash::FxHashMap as HashMap;
use std::sync::Arc;

use crate::terms::{PredKey, Sym, Term};

use super::builtins::is_builtin;
use super::clause::Clause;
use super::error::EngineError;

/// Principal functor of a first argument, used for clause selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexKey {
    Atom(Sym),
    Int(i64),
    Float(u64),
    Functor(Sym, usize),
    /// Host handles never occur in stored heads, so only clauses with a
    /// variable first argument can match them.
    Opaque,
}

impl IndexKey {
    /// `None` for variables: every clause is a candidate.
    pub fn of(t: &Term) -> Option<IndexKey> {
        match t {
            Term::Var(_) => None,
            Term::Atom(s) => Some(IndexKey::Atom(*s)),
            Term::Int(i) => Some(IndexKey::Int(*i)),
            Term::Float(f) => Some(IndexKey::Float(f.to_bits())),
            Term::Compound(c) => Some(IndexKey::Functor(c.functor(), c.arity())),
            Term::Handle(_) => Some(IndexKey::Opaque),
        }
    }
}

/// Clauses of one predicate plus the first-argument index.
///
/// Every bucket already contains the clauses whose first argument is a
/// variable, merged in assert order, so a lookup is a single map probe.
#[derive(Debug, Clone)]
pub struct Predicate {
    key: PredKey,
    clauses: Vec<Arc<Clause>>,
    all: Vec<usize>,
    var_first: Vec<usize>,
    index: HashMap<IndexKey, Vec<usize>>,
}

impl Predicate {
    fn new(key: PredKey) -> Self {
        Predicate {
            key,
            clauses: Vec::new(),
            all: Vec::new(),
            var_first: Vec::new(),
            index: HashMap::default(),
        }
    }

    pub fn key(&self) -> PredKey {
        self.key
    }

    pub fn clauses(&self) -> &[Arc<Clause>] {
        &self.clauses
    }

    pub fn clause(&self, pos: usize) -> &Arc<Clause> {
        &self.clauses[pos]
    }

    fn push(&mut self, clause: Clause) {
        let pos = self.clauses.len();
        let key = clause.head().args().first().and_then(IndexKey::of);
        self.all.push(pos);
        match key {
            None => {
                self.var_first.push(pos);
                for bucket in self.index.values_mut() {
                    bucket.push(pos);
                }
            }
            Some(k) => {
                let var_first = &self.var_first;
                self.index
                    .entry(k)
                    .or_insert_with(|| var_first.clone())
                    .push(pos);
            }
        }
        self.clauses.push(Arc::new(clause));
    }

    /// Clause positions, in assert order, that can match a call whose first
    /// argument has `key`.
    pub fn candidates(&self, key: Option<&IndexKey>) -> &[usize] {
        match key {
            None => &self.all,
            Some(k) => self.index.get(k).unwrap_or(&self.var_first),
        }
    }
}

/// Clause store keyed by name/arity. Immutable once shared with machines.
#[derive(Debug, Clone, Default)]
pub struct Database {
    preds: HashMap<PredKey, Arc<Predicate>>,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_clauses<I: IntoIterator<Item = Clause>>(clauses: I) -> Result<Self, EngineError> {
        let mut db = Database::new();
        for c in clauses {
            db.assertz(c)?;
        }
        Ok(db)
    }

    /// Appends `clause` to its predicate.
    pub fn assertz(&mut self, clause: Clause) -> Result<(), EngineError> {
        let key = clause.key();
        if is_builtin(key) {
            return Err(EngineError::BuiltinRedefinition {
                name: key.0.name().to_owned(),
                arity: key.1,
            });
        }
        let pred = self
            .preds
            .entry(key)
            .or_insert_with(|| Arc::new(Predicate::new(key)));
        Arc::make_mut(pred).push(clause);
        Ok(())
    }

    pub fn get(&self, key: &PredKey) -> Option<&Arc<Predicate>> {
        self.preds.get(key)
    }

    pub fn contains(&self, name: &str, arity: usize) -> bool {
        self.preds.contains_key(&(Sym::intern(name), arity))
    }

    pub fn clause_count(&self) -> usize {
        self.preds.values().map(|p| p.clauses.len()).sum()
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Arc<Predicate>> {
        self.preds.values()
    }

    /// Candidate clause positions for a call `functor/arity` whose first
    /// argument has `first_arg` (`None` when unbound).
    pub fn index_lookup(
        &self,
        functor: Sym,
        arity: usize,
        first_arg: Option<&IndexKey>,
    ) -> Result<&[usize], EngineError> {
        let pred = self
            .preds
            .get(&(functor, arity))
            .ok_or_else(|| EngineError::UnknownPredicate {
                name: functor.name().to_owned(),
                arity,
            })?;
        Ok(pred.candidates(first_arg))
    }
}
