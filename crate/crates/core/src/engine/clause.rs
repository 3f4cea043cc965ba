use thiserror::Error;

use crate::terms::{atoms, PredKey, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ClauseError {
    #[error("clause head must be an atom or compound term")]
    HeadNotCallable,
    #[error("clause body must be callable")]
    BodyNotCallable,
    #[error("host handles cannot be stored in clauses")]
    ContainsHandle,
}

/// A program clause. Variables are clause-local: `Var(i)` with
/// `i < n_vars`, renamed to fresh cells each time the clause is used.
#[derive(Debug, Clone)]
pub struct Clause {
    head: Term,
    body: Term,
    n_vars: usize,
}

impl Clause {
    pub fn new(head: Term, body: Term, n_vars: usize) -> Result<Clause, ClauseError> {
        if !head.is_callable() {
            return Err(ClauseError::HeadNotCallable);
        }
        let body = match body {
            Term::Var(_) => Term::compound(atoms::CALL, vec![body]),
            b if b.is_callable() => b,
            _ => return Err(ClauseError::BodyNotCallable),
        };
        if contains_handle(&head) || contains_handle(&body) {
            return Err(ClauseError::ContainsHandle);
        }
        Ok(Clause { head, body, n_vars })
    }

    pub fn fact(head: Term, n_vars: usize) -> Result<Clause, ClauseError> {
        Clause::new(head, Term::Atom(atoms::TRUE), n_vars)
    }

    pub fn head(&self) -> &Term {
        &self.head
    }

    pub fn body(&self) -> &Term {
        &self.body
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn key(&self) -> PredKey {
        self.head.principal().expect("head is callable")
    }

    pub fn is_fact(&self) -> bool {
        matches!(self.body, Term::Atom(s) if s == atoms::TRUE)
    }
}

fn contains_handle(t: &Term) -> bool {
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        match t {
            Term::Handle(_) => return true,
            Term::Compound(c) => stack.extend(c.args()),
            _ => {}
        }
    }
    false
}
