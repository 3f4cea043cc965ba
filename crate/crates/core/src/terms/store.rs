use rustc_hash::FxHashSet;
use thiserror::Error;

use super::term::{Term, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    /// Dereferencing visited more cells than exist, so the binding graph
    /// has a cycle (only possible with the occurs check disabled).
    #[error("cyclic binding chain through variable _G{0}")]
    Cycle(usize),
    #[error("variable store exhausted ({0} cells)")]
    Exhausted(usize),
}

/// Growable table of variable cells.
#[derive(Debug, Clone)]
pub struct VarStore {
    cells: Vec<Option<Term>>,
    limit: usize,
}

impl Default for VarStore {
    fn default() -> Self {
        VarStore::with_limit(u32::MAX as usize)
    }
}

impl VarStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_limit(limit: usize) -> Self {
        VarStore {
            cells: Vec::new(),
            limit,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn fresh_var(&mut self) -> Result<Term, StoreError> {
        let id = self.cells.len();
        if id >= self.limit {
            return Err(StoreError::Exhausted(self.limit));
        }
        self.cells.push(None);
        Ok(Term::Var(VarId(id)))
    }

    /// Appends `n` unbound cells and returns the index of the first.
    pub fn alloc(&mut self, n: usize) -> Result<usize, StoreError> {
        let base = self.cells.len();
        if base + n > self.limit {
            return Err(StoreError::Exhausted(self.limit));
        }
        self.cells.resize(base + n, None);
        Ok(base)
    }

    pub fn get(&self, var: VarId) -> Option<&Term> {
        self.cells[var.0].as_ref()
    }

    pub fn is_bound(&self, var: VarId) -> bool {
        self.cells[var.0].is_some()
    }

    /// Binds without trailing. Callers that need to backtrack use
    /// [`Bindings::bind`].
    pub fn set(&mut self, var: VarId, value: Term) {
        debug_assert!(self.cells[var.0].is_none(), "rebinding _G{}", var.0);
        self.cells[var.0] = Some(value);
    }

    pub fn reset(&mut self, var: VarId) {
        self.cells[var.0] = None;
    }

    /// Drops every cell at index `len` or above.
    pub fn truncate(&mut self, len: usize) {
        self.cells.truncate(len);
    }

    /// Follows binding chains to an unbound variable or a non-variable term.
    /// Never rewrites cells.
    pub fn deref<'a>(&'a self, term: &'a Term) -> Result<&'a Term, StoreError> {
        let mut cur = term;
        let mut budget = self.cells.len() + 1;
        while let Term::Var(v) = cur {
            match self.cells.get(v.0).and_then(Option::as_ref) {
                Some(next) => cur = next,
                None => return Ok(cur),
            }
            budget -= 1;
            if budget == 0 {
                return Err(StoreError::Cycle(v.0));
            }
        }
        Ok(cur)
    }
}

/// Snapshot of the trail length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TrailMark(usize);

impl TrailMark {
    pub const START: TrailMark = TrailMark(0);
}

/// Log of bound cells, in binding order.
#[derive(Debug, Clone, Default)]
pub struct Trail {
    entries: Vec<VarId>,
}

impl Trail {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mark(&self) -> TrailMark {
        TrailMark(self.entries.len())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, var: VarId) {
        self.entries.push(var);
    }

    /// Resets every cell recorded after `mark` and truncates the log.
    ///
    /// Panics if `mark` lies beyond the current length: a stale mark means
    /// the caller's bookkeeping is broken.
    pub fn undo_to(&mut self, store: &mut VarStore, mark: TrailMark) {
        assert!(
            mark.0 <= self.entries.len(),
            "trail mark {} beyond trail length {}",
            mark.0,
            self.entries.len()
        );
        for var in self.entries.drain(mark.0..).rev() {
            if var.0 < store.len() {
                store.reset(var);
            }
        }
    }
}

/// A store and its trail, mutated together.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    pub store: VarStore,
    pub trail: Trail,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_limit(limit: usize) -> Self {
        Bindings {
            store: VarStore::with_limit(limit),
            trail: Trail::new(),
        }
    }

    pub fn fresh_var(&mut self) -> Result<Term, StoreError> {
        self.store.fresh_var()
    }

    pub fn bind(&mut self, var: VarId, value: Term) {
        self.store.set(var, value);
        self.trail.push(var);
    }

    pub fn mark(&self) -> TrailMark {
        self.trail.mark()
    }

    pub fn undo_to(&mut self, mark: TrailMark) {
        self.trail.undo_to(&mut self.store, mark);
    }

    pub fn deref<'a>(&'a self, term: &'a Term) -> Result<&'a Term, StoreError> {
        self.store.deref(term)
    }

    /// Copy of `term` with every bound variable replaced by its value.
    /// Unbound variables stay as they are. A binding reachable from itself
    /// (as after `X = f(X)` without occurs check) is reported as a cycle.
    pub fn resolve(&self, term: &Term) -> Result<Term, StoreError> {
        self.resolve_in(term, &mut FxHashSet::default())
    }

    /// Derefs `term`, recording each followed variable in `path` and
    /// `entered`. A variable already on the path closes a cycle.
    fn follow<'a>(
        &'a self,
        term: &'a Term,
        path: &mut FxHashSet<usize>,
        entered: &mut Vec<usize>,
    ) -> Result<&'a Term, StoreError> {
        let mut cur = term;
        while let Term::Var(v) = cur {
            match self.store.get(*v) {
                Some(next) => {
                    if !path.insert(v.0) {
                        return Err(StoreError::Cycle(v.0));
                    }
                    entered.push(v.0);
                    cur = next;
                }
                None => break,
            }
        }
        Ok(cur)
    }

    fn resolve_in(&self, term: &Term, path: &mut FxHashSet<usize>) -> Result<Term, StoreError> {
        let mut entered = Vec::new();
        let term = self.follow(term, path, &mut entered)?;
        let out = match term {
            Term::Compound(c) if c.has_vars() => {
                // Lists recurse on the tail; walk the spine iteratively and
                // recurse only into heads.
                if term.as_cons().is_some() {
                    self.resolve_list(term, path)?
                } else {
                    let args = stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || {
                        c.args()
                            .iter()
                            .map(|a| self.resolve_in(a, path))
                            .collect::<Result<Vec<_>, _>>()
                    })?;
                    Term::compound(c.functor(), args)
                }
            }
            other => other.clone(),
        };
        for v in entered {
            path.remove(&v);
        }
        Ok(out)
    }

    fn resolve_list(&self, term: &Term, path: &mut FxHashSet<usize>) -> Result<Term, StoreError> {
        let mut heads = Vec::new();
        let mut spine = Vec::new();
        let mut cur = term;
        let tail = loop {
            match cur.as_cons() {
                Some((h, t)) => {
                    heads.push(stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || {
                        self.resolve_in(h, path)
                    })?);
                    cur = self.follow(t, path, &mut spine)?;
                }
                None => break self.resolve_in(cur, path)?,
            }
        };
        for v in spine {
            path.remove(&v);
        }
        Ok(Term::list_with_tail(heads, tail))
    }
}
