use std::sync::Arc;

use indexmap::IndexMap;

use crate::terms::{atoms, Bindings, Term, TrailMark, VarId};

use super::arith::{eval, Number};
use super::builtins::{self, ArithCmp, Builtin};
use super::database::{Database, IndexKey, Predicate};
use super::error::EngineError;

/// What to do when a goal names a predicate with no clauses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownPolicy {
    #[default]
    Error,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MachineConfig {
    /// First-argument indexing. Off means every clause is tried.
    pub indexing: bool,
    pub unknown: UnknownPolicy,
    pub step_budget: u64,
    pub occurs_check: bool,
    /// Upper bound on variable cells.
    pub max_cells: usize,
}

impl Default for MachineConfig {
    fn default() -> Self {
        MachineConfig {
            indexing: true,
            unknown: UnknownPolicy::Error,
            step_budget: 1_000_000_000,
            occurs_check: false,
            max_cells: u32::MAX as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solve {
    Succeeded,
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// No query loaded.
    Idle,
    /// A query is loaded and has not yet produced its first answer.
    Ready,
    Succeeded,
    Exhausted,
}

#[derive(Debug)]
enum Frame {
    Call { goal: Term, cut_barrier: usize },
    CutTo(usize),
}

#[derive(Debug)]
struct Node {
    frame: Frame,
    next: Cont,
}

/// Persistent goal list. Choice points share suffixes with the live one.
#[derive(Debug, Clone, Default)]
struct Cont(Option<Arc<Node>>);

impl Cont {
    fn push(self, frame: Frame) -> Cont {
        Cont(Some(Arc::new(Node { frame, next: self })))
    }

    fn call(self, goal: Term, cut_barrier: usize) -> Cont {
        self.push(Frame::Call { goal, cut_barrier })
    }
}

impl Drop for Cont {
    fn drop(&mut self) {
        let mut cur = self.0.take();
        while let Some(node) = cur {
            match Arc::try_unwrap(node) {
                Ok(mut node) => cur = node.next.0.take(),
                Err(_) => break,
            }
        }
    }
}

#[derive(Debug)]
enum Alt {
    Clauses {
        goal: Term,
        pred: Arc<Predicate>,
        key: Option<IndexKey>,
        next: usize,
    },
    Resume,
}

#[derive(Debug)]
struct ChoicePoint {
    mark: TrailMark,
    store_len: usize,
    cont: Cont,
    alt: Alt,
}

/// SLD resolution machine for one query at a time.
#[derive(Debug)]
pub struct Machine {
    db: Arc<Database>,
    config: MachineConfig,
    bindings: Bindings,
    cont: Cont,
    cps: Vec<ChoicePoint>,
    status: Status,
    steps: u64,
    query_base: usize,
}

impl Machine {
    pub fn new(db: Arc<Database>, config: MachineConfig) -> Self {
        Machine {
            db,
            config,
            bindings: Bindings::with_limit(config.max_cells),
            cont: Cont::default(),
            cps: Vec::new(),
            status: Status::Idle,
            steps: 0,
            query_base: 0,
        }
    }

    pub fn database(&self) -> &Arc<Database> {
        &self.db
    }

    pub fn config(&self) -> &MachineConfig {
        &self.config
    }

    pub fn status(&self) -> Status {
        self.status
    }

    /// Resolution steps since the current query was loaded: one per goal
    /// dispatched and one per clause head tried.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn bindings(&self) -> &Bindings {
        &self.bindings
    }

    pub fn trail_len(&self) -> usize {
        self.bindings.trail.len()
    }

    pub fn store_len(&self) -> usize {
        self.bindings.store.len()
    }

    /// Store length right after the query variables were allocated.
    pub fn query_base(&self) -> usize {
        self.query_base
    }

    pub fn choice_points(&self) -> usize {
        self.cps.len()
    }

    /// Discards any previous query and installs `goal`, whose variables are
    /// `Var(0..n_vars)`. Returns the store variables standing for them.
    pub fn load_query(&mut self, goal: &Term, n_vars: usize) -> Result<Vec<Term>, EngineError> {
        self.cps.clear();
        self.cont = Cont::default();
        self.bindings = Bindings::with_limit(self.config.max_cells);
        let base = self.bindings.store.alloc(n_vars)?;
        self.query_base = self.bindings.store.len();
        self.cont = Cont::default().call(rename(goal, base), 0);
        self.status = Status::Ready;
        self.steps = 0;
        Ok((0..n_vars).map(|i| Term::Var(VarId(base + i))).collect())
    }

    /// Runs until the next answer or until no alternatives remain.
    pub fn solve_next(&mut self) -> Result<Solve, EngineError> {
        match self.status {
            Status::Idle | Status::Exhausted => return Ok(Solve::Exhausted),
            Status::Ready => {}
            Status::Succeeded => match self.backtrack() {
                Ok(true) => {}
                Ok(false) => return Ok(self.exhaust()),
                Err(e) => return Err(self.abort(e)),
            },
        }
        loop {
            let node = match self.cont.0.take() {
                None => {
                    self.status = Status::Succeeded;
                    return Ok(Solve::Succeeded);
                }
                Some(node) => node,
            };
            let (frame, next) = match Arc::try_unwrap(node) {
                Ok(Node { frame, mut next }) => (frame, next.0.take()),
                Err(shared) => (clone_frame(&shared.frame), shared.next.0.clone()),
            };
            self.cont = Cont(next);
            let ok = match frame {
                Frame::CutTo(h) => {
                    self.cps.truncate(h);
                    Ok(true)
                }
                Frame::Call { goal, cut_barrier } => self.dispatch(goal, cut_barrier),
            };
            match ok {
                Ok(true) => {}
                Ok(false) => match self.backtrack() {
                    Ok(true) => {}
                    Ok(false) => return Ok(self.exhaust()),
                    Err(e) => return Err(self.abort(e)),
                },
                Err(e) => return Err(self.abort(e)),
            }
        }
    }

    /// Copies the current bindings of `vars`. Detached from the machine.
    pub fn snapshot_answer(
        &self,
        vars: &[(String, Term)],
    ) -> Result<IndexMap<String, Term>, EngineError> {
        if self.status != Status::Succeeded {
            return Err(EngineError::NoAnswer);
        }
        vars.iter()
            .map(|(name, t)| Ok((name.clone(), self.bindings.resolve(t)?)))
            .collect()
    }

    /// Copy of `t` with all current bindings substituted.
    pub fn resolve(&self, t: &Term) -> Result<Term, EngineError> {
        Ok(self.bindings.resolve(t)?)
    }

    pub fn eval_arith(&self, t: &Term) -> Result<Number, EngineError> {
        eval(&self.bindings, t)
    }

    /// Unifies `a` and `b`, trailing new bindings. On failure or error no
    /// bindings made by this call remain.
    pub fn unify(&mut self, a: &Term, b: &Term) -> Result<bool, EngineError> {
        let mark = self.bindings.mark();
        match self.unify_terms(a, b) {
            Ok(true) => Ok(true),
            other => {
                self.bindings.undo_to(mark);
                other
            }
        }
    }

    /// Allocates a fresh unbound variable in the machine's store.
    pub fn fresh_var(&mut self) -> Result<Term, EngineError> {
        Ok(self.bindings.fresh_var()?)
    }

    fn exhaust(&mut self) -> Solve {
        self.cps.clear();
        self.cont = Cont::default();
        self.bindings.undo_to(TrailMark::START);
        self.bindings.store.truncate(self.query_base);
        self.status = Status::Exhausted;
        Solve::Exhausted
    }

    fn abort(&mut self, e: EngineError) -> EngineError {
        self.exhaust();
        e
    }

    fn tick(&mut self) -> Result<(), EngineError> {
        self.steps += 1;
        if self.steps > self.config.step_budget {
            return Err(EngineError::StepBudget(self.config.step_budget));
        }
        Ok(())
    }

    fn backtrack(&mut self) -> Result<bool, EngineError> {
        while let Some(cp) = self.cps.last_mut() {
            let (mark, store_len) = (cp.mark, cp.store_len);
            let cont = cp.cont.clone();
            let retry = match &cp.alt {
                Alt::Resume => None,
                Alt::Clauses {
                    goal,
                    pred,
                    key,
                    next,
                } => Some((goal.clone(), pred.clone(), *key, *next)),
            };
            self.bindings.undo_to(mark);
            self.bindings.store.truncate(store_len);
            match retry {
                None => {
                    self.cps.pop();
                    self.cont = cont;
                    return Ok(true);
                }
                Some((goal, pred, key, next)) => {
                    let at = self.cps.len() - 1;
                    if self.try_clauses(goal, pred, key, next, cont, Some(at))? {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }

    /// Tries candidates from position `start` until one head unifies. If
    /// `existing` is set, the choice point at that index is updated or
    /// popped; otherwise one is pushed when alternatives remain.
    fn try_clauses(
        &mut self,
        goal: Term,
        pred: Arc<Predicate>,
        key: Option<IndexKey>,
        start: usize,
        cont: Cont,
        existing: Option<usize>,
    ) -> Result<bool, EngineError> {
        let barrier = existing.unwrap_or(self.cps.len());
        let mark = self.bindings.mark();
        let store_len = self.bindings.store.len();
        let cands = pred.candidates(key.as_ref());
        for (j, &pos) in cands.iter().enumerate().skip(start) {
            self.tick()?;
            let clause = pred.clause(pos);
            let base = self.bindings.store.alloc(clause.n_vars())?;
            if self.unify_head(clause.head(), &goal, base)? {
                let more = j + 1 < cands.len();
                match existing {
                    Some(at) if more => {
                        if let Alt::Clauses { next, .. } = &mut self.cps[at].alt {
                            *next = j + 1;
                        }
                    }
                    Some(at) => self.cps.truncate(at),
                    None if more => self.cps.push(ChoicePoint {
                        mark,
                        store_len,
                        cont: cont.clone(),
                        alt: Alt::Clauses {
                            goal: goal.clone(),
                            pred: pred.clone(),
                            key,
                            next: j + 1,
                        },
                    }),
                    None => {}
                }
                self.cont = if clause.is_fact() {
                    cont
                } else {
                    cont.call(rename(clause.body(), base), barrier)
                };
                return Ok(true);
            }
            self.bindings.undo_to(mark);
            self.bindings.store.truncate(store_len);
        }
        if let Some(at) = existing {
            self.cps.truncate(at);
        }
        Ok(false)
    }

    fn push_resume(&mut self, cont: Cont) {
        self.cps.push(ChoicePoint {
            mark: self.bindings.mark(),
            store_len: self.bindings.store.len(),
            cont,
            alt: Alt::Resume,
        });
    }

    fn dispatch(&mut self, goal: Term, cut_barrier: usize) -> Result<bool, EngineError> {
        self.tick()?;
        let goal = self.bindings.deref(&goal)?.clone();
        let (name, arity) = match &goal {
            Term::Var(_) => return Err(EngineError::Instantiation { context: "call/1" }),
            Term::Atom(s) => (*s, 0),
            Term::Compound(c) => (c.functor(), c.arity()),
            other => return Err(EngineError::type_error("callable", other)),
        };
        if let Some(b) = builtins::lookup((name, arity)) {
            return self.builtin(b, &goal, cut_barrier);
        }
        let pred = match self.db.get(&(name, arity)) {
            Some(p) => p.clone(),
            None => {
                return match self.config.unknown {
                    UnknownPolicy::Fail => Ok(false),
                    UnknownPolicy::Error => Err(EngineError::UnknownPredicate {
                        name: name.name().to_owned(),
                        arity,
                    }),
                }
            }
        };
        let key = if self.config.indexing {
            match goal.args().first() {
                Some(a) => IndexKey::of(self.bindings.deref(a)?),
                None => None,
            }
        } else {
            None
        };
        let cont = std::mem::take(&mut self.cont);
        self.try_clauses(goal, pred, key, 0, cont, None)
    }

    fn builtin(&mut self, b: Builtin, goal: &Term, cut_barrier: usize) -> Result<bool, EngineError> {
        let args = goal.args();
        match b {
            Builtin::True => Ok(true),
            Builtin::Fail => Ok(false),
            Builtin::Cut => {
                self.cps.truncate(cut_barrier);
                Ok(true)
            }
            Builtin::Conj => {
                let cont = std::mem::take(&mut self.cont);
                self.cont = cont
                    .call(args[1].clone(), cut_barrier)
                    .call(args[0].clone(), cut_barrier);
                Ok(true)
            }
            Builtin::Disj => {
                let left = self.bindings.deref(&args[0])?.clone();
                let cont = std::mem::take(&mut self.cont);
                if let Some((cond, then)) = as_if_then(&left) {
                    let h = self.cps.len();
                    self.push_resume(cont.clone().call(args[1].clone(), cut_barrier));
                    self.cont = cont
                        .call(then, cut_barrier)
                        .push(Frame::CutTo(h))
                        .call(cond, h + 1);
                } else {
                    self.push_resume(cont.clone().call(args[1].clone(), cut_barrier));
                    self.cont = cont.call(left, cut_barrier);
                }
                Ok(true)
            }
            Builtin::IfThen => {
                let h = self.cps.len();
                let cont = std::mem::take(&mut self.cont);
                self.cont = cont
                    .call(args[1].clone(), cut_barrier)
                    .push(Frame::CutTo(h))
                    .call(args[0].clone(), h);
                Ok(true)
            }
            Builtin::Not => {
                let h = self.cps.len();
                let cont = std::mem::take(&mut self.cont);
                self.push_resume(cont);
                self.cont = Cont::default()
                    .call(Term::Atom(atoms::FAIL), h)
                    .push(Frame::CutTo(h))
                    .call(args[0].clone(), h + 1);
                Ok(true)
            }
            Builtin::Call(extra) => {
                let target = self.add_args(&args[0], &args[1..=extra])?;
                let h = self.cps.len();
                let cont = std::mem::take(&mut self.cont);
                self.cont = cont.call(target, h);
                Ok(true)
            }
            Builtin::Unify => self.unify(&args[0], &args[1]),
            Builtin::NotUnify => {
                let mark = self.bindings.mark();
                let r = self.unify_terms(&args[0], &args[1]);
                self.bindings.undo_to(mark);
                Ok(!r?)
            }
            Builtin::Identical => self.identical(&args[0], &args[1]),
            Builtin::NotIdentical => Ok(!self.identical(&args[0], &args[1])?),
            Builtin::Is => {
                let v = self.eval_arith(&args[1])?.to_term();
                self.unify(&args[0], &v)
            }
            Builtin::Compare(op) => {
                let x = self.eval_arith(&args[0])?;
                let y = self.eval_arith(&args[1])?;
                let ord = x.compare(y);
                use std::cmp::Ordering::*;
                Ok(match op {
                    ArithCmp::Lt => ord == Some(Less),
                    ArithCmp::Gt => ord == Some(Greater),
                    ArithCmp::Le => matches!(ord, Some(Less | Equal)),
                    ArithCmp::Ge => matches!(ord, Some(Greater | Equal)),
                    ArithCmp::Eq => ord == Some(Equal),
                    ArithCmp::Ne => ord != Some(Equal),
                })
            }
            Builtin::Var => Ok(self.bindings.deref(&args[0])?.is_var()),
            Builtin::Nonvar => Ok(!self.bindings.deref(&args[0])?.is_var()),
            Builtin::Atom => Ok(matches!(self.bindings.deref(&args[0])?, Term::Atom(_))),
            Builtin::Integer => Ok(matches!(self.bindings.deref(&args[0])?, Term::Int(_))),
            Builtin::Float => Ok(matches!(self.bindings.deref(&args[0])?, Term::Float(_))),
            Builtin::Number => Ok(matches!(
                self.bindings.deref(&args[0])?,
                Term::Int(_) | Term::Float(_)
            )),
            Builtin::Atomic => Ok(self.bindings.deref(&args[0])?.is_atomic()),
            Builtin::Compound => Ok(matches!(self.bindings.deref(&args[0])?, Term::Compound(_))),
            Builtin::Callable => Ok(self.bindings.deref(&args[0])?.is_callable()),
            Builtin::Functor => self.functor(args),
            Builtin::Arg => self.arg(args),
        }
    }

    fn add_args(&self, goal: &Term, extra: &[Term]) -> Result<Term, EngineError> {
        let goal = self.bindings.deref(goal)?;
        if extra.is_empty() {
            return match goal {
                Term::Var(_) => Err(EngineError::Instantiation { context: "call/1" }),
                g if g.is_callable() => Ok(g.clone()),
                g => Err(EngineError::type_error("callable", g)),
            };
        }
        match goal {
            Term::Var(_) => Err(EngineError::Instantiation { context: "call/N" }),
            Term::Atom(s) => Ok(Term::compound(*s, extra.to_vec())),
            Term::Compound(c) => {
                let mut args = c.args().to_vec();
                args.extend_from_slice(extra);
                Ok(Term::compound(c.functor(), args))
            }
            other => Err(EngineError::type_error("callable", other)),
        }
    }

    fn functor(&mut self, args: &[Term]) -> Result<bool, EngineError> {
        let t = self.bindings.deref(&args[0])?.clone();
        match &t {
            Term::Var(_) => {
                let name = self.bindings.deref(&args[1])?.clone();
                let arity = match self.bindings.deref(&args[2])? {
                    Term::Var(_) => return Err(EngineError::Instantiation { context: "functor/3" }),
                    Term::Int(n) => *n,
                    other => return Err(EngineError::type_error("integer", other)),
                };
                let built = match (&name, arity) {
                    (Term::Var(_), _) => {
                        return Err(EngineError::Instantiation { context: "functor/3" })
                    }
                    (n, 0) if n.is_atomic() => n.clone(),
                    (Term::Atom(s), n) if n > 0 => {
                        let n = n as usize;
                        let base = self.bindings.store.alloc(n)?;
                        Term::compound(*s, (0..n).map(|i| Term::Var(VarId(base + i))).collect())
                    }
                    (Term::Atom(_), n) => {
                        return Err(EngineError::type_error("non-negative arity", &Term::Int(n)))
                    }
                    (other, _) if other.is_atomic() => {
                        return Err(EngineError::type_error("atom", other))
                    }
                    (other, _) => return Err(EngineError::type_error("atomic", other)),
                };
                self.unify(&t, &built)
            }
            Term::Compound(c) => {
                let (name, arity) = (Term::Atom(c.functor()), Term::Int(c.arity() as i64));
                self.unify_pair(&args[1], &name, &args[2], &arity)
            }
            atomic => {
                let atomic = atomic.clone();
                self.unify_pair(&args[1], &atomic, &args[2], &Term::Int(0))
            }
        }
    }

    fn unify_pair(&mut self, a: &Term, x: &Term, b: &Term, y: &Term) -> Result<bool, EngineError> {
        let mark = self.bindings.mark();
        if self.unify(a, x)? && self.unify(b, y)? {
            return Ok(true);
        }
        self.bindings.undo_to(mark);
        Ok(false)
    }

    fn arg(&mut self, args: &[Term]) -> Result<bool, EngineError> {
        let n = match self.bindings.deref(&args[0])? {
            Term::Var(_) => return Err(EngineError::Instantiation { context: "arg/3" }),
            Term::Int(n) => *n,
            other => return Err(EngineError::type_error("integer", other)),
        };
        let t = self.bindings.deref(&args[1])?.clone();
        match &t {
            Term::Var(_) => Err(EngineError::Instantiation { context: "arg/3" }),
            Term::Compound(c) => {
                if n < 1 || n as usize > c.arity() {
                    return Ok(false);
                }
                let a = c.args()[n as usize - 1].clone();
                self.unify(&args[2], &a)
            }
            other => Err(EngineError::type_error("compound", other)),
        }
    }

    fn identical(&self, a: &Term, b: &Term) -> Result<bool, EngineError> {
        let mut stack = vec![(a, b)];
        while let Some((x, y)) = stack.pop() {
            let x = self.bindings.deref(x)?;
            let y = self.bindings.deref(y)?;
            match (x, y) {
                (Term::Compound(p), Term::Compound(q)) => {
                    if Arc::ptr_eq(p, q) {
                        continue;
                    }
                    if p.functor() != q.functor() || p.arity() != q.arity() {
                        return Ok(false);
                    }
                    stack.extend(p.args().iter().zip(q.args()).rev());
                }
                (x, y) if !atomic_eq(x, y) => return Ok(false),
                _ => {}
            }
        }
        Ok(true)
    }

    fn bind(&mut self, v: VarId, t: Term) -> Result<bool, EngineError> {
        if self.config.occurs_check && t.has_vars() && self.occurs(v, &t)? {
            return Ok(false);
        }
        self.bindings.bind(v, t);
        Ok(true)
    }

    fn occurs(&self, v: VarId, t: &Term) -> Result<bool, EngineError> {
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            match self.bindings.deref(t)? {
                Term::Var(w) if *w == v => return Ok(true),
                Term::Compound(c) if c.has_vars() => stack.extend(c.args()),
                _ => {}
            }
        }
        Ok(false)
    }

    /// Unification without cleanup on failure.
    fn unify_terms(&mut self, a: &Term, b: &Term) -> Result<bool, EngineError> {
        let mut stack = vec![(a.clone(), b.clone())];
        while let Some((x, y)) = stack.pop() {
            let x = self.bindings.deref(&x)?.clone();
            let y = self.bindings.deref(&y)?.clone();
            let ok = match (&x, &y) {
                (Term::Var(v), Term::Var(w)) => {
                    // Younger cell points at the older one.
                    match v.0.cmp(&w.0) {
                        std::cmp::Ordering::Equal => true,
                        std::cmp::Ordering::Less => self.bind(*w, x)?,
                        std::cmp::Ordering::Greater => self.bind(*v, y)?,
                    }
                }
                (Term::Var(v), _) => self.bind(*v, y)?,
                (_, Term::Var(w)) => self.bind(*w, x)?,
                (Term::Compound(p), Term::Compound(q)) => {
                    if Arc::ptr_eq(p, q) {
                        true
                    } else if p.functor() != q.functor() || p.arity() != q.arity() {
                        false
                    } else {
                        stack.extend(p.args().iter().cloned().zip(q.args().iter().cloned()).rev());
                        true
                    }
                }
                (x, y) => atomic_eq(x, y),
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Unifies the clause head `head`, whose variables are offset by `base`,
    /// with `goal`, renaming head subterms only when they get bound.
    fn unify_head(&mut self, head: &Term, goal: &Term, base: usize) -> Result<bool, EngineError> {
        let mut stack: Vec<(&Term, Term)> = head
            .args()
            .iter()
            .zip(goal.args().iter().cloned())
            .rev()
            .collect();
        while let Some((p, t)) = stack.pop() {
            let ok = match p {
                Term::Var(i) => {
                    let v = VarId(base + i.0);
                    if self.bindings.store.is_bound(v) {
                        self.unify_terms(&Term::Var(v), &t)?
                    } else {
                        // The goal side may already reach this cell through
                        // an earlier argument, as in `p(f(Y), f(Y))` against
                        // `p(X, X)`.
                        match self.bindings.deref(&t)?.clone() {
                            Term::Var(w) if w == v => true,
                            t => self.bind(v, t)?,
                        }
                    }
                }
                Term::Compound(pc) if pc.has_vars() => {
                    let t = self.bindings.deref(&t)?.clone();
                    match &t {
                        Term::Var(w) => self.bind(*w, rename(p, base))?,
                        Term::Compound(tc)
                            if tc.functor() == pc.functor() && tc.arity() == pc.arity() =>
                        {
                            stack.extend(pc.args().iter().zip(tc.args().iter().cloned()).rev());
                            true
                        }
                        _ => false,
                    }
                }
                ground => self.unify_terms(ground, &t)?,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn clone_frame(frame: &Frame) -> Frame {
    match frame {
        Frame::Call { goal, cut_barrier } => Frame::Call {
            goal: goal.clone(),
            cut_barrier: *cut_barrier,
        },
        Frame::CutTo(h) => Frame::CutTo(*h),
    }
}

fn as_if_then(t: &Term) -> Option<(Term, Term)> {
    match t {
        Term::Compound(c) if c.functor() == atoms::ARROW && c.arity() == 2 => {
            Some((c.args()[0].clone(), c.args()[1].clone()))
        }
        _ => None,
    }
}

fn atomic_eq(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Atom(x), Term::Atom(y)) => x == y,
        (Term::Int(x), Term::Int(y)) => x == y,
        (Term::Float(x), Term::Float(y)) => x.to_bits() == y.to_bits(),
        (Term::Handle(x), Term::Handle(y)) => x == y,
        (Term::Var(x), Term::Var(y)) => x == y,
        _ => false,
    }
}

/// Copy of a clause-local term with `Var(i)` mapped to `Var(base + i)`.
/// Ground subterms are shared.
pub(crate) fn rename(t: &Term, base: usize) -> Term {
    match t {
        Term::Var(v) => Term::Var(VarId(base + v.0)),
        Term::Compound(c) if c.has_vars() => {
            if t.as_cons().is_some() {
                let mut items = Vec::new();
                let mut cur = t;
                while let Some((h, tl)) = cur.as_cons() {
                    items.push(rename(h, base));
                    cur = tl;
                }
                return Term::list_with_tail(items, rename(cur, base));
            }
            stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || {
                Term::compound(c.functor(), c.args().iter().map(|a| rename(a, base)).collect())
            })
        }
        other => other.clone(),
    }
}

/// Replaces `Var(i)` by `values[i]` wherever `values[i]` is `Some`.
pub fn substitute(t: &Term, values: &[Option<Term>]) -> Term {
    match t {
        Term::Var(v) => match values.get(v.0) {
            Some(Some(x)) => x.clone(),
            _ => t.clone(),
        },
        Term::Compound(c) if c.has_vars() => stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || {
            Term::compound(
                c.functor(),
                c.args().iter().map(|a| substitute(a, values)).collect(),
            )
        }),
        other => other.clone(),
    }
}

impl Machine {
    /// Convenience for tests and tools: collects up to `limit` answers of
    /// `goal` (with `Var(0..n_vars)` as its variables).
    pub fn collect(
        &mut self,
        goal: &Term,
        n_vars: usize,
        limit: usize,
    ) -> Result<Vec<Vec<Term>>, EngineError> {
        let vars = self.load_query(goal, n_vars)?;
        let mut out = Vec::new();
        while out.len() < limit && self.solve_next()? == Solve::Succeeded {
            out.push(
                vars.iter()
                    .map(|v| self.resolve(v))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        Ok(out)
    }
}
