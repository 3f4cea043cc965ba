use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use indexmap::IndexMap;

use crate::engine::{substitute, Database, Machine, MachineConfig, Solve};
use crate::reader::{parse_program, read_term, ParsedTerm};
use crate::terms::{Term, VarId};

use super::convert::{from_term, to_term, ConversionPolicy};
use super::error::{BoundaryError, ErrorKind};
use super::registry::HandleRegistry;
use super::value::{HostValue, OpaqueTerm};

/// Named answer bindings, in order of first appearance in the goal.
pub type Answer = IndexMap<String, HostValue>;

#[derive(Debug, Default)]
struct Counters {
    crossings: AtomicU64,
    steps: AtomicU64,
}

/// A consulted program plus everything a host needs to query it.
///
/// The handle is `Sync`: each query runs on its own [`Machine`], and
/// cursors may be used from different threads.
#[derive(Debug)]
pub struct EngineHandle {
    db: Arc<Database>,
    registry: HandleRegistry,
    policy: ConversionPolicy,
    config: MachineConfig,
    counters: Arc<Counters>,
}

/// Consults `src` into a fresh engine.
pub fn engine_new(src: &str, policy: ConversionPolicy) -> Result<EngineHandle, BoundaryError> {
    EngineHandle::new(src, policy)
}

/// A goal parsed once and queried many times.
#[derive(Debug, Clone)]
pub struct PreparedGoal {
    text: String,
    parsed: ParsedTerm,
}

impl PreparedGoal {
    pub fn parse(goal: &str) -> Result<Self, BoundaryError> {
        let parsed = read_term(goal).map_err(|e| BoundaryError::from(e).in_goal(goal))?;
        if !parsed.term.is_callable() && !parsed.term.is_var() {
            return Err(BoundaryError::new(ErrorKind::Type, "goal is not callable").in_goal(goal));
        }
        Ok(PreparedGoal {
            text: goal.to_owned(),
            parsed,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Named variables of the goal.
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.parsed.var_names.iter().map(|(n, _)| n.as_str())
    }
}

impl EngineHandle {
    pub fn new(src: &str, policy: ConversionPolicy) -> Result<Self, BoundaryError> {
        Self::with_config(src, policy, MachineConfig::default())
    }

    pub fn with_config(
        src: &str,
        policy: ConversionPolicy,
        config: MachineConfig,
    ) -> Result<Self, BoundaryError> {
        let clauses = parse_program(src)?;
        let db = Database::from_clauses(clauses)?;
        Ok(Self::from_database(Arc::new(db), policy, config))
    }

    pub fn from_database(db: Arc<Database>, policy: ConversionPolicy, config: MachineConfig) -> Self {
        EngineHandle {
            db,
            registry: HandleRegistry::new(),
            policy,
            config,
            counters: Arc::default(),
        }
    }

    pub fn database(&self) -> &Arc<Database> {
        &self.db
    }

    pub fn registry(&self) -> &HandleRegistry {
        &self.registry
    }

    pub fn policy(&self) -> ConversionPolicy {
        self.policy
    }

    pub fn config(&self) -> &MachineConfig {
        &self.config
    }

    /// Boundary crossings so far: one per cursor pull that reached the
    /// engine.
    pub fn crossings(&self) -> u64 {
        self.counters.crossings.load(Ordering::Relaxed)
    }

    /// Resolution steps summed over every query run on this engine.
    pub fn total_steps(&self) -> u64 {
        self.counters.steps.load(Ordering::Relaxed)
    }

    pub fn reset_counters(&self) {
        self.counters.crossings.store(0, Ordering::Relaxed);
        self.counters.steps.store(0, Ordering::Relaxed);
    }

    pub fn to_term(&self, v: &HostValue, policy: ConversionPolicy) -> Result<Term, BoundaryError> {
        Ok(to_term(&self.registry, v, policy)?)
    }

    pub fn from_term(&self, t: &Term, policy: ConversionPolicy) -> Result<HostValue, BoundaryError> {
        Ok(from_term(t, policy)?)
    }

    /// Converts `v` deeply once and wraps the result as an opaque reference,
    /// so later no-conversion queries can pass it without converting again.
    pub fn make_opaque(&self, v: &HostValue) -> Result<HostValue, BoundaryError> {
        let t = self.to_term(v, ConversionPolicy::Deep)?;
        Ok(HostValue::Term(OpaqueTerm::new(t)))
    }

    /// Starts a query. No resolution happens until the first pull.
    pub fn query(
        &self,
        goal: &str,
        policy: Option<ConversionPolicy>,
    ) -> Result<SolutionCursor, BoundaryError> {
        let prepared = PreparedGoal::parse(goal)?;
        self.query_prepared(&prepared, &[], policy)
    }

    /// Starts a query with some goal variables bound to host values, which
    /// are converted under the query's policy. Bound variables are left out
    /// of the answers.
    pub fn query_with(
        &self,
        goal: &str,
        inputs: &[(&str, HostValue)],
        policy: Option<ConversionPolicy>,
    ) -> Result<SolutionCursor, BoundaryError> {
        let prepared = PreparedGoal::parse(goal)?;
        self.query_prepared(&prepared, inputs, policy)
    }

    pub fn query_prepared(
        &self,
        goal: &PreparedGoal,
        inputs: &[(&str, HostValue)],
        policy: Option<ConversionPolicy>,
    ) -> Result<SolutionCursor, BoundaryError> {
        let policy = policy.unwrap_or(self.policy);
        let parsed = &goal.parsed;
        let mut values: Vec<Option<Term>> = vec![None; parsed.n_vars];
        for (name, value) in inputs {
            let VarId(i) = parsed
                .var_names
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| {
                    BoundaryError::new(
                        ErrorKind::UnknownVariable,
                        format!("goal has no variable {name}"),
                    )
                    .in_goal(&goal.text)
                })?;
            let t = self
                .to_term(value, policy)
                .map_err(|e| e.in_goal(&goal.text))?;
            values[i] = Some(t);
        }
        let term = if inputs.is_empty() {
            parsed.term.clone()
        } else {
            substitute(&parsed.term, &values)
        };
        let mut machine = Machine::new(self.db.clone(), self.config);
        let vars = machine
            .load_query(&term, parsed.n_vars)
            .map_err(|e| BoundaryError::from(e).in_goal(&goal.text))?;
        let outputs = parsed
            .var_names
            .iter()
            .filter(|(name, v)| values[v.0].is_none() && !name.starts_with('_'))
            .map(|(name, v)| (name.clone(), vars[v.0].clone()))
            .collect();
        Ok(SolutionCursor {
            machine,
            outputs,
            policy,
            goal: goal.text.clone(),
            state: CursorState::Fresh,
            counters: self.counters.clone(),
            pulls: 0,
        })
    }

    /// First answer of `goal`, or `None` if it fails. One crossing.
    pub fn query_once(
        &self,
        goal: &str,
        policy: Option<ConversionPolicy>,
    ) -> Result<Option<Answer>, BoundaryError> {
        self.query(goal, policy)?.next_answer()
    }

    pub fn query_once_with(
        &self,
        goal: &PreparedGoal,
        inputs: &[(&str, HostValue)],
        policy: Option<ConversionPolicy>,
    ) -> Result<Option<Answer>, BoundaryError> {
        self.query_prepared(goal, inputs, policy)?.next_answer()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CursorState {
    Fresh,
    Yielded,
    Done,
}

/// Lazy enumerator of a query's answers. Every pull before exhaustion is
/// one boundary crossing; pulls after exhaustion are free and inert.
#[derive(Debug)]
pub struct SolutionCursor {
    machine: Machine,
    outputs: Vec<(String, Term)>,
    policy: ConversionPolicy,
    goal: String,
    state: CursorState,
    counters: Arc<Counters>,
    pulls: u64,
}

impl SolutionCursor {
    pub fn state(&self) -> CursorState {
        self.state
    }

    pub fn policy(&self) -> ConversionPolicy {
        self.policy
    }

    pub fn goal(&self) -> &str {
        &self.goal
    }

    /// Crossings made through this cursor.
    pub fn pulls(&self) -> u64 {
        self.pulls
    }

    /// Resolution steps of this cursor's query so far.
    pub fn steps(&self) -> u64 {
        self.machine.steps()
    }

    pub fn next_answer(&mut self) -> Result<Option<Answer>, BoundaryError> {
        if self.state == CursorState::Done {
            return Ok(None);
        }
        self.pulls += 1;
        self.counters.crossings.fetch_add(1, Ordering::Relaxed);
        let before = self.machine.steps();
        let result = self.machine.solve_next();
        self.counters
            .steps
            .fetch_add(self.machine.steps().saturating_sub(before), Ordering::Relaxed);
        match result {
            Ok(Solve::Succeeded) => {
                self.state = CursorState::Yielded;
                let snapshot = self
                    .machine
                    .snapshot_answer(&self.outputs)
                    .map_err(|e| BoundaryError::from(e).in_goal(&self.goal))?;
                snapshot
                    .into_iter()
                    .map(|(name, t)| {
                        from_term(&t, self.policy)
                            .map(|v| (name, v))
                            .map_err(|e| BoundaryError::from(e).in_goal(&self.goal))
                    })
                    .collect::<Result<Answer, _>>()
                    .map(Some)
            }
            Ok(Solve::Exhausted) => {
                self.state = CursorState::Done;
                Ok(None)
            }
            Err(e) => {
                self.state = CursorState::Done;
                Err(BoundaryError::from(e).in_goal(&self.goal))
            }
        }
    }
}

impl Iterator for SolutionCursor {
    type Item = Result<Answer, BoundaryError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_answer().transpose()
    }
}
