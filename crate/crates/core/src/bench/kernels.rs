use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::bridge::{
    from_term, BoundaryError, ConversionPolicy, EngineHandle, HostValue, PreparedGoal,
};
use crate::engine::{Database, EngineError, Machine, MachineConfig, Solve};
use crate::reader::{parse_program, read_term, ParsedTerm, ReadError};
use crate::terms::{Bindings, Term};

use super::oracles::{self, Graph, Lit};
use super::report::ReportError;
use super::stats::StatsError;

pub const MICRO_SRC: &str = include_str!("../../fixtures/micro.pl");
pub const SAT_SRC: &str = include_str!("../../fixtures/sat.pl");
pub const ROUTE_SRC: &str = include_str!("../../fixtures/route.pl");
pub const TUBE_SRC: &str = include_str!("../../fixtures/tube.pl");
pub const CONNECT4_SRC: &str = include_str!("../../fixtures/connect4.pl");

/// Search depth of the connect4 kernel.
pub const CONNECT4_DEPTH: u32 = 4;
/// Elements per list in the Lists kernel.
pub const LIST_LEN: u64 = 100;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{name} has no {variant} variant")]
    VariantUnavailable { name: BenchName, variant: Variant },
    #[error("invalid benchmark spec: {0}")]
    InvalidSpec(String),
    #[error("{name} ({variant}) returned {got}, expected {expected}")]
    Mismatch {
        name: BenchName,
        variant: Variant,
        expected: String,
        got: String,
    },
    #[error("{name} ({variant}): {message}")]
    BadResult {
        name: BenchName,
        variant: Variant,
        message: String,
    },
    #[error("unknown benchmark '{0}'")]
    UnknownBenchmark(String),
    #[error("unknown variant '{0}'")]
    UnknownVariant(String),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Read(#[from] ReadError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BenchName {
    SmallFunc,
    L1A0R,
    L1A1R,
    NdL1A1R,
    TCons,
    Lists,
    SatModels,
    Tube,
    Connect4,
}

impl BenchName {
    pub const MICRO: [BenchName; 6] = [
        BenchName::SmallFunc,
        BenchName::L1A0R,
        BenchName::L1A1R,
        BenchName::NdL1A1R,
        BenchName::TCons,
        BenchName::Lists,
    ];
    pub const LARGER: [BenchName; 3] = [BenchName::SatModels, BenchName::Tube, BenchName::Connect4];
    pub const ALL: [BenchName; 9] = [
        BenchName::SmallFunc,
        BenchName::L1A0R,
        BenchName::L1A1R,
        BenchName::NdL1A1R,
        BenchName::TCons,
        BenchName::Lists,
        BenchName::SatModels,
        BenchName::Tube,
        BenchName::Connect4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchName::SmallFunc => "SmallFunc",
            BenchName::L1A0R => "L1A0R",
            BenchName::L1A1R => "L1A1R",
            BenchName::NdL1A1R => "NdL1A1R",
            BenchName::TCons => "TCons",
            BenchName::Lists => "Lists",
            BenchName::SatModels => "sat-models",
            BenchName::Tube => "tube",
            BenchName::Connect4 => "connect4",
        }
    }

    pub fn is_micro(self) -> bool {
        Self::MICRO.contains(&self)
    }

    /// Only micro benchmarks have a host-only implementation.
    pub fn has_variant(self, v: Variant) -> bool {
        v != Variant::HostOnly || self.is_micro()
    }

    /// Scale used when none is given: loop length, solution count, list
    /// element count, variable count, query count or plies.
    pub fn default_scale(self) -> u64 {
        match self {
            BenchName::SmallFunc => 10_000,
            BenchName::L1A0R | BenchName::L1A1R => 100_000,
            BenchName::NdL1A1R => 10_000,
            BenchName::TCons => 10_000,
            BenchName::Lists => 10_000,
            BenchName::SatModels => 8,
            BenchName::Tube => 100,
            BenchName::Connect4 => 2,
        }
    }
}

impl fmt::Display for BenchName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchName {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        BenchName::ALL
            .into_iter()
            .find(|b| b.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| BenchError::UnknownBenchmark(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    HostOnly,
    PrologOnly,
    Cross,
    CrossNc,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::HostOnly,
        Variant::PrologOnly,
        Variant::Cross,
        Variant::CrossNc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::HostOnly => "host",
            Variant::PrologOnly => "prolog",
            Variant::Cross => "cross",
            Variant::CrossNc => "cross-nc",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| BenchError::UnknownVariant(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchmarkSpec {
    pub name: BenchName,
    pub variant: Variant,
    pub scale: u64,
    pub iterations: usize,
    pub warmups: usize,
    pub indexing: bool,
}

impl BenchmarkSpec {
    pub fn new(name: BenchName, variant: Variant) -> Self {
        BenchmarkSpec {
            name,
            variant,
            scale: name.default_scale(),
            iterations: 30,
            warmups: 3,
            indexing: true,
        }
    }

    pub fn scale(mut self, k: u64) -> Self {
        self.scale = k;
        self
    }

    pub fn iterations(mut self, n: usize) -> Self {
        self.iterations = n;
        self
    }

    pub fn warmups(mut self, n: usize) -> Self {
        self.warmups = n;
        self
    }

    pub fn indexing(mut self, on: bool) -> Self {
        self.indexing = on;
        self
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if !self.name.has_variant(self.variant) {
            return Err(BenchError::VariantUnavailable {
                name: self.name,
                variant: self.variant,
            });
        }
        if self.scale == 0 {
            return Err(BenchError::InvalidSpec("scale must be positive".into()));
        }
        if self.iterations == 0 {
            return Err(BenchError::InvalidSpec("iterations must be positive".into()));
        }
        if self.name == BenchName::SatModels && (!self.scale.is_multiple_of(2) || self.scale > 24) {
            return Err(BenchError::InvalidSpec(
                "sat-models scale is an even variable count of at most 24".into(),
            ));
        }
        Ok(())
    }

    fn machine_config(&self) -> MachineConfig {
        MachineConfig {
            indexing: self.indexing,
            ..MachineConfig::default()
        }
    }
}

/// What one kernel run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub value: HostValue,
    /// Cursor pulls that reached the engine.
    pub crossings: u64,
    pub steps: u64,
}

type RunFn = Box<dyn FnMut() -> Result<Outcome, BenchError>>;

/// A prepared unit of work with a known correct result.
pub struct Kernel {
    spec: BenchmarkSpec,
    expected: HostValue,
    run: RunFn,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("spec", &self.spec)
            .field("expected", &self.expected)
            .finish_non_exhaustive()
    }
}

impl Kernel {
    pub fn spec(&self) -> &BenchmarkSpec {
        &self.spec
    }

    pub fn expected(&self) -> &HostValue {
        &self.expected
    }

    /// Replaces the value runs are checked against.
    pub fn with_expected(mut self, v: HostValue) -> Self {
        self.expected = v;
        self
    }

    /// One run, unchecked.
    pub fn run(&mut self) -> Result<Outcome, BenchError> {
        (self.run)()
    }

    /// One run whose value must equal the expected one.
    pub fn run_checked(&mut self) -> Result<Outcome, BenchError> {
        let out = self.run()?;
        if out.value != self.expected {
            return Err(BenchError::Mismatch {
                name: self.spec.name,
                variant: self.spec.variant,
                expected: brief(&self.expected),
                got: brief(&out.value),
            });
        }
        Ok(out)
    }
}

fn brief(v: &HostValue) -> String {
    let s = format!("{v:?}");
    if s.len() > 120 {
        format!("{}...", &s[..s.char_indices().nth(117).map_or(s.len(), |(i, _)| i)])
    } else {
        s
    }
}

/// Builds the kernel for `spec`. Consulting and oracle computation happen
/// here, outside the timed runs.
pub fn kernel(spec: &BenchmarkSpec) -> Result<Kernel, BenchError> {
    spec.validate()?;
    let k = spec.scale;
    let (expected, run) = match spec.name {
        BenchName::SmallFunc => (int(k), small_func(spec)?),
        BenchName::L1A0R => (HostValue::symbol("done"), l1a0r(spec)?),
        BenchName::L1A1R => (int(k), l1a1r(spec)?),
        BenchName::NdL1A1R => (int(k * (k + 1) / 2), nd_l1a1r(spec)?),
        BenchName::TCons => (int(k), tcons(spec)?),
        BenchName::Lists => lists(spec)?,
        BenchName::SatModels => sat_models(spec)?,
        BenchName::Tube => tube(spec)?,
        BenchName::Connect4 => connect4(spec)?,
    };
    Ok(Kernel {
        spec: *spec,
        expected,
        run,
    })
}

fn int(k: u64) -> HostValue {
    HostValue::Int(k as i128)
}

fn consult(src: &str) -> Result<Arc<Database>, BenchError> {
    Ok(Arc::new(Database::from_clauses(parse_program(src)?)?))
}

fn engine(spec: &BenchmarkSpec, src: &str) -> Result<EngineHandle, BenchError> {
    let policy = match spec.variant {
        Variant::CrossNc => ConversionPolicy::NoConversion,
        _ => ConversionPolicy::Deep,
    };
    Ok(EngineHandle::from_database(consult(src)?, policy, spec.machine_config()))
}

fn bad(spec: &BenchmarkSpec, message: impl Into<String>) -> BenchError {
    BenchError::BadResult {
        name: spec.name,
        variant: spec.variant,
        message: message.into(),
    }
}

/// Runs a goal on a bare machine, with no conversion or crossing
/// bookkeeping, calling `each` per solution until it returns false.
struct Direct {
    db: Arc<Database>,
    config: MachineConfig,
    goal: ParsedTerm,
}

impl Direct {
    fn new(spec: &BenchmarkSpec, src: &str, goal: &str) -> Result<Self, BenchError> {
        Ok(Direct {
            db: consult(src)?,
            config: spec.machine_config(),
            goal: read_term(goal)?,
        })
    }

    fn var(&self, name: &str) -> usize {
        self.goal
            .var_names
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.0)
            .expect("goal variable")
    }

    fn solve(
        &self,
        mut each: impl FnMut(&Machine, &[Term]) -> Result<bool, BenchError>,
    ) -> Result<u64, BenchError> {
        let mut m = Machine::new(self.db.clone(), self.config);
        let vars = m.load_query(&self.goal.term, self.goal.n_vars)?;
        while m.solve_next()? == Solve::Succeeded {
            if !each(&m, &vars)? {
                break;
            }
        }
        Ok(m.steps())
    }

    /// Value of `var` in the first solution.
    fn first(&self, var: &str) -> Result<(Term, u64), BenchError> {
        let i = self.var(var);
        let mut out = None;
        let steps = self.solve(|m, vars| {
            out = Some(m.resolve(&vars[i])?);
            Ok(false)
        })?;
        let t = out.ok_or_else(|| BenchError::InvalidSpec("goal failed".into()))?;
        Ok((t, steps))
    }
}

fn direct_run(spec: &BenchmarkSpec, src: &str, goal: String, var: &'static str) -> Result<RunFn, BenchError> {
    let d = Direct::new(spec, src, &goal)?;
    Ok(Box::new(move || {
        let (t, steps) = d.first(var)?;
        Ok(Outcome {
            value: from_term(&t, ConversionPolicy::Deep).map_err(BoundaryError::from)?,
            crossings: 0,
            steps,
        })
    }))
}

/// Measures crossings and steps of `body` against `engine`'s counters.
fn counted(
    engine: &EngineHandle,
    body: impl FnOnce() -> Result<HostValue, BenchError>,
) -> Result<Outcome, BenchError> {
    let (c0, s0) = (engine.crossings(), engine.total_steps());
    let value = body()?;
    Ok(Outcome {
        value,
        crossings: engine.crossings() - c0,
        steps: engine.total_steps() - s0,
    })
}

fn host(body: impl FnMut() -> HostValue + 'static) -> RunFn {
    let mut body = body;
    Box::new(move || {
        Ok(Outcome {
            value: body(),
            crossings: 0,
            steps: 0,
        })
    })
}

/// Single-answer cross query with the given inputs; returns `var`.
fn cross_once(
    spec: &BenchmarkSpec,
    engine: &EngineHandle,
    goal: &PreparedGoal,
    inputs: &[(&str, HostValue)],
    var: &str,
) -> Result<HostValue, BenchError> {
    let mut ans = engine
        .query_once_with(goal, inputs, None)?
        .ok_or_else(|| bad(spec, format!("{} failed", goal.text())))?;
    ans.swap_remove(var)
        .ok_or_else(|| bad(spec, format!("no binding for {var}")))
}

fn small_func(spec: &BenchmarkSpec) -> Result<RunFn, BenchError> {
    let k = spec.scale;
    match spec.variant {
        Variant::HostOnly => Ok(host(move || {
            #[inline(never)]
            fn inc(x: i64) -> i64 {
                x + 1
            }
            let mut x = 0i64;
            for _ in 0..k {
                x = inc(black_box(x));
            }
            HostValue::Int(x as i128)
        })),
        Variant::PrologOnly => direct_run(spec, MICRO_SRC, format!("chain({k}, 0, R)"), "R"),
        Variant::Cross | Variant::CrossNc => {
            let engine = engine(spec, MICRO_SRC)?;
            let goal = PreparedGoal::parse("inc(X, Y)")?;
            let spec = *spec;
            Ok(Box::new(move || {
                counted(&engine, || {
                    let mut x = HostValue::Int(0);
                    for _ in 0..k {
                        x = cross_once(&spec, &engine, &goal, &[("X", x)], "Y")?;
                    }
                    Ok(x)
                })
            }))
        }
    }
}

/// A one-crossing kernel: `goal` with `N` bound to the scale, answer in `R`.
fn one_crossing(spec: &BenchmarkSpec, src: &str, goal: &str) -> Result<RunFn, BenchError> {
    let engine = engine(spec, src)?;
    let goal = PreparedGoal::parse(goal)?;
    let spec = *spec;
    Ok(Box::new(move || {
        counted(&engine, || cross_once(&spec, &engine, &goal, &[("N", int(spec.scale))], "R"))
    }))
}

fn l1a0r(spec: &BenchmarkSpec) -> Result<RunFn, BenchError> {
    let k = spec.scale;
    match spec.variant {
        Variant::HostOnly => Ok(host(move || {
            let mut n = black_box(k);
            while n != 0 {
                n = black_box(n - 1);
            }
            HostValue::symbol("done")
        })),
        Variant::PrologOnly => direct_run(spec, MICRO_SRC, format!("l1a0r({k}, R)"), "R"),
        _ => one_crossing(spec, MICRO_SRC, "l1a0r(N, R)"),
    }
}

fn l1a1r(spec: &BenchmarkSpec) -> Result<RunFn, BenchError> {
    let k = spec.scale;
    match spec.variant {
        Variant::HostOnly => Ok(host(move || {
            let (mut n, mut acc) = (black_box(k), 0u64);
            while n != 0 {
                acc = black_box(acc + 1);
                n -= 1;
            }
            int(acc)
        })),
        Variant::PrologOnly => direct_run(spec, MICRO_SRC, format!("l1a1r({k}, R)"), "R"),
        _ => one_crossing(spec, MICRO_SRC, "l1a1r(N, R)"),
    }
}

fn nd_l1a1r(spec: &BenchmarkSpec) -> Result<RunFn, BenchError> {
    let k = spec.scale;
    match spec.variant {
        Variant::HostOnly => Ok(host(move || {
            let sum: u64 = (1..=black_box(k)).map(black_box).sum();
            int(sum)
        })),
        Variant::PrologOnly => {
            let d = Direct::new(spec, MICRO_SRC, &format!("count_to({k}, X)"))?;
            let x = d.var("X");
            Ok(Box::new(move || {
                let mut sum = 0i128;
                let steps = d.solve(|m, vars| {
                    match m.bindings().deref(&vars[x]).map_err(EngineError::from)? {
                        Term::Int(i) => sum += *i as i128,
                        t => return Err(EngineError::type_error("integer", t).into()),
                    }
                    Ok(true)
                })?;
                Ok(Outcome {
                    value: HostValue::Int(sum),
                    crossings: 0,
                    steps,
                })
            }))
        }
        _ => {
            let engine = engine(spec, MICRO_SRC)?;
            let goal = PreparedGoal::parse("count_to(K, X)")?;
            let spec = *spec;
            Ok(Box::new(move || {
                counted(&engine, || {
                    let mut sum = 0i128;
                    let cursor = engine.query_prepared(&goal, &[("K", int(k))], None)?;
                    for ans in cursor {
                        let x = ans?.get("X").and_then(HostValue::as_int);
                        sum += x.ok_or_else(|| bad(&spec, "X is not an integer"))?;
                    }
                    Ok(HostValue::Int(sum))
                })
            }))
        }
    }
}

/// Depth of a chain `s(_, s(_, ... nil))`.
fn term_depth(b: Option<&Bindings>, t: &Term) -> Result<Option<u64>, EngineError> {
    let mut cur = t;
    let mut depth = 0;
    loop {
        if let Some(b) = b {
            cur = b.deref(cur)?;
        }
        match cur {
            Term::Compound(c) if c.functor().name() == "s" && c.arity() == 2 => {
                depth += 1;
                cur = &c.args()[1];
            }
            Term::Atom(a) if a.name() == "nil" => return Ok(Some(depth)),
            _ => return Ok(None),
        }
    }
}

fn record_depth(v: &HostValue) -> Option<u64> {
    let mut cur = v;
    let mut depth = 0;
    loop {
        match cur {
            HostValue::Record { name, fields } if name == "s" && fields.len() == 2 => {
                depth += 1;
                cur = &fields[1];
            }
            HostValue::Symbol(s) if s == "nil" => return Some(depth),
            _ => return None,
        }
    }
}

fn tcons(spec: &BenchmarkSpec) -> Result<RunFn, BenchError> {
    let k = spec.scale;
    let s = *spec;
    match spec.variant {
        Variant::HostOnly => Ok(Box::new(move || {
            let mut t = HostValue::symbol("nil");
            for n in 1..=k {
                t = HostValue::record("s", vec![int(n), t]);
            }
            let d = record_depth(black_box(&t)).ok_or_else(|| bad(&s, "malformed chain"))?;
            Ok(Outcome {
                value: int(d),
                crossings: 0,
                steps: 0,
            })
        })),
        Variant::PrologOnly => {
            let d = Direct::new(spec, MICRO_SRC, &format!("tcons({k}, T)"))?;
            let t = d.var("T");
            Ok(Box::new(move || {
                let mut depth = None;
                let steps = d.solve(|m, vars| {
                    depth = term_depth(Some(m.bindings()), &vars[t])?;
                    Ok(false)
                })?;
                Ok(Outcome {
                    value: int(depth.ok_or_else(|| bad(&s, "malformed chain"))?),
                    crossings: 0,
                    steps,
                })
            }))
        }
        _ => {
            let engine = engine(spec, MICRO_SRC)?;
            let goal = PreparedGoal::parse("tcons(N, T)")?;
            Ok(Box::new(move || {
                counted(&engine, || {
                    let t = cross_once(&s, &engine, &goal, &[("N", int(k))], "T")?;
                    let depth = match &t {
                        HostValue::Term(o) => term_depth(None, o.term())?,
                        v => record_depth(v),
                    };
                    Ok(int(depth.ok_or_else(|| bad(&s, "malformed chain"))?))
                })
            }))
        }
    }
}

fn lists(spec: &BenchmarkSpec) -> Result<(HostValue, RunFn), BenchError> {
    let rounds = spec.scale.div_ceil(LIST_LEN);
    let base: Vec<i64> = (1..=LIST_LEN as i64).collect();
    let mut want = base.clone();
    if rounds % 2 == 1 {
        want.reverse();
    }
    let expected = HostValue::from(want);
    let s = *spec;
    let run: RunFn = match spec.variant {
        Variant::HostOnly => Box::new(move || {
            let mut l = base.clone();
            for _ in 0..rounds {
                l = black_box(l.iter().rev().copied().collect());
            }
            Ok(Outcome {
                value: HostValue::from(l),
                crossings: 0,
                steps: 0,
            })
        }),
        Variant::PrologOnly => direct_run(
            spec,
            MICRO_SRC,
            format!("numlist(1, {LIST_LEN}, L), rev_times({rounds}, L, R)"),
            "R",
        )?,
        Variant::Cross | Variant::CrossNc => {
            let engine = engine(spec, MICRO_SRC)?;
            let goal = PreparedGoal::parse("rev(L, R)")?;
            let nc = spec.variant == Variant::CrossNc;
            Box::new(move || {
                counted(&engine, || {
                    let host_list = HostValue::from(base.clone());
                    // Under no conversion the list is converted once up
                    // front and then only passed by reference.
                    let mut l = if nc { engine.make_opaque(&host_list)? } else { host_list };
                    for _ in 0..rounds {
                        l = cross_once(&s, &engine, &goal, &[("L", l)], "R")?;
                    }
                    match &l {
                        HostValue::Term(o) => Ok(o.materialize().map_err(BoundaryError::from)?),
                        _ => Ok(l),
                    }
                })
            })
        }
    };
    Ok((expected, run))
}

fn cnf_value(cnf: &[Vec<Lit>]) -> HostValue {
    HostValue::seq(cnf.iter().map(|c| {
        HostValue::seq(c.iter().map(|l| match *l {
            Lit::Pos(v) => HostValue::record("pos", vec![int(v as u64)]),
            Lit::Neg(v) => HostValue::record("neg", vec![int(v as u64)]),
        }))
    }))
}

fn cnf_text(cnf: &[Vec<Lit>]) -> String {
    let clauses: Vec<String> = cnf
        .iter()
        .map(|c| {
            let lits: Vec<String> = c
                .iter()
                .map(|l| match l {
                    Lit::Pos(v) => format!("pos({v})"),
                    Lit::Neg(v) => format!("neg({v})"),
                })
                .collect();
            format!("[{}]", lits.join(", "))
        })
        .collect();
    format!("[{}]", clauses.join(", "))
}

fn sat_models(spec: &BenchmarkSpec) -> Result<(HostValue, RunFn), BenchError> {
    let n = spec.scale as usize;
    let cnf = pigeon_or_trivial(n);
    let expected = int(oracles::count_models(&cnf, n));
    let s = *spec;
    let run: RunFn = match spec.variant {
        Variant::HostOnly => unreachable!("validated"),
        Variant::PrologOnly => {
            let d = Direct::new(spec, SAT_SRC, &format!("models({n}, {}, Vs)", cnf_text(&cnf)))?;
            Box::new(move || {
                let mut count = 0u64;
                let steps = d.solve(|_, _| {
                    count += 1;
                    Ok(true)
                })?;
                Ok(Outcome {
                    value: int(count),
                    crossings: 0,
                    steps,
                })
            })
        }
        Variant::Cross | Variant::CrossNc => {
            let engine = engine(spec, SAT_SRC)?;
            let goal = PreparedGoal::parse("models(N, Cs, Vs)")?;
            let host_cnf = cnf_value(&cnf);
            let nc = spec.variant == Variant::CrossNc;
            Box::new(move || {
                counted(&engine, || {
                    let cs = if nc { engine.make_opaque(&host_cnf)? } else { host_cnf.clone() };
                    let cursor = engine.query_prepared(&goal, &[("N", int(n as u64)), ("Cs", cs)], None)?;
                    let mut count = 0u64;
                    for ans in cursor {
                        let ans = ans?;
                        let vs = ans.get("Vs").ok_or_else(|| bad(&s, "no model"))?;
                        // Deep answers are checked against the formula;
                        // opaque ones are only counted.
                        if let Some(vals) = vs.as_seq() {
                            let a: Vec<bool> = vals.iter().map(|v| v.as_symbol() == Some("t")).collect();
                            if a.len() != n || !oracles::satisfies(&cnf, &a) {
                                return Err(bad(&s, format!("{vs:?} is not a model")));
                            }
                        }
                        count += 1;
                    }
                    Ok(int(count))
                })
            })
        }
    };
    Ok((expected, run))
}

/// Two-pigeon formula over `n` variables (`n` even); below 2 variables the
/// formula is the single clause `[x1]`.
fn pigeon_or_trivial(n: usize) -> Vec<Vec<Lit>> {
    if n < 2 {
        vec![vec![Lit::Pos(1)]]
    } else {
        oracles::pigeon_cnf(n / 2)
    }
}

fn tube(spec: &BenchmarkSpec) -> Result<(HostValue, RunFn), BenchError> {
    let graph = Graph::from_facts(TUBE_SRC)?;
    let pairs = oracles::route_pairs(&graph.stations(), spec.scale as usize);
    let mut total = 0u64;
    for (a, b) in &pairs {
        let d = graph
            .distance(a, b)
            .ok_or_else(|| BenchError::InvalidSpec(format!("{a} cannot reach {b}")))?;
        total += d as u64 + 1;
    }
    let src = format!("{ROUTE_SRC}{TUBE_SRC}");
    let s = *spec;
    let run: RunFn = match spec.variant {
        Variant::HostOnly => unreachable!("validated"),
        Variant::PrologOnly => {
            let list: Vec<String> = pairs.iter().map(|(a, b)| format!("{a}-{b}")).collect();
            let goal = format!("all_routes([{}], 0, T)", list.join(", "));
            direct_run(spec, &src, goal, "T")?
        }
        Variant::Cross | Variant::CrossNc => {
            let engine = engine(spec, &src)?;
            let goal = PreparedGoal::parse("route_len(A, B, P, N)")?;
            Box::new(move || {
                counted(&engine, || {
                    let mut total = 0i128;
                    for (a, b) in &pairs {
                        let inputs = [("A", HostValue::symbol(a.as_str())), ("B", HostValue::symbol(b.as_str()))];
                        let ans = engine
                            .query_once_with(&goal, &inputs, None)?
                            .ok_or_else(|| bad(&s, format!("no route {a} to {b}")))?;
                        let n = ans.get("N").and_then(HostValue::as_int).ok_or_else(|| bad(&s, "N"))?;
                        if let Some(HostValue::Seq(path)) = ans.get("P") {
                            let names: Vec<&str> = path.iter().filter_map(HostValue::as_symbol).collect();
                            if !graph.is_shortest_path(a, b, &names) {
                                return Err(bad(&s, format!("{names:?} is not a shortest route")));
                            }
                        }
                        total += n;
                    }
                    Ok(HostValue::Int(total))
                })
            })
        }
    };
    Ok((int(total), run))
}

fn connect4(spec: &BenchmarkSpec) -> Result<(HostValue, RunFn), BenchError> {
    let plies = spec.scale as usize;
    let moves = oracles::connect4_game(CONNECT4_DEPTH, plies);
    let expected = HostValue::seq(moves.iter().map(|&m| int(m as u64)));
    let s = *spec;
    let run: RunFn = match spec.variant {
        Variant::HostOnly => unreachable!("validated"),
        Variant::PrologOnly => direct_run(
            spec,
            CONNECT4_SRC,
            format!("game(x, {CONNECT4_DEPTH}, {plies}, Ms)"),
            "Ms",
        )?,
        Variant::Cross | Variant::CrossNc => {
            let engine = engine(spec, CONNECT4_SRC)?;
            let start = PreparedGoal::parse("empty_board(B)")?;
            let ply = PreparedGoal::parse("ply(B, P, D, M, NB, St)")?;
            Box::new(move || {
                counted(&engine, || {
                    let mut board = cross_once(&s, &engine, &start, &[], "B")?;
                    let mut player = oracles::Piece::X;
                    let mut moves = Vec::new();
                    for _ in 0..plies {
                        let inputs = [
                            ("B", board),
                            ("P", HostValue::symbol(player.symbol())),
                            ("D", int(CONNECT4_DEPTH as u64)),
                        ];
                        let mut ans = engine
                            .query_once_with(&ply, &inputs, None)?
                            .ok_or_else(|| bad(&s, "ply failed"))?;
                        let status = ans.get("St").and_then(HostValue::as_symbol).map(str::to_owned);
                        if status.as_deref() == Some("full") {
                            break;
                        }
                        let m = ans.get("M").and_then(HostValue::as_int).ok_or_else(|| bad(&s, "M"))?;
                        moves.push(HostValue::Int(m));
                        board = ans.swap_remove("NB").ok_or_else(|| bad(&s, "NB"))?;
                        if status.as_deref() == Some("won") {
                            break;
                        }
                        player = player.other();
                    }
                    Ok(HostValue::Seq(moves))
                })
            })
        }
    };
    Ok((expected, run))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(name: BenchName, variant: Variant, k: u64) -> Outcome {
        let spec = BenchmarkSpec::new(name, variant).scale(k);
        kernel(&spec).unwrap().run_checked().unwrap()
    }

    #[test]
    fn parse_names() {
        assert_eq!("sat-models".parse::<BenchName>().unwrap(), BenchName::SatModels);
        assert_eq!("l1a1r".parse::<BenchName>().unwrap(), BenchName::L1A1R);
        assert!("nope".parse::<BenchName>().is_err());
        assert_eq!("cross-nc".parse::<Variant>().unwrap(), Variant::CrossNc);
    }

    #[test]
    fn larger_benchmarks_have_no_host_variant() {
        for name in BenchName::LARGER {
            let err = kernel(&BenchmarkSpec::new(name, Variant::HostOnly)).unwrap_err();
            assert!(matches!(err, BenchError::VariantUnavailable { .. }));
        }
    }

    #[test]
    fn l1a1r_cross_returns_k() {
        let out = run(BenchName::L1A1R, Variant::Cross, 1000);
        assert_eq!(out.value, HostValue::Int(1000));
        assert_eq!(out.crossings, 1);
    }

    #[test]
    fn nd_sum_and_pulls() {
        let out = run(BenchName::NdL1A1R, Variant::Cross, 5);
        assert_eq!(out.value, HostValue::Int(15));
        assert_eq!(out.crossings, 6);
    }

    #[test]
    fn small_func_crossings() {
        assert_eq!(run(BenchName::SmallFunc, Variant::Cross, 50).crossings, 50);
        assert_eq!(run(BenchName::SmallFunc, Variant::CrossNc, 50).crossings, 50);
    }

    #[test]
    fn lists_crossings() {
        assert_eq!(run(BenchName::Lists, Variant::Cross, 1000).crossings, 10);
        assert_eq!(run(BenchName::Lists, Variant::CrossNc, 1050).crossings, 11);
    }

    #[test]
    fn every_variant_validates_at_small_scale() {
        for name in BenchName::ALL {
            let k = match name {
                BenchName::SatModels => 6,
                BenchName::Tube => 5,
                BenchName::Connect4 => 3,
                _ => 10,
            };
            for v in Variant::ALL {
                if name.has_variant(v) {
                    run(name, v, k);
                }
            }
        }
    }

    #[test]
    fn wrong_expectation_is_a_mismatch() {
        let spec = BenchmarkSpec::new(BenchName::L1A1R, Variant::Cross).scale(10);
        let mut k = kernel(&spec).unwrap().with_expected(HostValue::Int(11));
        assert!(matches!(k.run_checked(), Err(BenchError::Mismatch { .. })));
    }
}
