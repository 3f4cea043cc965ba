//! Shared test support: a state-copying reference interpreter, a random
//! program generator and a reference unifier. They share no code with the
//! engine beyond the reader.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use plb_core::engine::{Clause, Database, Machine, MachineConfig};
use plb_core::reader::{parse_program, read_term};
use plb_core::terms::Term;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RT {
    Var(usize),
    Atom(String),
    Int(i64),
    Fun(String, Vec<RT>),
}

impl RT {
    pub fn from_term(t: &Term) -> RT {
        match t {
            Term::Var(v) => RT::Var(v.0),
            Term::Atom(a) => RT::Atom(a.name().to_owned()),
            Term::Int(i) => RT::Int(*i),
            Term::Float(f) => RT::Atom(format!("float:{f}")),
            Term::Compound(c) => RT::Fun(
                c.functor().name().to_owned(),
                c.args().iter().map(RT::from_term).collect(),
            ),
            Term::Handle(_) => RT::Atom("<handle>".into()),
        }
    }

    fn offset(&self, base: usize) -> RT {
        match self {
            RT::Var(v) => RT::Var(v + base),
            RT::Fun(f, args) => RT::Fun(f.clone(), args.iter().map(|a| a.offset(base)).collect()),
            t => t.clone(),
        }
    }
}

pub type Subst = HashMap<usize, RT>;

pub fn walk(t: &RT, s: &Subst) -> RT {
    let mut cur = t.clone();
    while let RT::Var(v) = cur {
        match s.get(&v) {
            Some(next) => cur = next.clone(),
            None => return RT::Var(v),
        }
    }
    cur
}

pub fn resolve(t: &RT, s: &Subst) -> RT {
    match walk(t, s) {
        RT::Fun(f, args) => RT::Fun(f, args.iter().map(|a| resolve(a, s)).collect()),
        t => t,
    }
}

/// Textbook recursive unification without occurs check. Returns an
/// extended copy of `s`.
pub fn unify(a: &RT, b: &RT, s: &Subst) -> Option<Subst> {
    unify_with(a, b, s, false)
}

fn occurs(v: usize, t: &RT, s: &Subst) -> bool {
    match walk(t, s) {
        RT::Var(w) => v == w,
        RT::Fun(_, args) => args.iter().any(|a| occurs(v, a, s)),
        _ => false,
    }
}

pub fn unify_with(a: &RT, b: &RT, s: &Subst, occurs_check: bool) -> Option<Subst> {
    let (a, b) = (walk(a, s), walk(b, s));
    let bind = |v: usize, t: &RT| {
        if occurs_check && occurs(v, t, s) {
            return None;
        }
        let mut s2 = s.clone();
        s2.insert(v, t.clone());
        Some(s2)
    };
    match (&a, &b) {
        (RT::Var(x), RT::Var(y)) if x == y => Some(s.clone()),
        (RT::Var(x), _) => bind(*x, &b),
        (_, RT::Var(y)) => bind(*y, &a),
        (RT::Fun(f, xs), RT::Fun(g, ys)) if f == g && xs.len() == ys.len() => {
            let mut cur = s.clone();
            for (x, y) in xs.iter().zip(ys) {
                cur = unify_with(x, y, &cur, occurs_check)?;
            }
            Some(cur)
        }
        _ if a == b => Some(s.clone()),
        _ => None,
    }
}

/// Renumbers variables by first occurrence, so answers compare up to
/// renaming.
pub fn canonical(ts: &[RT]) -> Vec<RT> {
    fn go(t: &RT, map: &mut HashMap<usize, usize>) -> RT {
        match t {
            RT::Var(v) => {
                let n = map.len();
                RT::Var(*map.entry(*v).or_insert(n))
            }
            RT::Fun(f, args) => RT::Fun(f.clone(), args.iter().map(|a| go(a, map)).collect()),
            t => t.clone(),
        }
    }
    let mut map = HashMap::new();
    ts.iter().map(|t| go(t, &mut map)).collect()
}

enum Flow {
    Go,
    Stop,
    Cut(usize),
}

/// Head, body and variable count of one clause.
type RefClause = (RT, RT, usize);

/// Depth-first interpreter that copies the substitution at every choice.
/// Unification always applies the occurs check.
pub struct RefInterp {
    preds: HashMap<(String, usize), Vec<RefClause>>,
    fresh: usize,
    next_call: usize,
}

impl RefInterp {
    pub fn new(clauses: &[Clause]) -> Self {
        let mut preds: HashMap<(String, usize), Vec<RefClause>> = HashMap::new();
        for c in clauses {
            let head = RT::from_term(c.head());
            let key = match &head {
                RT::Atom(a) => (a.clone(), 0),
                RT::Fun(f, args) => (f.clone(), args.len()),
                _ => unreachable!(),
            };
            preds
                .entry(key)
                .or_default()
                .push((head, RT::from_term(c.body()), c.n_vars()));
        }
        RefInterp {
            preds,
            fresh: 0,
            next_call: 1,
        }
    }

    /// Resolved query variables of every answer, up to `limit` answers.
    pub fn run(&mut self, goal: &RT, n_vars: usize, limit: usize) -> Vec<Vec<RT>> {
        self.fresh = n_vars;
        let mut out = Vec::new();
        let qvars: Vec<RT> = (0..n_vars).map(RT::Var).collect();
        let barrier = self.call_id();
        self.solve(vec![(goal.clone(), barrier)], Subst::new(), &mut |s| {
            out.push(qvars.iter().map(|v| resolve(v, s)).collect());
            out.len() < limit
        });
        out
    }

    fn call_id(&mut self) -> usize {
        self.next_call += 1;
        self.next_call
    }

    fn first(&mut self, goal: &RT, s: &Subst) -> Option<Subst> {
        let id = self.call_id();
        let mut found = None;
        self.solve(vec![(goal.clone(), id)], s.clone(), &mut |s2| {
            found = Some(s2.clone());
            false
        });
        found
    }

    /// `goals` is a stack: the next goal is the last element.
    fn solve(&mut self, mut goals: Vec<(RT, usize)>, s: Subst, k: &mut dyn FnMut(&Subst) -> bool) -> Flow {
        let Some((goal, cut)) = goals.pop() else {
            return if k(&s) { Flow::Go } else { Flow::Stop };
        };
        let goal = walk(&goal, &s);
        let (name, args): (&str, &[RT]) = match &goal {
            RT::Atom(a) => (a.as_str(), &[]),
            RT::Fun(f, args) => (f.as_str(), args.as_slice()),
            _ => panic!("bad goal {goal:?}"),
        };
        let with = |mut g: Vec<(RT, usize)>, extra: &[(RT, usize)]| {
            g.extend(extra.iter().rev().cloned());
            g
        };
        match (name, args) {
            ("true", []) => self.solve(goals, s, k),
            ("fail" | "false", []) => Flow::Go,
            ("!", []) => match self.solve(goals, s, k) {
                Flow::Stop => Flow::Stop,
                Flow::Cut(c) if c < cut => Flow::Cut(c),
                _ => Flow::Cut(cut),
            },
            (",", [a, b]) => self.solve(with(goals, &[(a.clone(), cut), (b.clone(), cut)]), s, k),
            (";", [c, e]) => {
                if let RT::Fun(f, ct) = walk(c, &s) {
                    if f == "->" && ct.len() == 2 {
                        return match self.first(&ct[0], &s) {
                            Some(s2) => self.solve(with(goals, &[(ct[1].clone(), cut)]), s2, k),
                            None => self.solve(with(goals, &[(e.clone(), cut)]), s, k),
                        };
                    }
                }
                match self.solve(with(goals.clone(), &[(c.clone(), cut)]), s.clone(), k) {
                    Flow::Go => self.solve(with(goals, &[(e.clone(), cut)]), s, k),
                    other => other,
                }
            }
            ("->", [c, t]) => match self.first(c, &s) {
                Some(s2) => self.solve(with(goals, &[(t.clone(), cut)]), s2, k),
                None => Flow::Go,
            },
            ("\\+", [g]) => match self.first(g, &s) {
                Some(_) => Flow::Go,
                None => self.solve(goals, s, k),
            },
            ("call", [g]) => {
                let id = self.call_id();
                self.solve_opaque(goals, g.clone(), id, s, k)
            }
            ("=", [a, b]) => match unify_with(a, b, &s, true) {
                Some(s2) => self.solve(goals, s2, k),
                None => Flow::Go,
            },
            ("\\=", [a, b]) => match unify_with(a, b, &s, true) {
                Some(_) => Flow::Go,
                None => self.solve(goals, s, k),
            },
            ("==", [a, b]) if resolve(a, &s) == resolve(b, &s) => self.solve(goals, s, k),
            ("==", [_, _]) => Flow::Go,
            ("\\==", [a, b]) if resolve(a, &s) != resolve(b, &s) => self.solve(goals, s, k),
            ("\\==", [_, _]) => Flow::Go,
            ("var", [a]) if matches!(walk(a, &s), RT::Var(_)) => self.solve(goals, s, k),
            ("nonvar", [a]) if !matches!(walk(a, &s), RT::Var(_)) => self.solve(goals, s, k),
            ("var" | "nonvar", [_]) => Flow::Go,
            _ => {
                let id = self.call_id();
                let key = (name.to_owned(), args.len());
                let clauses = self.preds.get(&key).cloned().unwrap_or_else(|| panic!("unknown {key:?}"));
                for (head, body, n) in clauses {
                    let base = self.fresh;
                    self.fresh += n;
                    let Some(s2) = unify_with(&head.offset(base), &goal, &s, true) else {
                        continue;
                    };
                    let mut g = goals.clone();
                    g.push((body.offset(base), id));
                    match self.solve(g, s2, k) {
                        Flow::Go => {}
                        Flow::Stop => return Flow::Stop,
                        Flow::Cut(c) if c == id => return Flow::Go,
                        Flow::Cut(c) => return Flow::Cut(c),
                    }
                }
                Flow::Go
            }
        }
    }

    /// Runs `g` with its own cut barrier, then the rest.
    fn solve_opaque(
        &mut self,
        goals: Vec<(RT, usize)>,
        g: RT,
        id: usize,
        s: Subst,
        k: &mut dyn FnMut(&Subst) -> bool,
    ) -> Flow {
        let mut gs = goals;
        gs.push((g, id));
        match self.solve(gs, s, k) {
            Flow::Cut(c) if c == id => Flow::Go,
            other => other,
        }
    }
}

/// Engine settings for comparing random programs. Those programs may
/// unify a variable with a term containing it, which only has a defined
/// outcome under the occurs check.
pub fn checked_config(indexing: bool) -> MachineConfig {
    MachineConfig {
        indexing,
        occurs_check: true,
        ..MachineConfig::default()
    }
}

/// Answers from the engine, as canonical reference terms.
pub fn engine_answers(src: &str, query: &str, config: MachineConfig, limit: usize) -> Vec<Vec<RT>> {
    let db = Database::from_clauses(parse_program(src).expect("program parses")).expect("consult");
    let q = read_term(query).expect("query parses");
    let mut m = Machine::new(std::sync::Arc::new(db), config);
    m.collect(&q.term, q.n_vars, limit)
        .expect("engine query")
        .iter()
        .map(|row| canonical(&row.iter().map(RT::from_term).collect::<Vec<_>>()))
        .collect()
}

/// Answers from the reference interpreter, as canonical terms.
pub fn reference_answers(src: &str, query: &str, limit: usize) -> Vec<Vec<RT>> {
    let clauses = parse_program(src).expect("program parses");
    let q = read_term(query).expect("query parses");
    RefInterp::new(&clauses)
        .run(&RT::from_term(&q.term), q.n_vars, limit)
        .iter()
        .map(|row| canonical(row))
        .collect()
}

const ATOMS: [&str; 3] = ["a", "b", "c"];
const VARS: [&str; 3] = ["X", "Y", "Z"];

fn arg<R: Rng>(rng: &mut R) -> String {
    match rng.gen_range(0..10) {
        0..=3 => ATOMS.choose(rng).unwrap().to_string(),
        4..=8 => VARS.choose(rng).unwrap().to_string(),
        _ => format!("f({})", VARS.choose(rng).unwrap()),
    }
}

fn call<R: Rng>(rng: &mut R, below: usize, arity: &[usize]) -> String {
    let j = rng.gen_range(0..below);
    let args: Vec<String> = (0..arity[j]).map(|_| arg(rng)).collect();
    format!("p{j}({})", args.join(", "))
}

fn simple<R: Rng>(rng: &mut R, below: usize, arity: &[usize]) -> String {
    match rng.gen_range(0..6) {
        0..=2 => call(rng, below, arity),
        3 => format!("{} = {}", VARS.choose(rng).unwrap(), arg(rng)),
        4 => format!("{} \\= {}", VARS.choose(rng).unwrap(), arg(rng)),
        _ => format!("{} == {}", VARS.choose(rng).unwrap(), arg(rng)),
    }
}

fn body_goal<R: Rng>(rng: &mut R, below: usize, arity: &[usize]) -> String {
    match rng.gen_range(0..12) {
        0..=5 => simple(rng, below, arity),
        6 | 7 => "!".to_owned(),
        8 => format!("\\+ {}", call(rng, below, arity)),
        9 => format!("({} ; {})", simple(rng, below, arity), simple(rng, below, arity)),
        10 => format!(
            "({} -> {} ; {})",
            simple(rng, below, arity),
            simple(rng, below, arity),
            simple(rng, below, arity)
        ),
        _ => format!("call({})", call(rng, below, arity)),
    }
}

/// A small terminating program: predicate `p<i>` only calls `p<j>` with
/// `j < i`. Returns the source and a query on the last predicate.
pub fn random_program<R: Rng>(rng: &mut R) -> (String, String) {
    let n_preds = rng.gen_range(2..=4);
    let arity: Vec<usize> = (0..n_preds).map(|_| rng.gen_range(1..=2)).collect();
    let mut src = String::new();
    for i in 0..n_preds {
        for _ in 0..rng.gen_range(1..=4) {
            let head_args: Vec<String> = (0..arity[i]).map(|_| arg(rng)).collect();
            let head = format!("p{i}({})", head_args.join(", "));
            if i == 0 || rng.gen_bool(0.3) {
                src.push_str(&format!("{head}.\n"));
            } else {
                let body: Vec<String> = (0..rng.gen_range(1..=3))
                    .map(|_| body_goal(rng, i, &arity))
                    .collect();
                src.push_str(&format!("{head} :- {}.\n", body.join(", ")));
            }
        }
    }
    let top = n_preds - 1;
    let qargs: Vec<String> = (0..arity[top])
        .map(|j| if rng.gen_bool(0.8) { format!("Q{j}") } else { ATOMS.choose(rng).unwrap().to_string() })
        .collect();
    (src, format!("p{top}({})", qargs.join(", ")))
}

const TERM_ATOMS: [&str; 20] = [
    "a", "foo", "b_c", "[]", "{}", "hello world", "+", "-", "*", "=", "\\+", "->", ";", ",", "don't", "Ab",
    "!", ":-", "é", "",
];
const FUNCTORS: [&str; 14] = ["f", "g", "+", "-", "*", "=", ":-", ",", ";", "->", "\\+", "is", "Big", "a b"];

/// A random term of depth at most `depth` over variables `0..n_vars`.
pub fn random_term<R: Rng>(rng: &mut R, depth: usize, n_vars: usize) -> Term {
    use plb_core::terms::VarId;
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        return match rng.gen_range(0..5) {
            0 => Term::atom(TERM_ATOMS.choose(rng).unwrap()),
            1 => Term::Int(match rng.gen_range(0..4) {
                0 => i64::MIN,
                1 => i64::MAX,
                _ => rng.gen_range(-1000..1000),
            }),
            2 => Term::Float(*[1.5, -0.25, 1e10, 1.0e-5, 3.0, -2.0e20].choose(rng).unwrap()),
            _ => Term::Var(VarId(rng.gen_range(0..n_vars.max(1)))),
        };
    }
    match rng.gen_range(0..4) {
        0 => {
            let items: Vec<Term> = (0..rng.gen_range(0..4)).map(|_| random_term(rng, depth - 1, n_vars)).collect();
            if rng.gen_bool(0.3) {
                Term::list_with_tail(items, random_term(rng, depth - 1, n_vars))
            } else {
                Term::list(items)
            }
        }
        _ => {
            let f = FUNCTORS.choose(rng).unwrap();
            let arity = rng.gen_range(1..=3);
            Term::from_name(f, (0..arity).map(|_| random_term(rng, depth - 1, n_vars)).collect())
        }
    }
}

/// Every clause of `src` as a term, facts without a body.
pub fn clause_terms(src: &str) -> Vec<Term> {
    parse_program(src)
        .expect("fixture parses")
        .iter()
        .map(|c| {
            if c.is_fact() {
                c.head().clone()
            } else {
                Term::from_name(":-", vec![c.head().clone(), c.body().clone()])
            }
        })
        .collect()
}
