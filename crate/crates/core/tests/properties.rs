mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{canonical, checked_config, engine_answers, random_program, resolve, unify_with, Subst, RT};
use plb_core::bench::{
    kernel, run_benchmark, BenchName, BenchmarkSpec, Cell, Measured, ReportTable, Results, Summary, TableKind,
    Variant,
};
use plb_core::bridge::{from_term, to_term, ConversionPolicy, EngineHandle, HandleRegistry, HostValue};
use plb_core::engine::{Database, Machine, MachineConfig};
use plb_core::reader::{parse_program, read_term};
use plb_core::terms::{Bindings, Sym, Term, VarId};

#[derive(Debug, Clone)]
enum TrailOp {
    Fresh,
    Bind(usize, i64),
    Mark,
    Undo,
}

fn trail_op() -> impl Strategy<Value = TrailOp> {
    prop_oneof![
        2 => Just(TrailOp::Fresh),
        4 => (any::<usize>(), any::<i64>()).prop_map(|(v, x)| TrailOp::Bind(v, x)),
        1 => Just(TrailOp::Mark),
        1 => Just(TrailOp::Undo),
    ]
}

fn host_value() -> impl Strategy<Value = HostValue> {
    let leaf = prop_oneof![
        any::<i64>().prop_map(|i| HostValue::Int(i as i128)),
        (-1e9f64..1e9).prop_map(HostValue::Float),
        "[a-z][a-z0-9_]{0,6}".prop_map(HostValue::symbol),
        "[A-Z ][a-z ]{0,4}".prop_map(HostValue::symbol),
    ];
    leaf.prop_recursive(4, 48, 5, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..5).prop_map(HostValue::Seq),
            ("[a-z]{1,4}", prop::collection::vec(inner, 1..4))
                .prop_map(|(name, fields)| HostValue::record(name, fields)),
        ]
    })
}

fn program(seed: u64) -> (String, String) {
    random_program(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn run_counting(src: &str, query: &str) -> (Vec<Vec<Term>>, u64) {
    let db = Database::from_clauses(parse_program(src).unwrap()).unwrap();
    let mut m = Machine::new(Arc::new(db), checked_config(true));
    let q = read_term(query).unwrap();
    let rows = m.collect(&q.term, q.n_vars, 500).unwrap();
    (rows, m.steps())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Undoing to a mark restores exactly the bindings that existed there.
    #[test]
    fn trail_matches_shadow_model(ops in prop::collection::vec(trail_op(), 1..80)) {
        let mut b = Bindings::new();
        let mut shadow: Vec<Option<i64>> = Vec::new();
        let mut marks = Vec::new();
        for op in ops {
            match op {
                TrailOp::Fresh => {
                    b.fresh_var().unwrap();
                    shadow.push(None);
                }
                TrailOp::Bind(v, x) if !shadow.is_empty() => {
                    let v = v % shadow.len();
                    if shadow[v].is_none() {
                        b.bind(VarId(v), Term::Int(x));
                        shadow[v] = Some(x);
                    }
                }
                TrailOp::Bind(..) => {}
                TrailOp::Mark => marks.push((b.mark(), shadow.clone())),
                TrailOp::Undo => {
                    if let Some((mark, saved)) = marks.pop() {
                        b.undo_to(mark);
                        for (i, s) in shadow.iter_mut().enumerate() {
                            *s = saved.get(i).copied().flatten();
                        }
                    }
                }
            }
            for (i, s) in shadow.iter().enumerate() {
                let got = b.store.get(VarId(i)).map(|t| match t {
                    Term::Int(x) => *x,
                    other => panic!("unexpected binding {other}"),
                });
                prop_assert_eq!(got, *s);
            }
        }
    }

    #[test]
    fn interning_round_trips(s in "\\PC{1,12}") {
        let a = Sym::intern(&s);
        prop_assert_eq!(a.name(), s.as_str());
        prop_assert_eq!(Sym::intern(&s), a);
    }

    #[test]
    fn list_encoding_round_trips(items in prop::collection::vec(any::<i64>(), 0..40)) {
        let t = Term::list(items.iter().map(|&i| Term::Int(i)));
        let back: Vec<i64> = t
            .list_items()
            .unwrap()
            .into_iter()
            .map(|x| match x {
                Term::Int(i) => *i,
                other => panic!("{other}"),
            })
            .collect();
        prop_assert_eq!(back, items);
    }

    #[test]
    fn deep_conversion_round_trips(v in host_value()) {
        let reg = HandleRegistry::new();
        let t = to_term(&reg, &v, ConversionPolicy::Deep).unwrap();
        prop_assert_eq!(from_term(&t, ConversionPolicy::Deep).unwrap(), v);
        prop_assert_eq!(reg.live(), 0);
    }

    #[test]
    fn indexing_does_not_change_answers(seed in any::<u64>()) {
        let (src, query) = program(seed);
        prop_assert_eq!(
            engine_answers(&src, &query, checked_config(true), 500),
            engine_answers(&src, &query, checked_config(false), 500),
            "{}?- {}", src, query
        );
    }

    #[test]
    fn engine_agrees_with_reference_interpreter(seed in any::<u64>()) {
        let (src, query) = program(seed);
        prop_assert_eq!(
            engine_answers(&src, &query, checked_config(true), 500),
            common::reference_answers(&src, &query, 500),
            "{}?- {}", src, query
        );
    }

    #[test]
    fn step_counts_are_deterministic(seed in any::<u64>()) {
        let (src, query) = program(seed);
        let (rows_a, steps_a) = run_counting(&src, &query);
        let (rows_b, steps_b) = run_counting(&src, &query);
        prop_assert_eq!(steps_a, steps_b);
        prop_assert_eq!(rows_a.len(), rows_b.len());
    }

    /// A per-query policy applies to that cursor only.
    #[test]
    fn policy_override_is_local(n in 1usize..20, override_first in any::<bool>()) {
        let engine = EngineHandle::new("mk(N, L) :- numlist(1, N, L).\nnumlist(N, N, [N]) :- !.\nnumlist(I, N, [I|T]) :- I < N, J is I + 1, numlist(J, N, T).", ConversionPolicy::Deep).unwrap();
        let goal = format!("mk({n}, L)");
        if override_first {
            let a = engine.query_once(&goal, Some(ConversionPolicy::NoConversion)).unwrap().unwrap();
            prop_assert!(a["L"].as_opaque().is_some());
        }
        let b = engine.query_once(&goal, None).unwrap().unwrap();
        prop_assert_eq!(b["L"].as_seq().map(<[HostValue]>::len), Some(n));
        prop_assert_eq!(engine.policy(), ConversionPolicy::Deep);
        let c = engine.query_once(&goal, Some(ConversionPolicy::NoConversion)).unwrap().unwrap();
        prop_assert_eq!(c["L"].as_opaque().unwrap().materialize().unwrap(), b["L"].clone());
    }

    /// Ratio columns are the ratios of the absolute means they derive from.
    #[test]
    fn ratio_tables_agree_with_absolute_tables(
        means in prop::collection::vec((1e-4f64..100.0, 1e-4f64..100.0, 1e-4f64..100.0), 1..4),
        configs in 1usize..4,
    ) {
        let mut results = Results::new();
        let labels: Vec<String> = (0..configs).map(|i| format!("c{i}")).collect();
        for (ci, label) in labels.iter().enumerate() {
            for (bi, (h, p, x)) in means.iter().enumerate() {
                let scale = 1.0 + ci as f64;
                let bench = format!("b{bi}");
                for (variant, m) in [(Variant::HostOnly, h), (Variant::PrologOnly, p), (Variant::Cross, x)] {
                    results.insert(label, &bench, variant, Measured::Time(Summary::new(m * scale, m * 0.01)));
                }
            }
        }
        let abs = ReportTable::from_results(TableKind::AbsoluteMicro, &results, None).unwrap();
        let rel = ReportTable::from_results(TableKind::RelativeMicro, &results, Some("c0")).unwrap();
        prop_assert_eq!(abs.rows().len(), rel.rows().len());
        let mean = |c: Option<&Cell>| match c {
            Some(Cell::Value(s)) => s.mean,
            other => panic!("{other:?}"),
        };
        for (a, r) in abs.rows().iter().zip(rel.rows()) {
            use plb_core::bench::Column::*;
            let ratio = |c| match r.cell(c) {
                Some(Cell::Ratio(x)) => x.value,
                other => panic!("{other:?}"),
            };
            let (h, p, x) = (mean(a.cell(Host)), mean(a.cell(Prolog)), mean(a.cell(Cross)));
            prop_assert!((ratio(CrossOverHost) - x / h).abs() <= 1e-9 * (x / h));
            prop_assert!((ratio(CrossOverProlog) - x / p).abs() <= 1e-9 * (x / p));
            let reference = abs.rows().iter().find(|row| row.config == "c0" && row.bench == a.bench).unwrap();
            let want = x / mean(reference.cell(Cross));
            prop_assert!((ratio(CrossOverReference) - want).abs() <= 1e-9 * want);
            if a.config == "c0" {
                prop_assert!(matches!(r.cell(CrossOverReference), Some(Cell::Ratio(c)) if c.is_reference()));
            }
        }
    }
}

fn small_terms() -> Vec<RT> {
    let leaves = vec![RT::Atom("a".into()), RT::Atom("b".into()), RT::Var(0), RT::Var(1)];
    let mut all = leaves.clone();
    let mut level = leaves;
    for _ in 0..2 {
        let mut next = Vec::new();
        for x in &level {
            for y in &level {
                next.push(RT::Fun("f".into(), vec![x.clone(), y.clone()]));
            }
        }
        all.extend(next.iter().cloned());
        level = all.clone();
    }
    all.sort_by_key(|t| format!("{t:?}"));
    all.dedup();
    all
}

fn to_engine(t: &RT, vars: &[Term]) -> Term {
    match t {
        RT::Var(v) => vars[*v].clone(),
        RT::Atom(a) => Term::atom(a),
        RT::Int(i) => Term::Int(*i),
        RT::Fun(f, args) => Term::from_name(f, args.iter().map(|a| to_engine(a, vars)).collect()),
    }
}

/// Every pair of terms over {a, b, f/2, X, Y} up to depth 2 unifies as the
/// textbook algorithm says, with the same most general unifier. Both sides
/// use the occurs check so every unifier is a finite term.
#[test]
fn unification_matches_reference_on_all_small_pairs() {
    let terms = small_terms();
    assert!(terms.len() > 400, "{}", terms.len());
    let db = Arc::new(Database::new());
    let config = MachineConfig { occurs_check: true, ..MachineConfig::default() };
    let mut checked = 0;
    for (i, x) in terms.iter().enumerate() {
        for y in &terms[i..] {
            let mut m = Machine::new(db.clone(), config);
            let vars = [m.fresh_var().unwrap(), m.fresh_var().unwrap()];
            let ok = m.unify(&to_engine(x, &vars), &to_engine(y, &vars)).unwrap();
            let want = unify_with(x, y, &Subst::new(), true);
            assert_eq!(ok, want.is_some(), "{x:?} = {y:?}");
            if let Some(s) = want {
                let theirs = canonical(&[resolve(&RT::Var(0), &s), resolve(&RT::Var(1), &s)]);
                let ours: Vec<RT> = vars.iter().map(|v| RT::from_term(&m.resolve(v).unwrap())).collect();
                assert_eq!(canonical(&ours), theirs, "{x:?} = {y:?}");
                // Without the check, finite unifiers come out the same.
                let mut m = Machine::new(db.clone(), MachineConfig::default());
                let vars = [m.fresh_var().unwrap(), m.fresh_var().unwrap()];
                assert!(m.unify(&to_engine(x, &vars), &to_engine(y, &vars)).unwrap());
                let ours: Vec<RT> = vars.iter().map(|v| RT::from_term(&m.resolve(v).unwrap())).collect();
                assert_eq!(canonical(&ours), theirs, "{x:?} = {y:?} without occurs check");
            }
            checked += 1;
        }
    }
    assert!(checked > 80_000);
}

/// Larger K means more work: strictly more steps and no faster.
#[test]
fn scale_ladder_is_monotone() {
    for name in [BenchName::L1A0R, BenchName::TCons] {
        let mut last: Option<(u64, f64)> = None;
        for k in [10u64, 100, 1_000, 10_000] {
            let spec = BenchmarkSpec::new(name, Variant::PrologOnly).scale(k).iterations(5).warmups(1);
            let run = run_benchmark(&spec).unwrap();
            let steps = run.steps[0];
            let mean = run.summary().unwrap().mean;
            if let Some((s0, m0)) = last {
                assert!(steps > s0, "{name} K={k}: {steps} steps after {s0}");
                assert!(mean >= m0, "{name} K={k}: {mean}s after {m0}s");
            }
            last = Some((steps, mean));
        }
    }
}

#[test]
fn handle_slots_are_reused_and_released() {
    let reg = HandleRegistry::new();
    for i in 0..1_000_000i128 {
        let h = reg.register(HostValue::Int(i));
        assert_eq!(h.slot(), 0);
    }
    assert_eq!(reg.live(), 0);
    assert_eq!(reg.allocated(), 1);

    let held: Vec<_> = (0..100).map(|i| reg.register(HostValue::Int(i))).collect();
    assert_eq!(reg.live(), 100);
    drop(held);
    assert_eq!(reg.live(), 0);
    assert_eq!(reg.allocated(), 100);
}

#[test]
fn handles_from_queries_are_released() {
    let engine = EngineHandle::new("keep(X, X).", ConversionPolicy::NoConversion).unwrap();
    for i in 0..10_000i64 {
        let input = HostValue::seq([HostValue::Int(i as i128)]);
        let mut cursor = engine.query_with("keep(A, B)", &[("A", input.clone())], None).unwrap();
        let ans = cursor.next_answer().unwrap().unwrap();
        assert_eq!(ans["B"], input);
    }
    assert_eq!(engine.registry().live(), 0);
    assert!(engine.registry().allocated() <= 2, "{}", engine.registry().allocated());
}

#[test]
fn kernel_steps_repeat_exactly() {
    let spec = BenchmarkSpec::new(BenchName::Lists, Variant::Cross).scale(300);
    let mut k = kernel(&spec).unwrap();
    let a = k.run_checked().unwrap();
    let b = k.run_checked().unwrap();
    assert_eq!(a.steps, b.steps);
    assert_eq!(a.crossings, b.crossings);
}
