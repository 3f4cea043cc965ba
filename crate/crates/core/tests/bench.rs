use plb_core::bench::kernels::{ROUTE_SRC, TUBE_SRC};
use plb_core::bench::oracles::{self, Graph};
use plb_core::bench::{check, kernel, run_benchmark, BenchError, BenchName, BenchmarkSpec, Variant};
use plb_core::bridge::{engine_new, ConversionPolicy, HostValue};
use plb_core::reader::parse_program;

fn value(name: BenchName, variant: Variant, k: u64) -> HostValue {
    check(&BenchmarkSpec::new(name, variant).scale(k)).unwrap_or_else(|e| panic!("{name} {variant} K={k}: {e}"))
}

#[test]
fn route_follows_a_chain() {
    let src = format!("{ROUTE_SRC}\nstation(a, [b]).\nstation(b, [a, c]).\nstation(c, [b, d]).\nstation(d, [c]).\n");
    let e = engine_new(&src, ConversionPolicy::Deep).unwrap();
    let ans = e.query_once("route(a, d, P)", None).unwrap().unwrap();
    let names: Vec<&str> = ans["P"].as_seq().unwrap().iter().map(|v| v.as_symbol().unwrap()).collect();
    assert_eq!(names, ["a", "b", "c", "d"]);
}

#[test]
fn tube_routes_are_shortest() {
    let graph = Graph::from_facts(TUBE_SRC).unwrap();
    let e = engine_new(&format!("{ROUTE_SRC}\n{TUBE_SRC}"), ConversionPolicy::Deep).unwrap();
    let stations = graph.stations();
    for (from, to) in oracles::route_pairs(&stations, 25) {
        let ans = e.query_once(&format!("route({from}, {to}, P)"), None).unwrap().unwrap();
        let path: Vec<&str> = ans["P"].as_seq().unwrap().iter().map(|v| v.as_symbol().unwrap()).collect();
        assert!(graph.is_shortest_path(&from, &to, &path), "{from} -> {to}: {path:?}");
    }
}

#[test]
fn tube_fixture_has_one_clause_per_line() {
    let lines = TUBE_SRC.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('%')).count();
    assert_eq!(parse_program(TUBE_SRC).unwrap().len(), lines);
    assert!(lines >= 90);
}

#[test]
fn small_known_results() {
    assert_eq!(value(BenchName::NdL1A1R, Variant::Cross, 5), HostValue::Int(15));
    assert_eq!(value(BenchName::L1A1R, Variant::Cross, 1000), HostValue::Int(1000));
    assert_eq!(value(BenchName::SatModels, Variant::Cross, 8), HostValue::Int(50));
}

#[test]
fn sat_counts_match_brute_force() {
    for k in [4u64, 6, 8, 10] {
        let cnf = oracles::pigeon_cnf(k as usize / 2);
        let want = oracles::count_models(&cnf, k as usize) as i128;
        for variant in [Variant::PrologOnly, Variant::Cross, Variant::CrossNc] {
            assert_eq!(value(BenchName::SatModels, variant, k), HostValue::Int(want), "{variant} K={k}");
        }
    }
}

#[test]
fn variants_agree_on_micro_kernels() {
    for name in BenchName::MICRO {
        for k in [10u64, 1000] {
            let variants: Vec<Variant> = Variant::ALL.into_iter().filter(|&v| name.has_variant(v)).collect();
            let first = value(name, variants[0], k);
            for &v in &variants[1..] {
                assert_eq!(value(name, v, k), first, "{name} {v} K={k}");
            }
        }
    }
}

#[test]
fn connect4_games_are_legal_and_match_the_native_search() {
    let moves = oracles::connect4_game(4, 2);
    assert!(oracles::legal_game(&moves));
    for variant in [Variant::PrologOnly, Variant::Cross, Variant::CrossNc] {
        let got = value(BenchName::Connect4, variant, 2);
        let cols: Vec<usize> = got.as_seq().unwrap().iter().map(|m| m.as_int().unwrap() as usize).collect();
        assert_eq!(cols, moves, "{variant}");
    }
}

#[test]
fn back_to_back_runs_repeat() {
    let spec = BenchmarkSpec::new(BenchName::TCons, Variant::Cross).scale(500).iterations(3).warmups(1);
    let a = run_benchmark(&spec).unwrap();
    let b = run_benchmark(&spec).unwrap();
    assert_eq!(a.value, b.value);
    assert_eq!(a.crossings, b.crossings);
    assert_eq!(a.steps, b.steps);
    assert_eq!(a.samples.len(), 3);
}

#[test]
fn a_wrong_result_is_a_hard_failure() {
    let spec = BenchmarkSpec::new(BenchName::L1A1R, Variant::Cross).scale(100);
    let mut k = kernel(&spec).unwrap().with_expected(HostValue::Int(99));
    assert!(matches!(k.run_checked(), Err(BenchError::Mismatch { .. })));
}

#[test]
fn host_only_is_unavailable_for_larger_kernels() {
    for name in BenchName::LARGER {
        let spec = BenchmarkSpec::new(name, Variant::HostOnly);
        assert!(matches!(kernel(&spec), Err(BenchError::VariantUnavailable { .. })), "{name}");
    }
}
