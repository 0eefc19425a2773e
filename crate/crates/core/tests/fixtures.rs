use oic_core::bounds::mais_exact;
use oic_core::oic::build_tree_oic;
use oic_core::oracle::minrank_gf2;
use oic_core::testkit::{load_fixture, load_fixtures, run_fixture, simulate, SimulationMode, Structure};
use oic_core::{certify_oic, Budget, VertexId};

#[test]
fn every_fixture_passes_the_full_check() {
    let budget = Budget::default();
    for f in load_fixtures().unwrap() {
        let out = run_fixture(&f, &budget).unwrap();
        assert!(out.passed(), "{}: {:?}", f.name, out.problems);
        assert_eq!(out.code_length, out.mais, "{}", f.name);
        assert_eq!(out.code_length, out.minrank, "{}", f.name);
    }
}

#[test]
fn unseeded_minrank_agrees_on_small_fixtures() {
    let budget = Budget::default();
    for f in load_fixtures().unwrap().into_iter().filter(|f| f.graph().vertex_count() <= 10) {
        assert_eq!(minrank_gf2(f.graph(), &budget, None).unwrap().rank, f.expected.minrank, "{}", f.name);
    }
}

#[test]
fn excluded_rows_stay_within_side_information() {
    for f in load_fixtures().unwrap() {
        let (_, plan) = f.build().unwrap();
        for row in f.expected.plan.iter().filter(|r| r.excluded) {
            assert!(!row.note.is_empty(), "{} row {}", f.name, row.receiver);
            let side = f.graph().out_neighborhood(row.receiver);
            assert!(row.tau.contains(&row.receiver));
            assert!(row.tau.iter().filter(|v| **v != row.receiver).all(|v| side.contains(v)));
            let built = plan.receiver(row.receiver).unwrap();
            assert!(built.side.is_subset(&side));
        }
    }
}

#[test]
fn pair_code_is_bit_exact() {
    let f = load_fixture("oic-pair6").unwrap();
    let (code, _) = f.build().unwrap();
    let masks: Vec<Vec<usize>> = code.symbols().iter().map(|s| s.mask.ones().collect()).collect();
    assert_eq!(masks, vec![vec![0, 2, 3], vec![2, 4, 5], vec![0, 1]]);
}

#[test]
fn decoding_trees_close_over_successors() {
    for f in load_fixtures().unwrap() {
        let Structure::Oic(d) = &f.structure else { continue };
        let oic = certify_oic(f.graph(), d).unwrap();
        for v in d.inner_total() {
            let tree = build_tree_oic(&oic, v).unwrap();
            assert!(tree.successor_mismatches(f.graph()).is_empty(), "{} root {v}", f.name);
        }
    }
}

#[test]
fn stated_capacity_mismatch_is_reported_not_hidden() {
    let f = load_fixture("oic-pair12").unwrap();
    let out = run_fixture(&f, &Budget::default()).unwrap();
    assert!(out.passed());
    assert_eq!(out.capacity.to_string(), "1/7");
    assert!(out.remarks.iter().any(|r| r.contains("1/6")), "{:?}", out.remarks);
    let Structure::Oic(d) = &f.structure else { panic!("polytree fixture") };
    let non_inner = f.graph().vertex_count() - d.inner_total().len();
    assert_eq!(out.code_length, non_inner + d.node_count());
    assert_eq!(mais_exact(f.graph(), &Budget::default()).unwrap().size, 7);
}

#[test]
fn random_trials_with_wide_messages_decode() {
    let f = load_fixture("oic-chain10").unwrap();
    let (_, plan) = f.build().unwrap();
    let mut inst = f.instance.clone();
    inst.message_bits = 40;
    let mode = SimulationMode::auto(&inst, 200, 9);
    assert!(matches!(mode, SimulationMode::Random { .. }));
    let report = simulate(&inst, &plan, &mode).unwrap();
    assert!(report.passed());
    assert_eq!(report.trials, 200);
}

#[test]
fn receiver_ids_in_plans_are_all_vertices() {
    for f in load_fixtures().unwrap() {
        let (_, plan) = f.build().unwrap();
        let ids: Vec<VertexId> = plan.receivers().iter().map(|r| r.receiver).collect();
        assert_eq!(ids, f.graph().vertices().collect::<Vec<_>>());
    }
}
