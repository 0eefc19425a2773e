//! Cross-checks between the single-set and polytree verifiers, the
//! decomposition search, and decodability of everything that verifies.

use std::collections::BTreeSet;

use oic_core::oic::{suggest_decompositions, DecompNode, NodeKey, SuggestLimits, TreeEdge};
use oic_core::testkit::{random_oic, simulate, Profile, SimulationMode};
use oic_core::{
    certify_ic, certify_oic, encode_ic, encode_oic, make_decoding_plan, plan_ic, verify_ic, verify_oic, Digraph,
    InnerVertexSet, PolytreeDecomposition, SuicpInstance, VertexId,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_digraphs(k: usize) -> impl Iterator<Item = Digraph> {
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|u| (0..k).map(move |v| (u, v))).filter(|(u, v)| u != v).collect();
    (0u32..1 << pairs.len()).map(move |m| {
        Digraph::new(k, pairs.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, e)| *e)).unwrap()
    })
}

fn set(bits: u32, k: usize) -> BTreeSet<VertexId> {
    (0..k).filter(|v| bits >> v & 1 == 1).map(VertexId).collect()
}

#[test]
fn single_node_decomposition_agrees_with_interlinked_cycle_check() {
    for k in 1..=4 {
        for g in all_digraphs(k) {
            for bits in 1u32..1 << k {
                let vi = set(bits, k);
                let ic = verify_ic(&g, &InnerVertexSet::new(k, vi.clone()).unwrap());
                let d = PolytreeDecomposition::single(vi.clone());
                let oic = verify_oic(&g, &d);
                assert_eq!(ic.passed(), oic.passed(), "graph {:?} inner {vi:?}", g.to_json(1));
                if ic.passed() {
                    let ic = certify_ic(&g, &InnerVertexSet::new(k, vi.clone()).unwrap()).unwrap();
                    let oic = certify_oic(&g, &d).unwrap();
                    assert_eq!(encode_ic(&ic), encode_oic(&oic));
                    assert_eq!(plan_ic(&ic).unwrap(), make_decoding_plan(&oic).unwrap());
                }
            }
        }
    }
}

/// Every decomposition a three-vertex graph admits: one node, or two nodes
/// sharing one vertex in either orientation.
fn all_decompositions_k3() -> Vec<PolytreeDecomposition> {
    let mut out: Vec<PolytreeDecomposition> = (1u32..8).map(|b| PolytreeDecomposition::single(set(b, 3))).collect();
    for x in 0..3 {
        let others: Vec<usize> = (0..3).filter(|&v| v != x).collect();
        for (a, b) in [(others[0], others[1]), (others[1], others[0])] {
            let upper: BTreeSet<VertexId> = [VertexId(a), VertexId(x)].into();
            let lower: BTreeSet<VertexId> = [VertexId(b), VertexId(x)].into();
            let d = PolytreeDecomposition::new(
                vec![
                    DecompNode { key: NodeKey::new(0, 1), vertices: upper },
                    DecompNode { key: NodeKey::new(1, 1), vertices: lower },
                ],
                vec![TreeEdge { parent: NodeKey::new(0, 1), child: NodeKey::new(1, 1), shared: VertexId(x) }],
            )
            .unwrap();
            out.push(d);
        }
    }
    out
}

#[test]
fn suggestions_match_brute_force_on_three_vertices() {
    let all = all_decompositions_k3();
    for g in all_digraphs(3) {
        let best = all
            .iter()
            .filter(|d| verify_oic(&g, d).passed())
            .map(|d| d.node_count() + 3 - d.inner_total().len())
            .min();
        let outcome = suggest_decompositions(&g, &SuggestLimits::default());
        assert!(outcome.complete);
        for s in &outcome.suggestions {
            assert!(verify_oic(&g, &s.decomposition).passed());
        }
        let found = outcome.suggestions.first().map(|s| s.code_length);
        // Decompositions whose code is no shorter than sending every message
        // in the clear carry no gain and need not be suggested.
        match best {
            Some(b) if b < 3 => assert_eq!(found, Some(b), "graph {:?}", g.to_json(1)),
            _ => assert!(found.is_none_or(|f| Some(f) >= best), "graph {:?}", g.to_json(1)),
        }
    }
}

fn mutate(g: &Digraph, rng: &mut ChaCha8Rng) -> Digraph {
    let k = g.vertex_count();
    loop {
        let (u, v) = (rng.gen_range(0..k), rng.gen_range(0..k));
        if u == v {
            continue;
        }
        let (u, v) = (VertexId(u), VertexId(v));
        return if g.has_edge(u, v) { g.without_edge(u, v) } else { g.with_edge(u, v).unwrap() };
    }
}

#[test]
fn every_accepted_mutation_decodes() {
    let profiles = ["w=1;size=3-5;ni=3", "w=1,2;size=3-4;ni=3", "w=1,1,1;size=2-3;ni=2", "w=2,1;size=2-4;ni=2"];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut accepted, mut rejected) = (0, 0);
    for text in profiles {
        let profile: Profile = text.parse().unwrap();
        for seed in 0..25 {
            let base = random_oic(&profile, seed).unwrap();
            let mut g = base.instance.graph.clone();
            for _ in 0..12 {
                g = mutate(&g, &mut rng);
                if !verify_oic(&g, &base.decomposition).passed() {
                    rejected += 1;
                    continue;
                }
                accepted += 1;
                let oic = certify_oic(&g, &base.decomposition).unwrap();
                let plan = make_decoding_plan(&oic).unwrap_or_else(|e| panic!("{text} seed {seed}: {e}"));
                let inst = SuicpInstance::new(g.clone(), 1).unwrap();
                let report = simulate(&inst, &plan, &SimulationMode::Exhaustive).unwrap();
                assert!(report.passed(), "{text} seed {seed}: {:?}", report.failures.first());
            }
        }
    }
    assert!(accepted > 20 && rejected > 20, "accepted {accepted}, rejected {rejected}");
}

#[test]
fn accepted_single_sets_decode() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for _ in 0..20000 {
        let k = rng.gen_range(2..=6);
        let edges: Vec<(usize, usize)> = (0..k)
            .flat_map(|u| (0..k).map(move |v| (u, v)))
            .filter(|(u, v)| u != v)
            .filter(|_| rng.gen_bool(0.45))
            .collect();
        let g = Digraph::new(k, edges).unwrap();
        let vi = InnerVertexSet::new(k, set(rng.gen_range(1u32..1 << k), k)).unwrap();
        if let Ok(ic) = certify_ic(&g, &vi) {
            checked += 1;
            let plan = plan_ic(&ic).unwrap();
            let report = simulate(&SuicpInstance::new(g, 1).unwrap(), &plan, &SimulationMode::Exhaustive).unwrap();
            assert!(report.passed());
        }
    }
    assert!(checked > 100, "only {checked} accepted");
}
