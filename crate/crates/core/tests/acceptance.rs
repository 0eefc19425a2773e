//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails or exceeds its time limit.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use oic_core::bounds::mais_exact;
use oic_core::oic::build_tree_oic;
use oic_core::oracle::{exhaustive_code_search, minrank_gf2};
use oic_core::testkit::{load_fixture, random_oic, run_fixture, simulate, Fixture, Profile, SimulationMode, Structure};
use oic_core::{
    certify_ic, certify_oic, encode_ic, encode_oic, make_decoding_plan, Budget, Digraph, InnerVertexSet, VertexId,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> Result<Fixture, String> {
    load_fixture(name).map_err(|e| e.to_string())
}

/// Full fixture check plus the expected length and capacity denominator.
fn check_fixture(name: &str, length: usize, den: u64) -> Outcome {
    let f = fixture(name)?;
    let out = run_fixture(&f, &Budget::default()).map_err(|e| e.to_string())?;
    ensure(out.passed(), || format!("{name}: {}", out.problems.join("; ")))?;
    ensure(out.code_length == length, || format!("{name}: length {}", out.code_length))?;
    ensure(out.capacity.den == den, || format!("{name}: capacity {}", out.capacity))?;
    ensure(out.mais == length && out.minrank == length, || {
        format!("{name}: mais {} minrank {}", out.mais, out.minrank)
    })?;
    ensure(out.decode_failures == 0, || format!("{name}: decode failures"))?;
    Ok(format!(
        "{name}: length {} mais {} minrank {} capacity {}",
        out.code_length, out.mais, out.minrank, out.capacity
    ))
}

fn exhaustive_decodes(f: &Fixture) -> Result<u64, String> {
    let (_, plan) = f.build().map_err(|e| e.to_string())?;
    let report = simulate(&f.instance, &plan, &SimulationMode::Exhaustive).map_err(|e| e.to_string())?;
    ensure(report.passed(), || format!("{} decode failures", report.failure_count))?;
    Ok(report.trials * report.receivers as u64)
}

fn interlinked_five() -> Outcome {
    let f = fixture("ic5")?;
    let (code, _) = f.build().map_err(|e| e.to_string())?;
    ensure(code.len() == 3, || format!("length {}", code.len()))?;
    let k = f.graph().vertex_count();
    let Structure::Ic(vi) = &f.structure else {
        return Err("not an interlinked-cycle fixture".into());
    };
    ensure(code.len() == k - vi.len() + 1, || "length differs from K - |V_I| + 1".into())?;
    ensure(f.expected.plan.len() == 5, || "plan rows".into())?;
    let problems = f.self_check().map_err(|e| e.to_string())?;
    ensure(problems.is_empty(), || problems.join("; "))?;
    let decodes = exhaustive_decodes(&f)?;
    Ok(format!("length 3, 5 plan rows, {decodes} decodes"))
}

fn overlapping_pair() -> Outcome {
    let f = fixture("oic-pair6")?;
    let (code, _) = f.build().map_err(|e| e.to_string())?;
    let masks: Vec<Vec<usize>> = code.symbols().iter().map(|s| s.mask.ones().collect()).collect();
    ensure(masks == vec![vec![0, 2, 3], vec![2, 4, 5], vec![0, 1]], || format!("code {masks:?}"))?;
    ensure(f.expected.plan.len() == 6, || "plan rows".into())?;
    let summary = check_fixture("oic-pair6", 3, 3)?;
    let decodes = exhaustive_decodes(&f)?;
    Ok(format!("{summary}, {decodes} decodes"))
}

fn chain_ten() -> Outcome {
    let f = fixture("oic-chain10")?;
    let excluded: Vec<VertexId> = f.expected.plan.iter().filter(|r| r.excluded).map(|r| r.receiver).collect();
    ensure(excluded == vec![VertexId(6)], || format!("excluded rows {excluded:?}"))?;
    let (_, plan) = f.build().map_err(|e| e.to_string())?;
    let side = f.graph().out_neighborhood(VertexId(6));
    let row = plan.receiver(VertexId(6)).ok_or("no plan for x7")?;
    ensure(row.side.is_subset(&side), || "x7 plan uses messages it does not hold".into())?;
    let summary = check_fixture("oic-chain10", 6, 6)?;
    let decodes = exhaustive_decodes(&f)?;
    Ok(format!("{summary}, {decodes} decodes"))
}

fn three_captions() -> Outcome {
    let mut parts = Vec::new();
    for (name, den) in [("oic-chain9", 5), ("oic-star8", 3), ("oic-multiparent10", 4)] {
        parts.push(check_fixture(name, den as usize, den)?);
    }
    Ok(parts.join("; "))
}

fn twelve_vertex_pair() -> Outcome {
    let f = fixture("oic-pair12")?;
    let Structure::Oic(d) = &f.structure else {
        return Err("not a polytree fixture".into());
    };
    let oic = certify_oic(f.graph(), d).map_err(|e| e.to_string())?;
    let formula = oic.sets().non_inner.len() + d.node_count();
    let out = run_fixture(&f, &Budget::default()).map_err(|e| e.to_string())?;
    ensure(out.passed(), || out.problems.join("; "))?;
    ensure(out.code_length == 7 && formula == 7, || format!("length {} formula {formula}", out.code_length))?;
    ensure(out.mais == out.code_length, || format!("mais {} differs from length", out.mais))?;
    let remark = out.remarks.iter().find(|r| r.contains("1/6")).ok_or("stated capacity not reported")?;
    Ok(format!("length 7 = mais; {remark}"))
}

const PROFILES: &[&str] = &[
    "w=1;size=3-8;ni=4",
    "w=1,1;size=2-5;ni=4",
    "w=1,2;size=2-4;ni=3",
    "w=2,1;size=2-4;ni=2",
    "w=1,1,1;size=2-3;ni=3",
    "w=2,2;size=2-3;ni=2",
    "w=1,2,1;size=2-3;ni=2",
    "w=1,3;size=2-4;ni=1",
];

fn generated_instances() -> Outcome {
    let budget = Budget::default();
    let mut max_k = 0;
    let mut mais_checked = 0;
    for n in 0..200u64 {
        let text = PROFILES[n as usize % PROFILES.len()];
        let profile: Profile = text.parse().map_err(|e: oic_core::Error| e.to_string())?;
        let g = random_oic(&profile, n).map_err(|e| format!("{text} seed {n}: {e}"))?;
        let graph = &g.instance.graph;
        let k = graph.vertex_count();
        let ctx = || format!("{text} seed {n}");
        ensure(k <= 14, || format!("{}: K = {k}", ctx()))?;
        max_k = max_k.max(k);
        let oic = certify_oic(graph, &g.decomposition).map_err(|e| format!("{}: {e}", ctx()))?;
        let code = encode_oic(&oic);
        let formula = oic.sets().non_inner.len() + g.decomposition.node_count();
        ensure(code.len() == formula, || format!("{}: length {} vs {formula}", ctx(), code.len()))?;
        for v in g.decomposition.inner_total() {
            let tree = build_tree_oic(&oic, v).map_err(|e| format!("{}: {e}", ctx()))?;
            ensure(tree.successor_mismatches(graph).is_empty(), || format!("{}: tree of {v}", ctx()))?;
        }
        let plan = make_decoding_plan(&oic).map_err(|e| format!("{}: {e}", ctx()))?;
        for r in plan.receivers() {
            ensure(r.side.is_subset(&graph.out_neighborhood(r.receiver)), || {
                format!("{}: receiver {}", ctx(), r.receiver)
            })?;
        }
        let report = simulate(&g.instance, &plan, &SimulationMode::Exhaustive).map_err(|e| e.to_string())?;
        ensure(report.passed(), || format!("{}: {} decode failures", ctx(), report.failure_count))?;
        if k <= 12 {
            let m = mais_exact(graph, &budget).map_err(|e| e.to_string())?;
            ensure(m.size == code.len(), || format!("{}: mais {} length {}", ctx(), m.size, code.len()))?;
            mais_checked += 1;
        }
    }
    Ok(format!("200 instances, K up to {max_k}, {mais_checked} MAIS checks"))
}

fn oracle_equivalence() -> Outcome {
    let budget = Budget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut gaps = 0;
    for n in 0..100 {
        let k = rng.gen_range(2..=6);
        let density = rng.gen_range(0.2..0.7);
        let edges: Vec<(usize, usize)> = (0..k)
            .flat_map(|u| (0..k).map(move |v| (u, v)))
            .filter(|(u, v)| u != v)
            .filter(|_| rng.gen_bool(density))
            .collect();
        let g = Digraph::new(k, edges).map_err(|e| e.to_string())?;
        let rank = minrank_gf2(&g, &budget, None).map_err(|e| e.to_string())?.rank;
        let code = exhaustive_code_search(&g, k, &budget)
            .map_err(|e| e.to_string())?
            .ok_or("no code found")?;
        let mais = mais_exact(&g, &budget).map_err(|e| e.to_string())?.size;
        ensure(code.len() == rank, || format!("graph {n}: minrank {rank}, search {}", code.len()))?;
        ensure(mais <= rank, || format!("graph {n}: mais {mais} above minrank {rank}"))?;
        if mais < rank {
            gaps += 1;
        }
    }
    Ok(format!("100 graphs agree, {gaps} with mais < minrank"))
}

fn single_node_reduction() -> Outcome {
    let profile: Profile = "w=1;size=2-7;ni=4".parse().map_err(|e: oic_core::Error| e.to_string())?;
    for seed in 0..50 {
        let g = random_oic(&profile, seed).map_err(|e| e.to_string())?;
        let graph = &g.instance.graph;
        let (_, verts) = g.decomposition.nodes().next().ok_or("empty decomposition")?;
        let vi = InnerVertexSet::new(graph.vertex_count(), verts.clone()).map_err(|e| e.to_string())?;
        let ic = certify_ic(graph, &vi).map_err(|e| format!("seed {seed}: {e}"))?;
        let oic = certify_oic(graph, &g.decomposition).map_err(|e| e.to_string())?;
        ensure(encode_ic(&ic) == encode_oic(&oic), || format!("seed {seed}: codes differ"))?;
    }
    Ok("50 instances, identical codes".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("interlinked cycle, five vertices", Duration::from_secs(1), interlinked_five),
        ("overlapping pair, six vertices", Duration::from_secs(1), overlapping_pair),
        ("chain of three sets, ten vertices", Duration::from_secs(5), chain_ten),
        ("chain9, star8 and multiparent10 capacities", Duration::from_secs(10), three_captions),
        ("twelve-vertex pair: length equals MAIS", Duration::from_secs(10), twelve_vertex_pair),
        ("200 generated instances", Duration::from_secs(120), generated_instances),
        ("minrank equals shortest linear code", Duration::from_secs(120), oracle_equivalence),
        ("single-node reduction", Duration::from_secs(30), single_node_reduction),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(detail) if elapsed <= *limit => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; exceeded {limit:?}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "{status} {}. {name} [{:.3}s, limit {}s]: {detail}",
            i + 1,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
