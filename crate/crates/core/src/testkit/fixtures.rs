//! Reconstructed reference instances with their expected codes, decoding
//! tables and bounds. Edge lists are locked by a SHA-256 digest.

use std::collections::BTreeSet;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::bits::Gf2Vec;
use crate::bounds::{mais_exact, Capacity};
use crate::budget::Budget;
use crate::codec::{encode_oic, make_decoding_plan, DecodingPlan, LinearCode};
use crate::error::{Error, Result};
use crate::graph::{Digraph, GraphJson, SuicpInstance, VertexId};
use crate::ic::{certify_ic, encode_ic, plan_ic, InnerVertexSet};
use crate::oic::{certify_oic, DecompositionJson, PolytreeDecomposition};
use crate::oracle::{minrank_gf2_seeded, FittingMatrix};

use super::simulate::{simulate, SimulationMode};

const SOURCES: &[(&str, &str)] = &[
    ("ic5", include_str!("../../fixtures/ic5.json")),
    ("ic6", include_str!("../../fixtures/ic6.json")),
    ("oic-pair6", include_str!("../../fixtures/oic-pair6.json")),
    ("oic-chain10", include_str!("../../fixtures/oic-chain10.json")),
    ("oic-chain9", include_str!("../../fixtures/oic-chain9.json")),
    ("oic-pair12", include_str!("../../fixtures/oic-pair12.json")),
    ("oic-star8", include_str!("../../fixtures/oic-star8.json")),
    ("oic-multiparent10", include_str!("../../fixtures/oic-multiparent10.json")),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Ic(InnerVertexSet),
    Oic(PolytreeDecomposition),
}

impl Structure {
    /// The structure as a polytree; a plain inner set becomes one node.
    pub fn decomposition(&self) -> PolytreeDecomposition {
        match self {
            Structure::Ic(vi) => PolytreeDecomposition::single(vi.members().clone()),
            Structure::Oic(d) => d.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectedRow {
    pub receiver: VertexId,
    pub gamma: Vec<String>,
    pub tau: BTreeSet<VertexId>,
    /// The row deviates from the reference table; the stored values are the
    /// recomputed ones.
    pub excluded: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expected {
    pub code: Vec<(String, BTreeSet<VertexId>)>,
    pub plan: Vec<ExpectedRow>,
    pub code_length: usize,
    pub capacity: Capacity,
    /// Capacity denominator published with the reference instance, if any.
    pub published_capacity_den: Option<u64>,
    pub mais: usize,
    pub minrank: usize,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub description: String,
    pub instance: SuicpInstance,
    pub structure: Structure,
    pub expected: Expected,
    pub notes: Vec<String>,
}

impl Fixture {
    pub fn graph(&self) -> &Digraph {
        &self.instance.graph
    }

    /// Code and plan produced by the library for this fixture.
    pub fn build(&self) -> Result<(LinearCode, DecodingPlan)> {
        match &self.structure {
            Structure::Ic(vi) => {
                let ic = certify_ic(self.graph(), vi)?;
                Ok((encode_ic(&ic), plan_ic(&ic)?))
            }
            Structure::Oic(d) => {
                let oic = certify_oic(self.graph(), d)?;
                Ok((encode_oic(&oic), make_decoding_plan(&oic)?))
            }
        }
    }

    /// Differences between the built code and plan and the stored
    /// expectations.
    pub fn self_check(&self) -> Result<Vec<String>> {
        let (code, plan) = self.build()?;
        let k = self.graph().vertex_count();
        let mut problems = Vec::new();

        let got: Vec<(String, Gf2Vec)> = code.symbols().iter().map(|s| (s.label.clone(), s.mask.clone())).collect();
        let want: Vec<(String, Gf2Vec)> = self
            .expected
            .code
            .iter()
            .map(|(l, vs)| (l.clone(), mask(k, vs)))
            .collect();
        if got != want {
            problems.push(format!("code {:?} differs from expected {:?}", labels(&got), labels(&want)));
        }
        if code.len() != self.expected.code_length {
            problems.push(format!(
                "code length {} but expected {}",
                code.len(),
                self.expected.code_length
            ));
        }

        for row in &self.expected.plan {
            let Some(r) = plan.receiver(row.receiver) else {
                problems.push(format!("no plan for receiver {}", row.receiver));
                continue;
            };
            let mut want_gamma = row.gamma.clone();
            want_gamma.sort_by_key(|l| code.index_of(l));
            if r.gamma_labels != want_gamma {
                problems.push(format!(
                    "receiver {}: gamma {:?}, expected {:?}",
                    row.receiver, r.gamma_labels, want_gamma
                ));
            }
            if r.tau != mask(k, &row.tau) {
                problems.push(format!("receiver {}: tau differs", row.receiver));
            }
        }
        if self.expected.plan.len() != k {
            problems.push(format!("{} expected rows for {k} receivers", self.expected.plan.len()));
        }
        Ok(problems)
    }
}

fn mask(k: usize, vs: &BTreeSet<VertexId>) -> Gf2Vec {
    Gf2Vec::from_indices(k, vs.iter().map(|v| v.0))
}

fn labels(v: &[(String, Gf2Vec)]) -> Vec<String> {
    v.iter().map(|(l, m)| format!("{l}={}", m.to_hex())).collect()
}

/// Digest of the canonical edge listing `K=k;u-v,u-v,...`.
pub fn edges_digest(g: &Digraph) -> String {
    let edges: Vec<String> = g.edges().map(|(u, v)| format!("{}-{}", u.0, v.0)).collect();
    let text = format!("K={};{}", g.vertex_count(), edges.join(","));
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Deserialize)]
struct FixtureFile {
    name: String,
    description: String,
    graph: GraphJson,
    edges_sha256: String,
    structure: StructureFile,
    expected: ExpectedFile,
    #[serde(default)]
    notes: Vec<String>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum StructureFile {
    Ic {
        #[serde(rename = "V_I")]
        v_i: Vec<usize>,
    },
    Oic(DecompositionJson),
}

#[derive(Deserialize)]
struct ExpectedFile {
    code: Vec<SymbolFile>,
    plan: Vec<RowFile>,
    code_length: usize,
    capacity_den: u64,
    published_capacity_den: Option<u64>,
    mais: usize,
    minrank: usize,
}

#[derive(Deserialize)]
struct SymbolFile {
    label: String,
    vertices: Vec<usize>,
}

#[derive(Deserialize)]
struct RowFile {
    receiver: usize,
    gamma: Vec<String>,
    tau: Vec<usize>,
    #[serde(default)]
    excluded: bool,
    #[serde(default)]
    note: String,
}

fn ids(v: &[usize]) -> BTreeSet<VertexId> {
    v.iter().map(|&i| VertexId(i)).collect()
}

/// Parses one fixture file and checks its edge digest, without running the
/// self-check.
pub fn parse_fixture(text: &str) -> Result<Fixture> {
    let file: FixtureFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("fixture JSON: {e}")))?;
    let fail = |reason: String| Error::Fixture {
        name: file.name.clone(),
        reason,
    };
    let instance = SuicpInstance::from_json(&file.graph)?;
    let digest = edges_digest(&instance.graph);
    if digest != file.edges_sha256 {
        return Err(fail(format!("edge digest {digest} does not match lock {}", file.edges_sha256)));
    }
    let k = instance.k();
    let structure = match &file.structure {
        StructureFile::Ic { v_i } => Structure::Ic(InnerVertexSet::new(k, ids(v_i))?),
        StructureFile::Oic(json) => Structure::Oic(PolytreeDecomposition::from_json(json)?),
    };
    let e = &file.expected;
    let expected = Expected {
        code: e.code.iter().map(|s| (s.label.clone(), ids(&s.vertices))).collect(),
        plan: e
            .plan
            .iter()
            .map(|r| ExpectedRow {
                receiver: VertexId(r.receiver),
                gamma: r.gamma.clone(),
                tau: ids(&r.tau),
                excluded: r.excluded,
                note: r.note.clone(),
            })
            .collect(),
        code_length: e.code_length,
        capacity: Capacity {
            num: 1,
            den: e.capacity_den,
        },
        published_capacity_den: e.published_capacity_den,
        mais: e.mais,
        minrank: e.minrank,
    };
    Ok(Fixture {
        name: file.name,
        description: file.description,
        instance,
        structure,
        expected,
        notes: file.notes,
    })
}

/// All shipped fixtures. Any digest or self-check failure aborts the load.
pub fn load_fixtures() -> Result<Vec<Fixture>> {
    SOURCES
        .iter()
        .map(|(name, text)| {
            let f = parse_fixture(text)?;
            if f.name != *name {
                return Err(Error::Fixture {
                    name: name.to_string(),
                    reason: format!("file declares name {}", f.name),
                });
            }
            let problems = f.self_check()?;
            if !problems.is_empty() {
                return Err(Error::Fixture {
                    name: f.name.clone(),
                    reason: problems.join("; "),
                });
            }
            Ok(f)
        })
        .collect()
}

pub fn fixture_names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|(n, _)| *n)
}

pub fn load_fixture(name: &str) -> Result<Fixture> {
    load_fixtures()?
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::Fixture {
            name: name.to_string(),
            reason: "no such fixture".into(),
        })
}

/// Outcome of the full check of one fixture: self-check, bounds, oracle and
/// exhaustive simulation.
#[derive(Clone, Debug)]
pub struct FixtureOutcome {
    pub name: String,
    pub code_length: usize,
    pub capacity: Capacity,
    pub mais: usize,
    pub minrank: usize,
    pub decode_failures: usize,
    pub problems: Vec<String>,
    /// Differences from reference values that are documented, not failures.
    pub remarks: Vec<String>,
}

impl FixtureOutcome {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

/// The minrank search starts from the plan's own fitting matrix and stops
/// at the MAIS lower bound.
pub fn run_fixture(f: &Fixture, budget: &Budget) -> Result<FixtureOutcome> {
    let mut problems = f.self_check()?;
    let (code, plan) = f.build()?;
    let g = f.graph();

    let mais = mais_exact(g, budget)?;
    if mais.size != f.expected.mais {
        problems.push(format!("MAIS {} but expected {}", mais.size, f.expected.mais));
    }
    if mais.size != code.len() {
        problems.push(format!("MAIS {} differs from code length {}", mais.size, code.len()));
    }
    let seed = FittingMatrix::from_plan(g, &plan)?;
    let minrank = minrank_gf2_seeded(g, budget, Some(mais.size), &seed)?;
    if minrank.rank != f.expected.minrank {
        problems.push(format!("minrank {} but expected {}", minrank.rank, f.expected.minrank));
    }
    let capacity = Capacity {
        num: 1,
        den: code.len() as u64,
    };
    if capacity != f.expected.capacity {
        problems.push(format!("capacity {capacity} but expected {}", f.expected.capacity));
    }

    let mut remarks = Vec::new();
    if let Some(den) = f.expected.published_capacity_den {
        if den != capacity.den {
            remarks.push(format!("stated capacity 1/{den} differs from 1/{}", capacity.den));
        }
    }
    remarks.extend(
        f.expected
            .plan
            .iter()
            .filter(|r| r.excluded)
            .map(|r| format!("row {}: {}", r.receiver, r.note)),
    );

    let sim = simulate(&f.instance, &plan, &SimulationMode::Exhaustive)?;
    if !sim.failures.is_empty() {
        problems.push(format!("{} decoding failures", sim.failures.len()));
    }
    Ok(FixtureOutcome {
        name: f.name.clone(),
        code_length: code.len(),
        capacity,
        mais: mais.size,
        minrank: minrank.rank,
        decode_failures: sim.failures.len(),
        problems,
        remarks,
    })
}
