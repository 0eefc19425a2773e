use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Digraph, VertexId};
use crate::ic::{i_paths, non_inner_cycle, sources, termini};
use crate::report::{ConditionResult, VerificationReport, Witness};

use super::decomposition::{structure_violation, NodeKey, PolytreeDecomposition, TreeEdge};
use super::derived::{derive_sets, DerivedSets};

/// How a root reaches across one child edge of its node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchMode {
    /// The shared vertex is the root itself or is reached by a unique I-path;
    /// the child's symbol is not used.
    Shared,
    /// No I-path reaches the shared vertex, so the child's symbol is XORed in
    /// to cancel it and decoding continues below the child.
    ThroughChild,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchRecord {
    pub child: NodeKey,
    pub shared: VertexId,
    pub mode: BranchMode,
    /// Deepest node whose symbol this branch uses, or the home depth.
    pub terminal_depth: usize,
    pub contributing: Vec<NodeKey>,
    pub targets: BTreeSet<VertexId>,
}

/// Everything one inner vertex needs to decode: the nodes whose symbols it
/// XORs and the inner vertices it must reach by unique I-paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootReach {
    pub root: VertexId,
    pub home: NodeKey,
    pub contributing: BTreeSet<NodeKey>,
    pub targets: BTreeSet<VertexId>,
    pub paths: BTreeMap<VertexId, Vec<VertexId>>,
    pub branches: Vec<BranchRecord>,
}

type Failure = (Witness, String);

fn analyze_root(
    g: &Digraph,
    d: &PolytreeDecomposition,
    inner: &[bool],
    home: NodeKey,
    root: VertexId,
) -> std::result::Result<RootReach, Failure> {
    let mut targets: BTreeSet<VertexId> = d.vertices(home).clone();
    targets.remove(&root);
    for s in d.child_shared(home) {
        targets.remove(&s);
    }
    let mut contributing = BTreeSet::from([home]);
    let mut branches = Vec::new();

    for edge in d.child_edges(home) {
        let mut record = BranchRecord {
            child: edge.child,
            shared: edge.shared,
            mode: BranchMode::Shared,
            terminal_depth: home.depth,
            contributing: Vec::new(),
            targets: BTreeSet::new(),
        };
        if edge.shared != root && descend(g, d, inner, root, edge, &mut record)? {
            record.mode = BranchMode::ThroughChild;
        }
        targets.extend(record.targets.iter().copied());
        contributing.extend(record.contributing.iter().copied());
        branches.push(record);
    }

    let mut paths = BTreeMap::new();
    for &t in &targets {
        let found = i_paths(g, inner, root, t, 2);
        match found.paths.len() {
            1 => {
                paths.insert(t, found.paths.into_iter().next().unwrap());
            }
            0 => {
                return Err((
                    Witness::MissingPath { from: root, to: t },
                    format!("root {root} of node {home}"),
                ))
            }
            _ => {
                let mut it = found.paths.into_iter();
                return Err((
                    Witness::DuplicatePaths {
                        first: it.next().unwrap(),
                        second: it.next().unwrap(),
                    },
                    format!("root {root} of node {home}"),
                ));
            }
        }
    }

    // A non-inner vertex on these paths contributes its own symbol, so every
    // successor it has must be cancelled by the paths continuing below it.
    let mut below: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    for path in paths.values() {
        for w in path.windows(2) {
            if !inner[w[0].0] {
                below.entry(w[0]).or_default().insert(w[1]);
            }
        }
    }
    for (u, children) in &below {
        if let Some(extra) = g.successors(*u).iter().find(|s| !children.contains(s)) {
            return Err((
                Witness::Vertex { vertex: *u },
                format!("on the decoding paths of root {root}, {u} also points to {extra}, which no path continues to"),
            ));
        }
    }

    Ok(RootReach {
        root,
        home,
        contributing,
        targets,
        paths,
        branches,
    })
}

/// Decides one child edge below the root's node. Returns whether the child
/// was entered (its symbol contributes).
fn descend(
    g: &Digraph,
    d: &PolytreeDecomposition,
    inner: &[bool],
    root: VertexId,
    edge: &TreeEdge,
    record: &mut BranchRecord,
) -> std::result::Result<bool, Failure> {
    let found = i_paths(g, inner, root, edge.shared, 2);
    match found.paths.len() {
        1 => {
            record.targets.insert(edge.shared);
            Ok(false)
        }
        0 => {
            record.contributing.push(edge.child);
            record.terminal_depth = record.terminal_depth.max(edge.child.depth);
            let exclude = d.child_shared(edge.child);
            record.targets.extend(
                d.vertices(edge.child)
                    .iter()
                    .filter(|v| **v != edge.shared && !exclude.contains(v)),
            );
            for next in d.child_edges(edge.child) {
                descend(g, d, inner, root, next, record)?;
            }
            Ok(true)
        }
        _ => {
            let mut it = found.paths.into_iter();
            Err((
                Witness::DuplicatePaths {
                    first: it.next().unwrap(),
                    second: it.next().unwrap(),
                },
                format!("root {root} reaches shared vertex {} of {} twice", edge.shared, edge.child),
            ))
        }
    }
}

/// Full result of checking a decomposition against a graph.
#[derive(Clone, Debug)]
pub struct OicCheck {
    pub report: VerificationReport,
    pub sets: Option<DerivedSets>,
    pub reaches: BTreeMap<VertexId, RootReach>,
}

const C1: (&str, &str) = ("C1", "polytree of inner vertex sets with single shared vertices");
const C2: (&str, &str) = ("C2", "unique I-paths from every root to its decoding targets");
const C3: (&str, &str) = ("C3", "no cycle through a root outside its node, none among non-inner vertices");
const C4: (&str, &str) = ("C4", "non-inner vertices lie on I-paths ending inside one node");

pub fn check_conditions(g: &Digraph, d: &PolytreeDecomposition) -> OicCheck {
    let k = g.vertex_count();
    let mut conditions = Vec::with_capacity(4);
    let mut reaches = BTreeMap::new();

    if let Some(msg) = structure_violation(k, d) {
        conditions.push(ConditionResult::fail(C1.0, C1.1, Witness::Structure { detail: msg }, ""));
        for (id, title) in [C2, C3, C4] {
            conditions.push(ConditionResult::fail(
                id,
                title,
                Witness::Structure {
                    detail: "not evaluated".into(),
                },
                "requires a valid polytree",
            ));
        }
        return OicCheck {
            report: VerificationReport { conditions },
            sets: None,
            reaches,
        };
    }
    conditions.push(ConditionResult::pass(C1.0, C1.1));
    let sets = derive_sets(k, d).expect("structure already validated");
    let inner = sets.inner_table(k);

    let mut c2 = ConditionResult::pass(C2.0, C2.1);
    'nodes: for (&home, roots) in &sets.tilde {
        for &root in roots {
            match analyze_root(g, d, &inner, home, root) {
                Ok(reach) => {
                    reaches.insert(root, reach);
                }
                Err((witness, detail)) => {
                    c2 = ConditionResult::fail(C2.0, C2.1, witness, detail);
                    reaches.clear();
                    break 'nodes;
                }
            }
        }
    }
    conditions.push(c2);

    conditions.push(check_c3(g, d, &sets, &inner));
    conditions.push(check_c4(g, d, &sets, &inner));

    OicCheck {
        report: VerificationReport { conditions },
        sets: Some(sets),
        reaches,
    }
}

fn check_c3(g: &Digraph, d: &PolytreeDecomposition, sets: &DerivedSets, inner: &[bool]) -> ConditionResult {
    for (&home, roots) in &sets.tilde {
        let mut outside = vec![true; g.vertex_count()];
        for v in d.vertices(home) {
            outside[v.0] = false;
        }
        for &r in roots {
            if let Some(cycle) = g.cycle_through(r, &outside) {
                return ConditionResult::fail(
                    C3.0,
                    C3.1,
                    Witness::Cycle { vertices: cycle },
                    format!("through {r} of node {home}"),
                );
            }
        }
    }
    if let Some(cycle) = non_inner_cycle(g, inner) {
        return ConditionResult::fail(C3.0, C3.1, Witness::Cycle { vertices: cycle }, "among non-inner vertices");
    }
    ConditionResult::pass(C3.0, C3.1)
}

fn check_c4(g: &Digraph, d: &PolytreeDecomposition, sets: &DerivedSets, inner: &[bool]) -> ConditionResult {
    for &v in &sets.non_inner {
        let ends = termini(g, inner, v);
        let starts = sources(g, inner, v);
        if !starts.iter().any(|a| ends.iter().any(|b| a != b)) {
            return ConditionResult::fail(C4.0, C4.1, Witness::Vertex { vertex: v }, "not on any I-path");
        }
        if !d.nodes().any(|(_, verts)| ends.is_subset(verts)) {
            return ConditionResult::fail(
                C4.0,
                C4.1,
                Witness::SplitTermination {
                    vertex: v,
                    termini: ends.into_iter().collect(),
                },
                "",
            );
        }
    }
    ConditionResult::pass(C4.0, C4.1)
}

pub fn verify_oic(g: &Digraph, d: &PolytreeDecomposition) -> VerificationReport {
    check_conditions(g, d).report
}

/// A decomposition that passed every condition, with the per-root analysis
/// needed to encode and decode.
#[derive(Clone, Debug)]
pub struct VerifiedOic {
    graph: Digraph,
    decomposition: PolytreeDecomposition,
    sets: DerivedSets,
    reaches: BTreeMap<VertexId, RootReach>,
}

impl VerifiedOic {
    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn decomposition(&self) -> &PolytreeDecomposition {
        &self.decomposition
    }

    pub fn sets(&self) -> &DerivedSets {
        &self.sets
    }

    pub fn reach(&self, root: VertexId) -> Option<&RootReach> {
        self.reaches.get(&root)
    }

    pub fn reaches(&self) -> impl Iterator<Item = &RootReach> {
        self.reaches.values()
    }

    /// Number of transmitted symbols: one per node plus one per non-inner
    /// vertex.
    pub fn code_length(&self) -> usize {
        self.decomposition.node_count() + self.sets.non_inner.len()
    }
}

pub fn certify_oic(g: &Digraph, d: &PolytreeDecomposition) -> Result<VerifiedOic> {
    let check = check_conditions(g, d);
    if let Some(fail) = check.report.first_failure() {
        let witness = fail.witness.as_ref().map(|w| format!(": {w}")).unwrap_or_default();
        return Err(Error::NotVerified(format!("{} {}{}", fail.id, fail.title, witness)));
    }
    Ok(VerifiedOic {
        graph: g.clone(),
        decomposition: d.clone(),
        sets: check.sets.expect("derived sets exist when verification passes"),
        reaches: check.reaches,
    })
}
