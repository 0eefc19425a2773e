//! Plain interlinked-cycle structures: a single inner vertex set `V_I`.
//!
//! An I-path is a simple path between two distinct inner vertices whose
//! interior contains no inner vertex. The structure is valid when there is
//! no I-cycle, every non-inner vertex lies on an I-path, each ordered pair
//! of inner vertices is joined by exactly one I-path, and the non-inner
//! vertices induce an acyclic subgraph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::Gf2Vec;
use crate::codec::{CodeSymbol, DecodingPlan, LinearCode, ReceiverPlan};
use crate::error::{Error, Result};
use crate::graph::{fmt_set, Acyclicity, Digraph, PathEnumeration, VertexId};
use crate::report::{ConditionResult, VerificationReport, Witness};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerVertexSet {
    members: BTreeSet<VertexId>,
}

impl InnerVertexSet {
    pub fn new(k: usize, members: BTreeSet<VertexId>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidDecomposition("inner vertex set is empty".into()));
        }
        if let Some(v) = members.iter().find(|v| v.0 >= k) {
            return Err(Error::InvalidDecomposition(format!(
                "inner vertex {} outside 0..{k}",
                v.0
            )));
        }
        Ok(InnerVertexSet { members })
    }

    pub fn members(&self) -> &BTreeSet<VertexId> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.contains(&v)
    }

    pub fn parse(k: usize, text: &str) -> Result<Self> {
        let json: InnerSetJson = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("inner vertex set JSON: {e}")))?;
        Self::new(k, json.v_i.into_iter().map(VertexId).collect())
    }

    pub fn to_json(&self) -> InnerSetJson {
        InnerSetJson {
            v_i: self.members.iter().map(|v| v.0).collect(),
        }
    }
}

/// Wire format: `{"V_I": [ids]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InnerSetJson {
    #[serde(rename = "V_I")]
    pub v_i: Vec<usize>,
}

/// A directed tree embedded in the side-information graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    root: VertexId,
    parent: BTreeMap<VertexId, VertexId>,
    depth: BTreeMap<VertexId, usize>,
}

impl RootedTree {
    pub fn single(root: VertexId) -> Self {
        RootedTree {
            root,
            parent: BTreeMap::new(),
            depth: BTreeMap::from([(root, 0)]),
        }
    }

    /// Union of paths that all start at `root`. Fails if some vertex would
    /// receive two different parents.
    pub fn from_paths<'a, I>(root: VertexId, paths: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Vec<VertexId>>,
    {
        let mut tree = Self::single(root);
        for path in paths {
            if path.first() != Some(&root) {
                return Err(Error::Tree(format!("path does not start at root {root}")));
            }
            for (d, pair) in path.windows(2).enumerate() {
                let (u, v) = (pair[0], pair[1]);
                if v == root {
                    return Err(Error::Tree(format!("path returns to root {root}")));
                }
                match tree.parent.get(&v) {
                    Some(&p) if p != u => {
                        return Err(Error::Tree(format!(
                            "{v} reached from both {p} and {u} in the tree rooted at {root}"
                        )));
                    }
                    Some(_) => {}
                    None => {
                        tree.parent.insert(v, u);
                        tree.depth.insert(v, d + 1);
                    }
                }
            }
        }
        Ok(tree)
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.depth.keys().copied()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.depth.contains_key(&v)
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent.get(&v).copied()
    }

    pub fn depth(&self, v: VertexId) -> Option<usize> {
        self.depth.get(&v).copied()
    }

    pub fn children(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.parent
            .iter()
            .filter(|(_, p)| **p == v)
            .map(|(c, _)| *c)
            .collect()
    }

    /// Tree edges as (parent, child).
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.parent.iter().map(|(c, p)| (*p, *c))
    }

    pub fn leaves(&self) -> BTreeSet<VertexId> {
        let parents: BTreeSet<VertexId> = self.parent.values().copied().collect();
        self.vertices()
            .filter(|v| *v != self.root && !parents.contains(v))
            .collect()
    }

    /// Non-leaf vertices at depth greater than zero; their code symbols are
    /// XORed during decoding.
    pub fn interior(&self) -> BTreeSet<VertexId> {
        let parents: BTreeSet<VertexId> = self.parent.values().copied().collect();
        parents.into_iter().filter(|v| *v != self.root).collect()
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges().map(|(p, c)| format!("{p}->{c}")).collect();
        write!(f, "root {} [{}]", self.root, edges.join(", "))
    }
}

// I-path helpers shared with the overlapping verifier. `inner[v]` marks the
// vertices that terminate paths.

pub(crate) fn i_paths(
    g: &Digraph,
    inner: &[bool],
    from: VertexId,
    to: VertexId,
    max_count: usize,
) -> PathEnumeration {
    let allowed: Vec<bool> = inner.iter().map(|x| !x).collect();
    g.enumerate_paths_masked(from, to, &allowed, max_count)
}

/// A cycle through inner vertex `x` whose other vertices are all non-inner.
pub(crate) fn i_cycle(g: &Digraph, inner: &[bool], x: VertexId) -> Option<Vec<VertexId>> {
    let allowed: Vec<bool> = inner.iter().map(|x| !x).collect();
    g.cycle_through(x, &allowed)
}

pub(crate) fn non_inner_cycle(g: &Digraph, inner: &[bool]) -> Option<Vec<VertexId>> {
    let keep: BTreeSet<VertexId> = g.vertices().filter(|v| !inner[v.0]).collect();
    let (sub, map) = g.induced_subgraph(&keep);
    match sub.acyclicity() {
        Acyclicity::Acyclic { .. } => None,
        Acyclicity::Cyclic { cycle } => Some(cycle.into_iter().map(|v| map[v.0]).collect()),
    }
}

/// Inner vertices reached from non-inner `v` along paths with non-inner
/// interior.
pub(crate) fn termini(g: &Digraph, inner: &[bool], v: VertexId) -> BTreeSet<VertexId> {
    walk_non_inner(g, inner, v, |g, u| g.successors(u))
}

/// Inner vertices that reach non-inner `v` along paths with non-inner
/// interior.
pub(crate) fn sources(g: &Digraph, inner: &[bool], v: VertexId) -> BTreeSet<VertexId> {
    walk_non_inner(g, inner, v, |g, u| g.predecessors(u))
}

fn walk_non_inner<'g, F>(g: &'g Digraph, inner: &[bool], v: VertexId, next: F) -> BTreeSet<VertexId>
where
    F: Fn(&'g Digraph, VertexId) -> &'g [VertexId],
{
    let mut seen = vec![false; g.vertex_count()];
    let mut found = BTreeSet::new();
    let mut queue = VecDeque::from([v]);
    seen[v.0] = true;
    while let Some(u) = queue.pop_front() {
        for &w in next(g, u) {
            if inner[w.0] {
                found.insert(w);
            } else if !seen[w.0] {
                seen[w.0] = true;
                queue.push_back(w);
            }
        }
    }
    found
}

/// Checks that every non-inner vertex sits on some I-path.
pub(crate) fn uncovered_non_inner(g: &Digraph, inner: &[bool]) -> Option<VertexId> {
    g.vertices().filter(|v| !inner[v.0]).find(|&v| {
        let ends = termini(g, inner, v);
        let starts = sources(g, inner, v);
        !starts.iter().any(|a| ends.iter().any(|b| a != b))
    })
}

pub fn find_i_paths(g: &Digraph, vi: &InnerVertexSet, from: VertexId, to: VertexId) -> Vec<Vec<VertexId>> {
    g.enumerate_paths(from, to, vi.members(), usize::MAX).paths
}

fn inner_table(k: usize, vi: &InnerVertexSet) -> Vec<bool> {
    let mut inner = vec![false; k];
    for v in vi.members() {
        inner[v.0] = true;
    }
    inner
}

pub fn verify_ic(g: &Digraph, vi: &InnerVertexSet) -> VerificationReport {
    let inner = inner_table(g.vertex_count(), vi);
    let mut conditions = Vec::with_capacity(4);

    const A: (&str, &str) = ("a", "no I-cycle");
    conditions.push(
        match vi.members().iter().find_map(|&x| i_cycle(g, &inner, x)) {
            None => ConditionResult::pass(A.0, A.1),
            Some(cycle) => ConditionResult::fail(A.0, A.1, Witness::Cycle { vertices: cycle }, ""),
        },
    );

    const B: (&str, &str) = ("b", "every non-inner vertex lies on an I-path");
    conditions.push(match uncovered_non_inner(g, &inner) {
        None => ConditionResult::pass(B.0, B.1),
        Some(v) => ConditionResult::fail(B.0, B.1, Witness::Vertex { vertex: v }, ""),
    });

    const C: (&str, &str) = ("c", "exactly one I-path per ordered inner pair");
    let mut unique = ConditionResult::pass(C.0, C.1);
    'pairs: for &a in vi.members() {
        for &b in vi.members() {
            if a == b {
                continue;
            }
            let found = i_paths(g, &inner, a, b, 2);
            match found.paths.len() {
                1 => {}
                0 => {
                    unique = ConditionResult::fail(C.0, C.1, Witness::MissingPath { from: a, to: b }, "");
                    break 'pairs;
                }
                _ => {
                    unique = ConditionResult::fail(
                        C.0,
                        C.1,
                        Witness::DuplicatePaths {
                            first: found.paths[0].clone(),
                            second: found.paths[1].clone(),
                        },
                        "",
                    );
                    break 'pairs;
                }
            }
        }
    }
    conditions.push(unique);

    const D: (&str, &str) = ("d", "no cycle among non-inner vertices");
    conditions.push(match non_inner_cycle(g, &inner) {
        None => ConditionResult::pass(D.0, D.1),
        Some(cycle) => ConditionResult::fail(D.0, D.1, Witness::Cycle { vertices: cycle }, ""),
    });

    VerificationReport { conditions }
}

/// An interlinked-cycle structure that passed [`verify_ic`].
#[derive(Clone, Debug)]
pub struct VerifiedIc {
    graph: Digraph,
    inner: InnerVertexSet,
}

impl VerifiedIc {
    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn inner(&self) -> &InnerVertexSet {
        &self.inner
    }

    pub fn non_inner(&self) -> BTreeSet<VertexId> {
        self.graph.vertices().filter(|v| !self.inner.contains(*v)).collect()
    }
}

/// Verifies and wraps the structure, failing with the first violated
/// condition.
pub fn certify_ic(g: &Digraph, vi: &InnerVertexSet) -> Result<VerifiedIc> {
    if let Some(v) = vi.members().iter().find(|v| v.0 >= g.vertex_count()) {
        return Err(Error::InvalidDecomposition(format!("inner vertex {} outside graph", v.0)));
    }
    let report = verify_ic(g, vi);
    if let Some(fail) = report.first_failure() {
        let witness = fail.witness.as_ref().map(|w| format!(": {w}")).unwrap_or_default();
        return Err(Error::NotVerified(format!("condition ({}) {}{}", fail.id, fail.title, witness)));
    }
    Ok(VerifiedIc {
        graph: g.clone(),
        inner: vi.clone(),
    })
}

pub const IC_INNER_LABEL: &str = "y_I";

pub fn non_inner_label(v: VertexId) -> String {
    format!("y_{}", v.0 + 1)
}

/// `y_I` over the inner set, then `x_j + N+(x_j)` per non-inner vertex in
/// ascending order.
pub fn encode_ic(ic: &VerifiedIc) -> LinearCode {
    let k = ic.graph.vertex_count();
    let mut symbols = vec![CodeSymbol {
        label: IC_INNER_LABEL.to_string(),
        mask: Gf2Vec::from_indices(k, ic.inner.members().iter().map(|v| v.0)),
    }];
    for v in ic.non_inner() {
        symbols.push(non_inner_symbol(&ic.graph, v));
    }
    LinearCode::new(k, symbols).expect("interlinked-cycle code is well formed")
}

pub(crate) fn non_inner_symbol(g: &Digraph, v: VertexId) -> CodeSymbol {
    let mut mask = Gf2Vec::unit(g.vertex_count(), v.0);
    for w in g.successors(v) {
        mask.set(w.0, true);
    }
    CodeSymbol {
        label: non_inner_label(v),
        mask,
    }
}

/// Tree rooted at `root` whose leaves are the other inner vertices, formed by
/// the unique I-paths from the root.
pub fn build_tree_ic(ic: &VerifiedIc, root: VertexId) -> Result<RootedTree> {
    if !ic.inner.contains(root) {
        return Err(Error::Tree(format!("{root} is not an inner vertex")));
    }
    let inner = inner_table(ic.graph.vertex_count(), &ic.inner);
    let mut paths = Vec::new();
    for &leaf in ic.inner.members() {
        if leaf == root {
            continue;
        }
        let found = i_paths(&ic.graph, &inner, root, leaf, 2);
        if found.paths.len() != 1 {
            return Err(Error::Tree(format!(
                "{} I-paths from {root} to {leaf}; exactly one required",
                if found.truncated { "2+".to_string() } else { found.paths.len().to_string() }
            )));
        }
        paths.extend(found.paths);
    }
    RootedTree::from_paths(root, &paths)
}

/// Decoding plan: non-inner receivers use their own symbol; inner receivers
/// XOR `y_I` with the symbols of the non-leaf tree vertices below the root.
pub fn plan_ic(ic: &VerifiedIc) -> Result<DecodingPlan> {
    let code = encode_ic(ic);
    let mut receivers = Vec::new();
    for k in ic.graph.vertices() {
        let (tree, labels) = if ic.inner.contains(k) {
            let tree = build_tree_ic(ic, k)?;
            let mut labels = vec![IC_INNER_LABEL.to_string()];
            labels.extend(tree.interior().into_iter().map(non_inner_label));
            (Some(format!("T_{}", k.0 + 1)), labels)
        } else {
            (None, vec![non_inner_label(k)])
        };
        receivers.push(ReceiverPlan::build(&ic.graph, &code, k, tree, &labels)?);
    }
    Ok(DecodingPlan::new(code, receivers))
}

impl fmt::Display for InnerVertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_set(&self.members))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: usize) -> VertexId {
        VertexId(i)
    }

    fn set(ids: &[usize]) -> BTreeSet<VertexId> {
        ids.iter().map(|&i| VertexId(i)).collect()
    }

    /// Five vertices, inner set {x1,x2,x3}, non-inner x4 -> x2 and x5 -> x1.
    fn ic5() -> Digraph {
        Digraph::new(
            5,
            [(0, 2), (0, 3), (1, 2), (1, 4), (2, 3), (2, 4), (3, 1), (4, 0)],
        )
        .unwrap()
    }

    #[test]
    fn i_path_examples() {
        let g = ic5();
        let vi = InnerVertexSet::new(5, set(&[0, 1, 2])).unwrap();
        assert_eq!(find_i_paths(&g, &vi, v(0), v(1)), vec![vec![v(0), v(3), v(1)]]);

        let dag = Digraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let vi = InnerVertexSet::new(3, set(&[0, 2])).unwrap();
        assert!(find_i_paths(&dag, &vi, v(0), v(0)).is_empty());

        let two = Digraph::new(2, [(0, 1), (1, 0)]).unwrap();
        let vi = InnerVertexSet::new(2, set(&[0, 1])).unwrap();
        assert_eq!(find_i_paths(&two, &vi, v(0), v(1)), vec![vec![v(0), v(1)]]);
    }

    #[test]
    fn single_vertex_passes_vacuously() {
        let g = Digraph::empty(1);
        let vi = InnerVertexSet::new(1, set(&[0])).unwrap();
        assert!(verify_ic(&g, &vi).passed());
        let ic = certify_ic(&g, &vi).unwrap();
        let code = encode_ic(&ic);
        assert_eq!(code.len(), 1);
        assert_eq!(code.symbols()[0].mask, Gf2Vec::from_indices(1, [0]));
        assert_eq!(build_tree_ic(&ic, v(0)).unwrap(), RootedTree::single(v(0)));
    }

    #[test]
    fn each_condition_has_a_witness() {
        // I-cycle: x1 -> x3 -> x1 with x3 non-inner.
        let g = Digraph::new(3, [(0, 1), (1, 0), (0, 2), (2, 0)]).unwrap();
        let vi = InnerVertexSet::new(3, set(&[0, 1])).unwrap();
        let r = verify_ic(&g, &vi);
        assert!(!r.get("a").unwrap().passed);
        assert_eq!(
            r.get("a").unwrap().witness,
            Some(Witness::Cycle { vertices: vec![v(0), v(2)] })
        );

        // Uncovered non-inner vertex x3 (isolated).
        let g = Digraph::new(3, [(0, 1), (1, 0)]).unwrap();
        let r = verify_ic(&g, &vi);
        assert_eq!(r.get("b").unwrap().witness, Some(Witness::Vertex { vertex: v(2) }));

        // Two I-paths x1 -> x2.
        let g = Digraph::new(3, [(0, 1), (0, 2), (2, 1), (1, 0)]).unwrap();
        let r = verify_ic(&g, &vi);
        assert!(matches!(
            r.get("c").unwrap().witness,
            Some(Witness::DuplicatePaths { .. })
        ));

        // Missing I-path x2 -> x1.
        let g = Digraph::new(2, [(0, 1)]).unwrap();
        let r = verify_ic(&g, &InnerVertexSet::new(2, set(&[0, 1])).unwrap());
        assert_eq!(
            r.get("c").unwrap().witness,
            Some(Witness::MissingPath { from: v(1), to: v(0) })
        );

        // Cycle among non-inner vertices x3 <-> x4.
        let g = Digraph::new(4, [(0, 2), (2, 1), (1, 3), (3, 0), (2, 3), (3, 2)]).unwrap();
        let r = verify_ic(&g, &vi);
        assert!(!r.get("d").unwrap().passed);
    }

    #[test]
    fn tree_and_code_for_five_vertex_structure() {
        let g = ic5();
        let vi = InnerVertexSet::new(5, set(&[0, 1, 2])).unwrap();
        let ic = certify_ic(&g, &vi).unwrap();
        let t3 = build_tree_ic(&ic, v(2)).unwrap();
        assert_eq!(t3.interior(), set(&[3, 4]));
        assert_eq!(t3.leaves(), set(&[0, 1]));
        for (p, c) in t3.edges() {
            assert!(g.has_edge(p, c));
        }
        let code = encode_ic(&ic);
        let labels: Vec<&str> = code.symbols().iter().map(|s| s.label.as_str()).collect();
        assert_eq!(labels, vec!["y_I", "y_4", "y_5"]);
    }

    #[test]
    fn unverified_input_is_rejected() {
        let g = Digraph::new(2, [(0, 1)]).unwrap();
        let vi = InnerVertexSet::new(2, set(&[0, 1])).unwrap();
        assert!(matches!(certify_ic(&g, &vi), Err(Error::NotVerified(_))));
    }

    #[test]
    fn tree_from_conflicting_paths_fails() {
        let paths = vec![vec![v(0), v(1), v(3)], vec![v(0), v(2), v(3)]];
        assert!(RootedTree::from_paths(v(0), &paths).is_err());
    }
}
