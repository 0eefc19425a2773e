use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{fmt_set, VertexId};

/// Position `(i, j)` of a node: depth `i` in the polytree, index `j >= 1`
/// within that depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeKey {
    pub depth: usize,
    pub index: usize,
}

impl NodeKey {
    pub fn new(depth: usize, index: usize) -> Self {
        NodeKey { depth, index }
    }
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.depth, self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompNode {
    pub key: NodeKey,
    pub vertices: BTreeSet<VertexId>,
}

/// Directed edge of the polytree together with the single vertex the two
/// nodes share.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TreeEdge {
    pub parent: NodeKey,
    pub child: NodeKey,
    pub shared: VertexId,
}

/// A polytree whose nodes are sets of inner vertices.
///
/// Construction only checks referential integrity; shape and overlap rules
/// are checked by [`structure_violation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytreeDecomposition {
    nodes: BTreeMap<NodeKey, BTreeSet<VertexId>>,
    edges: Vec<TreeEdge>,
}

impl PolytreeDecomposition {
    pub fn new(nodes: Vec<DecompNode>, mut edges: Vec<TreeEdge>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidDecomposition("no nodes".into()));
        }
        let mut map = BTreeMap::new();
        for n in nodes {
            if map.insert(n.key, n.vertices).is_some() {
                return Err(Error::InvalidDecomposition(format!("node {} listed twice", n.key)));
            }
        }
        edges.sort();
        let mut pairs = BTreeSet::new();
        for e in &edges {
            for end in [e.parent, e.child] {
                if !map.contains_key(&end) {
                    return Err(Error::InvalidDecomposition(format!(
                        "edge {} -> {} references unknown node {end}",
                        e.parent, e.child
                    )));
                }
            }
            let pair = (e.parent.min(e.child), e.parent.max(e.child));
            if !pairs.insert(pair) {
                return Err(Error::InvalidDecomposition(format!(
                    "more than one edge between {} and {}",
                    pair.0, pair.1
                )));
            }
        }
        Ok(PolytreeDecomposition { nodes: map, edges })
    }

    /// A single node holding `vertices`.
    pub fn single(vertices: BTreeSet<VertexId>) -> Self {
        PolytreeDecomposition {
            nodes: BTreeMap::from([(NodeKey::new(0, 1), vertices)]),
            edges: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn keys(&self) -> impl Iterator<Item = NodeKey> + '_ {
        self.nodes.keys().copied()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeKey, &BTreeSet<VertexId>)> {
        self.nodes.iter().map(|(k, v)| (*k, v))
    }

    pub fn vertices(&self, key: NodeKey) -> &BTreeSet<VertexId> {
        &self.nodes[&key]
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn parent_edges(&self, key: NodeKey) -> impl Iterator<Item = &TreeEdge> {
        self.edges.iter().filter(move |e| e.child == key)
    }

    pub fn child_edges(&self, key: NodeKey) -> impl Iterator<Item = &TreeEdge> {
        self.edges.iter().filter(move |e| e.parent == key)
    }

    /// Vertices a node shares with its children.
    pub fn child_shared(&self, key: NodeKey) -> BTreeSet<VertexId> {
        self.child_edges(key).map(|e| e.shared).collect()
    }

    /// Vertices a node shares with its parents.
    pub fn parent_shared(&self, key: NodeKey) -> BTreeSet<VertexId> {
        self.parent_edges(key).map(|e| e.shared).collect()
    }

    /// Union of all node vertex sets.
    pub fn inner_total(&self) -> BTreeSet<VertexId> {
        self.nodes.values().flatten().copied().collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let json: DecompositionJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("decomposition JSON: {e}")))?;
        Self::from_json(&json)
    }

    pub fn from_json(json: &DecompositionJson) -> Result<Self> {
        let nodes = json
            .nodes
            .iter()
            .map(|n| DecompNode {
                key: NodeKey::new(n.i, n.j),
                vertices: n.vertices.iter().map(|&v| VertexId(v)).collect(),
            })
            .collect();
        let edges = json
            .edges
            .iter()
            .map(|e| TreeEdge {
                parent: NodeKey::new(e.parent[0], e.parent[1]),
                child: NodeKey::new(e.child[0], e.child[1]),
                shared: VertexId(e.shared),
            })
            .collect();
        Self::new(nodes, edges)
    }

    pub fn to_json(&self) -> DecompositionJson {
        DecompositionJson {
            nodes: self
                .nodes
                .iter()
                .map(|(k, v)| NodeJson {
                    i: k.depth,
                    j: k.index,
                    vertices: v.iter().map(|x| x.0).collect(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    parent: [e.parent.depth, e.parent.index],
                    child: [e.child.depth, e.child.index],
                    shared: e.shared.0,
                })
                .collect(),
        }
    }
}

impl fmt::Display for PolytreeDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.nodes {
            writeln!(f, "{k} {}", fmt_set(v))?;
        }
        for e in &self.edges {
            writeln!(f, "{} -> {} via {}", e.parent, e.child, e.shared)?;
        }
        Ok(())
    }
}

/// Wire format:
/// `{"nodes":[{"i","j","vertices"}],"edges":[{"parent":[i,j],"child":[i,j],"shared":v}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub nodes: Vec<NodeJson>,
    #[serde(default)]
    pub edges: Vec<EdgeJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub i: usize,
    pub j: usize,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub parent: [usize; 2],
    pub child: [usize; 2],
    pub shared: usize,
}

/// First violated shape rule, if any: vertex range, index numbering, edge
/// depths and shared vertices, disjointness of non-adjacent nodes, tree
/// shape and the size lower bound `|V| > parents + children`.
pub fn structure_violation(k: usize, d: &PolytreeDecomposition) -> Option<String> {
    for (key, verts) in d.nodes() {
        if verts.is_empty() {
            return Some(format!("node {key} is empty"));
        }
        if let Some(v) = verts.iter().find(|v| v.0 >= k) {
            return Some(format!("node {key} contains vertex {} outside 0..{k}", v.0));
        }
        if key.index == 0 {
            return Some(format!("node {key}: indices within a depth start at 1"));
        }
    }

    let mut per_depth: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for key in d.keys() {
        per_depth.entry(key.depth).or_default().push(key.index);
    }
    for (pos, (depth, indices)) in per_depth.iter().enumerate() {
        if *depth != pos {
            return Some(format!("no node at depth {pos}"));
        }
        if indices.iter().enumerate().any(|(n, &j)| j != n + 1) {
            return Some(format!("indices at depth {depth} are not 1..{}", indices.len()));
        }
    }
    if d.keys().any(|key| key.depth > 0 && d.parent_edges(key).next().is_none()) {
        let key = d.keys().find(|key| key.depth > 0 && d.parent_edges(*key).next().is_none());
        return Some(format!("node {} at positive depth has no parent", key.unwrap()));
    }

    let mut adjacent = BTreeSet::new();
    for e in d.edges() {
        if e.child.depth != e.parent.depth + 1 {
            return Some(format!(
                "edge {} -> {} must go down exactly one depth",
                e.parent, e.child
            ));
        }
        let common: BTreeSet<VertexId> = d
            .vertices(e.parent)
            .intersection(d.vertices(e.child))
            .copied()
            .collect();
        if common != BTreeSet::from([e.shared]) {
            return Some(format!(
                "nodes {} and {} share {} instead of exactly the labelled vertex {}",
                e.parent,
                e.child,
                fmt_set(&common),
                e.shared
            ));
        }
        adjacent.insert((e.parent.min(e.child), e.parent.max(e.child)));
    }

    let keys: Vec<NodeKey> = d.keys().collect();
    for (a, &ka) in keys.iter().enumerate() {
        for &kb in &keys[a + 1..] {
            if adjacent.contains(&(ka, kb)) {
                continue;
            }
            if let Some(v) = d.vertices(ka).intersection(d.vertices(kb)).next() {
                return Some(format!("non-adjacent nodes {ka} and {kb} share {v}"));
            }
        }
    }

    if d.edges().len() + 1 != keys.len() {
        return Some(format!(
            "{} nodes joined by {} edges; a tree needs exactly {}",
            keys.len(),
            d.edges().len(),
            keys.len() - 1
        ));
    }
    let mut seen = BTreeSet::from([keys[0]]);
    let mut queue = VecDeque::from([keys[0]]);
    while let Some(n) = queue.pop_front() {
        for e in d.edges() {
            let next = if e.parent == n {
                e.child
            } else if e.child == n {
                e.parent
            } else {
                continue;
            };
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    if let Some(key) = keys.iter().find(|k| !seen.contains(k)) {
        return Some(format!("node {key} is not connected to {}", keys[0]));
    }

    for key in d.keys() {
        let links = d.parent_edges(key).count() + d.child_edges(key).count();
        let size = d.vertices(key).len();
        if size <= links {
            return Some(format!(
                "node {key} has {size} vertices but {links} neighbouring nodes; needs more vertices than neighbours"
            ));
        }
    }
    None
}
