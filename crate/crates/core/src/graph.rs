//! Directed side-information graphs and the path/cycle machinery used by
//! the structure verifiers.
//!
//! An edge `u -> v` means the receiver that wants message `u` already holds
//! message `v`. Vertices are dense 0-based indices; the 1-based `x1..xK`
//! names only appear when formatting.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0 + 1)
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

/// Formats a vertex sequence as `x1 -> x3 -> x2`.
pub fn fmt_path(path: &[VertexId]) -> String {
    path.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" -> ")
}

/// Formats a vertex set as `{x1, x3}`.
pub fn fmt_set<'a, I: IntoIterator<Item = &'a VertexId>>(set: I) -> String {
    let parts: Vec<String> = set.into_iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

#[derive(Clone, PartialEq, Eq)]
pub struct Digraph {
    out: Vec<Vec<VertexId>>,
    inn: Vec<Vec<VertexId>>,
    edge_count: usize,
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Digraph")
            .field("k", &self.vertex_count())
            .field("edges", &self.edges().map(|(u, v)| (u.0, v.0)).collect::<Vec<_>>())
            .finish()
    }
}

impl Digraph {
    /// Builds a graph, rejecting self-loops, duplicate edges and endpoints
    /// outside `0..k`.
    pub fn new<I>(k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); k];
        for (u, v) in edges {
            if u >= k || v >= k {
                return Err(Error::InvalidGraph(format!(
                    "edge [{u},{v}] has an endpoint outside 0..{k}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop [{u},{v}]")));
            }
            if !out[u].insert(VertexId(v)) {
                return Err(Error::InvalidGraph(format!("duplicate edge [{u},{v}]")));
            }
        }
        Ok(Self::from_sets(out))
    }

    fn from_sets(out: Vec<BTreeSet<VertexId>>) -> Self {
        let k = out.len();
        let mut inn = vec![Vec::new(); k];
        let mut edge_count = 0;
        for (u, succ) in out.iter().enumerate() {
            for v in succ {
                inn[v.0].push(VertexId(u));
                edge_count += 1;
            }
        }
        Digraph {
            out: out.into_iter().map(|s| s.into_iter().collect()).collect(),
            inn,
            edge_count,
        }
    }

    pub fn empty(k: usize) -> Self {
        Self::from_sets(vec![BTreeSet::new(); k])
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count()).map(VertexId)
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, succ)| succ.iter().map(move |v| (VertexId(u), *v)))
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.out[u.0].binary_search(&v).is_ok()
    }

    /// Successors of `v` in ascending order.
    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.out[v.0]
    }

    /// Predecessors of `v` in ascending order.
    pub fn predecessors(&self, v: VertexId) -> &[VertexId] {
        &self.inn[v.0]
    }

    pub fn out_neighborhood(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.out[v.0].iter().copied().collect()
    }

    pub fn with_edge(&self, u: VertexId, v: VertexId) -> Result<Digraph> {
        Digraph::new(
            self.vertex_count(),
            self.edges().map(|(a, b)| (a.0, b.0)).chain([(u.0, v.0)]),
        )
    }

    pub fn without_edge(&self, u: VertexId, v: VertexId) -> Digraph {
        let mut out: Vec<BTreeSet<VertexId>> =
            self.out.iter().map(|s| s.iter().copied().collect()).collect();
        out[u.0].remove(&v);
        Self::from_sets(out)
    }

    /// All simple paths `from -> ... -> to` whose interior vertices avoid
    /// `interior_forbidden`, in lexicographic order of vertex sequences.
    ///
    /// At most `max_count` paths are returned; `truncated` is set when more
    /// exist. With `from == to` the closed paths (cycles through `from`) are
    /// enumerated instead, each written `[from, ..., from]`.
    pub fn enumerate_paths(
        &self,
        from: VertexId,
        to: VertexId,
        interior_forbidden: &BTreeSet<VertexId>,
        max_count: usize,
    ) -> PathEnumeration {
        let k = self.vertex_count();
        let mut allowed = vec![true; k];
        for v in interior_forbidden {
            allowed[v.0] = false;
        }
        allowed[from.0] = false;
        allowed[to.0] = false;
        self.enumerate_paths_masked(from, to, &allowed, max_count)
    }

    /// Same as [`Digraph::enumerate_paths`] with the admissible interior given
    /// as a membership table. Endpoints are never used as interior vertices.
    pub fn enumerate_paths_masked(
        &self,
        from: VertexId,
        to: VertexId,
        allowed_interior: &[bool],
        max_count: usize,
    ) -> PathEnumeration {
        let k = self.vertex_count();
        // Interior vertices that can still reach `to`.
        let mut useful = vec![false; k];
        let mut queue = VecDeque::new();
        for &p in self.predecessors(to) {
            if allowed_interior[p.0] && p != from && p != to && !useful[p.0] {
                useful[p.0] = true;
                queue.push_back(p);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &p in self.predecessors(v) {
                if allowed_interior[p.0] && p != from && p != to && !useful[p.0] {
                    useful[p.0] = true;
                    queue.push_back(p);
                }
            }
        }

        let mut result = PathEnumeration {
            paths: Vec::new(),
            truncated: false,
        };
        let mut on_path = vec![false; k];
        let mut path = vec![from];
        on_path[from.0] = true;
        self.paths_dfs(to, &useful, &mut on_path, &mut path, max_count, &mut result);
        result
    }

    fn paths_dfs(
        &self,
        to: VertexId,
        useful: &[bool],
        on_path: &mut [bool],
        path: &mut Vec<VertexId>,
        max_count: usize,
        result: &mut PathEnumeration,
    ) -> bool {
        let last = *path.last().unwrap();
        for &w in self.successors(last) {
            if w == to {
                if result.paths.len() == max_count {
                    result.truncated = true;
                    return true;
                }
                let mut p = path.clone();
                p.push(to);
                result.paths.push(p);
            } else if useful[w.0] && !on_path[w.0] {
                on_path[w.0] = true;
                path.push(w);
                let stop = self.paths_dfs(to, useful, on_path, path, max_count, result);
                path.pop();
                on_path[w.0] = false;
                if stop {
                    return true;
                }
            }
        }
        false
    }

    /// Topological order, or a directed cycle when none exists.
    pub fn acyclicity(&self) -> Acyclicity {
        let k = self.vertex_count();
        let mut indeg: Vec<usize> = self.inn.iter().map(|p| p.len()).collect();
        let mut ready: BTreeSet<VertexId> =
            self.vertices().filter(|v| indeg[v.0] == 0).collect();
        let mut order = Vec::with_capacity(k);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &w in self.successors(v) {
                indeg[w.0] -= 1;
                if indeg[w.0] == 0 {
                    ready.insert(w);
                }
            }
        }
        if order.len() == k {
            return Acyclicity::Acyclic { order };
        }
        // Every unplaced vertex has an unplaced predecessor; walk backwards
        // until a vertex repeats.
        let start = self.vertices().find(|v| indeg[v.0] > 0).unwrap();
        let mut seen_at = vec![usize::MAX; k];
        let mut walk = Vec::new();
        let mut v = start;
        while seen_at[v.0] == usize::MAX {
            seen_at[v.0] = walk.len();
            walk.push(v);
            v = *self
                .predecessors(v)
                .iter()
                .find(|p| indeg[p.0] > 0)
                .expect("unplaced vertex without unplaced predecessor");
        }
        let mut cycle: Vec<VertexId> = walk[seen_at[v.0]..].to_vec();
        cycle.reverse();
        Acyclicity::Cyclic {
            cycle: rotate_to_min(cycle),
        }
    }

    pub fn is_acyclic(&self) -> bool {
        matches!(self.acyclicity(), Acyclicity::Acyclic { .. })
    }

    /// Strongly connected components, each sorted, ordered by smallest
    /// member.
    pub fn strongly_connected_components(&self) -> Vec<BTreeSet<VertexId>> {
        let k = self.vertex_count();
        // Kosaraju: finishing order on the graph, then sweeps on the reverse.
        let mut visited = vec![false; k];
        let mut finish = Vec::with_capacity(k);
        for s in 0..k {
            if visited[s] {
                continue;
            }
            visited[s] = true;
            let mut stack = vec![(s, 0usize)];
            while let Some((v, i)) = stack.pop() {
                if let Some(&w) = self.out[v].get(i) {
                    stack.push((v, i + 1));
                    if !visited[w.0] {
                        visited[w.0] = true;
                        stack.push((w.0, 0));
                    }
                } else {
                    finish.push(v);
                }
            }
        }
        let mut comp = vec![usize::MAX; k];
        let mut comps: Vec<BTreeSet<VertexId>> = Vec::new();
        for &s in finish.iter().rev() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = BTreeSet::new();
            let mut stack = vec![s];
            comp[s] = id;
            while let Some(v) = stack.pop() {
                members.insert(VertexId(v));
                for &p in &self.inn[v] {
                    if comp[p.0] == usize::MAX {
                        comp[p.0] = id;
                        stack.push(p.0);
                    }
                }
            }
            comps.push(members);
        }
        comps.sort_by_key(|c| *c.first().unwrap());
        comps
    }

    /// A directed cycle through `v` whose other vertices all satisfy
    /// `allowed`, written starting at `v` (closing edge back to `v` implied).
    pub fn cycle_through(&self, v: VertexId, allowed: &[bool]) -> Option<Vec<VertexId>> {
        let k = self.vertex_count();
        let mut parent = vec![usize::MAX; k];
        let mut queue = VecDeque::new();
        for &w in self.successors(v) {
            if w == v {
                continue;
            }
            if allowed[w.0] && parent[w.0] == usize::MAX {
                parent[w.0] = v.0;
                queue.push_back(w);
            }
        }
        while let Some(u) = queue.pop_front() {
            if self.has_edge(u, v) {
                let mut cycle = vec![u];
                let mut cur = u;
                while parent[cur.0] != v.0 {
                    cur = VertexId(parent[cur.0]);
                    cycle.push(cur);
                }
                cycle.push(v);
                cycle.reverse();
                return Some(cycle);
            }
            for &w in self.successors(u) {
                if w != v && allowed[w.0] && parent[w.0] == usize::MAX {
                    parent[w.0] = u.0;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Subgraph induced by `keep`, re-indexed densely in ascending order.
    /// The returned table maps new indices to the original vertices.
    pub fn induced_subgraph(&self, keep: &BTreeSet<VertexId>) -> (Digraph, Vec<VertexId>) {
        let map: Vec<VertexId> = keep.iter().copied().collect();
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (new, old) in map.iter().enumerate() {
            index[old.0] = new;
        }
        let mut out = vec![BTreeSet::new(); map.len()];
        for (new, old) in map.iter().enumerate() {
            for w in self.successors(*old) {
                if index[w.0] != usize::MAX {
                    out[new].insert(VertexId(index[w.0]));
                }
            }
        }
        (Self::from_sets(out), map)
    }

    /// Whether the subgraph induced by `keep` is acyclic.
    pub fn is_acyclic_on(&self, keep: &BTreeSet<VertexId>) -> bool {
        self.induced_subgraph(keep).0.is_acyclic()
    }

    pub fn to_json(&self, t: usize) -> GraphJson {
        GraphJson {
            k: self.vertex_count(),
            edges: self.edges().map(|(u, v)| [u.0, v.0]).collect(),
            t,
        }
    }
}

fn rotate_to_min(mut cycle: Vec<VertexId>) -> Vec<VertexId> {
    if let Some((pos, _)) = cycle.iter().enumerate().min_by_key(|(_, v)| **v) {
        cycle.rotate_left(pos);
    }
    cycle
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathEnumeration {
    pub paths: Vec<Vec<VertexId>>,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Acyclicity {
    Acyclic { order: Vec<VertexId> },
    /// Vertex sequence of a directed cycle, starting at its smallest vertex;
    /// the closing edge back to the first vertex is implied.
    Cyclic { cycle: Vec<VertexId> },
}

/// Wire format: `{"K": int, "edges": [[u,v],...], "t": int}` with 0-based ids.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    #[serde(rename = "K")]
    pub k: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default = "default_t")]
    pub t: usize,
}

fn default_t() -> usize {
    1
}

/// A single unicast index coding instance: receiver `k` wants message `k`
/// and holds the messages of its out-neighbours.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuicpInstance {
    pub graph: Digraph,
    /// Bits per message.
    pub message_bits: usize,
}

impl SuicpInstance {
    pub fn new(graph: Digraph, message_bits: usize) -> Result<Self> {
        if graph.vertex_count() == 0 {
            return Err(Error::InvalidGraph("an instance needs at least one vertex".into()));
        }
        if message_bits == 0 {
            return Err(Error::InvalidGraph("message width t must be at least 1".into()));
        }
        Ok(SuicpInstance {
            graph,
            message_bits,
        })
    }

    pub fn k(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn want(&self, receiver: VertexId) -> VertexId {
        receiver
    }

    pub fn side_information(&self, receiver: VertexId) -> BTreeSet<VertexId> {
        self.graph.out_neighborhood(receiver)
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        let graph = Digraph::new(json.k, json.edges.iter().map(|e| (e[0], e[1])))?;
        Self::new(graph, json.t)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let json: GraphJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph JSON: {e}")))?;
        Self::from_json(&json)
    }

    pub fn to_json(&self) -> GraphJson {
        self.graph.to_json(self.message_bits)
    }
}
