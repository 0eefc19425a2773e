use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::VertexId;

use super::decomposition::{structure_violation, NodeKey, PolytreeDecomposition};

/// A node reachable from some node through one of its children, with the
/// vertices it contributes when a root decodes through it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descendant {
    pub node: NodeKey,
    /// Nodes on the directed path from the branch child down to `node`,
    /// inclusive at both ends.
    pub path: Vec<NodeKey>,
    /// Vertices of every node on `path` minus the vertices each node shares
    /// with its parent on the path.
    pub path_vertices: BTreeSet<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChildBranch {
    pub child: NodeKey,
    pub shared: VertexId,
    /// The child and every node below it, in breadth-first order.
    pub descendants: Vec<Descendant>,
}

/// Sets computed from a structurally valid decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedSets {
    pub inner_total: BTreeSet<VertexId>,
    pub non_inner: BTreeSet<VertexId>,
    /// Per node, its vertices minus those shared with its parents. These
    /// partition the inner vertices.
    pub tilde: BTreeMap<NodeKey, BTreeSet<VertexId>>,
    pub branches: BTreeMap<NodeKey, Vec<ChildBranch>>,
}

impl DerivedSets {
    /// Node whose `tilde` set contains `v`.
    pub fn owner(&self, v: VertexId) -> Option<NodeKey> {
        self.tilde.iter().find(|(_, s)| s.contains(&v)).map(|(k, _)| *k)
    }

    pub fn is_inner(&self, v: VertexId) -> bool {
        self.inner_total.contains(&v)
    }

    pub fn inner_table(&self, k: usize) -> Vec<bool> {
        let mut table = vec![false; k];
        for v in &self.inner_total {
            table[v.0] = true;
        }
        table
    }
}

pub fn derive_sets(k: usize, d: &PolytreeDecomposition) -> Result<DerivedSets> {
    if let Some(msg) = structure_violation(k, d) {
        return Err(Error::InvalidDecomposition(msg));
    }
    let inner_total = d.inner_total();
    let non_inner = (0..k).map(VertexId).filter(|v| !inner_total.contains(v)).collect();

    let tilde = d
        .keys()
        .map(|key| {
            let shared = d.parent_shared(key);
            (key, d.vertices(key).difference(&shared).copied().collect())
        })
        .collect();

    let mut branches = BTreeMap::new();
    for key in d.keys() {
        let list = d
            .child_edges(key)
            .map(|e| ChildBranch {
                child: e.child,
                shared: e.shared,
                descendants: descendants(d, e.child, e.shared),
            })
            .collect();
        branches.insert(key, list);
    }

    Ok(DerivedSets {
        inner_total,
        non_inner,
        tilde,
        branches,
    })
}

fn descendants(d: &PolytreeDecomposition, child: NodeKey, entry: VertexId) -> Vec<Descendant> {
    let mut first = d.vertices(child).clone();
    first.remove(&entry);
    let mut out = vec![Descendant {
        node: child,
        path: vec![child],
        path_vertices: first,
    }];
    let mut at = 0;
    while at < out.len() {
        let cur = out[at].clone();
        for e in d.child_edges(cur.node) {
            let mut path = cur.path.clone();
            path.push(e.child);
            let mut verts = cur.path_vertices.clone();
            verts.extend(d.vertices(e.child).iter().filter(|v| **v != e.shared));
            out.push(Descendant {
                node: e.child,
                path,
                path_vertices: verts,
            });
        }
        at += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oic::decomposition::{DecompNode, TreeEdge};

    fn set(ids: &[usize]) -> BTreeSet<VertexId> {
        ids.iter().map(|&i| VertexId(i)).collect()
    }

    /// Chain (0,1) -> (1,1) -> (2,1) sharing x4 and x6.
    fn chain() -> PolytreeDecomposition {
        let n = |d, v: &[usize]| DecompNode { key: NodeKey::new(d, 1), vertices: set(v) };
        PolytreeDecomposition::new(
            vec![n(0, &[0, 3, 4]), n(1, &[1, 3, 5]), n(2, &[2, 5, 6])],
            vec![
                TreeEdge { parent: NodeKey::new(0, 1), child: NodeKey::new(1, 1), shared: VertexId(3) },
                TreeEdge { parent: NodeKey::new(1, 1), child: NodeKey::new(2, 1), shared: VertexId(5) },
            ],
        )
        .unwrap()
    }

    #[test]
    fn tilde_sets_partition_inner_vertices() {
        let sets = derive_sets(10, &chain()).unwrap();
        assert_eq!(sets.tilde[&NodeKey::new(0, 1)], set(&[0, 3, 4]));
        assert_eq!(sets.tilde[&NodeKey::new(1, 1)], set(&[1, 5]));
        assert_eq!(sets.tilde[&NodeKey::new(2, 1)], set(&[2, 6]));
        assert_eq!(sets.non_inner, set(&[7, 8, 9]));
        let total: usize = sets.tilde.values().map(|s| s.len()).sum();
        assert_eq!(total, sets.inner_total.len());
        assert_eq!(sets.owner(VertexId(5)), Some(NodeKey::new(1, 1)));
    }

    #[test]
    fn descendant_vertex_sets() {
        let sets = derive_sets(10, &chain()).unwrap();
        let top = &sets.branches[&NodeKey::new(0, 1)];
        assert_eq!(top.len(), 1);
        let desc = &top[0].descendants;
        assert_eq!(desc.len(), 2);
        assert_eq!(desc[0].path_vertices, set(&[1, 5]));
        assert_eq!(desc[1].path, vec![NodeKey::new(1, 1), NodeKey::new(2, 1)]);
        assert_eq!(desc[1].path_vertices, set(&[1, 5, 2, 6]));
        assert!(sets.branches[&NodeKey::new(2, 1)].is_empty());
    }

    #[test]
    fn invalid_structure_is_an_error() {
        let d = PolytreeDecomposition::single(set(&[0, 5]));
        assert!(derive_sets(3, &d).is_err());
    }
}
