use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{fmt_set, Digraph, VertexId};
use crate::ic::RootedTree;

use super::conditions::VerifiedOic;
use super::decomposition::NodeKey;

/// Decoding tree of one inner vertex: the union of its unique I-paths to
/// every decoding target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OicTree {
    pub home: NodeKey,
    pub tree: RootedTree,
    pub contributing: BTreeSet<NodeKey>,
}

impl OicTree {
    pub fn root(&self) -> VertexId {
        self.tree.root()
    }

    pub fn label(&self) -> String {
        format!("T_{}^{}", self.root().0 + 1, self.home)
    }

    /// Interior tree vertices whose graph successors differ from their tree
    /// children. Decoding relies on this list being empty.
    pub fn successor_mismatches(&self, g: &Digraph) -> Vec<VertexId> {
        self.tree
            .interior()
            .into_iter()
            .filter(|&v| g.out_neighborhood(v) != self.tree.children(v))
            .collect()
    }
}

pub fn build_tree_oic(oic: &VerifiedOic, root: VertexId) -> Result<OicTree> {
    let reach = oic
        .reach(root)
        .ok_or_else(|| Error::Tree(format!("{root} is not an inner vertex")))?;
    let tree = RootedTree::from_paths(root, reach.paths.values())?;
    let out = OicTree {
        home: reach.home,
        tree,
        contributing: reach.contributing.clone(),
    };
    if out.tree.leaves() != reach.targets {
        return Err(Error::Tree(format!(
            "tree of {root} has leaves {} but targets {}",
            fmt_set(&out.tree.leaves()),
            fmt_set(&reach.targets)
        )));
    }
    let bad = out.successor_mismatches(oic.graph());
    if let Some(&v) = bad.first() {
        return Err(Error::Tree(format!(
            "in the tree of {root}, {v} has successors {} but tree children {}",
            fmt_set(&oic.graph().out_neighborhood(v)),
            fmt_set(&out.tree.children(v))
        )));
    }
    Ok(out)
}
