//! Overlapping interlinked-cycle structures: inner vertex sets arranged in a
//! polytree where adjacent sets share exactly one vertex.

mod conditions;
mod decomposition;
mod derived;
mod suggest;
mod tree;

pub use conditions::{
    certify_oic, check_conditions, verify_oic, BranchMode, BranchRecord, OicCheck, RootReach, VerifiedOic,
};
pub use decomposition::{
    structure_violation, DecompNode, DecompositionJson, EdgeJson, NodeJson, NodeKey, PolytreeDecomposition,
    TreeEdge,
};
pub use derived::{derive_sets, ChildBranch, Descendant, DerivedSets};
pub use suggest::{suggest_decompositions, SuggestLimits, SuggestOutcome, Suggestion};
pub use tree::{build_tree_oic, OicTree};
