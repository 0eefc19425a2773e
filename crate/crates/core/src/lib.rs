//! Index coding over side-information digraphs with overlapping
//! interlinked-cycle structures.
//!
//! Receiver `k` wants message `x_k` and knows the messages of its
//! out-neighbours. The crate verifies interlinked-cycle (IC) and overlapping
//! (OIC) structures, builds their linear codes and decoding plans, and
//! checks them against exact lower bounds and brute-force optimal codes.

pub mod bits;
pub mod bounds;
pub mod codec;
pub mod error;
pub mod graph;
pub mod ic;
pub mod oic;
pub mod oracle;
pub mod report;
pub mod testkit;

mod budget;

pub use bits::{Gf2Basis, Gf2Vec};
pub use budget::Budget;
pub use codec::{
    apply_code, check_linear_decodability, decode_receiver, encode_oic, make_decoding_plan, solve_receiver,
    CodeSymbol, DecodingPlan, LinearCode, MessageVector, ReceiverPlan,
};
pub use error::{Error, Result};
pub use graph::{Digraph, SuicpInstance, VertexId};
pub use ic::{build_tree_ic, certify_ic, encode_ic, plan_ic, verify_ic, InnerVertexSet, RootedTree, VerifiedIc};
pub use oic::{
    build_tree_oic, certify_oic, verify_oic, NodeKey, OicTree, PolytreeDecomposition, TreeEdge, VerifiedOic,
};
pub use report::{ConditionResult, VerificationReport, Witness};
