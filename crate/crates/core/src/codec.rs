//! Linear index codes over GF(2), decoding plans and the algebra used to
//! check them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{Gf2Basis, Gf2Vec};
use crate::error::{Error, Result};
use crate::graph::{fmt_set, Digraph, VertexId};
use crate::ic::{non_inner_label, non_inner_symbol, IC_INNER_LABEL};
use crate::oic::{build_tree_oic, NodeKey, VerifiedOic};

/// One transmitted symbol: the XOR of the messages selected by `mask`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSymbol {
    pub label: String,
    pub mask: Gf2Vec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    k: usize,
    symbols: Vec<CodeSymbol>,
}

impl LinearCode {
    /// Rejects zero masks, masks of the wrong length and repeated labels.
    pub fn new(k: usize, symbols: Vec<CodeSymbol>) -> Result<Self> {
        let mut labels = BTreeSet::new();
        for s in &symbols {
            if s.mask.len() != k {
                return Err(Error::LengthMismatch {
                    expected: k,
                    actual: s.mask.len(),
                });
            }
            if s.mask.is_zero() {
                return Err(Error::Parse(format!("symbol {} has an empty mask", s.label)));
            }
            if !labels.insert(s.label.as_str()) {
                return Err(Error::Parse(format!("duplicate symbol label {}", s.label)));
            }
        }
        Ok(LinearCode { k, symbols })
    }

    /// Uncoded transmission: one symbol per message.
    pub fn identity(k: usize) -> Self {
        let symbols = (0..k)
            .map(|i| CodeSymbol {
                label: format!("x_{}", i + 1),
                mask: Gf2Vec::unit(k, i),
            })
            .collect();
        LinearCode { k, symbols }
    }

    pub fn message_count(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[CodeSymbol] {
        &self.symbols
    }

    pub fn masks(&self) -> impl Iterator<Item = &Gf2Vec> {
        self.symbols.iter().map(|s| &s.mask)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.label == label)
    }

    pub fn to_json(&self) -> CodeJson {
        CodeJson {
            k: self.k,
            symbols: self
                .symbols
                .iter()
                .map(|s| SymbolJson {
                    label: s.label.clone(),
                    mask_hex: s.mask.to_hex(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &CodeJson) -> Result<Self> {
        let symbols = json
            .symbols
            .iter()
            .map(|s| {
                Ok(CodeSymbol {
                    label: s.label.clone(),
                    mask: Gf2Vec::from_hex(json.k, &s.mask_hex)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(json.k, symbols)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let json: CodeJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("code JSON: {e}")))?;
        Self::from_json(&json)
    }
}

impl fmt::Display for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            writeln!(f, "{} = {}", s.label, fmt_sum(&s.mask))?;
        }
        Ok(())
    }
}

/// `x1 + x3 + x4` style rendering of a mask.
pub fn fmt_sum(mask: &Gf2Vec) -> String {
    let terms: Vec<String> = mask.ones().map(|i| VertexId(i).to_string()).collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeJson {
    #[serde(rename = "K")]
    pub k: usize,
    pub symbols: Vec<SymbolJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolJson {
    pub label: String,
    pub mask_hex: String,
}

/// `K` messages of `t` bits each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageVector {
    bits: usize,
    values: Vec<Gf2Vec>,
}

impl MessageVector {
    pub fn new(bits: usize, values: Vec<Gf2Vec>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| v.len() != bits) {
            return Err(Error::LengthMismatch {
                expected: bits,
                actual: v.len(),
            });
        }
        Ok(MessageVector { bits, values })
    }

    pub fn zeros(k: usize, bits: usize) -> Self {
        MessageVector {
            bits,
            values: vec![Gf2Vec::zeros(bits); k],
        }
    }

    pub fn random<R: Rng + ?Sized>(k: usize, bits: usize, rng: &mut R) -> Self {
        let values = (0..k)
            .map(|_| {
                let mut v = Gf2Vec::zeros(bits);
                for b in 0..bits {
                    if rng.gen::<bool>() {
                        v.set(b, true);
                    }
                }
                v
            })
            .collect();
        MessageVector { bits, values }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: VertexId) -> &Gf2Vec {
        &self.values[v.0]
    }

    pub fn values(&self) -> &[Gf2Vec] {
        &self.values
    }

    /// The part of the messages a receiver holds.
    pub fn restrict(&self, vertices: &BTreeSet<VertexId>) -> BTreeMap<VertexId, Gf2Vec> {
        vertices.iter().map(|&v| (v, self.values[v.0].clone())).collect()
    }
}

pub fn apply_code(code: &LinearCode, messages: &MessageVector) -> Result<Vec<Gf2Vec>> {
    if messages.len() != code.message_count() {
        return Err(Error::LengthMismatch {
            expected: code.message_count(),
            actual: messages.len(),
        });
    }
    Ok(code
        .masks()
        .map(|mask| {
            let mut out = Gf2Vec::zeros(messages.bits());
            for i in mask.ones() {
                out.xor_assign(&messages.values[i]);
            }
            out
        })
        .collect())
}

/// How one receiver recovers its message: XOR the symbols in `gamma`, then
/// cancel the side-information messages in `side`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceiverPlan {
    pub receiver: VertexId,
    /// Decoding tree used to build the plan, if any.
    pub tree: Option<String>,
    /// Indices into the code, ascending.
    pub gamma: Vec<usize>,
    pub gamma_labels: Vec<String>,
    /// XOR of the selected masks.
    pub tau: Gf2Vec,
    pub side: BTreeSet<VertexId>,
}

impl ReceiverPlan {
    /// Resolves `labels` against `code` and checks that the combination leaves
    /// the receiver's message plus side information only.
    pub fn build(
        g: &Digraph,
        code: &LinearCode,
        receiver: VertexId,
        tree: Option<String>,
        labels: &[String],
    ) -> Result<Self> {
        let mut gamma = labels
            .iter()
            .map(|l| {
                code.index_of(l)
                    .ok_or_else(|| Error::Plan(format!("receiver {receiver}: no symbol labelled {l}")))
            })
            .collect::<Result<Vec<_>>>()?;
        gamma.sort_unstable();
        gamma.dedup();
        Self::from_indices(g, code, receiver, tree, gamma)
    }

    pub fn from_indices(
        g: &Digraph,
        code: &LinearCode,
        receiver: VertexId,
        tree: Option<String>,
        gamma: Vec<usize>,
    ) -> Result<Self> {
        let mut tau = Gf2Vec::zeros(code.message_count());
        for &i in &gamma {
            tau.xor_assign(&code.symbols()[i].mask);
        }
        if !tau.get(receiver.0) {
            return Err(Error::Plan(format!(
                "receiver {receiver}: combination {} does not contain the wanted message",
                fmt_sum(&tau)
            )));
        }
        let side: BTreeSet<VertexId> = tau.ones().filter(|&i| i != receiver.0).map(VertexId).collect();
        if let Some(v) = side.iter().find(|v| !g.has_edge(receiver, **v)) {
            return Err(Error::Plan(format!(
                "receiver {receiver}: combination {} needs {v}, which is not side information",
                fmt_sum(&tau)
            )));
        }
        let gamma_labels = gamma.iter().map(|&i| code.symbols()[i].label.clone()).collect();
        Ok(ReceiverPlan {
            receiver,
            tree,
            gamma,
            gamma_labels,
            tau,
            side,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodingPlan {
    code: LinearCode,
    receivers: Vec<ReceiverPlan>,
}

impl DecodingPlan {
    pub fn new(code: LinearCode, receivers: Vec<ReceiverPlan>) -> Self {
        DecodingPlan { code, receivers }
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn receivers(&self) -> &[ReceiverPlan] {
        &self.receivers
    }

    pub fn receiver(&self, v: VertexId) -> Option<&ReceiverPlan> {
        self.receivers.iter().find(|r| r.receiver == v)
    }

    pub fn to_json(&self) -> PlanJson {
        PlanJson {
            code: self.code.to_json(),
            receivers: self
                .receivers
                .iter()
                .map(|r| ReceiverJson {
                    receiver: r.receiver.0,
                    tree: r.tree.clone(),
                    gamma: r.gamma_labels.clone(),
                    tau_hex: r.tau.to_hex(),
                    side: r.side.iter().map(|v| v.0).collect(),
                })
                .collect(),
        }
    }

    /// Rebuilds a plan from JSON, re-deriving every row against `g`.
    pub fn from_json(g: &Digraph, json: &PlanJson) -> Result<Self> {
        let code = LinearCode::from_json(&json.code)?;
        let receivers = json
            .receivers
            .iter()
            .map(|r| {
                if r.receiver >= g.vertex_count() {
                    return Err(Error::Parse(format!("receiver {} outside graph", r.receiver)));
                }
                let plan = ReceiverPlan::build(g, &code, VertexId(r.receiver), r.tree.clone(), &r.gamma)?;
                if plan.tau.to_hex() != r.tau_hex.trim() {
                    return Err(Error::Plan(format!(
                        "receiver {}: stored tau {} disagrees with symbols",
                        plan.receiver, r.tau_hex
                    )));
                }
                Ok(plan)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DecodingPlan { code, receivers })
    }
}

impl fmt::Display for DecodingPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.receivers {
            writeln!(
                f,
                "{:<4} {:<10} gamma {{{}}}  tau {}",
                r.receiver.to_string(),
                r.tree.as_deref().unwrap_or("-"),
                r.gamma_labels.join(", "),
                fmt_sum(&r.tau)
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanJson {
    pub code: CodeJson,
    pub receivers: Vec<ReceiverJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReceiverJson {
    pub receiver: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<String>,
    pub gamma: Vec<String>,
    pub tau_hex: String,
    pub side: Vec<usize>,
}

/// Executes one receiver's plan on the received symbols and the side values
/// it holds.
pub fn decode_receiver(
    plan: &ReceiverPlan,
    broadcast: &[Gf2Vec],
    side_values: &BTreeMap<VertexId, Gf2Vec>,
) -> Result<Gf2Vec> {
    let Some(&first) = plan.gamma.first() else {
        return Err(Error::Plan(format!("receiver {}: empty plan", plan.receiver)));
    };
    if let Some(&bad) = plan.gamma.iter().find(|&&i| i >= broadcast.len()) {
        return Err(Error::LengthMismatch {
            expected: bad + 1,
            actual: broadcast.len(),
        });
    }
    let mut out = broadcast[first].clone();
    for &i in &plan.gamma[1..] {
        out.xor_assign(&broadcast[i]);
    }
    for v in &plan.side {
        let value = side_values.get(v).ok_or_else(|| Error::MissingSideValue {
            receiver: plan.receiver.to_string(),
            vertex: v.to_string(),
        })?;
        out.xor_assign(value);
    }
    Ok(out)
}

/// A linear decoding found by elimination: XOR `symbols`, cancel `side`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicDecoding {
    pub symbols: Vec<usize>,
    pub side: BTreeSet<VertexId>,
}

/// Finds symbols whose XOR equals `e_k` plus side information of `k`, if
/// such a combination exists.
pub fn solve_receiver(g: &Digraph, code: &LinearCode, k: VertexId) -> Option<AlgebraicDecoding> {
    let n = code.message_count();
    let mut known = Gf2Vec::zeros(n);
    for w in g.successors(k) {
        known.set(w.0, true);
    }
    let keep_mask = |m: &Gf2Vec| {
        let mut p = m.clone();
        for i in known.ones() {
            p.set(i, false);
        }
        p
    };
    let mut basis = Gf2Basis::with_tracking(n, code.len());
    for m in code.masks() {
        basis.insert(&keep_mask(m));
    }
    let (residual, combo) = basis.reduce_tracked(&Gf2Vec::unit(n, k.0));
    if !residual.is_zero() {
        return None;
    }
    let symbols: Vec<usize> = combo.ones().collect();
    let mut tau = Gf2Vec::zeros(n);
    for &i in &symbols {
        tau.xor_assign(&code.symbols()[i].mask);
    }
    let side = tau.ones().filter(|&i| i != k.0).map(VertexId).collect();
    Some(AlgebraicDecoding { symbols, side })
}

/// Per receiver, whether some linear combination of the code decodes it.
pub fn check_linear_decodability(g: &Digraph, code: &LinearCode) -> Vec<bool> {
    g.vertices().map(|k| solve_receiver(g, code, k).is_some()).collect()
}

impl fmt::Display for AlgebraicDecoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "symbols {:?}, side {}", self.symbols, fmt_set(&self.side))
    }
}

/// Label of the symbol sent for node `(i,j)`.
pub fn node_label(key: NodeKey) -> String {
    format!("y_I^{key}")
}

/// A single-node decomposition is an interlinked cycle and keeps its plain
/// labels, so both encoders emit identical codes.
fn symbol_label(oic: &VerifiedOic, key: NodeKey) -> String {
    if oic.decomposition().node_count() == 1 {
        IC_INNER_LABEL.to_string()
    } else {
        node_label(key)
    }
}

/// One symbol per polytree node (XOR of its vertices, by node position),
/// then `x_j + N+(x_j)` for each non-inner vertex in ascending order.
pub fn encode_oic(oic: &VerifiedOic) -> LinearCode {
    let g = oic.graph();
    let k = g.vertex_count();
    let mut symbols: Vec<CodeSymbol> = oic
        .decomposition()
        .nodes()
        .map(|(key, verts)| CodeSymbol {
            label: symbol_label(oic, key),
            mask: Gf2Vec::from_indices(k, verts.iter().map(|v| v.0)),
        })
        .collect();
    for &v in &oic.sets().non_inner {
        symbols.push(non_inner_symbol(g, v));
    }
    LinearCode::new(k, symbols).expect("overlapping code is well formed")
}

/// Decoding plan for every receiver. Inner receivers XOR the symbols of the
/// nodes their tree passes through and of the interior tree vertices.
pub fn make_decoding_plan(oic: &VerifiedOic) -> Result<DecodingPlan> {
    let g = oic.graph();
    let code = encode_oic(oic);
    let mut receivers = Vec::with_capacity(g.vertex_count());
    for k in g.vertices() {
        let plan = if oic.sets().is_inner(k) {
            let tree = build_tree_oic(oic, k)?;
            let mut labels: Vec<String> = tree.contributing.iter().map(|n| symbol_label(oic, *n)).collect();
            labels.extend(tree.tree.interior().into_iter().map(non_inner_label));
            let name = if oic.decomposition().node_count() == 1 {
                format!("T_{}", k.0 + 1)
            } else {
                tree.label()
            };
            ReceiverPlan::build(g, &code, k, Some(name), &labels)?
        } else {
            ReceiverPlan::build(g, &code, k, None, &[non_inner_label(k)])?
        };
        receivers.push(plan);
    }
    Ok(DecodingPlan::new(code, receivers))
}
