//! End-to-end decoding runs: encode random or exhaustive message
//! assignments, then decode every receiver from the broadcast and its own
//! side information only.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::Gf2Vec;
use crate::codec::{apply_code, decode_receiver, DecodingPlan, MessageVector};
use crate::error::{Error, Result};
use crate::graph::SuicpInstance;

/// Largest message count for which every assignment is tried.
pub const EXHAUSTIVE_MAX_K: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimulationMode {
    /// All `2^K` one-bit assignments.
    Exhaustive,
    /// `trials` seeded random assignments of `t`-bit messages.
    Random { trials: u64, seed: u64 },
}

impl SimulationMode {
    /// Exhaustive for small one-bit instances, random trials otherwise.
    pub fn auto(instance: &SuicpInstance, trials: u64, seed: u64) -> Self {
        if instance.k() <= EXHAUSTIVE_MAX_K && instance.message_bits == 1 {
            SimulationMode::Exhaustive
        } else {
            SimulationMode::Random { trials, seed }
        }
    }
}

/// Everything needed to replay one failed decode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecodeFailure {
    pub receiver: usize,
    pub seed: Option<u64>,
    pub trial: u64,
    /// Message values in hex, one per vertex.
    pub messages: Vec<String>,
    pub expected: String,
    pub decoded: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimulationReport {
    pub exhaustive: bool,
    /// Assignments tried.
    pub trials: u64,
    pub receivers: usize,
    /// At most [`MAX_RECORDED_FAILURES`] entries are kept.
    pub failures: Vec<DecodeFailure>,
    pub failure_count: u64,
}

impl SimulationReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

pub const MAX_RECORDED_FAILURES: usize = 16;

pub fn simulate(instance: &SuicpInstance, plan: &DecodingPlan, mode: &SimulationMode) -> Result<SimulationReport> {
    let k = instance.k();
    if plan.code().message_count() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            actual: plan.code().message_count(),
        });
    }
    for v in instance.graph.vertices() {
        if plan.receiver(v).is_none() {
            return Err(Error::Plan(format!("no plan for receiver {v}")));
        }
    }
    let mut report = SimulationReport {
        exhaustive: matches!(mode, SimulationMode::Exhaustive),
        trials: 0,
        receivers: k,
        failures: Vec::new(),
        failure_count: 0,
    };
    match *mode {
        SimulationMode::Exhaustive => {
            if k > EXHAUSTIVE_MAX_K {
                return Err(Error::BudgetExceeded(format!(
                    "exhaustive simulation limited to {EXHAUSTIVE_MAX_K} messages, instance has {k}"
                )));
            }
            // Bit-sliced: lane `b` of a batch carries assignment `base + b`.
            let total = 1u64 << k;
            let mut base = 0u64;
            while base < total {
                let lanes = (total - base).min(64) as usize;
                let values = (0..k)
                    .map(|i| {
                        let word = (0..lanes as u64).fold(0u64, |w, b| w | ((base + b) >> i & 1) << b);
                        Gf2Vec::from_u64(lanes, word)
                    })
                    .collect();
                let messages = MessageVector::new(lanes, values)?;
                run_batch(instance, plan, &messages, &mut report, |lane| (None, base + lane as u64));
                base += lanes as u64;
            }
            report.trials = total;
        }
        SimulationMode::Random { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for trial in 0..trials {
                let messages = MessageVector::random(k, instance.message_bits, &mut rng);
                run_batch(instance, plan, &messages, &mut report, |_| (Some(seed), trial));
            }
            report.trials = trials;
        }
    }
    Ok(report)
}

fn run_batch(
    instance: &SuicpInstance,
    plan: &DecodingPlan,
    messages: &MessageVector,
    report: &mut SimulationReport,
    origin: impl Fn(usize) -> (Option<u64>, u64),
) {
    let sliced = report.exhaustive;
    let broadcast = apply_code(plan.code(), messages).expect("message count checked");
    for v in instance.graph.vertices() {
        let receiver = plan.receiver(v).expect("receivers checked");
        let side = messages.restrict(&instance.side_information(v));
        let want = messages.get(instance.want(v));
        let got = decode_receiver(receiver, &broadcast, &side);
        let bad: Vec<usize> = match &got {
            Ok(value) if value == want => continue,
            Ok(value) if sliced => value.xor(want).ones().collect(),
            _ if sliced => (0..messages.bits()).collect(),
            _ => vec![0],
        };
        report.failure_count += bad.len() as u64;
        for lane in bad {
            if report.failures.len() >= MAX_RECORDED_FAILURES {
                break;
            }
            let (seed, trial) = origin(lane);
            let pick = |x: &Gf2Vec| {
                if sliced {
                    Gf2Vec::from_indices(1, x.get(lane).then_some(0)).to_hex()
                } else {
                    x.to_hex()
                }
            };
            report.failures.push(DecodeFailure {
                receiver: v.0,
                seed,
                trial,
                messages: messages.values().iter().map(pick).collect(),
                expected: pick(want),
                decoded: got.as_ref().ok().map(pick),
                error: got.as_ref().err().map(|e| e.to_string()),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{LinearCode, ReceiverPlan};
    use crate::graph::{Digraph, VertexId};

    fn pair() -> SuicpInstance {
        SuicpInstance::new(Digraph::new(2, [(0, 1), (1, 0)]).unwrap(), 1).unwrap()
    }

    #[test]
    fn xor_of_pair_decodes() {
        let inst = pair();
        let code = LinearCode::parse(r#"{"K":2,"symbols":[{"label":"y","mask_hex":"3"}]}"#).unwrap();
        let receivers = (0..2)
            .map(|v| ReceiverPlan::from_indices(&inst.graph, &code, VertexId(v), None, vec![0]).unwrap())
            .collect();
        let plan = DecodingPlan::new(code, receivers);
        let report = simulate(&inst, &plan, &SimulationMode::Exhaustive).unwrap();
        assert_eq!(report.trials, 4);
        assert!(report.passed());
    }

    #[test]
    fn wrong_plan_reports_failures() {
        let inst = pair();
        let code = LinearCode::parse(r#"{"K":2,"symbols":[{"label":"a","mask_hex":"1"},{"label":"b","mask_hex":"2"}]}"#)
            .unwrap();
        // Receiver 0 decodes from symbol b, which carries the wrong message.
        let mut receivers = vec![
            ReceiverPlan::from_indices(&inst.graph, &code, VertexId(0), None, vec![0]).unwrap(),
            ReceiverPlan::from_indices(&inst.graph, &code, VertexId(1), None, vec![1]).unwrap(),
        ];
        receivers[0].gamma = vec![1];
        let plan = DecodingPlan::new(code, receivers);
        let report = simulate(&inst, &plan, &SimulationMode::Random { trials: 8, seed: 3 }).unwrap();
        assert!(!report.passed());
        assert_eq!(report.failures[0].receiver, 0);
        assert_eq!(report.failures[0].seed, Some(3));
    }
}
