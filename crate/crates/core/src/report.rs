use std::fmt;

use serde::Serialize;

use crate::graph::{fmt_path, fmt_set, VertexId};

/// Concrete evidence for a failed condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A directed cycle; the closing edge back to the first vertex is implied.
    Cycle { vertices: Vec<VertexId> },
    /// Two distinct paths between the same endpoints.
    DuplicatePaths { first: Vec<VertexId>, second: Vec<VertexId> },
    /// A required path that does not exist.
    MissingPath { from: VertexId, to: VertexId },
    Vertex { vertex: VertexId },
    /// A vertex whose outgoing paths end in more than one vertex set.
    SplitTermination { vertex: VertexId, termini: Vec<VertexId> },
    Structure { detail: String },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Cycle { vertices } => {
                write!(f, "cycle {} -> {}", fmt_path(vertices), vertices[0])
            }
            Witness::DuplicatePaths { first, second } => {
                write!(f, "paths {} and {}", fmt_path(first), fmt_path(second))
            }
            Witness::MissingPath { from, to } => write!(f, "no path {from} -> {to}"),
            Witness::Vertex { vertex } => write!(f, "vertex {vertex}"),
            Witness::SplitTermination { vertex, termini } => {
                write!(f, "paths from {vertex} end at {}", fmt_set(termini))
            }
            Witness::Structure { detail } => f.write_str(detail),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    /// Short identifier such as `C3` or `unique-i-paths`.
    pub id: String,
    pub title: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl ConditionResult {
    pub fn pass(id: &str, title: &str) -> Self {
        ConditionResult {
            id: id.to_string(),
            title: title.to_string(),
            passed: true,
            witness: None,
            detail: String::new(),
        }
    }

    pub fn fail(id: &str, title: &str, witness: Witness, detail: impl Into<String>) -> Self {
        ConditionResult {
            id: id.to_string(),
            title: title.to_string(),
            passed: false,
            witness: Some(witness),
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub conditions: Vec<ConditionResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| !c.passed)
    }

    pub fn get(&self, id: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.id == id)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            write!(f, "{:<4} {:<4} {}", c.id, if c.passed { "PASS" } else { "FAIL" }, c.title)?;
            if let Some(w) = &c.witness {
                write!(f, ": {w}")?;
            }
            if !c.detail.is_empty() {
                write!(f, " ({})", c.detail)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
