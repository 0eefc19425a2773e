use crate::error::{Error, Result};

/// Limits for the exponential searches. Exceeding one is reported as
/// [`Error::BudgetExceeded`], never answered heuristically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Search nodes for minrank and exhaustive code search.
    pub search_nodes: u64,
    /// Largest vertex count accepted by the exact MAIS solver.
    pub mais_max_vertices: usize,
}

pub const BUDGET_ENV: &str = "OIC_BUDGET";

impl Default for Budget {
    fn default() -> Self {
        Budget {
            search_nodes: 1 << 24,
            mais_max_vertices: 24,
        }
    }
}

impl Budget {
    /// Accepts `N` (search nodes) or a comma list of `search=N` and
    /// `mais=M`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut budget = Budget::default();
        let text = text.trim();
        if let Ok(n) = text.parse::<u64>() {
            budget.search_nodes = n;
            return Ok(budget);
        }
        for part in text.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("budget entry {part:?} is not key=value")))?;
            let bad = |_| Error::Parse(format!("budget value {value:?} is not a number"));
            match key.trim() {
                "search" => budget.search_nodes = value.trim().parse().map_err(bad)?,
                "mais" => {
                    let m: usize = value.trim().parse().map_err(bad)?;
                    if m > 64 {
                        return Err(Error::Parse("mais limit cannot exceed 64 vertices".into()));
                    }
                    budget.mais_max_vertices = m;
                }
                other => return Err(Error::Parse(format!("unknown budget key {other:?}"))),
            }
        }
        Ok(budget)
    }

    /// Reads [`BUDGET_ENV`], falling back to the defaults when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(text) => Self::parse(&text),
            Err(_) => Ok(Self::default()),
        }
    }
}
