//! Ground truth for small instances: the optimal scalar linear code length
//! over GF(2) (minrank) and a direct search over code row spaces.
//!
//! Both results bound scalar linear codes only; vector and nonlinear codes
//! can do better on some graphs.

use std::collections::HashSet;
use std::fmt;

use crate::bits::{Gf2Basis, Gf2Vec};
use crate::budget::Budget;
use crate::codec::{check_linear_decodability, CodeSymbol, DecodingPlan, LinearCode};
use crate::error::{Error, Result};
use crate::graph::Digraph;

/// Square GF(2) matrix with unit diagonal whose off-diagonal ones sit on
/// graph edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FittingMatrix {
    rows: Vec<Gf2Vec>,
}

impl FittingMatrix {
    pub fn new(g: &Digraph, rows: Vec<Gf2Vec>) -> Result<Self> {
        let m = FittingMatrix { rows };
        m.check(g)?;
        Ok(m)
    }

    /// The identity always fits.
    pub fn identity(k: usize) -> Self {
        FittingMatrix {
            rows: (0..k).map(|i| Gf2Vec::unit(k, i)).collect(),
        }
    }

    fn check(&self, g: &Digraph) -> Result<()> {
        let k = g.vertex_count();
        if self.rows.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                actual: self.rows.len(),
            });
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != k || !row.get(i) {
                return Err(Error::Parse(format!("row {i} lacks its diagonal entry")));
            }
            if let Some(j) = row.ones().find(|&j| j != i && !g.has_edge(i.into(), j.into())) {
                return Err(Error::Parse(format!("entry ({i},{j}) is not a graph edge")));
            }
        }
        Ok(())
    }

    /// The combined masks of a decoding plan, one row per receiver. Its rank
    /// is at most the code length, so it bounds the minrank from above.
    pub fn from_plan(g: &Digraph, plan: &DecodingPlan) -> Result<Self> {
        let rows = g
            .vertices()
            .map(|v| {
                plan.receiver(v)
                    .map(|r| r.tau.clone())
                    .ok_or_else(|| Error::Plan(format!("no plan for receiver {v}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(g, rows)
    }

    pub fn rows(&self) -> &[Gf2Vec] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        let k = self.rows.len();
        crate::bits::rank_of(k, &self.rows)
    }

    pub fn hex_rows(&self) -> Vec<String> {
        self.rows.iter().map(|r| r.to_hex()).collect()
    }
}

impl fmt::Display for FittingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{}", r.to_hex())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minrank {
    pub rank: usize,
    pub witness: FittingMatrix,
    pub search_nodes: u64,
}

/// Minimum rank over all fitting matrices.
///
/// Rows are fixed one at a time while tracking the span of the rows chosen
/// so far. A row that can be picked inside the current span is always taken
/// there, since a smaller span never leads to a larger final rank. Otherwise
/// every admissible row is tried, deduplicated by the span it produces.
/// `lower_bound` (for example the MAIS size) stops the search as soon as it
/// is reached.
pub fn minrank_gf2(g: &Digraph, budget: &Budget, lower_bound: Option<usize>) -> Result<Minrank> {
    minrank_gf2_seeded(g, budget, lower_bound, &FittingMatrix::identity(g.vertex_count()))
}

/// Same as [`minrank_gf2`], starting from a known fitting matrix so that only
/// strictly better ones are searched for.
pub fn minrank_gf2_seeded(
    g: &Digraph,
    budget: &Budget,
    lower_bound: Option<usize>,
    seed: &FittingMatrix,
) -> Result<Minrank> {
    seed.check(g)?;
    let k = g.vertex_count();
    let mut search = MinrankSearch {
        g,
        k,
        budget: budget.search_nodes,
        nodes: 0,
        best: seed.rank(),
        best_rows: seed.rows.clone(),
        target: lower_bound.unwrap_or(0),
        seen: HashSet::new(),
        chosen: Vec::with_capacity(k),
    };
    if k > 0 && search.best > search.target {
        search.dfs(0, Gf2Basis::new(k))?;
    }
    Ok(Minrank {
        rank: search.best,
        witness: FittingMatrix {
            rows: search.best_rows,
        },
        search_nodes: search.nodes,
    })
}

struct MinrankSearch<'g> {
    g: &'g Digraph,
    k: usize,
    budget: u64,
    nodes: u64,
    best: usize,
    best_rows: Vec<Gf2Vec>,
    target: usize,
    seen: HashSet<(usize, Vec<Gf2Vec>)>,
    chosen: Vec<Gf2Vec>,
}

impl MinrankSearch<'_> {
    fn done(&self) -> bool {
        self.best <= self.target
    }

    fn dfs(&mut self, row: usize, span: Gf2Basis) -> Result<()> {
        if self.done() || span.rank() >= self.best {
            return Ok(());
        }
        if row == self.k {
            self.best = span.rank();
            self.best_rows = self.chosen.clone();
            return Ok(());
        }
        if !self.seen.insert((row, span.canonical())) {
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(format!(
                "minrank search exceeded {} nodes",
                self.budget
            )));
        }

        let free: Vec<usize> = self.g.successors(row.into()).iter().map(|v| v.0).collect();
        if let Some(inside) = self.row_in_span(row, &free, &span) {
            self.chosen.push(inside);
            self.dfs(row + 1, span)?;
            self.chosen.pop();
            return Ok(());
        }
        if span.rank() + 1 >= self.best {
            return Ok(());
        }
        let mut spans_tried = HashSet::new();
        for bits in 0u64..1 << free.len() {
            let mut r = Gf2Vec::unit(self.k, row);
            for (b, &j) in free.iter().enumerate() {
                if bits >> b & 1 == 1 {
                    r.set(j, true);
                }
            }
            let mut next = span.clone();
            next.insert(&r);
            if !spans_tried.insert(next.canonical()) {
                continue;
            }
            self.chosen.push(r);
            self.dfs(row + 1, next)?;
            self.chosen.pop();
            if self.done() {
                break;
            }
        }
        Ok(())
    }

    /// A fitting row for `row` lying in `span`, if one exists.
    fn row_in_span(&self, row: usize, free: &[usize], span: &Gf2Basis) -> Option<Gf2Vec> {
        if span.rank() == 0 {
            return None;
        }
        let rows: Vec<Gf2Vec> = span.rows().cloned().collect();
        let mut projected = Gf2Basis::with_tracking(self.k, rows.len());
        for r in &rows {
            let mut p = r.clone();
            for &j in free {
                p.set(j, false);
            }
            projected.insert(&p);
        }
        let (residual, combo) = projected.reduce_tracked(&Gf2Vec::unit(self.k, row));
        if !residual.is_zero() {
            return None;
        }
        let mut out = Gf2Vec::zeros(self.k);
        for i in combo.ones() {
            out.xor_assign(&rows[i]);
        }
        Some(out)
    }
}

/// Number of `dim`-dimensional subspaces of GF(2)^n, saturating.
fn gaussian_binomial(n: usize, dim: usize) -> u128 {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..dim {
        num = num.saturating_mul((1u128 << (n - i)) - 1);
        den = den.saturating_mul((1u128 << (i + 1)) - 1);
    }
    if num == u128::MAX {
        u128::MAX
    } else {
        num / den
    }
}

/// A shortest linear code of length at most `max_len` that every receiver
/// can decode, found by trying every row space in increasing dimension.
pub fn exhaustive_code_search(g: &Digraph, max_len: usize, budget: &Budget) -> Result<Option<LinearCode>> {
    let k = g.vertex_count();
    let max_len = max_len.min(k);
    if k > 64 {
        return Err(Error::BudgetExceeded("exhaustive search limited to 64 vertices".into()));
    }
    let total: u128 = (0..=max_len)
        .map(|d| gaussian_binomial(k, d))
        .fold(0u128, |a, b| a.saturating_add(b));
    if total > budget.search_nodes as u128 {
        return Err(Error::BudgetExceeded(format!(
            "{total} row spaces up to dimension {max_len} exceed the budget of {}",
            budget.search_nodes
        )));
    }
    for dim in 0..=max_len {
        let mut pivots = Vec::with_capacity(dim);
        if let Some(code) = pivot_sets(g, k, dim, 0, &mut pivots) {
            return Ok(Some(code));
        }
    }
    Ok(None)
}

fn pivot_sets(g: &Digraph, k: usize, dim: usize, from: usize, pivots: &mut Vec<usize>) -> Option<LinearCode> {
    if pivots.len() == dim {
        return fill_free(g, k, pivots);
    }
    for p in from..k {
        if k - p < dim - pivots.len() {
            break;
        }
        pivots.push(p);
        let found = pivot_sets(g, k, dim, p + 1, pivots);
        pivots.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Walks all reduced echelon matrices with the given pivot columns.
fn fill_free(g: &Digraph, k: usize, pivots: &[usize]) -> Option<LinearCode> {
    let free: Vec<(usize, usize)> = pivots
        .iter()
        .enumerate()
        .flat_map(|(r, &p)| (p + 1..k).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
        .collect();
    for bits in 0u128..1u128 << free.len() {
        let mut rows: Vec<Gf2Vec> = pivots.iter().map(|&p| Gf2Vec::unit(k, p)).collect();
        for (b, &(r, c)) in free.iter().enumerate() {
            if bits >> b & 1 == 1 {
                rows[r].set(c, true);
            }
        }
        let symbols: Vec<CodeSymbol> = rows
            .into_iter()
            .enumerate()
            .map(|(i, mask)| CodeSymbol {
                label: format!("c_{}", i + 1),
                mask,
            })
            .collect();
        let code = LinearCode::new(k, symbols).expect("echelon rows are non-zero and distinct");
        if check_linear_decodability(g, &code).iter().all(|ok| *ok) {
            return Some(code);
        }
    }
    None
}
