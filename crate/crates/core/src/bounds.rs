//! Maximum acyclic induced subgraph (MAIS), the acyclic witness implied by a
//! verified decomposition, and the resulting capacity report.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::{fmt_set, Digraph, VertexId};
use crate::oic::VerifiedOic;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mais {
    pub size: usize,
    /// Lexicographically smallest maximum witness.
    pub witness: BTreeSet<VertexId>,
}

/// Exact MAIS by minimum feedback vertex set branch and bound.
pub fn mais_exact(g: &Digraph, budget: &Budget) -> Result<Mais> {
    let k = g.vertex_count();
    if k > budget.mais_max_vertices || k > 64 {
        return Err(Error::BudgetExceeded(format!(
            "exact MAIS limited to {} vertices, graph has {k}",
            budget.mais_max_vertices.min(64)
        )));
    }
    let solver = Fvs::new(g);
    let all = full_mask(k);
    let best = solver.min_deletions(all, 0, k).expect("deleting everything is feasible");

    // Lexicographically smallest witness: keep each vertex in turn when the
    // optimum survives, otherwise force its deletion.
    let mut keep = 0u64;
    let mut deleted = 0u64;
    for v in 0..k {
        let alive = all & !deleted;
        let forced = deleted.count_ones() as usize;
        match solver.min_deletions(alive, keep | 1 << v, best - forced) {
            Some(d) if d + forced == best => keep |= 1 << v,
            _ => deleted |= 1 << v,
        }
    }
    let witness: BTreeSet<VertexId> = (0..k).filter(|v| keep >> v & 1 == 1).map(VertexId).collect();
    debug_assert_eq!(witness.len(), k - best);
    debug_assert!(g.is_acyclic_on(&witness));
    Ok(Mais {
        size: k - best,
        witness,
    })
}

fn full_mask(k: usize) -> u64 {
    if k == 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

struct Fvs {
    out: Vec<u64>,
    inn: Vec<u64>,
}

impl Fvs {
    fn new(g: &Digraph) -> Self {
        let k = g.vertex_count();
        let mut out = vec![0u64; k];
        let mut inn = vec![0u64; k];
        for (u, v) in g.edges() {
            out[u.0] |= 1 << v.0;
            inn[v.0] |= 1 << u.0;
        }
        Fvs { out, inn }
    }

    /// Fewest deletions from `alive` (never touching `keep`) that leave an
    /// acyclic graph, provided the answer is at most `limit`.
    fn min_deletions(&self, mut alive: u64, keep: u64, limit: usize) -> Option<usize> {
        // Vertices without predecessors or successors lie on no cycle.
        loop {
            let mut next = alive;
            for v in ones(alive) {
                if self.out[v] & alive == 0 || self.inn[v] & alive == 0 {
                    next &= !(1 << v);
                }
            }
            if next == alive {
                break;
            }
            alive = next;
        }
        if alive == 0 {
            return Some(0);
        }
        if self.has_cycle(alive & keep) {
            return None;
        }

        let comps = self.components(alive);
        if comps.len() > 1 {
            let mut total = 0;
            for c in comps {
                total += self.min_deletions(c, keep & c, limit.checked_sub(total)?)?;
                if total > limit {
                    return None;
                }
            }
            return Some(total);
        }

        if self.disjoint_cycles(alive, keep) > limit {
            return None;
        }
        // Branch on the free vertex with the most cycle potential.
        let v = ones(alive & !keep)
            .max_by_key(|&v| {
                let a = (self.out[v] & alive).count_ones();
                let b = (self.inn[v] & alive).count_ones();
                (a * b, std::cmp::Reverse(v))
            })
            .expect("cyclic component has a free vertex when kept part is acyclic");
        let mut best = None;
        if limit >= 1 {
            if let Some(d) = self.min_deletions(alive & !(1 << v), keep, limit - 1) {
                best = Some(d + 1);
            }
        }
        let keep_limit = best.map_or(limit, |b: usize| b - 1);
        if best != Some(0) {
            if let Some(d) = self.min_deletions(alive, keep | 1 << v, keep_limit) {
                if best.is_none_or(|b| d < b) {
                    best = Some(d);
                }
            }
        }
        best
    }

    fn has_cycle(&self, set: u64) -> bool {
        let mut rest = set;
        loop {
            let sinks: u64 = ones(rest).filter(|&v| self.out[v] & rest == 0).fold(0, |m, v| m | 1 << v);
            if sinks == 0 {
                return rest != 0;
            }
            rest &= !sinks;
        }
    }

    fn reach(&self, from: usize, within: u64, adj: &[u64]) -> u64 {
        let mut seen = 1u64 << from;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0;
            for v in ones(frontier) {
                next |= adj[v] & within;
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen
    }

    /// Non-trivial strongly connected components of `alive`.
    fn components(&self, alive: u64) -> Vec<u64> {
        let mut rest = alive;
        let mut out = Vec::new();
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            let comp = self.reach(v, alive, &self.out) & self.reach(v, alive, &self.inn);
            rest &= !comp;
            if comp.count_ones() > 1 {
                out.push(comp);
            }
        }
        out
    }

    /// Greedy count of vertex-disjoint cycles, each needing one deletion.
    fn disjoint_cycles(&self, alive: u64, keep: u64) -> usize {
        let mut avail = alive;
        let mut count = 0;
        while let Some(cycle) = self.short_cycle(avail) {
            if cycle & !keep == 0 {
                return usize::MAX;
            }
            count += 1;
            avail &= !cycle;
        }
        count
    }

    fn short_cycle(&self, within: u64) -> Option<u64> {
        let mut best: Option<u64> = None;
        for s in ones(within) {
            // Breadth-first search back to `s`.
            let mut parent = [u8::MAX; 64];
            let mut frontier = 1u64 << s;
            let mut seen = 1u64 << s;
            'bfs: while frontier != 0 {
                let mut next = 0u64;
                for v in ones(frontier) {
                    let succ = self.out[v] & within;
                    if succ >> s & 1 == 1 {
                        let mut cycle = 1u64 << v;
                        let mut cur = v;
                        while cur != s {
                            cur = parent[cur] as usize;
                            cycle |= 1 << cur;
                        }
                        if best.is_none_or(|b| cycle.count_ones() < b.count_ones()) {
                            best = Some(cycle);
                        }
                        break 'bfs;
                    }
                    for w in ones(succ & !seen) {
                        parent[w] = v as u8;
                        seen |= 1 << w;
                        next |= 1 << w;
                    }
                }
                frontier = next;
            }
            if best.is_some_and(|b| b.count_ones() == 2) {
                break;
            }
        }
        best
    }
}

fn ones(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

/// The acyclic set that certifies the lower bound for a verified
/// decomposition: the smallest unshared vertex of every node together with
/// all non-inner vertices.
pub fn oic_witness(oic: &VerifiedOic) -> Result<BTreeSet<VertexId>> {
    let d = oic.decomposition();
    let mut witness: BTreeSet<VertexId> = oic.sets().non_inner.clone();
    for (key, verts) in d.nodes() {
        let shared: BTreeSet<VertexId> = d.parent_shared(key).union(&d.child_shared(key)).copied().collect();
        let pick = verts
            .iter()
            .find(|v| !shared.contains(v))
            .ok_or_else(|| Error::Witness(format!("node {key} has no unshared vertex")))?;
        witness.insert(*pick);
    }
    if !oic.graph().is_acyclic_on(&witness) {
        return Err(Error::Witness(format!("{} induces a cycle", fmt_set(&witness))));
    }
    Ok(witness)
}

/// An exact fraction `num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Capacity {
    pub num: u64,
    pub den: u64,
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub code_length: usize,
    pub capacity: Capacity,
    pub witness: BTreeSet<VertexId>,
    /// `None` when the graph is larger than the exact solver accepts.
    pub mais: Option<Mais>,
    /// Set only when the code length meets the MAIS lower bound.
    pub beta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<String>,
}

pub fn bounds_report(oic: &VerifiedOic, budget: &Budget) -> Result<BoundsReport> {
    let code_length = oic.code_length();
    let witness = oic_witness(oic)?;
    let mais = match mais_exact(oic.graph(), budget) {
        Ok(m) => Some(m),
        Err(Error::BudgetExceeded(_)) => None,
        Err(e) => return Err(e),
    };
    let mut discrepancy = None;
    let mut beta = None;
    if let Some(m) = &mais {
        if m.size == code_length {
            beta = Some(code_length);
        } else {
            discrepancy = Some(format!("MAIS {} differs from code length {code_length}", m.size));
        }
    }
    Ok(BoundsReport {
        code_length,
        capacity: Capacity {
            num: 1,
            den: code_length as u64,
        },
        witness,
        mais,
        beta,
        discrepancy,
    })
}
