//! Bounded search for decompositions that verify.
//!
//! Candidate node sets come in two tiers. First, subsets of one strongly
//! connected component in which every member reaches, and is reached from,
//! another member along a path avoiding the rest of the subset. Then any
//! subset in which every member is linked to another in at least one
//! direction, which every node of a valid decomposition satisfies. Families
//! of candidates that form a tree under the single-shared-vertex rule are
//! tried in every edge orientation. Anything returned verifies; when a limit
//! cuts the search short the outcome says so and better decompositions may
//! have been missed.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::graph::{Digraph, VertexId};

use super::conditions::verify_oic;
use super::decomposition::{DecompNode, NodeKey, PolytreeDecomposition, TreeEdge};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuggestLimits {
    pub max_node_size: usize,
    pub max_nodes: usize,
    pub max_candidates: usize,
    /// Verifications attempted before giving up.
    pub max_evaluations: usize,
    pub max_results: usize,
}

impl Default for SuggestLimits {
    fn default() -> Self {
        SuggestLimits {
            max_node_size: 6,
            max_nodes: 4,
            max_candidates: 4096,
            max_evaluations: 50_000,
            max_results: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Suggestion {
    pub decomposition: PolytreeDecomposition,
    pub code_length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuggestOutcome {
    /// Verified decompositions, shortest code first.
    pub suggestions: Vec<Suggestion>,
    /// False when a limit cut the search short.
    pub complete: bool,
}

pub fn suggest_decompositions(g: &Digraph, limits: &SuggestLimits) -> SuggestOutcome {
    let mut complete = true;
    let candidates = candidate_sets(g, limits, &mut complete);

    let mut evaluations = 0usize;
    let mut seen_families: HashSet<Vec<usize>> = HashSet::new();
    let mut found: BTreeMap<(usize, String), Suggestion> = BTreeMap::new();

    // Depth-first growth of families, one attached candidate at a time.
    let mut stack: Vec<Vec<usize>> = (0..candidates.len()).rev().map(|i| vec![i]).collect();
    'search: while let Some(family) = stack.pop() {
        let mut key = family.clone();
        key.sort_unstable();
        if !seen_families.insert(key) {
            continue;
        }
        let sets: Vec<&BTreeSet<VertexId>> = family.iter().map(|&i| &candidates[i]).collect();
        for decomposition in orientations(&sets) {
            if evaluations == limits.max_evaluations {
                complete = false;
                break 'search;
            }
            evaluations += 1;
            if verify_oic(g, &decomposition).passed() {
                let inner = decomposition.inner_total().len();
                let code_length = decomposition.node_count() + g.vertex_count() - inner;
                let text = serde_json::to_string(&decomposition.to_json()).expect("serializable");
                found.insert(
                    (code_length, text),
                    Suggestion {
                        decomposition,
                        code_length,
                    },
                );
            }
        }
        if family.len() == limits.max_nodes {
            continue;
        }
        for (c, cand) in candidates.iter().enumerate().rev() {
            if family.contains(&c) || !attaches(&sets, cand) {
                continue;
            }
            let mut next = family.clone();
            next.push(c);
            stack.push(next);
        }
    }

    SuggestOutcome {
        suggestions: found.into_values().take(limits.max_results).collect(),
        complete,
    }
}

fn candidate_sets(g: &Digraph, limits: &SuggestLimits, complete: &mut bool) -> Vec<BTreeSet<VertexId>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    // First the tightly knit sets inside one strongly connected component.
    for comp in g.strongly_connected_components() {
        if comp.len() < 2 {
            continue;
        }
        let members: Vec<VertexId> = comp.into_iter().collect();
        if !collect(g, &members, limits, &mut out, &mut seen, usize::MAX, cyclically_linked) {
            *complete = false;
            return out;
        }
    }
    // Then any set in which each member is linked to another one.
    let all: Vec<VertexId> = g.vertices().collect();
    let scan_limit = limits.max_candidates.saturating_mul(16);
    if !collect(g, &all, limits, &mut out, &mut seen, scan_limit, linked) {
        *complete = false;
    }
    out
}

/// Adds the qualifying subsets of `members`; false when a limit was hit.
fn collect(
    g: &Digraph,
    members: &[VertexId],
    limits: &SuggestLimits,
    out: &mut Vec<BTreeSet<VertexId>>,
    seen: &mut HashSet<BTreeSet<VertexId>>,
    scan_limit: usize,
    accept: fn(&Digraph, &BTreeSet<VertexId>) -> bool,
) -> bool {
    let mut scanned = 0usize;
    let mut within = true;
    let max = limits.max_node_size.min(members.len());
    for size in 2..=max {
        let mut chosen = Vec::with_capacity(size);
        subsets(members, size, 0, &mut chosen, &mut |s| {
            scanned += 1;
            if scanned > scan_limit {
                within = false;
                return false;
            }
            let set: BTreeSet<VertexId> = s.iter().copied().collect();
            if !seen.contains(&set) && accept(g, &set) {
                if out.len() == limits.max_candidates {
                    within = false;
                    return false;
                }
                seen.insert(set.clone());
                out.push(set);
            }
            true
        });
        if !within {
            return false;
        }
    }
    true
}

/// Calls `visit` on each `size`-subset; stops early when it returns false.
fn subsets<F>(items: &[VertexId], size: usize, from: usize, chosen: &mut Vec<VertexId>, visit: &mut F) -> bool
where
    F: FnMut(&[VertexId]) -> bool,
{
    if chosen.len() == size {
        return visit(chosen);
    }
    for i in from..items.len() {
        if items.len() - i < size - chosen.len() {
            break;
        }
        chosen.push(items[i]);
        let go_on = subsets(items, size, i + 1, chosen, visit);
        chosen.pop();
        if !go_on {
            return false;
        }
    }
    true
}

fn avoiding(g: &Digraph, set: &BTreeSet<VertexId>) -> Vec<bool> {
    let mut allowed = vec![true; g.vertex_count()];
    for v in set {
        allowed[v.0] = false;
    }
    allowed
}

fn cyclically_linked(g: &Digraph, set: &BTreeSet<VertexId>) -> bool {
    let allowed = avoiding(g, set);
    set.iter().all(|&a| {
        let out = set.iter().any(|&b| b != a && reaches(g, a, b, &allowed));
        let inn = set.iter().any(|&b| b != a && reaches(g, b, a, &allowed));
        out && inn
    })
}

/// Necessary for any node of a valid decomposition: every member reaches or
/// is reached by another member along a path avoiding the rest of the set.
fn linked(g: &Digraph, set: &BTreeSet<VertexId>) -> bool {
    let allowed = avoiding(g, set);
    set.iter()
        .all(|&a| set.iter().any(|&b| b != a && (reaches(g, a, b, &allowed) || reaches(g, b, a, &allowed))))
}

fn reaches(g: &Digraph, from: VertexId, to: VertexId, allowed: &[bool]) -> bool {
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        for &w in g.successors(u) {
            if w == to {
                return true;
            }
            if allowed[w.0] && !seen[w.0] {
                seen[w.0] = true;
                stack.push(w);
            }
        }
    }
    false
}

/// A candidate attaches when it meets exactly one family member in exactly
/// one vertex and is disjoint from the others.
fn attaches(family: &[&BTreeSet<VertexId>], cand: &BTreeSet<VertexId>) -> bool {
    let mut touching = 0;
    for set in family {
        match set.intersection(cand).count() {
            0 => {}
            1 => touching += 1,
            _ => return false,
        }
    }
    touching == 1
}

/// Every orientation of the family's tree whose depth assignment is valid.
fn orientations(sets: &[&BTreeSet<VertexId>]) -> Vec<PolytreeDecomposition> {
    let n = sets.len();
    let mut links = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let common: Vec<VertexId> = sets[a].intersection(sets[b]).copied().collect();
            if common.len() == 1 {
                links.push((a, b, common[0]));
            }
        }
    }
    if links.len() + 1 != n {
        return Vec::new();
    }

    let mut out = Vec::new();
    for mask in 0u32..(1u32 << links.len()) {
        let directed: Vec<(usize, usize, VertexId)> = links
            .iter()
            .enumerate()
            .map(|(i, &(a, b, s))| if mask >> i & 1 == 0 { (a, b, s) } else { (b, a, s) })
            .collect();

        // Potentials along the tree: child = parent + 1.
        let mut level: Vec<Option<i64>> = vec![None; n];
        level[0] = Some(0);
        let mut changed = true;
        while changed {
            changed = false;
            for &(p, c, _) in &directed {
                match (level[p], level[c]) {
                    (Some(lp), None) => {
                        level[c] = Some(lp + 1);
                        changed = true;
                    }
                    (None, Some(lc)) => {
                        level[p] = Some(lc - 1);
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
        let levels: Vec<i64> = level.into_iter().map(|l| l.expect("tree is connected")).collect();
        let min = *levels.iter().min().unwrap();
        let depth: Vec<usize> = levels.iter().map(|l| (l - min) as usize).collect();
        let has_parent: BTreeSet<usize> = directed.iter().map(|&(_, c, _)| c).collect();
        if (0..n).any(|i| depth[i] > 0 && !has_parent.contains(&i)) {
            continue;
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (depth[i], sets[i].iter().next().copied()));
        let mut keys = vec![NodeKey::new(0, 0); n];
        let mut next_index: BTreeMap<usize, usize> = BTreeMap::new();
        for &i in &order {
            let j = next_index.entry(depth[i]).or_insert(0);
            *j += 1;
            keys[i] = NodeKey::new(depth[i], *j);
        }
        let nodes = (0..n)
            .map(|i| DecompNode {
                key: keys[i],
                vertices: sets[i].clone(),
            })
            .collect();
        let edges = directed
            .iter()
            .map(|&(p, c, s)| TreeEdge {
                parent: keys[p],
                child: keys[c],
                shared: s,
            })
            .collect();
        if let Ok(d) = PolytreeDecomposition::new(nodes, edges) {
            out.push(d);
        }
    }
    out
}
