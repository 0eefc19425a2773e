//! Exact solvers checked against naive enumeration on small graphs.

use std::collections::BTreeSet;

use oic_core::bits::{rank_of, Gf2Vec};
use oic_core::bounds::mais_exact;
use oic_core::codec::check_linear_decodability;
use oic_core::oracle::{exhaustive_code_search, minrank_gf2, FittingMatrix};
use oic_core::{Budget, Digraph, VertexId};
use proptest::prelude::*;

fn digraph(min_k: usize, max_k: usize, density: f64) -> impl Strategy<Value = Digraph> {
    (min_k..=max_k).prop_flat_map(move |k| {
        proptest::collection::vec(proptest::bool::weighted(density), k * k).prop_map(move |bits| {
            let edges = (0..k)
                .flat_map(|u| (0..k).map(move |v| (u, v)))
                .filter(|&(u, v)| u != v && bits[u * k + v]);
            Digraph::new(k, edges).unwrap()
        })
    })
}

/// Largest acyclic induced subgraph by trying every subset, together with
/// the lexicographically smallest maximum set.
fn naive_mais(g: &Digraph) -> (usize, Vec<usize>) {
    let k = g.vertex_count();
    let mut best: Option<Vec<usize>> = None;
    for m in 0u32..1 << k {
        let set: Vec<usize> = (0..k).filter(|v| m >> v & 1 == 1).collect();
        let ids: BTreeSet<VertexId> = set.iter().map(|&v| VertexId(v)).collect();
        if !g.is_acyclic_on(&ids) {
            continue;
        }
        best = match best {
            Some(b) if b.len() > set.len() || (b.len() == set.len() && b <= set) => Some(b),
            _ => Some(set),
        };
    }
    let b = best.unwrap();
    (b.len(), b)
}

/// Minimum rank over every fitting matrix.
fn naive_minrank(g: &Digraph) -> usize {
    let k = g.vertex_count();
    let free: Vec<(usize, usize)> = g.edges().map(|(u, v)| (u.0, v.0)).collect();
    (0u64..1 << free.len())
        .map(|bits| {
            let mut rows: Vec<Gf2Vec> = (0..k).map(|i| Gf2Vec::unit(k, i)).collect();
            for (b, &(u, v)) in free.iter().enumerate() {
                if bits >> b & 1 == 1 {
                    rows[u].set(v, true);
                }
            }
            rank_of(k, &rows)
        })
        .min()
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mais_matches_subset_enumeration(g in digraph(1, 12, 0.25)) {
        let m = mais_exact(&g, &Budget::default()).unwrap();
        let (size, witness) = naive_mais(&g);
        prop_assert_eq!(m.size, size);
        prop_assert_eq!(m.witness.iter().map(|v| v.0).collect::<Vec<_>>(), witness);
    }

    #[test]
    fn dense_mais_matches_subset_enumeration(g in digraph(6, 11, 0.6)) {
        prop_assert_eq!(mais_exact(&g, &Budget::default()).unwrap().size, naive_mais(&g).0);
    }

    #[test]
    fn minrank_matches_fitting_matrix_enumeration(g in digraph(1, 5, 0.45)) {
        prop_assume!(g.edge_count() <= 14);
        let budget = Budget::default();
        let m = minrank_gf2(&g, &budget, None).unwrap();
        prop_assert_eq!(m.rank, naive_minrank(&g));
        let witness = FittingMatrix::new(&g, m.witness.rows().to_vec()).unwrap();
        prop_assert_eq!(witness.rank(), m.rank);
        prop_assert!(mais_exact(&g, &budget).unwrap().size <= m.rank);
    }

    #[test]
    fn shortest_decodable_code_has_minrank_length(g in digraph(1, 5, 0.45)) {
        let budget = Budget::default();
        let rank = minrank_gf2(&g, &budget, None).unwrap().rank;
        let code = exhaustive_code_search(&g, g.vertex_count(), &budget).unwrap().unwrap();
        prop_assert_eq!(code.len(), rank);
        prop_assert!(check_linear_decodability(&g, &code).iter().all(|ok| *ok));
        if rank > 0 {
            prop_assert!(exhaustive_code_search(&g, rank - 1, &budget).unwrap().is_none());
        }
    }
}

#[test]
fn lower_bound_stops_the_search_early() {
    // Directed 5-cycle: MAIS 4 and minrank 4.
    let g = Digraph::new(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
    let budget = Budget::default();
    let free = minrank_gf2(&g, &budget, None).unwrap();
    let bounded = minrank_gf2(&g, &budget, Some(4)).unwrap();
    assert_eq!((free.rank, bounded.rank), (4, 4));
    assert!(bounded.search_nodes <= free.search_nodes);
}

#[test]
fn exhausted_budget_is_refused() {
    let g = Digraph::new(8, (0..8).flat_map(|u| (0..8).filter(move |&v| v != u).map(move |v| (u, v)))).unwrap();
    let tiny = Budget {
        search_nodes: 10,
        ..Budget::default()
    };
    assert!(matches!(minrank_gf2(&g, &tiny, None), Err(oic_core::Error::BudgetExceeded(_))));
    assert!(matches!(exhaustive_code_search(&g, 8, &tiny), Err(oic_core::Error::BudgetExceeded(_))));
}
