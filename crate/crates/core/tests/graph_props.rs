use hiermap::graph::Graph;
use hiermap::parse_metis;
use proptest::prelude::*;

/// Random weighted graph as (vertex weights, edge list) with no self-loops.
fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let weights = prop::collection::vec(0u64..5, n);
        let edges = prop::collection::vec((0..n, 0..n, 1u64..7), 0..(3 * n));
        (weights, edges).prop_map(|(w, e)| {
            let e: Vec<_> = e.into_iter().filter(|(u, v, _)| u != v).collect();
            Graph::from_edges(w, &e).unwrap()
        })
    })
}

fn brute_cut(g: &Graph, blocks: &[usize]) -> u64 {
    let mut cut = 0;
    for u in 0..g.n() {
        for (v, w) in g.neighbors(u) {
            if u < v && blocks[u] != blocks[v] {
                cut += w;
            }
        }
    }
    cut
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn metis_round_trip(g in arb_graph(30)) {
        let back = parse_metis(&g.to_metis()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn edge_cut_matches_pair_sum(g in arb_graph(25), labels in prop::collection::vec(0usize..4, 25)) {
        let blocks = &labels[..g.n()];
        prop_assert_eq!(g.edge_cut(blocks), brute_cut(&g, blocks));
    }

    #[test]
    fn extraction_covers_every_vertex(g in arb_graph(25), labels in prop::collection::vec(0usize..3, 25)) {
        let blocks = &labels[..g.n()];
        let parts = g.split_blocks(blocks, 3);
        let mut seen = vec![false; g.n()];
        let mut internal = 0;
        for (b, part) in parts.iter().enumerate() {
            prop_assert_eq!(part.subgraph.n(), part.local_to_global.len());
            for (local, &global) in part.local_to_global.iter().enumerate() {
                prop_assert_eq!(blocks[global], b);
                prop_assert!(!seen[global]);
                seen[global] = true;
                prop_assert_eq!(part.subgraph.vertex_weight(local), g.vertex_weight(global));
            }
            internal += part.subgraph.total_edge_weight();
            if part.subgraph.n() > 0 {
                let single = g.extract_subgraph(blocks, b).unwrap();
                prop_assert_eq!(&single.subgraph, &part.subgraph);
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
        // every edge is either inside one block or cut
        prop_assert_eq!(internal + g.edge_cut(blocks), g.total_edge_weight());
    }
}

#[test]
fn missing_block_is_an_error() {
    let g = Graph::unweighted(3, &[(0, 1), (1, 2)]).unwrap();
    assert!(g.extract_subgraph(&[0, 0, 0], 1).is_err());
}
