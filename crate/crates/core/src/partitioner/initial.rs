//! Greedy graph growing for the coarsest graph.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

/// Grows block 0 from a seeded random start vertex until its weight reaches
/// `target_weight_0`; everything else stays in block 1.
///
/// The next vertex absorbed is the one adjacent to block 0 with the largest
/// `w(v, block 0) - w(v, block 1)`, lower id on ties. If block 0 has no
/// remaining neighbors (disconnected input), growth restarts from the next
/// vertex of the seeded order.
pub fn initial_bipartition(graph: &Graph, target_weight_0: u64, seed: u64) -> Vec<usize> {
    let n = graph.n();
    let mut blocks = vec![1usize; n];
    if n == 0 || target_weight_0 == 0 {
        return blocks;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut next_start = order.into_iter();

    // preference[v] = w(v, block 0) - w(v, block 1) for v in block 1
    let mut preference: Vec<i64> = (0..n).map(|v| -(graph.neighbors(v).map(|(_, w)| w as i64).sum::<i64>())).collect();
    let mut frontier: BinaryHeap<(i64, Reverse<usize>)> = BinaryHeap::new();
    let mut weight0 = 0u64;

    while weight0 < target_weight_0 {
        let v = loop {
            match frontier.pop() {
                Some((p, Reverse(v))) if blocks[v] == 1 && p == preference[v] => break Some(v),
                Some(_) => continue,
                None => break None,
            }
        };
        let v = match v {
            Some(v) => v,
            None => match next_start.by_ref().find(|&v| blocks[v] == 1) {
                Some(v) => v,
                None => break,
            },
        };
        blocks[v] = 0;
        weight0 += graph.vertex_weight(v);
        for (u, w) in graph.neighbors(v) {
            if blocks[u] == 1 {
                preference[u] += 2 * w as i64;
                frontier.push((preference[u], Reverse(u)));
            }
        }
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_triangles_cut_zero() {
        let g = Graph::unweighted(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        for seed in 0..20 {
            let blocks = initial_bipartition(&g, 3, seed);
            assert_eq!(g.edge_cut(&blocks), 0, "seed {seed}");
            assert_eq!(blocks.iter().filter(|&&b| b == 0).count(), 3);
        }
    }

    #[test]
    fn single_vertex() {
        let g = Graph::unweighted(1, &[]).unwrap();
        assert_eq!(initial_bipartition(&g, 1, 5), vec![0]);
    }

    #[test]
    fn path_of_four() {
        let g = Graph::unweighted(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        for seed in 0..20 {
            let blocks = initial_bipartition(&g, 2, seed);
            assert_eq!(g.edge_cut(&blocks), 1, "seed {seed}");
        }
    }
}
