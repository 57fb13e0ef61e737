//! Heavy-edge matching and edge contraction.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

/// One contraction step: the coarse graph and, for every fine vertex, the id
/// of the coarse vertex it was merged into.
#[derive(Clone, Debug)]
pub struct Coarsening {
    pub graph: Graph,
    pub coarse_map: Vec<usize>,
}

/// Contracts a heavy-edge matching of `graph`.
///
/// Vertices are visited in a seeded random order. Each unmatched vertex is
/// matched to the unmatched neighbor behind its heaviest edge (lower id on
/// ties). Matched pairs become one vertex with the summed weight; parallel
/// edges are merged by adding their weights.
pub fn coarsen_once(graph: &Graph, seed: u64) -> Coarsening {
    let mut order: Vec<usize> = (0..graph.n()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    coarsen_with_order(graph, &order, u64::MAX)
}

/// As [`coarsen_once`], but never creates a vertex heavier than
/// `max_vertex_weight`.
pub fn coarsen_bounded(graph: &Graph, seed: u64, max_vertex_weight: u64) -> Coarsening {
    let mut order: Vec<usize> = (0..graph.n()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    coarsen_with_order(graph, &order, max_vertex_weight)
}

pub(crate) fn coarsen_with_order(graph: &Graph, order: &[usize], max_vertex_weight: u64) -> Coarsening {
    let n = graph.n();
    const UNMATCHED: usize = usize::MAX;
    let mut mate = vec![UNMATCHED; n];
    for &u in order {
        if mate[u] != UNMATCHED {
            continue;
        }
        let cu = graph.vertex_weight(u);
        let mut best: Option<(u64, usize)> = None;
        for (v, w) in graph.neighbors(u) {
            if mate[v] != UNMATCHED || cu.saturating_add(graph.vertex_weight(v)) > max_vertex_weight {
                continue;
            }
            best = match best {
                Some((bw, bv)) if bw > w || (bw == w && bv < v) => Some((bw, bv)),
                _ => Some((w, v)),
            };
        }
        match best {
            Some((_, v)) => {
                mate[u] = v;
                mate[v] = u;
            }
            None => mate[u] = u,
        }
    }

    // Coarse ids follow the lowest fine id of each pair.
    let mut coarse_map = vec![UNMATCHED; n];
    let mut members: Vec<(usize, usize)> = Vec::with_capacity(n);
    for v in 0..n {
        if coarse_map[v] == UNMATCHED {
            let id = members.len();
            coarse_map[v] = id;
            coarse_map[mate[v]] = id;
            members.push((v, mate[v]));
        }
    }

    let nc = members.len();
    let mut offsets = Vec::with_capacity(nc + 1);
    let mut targets = Vec::with_capacity(graph.directed_entries());
    let mut edge_weights = Vec::with_capacity(graph.directed_entries());
    let mut vertex_weights = Vec::with_capacity(nc);
    let mut slot = vec![UNMATCHED; nc];
    offsets.push(0);
    for (c, &(a, b)) in members.iter().enumerate() {
        let start = targets.len();
        let mut weight = graph.vertex_weight(a);
        if b != a {
            weight += graph.vertex_weight(b);
        }
        vertex_weights.push(weight);
        let fine: &[usize] = if a == b { &[a][..] } else { &[a, b][..] };
        for &f in fine {
            for (v, w) in graph.neighbors(f) {
                let cv = coarse_map[v];
                if cv == c {
                    continue;
                }
                if slot[cv] == UNMATCHED || slot[cv] < start {
                    slot[cv] = targets.len();
                    targets.push(cv);
                    edge_weights.push(w);
                } else {
                    edge_weights[slot[cv]] += w;
                }
            }
        }
        offsets.push(targets.len());
    }
    Coarsening { graph: Graph::from_parts_unchecked(offsets, targets, edge_weights, vertex_weights), coarse_map }
}

/// Lifts a coarse assignment to the fine graph.
pub fn project(coarse_blocks: &[usize], coarse_map: &[usize]) -> Vec<usize> {
    coarse_map.iter().map(|&c| coarse_blocks[c]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_collapses() {
        let g = Graph::from_edges(vec![3, 4], &[(0, 1, 5)]).unwrap();
        let c = coarsen_once(&g, 9);
        assert_eq!(c.graph.n(), 1);
        assert_eq!(c.graph.vertex_weights(), &[7]);
        assert_eq!(c.graph.num_edges(), 0);
        assert_eq!(c.coarse_map, vec![0, 0]);
    }

    #[test]
    fn path_matches_heaviest_edge_first() {
        // a-b weight 9, b-c weight 1, visited a, b, c
        let g = Graph::from_edges(vec![1; 3], &[(0, 1, 9), (1, 2, 1)]).unwrap();
        let c = coarsen_with_order(&g, &[0, 1, 2], u64::MAX);
        assert_eq!(c.graph.n(), 2);
        assert_eq!(c.graph.num_edges(), 1);
        assert_eq!(c.graph.total_edge_weight(), 1);
        assert_eq!(c.graph.vertex_weights(), &[2, 1]);
    }

    #[test]
    fn parallel_edges_merge() {
        // triangle u, v, x; contracting {u, v} joins w(ux) = 2 and w(vx) = 3
        let g = Graph::from_edges(vec![1; 3], &[(0, 1, 10), (0, 2, 2), (1, 2, 3)]).unwrap();
        let c = coarsen_with_order(&g, &[0, 1, 2], u64::MAX);
        assert_eq!(c.graph.n(), 2);
        assert_eq!(c.graph.neighbors(0).collect::<Vec<_>>(), vec![(1, 5)]);
        assert_eq!(c.graph.neighbors(1).collect::<Vec<_>>(), vec![(0, 5)]);
    }

    #[test]
    fn weight_bound_blocks_heavy_merges() {
        let g = Graph::from_edges(vec![3, 4], &[(0, 1, 5)]).unwrap();
        assert_eq!(coarsen_bounded(&g, 1, 6).graph.n(), 2);
    }

    #[test]
    fn ties_prefer_lower_neighbor() {
        let g = Graph::unweighted(3, &[(0, 1), (0, 2)]).unwrap();
        let c = coarsen_with_order(&g, &[0, 1, 2], u64::MAX);
        assert_eq!(c.coarse_map, vec![0, 0, 1]);
    }
}
