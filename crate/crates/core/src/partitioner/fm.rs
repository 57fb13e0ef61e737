//! Two-way Fiduccia-Mattheyses refinement.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::Graph;

/// Upper bound on consecutive non-improving moves before a pass gives up,
/// as a fraction of `n` clamped to `[15, 100]`.
fn stall_limit(n: usize) -> usize {
    (n / 100).clamp(15, 100)
}

/// Weight of each side, the cut, and per-vertex gains for a 2-way split.
struct TwoWay<'g> {
    graph: &'g Graph,
    side_weight: [u64; 2],
    cut: u64,
    /// Cut reduction if the vertex switched sides.
    gain: Vec<i64>,
}

impl<'g> TwoWay<'g> {
    fn new(graph: &'g Graph, blocks: &[usize]) -> Self {
        let mut side_weight = [0u64; 2];
        let mut gain = vec![0i64; graph.n()];
        let mut cut = 0u64;
        for u in 0..graph.n() {
            side_weight[blocks[u]] += graph.vertex_weight(u);
            for (v, w) in graph.neighbors(u) {
                if blocks[u] == blocks[v] {
                    gain[u] -= w as i64;
                } else {
                    gain[u] += w as i64;
                    cut += w;
                }
            }
        }
        TwoWay { graph, side_weight, cut: cut / 2, gain }
    }

    /// Moves `v` to the other side and returns the neighbors whose gain
    /// changed through `touched`.
    fn flip(&mut self, blocks: &mut [usize], v: usize, touched: &mut Vec<usize>) {
        let from = blocks[v];
        let to = 1 - from;
        let c = self.graph.vertex_weight(v);
        self.side_weight[from] -= c;
        self.side_weight[to] += c;
        self.cut = (self.cut as i64 - self.gain[v]) as u64;
        self.gain[v] = -self.gain[v];
        blocks[v] = to;
        touched.clear();
        for (u, w) in self.graph.neighbors(v) {
            let w = w as i64;
            if blocks[u] == to {
                self.gain[u] -= 2 * w;
            } else {
                self.gain[u] += 2 * w;
            }
            touched.push(u);
        }
    }

    fn overload(&self, caps: [u64; 2]) -> u64 {
        self.side_weight[0].saturating_sub(caps[0]) + self.side_weight[1].saturating_sub(caps[1])
    }

    /// Distance from the cap-proportional split, compared by cross-multiplication.
    fn deviation(&self, caps: [u64; 2]) -> u128 {
        let a = self.side_weight[0] as u128 * caps[1] as u128;
        let b = self.side_weight[1] as u128 * caps[0] as u128;
        a.abs_diff(b)
    }
}

/// Moves vertices off an overloaded side until both sides fit their caps,
/// preferring the moves that hurt the cut least. Gives up when no single
/// vertex fits on the lighter side.
pub fn rebalance(graph: &Graph, blocks: &mut [usize], caps: [u64; 2]) {
    let mut state = TwoWay::new(graph, blocks);
    rebalance_state(&mut state, blocks, caps);
}

fn rebalance_state(state: &mut TwoWay<'_>, blocks: &mut [usize], caps: [u64; 2]) {
    let heavy = match (state.side_weight[0] > caps[0], state.side_weight[1] > caps[1]) {
        (true, _) => 0,
        (false, true) => 1,
        (false, false) => return,
    };
    let light = 1 - heavy;
    let mut heap: BinaryHeap<(i64, Reverse<usize>)> =
        (0..state.graph.n()).filter(|&v| blocks[v] == heavy).map(|v| (state.gain[v], Reverse(v))).collect();
    let mut touched = Vec::new();
    while state.side_weight[heavy] > caps[heavy] {
        let Some((g, Reverse(v))) = heap.pop() else { break };
        if blocks[v] != heavy || g != state.gain[v] {
            continue;
        }
        if state.side_weight[light] + state.graph.vertex_weight(v) > caps[light] {
            continue;
        }
        state.flip(blocks, v, &mut touched);
        for &u in &touched {
            if blocks[u] == heavy {
                heap.push((state.gain[u], Reverse(u)));
            }
        }
    }
}

/// Classic FM passes on a 2-way assignment.
///
/// Each pass moves boundary vertices one at a time in descending gain order
/// (lower id first on ties) and locks every moved vertex. A move may push the
/// receiving side over its cap by at most one maximum vertex weight, which
/// lets tightly balanced splits swap vertices; the pass then rolls back to
/// the best prefix of moves, ranking overload before cut. If the input overloads a side it is first rebalanced.
/// Starting from a balanced assignment the cut never increases and the caps
/// are never violated. Returns the final cut.
pub fn fm_refine(graph: &Graph, blocks: &mut [usize], caps: [u64; 2], passes: usize) -> u64 {
    assert_eq!(blocks.len(), graph.n());
    let mut state = TwoWay::new(graph, blocks);
    if state.overload(caps) > 0 {
        rebalance_state(&mut state, blocks, caps);
    }
    let n = graph.n();
    let limit = stall_limit(n);
    let slack = graph.vertex_weights().iter().copied().max().unwrap_or(0);
    let mut locked = vec![0u32; n];
    let mut touched = Vec::new();
    let mut heap: BinaryHeap<(i64, Reverse<usize>)> = BinaryHeap::new();
    let mut moves: Vec<usize> = Vec::new();

    for pass in 1..=passes as u32 {
        heap.clear();
        moves.clear();
        for v in 0..n {
            if graph.neighbors(v).any(|(u, _)| blocks[u] != blocks[v]) {
                heap.push((state.gain[v], Reverse(v)));
            }
        }
        let start_cut = state.cut;
        let mut best = (state.overload(caps), state.cut, state.deviation(caps));
        let mut best_len = 0usize;

        while let Some((g, Reverse(v))) = heap.pop() {
            if locked[v] == pass || g != state.gain[v] {
                continue;
            }
            let to = 1 - blocks[v];
            if state.side_weight[to] + graph.vertex_weight(v) > caps[to] + slack {
                continue;
            }
            state.flip(blocks, v, &mut touched);
            locked[v] = pass;
            moves.push(v);
            for &u in &touched {
                if locked[u] != pass {
                    heap.push((state.gain[u], Reverse(u)));
                }
            }
            let key = (state.overload(caps), state.cut, state.deviation(caps));
            if key < best {
                best = key;
                best_len = moves.len();
            } else if moves.len() - best_len > limit {
                break;
            }
        }
        for &v in moves[best_len..].iter().rev() {
            state.flip(blocks, v, &mut touched);
        }
        if state.cut >= start_cut {
            break;
        }
    }
    state.cut
}
