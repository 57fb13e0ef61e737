//! Synthetic graph families for tests, examples and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::unweighted(n, &edges).expect("valid path")
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::unweighted(n, &edges).expect("valid clique")
}

/// `rows x cols` 4-neighbor grid, row-major ids.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::unweighted(rows * cols, &edges).expect("valid grid")
}

/// Random geometric graph in the unit square with the given expected degree,
/// unit weights.
pub fn random_geometric(n: usize, avg_degree: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    let radius = (avg_degree / (std::f64::consts::PI * n.max(1) as f64)).sqrt();
    let cells = ((1.0 / radius).floor() as usize).clamp(1, 4096);
    let cell_of = |x: f64| ((x * cells as f64) as usize).min(cells - 1);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); cells * cells];
    for (i, &(x, y)) in points.iter().enumerate() {
        buckets[cell_of(x) * cells + cell_of(y)].push(i);
    }
    let r2 = radius * radius;
    let mut edges = Vec::new();
    for (i, &(x, y)) in points.iter().enumerate() {
        let (cx, cy) = (cell_of(x), cell_of(y));
        for nx in cx.saturating_sub(1)..=(cx + 1).min(cells - 1) {
            for ny in cy.saturating_sub(1)..=(cy + 1).min(cells - 1) {
                for &j in &buckets[nx * cells + ny] {
                    if j > i {
                        let (dx, dy) = (points[j].0 - x, points[j].1 - y);
                        if dx * dx + dy * dy <= r2 {
                            edges.push((i, j));
                        }
                    }
                }
            }
        }
    }
    Graph::unweighted(n, &edges).expect("valid geometric graph")
}

/// Erdos-Renyi style graph with `m` random edges and random weights in
/// `1..=max_weight` for both vertices and edges.
pub fn random_weighted(n: usize, m: usize, max_weight: u64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertex_weights = (0..n).map(|_| rng.gen_range(1..=max_weight)).collect();
    let edges: Vec<_> = if n < 2 {
        Vec::new()
    } else {
        (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(1..=max_weight))).collect()
    };
    Graph::from_edges(vertex_weights, &edges).expect("valid random graph")
}
