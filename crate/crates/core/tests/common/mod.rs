//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use hiermap::ratio::{ceil_u64, from_u64};
use hiermap::topology::adaptive_epsilon_exact;
use hiermap::{Graph, Hierarchy, Rational};
use num_traits::One;
use rand::Rng;

/// Mixed-radix digits of a PE id, processor level first.
pub fn digits(pe: usize, arities: &[usize]) -> Vec<usize> {
    let mut rest = pe;
    arities
        .iter()
        .map(|&a| {
            let d = rest % a;
            rest /= a;
            d
        })
        .collect()
}

/// Distance from the highest differing digit: two PEs first meet at the
/// level just above the most significant position where they differ.
pub fn reference_distance(h: &Hierarchy, x: usize, y: usize) -> u64 {
    if x == y {
        return 0;
    }
    let (dx, dy) = (digits(x, h.arities()), digits(y, h.arities()));
    let top = (0..dx.len()).rev().find(|&i| dx[i] != dy[i]).unwrap();
    h.distances()[top]
}

/// `sum_{i,j} C_ij * D_{P(i) P(j)}` over a dense communication matrix.
pub fn dense_cost(g: &Graph, h: &Hierarchy, pe: &[usize]) -> u64 {
    let n = g.n();
    let mut c = vec![vec![0u64; n]; n];
    for (u, row) in c.iter_mut().enumerate() {
        for (v, w) in g.neighbors(u) {
            row[v] = w;
        }
    }
    let mut total = 0;
    for i in 0..n {
        for j in 0..n {
            total += c[i][j] * reference_distance(h, pe[i], pe[j]);
        }
    }
    total
}

/// Weight of the heaviest possible final block when every nested call puts
/// the most weight its adaptive imbalance allows into one child, following
/// that child down. Without `ceil` the bounds are chained exactly; with
/// `ceil` each level rounds its bound up to an integer, as real block
/// weights are. Also returns how many levels clamped their imbalance.
pub fn adversarial_cascade(total: u64, eps: &Rational, h: &Hierarchy, ceil: bool) -> (Rational, usize) {
    let k = h.k() as u64;
    let total_r = from_u64(total);
    let mut w = total_r.clone();
    let mut risks = 0;
    for depth in (1..=h.levels()).rev() {
        let a = adaptive_epsilon_exact(eps, k, &total_r, h.prefix(depth) as u64, &w, depth as u32).unwrap();
        if a.balance_risk {
            risks += 1;
        }
        let bound = (Rational::one() + &a.eps) * &w / from_u64(h.arity(depth) as u64);
        w = if ceil { from_u64(ceil_u64(&bound)) } else { bound };
    }
    (w, risks)
}

pub fn random_hierarchy<R: Rng>(rng: &mut R, max_levels: usize, max_k: usize) -> Hierarchy {
    loop {
        let levels = rng.gen_range(1..=max_levels);
        let arities: Vec<usize> = (0..levels).map(|_| rng.gen_range(2..=8)).collect();
        if arities.iter().product::<usize>() > max_k {
            continue;
        }
        let mut d = 1u64;
        let distances = (0..levels)
            .map(|_| {
                d *= rng.gen_range(2..=10);
                d
            })
            .collect();
        return Hierarchy::new(arities, distances).unwrap();
    }
}

/// Smallest edge cut over all `a`-way labelings with every block at most
/// `l_max`.
pub fn brute_force_cut(g: &Graph, a: usize, l_max: u64) -> Option<u64> {
    let n = g.n();
    let mut labels = vec![0usize; n];
    let mut best = None;
    loop {
        let mut w = vec![0u64; a];
        for (v, &b) in labels.iter().enumerate() {
            w[b] += g.vertex_weight(v);
        }
        if w.iter().all(|&x| x <= l_max) {
            let cut = g.edge_cut(&labels);
            best = Some(best.map_or(cut, |b: u64| b.min(cut)));
        }
        let mut i = 0;
        while i < n && labels[i] == a - 1 {
            labels[i] = 0;
            i += 1;
        }
        if i == n {
            return best;
        }
        labels[i] += 1;
    }
}
