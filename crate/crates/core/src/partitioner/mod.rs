//! Multilevel edge-cut partitioner.
//!
//! [`partition`] computes an `a`-way partition by recursive bisection. Every
//! bisection is multilevel: contract a heavy-edge matching until the graph is
//! small, grow an initial bisection on the coarsest graph, then project it
//! back level by level with FM refinement after each projection.
//!
//! A thread budget larger than one is spent on a portfolio of independently
//! seeded attempts; the best attempt wins. The result depends only on the
//! inputs and the seed, never on how the attempts are scheduled.

mod coarsen;
mod fm;
mod initial;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

pub use coarsen::{coarsen_bounded, coarsen_once, project, Coarsening};
pub use fm::{fm_refine, rebalance};
pub use initial::initial_bipartition;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ratio::{self, Rational};
use crate::seed::split_seed;
use crate::topology::imbalance_from_growth;

/// Portfolio attempts per unit of `initial_attempts`.
pub const PORTFOLIO_SCALING: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Preset {
    Fast,
    Eco,
    Strong,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Fast, Preset::Eco, Preset::Strong];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fast => "fast",
            Preset::Eco => "eco",
            Preset::Strong => "strong",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fast" => Ok(Preset::Fast),
            "eco" => Ok(Preset::Eco),
            "strong" => Ok(Preset::Strong),
            _ => Err(Error::InvalidArgument(format!("unknown preset `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionConfig {
    pub preset: Preset,
    /// Coarsening stops once the graph has at most twice this many vertices.
    pub coarsen_stop_threshold: usize,
    pub max_coarsen_rounds: usize,
    /// Randomized initial bisections tried on the coarsest graph.
    pub initial_attempts: usize,
    /// FM pass limit per level.
    pub fm_passes: usize,
    /// Coarsening stops when a round keeps more than this fraction of vertices.
    pub stagnation_ratio: f64,
}

impl PartitionConfig {
    pub fn preset(preset: Preset) -> Self {
        let (initial_attempts, fm_passes, coarsen_stop_threshold) = match preset {
            Preset::Fast => (4, 2, 60),
            Preset::Eco => (8, 4, 80),
            Preset::Strong => (16, 8, 120),
        };
        PartitionConfig {
            preset,
            coarsen_stop_threshold,
            max_coarsen_rounds: 40,
            initial_attempts,
            fm_passes,
            stagnation_ratio: 0.98,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.coarsen_stop_threshold == 0
            || self.max_coarsen_rounds == 0
            || self.initial_attempts == 0
            || self.fm_passes == 0
        {
            return Err(Error::InvalidArgument("partition config counts must be at least 1".into()));
        }
        if !(self.stagnation_ratio > 0.0 && self.stagnation_ratio < 1.0) {
            return Err(Error::InvalidArgument("stagnation ratio must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Number of portfolio attempts a call with thread budget `budget` runs.
    pub fn portfolio_size(&self, budget: usize) -> usize {
        budget.clamp(1, self.initial_attempts * PORTFOLIO_SCALING)
    }
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self::preset(Preset::Eco)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionResult {
    pub block_ids: Vec<usize>,
    pub achieved_cut: u64,
    pub achieved_max_block_weight: u64,
    /// Every block weighs at most `ceil((1 + eps') * c(V) / a)`.
    pub met_balance: bool,
}

/// Partitions `graph` into `a` blocks of weight at most
/// `ceil((1 + eps_prime) * c(V) / a)`, best effort, minimizing the edge cut.
///
/// `budget` threads run `cfg.portfolio_size(budget)` independently seeded
/// attempts; attempt `i` uses `split_seed(seed, i)`, so a larger budget only
/// adds attempts. The winner is the first attempt that meets the balance
/// bound, then has the smallest cut, then the lightest heaviest block.
pub fn partition(
    graph: &Graph,
    a: usize,
    eps_prime: &Rational,
    budget: usize,
    cfg: &PartitionConfig,
    seed: u64,
) -> Result<PartitionResult> {
    if a == 0 || budget == 0 {
        return Err(Error::InvalidArgument("block count and budget must be at least 1".into()));
    }
    cfg.validate()?;
    if graph.is_empty() {
        return Err(Error::InvalidArgument("cannot partition an empty graph".into()));
    }
    let total = graph.total_weight();
    if total == 0 {
        return Err(Error::ZeroWeight);
    }
    if a > graph.n() {
        return Err(Error::TooManyBlocks { blocks: a, vertices: graph.n() });
    }
    let l_max = crate::topology::compute_l_max(total, a as u64, eps_prime);
    if a == 1 {
        return Ok(evaluate(graph, vec![0; graph.n()], 1, l_max));
    }

    let attempts = cfg.portfolio_size(budget);
    let run =
        |i: usize| evaluate(graph, recursive_split_inner(graph, a, eps_prime, cfg, split_seed(seed, i)), a, l_max);
    let results: Vec<PartitionResult> = if attempts == 1 {
        vec![run(0)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..attempts).map(|i| s.spawn(move || run(i))).collect();
            handles.into_iter().map(|h| h.join().expect("partition attempt panicked")).collect()
        })
    };
    let best = results
        .into_iter()
        .enumerate()
        .min_by_key(|(i, r)| (!r.met_balance, r.achieved_cut, r.achieved_max_block_weight, *i))
        .map(|(_, r)| r)
        .expect("at least one attempt");
    Ok(best)
}

fn evaluate(graph: &Graph, block_ids: Vec<usize>, a: usize, l_max: u64) -> PartitionResult {
    let mut weights = vec![0u64; a];
    for (v, &b) in block_ids.iter().enumerate() {
        weights[b] += graph.vertex_weight(v);
    }
    let heaviest = weights.iter().copied().max().unwrap_or(0);
    PartitionResult {
        achieved_cut: graph.edge_cut(&block_ids),
        achieved_max_block_weight: heaviest,
        met_balance: heaviest <= l_max,
        block_ids,
    }
}

/// Single-attempt `a`-way partition by recursive bisection.
///
/// `a` splits into `ceil(a/2)` blocks on the left (ids `[0, ceil(a/2))`) and
/// `floor(a/2)` on the right, with target weights proportional to those
/// counts. Each bisection rescales the imbalance to the number of
/// bisection levels still below it, the same way nested hierarchy levels
/// are rescaled, so that every final block stays within
/// `ceil((1 + eps_prime) * c(V) / a)` in the worst case.
pub fn recursive_split(
    graph: &Graph,
    a: usize,
    eps_prime: &Rational,
    cfg: &PartitionConfig,
    seed: u64,
) -> Result<Vec<usize>> {
    if a < 2 {
        return Err(Error::InvalidArgument("recursive_split needs at least two blocks".into()));
    }
    if a > graph.n() {
        return Err(Error::TooManyBlocks { blocks: a, vertices: graph.n() });
    }
    cfg.validate()?;
    Ok(recursive_split_inner(graph, a, eps_prime, cfg, seed))
}

struct SplitTarget<'a> {
    total: u64,
    blocks: usize,
    eps: &'a Rational,
}

fn recursive_split_inner(
    graph: &Graph,
    a: usize,
    eps_prime: &Rational,
    cfg: &PartitionConfig,
    seed: u64,
) -> Vec<usize> {
    let target = SplitTarget { total: graph.total_weight(), blocks: a, eps: eps_prime };
    split_node(graph, a, &target, cfg, seed)
}

fn ceil_log2(x: usize) -> u32 {
    usize::BITS - (x - 1).leading_zeros()
}

fn split_node(graph: &Graph, blocks: usize, target: &SplitTarget<'_>, cfg: &PartitionConfig, seed: u64) -> Vec<usize> {
    let n = graph.n();
    if blocks <= 1 {
        return vec![0; n];
    }
    let sub_total = graph.total_weight();
    if sub_total == 0 || target.total == 0 {
        return (0..n).map(|v| v % blocks).collect();
    }
    let left_blocks = blocks.div_ceil(2);
    let right_blocks = blocks / 2;

    // (1 + eps_b)^depth * sub_total / blocks <= (1 + eps') * total / a
    let depth = ceil_log2(blocks);
    let growth = (Rational::one() + target.eps)
        * Rational::new(
            BigInt::from(blocks) * BigInt::from(target.total),
            BigInt::from(target.blocks) * BigInt::from(sub_total),
        );
    let eps_b = imbalance_from_growth(&growth, depth).eps;
    let side_cap = |side_blocks: usize| -> u64 {
        let share = ratio::from_u64(sub_total) * Rational::new(BigInt::from(side_blocks), BigInt::from(blocks));
        let relaxed = (Rational::one() + &eps_b) * &share;
        if side_blocks == 1 {
            ratio::ceil_u64(&relaxed)
        } else {
            ratio::floor_u64(&relaxed).max(ratio::ceil_u64(&share))
        }
    };
    let caps = [side_cap(left_blocks), side_cap(right_blocks)];
    let target0 =
        ratio::ceil_u64(&(ratio::from_u64(sub_total) * Rational::new(BigInt::from(left_blocks), BigInt::from(blocks))));

    let mut sides = multilevel_bisect(graph, target0, caps, cfg, seed);
    ensure_side_counts(graph, &mut sides, [left_blocks, right_blocks]);

    let parts = graph.split_blocks(&sides, 2);
    let mut labels = vec![0usize; n];
    for (side, part) in parts.iter().enumerate() {
        let (side_blocks, offset) = if side == 0 { (left_blocks, 0) } else { (right_blocks, left_blocks) };
        let sub = split_node(&part.subgraph, side_blocks, target, cfg, split_seed(seed, side));
        for (local, &global) in part.local_to_global.iter().enumerate() {
            labels[global] = offset + sub[local];
        }
    }
    labels
}

/// Makes sure side `s` holds at least `needed[s]` vertices so that no final
/// block ends up empty, moving the vertices whose move costs least.
fn ensure_side_counts(graph: &Graph, sides: &mut [usize], needed: [usize; 2]) {
    for side in 0..2 {
        let mut count = sides.iter().filter(|&&s| s == side).count();
        while count < needed[side] {
            let other = 1 - side;
            let donor_count = sides.len() - count;
            if donor_count <= needed[other] {
                break;
            }
            let best = (0..graph.n()).filter(|&v| sides[v] == other).max_by_key(|&v| {
                let gain: i64 =
                    graph.neighbors(v).map(|(u, w)| if sides[u] == other { -(w as i64) } else { w as i64 }).sum();
                (gain, std::cmp::Reverse(graph.vertex_weight(v)), std::cmp::Reverse(v))
            });
            match best {
                Some(v) => {
                    sides[v] = side;
                    count += 1;
                }
                None => break,
            }
        }
    }
}

/// Key used to compare candidate bisections: overload first, then cut.
fn bisection_key(graph: &Graph, sides: &[usize], caps: [u64; 2]) -> (u64, u64) {
    let mut w = [0u64; 2];
    for (v, &s) in sides.iter().enumerate() {
        w[s] += graph.vertex_weight(v);
    }
    let overload = w[0].saturating_sub(caps[0]) + w[1].saturating_sub(caps[1]);
    (overload, graph.edge_cut(sides))
}

/// Multilevel 2-way partition with side caps `caps` and a target weight of
/// `target0` for side 0.
fn multilevel_bisect(graph: &Graph, target0: u64, caps: [u64; 2], cfg: &PartitionConfig, seed: u64) -> Vec<usize> {
    let stop_at = 2 * cfg.coarsen_stop_threshold;
    let total = graph.total_weight();
    let heaviest_vertex = graph.vertex_weights().iter().copied().max().unwrap_or(0);
    let max_vertex_weight =
        heaviest_vertex.max((3 * total).div_ceil(2 * stop_at as u64)).min(caps[0].min(caps[1]).max(1));

    let mut levels: Vec<Coarsening> = Vec::new();
    for round in 0..cfg.max_coarsen_rounds {
        let current = levels.last().map_or(graph, |c| &c.graph);
        if current.n() <= stop_at {
            break;
        }
        let next = coarsen_bounded(current, split_seed(seed, 1000 + round), max_vertex_weight);
        let stagnated = next.graph.n() as f64 > cfg.stagnation_ratio * current.n() as f64;
        if next.graph.n() < current.n() {
            levels.push(next);
        }
        if stagnated {
            break;
        }
    }

    let coarsest = levels.last().map_or(graph, |c| &c.graph);
    let mut best: Option<((u64, u64), Vec<usize>)> = None;
    for attempt in 0..cfg.initial_attempts {
        let mut sides = initial_bipartition(coarsest, target0, split_seed(seed, attempt));
        fm_refine(coarsest, &mut sides, caps, cfg.fm_passes);
        let key = bisection_key(coarsest, &sides, caps);
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, sides));
        }
    }
    let mut sides = best.expect("initial_attempts >= 1").1;

    for level in (0..levels.len()).rev() {
        let finer = if level == 0 { graph } else { &levels[level - 1].graph };
        sides = project(&sides, &levels[level].coarse_map);
        fm_refine(finer, &mut sides, caps, cfg.fm_passes);
    }
    sides
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::parse_ratio;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::unweighted(n, &edges).unwrap()
    }

    fn grid(rows: usize, cols: usize) -> Graph {
        let mut edges = Vec::new();
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
        Graph::unweighted(rows * cols, &edges).unwrap()
    }

    fn zero() -> Rational {
        parse_ratio("0").unwrap()
    }

    #[test]
    fn path_bisection() {
        let r = partition(&path(4), 2, &zero(), 1, &PartitionConfig::default(), 3).unwrap();
        assert_eq!(r.achieved_cut, 1);
        assert_eq!(r.achieved_max_block_weight, 2);
        assert!(r.met_balance);
    }

    #[test]
    fn k4_bisection() {
        let k4 = Graph::unweighted(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let r = partition(&k4, 2, &zero(), 2, &PartitionConfig::default(), 3).unwrap();
        assert_eq!(r.achieved_cut, 4);
    }

    #[test]
    fn one_block_is_trivial() {
        let g = grid(3, 3);
        let r = partition(&g, 1, &zero(), 4, &PartitionConfig::default(), 0).unwrap();
        assert_eq!(r.block_ids, vec![0; 9]);
        assert_eq!(r.achieved_cut, 0);
    }

    #[test]
    fn errors() {
        let cfg = PartitionConfig::default();
        assert_eq!(
            partition(&path(3), 4, &zero(), 1, &cfg, 0).unwrap_err(),
            Error::TooManyBlocks { blocks: 4, vertices: 3 }
        );
        let weightless = Graph::from_edges(vec![0, 0], &[(0, 1, 1)]).unwrap();
        assert_eq!(partition(&weightless, 2, &zero(), 1, &cfg, 0).unwrap_err(), Error::ZeroWeight);
        assert!(partition(&Graph::default(), 1, &zero(), 1, &cfg, 0).is_err());
        assert!(recursive_split(&path(3), 1, &zero(), &cfg, 0).is_err());
    }

    #[test]
    fn three_isolated_vertices() {
        let g = Graph::unweighted(3, &[]).unwrap();
        let labels = recursive_split(&g, 3, &zero(), &PartitionConfig::default(), 1).unwrap();
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
        assert_eq!(g.edge_cut(&labels), 0);
    }

    #[test]
    fn two_by_four_grid_into_four() {
        let g = grid(2, 4);
        let r = partition(&g, 4, &zero(), 1, &PartitionConfig::default(), 11).unwrap();
        assert_eq!(r.achieved_max_block_weight, 2);
        // brute force over all 4^8 labelings with every block of weight 2
        let mut best = u64::MAX;
        for code in 0..4usize.pow(8) {
            let labels: Vec<usize> = (0..8).map(|i| code / 4usize.pow(i) % 4).collect();
            if (0..4).all(|b| labels.iter().filter(|&&x| x == b).count() == 2) {
                best = best.min(g.edge_cut(&labels));
            }
        }
        // 10 edges, at most one inside each of the four pairs
        assert_eq!(best, 6);
        assert_eq!(r.achieved_cut, best);
    }

    #[test]
    fn preset_values() {
        let fast = PartitionConfig::preset(Preset::Fast);
        assert_eq!((fast.initial_attempts, fast.fm_passes, fast.coarsen_stop_threshold), (4, 2, 60));
        let eco = PartitionConfig::preset(Preset::Eco);
        assert_eq!((eco.initial_attempts, eco.fm_passes, eco.coarsen_stop_threshold), (8, 4, 80));
        let strong = PartitionConfig::preset(Preset::Strong);
        assert_eq!((strong.initial_attempts, strong.fm_passes, strong.coarsen_stop_threshold), (16, 8, 120));
        assert_eq!("Strong".parse::<Preset>().unwrap(), Preset::Strong);
        assert!("turbo".parse::<Preset>().is_err());
        let mut bad = fast.clone();
        bad.stagnation_ratio = 1.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn portfolio_size_is_capped() {
        let cfg = PartitionConfig::preset(Preset::Fast);
        assert_eq!(cfg.portfolio_size(1), 1);
        assert_eq!(cfg.portfolio_size(8), 8);
        assert_eq!(cfg.portfolio_size(80), 16);
    }

    #[test]
    fn larger_grid_is_balanced() {
        let g = grid(20, 20);
        let eps = parse_ratio("0.03").unwrap();
        for a in [2, 3, 5, 8] {
            let r = partition(&g, a, &eps, 1, &PartitionConfig::default(), 7).unwrap();
            assert!(r.met_balance, "a = {a}: heaviest {}", r.achieved_max_block_weight);
            let distinct: std::collections::BTreeSet<_> = r.block_ids.iter().collect();
            assert_eq!(distinct.len(), a);
        }
    }
}
