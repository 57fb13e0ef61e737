//! Hardware hierarchy, PE distances, balance accounting and the
//! communication cost of a mapping.
//!
//! A hierarchy `a_1:a_2:...:a_l` says that a processor holds `a_1` PEs, a
//! node holds `a_2` processors, and so on. PEs are numbered depth-first, so
//! `x / prefix(i)` is the id of the level-`i` ancestor of PE `x`, where
//! `prefix(i) = a_1 * ... * a_i`. Two PEs whose lowest shared ancestor sits
//! at level `i` are `d_i` apart.

use std::fmt;
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ratio::{self, Rational, ROOT_PRECISION_BITS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hierarchy {
    arities: Vec<usize>,
    distances: Vec<u64>,
    prefix: Vec<usize>,
}

impl Hierarchy {
    pub fn new(arities: Vec<usize>, distances: Vec<u64>) -> Result<Self> {
        if arities.is_empty() {
            return Err(Error::Hierarchy("at least one level is required".into()));
        }
        if arities.len() != distances.len() {
            return Err(Error::Hierarchy(format!("{} arities but {} distances", arities.len(), distances.len())));
        }
        if let Some(i) = arities.iter().position(|&a| a == 0) {
            return Err(Error::Hierarchy(format!("arity at level {} is zero", i + 1)));
        }
        let mut prefix = Vec::with_capacity(arities.len() + 1);
        prefix.push(1usize);
        for &a in &arities {
            let next =
                prefix.last().unwrap().checked_mul(a).ok_or_else(|| Error::Hierarchy("PE count overflows".into()))?;
            prefix.push(next);
        }
        Ok(Hierarchy { arities, distances, prefix })
    }

    /// Number of levels `l`.
    pub fn levels(&self) -> usize {
        self.arities.len()
    }

    /// Total PE count `k`.
    pub fn k(&self) -> usize {
        self.prefix[self.levels()]
    }

    /// `a_level`, 1-based as in `a_1:...:a_l`.
    pub fn arity(&self, level: usize) -> usize {
        self.arities[level - 1]
    }

    /// `d_level`, 1-based.
    pub fn distance_at(&self, level: usize) -> u64 {
        self.distances[level - 1]
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn distances(&self) -> &[u64] {
        &self.distances
    }

    /// `a_1 * ... * a_level`; `prefix(0) == 1` and `prefix(l) == k`.
    pub fn prefix(&self, level: usize) -> usize {
        self.prefix[level]
    }

    /// Distance between two PEs without range checks.
    #[inline]
    pub fn distance(&self, x: usize, y: usize) -> u64 {
        if x == y {
            return 0;
        }
        for level in 1..=self.levels() {
            if x / self.prefix[level] == y / self.prefix[level] {
                return self.distances[level - 1];
            }
        }
        unreachable!("PEs {x} and {y} share no ancestor below the root")
    }

    /// Distance between two PEs, rejecting ids outside `[0, k)`.
    pub fn pe_distance(&self, x: usize, y: usize) -> Result<u64> {
        let k = self.k();
        for pe in [x, y] {
            if pe >= k {
                return Err(Error::PeOutOfRange { pe, k });
            }
        }
        Ok(self.distance(x, y))
    }

    pub fn arity_string(&self) -> String {
        join(&self.arities)
    }

    pub fn distance_string(&self) -> String {
        join(&self.distances)
    }
}

impl fmt::Display for Hierarchy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H={} D={}", self.arity_string(), self.distance_string())
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(":")
}

/// Parses hierarchy and distance strings such as `"4:8:6"` and `"1:10:100"`.
pub fn parse_hierarchy(h_text: &str, d_text: &str) -> Result<Hierarchy> {
    fn tokens<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
        text.trim()
            .split(':')
            .map(|t| {
                t.trim()
                    .parse::<T>()
                    .map_err(|_| Error::Hierarchy(format!("{what} token `{t}` is not a valid integer")))
            })
            .collect()
    }
    let arities = tokens::<usize>(h_text, "arity")?;
    let distances = tokens::<u64>(d_text, "distance")?;
    Hierarchy::new(arities, distances)
}

/// Assignment of every task to a PE in `[0, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mapping {
    assignment: Vec<usize>,
}

impl Mapping {
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&pe) = assignment.iter().find(|&&pe| pe >= k) {
            return Err(Error::PeOutOfRange { pe, k });
        }
        Ok(Mapping { assignment })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.assignment
    }

    /// Reads one PE id per line.
    pub fn read<R: BufRead>(reader: R, k: usize) -> Result<Self> {
        let mut assignment = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let pe = line
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("mapping line {}: `{line}`", i + 1)))?;
            assignment.push(pe);
        }
        Self::new(assignment, k)
    }

    pub fn write<W: Write>(&self, mut writer: W) -> Result<()> {
        for pe in &self.assignment {
            writeln!(writer, "{pe}")?;
        }
        Ok(())
    }
}

/// `J = sum_{i,j} C_ij * D_{P(i) P(j)}` over ordered task pairs. Both
/// directions of each edge are stored, so this is twice the per-edge sum.
pub fn comm_cost(graph: &Graph, hierarchy: &Hierarchy, mapping: &Mapping) -> Result<u64> {
    if mapping.len() != graph.n() {
        return Err(Error::LengthMismatch { expected: graph.n(), got: mapping.len() });
    }
    let pe = mapping.assignment();
    let mut cost = 0u64;
    for u in 0..graph.n() {
        for (v, w) in graph.neighbors(u) {
            cost += w * hierarchy.distance(pe[u], pe[v]);
        }
    }
    Ok(cost)
}

/// `L_max = ceil((1 + eps) * total / k)`, exactly.
pub fn compute_l_max(total: u64, k: u64, eps: &Rational) -> u64 {
    assert!(k >= 1, "k must be positive");
    let bound = (Rational::one() + eps) * ratio::from_u64(total) / ratio::from_u64(k);
    ratio::ceil_u64(&bound)
}

/// Imbalance to use for one nested partition call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptiveImbalance {
    pub eps: Rational,
    /// The subgraph is heavier than its worst-case budget; `eps` was clamped
    /// to zero and the final partition may miss `L_max`.
    pub balance_risk: bool,
}

/// Rescaled imbalance for partitioning a subgraph of weight `sub_total`
/// sitting at depth `depth`, with `k_sub` final blocks below it:
///
/// `eps' = ((1 + eps) * k_sub * total / (k * sub_total))^(1/depth) - 1`
///
/// The root is taken from below at [`ROOT_PRECISION_BITS`] fractional bits,
/// so `(1 + eps')^depth * sub_total / k_sub <= (1 + eps) * total / k` always
/// holds exactly.
pub fn adaptive_epsilon(
    eps: &Rational,
    k: u64,
    total: u64,
    k_sub: u64,
    sub_total: u64,
    depth: u32,
) -> Result<AdaptiveImbalance> {
    if depth == 0 {
        return Err(Error::ZeroDepth);
    }
    adaptive_epsilon_exact(eps, k, &ratio::from_u64(total), k_sub, &ratio::from_u64(sub_total), depth)
}

/// [`adaptive_epsilon`] for fractional weights, as they arise when bounds
/// are chained without rounding.
pub fn adaptive_epsilon_exact(
    eps: &Rational,
    k: u64,
    total: &Rational,
    k_sub: u64,
    sub_total: &Rational,
    depth: u32,
) -> Result<AdaptiveImbalance> {
    if depth == 0 {
        return Err(Error::ZeroDepth);
    }
    if !sub_total.is_positive() || k == 0 {
        return Err(Error::InvalidArgument("sub_total and k must be positive".into()));
    }
    let growth = (Rational::one() + eps) * ratio::from_u64(k_sub) * total / (ratio::from_u64(k) * sub_total);
    Ok(imbalance_from_growth(&growth, depth))
}

/// `growth^(1/depth) - 1`, clamped at zero.
pub(crate) fn imbalance_from_growth(growth: &Rational, depth: u32) -> AdaptiveImbalance {
    let eps = ratio::root_floor(growth, depth, ROOT_PRECISION_BITS) - Rational::one();
    if eps.is_negative() {
        AdaptiveImbalance { eps: Rational::zero(), balance_risk: true }
    } else {
        AdaptiveImbalance { eps, balance_risk: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceReport {
    pub block_weights: Vec<u64>,
    pub l_max: u64,
    /// `max_block_weight * k / c(V) - 1`; zero for weightless graphs.
    pub max_imbalance: Rational,
    pub is_balanced: bool,
}

impl BalanceReport {
    pub fn max_block_weight(&self) -> u64 {
        self.block_weights.iter().copied().max().unwrap_or(0)
    }

    pub fn max_imbalance_f64(&self) -> f64 {
        ratio::to_f64(&self.max_imbalance)
    }
}

/// Per-block weights and the verdict `max block weight <= L_max`.
pub fn check_balance(graph: &Graph, blocks: &[usize], k: usize, eps: &Rational) -> Result<BalanceReport> {
    if blocks.len() != graph.n() {
        return Err(Error::LengthMismatch { expected: graph.n(), got: blocks.len() });
    }
    let mut block_weights = vec![0u64; k];
    for (v, &b) in blocks.iter().enumerate() {
        if b >= k {
            return Err(Error::PeOutOfRange { pe: b, k });
        }
        block_weights[b] += graph.vertex_weight(v);
    }
    let total = graph.total_weight();
    let l_max = compute_l_max(total, k as u64, eps);
    let heaviest = block_weights.iter().copied().max().unwrap_or(0);
    let max_imbalance = if total == 0 {
        Rational::zero()
    } else {
        Rational::new(BigInt::from(heaviest) * BigInt::from(k), BigInt::from(total)) - Rational::one()
    };
    Ok(BalanceReport { is_balanced: heaviest <= l_max, block_weights, l_max, max_imbalance })
}
