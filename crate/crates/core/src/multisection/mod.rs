//! Hierarchical multisection.
//!
//! The communication graph is partitioned into `a_l` blocks, each block into
//! `a_{l-1}` blocks, and so on down to `a_1`. A task at depth `d` owns the
//! `prefix(d)` consecutive PEs starting at its `block_offset`; its `b`-th
//! child owns the range starting at `block_offset + b * prefix(d - 1)`. Leaves
//! own exactly one PE, so the final mapping is the identity on block ids.
//!
//! The four [`Strategy`] variants differ only in how they hand out the `p`
//! threads to pending partition calls. Every call receives its seed from its
//! position in the hierarchy, so at `p = 1` all strategies perform the same
//! calls with the same inputs and produce the same mapping.

mod layer;
mod naive;
mod nb_layer;
mod probe;
mod queue;

use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::{Duration, Instant};

pub use probe::{CallRecord, LayerTrace, Probe};
pub use queue::QueueOrder;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partitioner::{partition, PartitionConfig};
use crate::ratio::Rational;
use crate::seed::{mix64, split_seed};
use crate::topology::{adaptive_epsilon, check_balance, comm_cost, BalanceReport, Hierarchy, Mapping};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    Naive,
    Layer,
    Queue,
    NbLayer,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Naive, Strategy::Layer, Strategy::Queue, Strategy::NbLayer];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Naive => "naive",
            Strategy::Layer => "layer",
            Strategy::Queue => "queue",
            Strategy::NbLayer => "nb-layer",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "naive" => Ok(Strategy::Naive),
            "layer" => Ok(Strategy::Layer),
            "queue" => Ok(Strategy::Queue),
            "nb-layer" => Ok(Strategy::NbLayer),
            _ => Err(Error::InvalidArgument(format!("unknown strategy `{s}`"))),
        }
    }
}

/// Threads given to the `j`-th of `m` graphs (1-based) when `p` threads are
/// spread over one layer: `floor(p/m)` each, the remainder going to the
/// first graphs, and one each when there are more graphs than threads.
pub fn distribute_threads(p: usize, m: usize, j: usize) -> Result<usize> {
    if p == 0 || m == 0 {
        return Err(Error::InvalidArgument("p and m must be at least 1".into()));
    }
    if j == 0 || j > m {
        return Err(Error::InvalidArgument(format!("graph index {j} outside [1, {m}]")));
    }
    Ok(share(p, m, j))
}

pub(crate) fn share(p: usize, m: usize, j: usize) -> usize {
    if p >= m {
        let base = p / m;
        base + usize::from(j - 1 < p - base * m)
    } else {
        1
    }
}

/// A subgraph waiting to be split, with everything needed to place its
/// blocks in the final mapping.
#[derive(Clone, Debug)]
pub struct PartitionTask {
    pub graph: Graph,
    /// Root-graph id of every local vertex.
    pub vertices: Vec<usize>,
    /// Levels left below this task; the root has depth `l`, leaves 0.
    pub depth: usize,
    /// First PE owned by this task.
    pub block_offset: usize,
    pub seed: u64,
}

/// Measurements of one multisection run.
#[derive(Clone, Debug)]
pub struct RunStats {
    pub wall_time: Duration,
    /// Number of partition calls per depth (index = depth, 0 unused).
    pub partition_calls_per_depth: Vec<usize>,
    pub calls: Vec<CallRecord>,
    pub comm_cost: u64,
    pub edge_cut: u64,
    pub balance: BalanceReport,
    /// Largest sum of budgets of simultaneously running partition calls.
    pub max_active_threads: usize,
    pub max_concurrent_calls: usize,
    /// Calls whose subgraph was heavier than its worst-case budget.
    pub balance_risks: usize,
    pub layers: Vec<LayerTrace>,
    /// Idle threads and queued graphs when the queue or nb-layer strategy
    /// terminated.
    pub final_idle: Option<usize>,
    pub final_queue_len: Option<usize>,
}

/// Shared, read-only state of one run plus its instrumentation.
pub(crate) struct Driver<'a> {
    pub hierarchy: &'a Hierarchy,
    pub eps: &'a Rational,
    pub cfg: &'a PartitionConfig,
    pub threads: usize,
    pub total: u64,
    pub probe: Probe,
    error: Mutex<Option<Error>>,
}

impl<'a> Driver<'a> {
    fn new(hierarchy: &'a Hierarchy, eps: &'a Rational, cfg: &'a PartitionConfig, threads: usize, total: u64) -> Self {
        Driver { hierarchy, eps, cfg, threads, total, probe: Probe::default(), error: Mutex::new(None) }
    }

    pub fn failed(&self) -> bool {
        self.error.lock().unwrap().is_some()
    }

    pub fn record_error(&self, e: Error) {
        let mut slot = self.error.lock().unwrap();
        if slot.is_none() {
            *slot = Some(e);
        }
    }

    /// Splits `task` into its `a_depth` children using `budget` threads.
    /// After an earlier failure this returns no children, which drains every
    /// strategy quickly.
    pub fn split(&self, task: &PartitionTask, budget: usize) -> Vec<PartitionTask> {
        if self.failed() {
            return Vec::new();
        }
        match self.try_split(task, budget) {
            Ok(children) => children,
            Err(e) => {
                self.record_error(e);
                Vec::new()
            }
        }
    }

    fn try_split(&self, task: &PartitionTask, budget: usize) -> Result<Vec<PartitionTask>> {
        let depth = task.depth;
        if depth == 0 {
            return Err(Error::Invariant("leaf tasks are never partitioned".into()));
        }
        let a = self.hierarchy.arity(depth);
        let child_span = self.hierarchy.prefix(depth - 1);
        let graph = &task.graph;
        let sub_total = graph.total_weight();

        let blocks: Vec<usize> = if graph.n() < a || sub_total == 0 {
            // Too few vertices (or no weight) to need a partitioner.
            (0..graph.n()).map(|v| v % a).collect()
        } else {
            let k = self.hierarchy.k() as u64;
            let k_sub = self.hierarchy.prefix(depth) as u64;
            let imbalance = adaptive_epsilon(self.eps, k, self.total, k_sub, sub_total, depth as u32)?;
            if imbalance.balance_risk {
                self.probe.balance_risk();
            }
            let _guard = self.probe.enter(CallRecord { depth, block_offset: task.block_offset, budget });
            partition(graph, a, &imbalance.eps, budget, self.cfg, task.seed)?.block_ids
        };

        Ok(graph
            .split_blocks(&blocks, a)
            .into_iter()
            .enumerate()
            .map(|(b, part)| PartitionTask {
                vertices: part.local_to_global.iter().map(|&v| task.vertices[v]).collect(),
                graph: part.subgraph,
                depth: depth - 1,
                block_offset: task.block_offset + b * child_span,
                seed: split_seed(task.seed, b),
            })
            .collect())
    }

    fn take_error(&self) -> Option<Error> {
        self.error.lock().unwrap().take()
    }
}

/// What a strategy returns: the leaf tasks plus strategy-specific final state.
pub(crate) struct Outcome {
    pub leaves: Vec<PartitionTask>,
    pub final_idle: Option<usize>,
    pub final_queue_len: Option<usize>,
}

/// Full configuration of a multisection run.
#[derive(Clone, Debug)]
pub struct Multisection {
    pub hierarchy: Hierarchy,
    pub eps: Rational,
    pub threads: usize,
    pub strategy: Strategy,
    pub config: PartitionConfig,
    pub seed: u64,
    pub queue_order: QueueOrder,
}

impl Multisection {
    pub fn new(
        hierarchy: Hierarchy,
        eps: Rational,
        threads: usize,
        strategy: Strategy,
        config: PartitionConfig,
        seed: u64,
    ) -> Self {
        Multisection { hierarchy, eps, threads, strategy, config, seed, queue_order: QueueOrder::default() }
    }

    pub fn run(&self, graph: &Graph) -> Result<(Mapping, RunStats)> {
        let start = Instant::now();
        if self.threads == 0 {
            return Err(Error::InvalidArgument("thread count must be at least 1".into()));
        }
        if self.eps < Rational::from_integer(0.into()) {
            return Err(Error::InvalidArgument("imbalance must be non-negative".into()));
        }
        self.config.validate()?;
        let total = graph.total_weight();
        if total == 0 {
            return Err(Error::ZeroWeight);
        }
        let h = &self.hierarchy;
        let driver = Driver::new(h, &self.eps, &self.config, self.threads, total);
        let root = PartitionTask {
            graph: graph.clone(),
            vertices: (0..graph.n()).collect(),
            depth: h.levels(),
            block_offset: 0,
            seed: mix64(self.seed),
        };
        let outcome = match self.strategy {
            Strategy::Naive => naive::run(&driver, root),
            Strategy::Layer => layer::run(&driver, root),
            Strategy::Queue => queue::run(&driver, root, self.queue_order),
            Strategy::NbLayer => nb_layer::run(&driver, root),
        };
        if let Some(e) = driver.take_error() {
            return Err(e);
        }
        let mapping = assemble(graph.n(), h.k(), &outcome.leaves)?;

        let j = comm_cost(graph, h, &mapping)?;
        let edge_cut = graph.edge_cut(mapping.assignment());
        let balance = check_balance(graph, mapping.assignment(), h.k(), &self.eps)?;
        let calls = driver.probe.calls();
        let mut per_depth = vec![0usize; h.levels() + 1];
        for c in &calls {
            per_depth[c.depth] += 1;
        }
        let stats = RunStats {
            wall_time: start.elapsed().max(Duration::from_nanos(1)),
            partition_calls_per_depth: per_depth,
            calls,
            comm_cost: j,
            edge_cut,
            balance,
            max_active_threads: driver.probe.max_active_threads(),
            max_concurrent_calls: driver.probe.max_active_calls(),
            balance_risks: driver.probe.balance_risks(),
            layers: driver.probe.layers(),
            final_idle: outcome.final_idle,
            final_queue_len: outcome.final_queue_len,
        };
        Ok((mapping, stats))
    }
}

/// Maps `graph` onto `hierarchy` with `p` threads and the given strategy.
pub fn map_hierarchical(
    graph: &Graph,
    hierarchy: &Hierarchy,
    eps: &Rational,
    p: usize,
    strategy: Strategy,
    cfg: &PartitionConfig,
    seed: u64,
) -> Result<(Mapping, RunStats)> {
    Multisection::new(hierarchy.clone(), eps.clone(), p, strategy, cfg.clone(), seed).run(graph)
}

/// Turns leaf tasks into the final mapping, checking that the leaves own
/// every PE exactly once and every vertex exactly once.
fn assemble(n: usize, k: usize, leaves: &[PartitionTask]) -> Result<Mapping> {
    let mut offsets: Vec<usize> = leaves.iter().map(|t| t.block_offset).collect();
    offsets.sort_unstable();
    if offsets.len() != k || offsets.iter().enumerate().any(|(i, &o)| i != o) {
        return Err(Error::Invariant(format!("{} leaves do not cover PEs 0..{k} exactly once", leaves.len())));
    }
    const UNSET: usize = usize::MAX;
    let mut assignment = vec![UNSET; n];
    for leaf in leaves {
        if leaf.depth != 0 {
            return Err(Error::Invariant("non-leaf task in the solution set".into()));
        }
        for &v in &leaf.vertices {
            if assignment[v] != UNSET {
                return Err(Error::Invariant(format!("vertex {v} assigned twice")));
            }
            assignment[v] = leaf.block_offset;
        }
    }
    if assignment.contains(&UNSET) {
        return Err(Error::Invariant("vertex left unassigned".into()));
    }
    Mapping::new(assignment, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::ratio::parse_ratio;
    use crate::topology::parse_hierarchy;

    #[test]
    fn distribute_examples() {
        let shares: Vec<_> = (1..=3).map(|j| distribute_threads(80, 3, j).unwrap()).collect();
        assert_eq!(shares, vec![27, 27, 26]);
        assert!((1..=8).all(|j| distribute_threads(4, 8, j).unwrap() == 1));
        assert!((1..=6).all(|j| distribute_threads(6, 6, j).unwrap() == 1));
        assert!(distribute_threads(4, 3, 0).is_err());
        assert!(distribute_threads(4, 3, 4).is_err());
        assert!(distribute_threads(0, 3, 1).is_err());
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert_eq!("nb_layer".parse::<Strategy>().unwrap(), Strategy::NbLayer);
        assert!("greedy".parse::<Strategy>().is_err());
    }

    #[test]
    fn single_level_is_one_call_with_plain_eps() {
        let g = generators::grid(6, 6);
        let h = parse_hierarchy("4", "1").unwrap();
        let eps = parse_ratio("0.03").unwrap();
        let (m, stats) = map_hierarchical(&g, &h, &eps, 1, Strategy::Naive, &PartitionConfig::default(), 5).unwrap();
        assert_eq!(stats.partition_calls_per_depth, vec![0, 1]);
        // with one level the rescaled imbalance equals eps, so the call is
        // bound by the global L_max
        assert!(stats.balance.is_balanced);
        assert_eq!(m.len(), 36);
    }

    #[test]
    fn more_pes_than_vertices() {
        let g = generators::path(3);
        let h = parse_hierarchy("2:2", "1:10").unwrap();
        let eps = parse_ratio("0.03").unwrap();
        for s in Strategy::ALL {
            let (m, _) = map_hierarchical(&g, &h, &eps, 2, s, &PartitionConfig::default(), 1).unwrap();
            let mut pes = m.into_inner();
            pes.sort_unstable();
            pes.dedup();
            assert_eq!(pes.len(), 3, "{s}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let h = parse_hierarchy("2", "1").unwrap();
        let eps = parse_ratio("0.03").unwrap();
        let cfg = PartitionConfig::default();
        let weightless = Graph::from_edges(vec![0, 0], &[]).unwrap();
        assert_eq!(
            map_hierarchical(&weightless, &h, &eps, 1, Strategy::Layer, &cfg, 1).unwrap_err(),
            Error::ZeroWeight
        );
        let g = generators::path(4);
        assert!(map_hierarchical(&g, &h, &eps, 0, Strategy::Layer, &cfg, 1).is_err());
        let negative = parse_ratio("-0.5").unwrap();
        assert!(map_hierarchical(&g, &h, &negative, 1, Strategy::Layer, &cfg, 1).is_err());
    }

    #[test]
    fn children_spans() {
        let h = parse_hierarchy("4:2:3", "1:10:100").unwrap();
        let eps = parse_ratio("0.03").unwrap();
        let cfg = PartitionConfig::default();
        let driver = Driver::new(&h, &eps, &cfg, 1, 48);
        let g = generators::grid(6, 8);
        let root = PartitionTask { graph: g.clone(), vertices: (0..48).collect(), depth: 3, block_offset: 0, seed: 3 };
        let children = driver.split(&root, 1);
        assert_eq!(children.iter().map(|c| c.block_offset).collect::<Vec<_>>(), vec![0, 8, 16]);
        let grandchildren = driver.split(&children[1], 1);
        assert_eq!(grandchildren.iter().map(|c| c.block_offset).collect::<Vec<_>>(), vec![8, 12]);
        assert!(grandchildren.iter().all(|c| c.depth == 1));
        let total: usize = children.iter().map(|c| c.vertices.len()).sum();
        assert_eq!(total, 48);
    }
}
