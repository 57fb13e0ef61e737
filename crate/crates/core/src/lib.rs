//! Maps weighted task graphs onto hierarchical hardware topologies.
//!
//! The communication graph is split along the machine hierarchy
//! `a_1:...:a_l` by hierarchical multisection: first into `a_l` blocks, each
//! of those into `a_{l-1}` blocks, and so on until there is one block per PE.
//! With PEs numbered depth-first, block `i` simply runs on PE `i`.
//!
//! The crate is organized as
//!
//! * [`graph`]: compressed adjacency graphs, METIS input, edge cuts;
//! * [`topology`]: hierarchies, PE distances, balance, communication cost
//!   and the adaptive imbalance rescaling for nested partition calls;
//! * [`partitioner`]: the multilevel partitioner used for every split;
//! * [`multisection`]: the driver and its four thread distribution
//!   strategies;
//! * [`eval`]: exhaustive oracle, benchmarking records and performance
//!   profiles.
//!
//! ```
//! use hiermap::{generators, map_hierarchical, parse_hierarchy, parse_ratio};
//! use hiermap::{PartitionConfig, Strategy};
//!
//! let graph = generators::grid(8, 8);
//! let hierarchy = parse_hierarchy("4:2", "1:10").unwrap();
//! let eps = parse_ratio("0.03").unwrap();
//! let (mapping, stats) =
//!     map_hierarchical(&graph, &hierarchy, &eps, 2, Strategy::NbLayer, &PartitionConfig::default(), 1)
//!         .unwrap();
//! assert_eq!(mapping.len(), 64);
//! assert!(stats.balance.is_balanced);
//! ```

#![forbid(unsafe_code)]

pub mod error;
pub mod eval;
pub mod generators;
pub mod graph;
pub mod multisection;
pub mod partitioner;
pub mod ratio;
pub mod seed;
pub mod topology;

pub use error::{Error, Result};
pub use graph::{parse_metis, read_metis, Graph, SubgraphExtraction};
pub use multisection::{distribute_threads, map_hierarchical, RunStats, Strategy};
pub use partitioner::{partition, PartitionConfig, PartitionResult, Preset};
pub use ratio::{parse_ratio, Rational};
pub use topology::{
    adaptive_epsilon, check_balance, comm_cost, compute_l_max, parse_hierarchy, AdaptiveImbalance, BalanceReport,
    Hierarchy, Mapping,
};

// Book chapters are compiled as doc-tests so their snippets stay in sync.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/cost_model.md")]
    mod cost_model {}
    #[doc = include_str!("../../../book/src/adaptive_imbalance.md")]
    mod adaptive_imbalance {}
    #[doc = include_str!("../../../book/src/partitioner.md")]
    mod partitioner {}
    #[doc = include_str!("../../../book/src/strategies.md")]
    mod strategies {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
}
