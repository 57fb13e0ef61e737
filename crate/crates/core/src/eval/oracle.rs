//! Exhaustive search for the optimal balanced mapping of tiny instances.
//!
//! Sibling subtrees of the hierarchy are interchangeable, so the search only
//! opens the lowest-numbered unused child of any hierarchy node. Used
//! children therefore always form a prefix, and one representative of every
//! symmetry class is visited. Branches are cut when the partial cost already
//! reaches the best complete cost or a block would exceed `L_max`.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ratio::Rational;
use crate::topology::{compute_l_max, Hierarchy, Mapping};

pub const MAX_ORACLE_VERTICES: usize = 14;
pub const MAX_ORACLE_PES: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// Optimal `J` (ordered-pair sum).
    pub cost: u64,
    pub mapping: Mapping,
}

struct Search<'a> {
    n: usize,
    k: usize,
    hierarchy: &'a Hierarchy,
    weights: Vec<u64>,
    comm: Vec<u64>,
    dist: Vec<u64>,
    l_max: u64,
    assign: Vec<usize>,
    load: Vec<u64>,
    /// used_children[level][node]: number of used children of a node at
    /// `level` (level 1 nodes are processors, their children are PEs).
    used_children: Vec<Vec<usize>>,
    /// occupancy[level][node]: vertices placed below a node at `level`.
    occupancy: Vec<Vec<usize>>,
    best_cost: u64,
    best: Option<Vec<usize>>,
}

impl Search<'_> {
    fn ancestor(&self, pe: usize, level: usize) -> usize {
        pe / self.hierarchy.prefix(level)
    }

    /// True if opening `pe` respects the lowest-unused-child rule on every level.
    fn canonical(&self, pe: usize) -> bool {
        let l = self.hierarchy.levels();
        (0..l).all(|level| {
            let node = self.ancestor(pe, level);
            let parent = self.ancestor(pe, level + 1);
            let index = node % self.hierarchy.arity(level + 1);
            index <= self.used_children[level + 1][parent]
        })
    }

    fn place(&mut self, v: usize, pe: usize, add: bool) {
        let l = self.hierarchy.levels();
        if add {
            self.assign[v] = pe;
            self.load[pe] += self.weights[v];
        } else {
            self.load[pe] -= self.weights[v];
        }
        for level in 0..l {
            let node = self.ancestor(pe, level);
            let parent = self.ancestor(pe, level + 1);
            if add {
                self.occupancy[level][node] += 1;
                if self.occupancy[level][node] == 1 {
                    self.used_children[level + 1][parent] += 1;
                }
            } else {
                self.occupancy[level][node] -= 1;
                if self.occupancy[level][node] == 0 {
                    self.used_children[level + 1][parent] -= 1;
                }
            }
        }
    }

    fn descend(&mut self, v: usize, cost: u64) {
        if cost >= self.best_cost {
            return;
        }
        if v == self.n {
            self.best_cost = cost;
            self.best = Some(self.assign.clone());
            return;
        }
        for pe in 0..self.k {
            if self.load[pe] + self.weights[v] > self.l_max || !self.canonical(pe) {
                continue;
            }
            let mut extra = 0u64;
            for u in 0..v {
                let c = self.comm[v * self.n + u];
                if c != 0 {
                    extra += 2 * c * self.dist[pe * self.k + self.assign[u]];
                }
            }
            self.place(v, pe, true);
            self.descend(v + 1, cost + extra);
            self.place(v, pe, false);
        }
    }
}

/// Minimum `J` over all `eps`-balanced mappings, with one optimal mapping.
pub fn optimal_mapping(graph: &Graph, hierarchy: &Hierarchy, eps: &Rational) -> Result<OracleResult> {
    let n = graph.n();
    let k = hierarchy.k();
    if n > MAX_ORACLE_VERTICES || k > MAX_ORACLE_PES {
        return Err(Error::Oracle(format!(
            "instance too large for exhaustive search (n = {n} > {MAX_ORACLE_VERTICES} or k = {k} > {MAX_ORACLE_PES})"
        )));
    }
    let mut comm = vec![0u64; n * n];
    for u in 0..n {
        for (v, w) in graph.neighbors(u) {
            comm[u * n + v] = w;
        }
    }
    let mut dist = vec![0u64; k * k];
    for x in 0..k {
        for y in 0..k {
            dist[x * k + y] = hierarchy.distance(x, y);
        }
    }
    let l = hierarchy.levels();
    let mut search = Search {
        n,
        k,
        hierarchy,
        weights: graph.vertex_weights().to_vec(),
        comm,
        dist,
        l_max: compute_l_max(graph.total_weight(), k as u64, eps),
        assign: vec![0; n],
        load: vec![0; k],
        used_children: (0..=l).map(|level| vec![0; k / hierarchy.prefix(level)]).collect(),
        occupancy: (0..=l).map(|level| vec![0; k / hierarchy.prefix(level)]).collect(),
        best_cost: u64::MAX,
        best: None,
    };
    search.descend(0, 0);
    match search.best {
        Some(assign) => Ok(OracleResult { cost: search.best_cost, mapping: Mapping::new(assign, k)? }),
        None => Err(Error::Oracle("no balanced assignment exists".into())),
    }
}
