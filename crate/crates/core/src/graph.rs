//! Weighted undirected graphs in compressed adjacency form.
//!
//! Every undirected edge `{u, v}` is stored twice, once in the neighbor list
//! of `u` and once in the list of `v`, with the same weight. The same type is
//! used for task graphs and for communication graphs, where an edge weight is
//! the communication volume between two tasks.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    edge_weights: Vec<u64>,
    vertex_weights: Vec<u64>,
}

impl Default for Graph {
    fn default() -> Self {
        Graph { offsets: vec![0], targets: Vec::new(), edge_weights: Vec::new(), vertex_weights: Vec::new() }
    }
}

/// A subgraph induced by one block together with the ids its vertices have
/// in the parent graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgraphExtraction {
    pub subgraph: Graph,
    pub local_to_global: Vec<usize>,
}

impl Graph {
    /// Builds a graph from CSR arrays, checking every structural invariant.
    pub fn from_csr(
        offsets: Vec<usize>,
        targets: Vec<usize>,
        edge_weights: Vec<u64>,
        vertex_weights: Vec<u64>,
    ) -> Result<Self> {
        let n = vertex_weights.len();
        if offsets.len() != n + 1 {
            return Err(Error::Graph(format!("expected {} offsets, got {}", n + 1, offsets.len())));
        }
        if offsets[0] != 0 || offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Graph("offsets must start at 0 and be non-decreasing".into()));
        }
        if offsets[n] != targets.len() || targets.len() != edge_weights.len() {
            return Err(Error::Graph("offsets, targets and edge weights disagree".into()));
        }
        let graph = Graph { offsets, targets, edge_weights, vertex_weights };
        let mut forward = Vec::with_capacity(graph.targets.len());
        let mut backward = Vec::with_capacity(graph.targets.len());
        for u in 0..n {
            for (v, w) in graph.neighbors(u) {
                if v >= n {
                    return Err(Error::Graph(format!("neighbor {v} of {u} out of range")));
                }
                if v == u {
                    return Err(Error::Graph(format!("self-loop at vertex {u}")));
                }
                forward.push((u, v, w));
                backward.push((v, u, w));
            }
        }
        forward.sort_unstable();
        backward.sort_unstable();
        if forward != backward {
            return Err(Error::Graph("adjacency is not symmetric".into()));
        }
        Ok(graph)
    }

    /// Builds a graph from an undirected edge list. Parallel edges are merged
    /// by adding their weights; self-loops are dropped.
    pub fn from_edges(vertex_weights: Vec<u64>, edges: &[(usize, usize, u64)]) -> Result<Self> {
        let n = vertex_weights.len();
        let mut adjacency: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); n];
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::Graph(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                continue;
            }
            *adjacency[u].entry(v).or_insert(0) += w;
            *adjacency[v].entry(u).or_insert(0) += w;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut edge_weights = Vec::new();
        offsets.push(0);
        for list in adjacency {
            for (v, w) in list {
                targets.push(v);
                edge_weights.push(w);
            }
            offsets.push(targets.len());
        }
        Ok(Graph { offsets, targets, edge_weights, vertex_weights })
    }

    /// Unit vertex weights, unit edge weights.
    pub fn unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let edges: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1)).collect();
        Self::from_edges(vec![1; n], &edges)
    }

    pub(crate) fn from_parts_unchecked(
        offsets: Vec<usize>,
        targets: Vec<usize>,
        edge_weights: Vec<u64>,
        vertex_weights: Vec<u64>,
    ) -> Self {
        debug_assert_eq!(offsets.len(), vertex_weights.len() + 1);
        Graph { offsets, targets, edge_weights, vertex_weights }
    }

    pub fn n(&self) -> usize {
        self.vertex_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_weights.is_empty()
    }

    /// Number of stored directed entries (twice the undirected edge count).
    pub fn directed_entries(&self) -> usize {
        self.targets.len()
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()].iter().copied().zip(self.edge_weights[range].iter().copied())
    }

    pub fn vertex_weight(&self, v: usize) -> u64 {
        self.vertex_weights[v]
    }

    pub fn vertex_weights(&self) -> &[u64] {
        &self.vertex_weights
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn edge_weights(&self) -> &[u64] {
        &self.edge_weights
    }

    /// `c(V)`, the sum of all vertex weights.
    pub fn total_weight(&self) -> u64 {
        self.vertex_weights.iter().sum()
    }

    /// Sum of undirected edge weights.
    pub fn total_edge_weight(&self) -> u64 {
        self.edge_weights.iter().sum::<u64>() / 2
    }

    /// Total weight of undirected edges whose endpoints lie in different
    /// blocks. Each edge is counted once.
    pub fn edge_cut(&self, blocks: &[usize]) -> u64 {
        assert_eq!(blocks.len(), self.n(), "block assignment length");
        let mut directed = 0;
        for u in 0..self.n() {
            for (v, w) in self.neighbors(u) {
                if blocks[u] != blocks[v] {
                    directed += w;
                }
            }
        }
        directed / 2
    }

    /// Induced subgraph on the vertices assigned to `target`, in ascending
    /// vertex order. Edges leaving the block are dropped.
    pub fn extract_subgraph(&self, blocks: &[usize], target: usize) -> Result<SubgraphExtraction> {
        if blocks.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: blocks.len() });
        }
        let local_to_global: Vec<usize> = (0..self.n()).filter(|&v| blocks[v] == target).collect();
        if local_to_global.is_empty() {
            return Err(Error::MissingBlock(target));
        }
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in local_to_global.iter().enumerate() {
            local[v] = i;
        }
        Ok(SubgraphExtraction { subgraph: self.induced(&local_to_global, &local, blocks, target), local_to_global })
    }

    /// Splits the graph into one induced subgraph per block `0..num_blocks`
    /// in a single sweep. Blocks without vertices yield empty graphs.
    pub fn split_blocks(&self, blocks: &[usize], num_blocks: usize) -> Vec<SubgraphExtraction> {
        assert_eq!(blocks.len(), self.n());
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); num_blocks];
        let mut local = vec![0usize; self.n()];
        for (v, &b) in blocks.iter().enumerate() {
            local[v] = members[b].len();
            members[b].push(v);
        }
        members
            .into_iter()
            .enumerate()
            .map(|(b, local_to_global)| SubgraphExtraction {
                subgraph: self.induced(&local_to_global, &local, blocks, b),
                local_to_global,
            })
            .collect()
    }

    fn induced(&self, vertices: &[usize], local: &[usize], blocks: &[usize], target: usize) -> Graph {
        let mut offsets = Vec::with_capacity(vertices.len() + 1);
        let mut targets = Vec::new();
        let mut edge_weights = Vec::new();
        let mut vertex_weights = Vec::with_capacity(vertices.len());
        offsets.push(0);
        for &v in vertices {
            vertex_weights.push(self.vertex_weights[v]);
            for (u, w) in self.neighbors(v) {
                if blocks[u] == target {
                    targets.push(local[u]);
                    edge_weights.push(w);
                }
            }
            offsets.push(targets.len());
        }
        Graph { offsets, targets, edge_weights, vertex_weights }
    }

    /// Serializes to METIS text with both vertex and edge weights (fmt 11).
    pub fn to_metis(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} 11", self.n(), self.num_edges());
        for v in 0..self.n() {
            let _ = write!(out, "{}", self.vertex_weights[v]);
            for (u, w) in self.neighbors(v) {
                let _ = write!(out, " {} {}", u + 1, w);
            }
            out.push('\n');
        }
        out
    }
}

/// Reads a METIS graph from any reader.
pub fn read_metis<R: Read>(mut reader: R) -> Result<Graph> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_metis(&text)
}

/// Parses the METIS ASCII graph format.
///
/// The header is `n m [fmt [ncon]]`. The last digit of `fmt` enables edge
/// weights, the tens digit enables vertex weights. Lines starting with `%`
/// are comments; an empty line is a vertex without neighbors.
pub fn parse_metis(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim_start().starts_with('%')).map(|(i, l)| (i + 1, l));
    let err = |line: usize, msg: &str| Error::Metis { line, msg: msg.to_string() };

    let (header_line, header) = loop {
        match lines.next() {
            Some((i, l)) if !l.trim().is_empty() => break (i, l),
            Some(_) => continue,
            None => return Err(err(0, "missing header")),
        }
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if !(2..=4).contains(&fields.len()) {
        return Err(err(header_line, "header must be `n m [fmt [ncon]]`"));
    }
    let n: usize = fields[0].parse().map_err(|_| err(header_line, "bad vertex count"))?;
    let m: usize = fields[1].parse().map_err(|_| err(header_line, "bad edge count"))?;
    let (has_vertex_weights, has_edge_weights) = match fields.get(2) {
        None => (false, false),
        Some(fmt) => {
            let fmt = fmt.trim_start_matches('0');
            match fmt {
                "" => (false, false),
                "1" => (false, true),
                "10" => (true, false),
                "11" => (true, true),
                _ => return Err(err(header_line, "unsupported fmt (expected 0, 1, 10 or 11)")),
            }
        }
    };
    if let Some(ncon) = fields.get(3) {
        match ncon.parse::<usize>() {
            Ok(1) => {}
            Ok(_) if !has_vertex_weights => {
                return Err(err(header_line, "ncon given without vertex weights"));
            }
            _ => return Err(err(header_line, "only a single vertex constraint is supported")),
        }
    }

    let mut vertex_weights = Vec::with_capacity(n);
    let mut entries: Vec<(usize, usize, u64)> = Vec::with_capacity(2 * m);
    let mut self_loops = 0usize;
    for u in 0..n {
        let (line_no, line) =
            lines.next().ok_or_else(|| err(header_line, &format!("expected {n} adjacency lines, found {u}")))?;
        let mut tokens = line
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| err(line_no, &format!("`{t}` is not an integer"))));
        let weight = if has_vertex_weights {
            let w = tokens.next().ok_or_else(|| err(line_no, "missing vertex weight"))??;
            if w < 0 {
                return Err(err(line_no, "negative vertex weight"));
            }
            w as u64
        } else {
            1
        };
        vertex_weights.push(weight);
        while let Some(neighbor) = tokens.next() {
            let neighbor = neighbor?;
            if neighbor < 1 || neighbor as usize > n {
                return Err(err(line_no, &format!("neighbor {neighbor} outside [1, {n}]")));
            }
            let w = if has_edge_weights {
                let w = tokens.next().ok_or_else(|| err(line_no, "missing edge weight"))??;
                if w < 0 {
                    return Err(err(line_no, "negative edge weight"));
                }
                w as u64
            } else {
                1
            };
            let v = neighbor as usize - 1;
            if v == u {
                self_loops += 1;
            } else {
                entries.push((u, v, w));
            }
        }
    }
    if let Some((line_no, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(err(line_no, &format!("more than {n} adjacency lines")));
    }

    let mut forward = entries.clone();
    let mut backward: Vec<_> = entries.iter().map(|&(u, v, w)| (v, u, w)).collect();
    forward.sort_unstable();
    backward.sort_unstable();
    if forward != backward {
        let bad = forward.iter().find(|e| backward.binary_search(e).is_err()).copied().unwrap_or_default();
        return Err(err(
            0,
            &format!("asymmetric adjacency: edge {} -> {} has no matching reverse entry", bad.0 + 1, bad.1 + 1),
        ));
    }
    // METIS files disagree on whether self-loops count towards m.
    let undirected = entries.len() / 2;
    if undirected != m && undirected + self_loops != m {
        return Err(err(header_line, &format!("header declares {m} edges, found {undirected}")));
    }

    let mut offsets = vec![0usize; n + 1];
    for &(u, _, _) in &entries {
        offsets[u + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    // `entries` is grouped by source vertex in input order already.
    let targets = entries.iter().map(|e| e.1).collect();
    let edge_weights = entries.iter().map(|e| e.2).collect();
    Ok(Graph { offsets, targets, edge_weights, vertex_weights })
}
