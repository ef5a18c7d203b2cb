//! Seed networks `G_0`.

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;

use crate::error::{Error, Result};

use super::ModelParams;

/// A seed network over dense node indices `0..node_count`, with optional
/// external labels (paper ids, file labels) for reporting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedSpec {
    labels: Vec<u64>,
    edges: Vec<(u32, u32)>,
}

/// Non-fatal findings about a seed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeedReport {
    pub zero_in_degree_nodes: usize,
    /// The seed has fewer than `max(m, m_hat)` nodes, so early steps cannot
    /// pick distinct targets (or sources).
    pub undersized: bool,
}

impl SeedReport {
    pub fn warnings(&self, params: &ModelParams, node_count: usize) -> Vec<String> {
        let mut out = Vec::new();
        if self.zero_in_degree_nodes > 0 {
            out.push(format!(
                "seed has {} node(s) with in-degree 0; their records give the likelihood a root at alpha = 1",
                self.zero_in_degree_nodes
            ));
        }
        if self.undersized {
            out.push(format!(
                "seed has {node_count} node(s) but max(m, m_hat) = {}; steps draw with replacement until the network is large enough",
                params.m.max(params.m_hat)
            ));
        }
        out
    }
}

impl SeedSpec {
    /// Builds a seed from `node_count` unlabeled nodes and an edge list over `0..node_count`.
    pub fn new(node_count: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        let labels = (0..node_count as u64).collect();
        Self::with_labels(labels, edges)
    }

    pub fn with_labels(labels: Vec<u64>, edges: Vec<(u32, u32)>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidSeed("seed has no nodes".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidSeed("too many seed nodes".into()));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidSeed(format!("edge ({u}, {v}) references a node outside 0..{n}")));
            }
            if u == v {
                return Err(Error::InvalidSeed(format!("self-loop on node {}", labels[u as usize])));
            }
            if !seen.insert((u, v)) {
                return Err(Error::InvalidSeed(format!(
                    "duplicate edge ({}, {})",
                    labels[u as usize], labels[v as usize]
                )));
            }
        }
        Ok(Self { labels, edges })
    }

    /// The complete directed graph on `n` nodes (every ordered pair, no loops).
    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1));
        for u in 0..n as u32 {
            for v in 0..n as u32 {
                if u != v {
                    edges.push((u, v));
                }
            }
        }
        Self::new(n, edges)
    }

    /// Parses `complete:N` or reads an edge-list file.
    pub fn from_spec_str(spec: &str) -> Result<Self> {
        if let Some(n) = spec.strip_prefix("complete:") {
            let n: usize = n
                .trim()
                .parse()
                .map_err(|e| Error::Domain(format!("bad complete-graph size `{n}`: {e}")))?;
            return Self::complete(n);
        }
        let file = std::fs::File::open(spec)?;
        Self::read_edge_list(std::io::BufReader::new(file), spec)
    }

    /// Reads a seed edge list: one `src dst` pair per line, a single id on a
    /// line declares an isolated node, `#` starts a comment. Nodes are indexed
    /// in order of first appearance.
    pub fn read_edge_list<R: BufRead>(input: R, source_name: &str) -> Result<Self> {
        let mut index: BTreeMap<u64, u32> = BTreeMap::new();
        let mut labels = Vec::new();
        let mut edges = Vec::new();
        let mut intern = |id: u64, labels: &mut Vec<u64>| -> u32 {
            *index.entry(id).or_insert_with(|| {
                labels.push(id);
                (labels.len() - 1) as u32
            })
        };
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let ids: Vec<u64> = body
                .split_whitespace()
                .map(|t| t.parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::parse(source_name, i + 1, format!("bad node id: {e}")))?;
            match ids.as_slice() {
                [u] => {
                    intern(*u, &mut labels);
                }
                [u, v] => {
                    let a = intern(*u, &mut labels);
                    let b = intern(*v, &mut labels);
                    edges.push((a, b));
                }
                _ => return Err(Error::parse(source_name, i + 1, "expected `src dst` or a single node id")),
            }
        }
        Self::with_labels(labels, edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn in_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.node_count()];
        for &(_, v) in &self.edges {
            deg[v as usize] += 1;
        }
        deg
    }

    /// Checks the seed against the model parameters. Missing edges are an
    /// error (the preferential component needs `e_0 > 0`); zero in-degree
    /// nodes and undersized seeds are reported, not rejected.
    pub fn validate(&self, params: &ModelParams) -> Result<SeedReport> {
        if self.edges.is_empty() {
            return Err(Error::InvalidSeed("seed has no edges".into()));
        }
        let zero = self.in_degrees().iter().filter(|&&d| d == 0).count();
        Ok(SeedReport {
            zero_in_degree_nodes: zero,
            undersized: self.node_count() < params.m.max(params.m_hat),
        })
    }
}
