//! Directed network growth under mixed random/preferential attachment.
//!
//! Each step adds one node with `m` outgoing edges and `m_hat` incoming
//! response edges. A target `v` is drawn with probability
//! `alpha * k(v) / e + (1 - alpha) / n`, evaluated on the network before the
//! step; response sources are drawn uniformly. The in-degree of every
//! attachment target is logged together with the pre-step `(e, n)`.

mod log;
mod seed;

use std::io::Write;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use log::{AttachmentRecord, SampleLog};
pub use seed::{SeedReport, SeedSpec};

/// Seeded generator used for every simulation.
pub type ModelRng = ChaCha8Rng;

/// Generator for a single run.
pub fn rng_from_seed(seed: u64) -> ModelRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `run` of the generator seeded with `seed`; ensemble
/// members use one stream each, so results do not depend on scheduling.
pub fn rng_for_run(seed: u64, run: u64) -> ModelRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Outgoing attachment edges per new node.
    pub m: usize,
    /// Incoming response edges per new node.
    pub m_hat: usize,
    /// Weight of preferential attachment.
    pub alpha: f64,
}

impl ModelParams {
    pub fn new(m: usize, m_hat: usize, alpha: f64) -> Result<Self> {
        let p = Self { m, m_hat, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Domain("m must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Domain(format!("alpha = {} is not in [0, 1]", self.alpha)));
        }
        Ok(())
    }
}

/// Probability that one attachment edge lands on a node of in-degree `k`
/// when the network has `e_prev` edges and `n_prev` nodes.
pub fn attachment_probability(k: u64, e_prev: u64, n_prev: u64, alpha: f64) -> Result<f64> {
    if e_prev == 0 || n_prev == 0 {
        return Err(Error::Domain(format!(
            "attachment probability needs e_prev > 0 and n_prev > 0 (got e_prev={e_prev}, n_prev={n_prev})"
        )));
    }
    if k > e_prev {
        return Err(Error::Domain(format!("in-degree {k} exceeds edge count {e_prev}")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} is not in [0, 1]")));
    }
    let uniform = 1.0 / n_prev as f64;
    Ok(alpha * (k as f64 / e_prev as f64 - uniform) + uniform)
}

/// What to do when the network has fewer nodes than a step needs distinct
/// targets (`m`) or sources (`m_hat`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShortfallPolicy {
    /// Fail with a structural error.
    Reject,
    /// Draw that step's endpoints independently with replacement, which may
    /// create parallel edges. Count identities are preserved.
    #[default]
    Replace,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GrowthOptions {
    pub shortfall: ShortfallPolicy,
    /// Keep the full edge list (needed only for graph export).
    pub keep_edges: bool,
}

const REJECTION_TRIES: usize = 64;

/// Growing network state: in-degree table, node and edge counts, time index.
#[derive(Clone, Debug)]
pub struct GrowingNetwork {
    in_degree: Vec<u32>,
    /// Head of every edge; drawing a uniform entry is a preferential draw.
    heads: Vec<u32>,
    edges: Option<Vec<(u32, u32)>>,
    time: u64,
}

impl GrowingNetwork {
    pub fn from_seed(seed: &SeedSpec, keep_edges: bool) -> Self {
        let in_degree = seed.in_degrees();
        let heads = seed.edges().iter().map(|&(_, v)| v).collect();
        Self {
            in_degree,
            heads,
            edges: keep_edges.then(|| seed.edges().to_vec()),
            time: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.in_degree.len()
    }

    pub fn edge_count(&self) -> usize {
        self.heads.len()
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn in_degree(&self, v: usize) -> u32 {
        self.in_degree[v]
    }

    pub fn in_degrees(&self) -> &[u32] {
        &self.in_degree
    }

    pub fn edges(&self) -> Option<&[(u32, u32)]> {
        self.edges.as_deref()
    }

    /// Per-node attachment probabilities for the next step.
    pub fn attachment_weights(&self, alpha: f64) -> Vec<f64> {
        let e = self.edge_count() as f64;
        let n = self.node_count() as f64;
        self.in_degree
            .iter()
            .map(|&k| alpha * k as f64 / e + (1.0 - alpha) / n)
            .collect()
    }

    /// Writes the edge list as `src dst` lines. Requires `keep_edges`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        let edges = self
            .edges
            .as_ref()
            .ok_or_else(|| Error::Domain("edge list was not kept for this network".into()))?;
        for &(u, v) in edges {
            writeln!(out, "{u} {v}")?;
        }
        out.flush()?;
        Ok(())
    }

    /// Adds one node. Returns the attachment records of the step, one per
    /// target, each referencing the pre-step snapshot.
    pub fn grow_step<R: Rng + ?Sized>(
        &mut self,
        params: &ModelParams,
        shortfall: ShortfallPolicy,
        rng: &mut R,
    ) -> Result<Vec<AttachmentRecord>> {
        let n = self.node_count();
        let e = self.edge_count();
        if e == 0 {
            return Err(Error::Structural("network has no edges".into()));
        }
        if n >= u32::MAX as usize {
            return Err(Error::Structural("node index space exhausted".into()));
        }
        let targets = self.draw_targets(params, shortfall, rng)?;
        let sources = self.draw_sources(params.m_hat, shortfall, rng)?;

        let records = targets
            .iter()
            .map(|&v| AttachmentRecord::new(self.in_degree[v as usize] as u64, e as u64, n as u64))
            .collect();

        let new = n as u32;
        self.in_degree.push(0);
        for &v in &targets {
            self.in_degree[v as usize] += 1;
            self.heads.push(v);
        }
        for _ in &sources {
            self.in_degree[new as usize] += 1;
            self.heads.push(new);
        }
        if let Some(edges) = self.edges.as_mut() {
            edges.extend(targets.iter().map(|&v| (new, v)));
            edges.extend(sources.iter().map(|&u| (u, new)));
        }
        self.time += 1;
        Ok(records)
    }

    fn draw_targets<R: Rng + ?Sized>(
        &self,
        params: &ModelParams,
        shortfall: ShortfallPolicy,
        rng: &mut R,
    ) -> Result<Vec<u32>> {
        let n = self.node_count();
        let m = params.m;
        let alpha = params.alpha;
        if n < m {
            if shortfall == ShortfallPolicy::Reject {
                return Err(Error::Structural(format!(
                    "{n} candidate target(s) but m = {m} distinct targets are required"
                )));
            }
            return Ok((0..m)
                .map(|_| {
                    if rng.random::<f64>() < alpha {
                        self.heads[rng.random_range(0..self.heads.len())]
                    } else {
                        rng.random_range(0..n as u32)
                    }
                })
                .collect());
        }

        // Sequential draws without replacement from the weights of the
        // pre-step snapshot, renormalized over the nodes not yet chosen.
        let e = self.edge_count() as u64;
        let mut chosen: Vec<u32> = Vec::with_capacity(m);
        let mut chosen_in_degree = 0u64;
        for _ in 0..m {
            let pref = alpha * (e - chosen_in_degree) as f64 / e as f64;
            let unif = (1.0 - alpha) * (n - chosen.len()) as f64 / n as f64;
            let total = pref + unif;
            if !(total > 0.0) {
                return Err(Error::Structural(format!(
                    "only {} of the m = {m} required targets have positive attachment probability",
                    chosen.len()
                )));
            }
            let v = if rng.random::<f64>() * total < pref {
                self.sample_preferential(&chosen, e - chosen_in_degree, rng)
            } else {
                self.sample_uniform(&chosen, rng)
            };
            chosen_in_degree += self.in_degree[v as usize] as u64;
            chosen.push(v);
        }
        Ok(chosen)
    }

    /// A node not in `chosen`, with probability proportional to in-degree.
    fn sample_preferential<R: Rng + ?Sized>(&self, chosen: &[u32], remaining: u64, rng: &mut R) -> u32 {
        for _ in 0..REJECTION_TRIES {
            let v = self.heads[rng.random_range(0..self.heads.len())];
            if !chosen.contains(&v) {
                return v;
            }
        }
        let mut r = rng.random_range(0..remaining);
        for (v, &k) in self.in_degree.iter().enumerate() {
            let v = v as u32;
            if chosen.contains(&v) {
                continue;
            }
            if r < k as u64 {
                return v;
            }
            r -= k as u64;
        }
        unreachable!("remaining in-degree mass is positive")
    }

    /// A node not in `chosen`, uniformly.
    fn sample_uniform<R: Rng + ?Sized>(&self, chosen: &[u32], rng: &mut R) -> u32 {
        let n = self.node_count() as u32;
        for _ in 0..REJECTION_TRIES {
            let v = rng.random_range(0..n);
            if !chosen.contains(&v) {
                return v;
            }
        }
        let mut r = rng.random_range(0..n as usize - chosen.len());
        for v in 0..n {
            if chosen.contains(&v) {
                continue;
            }
            if r == 0 {
                return v;
            }
            r -= 1;
        }
        unreachable!("at least one node is not chosen")
    }

    fn draw_sources<R: Rng + ?Sized>(&self, m_hat: usize, shortfall: ShortfallPolicy, rng: &mut R) -> Result<Vec<u32>> {
        let n = self.node_count();
        if m_hat <= n {
            return Ok(index::sample(rng, n, m_hat).into_iter().map(|v| v as u32).collect());
        }
        match shortfall {
            ShortfallPolicy::Reject => Err(Error::Structural(format!(
                "{n} candidate source(s) but m_hat = {m_hat} distinct sources are required"
            ))),
            ShortfallPolicy::Replace => Ok((0..m_hat).map(|_| rng.random_range(0..n as u32)).collect()),
        }
    }
}

/// Result of [`grow_sequence`].
#[derive(Clone, Debug)]
pub struct Growth {
    pub network: GrowingNetwork,
    pub log: SampleLog,
    pub seed_report: SeedReport,
}

/// Grows `steps` nodes from `seed`.
pub fn grow_sequence<R: Rng + ?Sized>(
    seed: &SeedSpec,
    params: &ModelParams,
    steps: usize,
    options: GrowthOptions,
    rng: &mut R,
) -> Result<Growth> {
    params.validate()?;
    let seed_report = seed.validate(params)?;
    if seed_report.undersized && options.shortfall == ShortfallPolicy::Reject {
        return Err(Error::InvalidSeed(format!(
            "seed has {} node(s) but max(m, m_hat) = {}",
            seed.node_count(),
            params.m.max(params.m_hat)
        )));
    }
    let mut network = GrowingNetwork::from_seed(seed, options.keep_edges);
    let mut log = SampleLog::with_capacity(steps, steps * params.m);
    for _ in 0..steps {
        let records = network.grow_step(params, options.shortfall, rng)?;
        log.push_step(&records);
    }
    Ok(Growth {
        network,
        log,
        seed_report,
    })
}
