//! In-degree distributions: the stationary limit, the finite-time expected
//! distribution, and empirical distributions of simulated or observed
//! networks.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::netmodel::{
    grow_sequence, rng_for_run, GrowingNetwork, GrowthOptions, ModelParams, SeedSpec,
};
use crate::numeric::CompensatedSum;

/// Limit of the expected in-degree pmf as the network grows, supported on
/// `k >= m_hat`.
///
/// Values are produced by the ratio recurrence from `P(m_hat)`, which stays
/// finite for every `k` (the equivalent Gamma-function forms overflow).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StationaryDistribution {
    params: ModelParams,
}

impl StationaryDistribution {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        if params.alpha == 1.0 && params.m_hat == 0 {
            return Err(Error::Unsupported(
                "alpha = 1 with m_hat = 0: new nodes start at in-degree 0 and never attract edges".into(),
            ));
        }
        Ok(Self { params })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Smallest in-degree in the support.
    pub fn support_start(&self) -> u64 {
        self.params.m_hat as u64
    }

    /// `P(m_hat) = (m + m_hat) / (m^2 + m m_hat + m + m_hat - alpha m^2)`.
    pub fn base(&self) -> f64 {
        let m = self.params.m as f64;
        let mh = self.params.m_hat as f64;
        (m + mh) / (m * m + m * mh + m + mh - self.params.alpha * m * m)
    }

    /// `P(k) / P(k - 1)` for `k > m_hat`.
    pub fn ratio(&self, k: u64) -> f64 {
        let m = self.params.m as f64;
        let mh = self.params.m_hat as f64;
        let a = self.params.alpha;
        let k = k as f64;
        let num = a * (k * m - m * m - m * mh - m) + m * m + m * mh;
        let den = a * (k * m - m * m - m * mh) + m * m + m * mh + m + mh;
        num / den
    }

    fn check_k(&self, k: u64) -> Result<()> {
        if k < self.support_start() {
            return Err(Error::Domain(format!(
                "in-degree {k} is below the support start m_hat = {}",
                self.support_start()
            )));
        }
        Ok(())
    }

    pub fn pmf(&self, k: u64) -> Result<f64> {
        self.check_k(k)?;
        let mut p = self.base();
        for j in self.support_start() + 1..=k {
            p *= self.ratio(j);
        }
        Ok(p)
    }

    /// `P(m_hat), ..., P(k_max)`.
    pub fn pmf_table(&self, k_max: u64) -> Result<Vec<f64>> {
        self.check_k(k_max)?;
        let start = self.support_start();
        let mut out = Vec::with_capacity((k_max - start + 1) as usize);
        let mut p = self.base();
        out.push(p);
        for j in start + 1..=k_max {
            p *= self.ratio(j);
            out.push(p);
        }
        Ok(out)
    }

    /// `P(K >= k) / P(k)`. The ratio recurrence telescopes, so the tail sum
    /// `1 - sum_{j < k} P(j)` equals this multiple of `P(k)`; using it avoids
    /// cancellation far in the tail.
    fn tail_factor(&self, k: u64) -> f64 {
        let m = self.params.m as f64;
        let mh = self.params.m_hat as f64;
        let a = self.params.alpha;
        (a * m * k as f64 + (m + mh) * (m * (1.0 - a) + 1.0)) / (m + mh)
    }

    /// `P(K >= k)`.
    pub fn ccdf(&self, k: u64) -> Result<f64> {
        let p = self.pmf(k)?;
        Ok(if k == self.support_start() { 1.0 } else { p * self.tail_factor(k) })
    }

    /// `P(K >= m_hat), ..., P(K >= k_max)`.
    pub fn ccdf_table(&self, k_max: u64) -> Result<Vec<f64>> {
        let start = self.support_start();
        Ok(self
            .pmf_table(k_max)?
            .into_iter()
            .zip(start..)
            .map(|(p, k)| if k == start { 1.0 } else { (p * self.tail_factor(k)).min(1.0) })
            .collect())
    }

    /// Smallest `k` whose cumulative probability reaches `q`, searching no
    /// further than `limit`.
    pub fn quantile(&self, q: f64, limit: u64) -> Result<u64> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::Domain(format!("quantile level {q} not in [0, 1)")));
        }
        let mut acc = CompensatedSum::new();
        let mut p = self.base();
        let mut k = self.support_start();
        loop {
            acc.add(p);
            if acc.value() >= q {
                return Ok(k);
            }
            if k >= limit {
                return Err(Error::SupportTooSmall {
                    limit: limit as usize,
                    tail_mass: 1.0 - acc.value(),
                });
            }
            k += 1;
            p *= self.ratio(k);
        }
    }

    /// Smallest `k_max` such that `P(m_hat..=k_max)` holds at least `1 - tail`.
    pub fn adaptive_support(&self, tail: f64, limit: u64) -> Result<u64> {
        self.quantile(1.0 - tail, limit)
    }
}

/// Node and edge counts of a seed and its in-degree pmf (index = in-degree).
#[derive(Clone, Debug, PartialEq)]
pub struct SeedStats {
    pub n0: u64,
    pub e0: u64,
    pub pmf: Vec<f64>,
}

impl SeedStats {
    pub fn from_seed(seed: &SeedSpec) -> Self {
        let degrees = seed.in_degrees();
        let dist = EmpiricalDistribution::from_in_degrees(&degrees);
        Self {
            n0: seed.node_count() as u64,
            e0: seed.edge_count() as u64,
            pmf: dist.pmf(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n0 == 0 || self.e0 == 0 {
            return Err(Error::Domain("seed must have nodes and edges".into()));
        }
        if self.pmf.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::Domain("seed pmf has negative or NaN entries".into()));
        }
        let total: f64 = self.pmf.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("seed pmf sums to {total}, not 1")));
        }
        Ok(())
    }
}

/// Bins whose mass falls below this are not extended further.
const TAIL_EPS: f64 = 1e-30;
/// Mass allowed to pile up in the last bin before the support is declared too small.
const TRUNCATION_TOLERANCE: f64 = 1e-9;

/// Expected in-degree pmf `P_t` evolved step by step by the mean-field
/// recurrence: a node of in-degree `k` receives an attachment edge with
/// expected count `m alpha k n/e + m (1 - alpha)` per step, and each new
/// node enters at in-degree `m_hat`.
#[derive(Clone, Debug)]
pub struct ExpectedDegreeEvolution {
    params: ModelParams,
    n: u64,
    e: u64,
    time: u64,
    pmf: Vec<f64>,
    max_support: usize,
}

impl ExpectedDegreeEvolution {
    /// `max_support` caps the number of bins; see [`default_support_cap`].
    pub fn new(params: ModelParams, seed: SeedStats, max_support: usize) -> Result<Self> {
        params.validate()?;
        seed.validate()?;
        let mut pmf = seed.pmf;
        let min_len = params.m_hat + 1;
        if pmf.len() < min_len {
            pmf.resize(min_len, 0.0);
        }
        if max_support < pmf.len() {
            return Err(Error::SupportTooSmall {
                limit: max_support,
                tail_mass: 1.0,
            });
        }
        Ok(Self {
            params,
            n: seed.n0,
            e: seed.e0,
            time: 0,
            pmf,
            max_support,
        })
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn node_count(&self) -> u64 {
        self.n
    }

    pub fn edge_count(&self) -> u64 {
        self.e
    }

    /// `P_t(0), P_t(1), ...`
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn step(&mut self) -> Result<()> {
        let m = self.params.m as f64;
        let alpha = self.params.alpha;
        let n_prev = self.n as f64;
        let pref = m * alpha * n_prev / self.e as f64;
        let unif = m * (1.0 - alpha);
        let hits = |k: usize| pref * k as f64 + unif;

        let len = self.pmf.len();
        let top = self.pmf[len - 1];
        let extend = top > TAIL_EPS;
        if extend && len + 1 > self.max_support {
            if top > TRUNCATION_TOLERANCE {
                return Err(Error::SupportTooSmall {
                    limit: self.max_support,
                    tail_mass: top,
                });
            }
        }
        let extend = extend && len < self.max_support;

        let mut next = vec![0.0; if extend { len + 1 } else { len }];
        for (k, &p) in self.pmf.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            // the last bin keeps its outflow when the support is not extended
            let outflow = if k + 1 < len || extend { hits(k) * p } else { 0.0 };
            let retained = n_prev * p - outflow;
            if retained < -1e-12 * n_prev {
                return Err(Error::Domain(format!(
                    "seed too small for the expectation recurrence: in-degree {k} loses {:.3} expected nodes out of {:.3} at step {}",
                    outflow,
                    n_prev * p,
                    self.time + 1
                )));
            }
            next[k] += retained.max(0.0);
            if outflow > 0.0 {
                next[k + 1] += outflow;
            }
        }
        next[self.params.m_hat] += 1.0;
        let n_next = n_prev + 1.0;
        for p in &mut next {
            *p /= n_next;
        }
        self.pmf = next;
        self.n += 1;
        self.e += (self.params.m + self.params.m_hat) as u64;
        self.time += 1;
        Ok(())
    }

    pub fn advance(&mut self, steps: u64) -> Result<()> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }

    /// Total-variation distance to the stationary distribution.
    pub fn total_variation(&self, stationary: &StationaryDistribution) -> Result<f64> {
        total_variation(&self.pmf, stationary)
    }
}

/// `max(seed support, m_hat + 20 m sqrt(T))` bins.
pub fn default_support_cap(params: &ModelParams, seed: &SeedStats, steps: u64) -> usize {
    let grow = params.m_hat as f64 + 20.0 * params.m as f64 * (steps as f64).sqrt();
    seed.pmf.len().max(grow.ceil() as usize + 2)
}

/// `P_T` after `steps` steps of the expectation recurrence.
pub fn finite_t_pmf(params: &ModelParams, seed: SeedStats, steps: u64) -> Result<Vec<f64>> {
    let cap = default_support_cap(params, &seed, steps);
    let mut evo = ExpectedDegreeEvolution::new(*params, seed, cap)?;
    evo.advance(steps)?;
    Ok(evo.pmf)
}

/// Total-variation distance between a pmf indexed from in-degree 0 and the
/// stationary distribution; stationary mass beyond the pmf's support is
/// counted in full.
pub fn total_variation(pmf: &[f64], stationary: &StationaryDistribution) -> Result<f64> {
    let start = stationary.support_start() as usize;
    let k_max = (pmf.len().max(start + 1) - 1) as u64;
    let table = stationary.pmf_table(k_max)?;
    let mut acc = CompensatedSum::new();
    let mut covered = CompensatedSum::new();
    for k in 0..=k_max as usize {
        let p = pmf.get(k).copied().unwrap_or(0.0);
        let q = if k >= start { table[k - start] } else { 0.0 };
        covered.add(q);
        acc.add((p - q).abs());
    }
    acc.add((1.0 - covered.value()).max(0.0));
    Ok(0.5 * acc.value())
}

/// Counts of nodes by in-degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl EmpiricalDistribution {
    pub fn from_in_degrees<T: Copy + Into<u64>>(degrees: &[T]) -> Self {
        let mut counts = BTreeMap::new();
        for &d in degrees {
            *counts.entry(d.into()).or_insert(0) += 1;
        }
        Self {
            counts,
            total: degrees.len() as u64,
        }
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn max_degree(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }

    /// Dense pmf indexed by in-degree `0..=max`.
    pub fn pmf(&self) -> Vec<f64> {
        let Some(max) = self.max_degree() else {
            return Vec::new();
        };
        let mut out = vec![0.0; max as usize + 1];
        for (&k, &c) in &self.counts {
            out[k as usize] = c as f64 / self.total as f64;
        }
        out
    }

    /// `#{v : k(v) >= k} / n`.
    pub fn ccdf_at(&self, k: u64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let above: u64 = self.counts.range(k..).map(|(_, c)| c).sum();
        above as f64 / self.total as f64
    }

    /// Dense ccdf for `k = 0..=max + 1` (the last entry is 0).
    pub fn ccdf(&self) -> Vec<f64> {
        let Some(max) = self.max_degree() else {
            return Vec::new();
        };
        let mut out = vec![0.0; max as usize + 2];
        let mut above = 0u64;
        for k in (0..=max).rev() {
            above += self.counts.get(&k).copied().unwrap_or(0);
            out[k as usize] = above as f64 / self.total as f64;
        }
        out
    }
}

pub fn empirical_distribution(net: &GrowingNetwork) -> EmpiricalDistribution {
    EmpiricalDistribution::from_in_degrees(net.in_degrees())
}

pub fn empirical_ccdf(dist: &EmpiricalDistribution) -> Vec<f64> {
    dist.ccdf()
}

/// Mean empirical ccdf over `runs` independent growths from `seed`; run `i`
/// uses stream `i` of the generator seeded with `rng_seed`.
pub fn ensemble_mean_ccdf(
    seed: &SeedSpec,
    params: &ModelParams,
    steps: usize,
    runs: usize,
    rng_seed: u64,
    options: GrowthOptions,
) -> Result<Vec<f64>> {
    let ccdfs: Vec<Vec<f64>> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = rng_for_run(rng_seed, run as u64);
            single_run_ccdf(seed, params, steps, options, &mut rng)
        })
        .collect::<Result<_>>()?;
    Ok(mean_padded(&ccdfs))
}

fn single_run_ccdf<R: Rng>(
    seed: &SeedSpec,
    params: &ModelParams,
    steps: usize,
    options: GrowthOptions,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let growth = grow_sequence(seed, params, steps, options, rng)?;
    Ok(empirical_distribution(&growth.network).ccdf())
}

/// Element-wise mean of vectors of different lengths, padding with zeros.
pub fn mean_padded(rows: &[Vec<f64>]) -> Vec<f64> {
    let len = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![0.0; len];
    for row in rows {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v;
        }
    }
    let n = rows.len().max(1) as f64;
    out.iter_mut().for_each(|v| *v /= n);
    out
}

/// `max |empirical[k] - theory(k)|` over `k in k_lo..=k_hi`, where the
/// empirical ccdf is indexed from 0 (missing entries count as 0) and the
/// theoretical one from the support start.
pub fn sup_distance(
    empirical_ccdf: &[f64],
    stationary: &StationaryDistribution,
    k_lo: u64,
    k_hi: u64,
) -> Result<f64> {
    let start = stationary.support_start();
    if k_lo < start || k_hi < k_lo {
        return Err(Error::Domain(format!("bad comparison range {k_lo}..={k_hi}")));
    }
    let theory = stationary.ccdf_table(k_hi)?;
    Ok((k_lo..=k_hi)
        .map(|k| {
            let emp = empirical_ccdf.get(k as usize).copied().unwrap_or(0.0);
            (emp - theory[(k - start) as usize]).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: usize, m_hat: usize, alpha: f64) -> ModelParams {
        ModelParams::new(m, m_hat, alpha).unwrap()
    }

    #[test]
    fn base_case_and_geometric_case() {
        let d = StationaryDistribution::new(params(5, 3, 0.6)).unwrap();
        assert!((d.pmf(3).unwrap() - 8.0 / 33.0).abs() < 1e-15);
        let g = StationaryDistribution::new(params(5, 3, 0.0)).unwrap();
        assert!((g.pmf(3).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        for k in 3..40u64 {
            let expected = (1.0 / 6.0) * (5.0f64 / 6.0).powi((k - 3) as i32);
            assert!((g.pmf(k).unwrap() - expected).abs() < 1e-14 * expected.max(1e-300));
        }
    }

    #[test]
    fn ratio_matches_inductive_step() {
        let (m, mh, a) = (5.0, 3.0, 0.6);
        let d = StationaryDistribution::new(params(5, 3, 0.6)).unwrap();
        for k in 3..60u64 {
            let kf = k as f64;
            let expected = (m * a * kf / (m + mh) + m * (1.0 - a)) / (1.0 + m * a * (kf + 1.0) / (m + mh) + m * (1.0 - a));
            let got = d.pmf(k + 1).unwrap() / d.pmf(k).unwrap();
            assert!((got - expected).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn ccdf_examples() {
        let d = StationaryDistribution::new(params(5, 3, 0.6)).unwrap();
        assert_eq!(d.ccdf(3).unwrap(), 1.0);
        assert!((d.ccdf(4).unwrap() - 25.0 / 33.0).abs() < 1e-15);
        let g = StationaryDistribution::new(params(5, 3, 0.0)).unwrap();
        assert!((g.ccdf(5).unwrap() - 25.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn domain_and_regime_errors() {
        let d = StationaryDistribution::new(params(5, 3, 0.6)).unwrap();
        assert!(matches!(d.pmf(2), Err(Error::Domain(_))));
        assert!(matches!(d.ccdf(0), Err(Error::Domain(_))));
        assert!(matches!(
            StationaryDistribution::new(params(5, 0, 1.0)),
            Err(Error::Unsupported(_))
        ));
        assert!(StationaryDistribution::new(params(5, 1, 1.0)).is_ok());
    }

    #[test]
    fn quantile_and_support() {
        let g = StationaryDistribution::new(params(5, 3, 0.0)).unwrap();
        // cumulative of the geometric law: 1 - (5/6)^(k - 2)
        let k = g.quantile(0.99, 10_000).unwrap();
        let cdf = |k: u64| 1.0 - (5.0f64 / 6.0).powi((k - 2) as i32);
        assert!(cdf(k) >= 0.99 && cdf(k - 1) < 0.99);
        assert!(g.quantile(0.99, 5).is_err());
        assert!(g.adaptive_support(1e-6, 100_000).unwrap() > k);
    }

    #[test]
    fn finite_t_zero_steps_is_identity() {
        let seed = SeedStats::from_seed(&SeedSpec::complete(9).unwrap());
        let p = finite_t_pmf(&params(5, 3, 0.6), seed.clone(), 0).unwrap();
        assert_eq!(&p[..seed.pmf.len()], &seed.pmf[..]);
    }

    #[test]
    fn finite_t_conserves_mass() {
        let seed = SeedStats::from_seed(&SeedSpec::complete(9).unwrap());
        let mut evo = ExpectedDegreeEvolution::new(params(5, 3, 0.6), seed, 10_000).unwrap();
        for _ in 0..500 {
            evo.step().unwrap();
            let total: f64 = evo.pmf().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "{total}");
        }
        assert_eq!(evo.node_count(), 509);
        assert_eq!(evo.edge_count(), 72 + 8 * 500);
    }

    #[test]
    fn finite_t_rejects_tiny_seed_and_tiny_support() {
        let k3 = SeedStats::from_seed(&SeedSpec::complete(3).unwrap());
        assert!(matches!(finite_t_pmf(&params(5, 3, 0.6), k3, 10), Err(Error::Domain(_))));
        let k9 = SeedStats::from_seed(&SeedSpec::complete(9).unwrap());
        let mut evo = ExpectedDegreeEvolution::new(params(5, 3, 0.6), k9, 12).unwrap();
        assert!(matches!(evo.advance(100), Err(Error::SupportTooSmall { .. })));
    }

    #[test]
    fn empirical_examples() {
        let k3 = EmpiricalDistribution::from_in_degrees(&[2u32, 2, 2]);
        assert_eq!(k3.ccdf_at(2), 1.0);
        assert_eq!(k3.ccdf_at(3), 0.0);
        assert_eq!(k3.ccdf(), vec![1.0, 1.0, 1.0, 0.0]);
        let two = EmpiricalDistribution::from_in_degrees(&[0u32, 1]);
        assert_eq!(two.ccdf_at(0), 1.0);
        assert_eq!(two.ccdf_at(1), 0.5);
        assert_eq!(two.total(), 2);
        assert!(EmpiricalDistribution::from_in_degrees::<u32>(&[]).ccdf().is_empty());
    }

    #[test]
    fn mean_padded_pads_with_zero() {
        let m = mean_padded(&[vec![1.0, 1.0, 0.5], vec![1.0]]);
        assert_eq!(m, vec![1.0, 0.5, 0.25]);
    }
}
