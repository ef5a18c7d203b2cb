//! Expectation-maximization for the mixture weight alpha.
//!
//! Each logged edge came either from the preferential component (density
//! `k/e`) or from the uniform one (`1/n`). The E-step computes the posterior
//! probability of the preferential component for every record; the M-step
//! sets alpha to their mean.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::{log_likelihood, trace_checkpoints};
use crate::netmodel::{AttachmentRecord, SampleLog};
use crate::numeric::CompensatedSum;

/// Largest tolerated decrease of the objective between iterations before
/// the run is aborted.
pub const DIVERGENCE_GUARD: f64 = 1e-9;

/// Handling of records whose target had in-degree 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroInDegreePolicy {
    /// Remove them before iterating.
    #[default]
    Drop,
    /// Keep them; their responsibility is always 0.
    Keep,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmConfig {
    pub alpha_init: f64,
    pub epsilon: f64,
    pub max_iter: usize,
    pub zero_in_degree: ZeroInDegreePolicy,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            alpha_init: 0.5,
            epsilon: 1e-8,
            max_iter: 10_000,
            zero_in_degree: ZeroInDegreePolicy::Drop,
        }
    }
}

impl EmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_init > 0.0 && self.alpha_init < 1.0) {
            return Err(Error::Domain(format!("alpha_init = {} is not in (0, 1)", self.alpha_init)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Domain(format!("epsilon = {} must be positive", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EmIterate {
    pub alpha: f64,
    pub loglik: f64,
}

/// Every iterate (starting with `alpha_init`) and the incomplete-data
/// log-likelihood at it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmTrace {
    pub iterations: Vec<EmIterate>,
    pub converged: bool,
    pub final_alpha: f64,
    /// Records the iteration actually ran on, after the zero-in-degree policy.
    pub record_count: usize,
}

impl EmTrace {
    /// Number of EM updates performed.
    pub fn updates(&self) -> usize {
        self.iterations.len().saturating_sub(1)
    }

    /// `iter,alpha,loglik` CSV; row 0 is the initial value.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "iter,alpha,loglik")?;
        for (i, it) in self.iterations.iter().enumerate() {
            writeln!(out, "{i},{},{}", it.alpha, it.loglik)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Posterior probability that `record` came from the preferential component.
pub fn responsibility(record: &AttachmentRecord, alpha: f64) -> Result<f64> {
    if record.is_degenerate() {
        // identical component densities: the posterior equals the prior
        return Ok(alpha);
    }
    let pref = record.preferential() * alpha;
    let denom = pref + record.uniform() * (1.0 - alpha);
    if !(denom > 0.0) {
        return Err(Error::Domain(format!(
            "responsibility undefined for k={}, e_prev={}, n_prev={} at alpha={alpha}",
            record.k, record.e_prev, record.n_prev
        )));
    }
    Ok(pref / denom)
}

/// One EM update: the mean responsibility over all records.
pub fn em_step(records: &[AttachmentRecord], alpha: f64) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyLog);
    }
    let mut acc = CompensatedSum::new();
    for r in records {
        acc.add(responsibility(r, alpha)?);
    }
    Ok(acc.value() / records.len() as f64)
}

/// Applies the zero-in-degree policy.
pub fn prepare_records(records: &[AttachmentRecord], policy: ZeroInDegreePolicy) -> Vec<AttachmentRecord> {
    match policy {
        ZeroInDegreePolicy::Keep => records.to_vec(),
        ZeroInDegreePolicy::Drop => records.iter().copied().filter(|r| r.k > 0).collect(),
    }
}

/// Iterates [`em_step`] from `alpha_init` until consecutive iterates differ
/// by less than `epsilon` or `max_iter` updates have run.
pub fn em_estimate(records: &[AttachmentRecord], cfg: &EmConfig) -> Result<EmTrace> {
    cfg.validate()?;
    let prepared;
    let records = match cfg.zero_in_degree {
        ZeroInDegreePolicy::Keep => records,
        ZeroInDegreePolicy::Drop => {
            prepared = prepare_records(records, ZeroInDegreePolicy::Drop);
            &prepared[..]
        }
    };
    if records.is_empty() {
        return Err(Error::EmptyLog);
    }

    let mut current = cfg.alpha_init;
    let mut previous_loglik = log_likelihood(records, current)?;
    let mut iterations = vec![EmIterate {
        alpha: current,
        loglik: previous_loglik,
    }];
    let mut converged = false;
    for iteration in 1..=cfg.max_iter {
        let next = em_step(records, current)?;
        let loglik = log_likelihood(records, next)?;
        if loglik < previous_loglik - DIVERGENCE_GUARD {
            return Err(Error::EmDivergence {
                iteration,
                drop: previous_loglik - loglik,
            });
        }
        iterations.push(EmIterate { alpha: next, loglik });
        let delta = (next - current).abs();
        current = next;
        previous_loglik = loglik;
        if delta < cfg.epsilon {
            converged = true;
            break;
        }
    }
    Ok(EmTrace {
        iterations,
        converged,
        final_alpha: current,
        record_count: records.len(),
    })
}

/// Final EM estimate on every cumulative prefix `B_t` at the trace
/// checkpoints. Prefixes that are empty after the zero-in-degree policy are
/// skipped.
pub fn cumulative_trace(log: &SampleLog, stride: usize, cfg: &EmConfig) -> Result<Vec<(usize, f64)>> {
    cfg.validate()?;
    let checkpoints = trace_checkpoints(log.num_steps(), stride);
    let results: Vec<Option<(usize, f64)>> = checkpoints
        .par_iter()
        .map(|&t| match em_estimate(log.prefix(t), cfg) {
            Ok(trace) => Ok(Some((t, trace.final_alpha))),
            Err(Error::EmptyLog) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    Ok(results.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(k: u64, e: u64, n: u64) -> AttachmentRecord {
        AttachmentRecord::new(k, e, n)
    }

    #[test]
    fn responsibility_examples() {
        assert!((responsibility(&r(2, 4, 4), 0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(responsibility(&r(3, 10, 5), 0.0).unwrap(), 0.0);
        assert_eq!(responsibility(&r(2, 6, 3), 0.37).unwrap(), 0.37);
        assert!(responsibility(&r(0, 4, 4), 1.0).is_err());
        assert_eq!(responsibility(&r(0, 4, 4), 0.5).unwrap(), 0.0);
    }

    #[test]
    fn em_step_examples() {
        assert!((em_step(&[r(2, 4, 4)], 0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let v = em_step(&[r(2, 4, 4), r(1, 4, 4)], 0.5).unwrap();
        assert!((v - 7.0 / 12.0).abs() < 1e-15);
        let flat = [r(2, 6, 3), r(1, 4, 4), r(3, 15, 5)];
        assert_eq!(em_step(&flat, 0.42).unwrap(), 0.42);
        assert!(matches!(em_step(&[], 0.5), Err(Error::EmptyLog)));
    }

    #[test]
    fn large_epsilon_stops_after_one_update() {
        let recs = [r(2, 4, 4), r(1, 4, 4), r(3, 10, 5)];
        let first_delta = (em_step(&recs, 0.5).unwrap() - 0.5).abs();
        let cfg = EmConfig {
            epsilon: first_delta * 2.0,
            ..EmConfig::default()
        };
        let trace = em_estimate(&recs, &cfg).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.updates(), 1);
    }

    #[test]
    fn max_iter_reports_not_converged() {
        let recs = [r(2, 4, 4), r(1, 4, 4), r(3, 10, 5)];
        let cfg = EmConfig {
            epsilon: 1e-300,
            max_iter: 3,
            ..EmConfig::default()
        };
        let trace = em_estimate(&recs, &cfg).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.iterations.len(), 4);
    }

    #[test]
    fn zero_policy() {
        let recs = [r(0, 10, 5), r(4, 10, 5), r(1, 10, 5)];
        let keep = EmConfig {
            zero_in_degree: ZeroInDegreePolicy::Keep,
            ..EmConfig::default()
        };
        let drop = EmConfig::default();
        assert_eq!(em_estimate(&recs, &keep).unwrap().record_count, 3);
        assert_eq!(em_estimate(&recs, &drop).unwrap().record_count, 2);
        assert!(matches!(em_estimate(&[r(0, 10, 5)], &drop), Err(Error::EmptyLog)));
        // all-zero log with zeros kept collapses to alpha = 0
        let t = em_estimate(&[r(0, 10, 5), r(0, 12, 6)], &keep).unwrap();
        assert_eq!(t.final_alpha, 0.0);
    }

    #[test]
    fn config_validation() {
        let bad = EmConfig {
            alpha_init: 1.0,
            ..EmConfig::default()
        };
        assert!(em_estimate(&[r(1, 4, 4)], &bad).is_err());
        let bad = EmConfig {
            epsilon: 0.0,
            ..EmConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn trace_csv() {
        let recs = [r(2, 4, 4), r(1, 4, 4)];
        let trace = em_estimate(&recs, &EmConfig::default()).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iter,alpha,loglik\n0,0.5,"));
        assert_eq!(text.lines().count(), trace.iterations.len() + 1);
    }
}
