//! The likelihood of alpha given a sample log, its root structure, and the
//! maximum-likelihood estimate.
//!
//! Every record contributes the factor `alpha * (k/e - 1/n) + 1/n`, a linear
//! polynomial in alpha with root `e / (e - k n)` (none when `k n = e`). All
//! evaluation happens in log space: the product over ~10^5 records is never
//! formed. Between the largest negative root and the smallest positive root
//! every factor is positive and the log-likelihood is strictly concave, so
//! the maximizer is found by bisecting on the sign of its derivative.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::netmodel::{AttachmentRecord, SampleLog};
use crate::numeric::{maximize_concave, CompensatedSum};

/// Margin kept from the bracket endpoints and from {0, 1}.
pub const INTERIOR_MARGIN: f64 = 1e-9;
/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_WIDTH: f64 = 1e-10;

/// `ln` of the likelihood of `alpha`: the sum of the logarithms of every
/// record's attachment probability.
pub fn log_likelihood(records: &[AttachmentRecord], alpha: f64) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for (index, r) in records.iter().enumerate() {
        let value = alpha * r.slope() + r.uniform();
        if !(value > 0.0) {
            return Err(Error::NonPositiveFactor {
                index,
                k: r.k,
                e_prev: r.e_prev,
                n_prev: r.n_prev,
                alpha,
                value,
            });
        }
        acc.add(value.ln());
    }
    Ok(acc.value())
}

/// Log-likelihood of a single step's multiset alone (the per-snapshot
/// likelihood, which ignores earlier steps). Zero for an empty step.
pub fn snapshot_log_likelihood(step: &[AttachmentRecord], alpha: f64) -> Result<f64> {
    log_likelihood(step, alpha)
}

/// First derivative of [`log_likelihood`] in alpha.
pub fn log_likelihood_derivative(records: &[AttachmentRecord], alpha: f64) -> f64 {
    records
        .iter()
        .map(|r| {
            let s = r.slope();
            s / (alpha * s + r.uniform())
        })
        .collect::<CompensatedSum>()
        .value()
}

/// Second derivative of [`log_likelihood`]; a negative sum of squares.
pub fn log_likelihood_second_derivative(records: &[AttachmentRecord], alpha: f64) -> f64 {
    -records
        .iter()
        .map(|r| {
            let s = r.slope();
            let q = s / (alpha * s + r.uniform());
            q * q
        })
        .collect::<CompensatedSum>()
        .value()
}

/// A root `numerator / denominator` held as a reduced fraction with a
/// positive denominator. Roots come from integer counts, so grouping by the
/// exact fraction gives exact multiplicities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Fraction {
    num: i128,
    den: i128,
}

impl Fraction {
    fn root_of(r: &AttachmentRecord) -> Option<Self> {
        let e = r.e_prev as i128;
        let den = e - r.k as i128 * r.n_prev as i128;
        if den == 0 {
            return None;
        }
        let (num, den) = if den < 0 { (-e, -den) } else { (e, den) };
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i128;
        Some(Self {
            num: num / g,
            den: den / g,
        })
    }

    fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn is_positive(&self) -> bool {
        self.num > 0
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A distinct root of the likelihood polynomial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: f64,
    pub numerator: i128,
    pub denominator: i128,
    pub multiplicity: usize,
}

/// The roots of the likelihood polynomial with multiplicities, sorted
/// ascending, split into negative and positive parts.
#[derive(Clone, Debug, PartialEq)]
pub struct RootProfile {
    roots: Vec<Root>,
    first_positive: usize,
    degenerate_count: usize,
    record_count: usize,
}

impl RootProfile {
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn negative(&self) -> &[Root] {
        &self.roots[..self.first_positive]
    }

    pub fn positive(&self) -> &[Root] {
        &self.roots[self.first_positive..]
    }

    /// Degree of the polynomial: the number of non-degenerate records.
    pub fn degree(&self) -> usize {
        self.record_count - self.degenerate_count
    }

    pub fn degenerate_count(&self) -> usize {
        self.degenerate_count
    }

    pub fn record_count(&self) -> usize {
        self.record_count
    }

    pub fn min_positive(&self) -> Option<f64> {
        self.positive().first().map(|r| r.value)
    }

    pub fn max_negative(&self) -> Option<f64> {
        self.negative().last().map(|r| r.value)
    }

    pub fn positive_multiplicity(&self) -> usize {
        self.positive().iter().map(|r| r.multiplicity).sum()
    }

    pub fn negative_multiplicity(&self) -> usize {
        self.negative().iter().map(|r| r.multiplicity).sum()
    }
}

/// One root per non-degenerate record, merged by exact value.
pub fn root_profile(records: &[AttachmentRecord]) -> RootProfile {
    let mut counts: BTreeMap<Fraction, usize> = BTreeMap::new();
    let mut degenerate_count = 0;
    for r in records {
        match Fraction::root_of(r) {
            Some(f) => *counts.entry(f).or_default() += 1,
            None => degenerate_count += 1,
        }
    }
    let roots: Vec<Root> = counts
        .into_iter()
        .map(|(f, multiplicity)| Root {
            value: f.value(),
            numerator: f.num,
            denominator: f.den,
            multiplicity,
        })
        .collect();
    let first_positive = roots.partition_point(|r| r.numerator < 0);
    RootProfile {
        roots,
        first_positive,
        degenerate_count,
        record_count: records.len(),
    }
}

/// Running extremes of the root set, updated one record at a time; enough
/// to bracket the maximizer and check the root hypotheses
/// without rebuilding the full profile for every prefix.
#[derive(Clone, Debug, Default)]
pub struct RootTracker {
    min_positive: Option<Fraction>,
    max_negative: Option<Fraction>,
    positive_count: usize,
    negative_count: usize,
    degenerate_count: usize,
}

impl RootTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: &AttachmentRecord) {
        match Fraction::root_of(r) {
            None => self.degenerate_count += 1,
            Some(f) if f.is_positive() => {
                self.positive_count += 1;
                if self.min_positive.is_none_or(|m| f < m) {
                    self.min_positive = Some(f);
                }
            }
            Some(f) => {
                self.negative_count += 1;
                if self.max_negative.is_none_or(|m| f > m) {
                    self.max_negative = Some(f);
                }
            }
        }
    }

    pub fn extend<'a>(&mut self, records: impl IntoIterator<Item = &'a AttachmentRecord>) {
        for r in records {
            self.push(r);
        }
    }

    pub fn min_positive(&self) -> Option<f64> {
        self.min_positive.map(|f| f.value())
    }

    pub fn max_negative(&self) -> Option<f64> {
        self.max_negative.map(|f| f.value())
    }

    pub fn record_count(&self) -> usize {
        self.positive_count + self.negative_count + self.degenerate_count
    }

    pub fn degenerate_count(&self) -> usize {
        self.degenerate_count
    }

    pub fn theorem1(&self) -> Theorem1Check {
        Theorem1Check::from_counts(self.positive_count, self.negative_count)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Outcome of checking the sufficient conditions for an interior local
/// maximum: positive and negative roots exist and the positive roots have
/// an even total multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Theorem1Check {
    pub satisfied: bool,
    pub has_positive: bool,
    pub has_negative: bool,
    pub positive_multiplicity: usize,
    pub parity: Parity,
}

impl Theorem1Check {
    fn from_counts(positive_multiplicity: usize, negative_multiplicity: usize) -> Self {
        let has_positive = positive_multiplicity > 0;
        let has_negative = negative_multiplicity > 0;
        let parity = Parity::of(positive_multiplicity);
        Self {
            satisfied: has_positive && has_negative && parity == Parity::Even,
            has_positive,
            has_negative,
            positive_multiplicity,
            parity,
        }
    }

    pub fn detail(&self) -> String {
        let mut failed = Vec::new();
        if !self.has_positive {
            failed.push("no positive roots".to_string());
        }
        if !self.has_negative {
            failed.push("no negative roots".to_string());
        }
        if self.parity == Parity::Odd {
            failed.push(format!(
                "positive roots have odd total multiplicity {}",
                self.positive_multiplicity
            ));
        }
        if failed.is_empty() {
            format!(
                "satisfied: positive and negative roots present, positive multiplicity {} is even",
                self.positive_multiplicity
            )
        } else {
            failed.join("; ")
        }
    }
}

pub fn check_theorem1(profile: &RootProfile) -> Theorem1Check {
    Theorem1Check::from_counts(profile.positive_multiplicity(), profile.negative_multiplicity())
}

/// Maximum-likelihood estimate with its root bracket.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MleReport {
    pub alpha_hat: f64,
    /// `(max negative root, min positive root)`; infinite when a side is empty.
    #[serde(serialize_with = "serialize_bracket")]
    pub bracket: (f64, f64),
    pub theorem1_satisfied: bool,
    #[serde(rename = "positive_multiplicity_parity")]
    pub parity: Parity,
    #[serde(rename = "loglik")]
    pub log_likelihood: f64,
}

fn serialize_bracket<S: Serializer>(bracket: &(f64, f64), s: S) -> std::result::Result<S::Ok, S::Error> {
    let finite = |x: f64| x.is_finite().then_some(x);
    [finite(bracket.0), finite(bracket.1)].serialize(s)
}

/// Maximizes the log-likelihood over the part of `(0, 1)` that lies between
/// the largest negative and smallest positive root.
///
/// When the parity hypothesis fails the interior maximizer is still
/// returned, with `theorem1_satisfied = false`.
pub fn mle_estimate(records: &[AttachmentRecord]) -> Result<MleReport> {
    if records.is_empty() {
        return Err(Error::EmptyLog);
    }
    let mut tracker = RootTracker::new();
    tracker.extend(records);
    mle_with_tracker(records, &tracker)
}

fn mle_with_tracker(records: &[AttachmentRecord], tracker: &RootTracker) -> Result<MleReport> {
    if tracker.degenerate_count() == records.len() {
        return Err(Error::NoInformation(format!(
            "all {} record(s) have k * n_prev = e_prev, so the likelihood is constant in alpha",
            records.len()
        )));
    }
    let a = tracker.max_negative().unwrap_or(f64::NEG_INFINITY);
    let b = tracker.min_positive().unwrap_or(f64::INFINITY);
    let lo = a.max(0.0) + INTERIOR_MARGIN;
    let hi = b.min(1.0) - INTERIOR_MARGIN;
    if lo > hi {
        return Err(Error::Domain(format!("empty search interval ({lo}, {hi})")));
    }
    let alpha_hat = maximize_concave(|x| log_likelihood_derivative(records, x), lo, hi, BISECTION_WIDTH);
    let check = tracker.theorem1();
    Ok(MleReport {
        alpha_hat,
        bracket: (a, b),
        theorem1_satisfied: check.satisfied,
        parity: check.parity,
        log_likelihood: log_likelihood(records, alpha_hat)?,
    })
}

/// Estimate on the cumulative sample `B_t` at `t = stride, 2 stride, ...`
/// (and at the last step). Prefixes without information are skipped.
pub fn cumulative_trace(log: &SampleLog, stride: usize) -> Vec<(usize, f64)> {
    let checkpoints = trace_checkpoints(log.num_steps(), stride);
    // Root extremes are carried forward incrementally; the maximization of
    // each prefix is independent and runs in parallel.
    let mut trackers = Vec::with_capacity(checkpoints.len());
    let mut tracker = RootTracker::new();
    let mut done = 0;
    for &t in &checkpoints {
        tracker.extend(&log.records()[done..log.prefix(t).len()]);
        done = log.prefix(t).len();
        trackers.push(tracker.clone());
    }
    checkpoints
        .par_iter()
        .zip(trackers.par_iter())
        .filter_map(|(&t, tr)| {
            let prefix = log.prefix(t);
            if prefix.is_empty() {
                return None;
            }
            mle_with_tracker(prefix, tr).ok().map(|r| (t, r.alpha_hat))
        })
        .collect()
}

/// Per-step estimate using only that step's multiset, at the same
/// checkpoints as [`cumulative_trace`].
pub fn snapshot_trace(log: &SampleLog, stride: usize) -> Vec<(usize, f64)> {
    trace_checkpoints(log.num_steps(), stride)
        .into_par_iter()
        .filter_map(|t| {
            let step = log.step(t);
            if step.is_empty() {
                return None;
            }
            mle_estimate(step).ok().map(|r| (t, r.alpha_hat))
        })
        .collect()
}

pub(crate) fn trace_checkpoints(steps: usize, stride: usize) -> Vec<usize> {
    let stride = stride.max(1);
    let mut out: Vec<usize> = (stride..=steps).step_by(stride).collect();
    if steps > 0 && out.last() != Some(&steps) {
        out.push(steps);
    }
    out
}
