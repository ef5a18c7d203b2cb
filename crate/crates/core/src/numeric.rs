//! Small numerical helpers shared by the estimators.

/// Neumaier's compensated summation.
///
/// The estimators add up to ~10^5 logarithms of similar magnitude; the
/// compensation keeps the EM monotonicity checks meaningful at 1e-12.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Maximizes a concave function on `[lo, hi]` given its derivative, by
/// bisecting on the derivative's sign until the bracket is narrower than `width`.
///
/// Endpoints are returned when the derivative does not change sign.
pub fn maximize_concave<F>(derivative: F, lo: f64, hi: f64, width: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    debug_assert!(lo <= hi);
    if derivative(lo) <= 0.0 {
        return lo;
    }
    if derivative(hi) >= 0.0 {
        return hi;
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let d = derivative(mid);
        if d > 0.0 {
            lo = mid;
        } else if d < 0.0 {
            hi = mid;
        } else {
            return mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sample standard deviation (n - 1 denominator); zero for fewer than two values.
pub fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_lost_digits() {
        let mut s = CompensatedSum::new();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn maximize_concave_parabola() {
        let x = maximize_concave(|x| -2.0 * (x - 0.3), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-11);
    }

    #[test]
    fn maximize_concave_endpoints() {
        assert_eq!(maximize_concave(|_| 1.0, 0.1, 0.9, 1e-10), 0.9);
        assert_eq!(maximize_concave(|_| -1.0, 0.1, 0.9, 1e-10), 0.1);
    }

    #[test]
    fn std_dev_small_inputs() {
        assert_eq!(std_dev(&[]), 0.0);
        assert_eq!(std_dev(&[3.0]), 0.0);
        assert!((std_dev(&[1.0, 2.0, 3.0, 4.0]) - 1.2909944487358056).abs() < 1e-15);
    }
}
