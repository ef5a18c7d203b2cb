//! Closed forms of the stationary pmf and ccdf written with Gamma ratios,
//! evaluated through log-Gamma. Independent of the ratio recurrence.

use statrs::function::gamma::ln_gamma;

fn shifts(m: f64, mh: f64, alpha: f64) -> (f64, f64) {
    let a = (m + mh) * (1.0 - alpha) / alpha;
    let b = (m + mh) * (m * (1.0 - alpha) + 1.0) / (alpha * m);
    (a, b)
}

pub fn pmf(m: usize, m_hat: usize, alpha: f64, k: u64) -> f64 {
    let (m, mh, k) = (m as f64, m_hat as f64, k as f64);
    if alpha == 0.0 {
        return (m / (m + 1.0)).powf(k - mh) / (m + 1.0);
    }
    let (a, b) = shifts(m, mh, alpha);
    let ln = ln_gamma(mh + b) + ln_gamma(k + a) - ln_gamma(mh + a) - ln_gamma(k + 1.0 + b);
    (m + mh) / (m * alpha) * ln.exp()
}

pub fn ccdf(m: usize, m_hat: usize, alpha: f64, k: u64) -> f64 {
    let (m, mh, k) = (m as f64, m_hat as f64, k as f64);
    if alpha == 0.0 {
        return (m / (m + 1.0)).powf(k - mh);
    }
    let (a, b) = shifts(m, mh, alpha);
    (ln_gamma(mh + b) + ln_gamma(k + a) - ln_gamma(mh + a) - ln_gamma(k + b)).exp()
}

/// The alpha = 1 ccdf with the leading Gamma argument taken literally as
/// m_hat + m m_hat + m (no division by m).
pub fn ccdf_alpha1_literal(m: usize, m_hat: usize, k: u64) -> f64 {
    let (m, mh, k) = (m as f64, m_hat as f64, k as f64);
    (ln_gamma(mh + m * mh + m) + ln_gamma(k) - ln_gamma(mh) - ln_gamma(k + (m + mh) / m)).exp()
}
