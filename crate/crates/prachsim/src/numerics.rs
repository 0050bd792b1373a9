//! Statistical numerics for the detector and the harness: regularized
//! incomplete gamma functions, the chi-square threshold inversion behind the
//! false-alarm target, censored-mean bias correction, Wilson intervals and a
//! Kolmogorov-Smirnov statistic.
//!
//! The non-coherently accumulated PDP sample under noise is a sum of
//! `n_acc = N_a * N_nca` independent `|CN(0, sigma2)|^2` terms, i.e. a
//! Gamma(shape `n_acc`, scale `sigma2`) variable — equivalently a central
//! chi-square with `2*n_acc` degrees of freedom in its standard scaling. All
//! threshold math below works on the Gamma form with unit scale.

use crate::error::{Result, SimError};

const EPS: f64 = 3e-16;
const FPMIN: f64 = 1e-300;

/// Natural log of the gamma function (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.999_999_999_999_809_9;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + (i + 1) as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut n = 1.0;
    loop {
        term *= x / (a + n);
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
        n += 1.0;
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    // modified Lentz method
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    let mut i = 1.0;
    loop {
        let an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
        i += 1.0;
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "gamma_p domain: a > 0, x >= 0");
    if x == 0.0 {
        0.0
    } else if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_continued_fraction(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "gamma_q domain: a > 0, x >= 0");
    if x == 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_continued_fraction(a, x)
    }
}

/// Solves `Q(a, x) = q` for `x`. Bracketing bisection refined by Newton.
pub fn inv_gamma_q(a: f64, q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) || q == 0.0 {
        return Err(SimError::Config(format!(
            "tail probability {q} must lie in (0, 1)"
        )));
    }
    if a <= 0.0 {
        return Err(SimError::Config(format!("gamma shape {a} must be positive")));
    }
    // bracket: Q is decreasing in x
    let mut lo = 0.0;
    let mut hi = a.max(1.0);
    while gamma_q(a, hi) > q {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(SimError::Internal("inv_gamma_q failed to bracket".into()));
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = gamma_q(a, x) - q;
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        // Newton step; density is the negative derivative of Q
        let pdf = (-x + (a - 1.0) * x.ln() - ln_gamma(a)).exp();
        let mut next = if pdf > 0.0 { x + f / pdf } else { 0.5 * (lo + hi) };
        if !(lo..=hi).contains(&next) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-14 * x.max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Relative detection threshold `T_r = T_det / gamma_n` for a per-window
/// false-alarm target.
///
/// With `L` samples per search window the per-sample exceedance probability
/// is `q = 1 - (1 - p_fa)^(1/L)`. The absolute threshold solves
/// `Q(n_acc, T_det / sigma2_nca) = q`, and dividing by the noise floor
/// `gamma_n = n_acc * sigma2_nca` gives `T_r` independent of the noise scale.
pub fn threshold_from_pfa(p_fa_target: f64, n_acc: u32, window_len: u32) -> Result<f64> {
    if !(p_fa_target > 0.0 && p_fa_target < 1.0) {
        return Err(SimError::Config(format!(
            "false-alarm target {p_fa_target} must lie in (0, 1)"
        )));
    }
    if n_acc == 0 {
        return Err(SimError::Config("n_acc must be at least 1".into()));
    }
    if window_len == 0 {
        return Err(SimError::Config("search window must be at least 1 sample".into()));
    }
    // 1 - (1-p)^(1/L) computed without cancellation for small p
    let q = -((-p_fa_target).ln_1p() / window_len as f64).exp_m1();
    let x = inv_gamma_q(n_acc as f64, q)?;
    Ok(x / n_acc as f64)
}

/// Multiplier that removes the bias of a top-censored mean for
/// Gamma(shape, scale) samples: censoring away the largest `censored_fraction`
/// of the mass leaves a mean of `shape * P(shape + 1, x_q) / (1 - q)` times
/// the scale, where `Q(shape, x_q) = q`.
pub fn censored_mean_correction(shape: f64, censored_fraction: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&censored_fraction) {
        return Err(SimError::Config(format!(
            "censored fraction {censored_fraction} must lie in [0, 1)"
        )));
    }
    if censored_fraction == 0.0 {
        return Ok(1.0);
    }
    let x_q = inv_gamma_q(shape, censored_fraction)?;
    let kept_mean_fraction = gamma_p(shape + 1.0, x_q);
    Ok((1.0 - censored_fraction) / kept_mean_fraction)
}

/// 95% Wilson score interval for a binomial proportion.
pub fn wilson_interval_95(successes: u64, trials: u64) -> (f64, f64) {
    wilson_interval(successes, trials, 1.959_963_984_540_054)
}

/// Wilson score interval at critical value `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Two-sided Kolmogorov-Smirnov statistic of `samples` against `cdf`.
/// `samples` need not be sorted.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Asymptotic KS critical value `c(alpha)/sqrt(n)`; `c(0.01) ~= 1.628`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_p_q_complement() {
        for &(a, x) in &[(1.0, 0.5), (2.0, 3.0), (2.0, 12.0), (5.5, 2.0), (10.0, 30.0)] {
            let p = gamma_p(a, x);
            let q = gamma_q(a, x);
            assert!((p + q - 1.0).abs() < 1e-12, "P+Q != 1 at a={a}, x={x}");
        }
    }

    #[test]
    fn gamma_q_shape_one_is_exponential_tail() {
        for &x in &[0.1, 1.0, 6.907755278982137, 20.0] {
            assert!((gamma_q(1.0, x) - (-x).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_q_shape_two_closed_form() {
        for &x in &[0.5f64, 2.0, 5.0, 12.0] {
            let expected = (-x).exp() * (1.0 + x);
            assert!((gamma_q(2.0, x) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn inv_gamma_q_round_trips() {
        for &a in &[1.0, 2.0, 3.0, 7.5] {
            for &q in &[0.5, 0.05, 1e-3, 1e-6] {
                let x = inv_gamma_q(a, q).unwrap();
                assert!((gamma_q(a, x) - q).abs() < 1e-10 * q.max(1e-9));
            }
        }
    }

    #[test]
    fn threshold_single_accumulation_is_log_inverse_pfa() {
        // n_acc = 1, L = 1: exponential tail, T_r = ln(1/p_fa)
        let t = threshold_from_pfa(0.001, 1, 1).unwrap();
        assert!((t - 1000f64.ln()).abs() < 1e-9, "T_r = {t}");
    }

    #[test]
    fn threshold_vanishes_as_pfa_approaches_one() {
        let t = threshold_from_pfa(1.0 - 1e-12, 1, 1).unwrap();
        assert!(t < 1e-9);
        // monotone decay toward zero in the multi-window, multi-accumulation case
        let far = threshold_from_pfa(1.0 - 1e-6, 2, 4).unwrap();
        let near = threshold_from_pfa(1.0 - 1e-12, 2, 4).unwrap();
        assert!(near < far && far < 0.2, "far {far}, near {near}");
    }

    #[test]
    fn threshold_grows_with_window_length() {
        let t1 = threshold_from_pfa(0.001, 2, 1).unwrap();
        let t15 = threshold_from_pfa(0.001, 2, 15).unwrap();
        assert!(t15 > t1);
    }

    #[test]
    fn threshold_rejects_bad_pfa() {
        assert!(threshold_from_pfa(0.0, 1, 1).is_err());
        assert!(threshold_from_pfa(1.0, 1, 1).is_err());
        assert!(threshold_from_pfa(-0.5, 1, 1).is_err());
    }

    #[test]
    fn censored_correction_matches_hand_computation_shape2() {
        // q = 0.05, shape 2: x_q solves e^-x (1+x) = 0.05
        let corr = censored_mean_correction(2.0, 0.05).unwrap();
        let x_q = inv_gamma_q(2.0, 0.05).unwrap();
        let kept = gamma_p(3.0, x_q);
        assert!((corr - 0.95 / kept).abs() < 1e-12);
        assert!(corr > 1.0 && corr < 1.3, "correction {corr}");
    }

    #[test]
    fn wilson_interval_brackets_proportion() {
        let (lo, hi) = wilson_interval_95(480, 500);
        let p = 480.0 / 500.0;
        assert!(lo < p && p < hi);
        assert!(lo > 0.93 && hi < 0.98);
        let (lo, hi) = wilson_interval_95(0, 100);
        assert!(lo.abs() < 1e-12);
        assert!(hi > 0.0 && hi < 0.05);
    }

    #[test]
    fn ks_statistic_detects_wrong_distribution() {
        // uniform samples against the uniform CDF: small statistic
        let samples: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d_ok = ks_statistic(&samples, |x| x.clamp(0.0, 1.0));
        assert!(d_ok < 0.01);
        // same samples against x^2: large statistic
        let d_bad = ks_statistic(&samples, |x| (x * x).clamp(0.0, 1.0));
        assert!(d_bad > 0.2);
    }
}
