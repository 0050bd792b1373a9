//! Shared DSP helpers: cached FFT plans and a few vector utilities.
//!
//! All transforms run in `f64`. Plans are cached globally by (size,
//! direction); `rustfft` plan objects are `Send + Sync` so cached plans can
//! be shared freely across worker threads.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::{Fft, FftDirection, FftPlanner};

pub use rustfft::num_complex::Complex64;

type PlanKey = (usize, bool);

fn plan_cache() -> &'static Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = plan_cache().lock().unwrap();
    cache
        .entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let direction = if inverse {
                FftDirection::Inverse
            } else {
                FftDirection::Forward
            };
            planner.plan_fft(len, direction)
        })
        .clone()
}

/// In-place forward DFT, unnormalized (`X[k] = sum_n x[n] e^{-j2pi kn/N}`).
pub fn fft_in_place(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// In-place inverse DFT, unnormalized (`x[n] = sum_k X[k] e^{+j2pi kn/N}`).
pub fn ifft_in_place(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// Mean per-sample power of a complex slice.
pub fn mean_power(samples: &[Complex64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len() as f64
}

/// Circular cross-correlation magnitude at every lag, computed directly in
/// O(N^2). `corr[lag] = |sum_n a[n] * conj(b[(n + lag) % N])|`, so a copy of
/// `b` cyclically shifted forward by `c` correlates against `b` with the peak
/// at lag `c`.
///
/// Brute-force on purpose: this is the independent oracle used by tests to
/// check the FFT-based correlator, so it must not share that code path.
pub fn circular_correlation_magnitude(a: &[Complex64], b: &[Complex64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len(), "correlation inputs must match in length");
    let n = a.len();
    (0..n)
        .map(|lag| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += a[k] * b[(k + lag) % n].conj();
            }
            acc.norm()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_ifft_round_trip_scales_by_n() {
        let n = 64;
        let orig: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut buf = orig.clone();
        fft_in_place(&mut buf);
        ifft_in_place(&mut buf);
        for (got, want) in buf.iter().zip(&orig) {
            let scaled = got / n as f64;
            assert!((scaled - want).norm() < 1e-12);
        }
    }

    #[test]
    fn brute_force_correlation_peaks_at_shift() {
        let n = 17;
        let base: Vec<Complex64> = (0..n)
            .map(|i| Complex64::from_polar(1.0, i as f64 * 1.9))
            .collect();
        let shifted: Vec<Complex64> = (0..n).map(|i| base[(i + 5) % n]).collect();
        let corr = circular_correlation_magnitude(&shifted, &base);
        let max_lag = corr
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(max_lag, 5);
    }
}
