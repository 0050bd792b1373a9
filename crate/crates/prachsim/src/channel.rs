//! Propagation channel: multipath Rayleigh fading with Doppler, per-UE
//! receive-power scaling and additive white Gaussian noise.
//!
//! Fading is a deterministic sum-of-sinusoids process. Each tap/antenna pair
//! gets `n_terms` oscillators with arrival angles spread evenly over the
//! circle (so the discrete Doppler spectrum approximates the classic
//! U-shape), random initial phases, and complex Gaussian oscillator
//! amplitudes. The Gaussian weighting makes the tap gain exactly
//! circularly-symmetric Gaussian at every time instant — Rayleigh envelope,
//! uniform phase — for any oscillator count, while the ensemble mean power
//! equals the configured linear tap power.
//!
//! Every random quantity is derived from explicit seeds through
//! [`crate::seeding`], so a (profile, trial) pair always produces the same
//! channel no matter the thread or call order.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::assets;
use crate::dsp::Complex64;
use crate::error::{Result, SimError};
use crate::seeding::{self, StreamRole};
use crate::waveform::{FrameGeometry, PreambleWaveform};

/// Length of the windowed-sinc fractional-delay interpolator.
pub const INTERP_TAPS: usize = 17;
const INTERP_HALF: i64 = (INTERP_TAPS as i64 - 1) / 2;

/// Fading model selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadingModel {
    /// Sum-of-sinusoids Rayleigh fading (the configured default).
    GmedsRayleigh,
    /// Single unit-gain tap at zero delay; used for loopback tests.
    Ideal,
}

/// Receive antenna correlation. "Low" is the identity matrix, i.e.
/// independent fading per antenna.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MimoCorrelation {
    Low,
}

/// Channel configuration (Table-3 style).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProfile {
    pub n_rx_ants: usize,
    pub tap_delays_ns: Vec<f64>,
    pub tap_powers_db: Vec<f64>,
    pub doppler_hz: f64,
    pub n_terms: usize,
    pub mimo_correlation: MimoCorrelation,
    pub model: FadingModel,
    pub normalize_path_gains: bool,
    pub seed: u64,
}

impl ChannelProfile {
    /// ETU / 70 Hz / 2 RX antennas profile used throughout the evaluation.
    pub fn etu(seed: u64) -> Self {
        let (delays, powers) = etu_profile();
        Self {
            n_rx_ants: 2,
            tap_delays_ns: delays,
            tap_powers_db: powers,
            doppler_hz: 70.0,
            n_terms: 16,
            mimo_correlation: MimoCorrelation::Low,
            model: FadingModel::GmedsRayleigh,
            normalize_path_gains: true,
            seed,
        }
    }

    /// Distortion-free channel (loopback).
    pub fn ideal(n_rx_ants: usize, seed: u64) -> Self {
        Self {
            n_rx_ants,
            tap_delays_ns: vec![0.0],
            tap_powers_db: vec![0.0],
            doppler_hz: 0.0,
            n_terms: 16,
            mimo_correlation: MimoCorrelation::Low,
            model: FadingModel::Ideal,
            normalize_path_gains: true,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rx_ants == 0 {
            return Err(SimError::Config("channel needs at least one RX antenna".into()));
        }
        if self.tap_delays_ns.len() != self.tap_powers_db.len() {
            return Err(SimError::Config(format!(
                "tap delay/power length mismatch: {} vs {}",
                self.tap_delays_ns.len(),
                self.tap_powers_db.len()
            )));
        }
        if self.tap_delays_ns.is_empty() {
            return Err(SimError::Config("channel needs at least one tap".into()));
        }
        for pair in self.tap_delays_ns.windows(2) {
            if pair[1] <= pair[0] {
                return Err(SimError::Config(
                    "tap delays must be strictly increasing".into(),
                ));
            }
        }
        if self.tap_delays_ns[0] < 0.0 {
            return Err(SimError::Config("tap delays must be non-negative".into()));
        }
        if self.n_terms == 0 && matches!(self.model, FadingModel::GmedsRayleigh) {
            return Err(SimError::Config("fading needs at least one oscillator".into()));
        }
        Ok(())
    }

    /// Linear tap powers, normalized to unit total when configured.
    pub fn linear_tap_powers(&self) -> Vec<f64> {
        let mut linear: Vec<f64> = self
            .tap_powers_db
            .iter()
            .map(|db| 10f64.powf(db / 10.0))
            .collect();
        if self.normalize_path_gains {
            let total: f64 = linear.iter().sum();
            for p in &mut linear {
                *p /= total;
            }
        }
        linear
    }
}

/// The standard 9-tap ETU delay profile, from the bundled asset.
pub fn etu_profile() -> (Vec<f64>, Vec<f64>) {
    let (delays, powers) = assets::etu_taps();
    (delays.clone(), powers.clone())
}

/// One received subframe: per-antenna samples plus the noise variance the
/// mixer used (fixed to 1).
#[derive(Debug, Clone)]
pub struct RxSubframe {
    pub antennas: Vec<Vec<Complex64>>,
    pub noise_variance: f64,
}

/// Complex gain trajectory of one (antenna, tap) pair over `n_samples`
/// starting at absolute time `t0`, sampled at `sample_rate`.
///
/// Deterministic in (profile.seed, antenna, tap): oscillator amplitudes and
/// phases are drawn from a stream keyed by exactly that tuple. With zero
/// Doppler every oscillator frequency collapses to zero and the trajectory is
/// constant. The ensemble mean power equals the tap's linear profile power.
pub fn fading_gains(
    profile: &ChannelProfile,
    n_samples: usize,
    t0: f64,
    sample_rate: f64,
    antenna: usize,
    tap: usize,
) -> Result<Vec<Complex64>> {
    profile.validate()?;
    match profile.model {
        FadingModel::Ideal => {
            let gain = if tap == 0 { 1.0 } else { 0.0 };
            Ok(vec![Complex64::new(gain, 0.0); n_samples])
        }
        FadingModel::GmedsRayleigh => {
            let powers = profile.linear_tap_powers();
            let tap_power = *powers.get(tap).ok_or_else(|| {
                SimError::Config(format!("tap {tap} out of range 0..{}", powers.len()))
            })?;
            Ok(sum_of_sinusoids(
                profile.seed,
                antenna as u64,
                tap as u64,
                profile.n_terms,
                profile.doppler_hz,
                tap_power,
                n_samples,
                t0,
                sample_rate,
            ))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn sum_of_sinusoids(
    seed: u64,
    antenna: u64,
    tap: u64,
    n_terms: usize,
    doppler_hz: f64,
    tap_power: f64,
    n_samples: usize,
    t0: f64,
    sample_rate: f64,
) -> Vec<Complex64> {
    let mut rng: ChaCha8Rng = seeding::rng_for(&[seed, antenna, tap, StreamRole::Fading.tag()]);
    let amp_scale = (tap_power / (2.0 * n_terms as f64)).sqrt();

    // phasor per oscillator at t0, advanced by a unit-modulus rotation per sample
    let mut phasors = Vec::with_capacity(n_terms);
    let mut rotators = Vec::with_capacity(n_terms);
    for k in 0..n_terms {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        let alpha = std::f64::consts::TAU * (k as f64 + 0.5) / n_terms as f64;
        let freq = doppler_hz * alpha.cos();
        let amplitude = Complex64::new(re, im) * amp_scale;
        phasors.push(amplitude * Complex64::from_polar(1.0, std::f64::consts::TAU * freq * t0 + theta));
        rotators.push(Complex64::from_polar(1.0, std::f64::consts::TAU * freq / sample_rate));
    }

    let mut out = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let mut acc = Complex64::new(0.0, 0.0);
        for (phasor, rot) in phasors.iter_mut().zip(&rotators) {
            acc += *phasor;
            *phasor *= *rot;
        }
        out.push(acc);
    }
    out
}

/// Windowed-sinc fractional-delay coefficients for fractional part `mu`.
fn interp_coefficients(mu: f64) -> [f64; INTERP_TAPS] {
    debug_assert!((0.0..1.0).contains(&mu));
    let mut coeffs = [0.0; INTERP_TAPS];
    let support = INTERP_HALF as f64 + 0.5;
    for (j, c) in coeffs.iter_mut().enumerate() {
        let s = (j as i64 - INTERP_HALF) as f64 - mu;
        let sinc = if s.abs() < 1e-12 {
            1.0
        } else {
            (std::f64::consts::PI * s).sin() / (std::f64::consts::PI * s)
        };
        let window = 0.54 + 0.46 * (std::f64::consts::PI * s / support).cos();
        *c = sinc * window;
    }
    coeffs
}

/// Delays `input` by `delay` samples (possibly fractional) into a same-length
/// buffer; samples outside the subframe are zero.
fn delayed(input: &[Complex64], delay: f64) -> Vec<Complex64> {
    debug_assert!(delay >= 0.0);
    let d_int = delay.floor() as i64;
    let mu = delay - d_int as f64;
    let n = input.len() as i64;
    if mu == 0.0 {
        // pure integer delay, bit-exact
        return (0..n)
            .map(|i| {
                let src = i - d_int;
                if (0..n).contains(&src) {
                    input[src as usize]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
    }
    let coeffs = interp_coefficients(mu);
    (0..n)
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &c) in coeffs.iter().enumerate() {
                let src = i - d_int - (j as i64 - INTERP_HALF);
                if (0..n).contains(&src) {
                    acc += input[src as usize] * c;
                }
            }
            acc
        })
        .collect()
}

/// Tapped-delay-line channel: per antenna, the sum over taps of the delayed
/// transmit waveform weighted by that tap's fading trajectory. The timing
/// offset (propagation delay) adds to every tap delay and must stay inside
/// the guard period.
pub fn apply_channel(
    tx: &PreambleWaveform,
    profile: &ChannelProfile,
    timing_offset_samples: f64,
    trial_seed: u64,
) -> Result<Vec<Vec<Complex64>>> {
    profile.validate()?;
    let geometry = &tx.geometry;
    if timing_offset_samples < 0.0 || timing_offset_samples >= geometry.gp_samples as f64 {
        return Err(SimError::Config(format!(
            "timing offset {timing_offset_samples} samples outside the guard period 0..{}",
            geometry.gp_samples
        )));
    }
    let sample_rate = geometry.sample_rate;
    let n = tx.samples.len();
    // fold the trial into the fading seed so each subframe sees a fresh,
    // reproducible channel realization
    let per_trial = ChannelProfile {
        seed: seeding::mix_words(&[profile.seed, trial_seed]),
        ..profile.clone()
    };

    let mut out = Vec::with_capacity(profile.n_rx_ants);
    for antenna in 0..profile.n_rx_ants {
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        for tap in 0..profile.tap_delays_ns.len() {
            let delay = profile.tap_delays_ns[tap] * 1e-9 * sample_rate + timing_offset_samples;
            let delayed_tx = delayed(&tx.samples, delay);
            let gains = fading_gains(&per_trial, n, 0.0, sample_rate, antenna, tap)?;
            for ((acc_s, tx_s), g) in acc.iter_mut().zip(&delayed_tx).zip(&gains) {
                *acc_s += tx_s * g;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Scales each noiseless contribution to its target SNR, sums them and adds
/// unit-variance circularly-symmetric Gaussian noise per antenna.
///
/// SNR convention: `sigma_n^2` is fixed to 1 per complex sample, and a
/// contribution at `snr_db` is scaled so the mean per-sample power of its
/// SEQ portion per antenna equals `10^(snr_db/10)` — exactly for a
/// distortion-free channel, in ensemble expectation under fading (whose
/// normalized path gains average to unit power). Contributions must
/// therefore enter at unit reference power (amplitude 1 at the transmitter).
///
/// An empty contribution list yields a valid noise-only subframe over
/// `n_rx_ants` antennas (used for false-alarm calibration).
pub fn mix_and_add_noise(
    contributions: &[(Vec<Vec<Complex64>>, f64)],
    n_rx_ants: usize,
    geometry: &FrameGeometry,
    trial_seed: u64,
) -> Result<RxSubframe> {
    let n_ants = n_rx_ants;
    if n_ants == 0 {
        return Err(SimError::Config("mixer needs at least one RX antenna".into()));
    }
    let n = geometry.subframe_samples;
    for (signals, _) in contributions {
        if signals.len() != n_ants {
            return Err(SimError::Internal(
                "contribution antenna count does not match n_rx_ants".into(),
            ));
        }
        if signals.iter().any(|s| s.len() != n) {
            return Err(SimError::Internal(
                "contribution length does not match the subframe".into(),
            ));
        }
    }

    let mut antennas = Vec::with_capacity(n_ants);
    for antenna in 0..n_ants {
        let mut rng = seeding::rng_for(&[trial_seed, antenna as u64, StreamRole::Noise.tag()]);
        // CN(0, 1): each quadrature N(0, 1/2)
        let sigma = std::f64::consts::FRAC_1_SQRT_2;
        let mut samples: Vec<Complex64> = (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * sigma, im * sigma)
            })
            .collect();
        for (signals, snr_db) in contributions {
            let scale = 10f64.powf(snr_db / 20.0);
            for (s, x) in samples.iter_mut().zip(&signals[antenna]) {
                *s += x * scale;
            }
        }
        antennas.push(samples);
    }
    Ok(RxSubframe {
        antennas,
        noise_variance: 1.0,
    })
}
