//! Frequency-domain PRACH receiver and signature detector.
//!
//! Chain per subframe and antenna: CP/GP removal, SEQ-length forward
//! transform with subcarrier demapping (the frequency shift to the PRACH
//! offset is part of the demap indexing, and decimation is an identity at
//! 1.92 MS/s), bin-wise multiplication by the cached conjugate root spectrum,
//! zero-padded inverse transform of size `n_ca` to the delay domain,
//! non-coherent accumulation over antennas into a power delay profile,
//! censored-mean noise-floor estimation, per-signature windowed thresholding
//! and timing-advance extraction.
//!
//! Delay-domain scaling is calibrated so that under pure noise each antenna
//! branch sample is complex Gaussian with variance `n_ca * sigma_n^2`
//! (`sigma2_nca`), making the accumulated PDP a Gamma(`n_acc`, `sigma2_nca`)
//! variable with mean `gamma_n = n_acc * n_ca * sigma_n^2` — the noise floor
//! the relative threshold `T_r` refers to.
//!
//! Window orientation: signature `v`'s window starts at
//! `(n_ca - round(c_v * n_ca / 839)) mod n_ca` and a propagation delay of
//! `d` transmit samples moves the peak `d * n_ca / seq_samples` bins into
//! the window (increasing offset = increasing delay), which is the
//! orientation the delay-injection tests pin down. The timing advance is the
//! in-window offset times the delay-bin duration.

use crate::channel::RxSubframe;
use crate::dsp::{self, Complex64};
use crate::error::{Result, SimError};
use crate::numerics;
use crate::waveform::{sequence_dft, sequence_idft, FrameGeometry};
use crate::zc::{self, PreambleIdentity};

/// Fraction of the largest PDP samples excluded from the noise-floor mean.
pub const NOISE_FLOOR_CENSOR_FRACTION: f64 = 0.05;

/// Detector configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Delay-domain transform size; power of two, at least 839.
    pub n_ca: usize,
    /// Non-coherent accumulations per antenna (1 for format 0).
    pub n_nca: usize,
    /// Per-window false-alarm target driving the threshold.
    pub p_fa_target: f64,
    /// Search window length per signature, in delay-domain samples.
    pub search_window_samples: usize,
    /// Timing-advance error bound for a detection to count as correct.
    pub ta_tolerance_s: f64,
}

impl DetectorConfig {
    /// Default configuration for a given `N_CS`: 1024-point delay domain,
    /// windows spanning the whole zero-correlation zone, p_fa 0.1% and a
    /// conformance-style 1.04 us timing tolerance.
    pub fn for_ncs(n_cs: u32) -> Self {
        let n_ca = 1024;
        Self {
            n_ca,
            n_nca: 1,
            p_fa_target: 1e-3,
            search_window_samples: max_search_window(n_cs, n_ca),
            ta_tolerance_s: 1.04e-6,
        }
    }

    pub fn validate(&self, n_cs: u32) -> Result<()> {
        if self.n_ca < zc::N_ZC || !self.n_ca.is_power_of_two() {
            return Err(SimError::Config(format!(
                "n_ca {} must be a power of two >= {}",
                self.n_ca,
                zc::N_ZC
            )));
        }
        if self.n_nca == 0 {
            return Err(SimError::Config("n_nca must be at least 1".into()));
        }
        if !(self.p_fa_target > 0.0 && self.p_fa_target < 1.0) {
            return Err(SimError::Config(format!(
                "p_fa_target {} must lie in (0, 1)",
                self.p_fa_target
            )));
        }
        let cap = max_search_window(n_cs, self.n_ca);
        if self.search_window_samples == 0 || self.search_window_samples > cap {
            return Err(SimError::Config(format!(
                "search window {} outside 1..={cap} for N_CS {n_cs}",
                self.search_window_samples
            )));
        }
        if self.ta_tolerance_s <= 0.0 {
            return Err(SimError::Config("ta_tolerance_s must be positive".into()));
        }
        Ok(())
    }
}

/// Widest admissible search window: the zero-correlation zone width in
/// delay-domain samples (whole domain when `N_CS` is zero).
pub fn max_search_window(n_cs: u32, n_ca: usize) -> usize {
    if n_cs == 0 {
        n_ca
    } else {
        (n_cs as usize * n_ca) / zc::N_ZC
    }
}

/// Non-coherently accumulated power delay profile.
#[derive(Debug, Clone)]
pub struct PowerDelayProfile {
    pub values: Vec<f64>,
    pub noise_floor: f64,
    pub n_acc: usize,
}

impl PowerDelayProfile {
    /// Replaces the estimated noise floor with a genie value (calibration).
    pub fn with_noise_floor(mut self, noise_floor: f64) -> Self {
        self.noise_floor = noise_floor;
        self
    }
}

/// One detected signature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub preamble_index: u32,
    pub peak_value: f64,
    pub peak_offset_samples: usize,
    pub ta_seconds: f64,
}

/// Detector output for one subframe: detections sorted by descending peak
/// power, plus the thresholds used.
#[derive(Debug, Clone)]
pub struct DetectionReport {
    pub detections: Vec<Detection>,
    pub threshold_relative: f64,
    pub threshold_absolute: f64,
}

impl DetectionReport {
    /// The strongest detection, if any.
    pub fn strongest(&self) -> Option<&Detection> {
        self.detections.first()
    }

    pub fn contains_index(&self, preamble_index: u32) -> bool {
        self.detections
            .iter()
            .any(|d| d.preamble_index == preamble_index)
    }
}

/// Cached per-root detection context: the root's raw 839-point DFT and the
/// block of preamble indices its cyclic shifts host.
#[derive(Debug, Clone)]
pub struct RootContext {
    pub u: u32,
    pub n_cs: u32,
    pub base_preamble_index: u32,
    pub shifts_hosted: u32,
    spectrum: Vec<Complex64>,
}

impl RootContext {
    pub fn new(u: u32, n_cs: u32, base_preamble_index: u32, shifts_hosted: u32) -> Result<Self> {
        let root = zc::generate_root_sequence(u, zc::N_ZC)?;
        // unitary DFT of the root; unit modulus per bin for prime-length ZC
        let spectrum = sequence_dft(root.samples());
        Ok(Self {
            u,
            n_cs,
            base_preamble_index,
            shifts_hosted,
            spectrum,
        })
    }
}

/// Strips CP and GP, returning the SEQ portion per antenna.
pub fn remove_cp_gp(rx: &RxSubframe, geometry: &FrameGeometry) -> Result<Vec<Vec<Complex64>>> {
    rx.antennas
        .iter()
        .map(|antenna| {
            if antenna.len() != geometry.subframe_samples {
                return Err(SimError::Internal(format!(
                    "subframe length {} does not match geometry {}",
                    antenna.len(),
                    geometry.subframe_samples
                )));
            }
            Ok(antenna[geometry.seq_range()].to_vec())
        })
        .collect()
}

/// Forward transform and subcarrier demapping, the exact inverse of
/// [`crate::waveform::map_to_subcarriers`]: back to the 839-sample sequence
/// domain. Decimation is an identity at the 6-RB rate.
pub fn demap_subcarriers(
    seq_time: &[Vec<Complex64>],
    geometry: &FrameGeometry,
) -> Result<Vec<Vec<Complex64>>> {
    seq_time
        .iter()
        .map(|antenna| {
            if antenna.len() != geometry.seq_samples {
                return Err(SimError::Internal(format!(
                    "SEQ length {} does not match geometry {}",
                    antenna.len(),
                    geometry.seq_samples
                )));
            }
            let mut buf = antenna.clone();
            dsp::fft_in_place(&mut buf);
            let scale = 1.0 / (geometry.seq_samples as f64).sqrt();
            let bins: Vec<Complex64> = (0..zc::N_ZC)
                .map(|n| buf[geometry.prach_bin(n)] * scale)
                .collect();
            Ok(sequence_idft(&bins))
        })
        .collect()
}

/// Matched filter against one root: per antenna, multiply the demapped
/// spectrum bin-wise by the conjugate root spectrum, zero-pad to `n_ca` and
/// inverse-transform to the delay domain. One pass yields the concatenated
/// delay profiles of every signature derived from this root.
pub fn correlate_root(
    demapped: &[Vec<Complex64>],
    root: &RootContext,
    cfg: &DetectorConfig,
) -> Result<Vec<Vec<Complex64>>> {
    let n_zc = zc::N_ZC;
    // unit-modulus despreading (|root spectrum| = 1 after the unitary DFT)
    // keeps per-bin noise variance at sigma_n^2; the calibrated inverse
    // transform then yields delay-domain noise variance n_ca * sigma_n^2
    let idft_scale = (cfg.n_ca as f64 / n_zc as f64).sqrt();
    demapped
        .iter()
        .map(|antenna| {
            if antenna.len() != n_zc {
                return Err(SimError::Internal(format!(
                    "demapped length {} != {n_zc}",
                    antenna.len()
                )));
            }
            let spectrum_in = sequence_dft(antenna);
            let mut buf = vec![Complex64::new(0.0, 0.0); cfg.n_ca];
            for (k, value) in spectrum_in.iter().enumerate() {
                buf[k] = value * root.spectrum[k].conj();
            }
            dsp::ifft_in_place(&mut buf);
            for s in &mut buf {
                *s *= idft_scale;
            }
            Ok(buf)
        })
        .collect()
}

/// Non-coherent accumulation of squared magnitudes over antenna (and
/// repetition) branches. The noise floor is estimated from the result; use
/// [`PowerDelayProfile::with_noise_floor`] to override it with a genie value
/// in calibration tests.
pub fn accumulate_pdp(branches: &[Vec<Complex64>], cfg: &DetectorConfig) -> PowerDelayProfile {
    assert!(!branches.is_empty(), "need at least one branch");
    let n_acc = branches.len();
    let mut values = vec![0.0; cfg.n_ca];
    for branch in branches {
        for (acc, z) in values.iter_mut().zip(branch) {
            *acc += z.norm_sqr();
        }
    }
    let noise_floor = estimate_noise_floor(&values, n_acc);
    PowerDelayProfile {
        values,
        noise_floor,
        n_acc,
    }
}

/// Censored-mean noise-floor estimate: drop the top 5% order statistics
/// (robustness against preambles actually present), average the rest and
/// undo the censoring bias with the Gamma-tail correction factor, which
/// makes the estimate unbiased on pure noise to well within 1%.
pub fn estimate_noise_floor(values: &[f64], n_acc: usize) -> f64 {
    let n = values.len();
    if n == 0 {
        return f64::MIN_POSITIVE;
    }
    let censored = (NOISE_FLOOR_CENSOR_FRACTION * n as f64).ceil() as usize;
    let kept = n - censored;
    if kept == 0 {
        return f64::MIN_POSITIVE;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean: f64 = sorted[..kept].iter().sum::<f64>() / kept as f64;
    let censored_fraction = censored as f64 / n as f64;
    let correction = numerics::censored_mean_correction(n_acc as f64, censored_fraction)
        .expect("censored fraction in range");
    (mean * correction).max(f64::MIN_POSITIVE)
}

/// Start of signature `v`'s search window in the delay domain.
pub fn window_start(v: u32, n_cs: u32, n_ca: usize) -> usize {
    let c_v = (v * n_cs) as f64;
    let w = (c_v * n_ca as f64 / zc::N_ZC as f64).round() as usize % n_ca;
    (n_ca - w) % n_ca
}

/// Timing advance for a peak at `peak_offset` in the window starting at
/// `window_start`: in-window delay bins times the delay-bin duration
/// `T_seq / n_ca` (0.8 ms / 1024 ~= 0.781 us at the defaults).
pub fn ta_from_peak(
    peak_offset: usize,
    window_start: usize,
    cfg: &DetectorConfig,
    geometry: &FrameGeometry,
) -> f64 {
    let delta = (peak_offset + cfg.n_ca - window_start) % cfg.n_ca;
    delta as f64 * geometry.seq_duration() / cfg.n_ca as f64
}

/// Upper bound on the PDP level a peak of (discrete) height `1` can produce
/// `delta` bins away through the zero-padded matched-filter kernel.
///
/// The 839-bin rectangular spectral support gives a Dirichlet kernel whose
/// tail obeys `|D(x)| <= 1 / sin(pi*x/n_ca)` relative to the continuous peak
/// `839`; the observed discrete peak may underestimate the continuous one by
/// the worst-case half-bin main-lobe loss, folded in here. Used to reject
/// window candidates that a stronger detection fully explains as sidelobe.
pub fn sidelobe_bound(delta_bins: usize, n_ca: usize) -> f64 {
    debug_assert!(delta_bins >= 1);
    // worst-case fractional offset: sidelobe measured half a bin closer,
    // main lobe sampled half a bin off its center
    let x = (delta_bins as f64 - 0.5).max(0.5);
    let tail = 1.0 / (zc::N_ZC as f64 * (std::f64::consts::PI * x / n_ca as f64).sin());
    let mainlobe_loss = {
        let s = std::f64::consts::PI * 0.5 * zc::N_ZC as f64 / n_ca as f64;
        let d_half = s.sin() / (std::f64::consts::PI * 0.5 / n_ca as f64).sin();
        (d_half / zc::N_ZC as f64).powi(2)
    };
    tail * tail / mainlobe_loss
}

fn circular_distance(a: usize, b: usize, n: usize) -> usize {
    let d = (a + n - b) % n;
    d.min(n - d)
}

/// Scans every signature window of one root against the absolute threshold
/// `T_det = T_r * gamma_n` and reports at most one detection per window.
///
/// Matched-filter sidelobe rejection: window candidates are accepted in
/// decreasing peak order, and a candidate is dropped when an already
/// accepted stronger peak can fully explain it as zero-padding sidelobe
/// ([`sidelobe_bound`]). Without this, a strong preamble's near sidelobes
/// spill over the window boundary and fire the neighboring signature.
pub fn detect_signatures(
    pdp: &PowerDelayProfile,
    root: &RootContext,
    cfg: &DetectorConfig,
    geometry: &FrameGeometry,
) -> Result<DetectionReport> {
    cfg.validate(root.n_cs)?;
    let t_r = numerics::threshold_from_pfa(
        cfg.p_fa_target,
        pdp.n_acc as u32,
        cfg.search_window_samples as u32,
    )?;
    let t_det = t_r * pdp.noise_floor;
    let n_ca = cfg.n_ca;
    let values = &pdp.values;

    let mut candidates = Vec::new();
    for v in 0..root.shifts_hosted {
        let start = window_start(v, root.n_cs, n_ca);
        let (mut best_offset, mut best_value) = (start, f64::NEG_INFINITY);
        for i in 0..cfg.search_window_samples {
            let offset = (start + i) % n_ca;
            if values[offset] > best_value {
                best_value = values[offset];
                best_offset = offset;
            }
        }
        if best_value > t_det {
            candidates.push(Detection {
                preamble_index: root.base_preamble_index + v,
                peak_value: best_value,
                peak_offset_samples: best_offset,
                ta_seconds: ta_from_peak(best_offset, start, cfg, geometry),
            });
        }
    }
    candidates.sort_by(|a, b| b.peak_value.partial_cmp(&a.peak_value).unwrap());

    let mut detections: Vec<Detection> = Vec::with_capacity(candidates.len());
    for cand in candidates {
        let explained = detections.iter().any(|d| {
            let delta = circular_distance(cand.peak_offset_samples, d.peak_offset_samples, n_ca);
            cand.peak_value <= d.peak_value * sidelobe_bound(delta, n_ca)
        });
        if !explained {
            detections.push(cand);
        }
    }
    Ok(DetectionReport {
        detections,
        threshold_relative: t_r,
        threshold_absolute: t_det,
    })
}

/// Immutable full-chain detector for one cell: cached root spectra for every
/// root the cell's 64 preambles occupy. Safe to share across trial workers.
#[derive(Debug, Clone)]
pub struct Detector {
    geometry: FrameGeometry,
    cfg: DetectorConfig,
    roots: Vec<RootContext>,
}

impl Detector {
    pub fn new(
        geometry: FrameGeometry,
        logical_root_index: u32,
        cyclic_shift_idx: u32,
        cfg: DetectorConfig,
    ) -> Result<Self> {
        let n_cs = zc::ncs_from_config(cyclic_shift_idx, false)?;
        cfg.validate(n_cs)?;
        let per_root = zc::shifts_per_root(n_cs);
        let mut roots = Vec::new();
        let mut base = 0u32;
        while base < zc::PREAMBLES_PER_CELL {
            let identity = PreambleIdentity::new(logical_root_index, base, cyclic_shift_idx)?;
            let (u, _) = zc::resolve_preamble(&identity)?;
            let hosted = per_root.min(zc::PREAMBLES_PER_CELL - base);
            roots.push(RootContext::new(u, n_cs, base, hosted)?);
            base += per_root;
        }
        Ok(Self {
            geometry,
            cfg,
            roots,
        })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.cfg
    }

    pub fn geometry(&self) -> &FrameGeometry {
        &self.geometry
    }

    pub fn roots(&self) -> &[RootContext] {
        &self.roots
    }

    /// Runs the receive chain on one subframe. Returns the merged detection
    /// report and the PDP of the first root (the only root under the default
    /// cyclic shift configuration).
    pub fn detect(&self, rx: &RxSubframe) -> Result<(DetectionReport, PowerDelayProfile)> {
        self.detect_with_floor(rx, None)
    }

    /// Same as [`Detector::detect`] with an optional genie noise floor that
    /// bypasses the censored-mean estimator (calibration use).
    pub fn detect_with_floor(
        &self,
        rx: &RxSubframe,
        genie_floor: Option<f64>,
    ) -> Result<(DetectionReport, PowerDelayProfile)> {
        let seq = remove_cp_gp(rx, &self.geometry)?;
        let demapped = demap_subcarriers(&seq, &self.geometry)?;
        let mut merged = Vec::new();
        let mut threshold_relative = 0.0;
        let mut threshold_absolute = 0.0;
        let mut first_pdp = None;
        for root in &self.roots {
            let branches = correlate_root(&demapped, root, &self.cfg)?;
            let mut pdp = accumulate_pdp(&branches, &self.cfg);
            if let Some(floor) = genie_floor {
                pdp = pdp.with_noise_floor(floor);
            }
            let report = detect_signatures(&pdp, root, &self.cfg, &self.geometry)?;
            threshold_relative = report.threshold_relative;
            threshold_absolute = report.threshold_absolute;
            merged.extend(report.detections);
            if first_pdp.is_none() {
                first_pdp = Some(pdp);
            }
        }
        merged.sort_by(|a, b| b.peak_value.partial_cmp(&a.peak_value).unwrap());
        Ok((
            DetectionReport {
                detections: merged,
                threshold_relative,
                threshold_absolute,
            },
            first_pdp.expect("at least one root context"),
        ))
    }
}
