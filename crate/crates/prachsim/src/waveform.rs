//! Format-0 PRACH waveform synthesis: subcarrier mapping of a shifted ZC
//! sequence and time-domain assembly of CP + SEQ + GP at the 6-RB uplink
//! sampling rate.
//!
//! Geometry is pinned to NULRB = 6 and preamble format 0: 1.92 MS/s, a
//! 1536-sample SEQ (0.8 ms, so the SEQ-length DFT has exactly 1.25 kHz bins
//! landing on the PRACH subcarriers), a 198-sample CP and a 186-sample guard
//! period closing the 1920-sample subframe. At this rate the receiver's
//! decimation stage is an identity, see [`crate::receiver`].

use crate::dsp::{self, Complex64};
use crate::error::{Result, SimError};
use crate::zc::{self, PreambleIdentity};

/// Samples per subframe at 1.92 MS/s.
pub const SUBFRAME_SAMPLES: usize = 1920;

/// PRACH subcarriers inside the 6-RB allocation (1.08 MHz / 1.25 kHz).
const ALLOCATION_BINS: usize = 864;

/// Fixed half-guard below the first occupied PRACH subcarrier. The 864-bin
/// allocation leaves 25 unused subcarrier widths around the 839 sequence
/// bins; 7 sit below the sequence, the remainder above.
pub const HALF_GUARD_BINS: usize = 7;

/// PRACH subcarriers per uplink resource block (180 kHz / 1.25 kHz).
const BINS_PER_RB: usize = 144;

/// Time/frequency geometry of one PRACH subframe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameGeometry {
    pub n_ulrb: u32,
    pub sample_rate: f64,
    pub subframe_samples: usize,
    pub cp_samples: usize,
    pub seq_samples: usize,
    pub gp_samples: usize,
    pub prach_scs: f64,
    pub freq_offset_rb: u32,
}

impl FrameGeometry {
    /// Index of the first occupied bin in the SEQ-length frequency grid.
    ///
    /// The 6-RB allocation spans -432..+432 PRACH bins around DC; the
    /// sequence starts [`HALF_GUARD_BINS`] above the allocation edge, plus
    /// any configured resource-block frequency offset. Bin indices wrap the
    /// usual DFT way (negative frequencies at the top of the grid).
    pub fn first_bin(&self) -> usize {
        let edge = -(ALLOCATION_BINS as i64) / 2;
        let k0 = edge
            + HALF_GUARD_BINS as i64
            + self.freq_offset_rb as i64 * BINS_PER_RB as i64;
        k0.rem_euclid(self.seq_samples as i64) as usize
    }

    /// Grid index carrying sequence sample `n`.
    pub fn prach_bin(&self, n: usize) -> usize {
        (self.first_bin() + n) % self.seq_samples
    }

    /// SEQ duration in seconds (0.8 ms for format 0).
    pub fn seq_duration(&self) -> f64 {
        self.seq_samples as f64 / self.sample_rate
    }

    pub fn cp_range(&self) -> std::ops::Range<usize> {
        0..self.cp_samples
    }

    pub fn seq_range(&self) -> std::ops::Range<usize> {
        self.cp_samples..self.cp_samples + self.seq_samples
    }

    pub fn gp_range(&self) -> std::ops::Range<usize> {
        self.cp_samples + self.seq_samples..self.subframe_samples
    }

    /// Applies a PRACH frequency offset in resource blocks.
    pub fn with_freq_offset(mut self, freq_offset_rb: u32) -> Result<Self> {
        if freq_offset_rb + 6 > self.n_ulrb {
            return Err(SimError::Config(format!(
                "frequency offset {freq_offset_rb} RB does not fit a 6-RB PRACH in {} RBs",
                self.n_ulrb
            )));
        }
        self.freq_offset_rb = freq_offset_rb;
        Ok(self)
    }
}

/// Derives the format-0 geometry for a given uplink bandwidth.
///
/// Only `n_ulrb = 6` (1.92 MS/s) and format 0 are supported: the CP is the
/// standard 3168 base-rate units scaled by 1/16, and the guard period is the
/// arithmetic remainder of the 1 ms subframe.
pub fn derive_geometry(n_ulrb: u32, format: u32) -> Result<FrameGeometry> {
    if format != 0 {
        return Err(SimError::Unsupported(format!(
            "preamble format {format}; only format 0 is supported"
        )));
    }
    if n_ulrb != 6 {
        return Err(SimError::Unsupported(format!(
            "NULRB {n_ulrb}; only the 6-RB geometry is supported"
        )));
    }
    let geometry = FrameGeometry {
        n_ulrb,
        sample_rate: 1.92e6,
        subframe_samples: SUBFRAME_SAMPLES,
        cp_samples: 198,
        seq_samples: 1536,
        gp_samples: SUBFRAME_SAMPLES - 198 - 1536,
        prach_scs: 1250.0,
        freq_offset_rb: 0,
    };
    debug_assert_eq!(
        geometry.cp_samples + geometry.seq_samples + geometry.gp_samples,
        geometry.subframe_samples
    );
    debug_assert_eq!(
        geometry.seq_samples as f64 * geometry.prach_scs,
        geometry.sample_rate
    );
    Ok(geometry)
}

/// Unitary 839-point DFT (`/sqrt(839)`), the sequence <-> subcarrier domain
/// transform. A cyclic shift of the sequence becomes a linear phase ramp
/// across the occupied bins, which is what keeps signature search windows
/// evenly spaced in the receiver's delay domain.
pub fn sequence_dft(seq: &[Complex64]) -> Vec<Complex64> {
    let mut buf = seq.to_vec();
    dsp::fft_in_place(&mut buf);
    let scale = 1.0 / (seq.len() as f64).sqrt();
    for s in &mut buf {
        *s *= scale;
    }
    buf
}

/// Unitary inverse of [`sequence_dft`].
pub fn sequence_idft(bins: &[Complex64]) -> Vec<Complex64> {
    let mut buf = bins.to_vec();
    dsp::ifft_in_place(&mut buf);
    let scale = 1.0 / (bins.len() as f64).sqrt();
    for s in &mut buf {
        *s *= scale;
    }
    buf
}

/// Places a shifted 839-sample sequence on its PRACH subcarriers: the bins
/// carry the sequence's unitary DFT, all other bins of the SEQ-length grid
/// are zero.
pub fn map_to_subcarriers(
    shifted_seq: &[Complex64],
    geometry: &FrameGeometry,
) -> Result<Vec<Complex64>> {
    if shifted_seq.len() != zc::N_ZC {
        return Err(SimError::Internal(format!(
            "subcarrier mapping expects {} sequence samples, got {}",
            zc::N_ZC,
            shifted_seq.len()
        )));
    }
    let spectrum = sequence_dft(shifted_seq);
    let mut grid = vec![Complex64::new(0.0, 0.0); geometry.seq_samples];
    for (n, &value) in spectrum.iter().enumerate() {
        grid[geometry.prach_bin(n)] = value;
    }
    Ok(grid)
}

/// Unitary inverse transform of a SEQ-length grid (`ifft / sqrt(N)`), the
/// exact inverse of the receiver's `fft / sqrt(N)` demap.
pub fn time_from_grid(grid: &[Complex64]) -> Vec<Complex64> {
    let mut buf = grid.to_vec();
    dsp::ifft_in_place(&mut buf);
    let scale = 1.0 / (grid.len() as f64).sqrt();
    for s in &mut buf {
        *s *= scale;
    }
    buf
}

/// One UE's transmit subframe.
#[derive(Debug, Clone)]
pub struct PreambleWaveform {
    pub samples: Vec<Complex64>,
    pub identity: PreambleIdentity,
    pub geometry: FrameGeometry,
}

impl PreambleWaveform {
    pub fn seq(&self) -> &[Complex64] {
        &self.samples[self.geometry.seq_range()]
    }

    pub fn cp(&self) -> &[Complex64] {
        &self.samples[self.geometry.cp_range()]
    }
}

/// Synthesizes the CP + SEQ + GP subframe for one preamble identity.
///
/// The SEQ portion is the inverse transform of the mapped grid, rescaled so
/// its mean per-sample power equals `amplitude^2`; the CP repeats the SEQ
/// tail and the guard period is zero.
pub fn synthesize_preamble(
    identity: &PreambleIdentity,
    geometry: &FrameGeometry,
    amplitude: f64,
) -> Result<PreambleWaveform> {
    if amplitude < 0.0 {
        return Err(SimError::Config(format!(
            "amplitude {amplitude} must be non-negative"
        )));
    }
    let (u, plan) = zc::resolve_preamble(identity)?;
    let root = zc::generate_root_sequence(u, zc::N_ZC)?;
    let shifted = zc::cyclic_shift(&root, plan.c_v)?;
    let grid = map_to_subcarriers(&shifted, geometry)?;
    let mut seq = time_from_grid(&grid);

    let mean_power = dsp::mean_power(&seq);
    let scale = if amplitude == 0.0 || mean_power == 0.0 {
        0.0
    } else {
        amplitude / mean_power.sqrt()
    };
    for s in &mut seq {
        *s *= scale;
    }

    let mut samples = vec![Complex64::new(0.0, 0.0); geometry.subframe_samples];
    samples[geometry.seq_range()].copy_from_slice(&seq);
    let cp_src = geometry.seq_samples - geometry.cp_samples;
    for i in 0..geometry.cp_samples {
        samples[i] = seq[cp_src + i];
    }
    Ok(PreambleWaveform {
        samples,
        identity: *identity,
        geometry: *geometry,
    })
}
