//! Zadoff-Chu root sequences, cyclic shifts and preamble-index resolution.
//!
//! A cell's preamble alphabet is built from one or more root ZC sequences of
//! prime length 839. Signatures within a cell are cyclic shifts of a common
//! root, spaced `N_CS` samples apart; when one root cannot host 64 signatures
//! the next consecutive logical root is consumed. The logical index to
//! physical root mapping and the unrestricted-set `N_CS` values come from
//! bundled data assets (see [`crate::assets`]).

use crate::assets;
use crate::dsp::Complex64;
use crate::error::{Result, SimError};

/// Sequence length for the long preamble formats. Prime.
pub const N_ZC: usize = 839;

/// Number of preamble signatures per cell.
pub const PREAMBLES_PER_CELL: u32 = 64;

/// A root Zadoff-Chu sequence `x_u(n) = exp(-j*pi*u*n*(n+1)/N_ZC)`.
#[derive(Debug, Clone)]
pub struct ZcRootSequence {
    u: u32,
    n_zc: usize,
    samples: Vec<Complex64>,
}

impl ZcRootSequence {
    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn n_zc(&self) -> usize {
        self.n_zc
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }
}

/// Placement of one signature within its root: shift number `v`, the shift
/// `c_v = v * N_CS` in samples, and how many consecutive logical roots were
/// consumed before this one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftPlan {
    pub v: u32,
    pub c_v: u32,
    pub n_cs: u32,
    pub root_hop: u32,
}

/// Cell- and UE-level preamble identity (Table-2 style configuration).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreambleIdentity {
    pub logical_root_index: u32,
    pub preamble_index: u32,
    pub cyclic_shift_idx: u32,
    pub high_speed: bool,
}

impl PreambleIdentity {
    pub fn new(logical_root_index: u32, preamble_index: u32, cyclic_shift_idx: u32) -> Result<Self> {
        let identity = Self {
            logical_root_index,
            preamble_index,
            cyclic_shift_idx,
            high_speed: false,
        };
        identity.validate()?;
        Ok(identity)
    }

    pub fn validate(&self) -> Result<()> {
        if self.high_speed {
            return Err(SimError::Unsupported(
                "restricted (high-speed) cyclic-shift sets are not supported".into(),
            ));
        }
        if self.logical_root_index > 837 {
            return Err(SimError::Config(format!(
                "logical root sequence index {} out of range 0..=837",
                self.logical_root_index
            )));
        }
        if self.preamble_index >= PREAMBLES_PER_CELL {
            return Err(SimError::Config(format!(
                "preamble index {} out of range 0..=63",
                self.preamble_index
            )));
        }
        ncs_from_config(self.cyclic_shift_idx, self.high_speed)?;
        Ok(())
    }
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Generates the root sequence for physical root `u` and prime length `n_zc`.
///
/// The phase argument `u*n*(n+1)/2` is reduced modulo `n_zc` in integer
/// arithmetic before touching floating point, so samples stay exact to
/// rounding even at the far end of the sequence.
pub fn generate_root_sequence(u: u32, n_zc: usize) -> Result<ZcRootSequence> {
    if !is_prime(n_zc) {
        return Err(SimError::Config(format!(
            "ZC sequence length {n_zc} must be prime"
        )));
    }
    if u == 0 || u as usize >= n_zc {
        return Err(SimError::Config(format!(
            "root index {u} must satisfy 0 < u < {n_zc}"
        )));
    }
    let modulus = 2 * n_zc as u64;
    let u64_u = u as u64;
    let samples = (0..n_zc as u64)
        .map(|n| {
            // u*n*(n+1) mod 2*N_ZC, then phase = -pi * that / N_ZC
            let quad = (n % modulus) * ((n + 1) % modulus) % modulus;
            let arg = (u64_u % modulus) * quad % modulus;
            let phase = -std::f64::consts::PI * arg as f64 / n_zc as f64;
            Complex64::from_polar(1.0, phase)
        })
        .collect();
    Ok(ZcRootSequence { u, n_zc, samples })
}

/// Cyclic shift per `x_{u,v}(n) = x_u((n + c_v) mod N_ZC)`.
pub fn cyclic_shift(seq: &ZcRootSequence, c_v: u32) -> Result<Vec<Complex64>> {
    let n = seq.n_zc;
    if c_v as usize >= n {
        return Err(SimError::Config(format!(
            "cyclic shift {c_v} out of range 0..{n}"
        )));
    }
    let samples = &seq.samples;
    Ok((0..n)
        .map(|i| samples[(i + c_v as usize) % n])
        .collect())
}

/// Unrestricted-set `N_CS` lookup. `N_CS = 0` means one signature per root
/// with no cyclic shift reuse.
pub fn ncs_from_config(cyclic_shift_idx: u32, high_speed: bool) -> Result<u32> {
    if high_speed {
        return Err(SimError::Unsupported(
            "high-speed (restricted set) N_CS tables are not supported".into(),
        ));
    }
    let table = assets::ncs_table();
    table
        .get(cyclic_shift_idx as usize)
        .copied()
        .ok_or_else(|| {
            SimError::Config(format!(
                "cyclic shift index {cyclic_shift_idx} outside the unrestricted-set table 0..=15"
            ))
        })
}

/// Logical root sequence index to physical root, format-0 mapping.
pub fn logical_to_physical_root(logical_index: u32) -> Result<u32> {
    assets::root_mapping()
        .get(logical_index as usize)
        .copied()
        .ok_or_else(|| {
            SimError::Config(format!(
                "logical root sequence index {logical_index} out of range 0..=837"
            ))
        })
}

/// Number of signatures hosted by one root for a given `N_CS`.
pub fn shifts_per_root(n_cs: u32) -> u32 {
    if n_cs == 0 {
        1
    } else {
        (N_ZC as u32) / n_cs
    }
}

/// Resolves a preamble identity to its physical root and shift plan.
pub fn resolve_preamble(identity: &PreambleIdentity) -> Result<(u32, ShiftPlan)> {
    identity.validate()?;
    let n_cs = ncs_from_config(identity.cyclic_shift_idx, identity.high_speed)?;
    let per_root = shifts_per_root(n_cs);
    let v = identity.preamble_index % per_root;
    let root_hop = identity.preamble_index / per_root;
    let logical = identity.logical_root_index + root_hop;
    if logical > 837 {
        return Err(SimError::Config(format!(
            "preamble index {} needs logical root {} + {} > 837; roots do not wrap",
            identity.preamble_index, identity.logical_root_index, root_hop
        )));
    }
    let u = logical_to_physical_root(logical)?;
    Ok((
        u,
        ShiftPlan {
            v,
            c_v: v * n_cs,
            n_cs,
            root_hop,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::circular_correlation_magnitude;

    const TOL: f64 = 1e-12;

    #[test]
    fn first_sample_is_one() {
        let seq = generate_root_sequence(22, N_ZC).unwrap();
        assert!((seq.samples()[0] - Complex64::new(1.0, 0.0)).norm() < TOL);
    }

    #[test]
    fn second_sample_matches_hand_evaluation() {
        // u = 1, n = 1: phase is -pi * 1 * 1 * 2 / 839 = -2pi/839
        let seq = generate_root_sequence(1, N_ZC).unwrap();
        let expected = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI / 839.0);
        assert!((seq.samples()[1] - expected).norm() < TOL);
    }

    #[test]
    fn constant_modulus() {
        for u in [1, 22, 129, 838] {
            let seq = generate_root_sequence(u, N_ZC).unwrap();
            for s in seq.samples() {
                assert!((s.norm() - 1.0).abs() < TOL);
            }
        }
    }

    #[test]
    fn ideal_autocorrelation_brute_force() {
        let seq = generate_root_sequence(22, N_ZC).unwrap();
        let corr = circular_correlation_magnitude(seq.samples(), seq.samples());
        assert!((corr[0] - 839.0).abs() < 1e-9);
        for &value in &corr[1..] {
            assert!(value < 1e-9 * 839.0, "off-peak autocorrelation {value}");
        }
    }

    #[test]
    fn cross_root_correlation_is_sqrt_nzc() {
        let a = generate_root_sequence(22, N_ZC).unwrap();
        let b = generate_root_sequence(129, N_ZC).unwrap();
        let corr = circular_correlation_magnitude(a.samples(), b.samples());
        let expected = (N_ZC as f64).sqrt();
        for value in corr {
            assert!(
                (value - expected).abs() / expected < 1e-6,
                "cross-correlation {value} vs sqrt(839) = {expected}"
            );
        }
    }

    #[test]
    fn zero_shift_is_identity() {
        let seq = generate_root_sequence(22, N_ZC).unwrap();
        let shifted = cyclic_shift(&seq, 0).unwrap();
        assert_eq!(shifted.len(), N_ZC);
        for (a, b) in shifted.iter().zip(seq.samples()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn shift_is_index_arithmetic() {
        let seq = generate_root_sequence(22, N_ZC).unwrap();
        let shifted = cyclic_shift(&seq, 13).unwrap();
        assert_eq!(shifted[0], seq.samples()[13]);
        assert_eq!(shifted[N_ZC - 1], seq.samples()[12]);
    }

    #[test]
    fn shift_moves_correlation_peak() {
        let seq = generate_root_sequence(1, N_ZC).unwrap();
        let shifted = cyclic_shift(&seq, 13).unwrap();
        let corr = circular_correlation_magnitude(&shifted, seq.samples());
        let (peak_lag, peak) = corr
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, &v)| (i, v))
            .unwrap();
        assert_eq!(peak_lag, 13);
        assert!((peak - 839.0).abs() < 1e-9);
    }

    #[test]
    fn out_of_range_shift_rejected() {
        let seq = generate_root_sequence(1, N_ZC).unwrap();
        assert!(cyclic_shift(&seq, 839).is_err());
    }

    #[test]
    fn non_prime_length_rejected() {
        assert!(generate_root_sequence(1, 840).is_err());
        assert!(generate_root_sequence(0, N_ZC).is_err());
        assert!(generate_root_sequence(839, N_ZC).is_err());
    }

    #[test]
    fn ncs_lookup_matches_table() {
        assert_eq!(ncs_from_config(1, false).unwrap(), 13);
        assert_eq!(ncs_from_config(0, false).unwrap(), 0);
        assert_eq!(ncs_from_config(15, false).unwrap(), 419);
        assert!(ncs_from_config(16, false).is_err());
        assert!(ncs_from_config(1, true).is_err());
        // csIdx 1 hosts all 64 preamble indices on one root
        assert_eq!(shifts_per_root(13), 64);
    }

    #[test]
    fn logical_mapping_spot_checks() {
        assert_eq!(logical_to_physical_root(0).unwrap(), 129);
        assert_eq!(logical_to_physical_root(22).unwrap(), 1);
        assert_eq!(logical_to_physical_root(1).unwrap(), 710);
        assert_eq!(logical_to_physical_root(4).unwrap(), 120);
        assert!(logical_to_physical_root(838).is_err());
    }

    #[test]
    fn gcd_with_839_is_one_for_every_logical_index() {
        fn gcd(mut a: u32, mut b: u32) -> u32 {
            while b != 0 {
                let t = b;
                b = a % b;
                a = t;
            }
            a
        }
        for logical in 0..=837 {
            let u = logical_to_physical_root(logical).unwrap();
            assert_eq!(gcd(u, 839), 1);
        }
    }

    #[test]
    fn resolve_preamble_examples() {
        let id = PreambleIdentity::new(22, 0, 1).unwrap();
        let (u, plan) = resolve_preamble(&id).unwrap();
        assert_eq!(u, 1);
        assert_eq!((plan.v, plan.c_v, plan.root_hop), (0, 0, 0));

        let id = PreambleIdentity::new(22, 32, 1).unwrap();
        let (u, plan) = resolve_preamble(&id).unwrap();
        assert_eq!(u, 1);
        assert_eq!((plan.v, plan.c_v, plan.root_hop), (32, 416, 0));

        let id = PreambleIdentity::new(22, 63, 1).unwrap();
        let (_, plan) = resolve_preamble(&id).unwrap();
        assert_eq!((plan.v, plan.c_v, plan.root_hop), (63, 819, 0));
    }

    #[test]
    fn resolve_preamble_hops_roots_when_ncs_large() {
        // csIdx 15 -> N_CS 419 -> 2 signatures per root
        let id = PreambleIdentity::new(10, 5, 15).unwrap();
        let (u, plan) = resolve_preamble(&id).unwrap();
        assert_eq!(plan.root_hop, 2);
        assert_eq!(plan.v, 1);
        assert_eq!(plan.c_v, 419);
        assert_eq!(u, logical_to_physical_root(12).unwrap());
    }

    #[test]
    fn resolve_preamble_rejects_root_overflow() {
        // logical 837 with root hop >= 1 must fail rather than wrap
        let id = PreambleIdentity::new(837, 3, 15).unwrap();
        assert!(resolve_preamble(&id).is_err());
    }

    #[test]
    fn shift_number_recoverable_from_correlation_peak() {
        // resolve_preamble round-trips: the correlation peak lag divided by
        // N_CS recovers the shift number v
        let seq = generate_root_sequence(1, N_ZC).unwrap();
        for &preamble in &[0u32, 5, 32, 63] {
            let id = PreambleIdentity::new(22, preamble, 1).unwrap();
            let (_, plan) = resolve_preamble(&id).unwrap();
            let shifted = cyclic_shift(&seq, plan.c_v).unwrap();
            let corr = circular_correlation_magnitude(&shifted, seq.samples());
            let peak_lag = corr
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0 as u32;
            assert_eq!(peak_lag / plan.n_cs, plan.v);
        }
    }

    #[test]
    fn distinct_preambles_separate_by_ncs() {
        let seq = generate_root_sequence(1, N_ZC).unwrap();
        let a = cyclic_shift(&seq, 13).unwrap();
        let b = cyclic_shift(&seq, 26).unwrap();
        let corr_a = circular_correlation_magnitude(&a, seq.samples());
        let corr_b = circular_correlation_magnitude(&b, seq.samples());
        let peak = |c: &[f64]| {
            c.iter()
                .enumerate()
                .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
                .unwrap()
                .0 as i64
        };
        assert!((peak(&corr_a) - peak(&corr_b)).unsigned_abs() >= 13);
    }
}
