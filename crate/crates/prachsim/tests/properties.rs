//! Property tests over the sequence, waveform and resolution invariants.

use proptest::prelude::*;

use prachsim::dsp::{circular_correlation_magnitude, mean_power, Complex64};
use prachsim::receiver::{demap_subcarriers, max_search_window, window_start};
use prachsim::waveform::{derive_geometry, map_to_subcarriers, synthesize_preamble, time_from_grid};
use prachsim::zc::{
    cyclic_shift, generate_root_sequence, ncs_from_config, resolve_preamble, shifts_per_root,
    PreambleIdentity, N_ZC,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    // shift-correlation duality on the full 839-length sequences
    #[test]
    fn shift_peaks_at_cv(u in 1u32..839, c_v in 0u32..839) {
        let root = generate_root_sequence(u, N_ZC).unwrap();
        let shifted = cyclic_shift(&root, c_v).unwrap();
        let corr = circular_correlation_magnitude(&shifted, root.samples());
        let (peak_lag, peak) = corr
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, &v)| (i, v))
            .unwrap();
        prop_assert_eq!(peak_lag as u32, c_v);
        prop_assert!((peak - 839.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // subcarrier mapping round-trips through the transform pair
    #[test]
    fn map_demap_round_trip(seed in any::<u64>()) {
        let geometry = derive_geometry(6, 0).unwrap();
        let mut state = seed | 1;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let x: Vec<Complex64> = (0..N_ZC).map(|_| Complex64::new(next(), next())).collect();
        let grid = map_to_subcarriers(&x, &geometry).unwrap();
        let back = demap_subcarriers(&[time_from_grid(&grid)], &geometry).unwrap();
        for (a, b) in back[0].iter().zip(&x) {
            prop_assert!((a - b).norm() < 1e-9);
        }
    }

    // preamble resolution invariants across the whole configuration space
    #[test]
    fn resolution_invariants(logical in 0u32..838, preamble in 0u32..64, cs_idx in 0u32..16) {
        let identity = PreambleIdentity::new(logical, preamble, cs_idx).unwrap();
        match resolve_preamble(&identity) {
            Ok((u, plan)) => {
                prop_assert!(u >= 1 && u <= 838);
                let n_cs = ncs_from_config(cs_idx, false).unwrap();
                let per_root = shifts_per_root(n_cs);
                prop_assert!(plan.v < per_root);
                prop_assert_eq!(plan.c_v, plan.v * n_cs);
                prop_assert_eq!(plan.root_hop * per_root + plan.v, preamble);
                prop_assert!((plan.c_v as usize) < N_ZC);
            }
            Err(_) => {
                // only legal failure: consecutive roots run past logical 837
                let n_cs = ncs_from_config(cs_idx, false).unwrap();
                let per_root = shifts_per_root(n_cs);
                prop_assert!(logical + preamble / per_root > 837);
            }
        }
    }

    // search windows tile the delay domain without overlap for every N_CS
    #[test]
    fn windows_disjoint_for_any_ncs(cs_idx in 1u32..16) {
        let n_cs = ncs_from_config(cs_idx, false).unwrap();
        let n_ca = 1024;
        let window = max_search_window(n_cs, n_ca);
        let per_root = shifts_per_root(n_cs);
        let mut covered = vec![false; n_ca];
        for v in 0..per_root.min(64) {
            let start = window_start(v, n_cs, n_ca);
            for i in 0..window {
                let idx = (start + i) % n_ca;
                prop_assert!(!covered[idx], "overlap at {} for v {}", idx, v);
                covered[idx] = true;
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // synthesized waveforms keep the CP property and the power normalization
    #[test]
    fn waveform_structure(preamble in 0u32..64, amp_milli in 1u32..4000) {
        let amplitude = amp_milli as f64 / 1000.0;
        let geometry = derive_geometry(6, 0).unwrap();
        let identity = PreambleIdentity::new(22, preamble, 1).unwrap();
        let wf = synthesize_preamble(&identity, &geometry, amplitude).unwrap();
        prop_assert_eq!(wf.samples.len(), geometry.subframe_samples);
        let seq = wf.seq();
        prop_assert!((mean_power(seq) - amplitude * amplitude).abs() < 1e-9 * amplitude * amplitude);
        let tail = &seq[geometry.seq_samples - geometry.cp_samples..];
        prop_assert_eq!(wf.cp(), tail);
        for s in &wf.samples[geometry.gp_range()] {
            prop_assert_eq!(s.norm(), 0.0);
        }
    }
}
