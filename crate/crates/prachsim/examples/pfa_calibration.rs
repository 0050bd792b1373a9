//! False-alarm calibration: the chi-square threshold against measured
//! noise-only detection rates, for a few (p_fa, accumulation) settings.
//!
//! Run with: cargo run --release --example pfa_calibration

use prachsim::harness::run_pfa_calibration;
use prachsim::numerics::threshold_from_pfa;
use prachsim::receiver::{Detector, DetectorConfig};
use prachsim::waveform::derive_geometry;

fn main() -> prachsim::Result<()> {
    let geometry = derive_geometry(6, 0)?;

    println!("== relative thresholds T_r = T_det / gamma_n ==");
    for (p_fa, n_acc, window) in [(0.001, 1, 1), (0.001, 2, 1), (0.001, 2, 15), (0.01, 2, 15)] {
        let t_r = threshold_from_pfa(p_fa, n_acc, window)?;
        println!("  p_fa {p_fa:<6} n_acc {n_acc} L {window:>2}: T_r = {t_r:.4}");
    }

    let n_subframes = 5_000;
    println!("\n== measured noise-only rates ({n_subframes} subframes, 64 windows each) ==");
    for p_fa in [0.001, 0.01] {
        let mut cfg = DetectorConfig::for_ncs(13);
        cfg.p_fa_target = p_fa;
        let detector = Detector::new(geometry, 22, 1, cfg)?;
        let report = run_pfa_calibration(&detector, 2, n_subframes, 7)?;
        println!(
            "  target {p_fa:<6}: per-window {:.5} [{:.5}, {:.5}], per-subframe {:.4}, within 2x: {}",
            report.per_window_rate,
            report.per_window_ci_95.0,
            report.per_window_ci_95.1,
            report.per_subframe_rate,
            report.within_factor_two()
        );
    }
    Ok(())
}
