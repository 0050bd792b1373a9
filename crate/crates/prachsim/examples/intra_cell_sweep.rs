//! Intra-cell interference sweep: the target UE (root 22, preamble 32)
//! against a same-cell interferer on another preamble index, CDR vs target
//! SNR for two interference levels. Writes CSV + plot script to
//! `results/intra_cell/`.
//!
//! Run with: cargo run --release --example intra_cell_sweep

use std::path::Path;

use prachsim::channel::ChannelProfile;
use prachsim::harness::{emit_results, run_cdr_sweep, SweepSpec};
use prachsim::interference::make_intra_cell;
use prachsim::receiver::DetectorConfig;
use prachsim::waveform::derive_geometry;
use prachsim::zc::PreambleIdentity;

fn main() -> prachsim::Result<()> {
    let geometry = derive_geometry(6, 0)?;
    let identity = PreambleIdentity::new(22, 32, 1)?;
    let scenario = make_intra_cell(
        identity,
        &[0], // interferer preamble index (Fig. 4-style setup)
        f64::NEG_INFINITY,
        geometry,
        DetectorConfig::for_ncs(13),
        ChannelProfile::etu(1),
    )?;
    let spec = SweepSpec {
        snr_db_grid: vec![-30.0, -27.0, -24.0, -21.0, -18.0, -15.0, -12.0],
        interferer_snr_db: vec![-27.0, -22.0, -17.0],
        n_subframes: 300,
        master_seed: 1,
        scenario,
    };
    let points = run_cdr_sweep(&spec)?;
    for p in &points {
        println!(
            "I-UE {:>6} dB | target {:>6} dB | CDR {:.3} [{:.3}, {:.3}]",
            p.interferer_snr_db.unwrap(),
            p.snr_db,
            p.cdr,
            p.wilson_ci_95.0,
            p.wilson_ci_95.1
        );
    }
    let files = emit_results(&points, Path::new("results/intra_cell"))?;
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
