//! Qualitative trend suite in quick mode: interference-level monotonicity
//! and parameter-insensitivity checks over reduced trial counts.
//!
//! Run with: cargo run --release --example observation_suite

use prachsim::config::SimConfig;
use prachsim::harness::{run_observation_suite, ObservationSettings};

fn main() -> prachsim::Result<()> {
    let settings = ObservationSettings::new(SimConfig::default(), true);
    eprintln!(
        "running {} subframes per grid point (quick mode)...",
        settings.n_subframes
    );
    let ledger = run_observation_suite(&settings)?;
    for entry in &ledger.entries {
        let status = match entry.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "info",
        };
        println!("[{status}] {}: {}", entry.id, entry.description);
        println!("        {}", entry.details);
    }
    std::process::exit(if ledger.all_passed() { 0 } else { 2 });
}
