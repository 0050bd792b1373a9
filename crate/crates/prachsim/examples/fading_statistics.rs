//! Fading model statistics: ETU tap powers recovered over many seeds, the
//! Rayleigh envelope distribution, and temporal variation at 70 Hz Doppler.
//!
//! Run with: cargo run --release --example fading_statistics

use prachsim::channel::{etu_profile, fading_gains, ChannelProfile};
use prachsim::numerics::{ks_critical_value, ks_statistic};

fn main() -> prachsim::Result<()> {
    let (delays, powers) = etu_profile();
    println!("== ETU delay profile ==");
    for (d, p) in delays.iter().zip(&powers) {
        println!("  {d:>6.0} ns  {p:>5.1} dB  ({:.3} samples at 1.92 MS/s)", d * 1e-9 * 1.92e6);
    }

    let n_seeds = 10_000;
    let reference = ChannelProfile::etu(0);
    let tap_powers = reference.linear_tap_powers();

    println!("\n== per-tap mean power over {n_seeds} seeds (normalized gains) ==");
    let mut samples_tap0 = Vec::with_capacity(n_seeds as usize);
    for tap in 0..delays.len() {
        let mut total = 0.0;
        for seed in 0..n_seeds {
            let profile = ChannelProfile::etu(seed);
            let g = fading_gains(&profile, 1, 0.0, 1.92e6, 0, tap)?[0];
            total += g.norm_sqr();
            if tap == 0 {
                samples_tap0.push(g.norm());
            }
        }
        let mean = total / n_seeds as f64;
        println!(
            "  tap {tap}: measured {mean:.5} vs configured {:.5} ({:+.2}%)",
            tap_powers[tap],
            (mean / tap_powers[tap] - 1.0) * 100.0
        );
    }

    let sigma2 = tap_powers[0];
    let d = ks_statistic(&samples_tap0, |r| 1.0 - (-r * r / sigma2).exp());
    let crit = ks_critical_value(samples_tap0.len(), 0.01);
    println!("\n== Rayleigh envelope, tap 0 ==");
    println!("KS statistic {d:.5} vs 1% critical value {crit:.5} -> {}",
        if d < crit { "consistent with Rayleigh" } else { "NOT Rayleigh" });

    println!("\n== temporal variation across one subframe (70 Hz Doppler) ==");
    let profile = ChannelProfile::etu(1);
    let trajectory = fading_gains(&profile, 1920, 0.0, 1.92e6, 0, 3)?;
    let first = trajectory.first().unwrap().norm();
    let last = trajectory.last().unwrap().norm();
    println!("  |h| moves {first:.4} -> {last:.4} over 1 ms");
    let mut frozen = profile.clone();
    frozen.doppler_hz = 0.0;
    let flat = fading_gains(&frozen, 1920, 0.0, 1.92e6, 0, 3)?;
    println!(
        "  zero Doppler: max deviation over the subframe {:.2e}",
        flat.iter().map(|g| (g - flat[0]).norm()).fold(0.0, f64::max)
    );
    Ok(())
}
