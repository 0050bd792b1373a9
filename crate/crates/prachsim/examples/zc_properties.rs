//! Zadoff-Chu sequence properties: constant modulus, ideal circular
//! autocorrelation, cross-root correlation at sqrt(839), and the logical
//! root mapping used by the evaluation scenarios.
//!
//! Run with: cargo run --release --example zc_properties

use prachsim::dsp::circular_correlation_magnitude;
use prachsim::zc::{
    cyclic_shift, generate_root_sequence, logical_to_physical_root, ncs_from_config,
    resolve_preamble, PreambleIdentity, N_ZC,
};

fn main() -> prachsim::Result<()> {
    println!("== root sequences ==");
    for logical in [0u32, 1, 2, 3, 4, 22] {
        let u = logical_to_physical_root(logical)?;
        println!("logical root {logical:>3} -> physical u = {u}");
    }

    let root = generate_root_sequence(1, N_ZC)?;
    let max_modulus_error = root
        .samples()
        .iter()
        .map(|s| (s.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    println!("\n== constant modulus (u = 1) ==");
    println!("max | |x(n)| - 1 | = {max_modulus_error:.2e}");

    let auto = circular_correlation_magnitude(root.samples(), root.samples());
    let off_peak = auto[1..].iter().cloned().fold(0.0, f64::max);
    println!("\n== circular autocorrelation (u = 1) ==");
    println!("lag 0: {:.3}  (sequence length {})", auto[0], N_ZC);
    println!("max off-peak magnitude: {off_peak:.2e}");

    let other = generate_root_sequence(129, N_ZC)?;
    let cross = circular_correlation_magnitude(root.samples(), other.samples());
    let lo = cross.iter().cloned().fold(f64::MAX, f64::min);
    let hi = cross.iter().cloned().fold(0.0, f64::max);
    println!("\n== cross-root correlation (u = 1 vs u = 129) ==");
    println!(
        "every lag in [{lo:.6}, {hi:.6}]; sqrt(839) = {:.6}",
        (N_ZC as f64).sqrt()
    );

    println!("\n== preamble resolution (cell root 22, cyclic shift index 1) ==");
    println!("N_CS = {}", ncs_from_config(1, false)?);
    for preamble in [0u32, 32, 63] {
        let identity = PreambleIdentity::new(22, preamble, 1)?;
        let (u, plan) = resolve_preamble(&identity)?;
        let shifted = cyclic_shift(&generate_root_sequence(u, N_ZC)?, plan.c_v)?;
        let corr = circular_correlation_magnitude(&shifted, root.samples());
        let peak_lag = corr
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        println!(
            "preamble {preamble:>2}: u = {u}, v = {:>2}, c_v = {:>3}; correlation peak at lag {peak_lag}",
            plan.v, plan.c_v
        );
    }
    Ok(())
}
