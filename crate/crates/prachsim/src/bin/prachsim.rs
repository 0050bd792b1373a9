//! Command-line front end: `sweep`, `pfa`, `observe` and `selftest`
//! subcommands over the library. Exit codes: 0 success, 1 configuration
//! error, 2 failed observation assertions.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use prachsim::config::{parse_config, SimConfig};
use prachsim::harness::{
    emit_results, run_cdr_sweep, run_observation_suite, run_pfa_calibration, run_selftest,
    ObservationSettings,
};
use prachsim::receiver::Detector;
use prachsim::SimError;

#[derive(Parser)]
#[command(name = "prachsim", version, about = "PRACH preamble detection link-level simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Configuration document (TOML); defaults apply when omitted
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override the master seed
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Override the number of subframes per grid point
    #[arg(long, value_name = "N")]
    subframes: Option<u64>,
    /// Output directory for CSV and plot script
    #[arg(long, value_name = "DIR", default_value = "results")]
    out: PathBuf,
    /// Reduced trial counts for quick runs
    #[arg(long)]
    quick: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep target SNR (and interference levels) and emit CDR curves
    Sweep(CommonArgs),
    /// Noise-only false-alarm calibration against the configured target
    Pfa(CommonArgs),
    /// Qualitative trend suite (interference observations)
    Observe(CommonArgs),
    /// Data-asset checksums and loopback health checks
    Selftest(CommonArgs),
}

fn load_config(args: &CommonArgs) -> Result<SimConfig, SimError> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| SimError::Io(format!("{}: {e}", path.display())))?,
        None => String::new(),
    };
    toml::from_str(&text).map_err(|e| SimError::Config(format!("config parse: {e}")))
}

fn cmd_sweep(args: &CommonArgs) -> Result<(), SimError> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| SimError::Io(format!("{}: {e}", path.display())))?,
        None => String::new(),
    };
    let mut spec = parse_config(&text)?;
    if let Some(seed) = args.seed {
        spec.master_seed = seed;
    }
    if let Some(n) = args.subframes {
        spec.n_subframes = n;
    }
    if args.quick {
        spec.n_subframes = spec.n_subframes.min(200);
    }
    eprintln!(
        "sweep: {} grid points x {} interference level(s) x {} subframes, seed {}",
        spec.snr_db_grid.len(),
        spec.interferer_snr_db.len().max(1),
        spec.n_subframes,
        spec.master_seed
    );
    let points = run_cdr_sweep(&spec)?;
    for p in &points {
        let level = p
            .interferer_snr_db
            .map(|x| format!("{x} dB"))
            .unwrap_or_else(|| "none".into());
        println!(
            "{:>10} | I-UE {:>8} | target {:>6} dB | CDR {:.4} [{:.4}, {:.4}] | false {}",
            p.scenario_kind.as_str(),
            level,
            p.snr_db,
            p.cdr,
            p.wilson_ci_95.0,
            p.wilson_ci_95.1,
            p.n_false
        );
    }
    let files = emit_results(&points, &args.out)?;
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_pfa(args: &CommonArgs) -> Result<(), SimError> {
    let config = load_config(args)?;
    let spec = config.build()?;
    let scenario = &spec.scenario;
    let detector = Detector::new(
        scenario.geometry,
        scenario.target.identity.logical_root_index,
        scenario.target.identity.cyclic_shift_idx,
        scenario.detector,
    )?;
    let n_subframes = args
        .subframes
        .unwrap_or(if args.quick { 2_000 } else { 20_000 });
    let seed = args.seed.unwrap_or(spec.master_seed);
    let n_rx_ants = scenario.target.channel.n_rx_ants;
    eprintln!("pfa: {n_subframes} noise-only subframes over {n_rx_ants} antennas, seed {seed}");
    let report = run_pfa_calibration(&detector, n_rx_ants, n_subframes, seed)?;
    println!(
        "windows {} | hits {} | per-window rate {:.6} [{:.6}, {:.6}] | target {:.6} | within 2x: {}",
        report.windows_tested,
        report.window_hits,
        report.per_window_rate,
        report.per_window_ci_95.0,
        report.per_window_ci_95.1,
        report.p_fa_target,
        report.within_factor_two()
    );
    println!(
        "subframes {} | >=1 detection in {} | per-subframe rate {:.5}",
        report.subframes, report.subframe_hits, report.per_subframe_rate
    );
    Ok(())
}

fn cmd_observe(args: &CommonArgs) -> Result<bool, SimError> {
    let config = load_config(args)?;
    let mut settings = ObservationSettings::new(config, args.quick);
    if let Some(seed) = args.seed {
        settings.master_seed = seed;
    }
    if let Some(n) = args.subframes {
        settings.n_subframes = n;
    }
    eprintln!(
        "observe: {} subframes per point, seed {}",
        settings.n_subframes, settings.master_seed
    );
    let ledger = run_observation_suite(&settings)?;
    for entry in &ledger.entries {
        let status = match entry.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "info",
        };
        println!("[{status}] {}: {} — {}", entry.id, entry.description, entry.details);
    }
    Ok(ledger.all_passed())
}

fn cmd_selftest(_args: &CommonArgs) -> Result<bool, SimError> {
    let results = run_selftest()?;
    let mut all_ok = true;
    for (name, ok) in results {
        println!("[{}] {name}", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    }
    Ok(all_ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sweep(args) => cmd_sweep(args).map(|()| true),
        Command::Pfa(args) => cmd_pfa(args).map(|()| true),
        Command::Observe(args) => cmd_observe(args),
        Command::Selftest(args) => cmd_selftest(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            // assertion failures (observe/selftest), not config errors
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
