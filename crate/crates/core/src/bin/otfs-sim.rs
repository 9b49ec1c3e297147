//! Command-line front end: run sweeps, list presets, self-check, convert
//! velocity to Doppler.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use serde_json::json;

use otfs_trmrc::checks::run_checks;
use otfs_trmrc::experiments::{
    doppler_to_velocity, read_spec, run_experiment, run_experiment_with_threads,
    velocity_to_doppler, write_csv, Preset,
};
use otfs_trmrc::SimError;

/// Output directory used when `--out` is not given.
const OUT_DIR_ENV: &str = "OTFS_SIM_OUT_DIR";

#[derive(Parser)]
#[command(name = "otfs-sim", version, about = "CP-free OTFS with TR-MRC over LTV massive MIMO channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment file or a named preset and write CSV plus manifest.
    #[command(group(ArgGroup::new("source").required(true).args(["config", "preset"])))]
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_parser = ["fig1", "fig2", "fig3"])]
        preset: Option<String>,
        /// CSV path; defaults to `$OTFS_SIM_OUT_DIR/<name>.csv` (or `./<name>.csv`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Desk-scale version of a preset.
        #[arg(long)]
        quick: bool,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the built-in presets.
    Presets,
    /// Run the oracle and invariant self-checks.
    Check,
    /// Convert between relative velocity and maximum Doppler shift.
    #[command(group(ArgGroup::new("input").required(true).args(["kmh", "hz"])))]
    Doppler {
        #[arg(long)]
        kmh: Option<f64>,
        #[arg(long)]
        hz: Option<f64>,
        /// Carrier frequency in Hz.
        #[arg(long, default_value_t = 5.9e9)]
        fc: f64,
    },
}

fn exit_for(err: &SimError) -> ExitCode {
    eprintln!("error: {err}");
    if err.is_config() {
        ExitCode::from(2)
    } else {
        ExitCode::from(3)
    }
}

fn run(
    config: Option<PathBuf>,
    preset: Option<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    quick: bool,
    threads: Option<usize>,
) -> Result<(), SimError> {
    let (mut spec, source) = match (config, preset) {
        (Some(path), _) => {
            let spec = read_spec(&path)?;
            (spec, json!({ "config": path.display().to_string() }))
        }
        (None, Some(name)) => {
            let preset = Preset::from_name(&name)?;
            (preset.spec(quick, 1), json!({ "preset": name, "quick": quick }))
        }
        (None, None) => unreachable!("clap enforces one source"),
    };
    if let Some(seed) = seed {
        spec.master_seed = seed;
    }
    let out = out.unwrap_or_else(|| {
        let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
        dir.join(format!("{}.csv", spec.name))
    });
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }

    eprintln!(
        "running {} ({} cells x {} trials, T_s = {:.3} ns)",
        spec.name,
        spec.cells().len(),
        spec.trials,
        spec.sample_period() * 1e9
    );
    let started = std::time::Instant::now();
    let table = match threads {
        Some(t) => run_experiment_with_threads(&spec, t)?,
        None => run_experiment(&spec)?,
    };
    write_csv(&table, &out)?;

    let manifest = json!({
        "source": source,
        "master_seed": spec.master_seed,
        "sample_period_s": table.sample_period,
        "sample_rate_hz": 1.0 / table.sample_period,
        "subcarrier_rate_hz": spec.subcarrier_spacing_hz,
        "threads": threads.unwrap_or_else(rayon::current_num_threads),
        "elapsed_s": started.elapsed().as_secs_f64(),
        "versions": { "otfs-trmrc": env!("CARGO_PKG_VERSION") },
        "spec": spec,
        "csv": out.display().to_string(),
    });
    let manifest_path = out.with_extension("manifest.json");
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest).expect("manifest serializes"))?;
    println!("{}", out.display());
    println!("{}", manifest_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, preset, out, seed, quick, threads } => {
            match run(config, preset, out, seed, quick, threads) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => exit_for(&e),
            }
        }
        Command::Presets => {
            for p in Preset::ALL {
                println!("{:<6} {}", p.name(), p.description());
            }
            ExitCode::SUCCESS
        }
        Command::Check => {
            let results = run_checks();
            let mut ok = true;
            for r in &results {
                println!("[{}] {} ({})", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
                ok &= r.passed;
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Command::Doppler { kmh, hz, fc } => {
            if let Some(v) = kmh {
                let d = velocity_to_doppler(v, fc);
                println!("v_max = {:.2} Hz ({:.2} kHz) at V = {v} km/h, f_c = {fc:e} Hz", d, d / 1e3);
            } else if let Some(d) = hz {
                println!("V = {:.2} km/h for v_max = {d} Hz at f_c = {fc:e} Hz", doppler_to_velocity(d, fc));
            }
            ExitCode::SUCCESS
        }
    }
}
