//! `jamcap` binary: argument parsing, file plumbing, and exit codes.
//!
//! Exit codes are part of the contract:
//!   0 success; 1 malformed config or I/O failure; 2 verification
//!   discrepancies (or a dominance violation in `coupled`); 3 a run the
//!   config promised stable was flagged unstable.

use clap::{Parser, Subcommand};
use jamcap_cli::config::FlatConfig;
use jamcap_cli::simulate::{run_coupled, run_simulate, RunSpec};
use jamcap_cli::sweep::SweepConfig;
use jamcap_cli::{figures, sweep, verify};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "jamcap",
    version,
    about = "Covert-rate workbench for a jammed slotted random-access channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the bound set over a (p, alpha) grid and write one CSV
    Sweep {
        /// Flat key=value config file (defaults apply without one)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Worker threads for grid points (output bytes do not depend on this)
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Emit the standard figure set: one CSV and one SVG per attempt rate
    Figures {
        /// Output directory (created if missing)
        #[arg(long, default_value = "figures")]
        out_dir: PathBuf,
    },
    /// Run the slot simulator once and print run statistics
    Simulate {
        /// Flat key=value config file
        #[arg(long)]
        config: PathBuf,
        /// Trace CSV path (required when the config sets record_trace)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Drive a jammed system and an unjammed twin on shared randomness
    Coupled {
        /// Flat key=value config file
        #[arg(long)]
        config: PathBuf,
    },
    /// Cross-validate closed forms, bounds, solver, and simulator
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Sweep { config, out, jobs } => cmd_sweep(config.as_deref(), &out, jobs),
        Command::Figures { out_dir } => cmd_figures(&out_dir),
        Command::Simulate { config, out } => cmd_simulate(&config, out.as_deref()),
        Command::Coupled { config } => cmd_coupled(&config),
        Command::Verify => cmd_verify(),
    };
    ExitCode::from(code)
}

fn fail(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    1
}

fn load_config(path: Option<&Path>) -> Result<FlatConfig, String> {
    let Some(path) = path else { return Ok(FlatConfig::default()) };
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    FlatConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_sweep(config: Option<&Path>, out: &Path, jobs: Option<usize>) -> u8 {
    let flat = match load_config(config) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let cfg = match SweepConfig::from_flat(&flat) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let csv = match jobs {
        Some(jobs) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            pool.install(|| sweep::run(&cfg))
        }
        None => sweep::run(&cfg),
    };
    match fs::write(out, csv) {
        Ok(()) => 0,
        Err(e) => fail(format_args!("{}: {e}", out.display())),
    }
}

fn cmd_figures(out_dir: &Path) -> u8 {
    match figures::run(out_dir) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => fail(format_args!("{}: {e}", out_dir.display())),
    }
}

fn cmd_simulate(config: &Path, out: Option<&Path>) -> u8 {
    let flat = match load_config(Some(config)) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let spec = match RunSpec::from_flat(&flat) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    if spec.sim.record_trace && out.is_none() {
        return fail("record_trace = true needs --out for the trace CSV");
    }
    let result = match run_simulate(&spec) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    print!("{}", result.summary);
    if let (Some(trace), Some(path)) = (result.trace_csv, out) {
        if let Err(e) = fs::write(path, trace) {
            return fail(format_args!("{}: {e}", path.display()));
        }
    }
    result.exit_code as u8
}

fn cmd_coupled(config: &Path) -> u8 {
    let flat = match load_config(Some(config)) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let spec = match RunSpec::from_flat(&flat) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    match run_coupled(&spec) {
        Ok((summary, code)) => {
            print!("{summary}");
            code as u8
        }
        Err(e) => fail(e),
    }
}

fn cmd_verify() -> u8 {
    let records = verify::run_all();
    print!("{}", verify::render(&records));
    verify::exit_code(&records) as u8
}
