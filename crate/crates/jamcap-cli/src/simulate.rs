//! Slot-level simulation commands: a single policy run with channel
//! statistics, and the coupled jammed/unjammed dominance experiment.
//!
//! Both read the flat config for parameters, policy, and run length, print
//! a fixed-order `key = value` summary (deterministic for a fixed seed),
//! and leave file output to the caller: `run_simulate` returns the optional
//! trace CSV alongside the summary so the binary decides where it goes.

use crate::config::{ConfigError, FlatConfig};
use crate::fmtnum::g6;
use jamcap::sim::{channel_stats, coupled_run, simulate};
use jamcap::{JamPolicy, SimConfig, StabilityVerdict, SystemParams};
use std::fmt::Write as _;

/// Everything a simulation command needs from the flat config.
pub struct RunSpec {
    pub params: SystemParams,
    pub policy: JamPolicy,
    pub sim: SimConfig,
    pub expect_stable: bool,
}

impl RunSpec {
    pub fn from_flat(cfg: &FlatConfig) -> Result<Self, ConfigError> {
        let params = cfg.system()?;
        let policy = cfg.policy(params.n)?;
        let horizon = cfg.usize_or("horizon", 1_000_000)?;
        let warmup = cfg.usize_or("warmup", (horizon / 10).min(10_000))?;
        let seed = cfg.u64_opt("seed")?.unwrap_or(1);
        let record_trace = cfg.bool_or("record_trace", false)?;
        let sim = SimConfig::new(horizon, warmup, seed, record_trace)
            .map_err(|e| ConfigError(e.to_string()))?;
        Ok(RunSpec { params, policy, sim, expect_stable: cfg.bool_or("expect_stable", false)? })
    }

    fn describe(&self, out: &mut String) {
        let p = &self.params;
        let _ = writeln!(
            out,
            "n = {}  p = {}  lambda = {}  alpha = {}",
            p.n,
            g6(p.p),
            g6(p.lambda),
            g6(p.alpha())
        );
        match &self.policy {
            JamPolicy::Uniform { q } => {
                let _ = writeln!(out, "policy = uniform  q = {}", g6(*q));
            }
            JamPolicy::SideInfo { q, w } => {
                let _ = writeln!(out, "policy = sideinfo  q = {}  w = {}", g6(*q), g6(*w));
            }
            JamPolicy::Vector { qs } => {
                let qs: Vec<String> = qs.iter().map(|&q| g6(q)).collect();
                let _ = writeln!(out, "policy = vector  qvec = [{}]", qs.join(", "));
            }
        }
        let _ = writeln!(
            out,
            "horizon = {}  warmup = {}  seed = {}",
            self.sim.horizon, self.sim.warmup, self.sim.seed
        );
    }
}

fn verdict_word(v: StabilityVerdict) -> &'static str {
    match v {
        StabilityVerdict::Stable => "stable",
        StabilityVerdict::Unstable => "unstable",
        StabilityVerdict::Inconclusive => "inconclusive",
    }
}

fn vec_g6(vs: &[f64]) -> String {
    let cells: Vec<String> = vs.iter().map(|&v| g6(v)).collect();
    format!("[{}]", cells.join(", "))
}

/// Result of `run_simulate`: printable summary, optional trace CSV, exit code.
pub struct SimulateOutput {
    pub summary: String,
    pub trace_csv: Option<String>,
    pub exit_code: i32,
}

/// Run one simulation and render the summary.  Exit code 3 is reserved for
/// the case the config promised stability and the run disagreed.
pub fn run_simulate(spec: &RunSpec) -> Result<SimulateOutput, jamcap::Error> {
    let run = simulate(&spec.params, &spec.policy, &spec.sim)?;
    let stats = &run.stats;

    let mut out = String::new();
    spec.describe(&mut out);
    let _ = writeln!(out, "pi = {}", vec_g6(&stats.occupancy.pi));
    let _ = writeln!(out, "pi_se = {}", vec_g6(&stats.occupancy_se));
    let _ = writeln!(out, "active_fraction = {}", g6(stats.active_fraction));
    match channel_stats(stats) {
        Ok(ch) => {
            let _ = writeln!(
                out,
                "crossover_hat = {}  se = {}",
                g6(ch.crossover_hat),
                g6(ch.crossover_se)
            );
            let _ = writeln!(out, "mi_per_active_slot = {}", g6(ch.mi_per_active_slot));
            let _ = writeln!(out, "mi_per_slot = {}", g6(ch.mi_per_slot));
        }
        Err(e) => {
            // Too little activity to estimate the channel (an empty system
            // included): no crossover estimate and zero information moved.
            let _ = writeln!(out, "crossover_hat = -  ({e})");
            let _ = writeln!(out, "mi_per_active_slot = 0");
            let _ = writeln!(out, "mi_per_slot = 0");
        }
    }
    let _ = writeln!(out, "queue_mean = {}  queue_max = {}", g6(stats.queue_mean), stats.queue_max);
    let _ = writeln!(out, "verdict = {}", verdict_word(stats.verdict));

    let exit_code =
        if spec.expect_stable && stats.verdict == StabilityVerdict::Unstable { 3 } else { 0 };
    Ok(SimulateOutput { summary: out, trace_csv: run.trace.as_deref().map(render_trace), exit_code })
}

/// Trace CSV: one row per slot with start-of-slot queues, the applied
/// attempts as a bitmask (bit i = user i+1), and the slot outcome flags.
fn render_trace(trace: &[jamcap::SlotRecord]) -> String {
    let n = trace.first().map_or(0, |r| r.queues.len());
    let mut out = String::from("slot");
    for i in 1..=n {
        let _ = write!(out, ",q{i}");
    }
    out.push_str(",attempts_bitmask,active,jam,collision,bob_symbol\n");
    for rec in trace {
        let _ = write!(out, "{}", rec.slot);
        for q in &rec.queues {
            let _ = write!(out, ",{q}");
        }
        let mask: u64 = rec
            .attempts
            .iter()
            .enumerate()
            .map(|(i, &a)| if a { 1u64 << i } else { 0 })
            .sum();
        let _ = writeln!(
            out,
            ",{mask},{},{},{},{}",
            u8::from(rec.active),
            u8::from(rec.jam),
            u8::from(rec.collision),
            rec.bob_symbol.as_char()
        );
    }
    out
}

/// Run the coupled dominance experiment and render the report.  Exit code 2
/// signals a dominance violation (the sample-path argument says there are
/// none).
pub fn run_coupled(spec: &RunSpec) -> Result<(String, i32), jamcap::Error> {
    let report = coupled_run(&spec.params, &spec.policy, &spec.sim)?;
    let mut out = String::new();
    spec.describe(&mut out);
    let _ = writeln!(out, "violations = {}", report.violations);
    let _ = writeln!(
        out,
        "first_violation = {}",
        report.first_violation.map_or("-".to_string(), |t| t.to_string())
    );
    let _ = writeln!(out, "busy_both_jammed = {}", g6(report.busy_both_jammed));
    let _ = writeln!(out, "busy_both_unjammed = {}", g6(report.busy_both_unjammed));
    let _ = writeln!(out, "dominance_holds = {}", report.holds());
    Ok((out, if report.holds() { 0 } else { 2 }))
}
