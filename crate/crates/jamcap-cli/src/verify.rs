//! Cross-validation suite: every analytic claim the library builds on is
//! checked against an independent route (a second closed form, the truncated
//! chain solver, or a long simulation), and every comparison is emitted as a
//! machine-readable discrepancy record.
//!
//! A record's status follows one rule: `fail` exactly when
//! `|expected - observed| > tolerance`.  A check that cannot produce a number
//! (e.g. the chain solver refusing a critically loaded system that the closed
//! form happily describes) reports `warn` with an unavailable observation.
//!
//! The suite is *expected* to contain failures on a healthy build: the
//! closed-form occupancy family and its side-informed variant are flow-balance
//! heuristics, not the stationary law of the simulated chain, and the
//! saturation-mass floor is violated beyond two users.  The report makes
//! those gaps visible instead of hiding them; the process exit code (2 when
//! any record fails) signals that the discrepancies are real.

use crate::fmtnum::g6;
use jamcap::bounds::{
    lb_n_strategy1, lb_n_strategy2, lb_strategy1, lb_strategy2, lb_strategy3, ub_n_user,
    ub_n_user_variants, ub_two_user,
};
use jamcap::dtmc::dtmc_stationary_truncated;
use jamcap::queue_model::{pi_n0_lower_bound, steady_state_sideinfo, steady_state_uniform};
use jamcap::sim::{channel_stats, coupled_run, simulate};
use jamcap::zchannel::{
    crossover_k, optimal_weight, optimal_weight_numeric, z_capacity_constrained, z_rate,
};
use jamcap::{JamPolicy, OccupancyDist, SimConfig, SystemParams, TruncationSpec};
use std::fmt::Write as _;

// -----------------------------------------------------------------------------
// Records
// -----------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Warn,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Warn => "warn",
        }
    }
}

/// One comparison: an expected value, an observed value, and the tolerance
/// that separates agreement from discrepancy.
#[derive(Debug, Clone)]
pub struct Record {
    pub check_id: String,
    pub status: Status,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
}

impl Record {
    /// Status is derived, never chosen: fail iff the gap exceeds tolerance.
    pub fn check(check_id: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        let status =
            if (expected - observed).abs() > tolerance { Status::Fail } else { Status::Pass };
        Record { check_id: check_id.into(), status, expected, observed, tolerance }
    }

    /// The comparison could not be made; an unavailable observation is NaN,
    /// which the fail rule never triggers on.
    pub fn unavailable(check_id: impl Into<String>, expected: f64) -> Self {
        Record {
            check_id: check_id.into(),
            status: Status::Warn,
            expected,
            observed: f64::NAN,
            tolerance: 0.0,
        }
    }
}

/// Render the report: one tab-separated line per record plus a count summary.
pub fn render(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.check_id,
            r.status.as_str(),
            g6(r.expected),
            if r.observed.is_nan() { "-".to_string() } else { g6(r.observed) },
            g6(r.tolerance)
        );
    }
    let pass = records.iter().filter(|r| r.status == Status::Pass).count();
    let fail = records.iter().filter(|r| r.status == Status::Fail).count();
    let warn = records.iter().filter(|r| r.status == Status::Warn).count();
    let _ = writeln!(out, "# checks = {}  pass = {pass}  fail = {fail}  warn = {warn}", records.len());
    out
}

pub fn exit_code(records: &[Record]) -> i32 {
    if records.iter().any(|r| r.status == Status::Fail) {
        2
    } else {
        0
    }
}

// -----------------------------------------------------------------------------
// Shared helpers
// -----------------------------------------------------------------------------

fn two_user_reference() -> SystemParams {
    SystemParams::from_alpha(2, 0.5, 0.8).unwrap()
}

fn oracle_trunc() -> TruncationSpec {
    TruncationSpec::new(200, 1e-9).unwrap()
}

/// Active-slot fraction of a two-user occupancy.
fn active_of(pi: &OccupancyDist, p: f64) -> f64 {
    let ph = 1.0 - p;
    pi.pi[1] * p + pi.pi[2] * (1.0 - ph * ph)
}

/// Collision probability given an active slot, for a two-user occupancy:
/// only the both-backlogged state can collide on its own.
fn crossover_of(pi: &OccupancyDist, p: f64) -> f64 {
    let ph = 1.0 - p;
    let pc = crossover_k(2, p).unwrap();
    pi.pi[2] * (1.0 - ph * ph) * pc / active_of(pi, p)
}

// -----------------------------------------------------------------------------
// Z-channel families
// -----------------------------------------------------------------------------

/// Unconstrained-capacity identity, the optimizing weight, and the pairwise
/// crossover arithmetic.
pub fn zchannel_records() -> Vec<Record> {
    let mut out = Vec::new();
    for i in 1..=19 {
        let pc = i as f64 * 0.05;
        let expected = (1.0 + (1.0 - pc) * pc.powf(pc / (1.0 - pc))).log2();
        let observed = z_capacity_constrained(1.0, pc).unwrap();
        out.push(Record::check(format!("zcap_identity[pc={}]", g6(pc)), expected, observed, 1e-9));
    }
    out.push(Record::check("zcap_weight[pc=0.5]", 0.4, optimal_weight(0.5).unwrap(), 1e-6));
    out.push(Record::check(
        "zcap_weight[pc=0.5].numeric",
        optimal_weight(0.5).unwrap(),
        optimal_weight_numeric(0.5).unwrap(),
        1e-9,
    ));
    for p in [0.2, 0.5, 0.8] {
        out.push(Record::check(
            format!("crossover_pair[p={}]", g6(p)),
            p / (2.0 - p),
            crossover_k(2, p).unwrap(),
            1e-12,
        ));
    }
    let worst = (2..=7)
        .map(|k| crossover_k(k, 0.5).unwrap() - crossover_k(k + 1, 0.5).unwrap())
        .fold(0.0f64, f64::max);
    out.push(Record::check("crossover_monotone[p=0.5]", 0.0, worst.max(0.0), 1e-15));
    out
}

// -----------------------------------------------------------------------------
// Closed occupancy vs the chain
// -----------------------------------------------------------------------------

/// The uniform-policy closed occupancy against the truncated-chain
/// stationary law, over a box of loads and weights.  At the budget boundary
/// the chain is critical and the solver refuses; those boxes report `warn`.
/// The heaviest sub-critical boxes cannot push the truncation tail to the
/// 1e-9 target at this cap, so the solve runs patiently and the achieved
/// tail is disclosed as its own record rather than aborting the comparison
/// (the residual bias it induces is orders below the gaps being measured).
pub fn closed_occupancy_records() -> Vec<Record> {
    let trunc = oracle_trunc().patient();
    let mut out = Vec::new();
    for p in [0.2, 0.5, 0.8] {
        for alpha in [0.3, 0.6, 0.9] {
            let params = SystemParams::from_alpha(2, p, alpha).unwrap();
            let beta = 1.0 - alpha;
            for q in [0.0, beta / 2.0, beta] {
                let id = format!("closed_occupancy[p={},a={},q={}]", g6(p), g6(alpha), g6(q));
                let closed = steady_state_uniform(&params, q).unwrap();
                match dtmc_stationary_truncated(&params, &JamPolicy::Uniform { q }, &trunc) {
                    Ok(solved) => {
                        let maxdiff = (0..=2)
                            .map(|k| (closed.pi[k] - solved.occupancy.pi[k]).abs())
                            .fold(0.0f64, f64::max);
                        out.push(Record::check(format!("{id}.maxdiff"), 0.0, maxdiff, 1e-6));
                        out.push(Record::check(
                            format!("{id}.oracle_tail"),
                            0.0,
                            solved.tail_mass,
                            1e-9,
                        ));
                    }
                    Err(_) => {
                        // Critically loaded: the closed form degenerates to
                        // full saturation but the chain has no stationary law
                        // to compare against.
                        out.push(Record::unavailable(format!("{id}.critical"), 0.0));
                    }
                }
            }
        }
    }
    out
}

/// The state-informed closed occupancy against the chain under the same
/// policy.
pub fn sideinfo_occupancy_records() -> Vec<Record> {
    let trunc = oracle_trunc().patient();
    let mut out = Vec::new();
    for alpha in [0.6, 0.8] {
        let params = SystemParams::from_alpha(2, 0.5, alpha).unwrap();
        let beta = 1.0 - alpha;
        for q in [0.0, beta / 2.0] {
            for w in [0.25, 0.5] {
                let id = format!("sideinfo_occupancy[a={},q={},w={}]", g6(alpha), g6(q), g6(w));
                let closed = match steady_state_sideinfo(&params, q, w) {
                    Ok(c) => c,
                    Err(_) => {
                        out.push(Record::unavailable(format!("{id}.critical"), 0.0));
                        continue;
                    }
                };
                match dtmc_stationary_truncated(&params, &JamPolicy::SideInfo { q, w }, &trunc) {
                    Ok(solved) => {
                        let maxdiff = (0..=2)
                            .map(|k| (closed.pi[k] - solved.occupancy.pi[k]).abs())
                            .fold(0.0f64, f64::max);
                        out.push(Record::check(format!("{id}.maxdiff"), 0.0, maxdiff, 1e-6));
                    }
                    Err(_) => out.push(Record::unavailable(format!("{id}.critical"), 0.0)),
                }
            }
        }
    }
    out
}

// -----------------------------------------------------------------------------
// Saturation mass: relaxed identity, chain comparison, and the floor
// -----------------------------------------------------------------------------

pub fn saturation_records() -> Vec<Record> {
    let mut out = Vec::new();
    let params = two_user_reference();
    let (p, a) = (0.5, 0.8);
    let relaxed = (1.0 - p) * a * a / (1.0 - p * a);

    // Two independent closed routes to the no-jamming saturation mass.
    let closed = steady_state_uniform(&params, 0.0).unwrap();
    out.push(Record::check("relaxed_budget[p=0.5,a=0.8].sat_prob_identity", closed.pi[2], relaxed, 1e-9));

    // ... and the chain's actual mass, which the relaxed form overstates.
    let chain = dtmc_stationary_truncated(&params, &JamPolicy::none(), &oracle_trunc()).unwrap();
    out.push(Record::check("relaxed_budget[p=0.5,a=0.8].vs_chain", chain.occupancy.pi[2], relaxed, 1e-6));

    // Saturation-mass floor: holds at two users, violated at three.
    let floor2 = pi_n0_lower_bound(2, params.p, params.lambda).unwrap();
    out.push(Record::check(
        "sat_mass_floor[n=2,p=0.5,a=0.8]",
        0.0,
        (floor2 - chain.occupancy.pi[2]).max(0.0),
        1e-9,
    ));
    let params3 = SystemParams::from_alpha(3, 0.5, 0.8).unwrap();
    let floor3 = pi_n0_lower_bound(3, params3.p, params3.lambda).unwrap();
    let chain3 = dtmc_stationary_truncated(
        &params3,
        &JamPolicy::none(),
        &TruncationSpec::new(60, 1e-9).unwrap(),
    )
    .unwrap();
    out.push(Record::check(
        "sat_mass_floor[n=3,p=0.5,a=0.8]",
        0.0,
        (floor3 - chain3.occupancy.pi[3]).max(0.0),
        1e-9,
    ));
    out
}

// -----------------------------------------------------------------------------
// Rate bounds: goldens, orderings, and n-user agreement
// -----------------------------------------------------------------------------

pub fn rate_bound_records() -> Vec<Record> {
    let mut out = Vec::new();
    let params = two_user_reference();

    // Frozen reference-point values, computed out of band when the bounds
    // were first built.
    out.push(Record::check(
        "two_user_rate[p=0.5,a=0.8].s1",
        0.2871377548065056,
        lb_strategy1(&params).unwrap().rate,
        1e-9,
    ));
    out.push(Record::check(
        "two_user_rate[p=0.5,a=0.8].s2",
        0.2871848763691136,
        lb_strategy2(&params).unwrap().rate,
        1e-9,
    ));
    out.push(Record::check(
        "two_user_rate[p=0.5,a=0.8].s3",
        0.2871377548065056,
        lb_strategy3(&params).unwrap().rate,
        1e-9,
    ));

    // Strategy 2 dominates strategy 1 across the whole default grid.
    let mut worst_gap = 0.0f64;
    for p in [0.01, 0.2, 0.4, 0.6, 0.8, 0.9] {
        for i in 2..=19 {
            let alpha = i as f64 * 0.05;
            let pt = SystemParams::from_alpha(2, p, alpha).unwrap();
            let lb1 = lb_strategy1(&pt).unwrap().rate;
            let lb2 = lb_strategy2(&pt).unwrap().rate;
            worst_gap = worst_gap.max(lb1 - lb2);
        }
    }
    out.push(Record::check("two_user_rate.dominance_grid", 0.0, worst_gap.max(0.0), 1e-9));

    // Upper-bound goldens and monotonicity toward saturation.
    let ub_at = |alpha: f64| {
        ub_two_user(&SystemParams::from_alpha(2, 0.5, alpha).unwrap()).unwrap().rate
    };
    for (alpha, golden) in [
        (0.8, 0.5856698286502344),
        (0.9, 0.4841546771350829),
        (0.99, 0.17080516524847908),
        (0.999, 0.028819667192534495),
    ] {
        out.push(Record::check(format!("two_user_ub[a={}]", g6(alpha)), golden, ub_at(alpha), 1e-9));
    }
    let increase = (ub_at(0.99) - ub_at(0.9)).max(ub_at(0.999) - ub_at(0.99));
    out.push(Record::check("two_user_ub.decreasing", 0.0, increase.max(0.0), 1e-15));

    // n-user forms degenerate to the two-user ones at n = 2.
    let saturated = OccupancyDist::saturated(2);
    out.push(Record::check(
        "n_user_rate[n=2,a=0.8].s1_agrees",
        lb_strategy1(&params).unwrap().rate,
        lb_n_strategy1(&params, &saturated).unwrap().rate,
        1e-9,
    ));
    out.push(Record::check(
        "n_user_rate[n=2,a=0.8].s2_agrees",
        lb_strategy2(&params).unwrap().rate,
        lb_n_strategy2(&params, &saturated).unwrap().rate,
        1e-9,
    ));

    // n-user upper bound: the certified variant at heavy load, and the
    // combined bound being the pointwise minimum of its variants.
    let heavy = SystemParams::from_alpha(2, 0.5, 0.999).unwrap();
    let (_, certified) = ub_n_user_variants(&heavy).unwrap();
    out.push(Record::check(
        "n_user_ub[n=2,a=0.999].high_load",
        0.02373886668976865,
        certified.rate,
        1e-9,
    ));
    let params3 = SystemParams::from_alpha(3, 0.5, 0.8).unwrap();
    let (va, vb) = ub_n_user_variants(&params3).unwrap();
    out.push(Record::check(
        "n_user_ub[n=3,a=0.8].variants_min",
        va.rate.min(vb.rate),
        ub_n_user(&params3).unwrap().rate,
        1e-12,
    ));
    out
}

// -----------------------------------------------------------------------------
// Coupled queues
// -----------------------------------------------------------------------------

/// Pathwise dominance of the jammed system over its unjammed twin, checked
/// on shared randomness across several seeds.
pub fn coupling_records() -> Vec<Record> {
    let params = two_user_reference();
    let policy = JamPolicy::Uniform { q: 0.15 };
    let mut out = Vec::new();
    for seed in [11u64, 12, 13] {
        let cfg = SimConfig::new(100_000, 10_000, seed, false).unwrap();
        match coupled_run(&params, &policy, &cfg) {
            Ok(report) => {
                out.push(Record::check(
                    format!("queue_coupling[seed={seed}].violations"),
                    0.0,
                    report.violations as f64,
                    0.5,
                ));
                out.push(Record::check(
                    format!("queue_coupling[seed={seed}].busy_gap"),
                    0.0,
                    (report.busy_both_unjammed - report.busy_both_jammed).max(0.0),
                    1e-12,
                ));
            }
            Err(_) => out.push(Record::unavailable(format!("queue_coupling[seed={seed}]"), 0.0)),
        }
    }
    out
}

// -----------------------------------------------------------------------------
// Simulation agreement
// -----------------------------------------------------------------------------

/// Long-run simulation against both descriptions of the stationary regime:
/// the chain solver (which the runs reproduce) and the closed forms (which
/// they measurably do not).  Tolerances are four standard errors plus a
/// small discretization allowance.
pub fn sim_agreement_records() -> Vec<Record> {
    let params = two_user_reference();
    let trunc = oracle_trunc();
    let mut out = Vec::new();
    for (k, q) in [0.0, 0.1].into_iter().enumerate() {
        let policy = JamPolicy::Uniform { q };
        let cfg = SimConfig::new(1_000_000, 10_000, 424_242 + k as u64, false).unwrap();
        let run = match simulate(&params, &policy, &cfg) {
            Ok(r) => r,
            Err(_) => {
                out.push(Record::unavailable(format!("sim_vs_chain[q={}]", g6(q)), 0.0));
                continue;
            }
        };
        let stats = &run.stats;
        let chain = dtmc_stationary_truncated(&params, &policy, &trunc).unwrap().occupancy;
        let closed = steady_state_uniform(&params, q).unwrap();

        let pi_tol = 4.0 * stats.occupancy_se[1] + 5e-4;
        out.push(Record::check(
            format!("sim_vs_chain[q={}].pi1", g6(q)),
            chain.pi[1],
            stats.occupancy.pi[1],
            pi_tol,
        ));
        out.push(Record::check(
            format!("sim_vs_closed[q={}].pi1", g6(q)),
            closed.pi[1],
            stats.occupancy.pi[1],
            pi_tol,
        ));

        match channel_stats(stats) {
            Ok(ch) => {
                let cross_tol = 4.0 * ch.crossover_se + 2e-3;
                out.push(Record::check(
                    format!("sim_vs_chain[q={}].crossover", g6(q)),
                    crossover_of(&chain, params.p),
                    ch.crossover_hat,
                    cross_tol,
                ));
                out.push(Record::check(
                    format!("sim_vs_closed[q={}].crossover", g6(q)),
                    crossover_of(&closed, params.p),
                    ch.crossover_hat,
                    cross_tol,
                ));
                // The rate function weighs the symbol subject to crossover —
                // the silent one — so a jam rate q enters as weight 1 - q.
                out.push(Record::check(
                    format!("sim_vs_chain[q={}].mi_active", g6(q)),
                    z_rate(1.0 - q, crossover_of(&chain, params.p)),
                    ch.mi_per_active_slot,
                    5e-3,
                ));
                out.push(Record::check(
                    format!("sim_vs_closed[q={}].mi_active", g6(q)),
                    z_rate(1.0 - q, crossover_of(&closed, params.p)),
                    ch.mi_per_active_slot,
                    5e-3,
                ));
            }
            Err(_) => {
                out.push(Record::unavailable(format!("sim_vs_chain[q={}].channel", g6(q)), 0.0));
            }
        }
    }
    out
}

/// The whole suite, in report order.
pub fn run_all() -> Vec<Record> {
    let mut out = Vec::new();
    out.extend(zchannel_records());
    out.extend(closed_occupancy_records());
    out.extend(sideinfo_occupancy_records());
    out.extend(saturation_records());
    out.extend(rate_bound_records());
    out.extend(coupling_records());
    out.extend(sim_agreement_records());
    out
}
