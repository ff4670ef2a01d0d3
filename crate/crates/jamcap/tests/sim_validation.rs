//! Simulator-vs-law agreement.  The slot simulator and the stationary
//! solver are independent implementations of the same queueing system, so
//! a long run's empirical law must meet the solved law within Monte-Carlo
//! error.  The occupancy references below were frozen from converged
//! truncated solves (cap 100, tail below 1e-9); the channel references
//! follow from those laws and the slot semantics alone.

use jamcap::sim::{channel_stats, coupled_run, simulate, stability_probe};
use jamcap::{
    JamPolicy, ScanSolver, SimConfig, SimStats, StabilityVerdict, SystemParams, TruncationSpec,
};

const HORIZON: usize = 1_000_000;
const WARMUP: usize = 10_000;
const SEED: u64 = 20_260_822;

/// Stationary occupancy at (n = 2, p = 0.5, alpha = 0.8) with no jamming.
const PI_FREE: [f64; 3] = [0.2, 0.38537911517502055, 0.41462088482486875];
/// Same system with every active slot jammed at weight 0.1.
const PI_JAM01: [f64; 3] = [0.1111111111111111, 0.30103419588648694, 0.5878546930021871];

fn two_user() -> SystemParams {
    SystemParams::from_alpha(2, 0.5, 0.8).unwrap()
}

fn run(params: &SystemParams, policy: &JamPolicy, seed: u64) -> SimStats {
    let cfg = SimConfig::new(HORIZON, WARMUP, seed, false).unwrap();
    simulate(params, policy, &cfg).unwrap().stats
}

/// Active-slot fraction implied by a two-user occupancy: a lone backlogged
/// user attempts with probability p, a backlogged pair with 1 - phat^2.
fn active_from(pi: &[f64; 3]) -> f64 {
    pi[1] * 0.5 + pi[2] * 0.75
}

/// Collision fraction of the unjammed active slots: only the backlogged
/// pair can collide on its own, with both-attempt probability p^2.
fn crossover_from(pi: &[f64; 3]) -> f64 {
    pi[2] * 0.25 / active_from(pi)
}

#[test]
fn million_slot_run_reproduces_the_stationary_law_without_jamming() {
    let params = two_user();
    let stats = run(&params, &JamPolicy::none(), SEED);

    assert_eq!(stats.verdict, StabilityVerdict::Stable);
    // Flow conservation over the whole run is an identity, not an estimate.
    let backlog: u64 = stats.final_queues.iter().map(|&q| u64::from(q)).sum();
    assert_eq!(stats.total_arrivals - stats.total_departures, backlog);

    for k in 0..=2 {
        let tol = 4.0 * stats.occupancy_se[k] + 5e-4;
        assert!(
            (stats.occupancy.pi[k] - PI_FREE[k]).abs() < tol,
            "pi[{k}] = {} vs {} (tol {tol:.2e})",
            stats.occupancy.pi[k],
            PI_FREE[k]
        );
    }

    let ch = channel_stats(&stats).unwrap();
    assert!((ch.active_fraction - active_from(&PI_FREE)).abs() < 4e-3);
    assert!((ch.crossover_hat - crossover_from(&PI_FREE)).abs() < 4.0 * ch.crossover_se + 5e-4);
    // The jammer never transmits, so the plug-in information is exactly zero.
    assert_eq!(ch.mi_per_active_slot, 0.0);
}

#[test]
fn million_slot_run_reproduces_the_stationary_law_under_uniform_jamming() {
    let params = two_user();
    let stats = run(&params, &JamPolicy::Uniform { q: 0.1 }, SEED);

    assert_eq!(stats.verdict, StabilityVerdict::Stable);
    for k in 0..=2 {
        let tol = 4.0 * stats.occupancy_se[k] + 5e-4;
        assert!(
            (stats.occupancy.pi[k] - PI_JAM01[k]).abs() < tol,
            "pi[{k}] = {} vs {} (tol {tol:.2e})",
            stats.occupancy.pi[k],
            PI_JAM01[k]
        );
    }

    let ch = channel_stats(&stats).unwrap();
    assert!((ch.active_fraction - active_from(&PI_JAM01)).abs() < 4e-3);
    assert!(
        (ch.crossover_hat - crossover_from(&PI_JAM01)).abs() < 4.0 * ch.crossover_se + 5e-4,
        "crossover {} vs {}",
        ch.crossover_hat,
        crossover_from(&PI_JAM01)
    );
    // Induced Z-channel: weight-0.1 input, crossover from the law above.
    assert!(
        (ch.mi_per_active_slot - 0.18030481870481885).abs() < 5e-3,
        "mi/active {}",
        ch.mi_per_active_slot
    );
    assert!((ch.mi_per_slot - ch.mi_per_active_slot * ch.active_fraction).abs() < 1e-12);
}

#[test]
fn simulator_and_solver_agree_at_high_load() {
    // No frozen values here: the solver itself is the reference, which
    // cross-validates two independent implementations of the system.  The
    // tail at this cap is uncertifiable near alpha = 0.99, but its mass
    // (~1e-4) is far below the Monte-Carlo resolution of the comparison.
    let trunc = TruncationSpec { qmax: 200, tol: 1e-9, converge_uncertified: false }.patient();
    for alpha in [0.9, 0.99] {
        let params = SystemParams::from_alpha(2, 0.5, alpha).unwrap();
        let mut solver = ScanSolver::new(&params, trunc.qmax).unwrap();
        let solved = solver.solve(&JamPolicy::none(), &trunc, None).unwrap();
        let stats = run(&params, &JamPolicy::none(), SEED + 1);
        assert_ne!(stats.verdict, StabilityVerdict::Unstable, "alpha = {alpha}");
        for k in 0..=2 {
            let tol = 4.0 * stats.occupancy_se[k] + 2e-3;
            assert!(
                (stats.occupancy.pi[k] - solved.occupancy.pi[k]).abs() < tol,
                "alpha = {alpha}: pi[{k}] = {} vs solved {}",
                stats.occupancy.pi[k],
                solved.occupancy.pi[k]
            );
        }
    }
}

#[test]
fn empirical_jam_rates_track_the_policy() {
    let params = two_user();
    let policy = JamPolicy::SideInfo { q: 0.15, w: 0.4 };
    let stats = run(&params, &policy, SEED + 2);
    for k in 1..=2 {
        let visits = stats.active_by_state[k];
        assert!(visits > 10_000, "state {k} visited only {visits} times");
        let hat = stats.jam_by_state[k] as f64 / visits as f64;
        let want = policy.state_prob(k);
        let se = (want * (1.0 - want) / visits as f64).sqrt();
        assert!(
            (hat - want).abs() < 4.0 * se + 1e-3,
            "state {k}: jam rate {hat} vs policy {want}"
        );
    }
}

#[test]
fn jammed_queues_dominate_their_unjammed_twins_across_seeds() {
    let params = two_user();
    let policy = JamPolicy::Uniform { q: 0.15 };
    let cfg = |seed| SimConfig::new(100_000, 10_000, seed, false).unwrap();
    for seed in 0..10u64 {
        let rep = coupled_run(&params, &policy, &cfg(seed)).unwrap();
        assert_eq!(rep.violations, 0, "seed {seed}: first at {:?}", rep.first_violation);
        assert!(
            rep.busy_both_jammed >= rep.busy_both_unjammed,
            "seed {seed}: busy {} vs {}",
            rep.busy_both_jammed,
            rep.busy_both_unjammed
        );
        assert!(rep.holds());
    }
}

#[test]
fn runaway_load_is_flagged_unstable() {
    // Jamming over the budget (q = 0.5 against beta = 0.2) starves the
    // service rate below the arrival rate; the windowed trend must say so.
    let params = two_user();
    let cfg = SimConfig::new(200_000, 10_000, SEED + 3, false).unwrap();
    let verdict = stability_probe(&params, &JamPolicy::Uniform { q: 0.5 }, &cfg).unwrap();
    assert_eq!(verdict, StabilityVerdict::Unstable);
}
