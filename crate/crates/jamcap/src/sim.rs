//! Seeded slot-level Monte Carlo of the random-access queues plus jammer:
//! empirical occupancy, induced-channel statistics with batch-means errors,
//! the coupled jammed/unjammed dominance experiment, and a windowed
//! stability probe.
//!
//! Slot order (fixed, part of the reproducibility contract): read the
//! backlog state; draw one arrival coin per user, one attempt coin per
//! user, then one jam coin — every slot, whether or not each coin applies —
//! in exactly that order from a single seeded stream.  Attempts apply only
//! to backlogged users; with at least one attempt the slot is active and
//! the jammer fires with her policy's probability for the start-of-slot
//! state; a lone unjammed attempter departs; arrivals append afterwards, so
//! a packet arriving in slot t first competes in slot t+1.
//!
//! The receiver reads '1' on any corrupted active slot (two-plus attempts
//! or a jammed transmission), '0' on a clean success, and idle otherwise.
//! Drawing unused coins costs a little speed and buys exact coupling: two
//! systems fed the same stream stay aligned slot by slot.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::params::{JamPolicy, OccupancyDist, SystemParams};
use crate::zchannel::binary_entropy;

// -----------------------------------------------------------------------------
// Configuration and per-slot record
// -----------------------------------------------------------------------------

/// Horizon, warmup, seed, and trace switch for one simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    /// Total slots simulated.
    pub horizon: usize,
    /// Leading slots excluded from every aggregate (trace keeps them).
    pub warmup: usize,
    /// Seed of the run's single random stream.
    pub seed: u64,
    /// Record a `SlotRecord` per slot.
    pub record_trace: bool,
}

impl SimConfig {
    pub fn new(horizon: usize, warmup: usize, seed: u64, record_trace: bool) -> Result<Self> {
        if horizon == 0 || warmup >= horizon {
            return Err(Error::Config(format!(
                "horizon {horizon} must exceed warmup {warmup}"
            )));
        }
        Ok(SimConfig { horizon, warmup, seed, record_trace })
    }
}

/// One slot of the trace: start-of-slot queues and everything observable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotRecord {
    pub slot: usize,
    /// Queue lengths at the start of the slot.
    pub queues: Vec<u32>,
    /// Applied attempts (coin landed heads AND the user was backlogged).
    pub attempts: Vec<bool>,
    /// At least one attempt.
    pub active: bool,
    /// The jammer transmitted.
    pub jam: bool,
    /// Two-plus attempts, or a jammed active slot.
    pub collision: bool,
    pub bob_symbol: BobSymbol,
}

/// The receiver's ternary observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BobSymbol {
    /// Clean success on an active slot.
    Zero,
    /// Corrupted active slot.
    One,
    /// No transmission.
    Idle,
}

impl BobSymbol {
    /// Trace-file spelling: '0', '1', or '-' for idle.
    pub fn as_char(self) -> char {
        match self {
            BobSymbol::Zero => '0',
            BobSymbol::One => '1',
            BobSymbol::Idle => '-',
        }
    }
}

/// Windowed-trend stability verdict for one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityVerdict {
    Stable,
    Unstable,
    /// Trend and noise are not separable at this horizon; lengthen the run.
    Inconclusive,
}

// -----------------------------------------------------------------------------
// Aggregates
// -----------------------------------------------------------------------------

/// Post-warmup aggregates of one run.  Counts cover exactly
/// `horizon - warmup` slots; the flow-conservation totals cover the whole
/// run so the identity arrivals - departures = final backlog is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SimStats {
    /// Empirical distribution of the number of backlogged users.
    pub occupancy: OccupancyDist,
    /// Batch-means standard error per occupancy entry.
    pub occupancy_se: Vec<f64>,
    /// Fraction of post-warmup slots with at least one attempt.
    pub active_fraction: f64,
    /// Per start-of-slot state k: active-slot visits and jammed count, so
    /// jam_by_state[k] / active_by_state[k] estimates the policy's state
    /// probability.
    pub active_by_state: Vec<u64>,
    pub jam_by_state: Vec<u64>,
    /// Joint counts over active slots: [jammer input x][receiver output y].
    pub counts_xy: [[u64; 2]; 2],
    /// Per-batch (input=0, output=1 | input=0) crossover samples for the
    /// batch-means error of the crossover estimate.
    pub crossover_batches: Vec<f64>,
    /// Mean total backlog per post-warmup slot.
    pub queue_mean: f64,
    /// Largest single queue observed anywhere in the run.
    pub queue_max: u32,
    /// Windowed-trend verdict.
    pub verdict: StabilityVerdict,
    /// Whole-run flow totals.
    pub total_arrivals: u64,
    pub total_departures: u64,
    pub final_queues: Vec<u32>,
    /// Post-warmup slot count (aggregation denominator).
    pub slots_counted: u64,
}

/// One simulation run: aggregates plus the optional trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub stats: SimStats,
    pub trace: Option<Vec<SlotRecord>>,
}

/// Induced-channel summary derived from `SimStats`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStats {
    /// Collision fraction of the unjammed active slots.
    pub crossover_hat: f64,
    /// Batch-means standard error of `crossover_hat`.
    pub crossover_se: f64,
    pub active_fraction: f64,
    /// Plug-in mutual information of (input, output) given an active slot.
    pub mi_per_active_slot: f64,
    /// `mi_per_active_slot` scaled by the active fraction.
    pub mi_per_slot: f64,
    pub active_slots: u64,
}

/// Outcome of the jammed/unjammed coupled experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    /// Slots (any user, any slot, warmup included) where the unjammed
    /// queue exceeded the jammed one.  The sample-path argument says zero.
    pub violations: u64,
    pub first_violation: Option<usize>,
    /// Post-warmup fraction of slots with every user backlogged.
    pub busy_both_jammed: f64,
    pub busy_both_unjammed: f64,
}

impl DominanceReport {
    /// Pathwise dominance held and so did its busy-time consequence.
    pub fn holds(&self) -> bool {
        self.violations == 0 && self.busy_both_jammed >= self.busy_both_unjammed
    }
}

// -----------------------------------------------------------------------------
// Core slot step
// -----------------------------------------------------------------------------

/// Coins for one slot, drawn in the contract order.
struct SlotCoins {
    arrivals: Vec<bool>,
    attempts: Vec<bool>,
    jam: f64,
}

fn draw_coins(rng: &mut ChaCha12Rng, params: &SystemParams, buf: &mut SlotCoins) {
    for a in buf.arrivals.iter_mut() {
        *a = rng.gen::<f64>() < params.lambda;
    }
    for a in buf.attempts.iter_mut() {
        *a = rng.gen::<f64>() < params.p;
    }
    buf.jam = rng.gen::<f64>();
}

struct SlotOutcome {
    backlogged: usize,
    attempts_applied: Vec<bool>,
    active: bool,
    jam: bool,
    collision: bool,
    departed: bool,
    arrivals: u32,
}

/// Advance `queues` by one slot under `policy` with the given coins.
fn step(
    queues: &mut [u32],
    policy: &JamPolicy,
    coins: &SlotCoins,
    outcome: &mut SlotOutcome,
) {
    let backlogged = queues.iter().filter(|&&q| q > 0).count();
    let mut lone = usize::MAX;
    let mut na = 0usize;
    for (i, q) in queues.iter().enumerate() {
        let apply = coins.attempts[i] && *q > 0;
        outcome.attempts_applied[i] = apply;
        if apply {
            na += 1;
            lone = i;
        }
    }
    let active = na >= 1;
    let jam = active && coins.jam < policy.state_prob(backlogged);
    let collision = na >= 2 || (active && jam);
    let departed = na == 1 && !jam;
    if departed {
        queues[lone] -= 1;
    }
    let mut arrivals = 0u32;
    for (i, q) in queues.iter_mut().enumerate() {
        if coins.arrivals[i] {
            *q += 1;
            arrivals += 1;
        }
    }
    outcome.backlogged = backlogged;
    outcome.active = active;
    outcome.jam = jam;
    outcome.collision = collision;
    outcome.departed = departed;
    outcome.arrivals = arrivals;
}

// -----------------------------------------------------------------------------
// Aggregation scaffolding
// -----------------------------------------------------------------------------

const BATCHES: usize = 100;
const STABILITY_WINDOWS: usize = 50;

struct Accumulator {
    n: usize,
    warmup: usize,
    horizon: usize,
    occupancy_counts: Vec<u64>,
    batch_occ: Vec<Vec<u64>>,
    batch_n00: Vec<u64>,
    batch_n01: Vec<u64>,
    active_slots: u64,
    active_by_state: Vec<u64>,
    jam_by_state: Vec<u64>,
    counts_xy: [[u64; 2]; 2],
    queue_total: u64,
    queue_max: u32,
    window_max: Vec<u32>,
    total_arrivals: u64,
    total_departures: u64,
}

impl Accumulator {
    fn new(n: usize, warmup: usize, horizon: usize) -> Self {
        let batches = BATCHES.min(horizon - warmup).max(1);
        let windows = STABILITY_WINDOWS.min(horizon - warmup).max(1);
        Accumulator {
            n,
            warmup,
            horizon,
            occupancy_counts: vec![0; n + 1],
            batch_occ: vec![vec![0; n + 1]; batches],
            batch_n00: vec![0; batches],
            batch_n01: vec![0; batches],
            active_slots: 0,
            active_by_state: vec![0; n + 1],
            jam_by_state: vec![0; n + 1],
            counts_xy: [[0; 2]; 2],
            queue_total: 0,
            queue_max: 0,
            window_max: vec![0; windows],
            total_arrivals: 0,
            total_departures: 0,
        }
    }

    fn record(&mut self, t: usize, queues: &[u32], out: &SlotOutcome) {
        self.total_arrivals += out.arrivals as u64;
        self.total_departures += out.departed as u64;
        let slot_max = queues.iter().copied().max().unwrap_or(0);
        self.queue_max = self.queue_max.max(slot_max);
        if t < self.warmup {
            return;
        }
        let i = t - self.warmup;
        let len = self.horizon - self.warmup;
        let batch = (i * self.batch_occ.len()) / len;
        let window = (i * self.window_max.len()) / len;
        self.occupancy_counts[out.backlogged] += 1;
        self.batch_occ[batch][out.backlogged] += 1;
        self.queue_total += queues.iter().map(|&q| q as u64).sum::<u64>();
        self.window_max[window] = self.window_max[window].max(slot_max);
        if out.active {
            self.active_slots += 1;
            self.active_by_state[out.backlogged] += 1;
            if out.jam {
                self.jam_by_state[out.backlogged] += 1;
            }
            let x = out.jam as usize;
            let y = out.collision as usize;
            self.counts_xy[x][y] += 1;
            if x == 0 {
                if y == 1 {
                    self.batch_n01[batch] += 1;
                }
                self.batch_n00[batch] += u64::from(y == 0);
            }
        }
    }

    fn finish(self, final_queues: Vec<u32>) -> Result<SimStats> {
        let len = (self.horizon - self.warmup) as f64;
        let pi: Vec<f64> =
            self.occupancy_counts.iter().map(|&c| c as f64 / len).collect();
        let occupancy = OccupancyDist::new(pi)?;

        // Batch-means error: spread of the per-batch means over sqrt(B).
        let nb = self.batch_occ.len();
        let mut occupancy_se = vec![0.0; self.n + 1];
        if nb >= 2 {
            for k in 0..=self.n {
                let means: Vec<f64> = (0..nb)
                    .map(|b| {
                        let bl = batch_len(b, nb, self.horizon - self.warmup);
                        self.batch_occ[b][k] as f64 / bl as f64
                    })
                    .collect();
                occupancy_se[k] = se_of_mean(&means);
            }
        }
        let crossover_batches: Vec<f64> = (0..nb)
            .filter(|&b| self.batch_n00[b] + self.batch_n01[b] > 0)
            .map(|b| {
                self.batch_n01[b] as f64 / (self.batch_n00[b] + self.batch_n01[b]) as f64
            })
            .collect();

        let verdict = stability_verdict(&self.window_max);
        Ok(SimStats {
            occupancy,
            occupancy_se,
            active_fraction: self.active_slots as f64 / len,
            active_by_state: self.active_by_state,
            jam_by_state: self.jam_by_state,
            counts_xy: self.counts_xy,
            crossover_batches,
            queue_mean: self.queue_total as f64 / len,
            queue_max: self.queue_max,
            verdict,
            total_arrivals: self.total_arrivals,
            total_departures: self.total_departures,
            final_queues,
            slots_counted: self.horizon as u64 - self.warmup as u64,
        })
    }
}

fn batch_len(b: usize, batches: usize, len: usize) -> usize {
    // Matches the assignment batch = i * batches / len.
    let start = (b * len).div_ceil(batches);
    let end = ((b + 1) * len).div_ceil(batches);
    end - start
}

fn se_of_mean(xs: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
    (var / m).sqrt()
}

/// Trend test on per-window maxima: a slope clearly above its own noise
/// marks growth (unstable); a flat slope with excursions bounded by the
/// typical window level marks stability; anything else is inconclusive.
fn stability_verdict(window_max: &[u32]) -> StabilityVerdict {
    let w = window_max.len();
    if w < 8 {
        // Too few windows to separate trend from noise; a silent system is
        // the one exception worth deciding.
        return if window_max.iter().all(|&m| m == 0) {
            StabilityVerdict::Stable
        } else {
            StabilityVerdict::Inconclusive
        };
    }
    let xs: Vec<f64> = (0..w).map(|i| i as f64).collect();
    let ys: Vec<f64> = window_max.iter().map(|&m| m as f64).collect();
    let xm = xs.iter().sum::<f64>() / w as f64;
    let ym = ys.iter().sum::<f64>() / w as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let resid_var: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let fit = ym + slope * (x - xm);
            (y - fit) * (y - fit)
        })
        .sum::<f64>()
        / (w as f64 - 2.0);
    let slope_se = (resid_var / sxx).sqrt();

    // Absolute floor keeps microscopic positive slopes from reading as
    // growth when the window noise happens to be tiny.
    if slope > 4.0 * slope_se && slope * w as f64 > 1.0 {
        return StabilityVerdict::Unstable;
    }
    let mut sorted = window_max.to_vec();
    sorted.sort_unstable();
    let median = sorted[w / 2] as f64;
    let overall = window_max.iter().copied().max().unwrap_or(0) as f64;
    let bounded = overall <= 5.0 * (median + 5.0);
    if slope.abs() <= 4.0 * slope_se && bounded {
        StabilityVerdict::Stable
    } else {
        StabilityVerdict::Inconclusive
    }
}

// -----------------------------------------------------------------------------
// Public operations
// -----------------------------------------------------------------------------

/// Run one seeded simulation.  Identical inputs give identical output,
/// including the trace, bit for bit.
pub fn simulate(params: &SystemParams, policy: &JamPolicy, cfg: &SimConfig) -> Result<SimRun> {
    policy.validate(params.n)?;
    SimConfig::new(cfg.horizon, cfg.warmup, cfg.seed, cfg.record_trace)?;
    let n = params.n;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut queues = vec![0u32; n];
    let mut coins = SlotCoins { arrivals: vec![false; n], attempts: vec![false; n], jam: 0.0 };
    let mut out = SlotOutcome {
        backlogged: 0,
        attempts_applied: vec![false; n],
        active: false,
        jam: false,
        collision: false,
        departed: false,
        arrivals: 0,
    };
    let mut acc = Accumulator::new(n, cfg.warmup, cfg.horizon);
    let mut trace = cfg.record_trace.then(|| Vec::with_capacity(cfg.horizon));

    for t in 0..cfg.horizon {
        draw_coins(&mut rng, params, &mut coins);
        let start = trace.is_some().then(|| queues.clone());
        step(&mut queues, policy, &coins, &mut out);
        acc.record(t, &queues, &out);
        if let Some(rows) = trace.as_mut() {
            let symbol = if !out.active {
                BobSymbol::Idle
            } else if out.collision {
                BobSymbol::One
            } else {
                BobSymbol::Zero
            };
            rows.push(SlotRecord {
                slot: t,
                queues: start.unwrap(),
                attempts: out.attempts_applied.clone(),
                active: out.active,
                jam: out.jam,
                collision: out.collision,
                bob_symbol: symbol,
            });
        }
    }
    let stats = acc.finish(queues)?;
    Ok(SimRun { stats, trace })
}

/// Induced-channel statistics of a run: crossover of the unjammed active
/// slots, plug-in mutual information over active slots, and the raw-slot
/// rate.  Requires a certified-stable run with at least 10^4 active slots.
pub fn channel_stats(stats: &SimStats) -> Result<ChannelStats> {
    if stats.verdict != StabilityVerdict::Stable {
        return Err(Error::InsufficientData(format!(
            "channel statistics need a stable run; verdict was {:?}",
            stats.verdict
        )));
    }
    let active: u64 = stats.counts_xy.iter().flatten().sum();
    if active < 10_000 {
        return Err(Error::InsufficientData(format!(
            "{active} active slots; need at least 10000"
        )));
    }
    let n0 = stats.counts_xy[0][0] + stats.counts_xy[0][1];
    let crossover_hat =
        if n0 > 0 { stats.counts_xy[0][1] as f64 / n0 as f64 } else { 0.0 };
    let crossover_se = if stats.crossover_batches.len() >= 2 {
        se_of_mean(&stats.crossover_batches)
    } else {
        0.0
    };
    let total = active as f64;
    let p_y1 = (stats.counts_xy[0][1] + stats.counts_xy[1][1]) as f64 / total;
    // Plug-in MI = H(Y) - H(Y|X) on the empirical joint.
    let mut h_y_given_x = 0.0;
    for x in 0..2 {
        let nx = (stats.counts_xy[x][0] + stats.counts_xy[x][1]) as f64;
        if nx > 0.0 {
            h_y_given_x += (nx / total) * binary_entropy(stats.counts_xy[x][1] as f64 / nx);
        }
    }
    let mi = (binary_entropy(p_y1) - h_y_given_x).max(0.0);
    Ok(ChannelStats {
        crossover_hat,
        crossover_se,
        active_fraction: stats.active_fraction,
        mi_per_active_slot: mi,
        mi_per_slot: mi * stats.active_fraction,
        active_slots: active,
    })
}

/// Coupled experiment: one coin stream drives two systems — the policy
/// under test and a never-jamming twin — and every slot checks that no
/// unjammed queue exceeds its jammed counterpart.  Jamming can only slow
/// departures, so the jammed system dominates pathwise; the busy-time
/// averages quantify the gap.
pub fn coupled_run(
    params: &SystemParams,
    policy: &JamPolicy,
    cfg: &SimConfig,
) -> Result<DominanceReport> {
    policy.validate(params.n)?;
    SimConfig::new(cfg.horizon, cfg.warmup, cfg.seed, cfg.record_trace)?;
    let n = params.n;
    let none = JamPolicy::none();
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut q_jam = vec![0u32; n];
    let mut q_free = vec![0u32; n];
    let mut coins = SlotCoins { arrivals: vec![false; n], attempts: vec![false; n], jam: 0.0 };
    let mut out = SlotOutcome {
        backlogged: 0,
        attempts_applied: vec![false; n],
        active: false,
        jam: false,
        collision: false,
        departed: false,
        arrivals: 0,
    };
    let mut violations = 0u64;
    let mut first_violation = None;
    let mut busy_jam = 0u64;
    let mut busy_free = 0u64;

    for t in 0..cfg.horizon {
        draw_coins(&mut rng, params, &mut coins);
        step(&mut q_jam, policy, &coins, &mut out);
        step(&mut q_free, &none, &coins, &mut out);
        for i in 0..n {
            if q_free[i] > q_jam[i] {
                violations += 1;
                first_violation.get_or_insert(t);
            }
        }
        if t >= cfg.warmup {
            busy_jam += u64::from(q_jam.iter().all(|&q| q > 0));
            busy_free += u64::from(q_free.iter().all(|&q| q > 0));
        }
    }
    let len = (cfg.horizon - cfg.warmup) as f64;
    Ok(DominanceReport {
        violations,
        first_violation,
        busy_both_jammed: busy_jam as f64 / len,
        busy_both_unjammed: busy_free as f64 / len,
    })
}

/// Run the simulator and report only the stability verdict.
pub fn stability_probe(
    params: &SystemParams,
    policy: &JamPolicy,
    cfg: &SimConfig,
) -> Result<StabilityVerdict> {
    let run = simulate(params, policy, &SimConfig { record_trace: false, ..*cfg })?;
    Ok(run.stats.verdict)
}

// -----------------------------------------------------------------------------
// Tests
// -----------------------------------------------------------------------------
