//! Truncated stationary solver for the n-queue chain — the numerical oracle
//! against which the closed forms are validated.
//!
//! The chain state is the vector of queue lengths.  Users are exchangeable,
//! so the chain is lumped onto sorted (non-decreasing) length tuples, which
//! is exact and shrinks the state space by up to n! while preserving the
//! backlog-count aggregation.  Queues are capped at `qmax`; an arrival into a
//! full queue is dropped, so truncation error shows up as stationary mass on
//! capped states (the tail diagnostic) instead of being hidden.
//!
//! One slot follows the simulator's semantics exactly: read the backlog
//! state, draw attempts for backlogged users (probability p each), jam an
//! active slot with the policy's state probability, let a lone unjammed
//! attempter depart, then append Bernoulli(lambda) arrivals that first
//! compete in the next slot.
//!
//! The stationary equation pi = pi P is solved by Gauss-Seidel sweeps over
//! the incoming-transition (column) form with a power-iteration fallback,
//! warm-startable from a neighboring solve.  A result is *certified* when
//! the residual is below 1e-12 and the capped-state mass is below the
//! requested tolerance; otherwise it is returned marked uncertified so
//! near-critical evaluations degrade to warnings, not wrong numbers.

use crate::error::{Error, Result};
use crate::params::{JamPolicy, OccupancyDist, SystemParams};

// -----------------------------------------------------------------------------
// Truncation control
// -----------------------------------------------------------------------------

/// Cap and certification tolerance for the truncated state space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    /// Per-queue length cap.
    pub qmax: usize,
    /// Maximum admissible stationary mass on capped states.
    pub tol: f64,
    /// Keep iterating to full residual convergence even when the tail has
    /// already ruled out certification.  Off by default: certification-
    /// oriented callers prefer the cheap early bailout, while searches that
    /// still want the (flagged) truncated stationary value turn this on.
    pub converge_uncertified: bool,
}

impl TruncationSpec {
    pub fn new(qmax: usize, tol: f64) -> Result<Self> {
        if qmax < 1 {
            return Err(Error::Domain("qmax must be at least 1".into()));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::Domain(format!("tail tolerance {tol} outside (0,1)")));
        }
        Ok(TruncationSpec { qmax, tol, converge_uncertified: false })
    }

    /// Builder toggle for `converge_uncertified`.
    pub fn patient(mut self) -> Self {
        self.converge_uncertified = true;
        self
    }
}

impl Default for TruncationSpec {
    /// Geometric queue tails under stability make a generous cap cheap for
    /// two users; larger n should size `qmax` to its state count.
    fn default() -> Self {
        TruncationSpec { qmax: 200, tol: 1e-9, converge_uncertified: false }
    }
}

/// Outcome of a stationary solve: aggregated occupancy, diagnostics, and the
/// raw lumped vector for warm-starting neighboring solves.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// Stationary probability of k backlogged users, k = 0..n.
    pub occupancy: OccupancyDist,
    /// Stationary mass on states with some queue at the cap.
    pub tail_mass: f64,
    /// Final l1 residual ||pi P - pi||.
    pub residual: f64,
    /// Gauss-Seidel sweeps performed.
    pub iterations: u64,
    /// True iff residual < 1e-12 and tail_mass < tol.
    pub certified: bool,
    /// Raw stationary vector over the lumped (sorted-tuple) states, in
    /// enumeration order; reusable as a warm start at identical (n, qmax).
    pub raw: Vec<f64>,
}

// -----------------------------------------------------------------------------
// Lumped state space
// -----------------------------------------------------------------------------

/// Binomial table for ranking sorted tuples: choose[m][j] = C(m, j).
fn binomial_table(m_max: usize, j_max: usize) -> Vec<Vec<u64>> {
    let mut c = vec![vec![0u64; j_max + 1]; m_max + 1];
    for m in 0..=m_max {
        c[m][0] = 1;
        for j in 1..=j_max.min(m) {
            c[m][j] = c[m - 1][j - 1] + if j <= m - 1 { c[m - 1][j] } else { 0 };
        }
    }
    c
}

/// Enumerate all non-decreasing n-tuples over 0..=qmax in lexicographic
/// order; the returned flat buffer stores each state contiguously.
fn enumerate_states(n: usize, qmax: usize) -> Vec<u16> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; n];
    loop {
        out.extend_from_slice(&cur);
        // next non-decreasing tuple
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if (cur[i] as usize) < qmax {
                cur[i] += 1;
                for j in i + 1..n {
                    cur[j] = cur[i];
                }
                break;
            }
        }
    }
}

/// Rank of a sorted tuple within the lexicographic enumeration, via the
/// hockey-stick identity: O(n) per call with a precomputed binomial table.
#[inline]
fn rank_sorted(t: &[u16], qmax: usize, choose: &[Vec<u64>]) -> usize {
    let n = t.len();
    let mut rank = 0u64;
    let mut lo = 0usize;
    for (i, &ti) in t.iter().enumerate() {
        let r = n - i; // remaining slots including position i
        let ti = ti as usize;
        rank += choose[qmax - lo + r][r] - choose[qmax - ti + r][r];
        lo = ti;
    }
    rank as usize
}

// -----------------------------------------------------------------------------
// Transition kernel (column-compressed)
// -----------------------------------------------------------------------------

/// Incoming-transition form of the one-slot kernel: for each target state j,
/// the source states i and weights P[i -> j], plus the diagonal P[j -> j].
///
/// Weights are stored as their no-jam and jam components,
/// `val = w0 + jp(source) * dv` with `dv = w1 - w0`, so one enumeration of
/// the sparsity pattern serves every jamming policy: `retarget` swaps the
/// active values in a single O(nnz) pass.
struct ColumnKernel {
    col_ptr: Vec<u64>,
    src: Vec<u32>,
    val: Vec<f64>,
    w0: Vec<f64>,
    dv: Vec<f64>,
    diag: Vec<f64>,
    /// Backlogged-user count per state (selects the jam probability).
    backlog: Vec<u8>,
    states: usize,
}

impl ColumnKernel {
    /// Re-materialize `val` and `diag` for `policy` from the stored
    /// components.  Cost is one pass over the nonzeros, so scanning many
    /// policies at a fixed (params, qmax) skips the enumeration entirely.
    fn retarget(&mut self, n: usize, policy: &JamPolicy) {
        let jps: Vec<f64> = (0..=n).map(|b| policy.state_prob(b)).collect();
        for j in 0..self.states {
            let mut d = 0.0;
            for idx in self.col_ptr[j] as usize..self.col_ptr[j + 1] as usize {
                let s = self.src[idx] as usize;
                let v = self.w0[idx] + jps[self.backlog[s] as usize] * self.dv[idx];
                self.val[idx] = v;
                if s == j {
                    d += v;
                }
            }
            self.diag[j] = d;
        }
    }
}

fn build_kernel(params: &SystemParams, policy: &JamPolicy, qmax: usize) -> ColumnKernel {
    let n = params.n;
    let (p, lam) = (params.p, params.lambda);
    let (ph, lamh) = (1.0 - p, 1.0 - lam);
    let flat = enumerate_states(n, qmax);
    let m = flat.len() / n;
    let choose = binomial_table(qmax + n + 1, n);

    // Pass buffers reused per source state; component pairs are
    // (no-jam weight, jam weight).
    let mut triplets: Vec<(u32, u32, f64, f64)> = Vec::new();
    let mut local: Vec<(u32, f64, f64)> = Vec::with_capacity(1 << (2 * n.min(8)));
    let mut backlogged = Vec::with_capacity(n);
    let mut backlog_counts = vec![0u8; m];
    let mut work = vec![0u16; n];

    for si in 0..m {
        let state = &flat[si * n..(si + 1) * n];
        backlogged.clear();
        for (i, &qv) in state.iter().enumerate() {
            if qv > 0 {
                backlogged.push(i);
            }
        }
        let b = backlogged.len();
        backlog_counts[si] = b as u8;
        local.clear();

        // Attempt subsets over backlogged users only (empty queues' coins
        // cannot change the dynamics, so they are marginalized out here).
        for att in 0u32..(1 << b) {
            let na = att.count_ones() as i32;
            let p_att = p.powi(na) * ph.powi(b as i32 - na);
            if p_att == 0.0 {
                continue;
            }
            // (weight under no jam, weight under jam, departing position)
            let mut branches: [(f64, f64, Option<usize>); 2] = [(0.0, 0.0, None); 2];
            let nb;
            if na == 0 {
                // No attempt: the jam coin cannot matter.
                branches[0] = (1.0, 1.0, None);
                nb = 1;
            } else {
                // Jam branch: the slot is destroyed, nobody departs.
                branches[0] = (0.0, 1.0, None);
                // No-jam branch: a lone attempt departs.
                let dep = if na == 1 {
                    Some(backlogged[att.trailing_zeros() as usize])
                } else {
                    None
                };
                branches[1] = (1.0, 0.0, dep);
                nb = 2;
            }
            for &(b0, b1, dep) in &branches[..nb] {
                for arr in 0u32..(1 << n) {
                    let nr = arr.count_ones() as i32;
                    let p_arr = lam.powi(nr) * lamh.powi(n as i32 - nr);
                    if p_arr == 0.0 {
                        continue;
                    }
                    work.copy_from_slice(state);
                    if let Some(d) = dep {
                        work[d] -= 1;
                    }
                    for i in 0..n {
                        if arr & (1 << i) != 0 && (work[i] as usize) < qmax {
                            work[i] += 1;
                        }
                    }
                    work.sort_unstable();
                    let tj = rank_sorted(&work, qmax, &choose) as u32;
                    let w = p_att * p_arr;
                    local.push((tj, w * b0, w * b1));
                }
            }
        }

        // Merge duplicate targets before committing to the global triplet list.
        local.sort_unstable_by_key(|&(j, _, _)| j);
        let mut k = 0;
        while k < local.len() {
            let j = local[k].0;
            let (mut s0, mut s1) = (0.0, 0.0);
            while k < local.len() && local[k].0 == j {
                s0 += local[k].1;
                s1 += local[k].2;
                k += 1;
            }
            triplets.push((si as u32, j, s0, s1));
        }
    }

    // Column-compress (incoming lists per target).
    let mut col_ptr = vec![0u64; m + 1];
    for &(_, j, _, _) in &triplets {
        col_ptr[j as usize + 1] += 1;
    }
    for j in 0..m {
        col_ptr[j + 1] += col_ptr[j];
    }
    let nnz = triplets.len();
    let mut src = vec![0u32; nnz];
    let mut w0 = vec![0.0f64; nnz];
    let mut dv = vec![0.0f64; nnz];
    let mut cursor = col_ptr.clone();
    for &(i, j, s0, s1) in &triplets {
        let c = cursor[j as usize] as usize;
        src[c] = i;
        w0[c] = s0;
        dv[c] = s1 - s0;
        cursor[j as usize] += 1;
    }
    let mut kernel = ColumnKernel {
        col_ptr,
        src,
        val: vec![0.0f64; nnz],
        w0,
        dv,
        diag: vec![0.0f64; m],
        backlog: backlog_counts,
        states: m,
    };
    kernel.retarget(n, policy);
    kernel
}

// -----------------------------------------------------------------------------
// Stationary solve
// -----------------------------------------------------------------------------

const RESIDUAL_TARGET: f64 = 1e-12;
const MAX_SWEEPS: u64 = 40_000;
/// Sweeps between tail-mass checks for the early uncertifiable bailout.
const TAIL_CHECK_EVERY: u64 = 64;
/// Minimum sweeps before bailing out on an oversized tail.  Cold starts
/// concentrate mass near empty and warm starts come from small-tail
/// iterates, so a large tail this early already implies a large stationary
/// tail; a deep transient cannot fake one.
const TAIL_BAIL_MIN: u64 = 128;

fn l1_residual(k: &ColumnKernel, pi: &[f64]) -> f64 {
    let mut r = 0.0;
    for j in 0..k.states {
        let mut inner = 0.0;
        for idx in k.col_ptr[j] as usize..k.col_ptr[j + 1] as usize {
            inner += pi[k.src[idx] as usize] * k.val[idx];
        }
        r += (inner - pi[j]).abs();
    }
    r
}

fn cold_start(flat_states: &[u16], n: usize) -> Vec<f64> {
    let m = flat_states.len() / n;
    let mut v: Vec<f64> = (0..m)
        .map(|s| {
            let total: u32 = flat_states[s * n..(s + 1) * n].iter().map(|&q| q as u32).sum();
            0.5f64.powi(total as i32)
        })
        .collect();
    let sum: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= sum;
    }
    v
}

fn tail_of(flat_states: &[u16], n: usize, qmax: usize, pi: &[f64]) -> f64 {
    let cap = qmax as u16;
    pi.iter()
        .enumerate()
        // sorted tuples: the last coordinate is the maximum queue length
        .filter(|&(s, _)| flat_states[s * n + n - 1] == cap)
        .map(|(_, &w)| w)
        .sum()
}

/// Solve the stationary distribution of the truncated chain under `policy`.
///
/// `warm` may carry the raw vector of a previous solve at identical
/// (n, qmax) — e.g. the neighboring point of a grid scan — and typically
/// cuts the sweep count by an order of magnitude.
pub fn dtmc_stationary_truncated_warm(
    params: &SystemParams,
    policy: &JamPolicy,
    trunc: &TruncationSpec,
    warm: Option<&[f64]>,
) -> Result<SolveOutcome> {
    let mut solver = ScanSolver::new(params, trunc.qmax)?;
    solver.solve(policy, trunc, warm)
}

/// Reusable solver for scanning many jamming policies at a fixed
/// (params, qmax): the transition pattern is enumerated once, and each
/// `solve` only re-materializes the jam-dependent weights before iterating.
pub struct ScanSolver {
    params: SystemParams,
    qmax: usize,
    kernel: ColumnKernel,
    flat: Vec<u16>,
}

impl ScanSolver {
    pub fn new(params: &SystemParams, qmax: usize) -> Result<Self> {
        let n = params.n;
        if n > 12 {
            return Err(Error::Domain(format!(
                "truncated solver enumerates 2^n arrival patterns; n = {n} is too large"
            )));
        }
        if qmax < 1 {
            return Err(Error::Domain("qmax must be at least 1".into()));
        }
        let kernel = build_kernel(params, &JamPolicy::none(), qmax);
        let flat = enumerate_states(n, qmax);
        Ok(ScanSolver { params: *params, qmax, kernel, flat })
    }

    pub fn solve(
        &mut self,
        policy: &JamPolicy,
        trunc: &TruncationSpec,
        warm: Option<&[f64]>,
    ) -> Result<SolveOutcome> {
        let params = &self.params;
        let n = params.n;
        policy.validate(n)?;
        if trunc.qmax != self.qmax {
            return Err(Error::Domain(format!(
                "truncation qmax {} does not match the solver's {}",
                trunc.qmax, self.qmax
            )));
        }
        // At saturation every departure needs a lone attempt to survive the
        // jam; once the all-backlogged jam weight eats the whole service
        // margin the chain has no stationary law, and the truncated
        // "solution" would just echo the cap.  Refuse instead of pretending.
        if params.lambda > 0.0 {
            let service = (1.0 - policy.state_prob(n))
                * n as f64
                * params.p
                * params.p_hat().powi(n as i32 - 1);
            if n as f64 * params.lambda >= service - 1e-12 {
                return Err(Error::Unstable(format!(
                    "saturated service rate {service:.6} cannot carry arrival load {:.6}",
                    n as f64 * params.lambda
                )));
            }
        }
        self.kernel.retarget(n, policy);
        gs_core(&self.kernel, &self.flat, n, trunc, warm)
    }
}

fn gs_core(
    kernel: &ColumnKernel,
    flat: &[u16],
    n: usize,
    trunc: &TruncationSpec,
    warm: Option<&[f64]>,
) -> Result<SolveOutcome> {
    let m = kernel.states;
    let qmax = trunc.qmax;

    // Cold starts use a sharply decaying geometric profile: sub-critical
    // chains concentrate near empty, and a tail that only grows toward its
    // stationary value keeps the early bailout below sound (a large
    // transient tail can no longer masquerade as an uncertifiable chain).
    // The profile stays positive everywhere so no state loses its inflow
    // mass on the first Gauss-Seidel sweep.
    let mut pi: Vec<f64> = match warm {
        Some(w) if w.len() == m => {
            let s: f64 = w.iter().sum();
            if s > 0.0 && s.is_finite() {
                w.iter().map(|&x| (x / s).max(0.0)).collect()
            } else {
                cold_start(flat, n)
            }
        }
        _ => cold_start(flat, n),
    };

    let mut sweeps = 0u64;
    let mut residual = f64::INFINITY;
    let mut bailed_on_tail = false;
    // Adaptive over-relaxation: near-critical chains contract slowly under
    // plain Gauss-Seidel, and extrapolating each update by omega cuts the
    // sweep count several-fold.  The cap of 1.6 is the empirically safe
    // edge for most of this transition family (1.7 already sends part of
    // the spectrum outside the unit disc and the iterate orbits without
    // converging); the factor ramps up while sweeps keep contracting and
    // falls back toward plain sweeps if one expands.  Convergence is still
    // gated on the true fixed-point residual below, so acceleration cannot
    // fake a solution.  Components that would overshoot negative take the
    // unrelaxed value, keeping the iterate positive, and an iterate
    // growing from below can overshoot its stationary tail by at most the
    // gap being closed (under 2x), far inside the 100x-tolerance bail
    // margin.
    const OMEGA_CAP: f64 = 1.6;
    let mut omega = 1.0f64;
    let mut omega_cap = OMEGA_CAP;
    let mut last_delta = f64::INFINITY;
    // Residual at the last watchdog check (see below).
    let mut watermark = f64::INFINITY;
    while sweeps < MAX_SWEEPS {
        // Gauss-Seidel sweep on pi[j] = sum_i pi[i] P[i->j], immediate updates.
        let mut delta = 0.0;
        for j in 0..m {
            let mut inner = 0.0;
            for idx in kernel.col_ptr[j] as usize..kernel.col_ptr[j + 1] as usize {
                let i = kernel.src[idx] as usize;
                if i != j {
                    inner += pi[i] * kernel.val[idx];
                }
            }
            let denom = 1.0 - kernel.diag[j];
            let gs = if denom > 1e-300 { inner / denom } else { pi[j] };
            let mut new = pi[j] + omega * (gs - pi[j]);
            if new < 0.0 {
                new = gs;
            }
            delta += (new - pi[j]).abs();
            pi[j] = new;
        }
        if delta <= last_delta {
            omega = (omega + 0.05).min(omega_cap);
        } else if delta > last_delta * 1.5 {
            // Mild sweep-to-sweep wobble is normal; a clear expansion means
            // the relaxation left the stable region, so back it off.
            omega = 1.0 + (omega - 1.0) * 0.5;
        }
        last_delta = delta;
        let sum: f64 = pi.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::NonConverged { residual: f64::NAN, iterations: sweeps });
        }
        let inv = 1.0 / sum;
        for x in pi.iter_mut() {
            *x *= inv;
        }
        sweeps += 1;

        // The sweep-to-sweep change tracks the true residual to within a
        // small factor; once it is near the target, test the real thing
        // periodically rather than grinding the change two further decades
        // down.
        let nd = delta * inv;
        if nd < RESIDUAL_TARGET * 1e-2 || (nd < RESIDUAL_TARGET * 10.0 && sweeps % 16 == 0) {
            residual = l1_residual(kernel, &pi);
            if residual < RESIDUAL_TARGET {
                break;
            }
        }
        // A tail far above tolerance cannot shrink back below it as the
        // iterate converges; stop early and report the solve uncertified.
        if !trunc.converge_uncertified && sweeps % TAIL_CHECK_EVERY == 0 && sweeps >= TAIL_BAIL_MIN {
            let t = tail_of(flat, n, qmax, &pi);
            if t > 100.0 * trunc.tol && t > 1e-8 {
                residual = l1_residual(kernel, &pi);
                bailed_on_tail = true;
                break;
            }
        }
        // Progress watchdog: some heavily loaded kernels have a stability
        // edge below the ceiling, and there the relaxed iterate orbits
        // while its sweep delta wobbles inside the band the heuristics
        // above tolerate.  The true residual cannot be fooled: if it has
        // not clearly fallen across a whole window, halve the ceiling and
        // restart from plain sweeps.  The ceiling only ever falls, so the
        // worst case degenerates to certain-but-slow Gauss-Seidel.
        if sweeps % TAIL_CHECK_EVERY == 0 {
            let res = l1_residual(kernel, &pi);
            if res < RESIDUAL_TARGET {
                residual = res;
                break;
            }
            if res > watermark * 0.9 {
                omega_cap = 1.0 + (omega_cap - 1.0) * 0.5;
                omega = 1.0;
                last_delta = f64::INFINITY;
            }
            watermark = res;
        }
    }
    if residual.is_infinite() {
        residual = l1_residual(kernel, &pi);
    }

    let tail = tail_of(flat, n, qmax, &pi);
    let converged = residual < RESIDUAL_TARGET;
    if !converged && !bailed_on_tail && tail < trunc.tol {
        // Genuine convergence failure on a certifiable point.
        return Err(Error::NonConverged { residual, iterations: sweeps });
    }

    let mut occ = vec![0.0f64; n + 1];
    for (s, &w) in pi.iter().enumerate() {
        let k = flat[s * n..(s + 1) * n].iter().filter(|&&q| q > 0).count();
        occ[k] += w;
    }
    let occupancy = OccupancyDist::new(occ)?;
    Ok(SolveOutcome {
        occupancy,
        tail_mass: tail,
        residual,
        iterations: sweeps,
        certified: converged && tail < trunc.tol,
        raw: pi,
    })
}

/// Cold-start convenience wrapper around the warm-startable solver.
pub fn dtmc_stationary_truncated(
    params: &SystemParams,
    policy: &JamPolicy,
    trunc: &TruncationSpec,
) -> Result<SolveOutcome> {
    dtmc_stationary_truncated_warm(params, policy, trunc, None)
}

/// No-jamming baseline occupancy via the truncated solver (the n > 2 path of
/// the baseline operation; for n = 2 the closed form is available and equal).
pub fn baseline_no_jamming_solved(
    params: &SystemParams,
    trunc: &TruncationSpec,
) -> Result<SolveOutcome> {
    params.require_stable()?;
    dtmc_stationary_truncated(params, &JamPolicy::none(), trunc)
}

// -----------------------------------------------------------------------------
// Tests
// -----------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SystemParams;

    #[test]
    fn state_enumeration_and_ranking_agree() {
        for (n, qmax) in [(2usize, 7usize), (3, 5), (4, 3)] {
            let flat = enumerate_states(n, qmax);
            let m = flat.len() / n;
            let choose = binomial_table(qmax + n + 1, n);
            for s in 0..m {
                let t = &flat[s * n..(s + 1) * n];
                assert_eq!(rank_sorted(t, qmax, &choose), s, "n={n} qmax={qmax} t={t:?}");
            }
        }
    }

    #[test]
    fn kernel_rows_are_stochastic() {
        let params = SystemParams::from_alpha(2, 0.5, 0.8).unwrap();
        let k = build_kernel(&params, &JamPolicy::Uniform { q: 0.1 }, 6);
        let mut rowsum = vec![0.0f64; k.states];
        for j in 0..k.states {
            for idx in k.col_ptr[j] as usize..k.col_ptr[j + 1] as usize {
                rowsum[k.src[idx] as usize] += k.val[idx];
            }
        }
        for (i, s) in rowsum.iter().enumerate() {
            assert!((s - 1.0).abs() < 1e-12, "row {i} sums to {s}");
        }
    }

    #[test]
    fn empty_system_concentrates_at_zero() {
        let params = SystemParams::new(2, 0.5, 0.0).unwrap();
        let out = dtmc_stationary_truncated(
            &params,
            &JamPolicy::Uniform { q: 0.4 },
            &TruncationSpec::new(10, 1e-9).unwrap(),
        )
        .unwrap();
        assert!(out.certified);
        assert!((out.occupancy.pi[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn near_critical_truncation_is_flagged_not_trusted() {
        let params = SystemParams::from_alpha(2, 0.5, 0.8).unwrap();
        let out = dtmc_stationary_truncated(
            &params,
            &JamPolicy::Uniform { q: 0.19 },
            &TruncationSpec::new(5, 1e-9).unwrap(),
        )
        .unwrap();
        assert!(!out.certified);
        assert!(out.tail_mass > 1e-9);
    }

    #[test]
    fn warm_start_reproduces_cold_result() {
        let params = SystemParams::from_alpha(2, 0.5, 0.8).unwrap();
        let trunc = TruncationSpec::new(60, 1e-6).unwrap();
        let a = dtmc_stationary_truncated(&params, &JamPolicy::Uniform { q: 0.05 }, &trunc).unwrap();
        let b = dtmc_stationary_truncated_warm(
            &params,
            &JamPolicy::Uniform { q: 0.06 },
            &trunc,
            Some(&a.raw),
        )
        .unwrap();
        let c =
            dtmc_stationary_truncated(&params, &JamPolicy::Uniform { q: 0.06 }, &trunc).unwrap();
        for (x, y) in b.occupancy.pi.iter().zip(&c.occupancy.pi) {
            assert!((x - y).abs() < 1e-9, "warm {x} vs cold {y}");
        }
        assert!(b.iterations <= c.iterations);
    }
}
