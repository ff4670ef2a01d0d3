//! Closed-form stationary occupancy laws for the two-user system, the
//! no-jamming baseline, stability budgets, and the all-backlogged lower
//! bound for n users.
//!
//! The closed forms implement the printed formulas exactly as stated (with
//! the one documented sign-of-complement reading in the side-information
//! law).  They are validated against the independent truncated-chain solver
//! in `dtmc`; where the two disagree the workbench surfaces the discrepancy
//! rather than silently preferring either side — see the project README for
//! the measured gaps.

use crate::error::{Error, Result};
use crate::params::{OccupancyDist, SystemParams};

// -----------------------------------------------------------------------------
// Uniform-policy closed form (two users)
// -----------------------------------------------------------------------------

/// Stationary occupancy of the two-user system when every active slot is
/// jammed with the same probability `q`:
///
/// ```text
/// pi_02 = ((p qh - lam)/(p qh)) * (p ph qh - lam) / (p ph qh - lam + lam ph)
/// pi_11 = 2 (1 - lam/(p ph qh)) lam ph / (p ph qh - lam + lam ph)
/// pi_20 = 1 - pi_02 - pi_11
/// ```
///
/// with ph = 1-p, qh = 1-q.  Requires n = 2 and the stability condition
/// q <= 1 - alpha; at the boundary the law degenerates to (0, 0, 1).
pub fn steady_state_uniform(params: &SystemParams, q: f64) -> Result<OccupancyDist> {
    if params.n != 2 {
        return Err(Error::Domain(format!(
            "uniform closed form is two-user only (n = {})",
            params.n
        )));
    }
    if !(0.0..=1.0).contains(&q) || !q.is_finite() {
        return Err(Error::Domain(format!("jamming probability {q} outside [0,1]")));
    }
    params.require_stable()?;
    let beta = 1.0 - params.alpha();
    if q > beta + 1e-12 {
        return Err(Error::InfeasiblePolicy(format!(
            "q = {q} exceeds the stability budget beta = {beta:.6}"
        )));
    }
    let (p, lam) = (params.p, params.lambda);
    if lam == 0.0 {
        return Ok(OccupancyDist::empty(2));
    }
    let (ph, qh) = (1.0 - p, 1.0 - q);
    let service = p * ph * qh; // rate of a lone clean success while both are backlogged
    let drift = service - lam;
    let denom = drift + lam * ph;
    let pi02 = ((p * qh - lam) / (p * qh)) * drift / denom;
    let pi11 = 2.0 * (1.0 - lam / service) * lam * ph / denom;
    let pi02 = pi02.clamp(0.0, 1.0);
    let pi11 = pi11.clamp(0.0, 1.0);
    OccupancyDist::new(vec![pi02, pi11, 1.0 - pi02 - pi11])
}

// -----------------------------------------------------------------------------
// Side-information closed form (two users)
// -----------------------------------------------------------------------------

/// Start-of-slot probability that a given queue is empty under the
/// state-aware policy, as printed (the numerator/denominator polynomial in
/// p, q, w, alpha).
fn p_queue_empty(p: f64, q: f64, w: f64, alpha: f64) -> f64 {
    let num = (1.0 - w) * (-p + p * p * (1.0 - q) + p * q + (1.0 - p) * p * alpha);
    let den = p * p * (1.0 - q) * (1.0 - w)
        + (1.0 - p) * p * (q - w) * alpha
        + p * (1.0 - q) * (-1.0 + w + (1.0 - p) * p * alpha);
    num / den
}

/// Stationary occupancy of the two-user system when slots with both users
/// backlogged are jammed with probability `q` and slots with exactly one
/// backlogged user with probability `w`.
///
/// The lam/(p ph (1-q)) factor is read with the complement of q (the printed
/// alternative produces negative probabilities inside the feasible box).
/// Feasibility: q <= 1 - alpha and w <= 1 - alpha + p*alpha; collapses to
/// `steady_state_uniform` when w = q.
pub fn steady_state_sideinfo(params: &SystemParams, q: f64, w: f64) -> Result<OccupancyDist> {
    if params.n != 2 {
        return Err(Error::Domain(format!(
            "side-information closed form is two-user only (n = {})",
            params.n
        )));
    }
    for (name, x) in [("q", q), ("w", w)] {
        if !(0.0..=1.0).contains(&x) || !x.is_finite() {
            return Err(Error::Domain(format!("{name} = {x} outside [0,1]")));
        }
    }
    params.require_stable()?;
    let alpha = params.alpha();
    let beta = 1.0 - alpha;
    let wmax = 1.0 - alpha + params.p * alpha;
    if q > beta + 1e-12 {
        return Err(Error::InfeasiblePolicy(format!(
            "q = {q} exceeds the stability budget beta = {beta:.6}"
        )));
    }
    if w > wmax + 1e-12 {
        return Err(Error::InfeasiblePolicy(format!(
            "w = {w} exceeds the one-backlogged budget {wmax:.6}"
        )));
    }
    let (p, lam) = (params.p, params.lambda);
    if lam == 0.0 {
        return Ok(OccupancyDist::empty(2));
    }
    let (ph, qh) = (1.0 - p, 1.0 - q);
    let p0 = p_queue_empty(p, q, w, alpha);
    let pi02 = ((p * (1.0 - w) - lam) / (p * (1.0 - w))) * p0;
    let pi11 = 2.0 * (1.0 - lam / (p * ph * qh)) * (1.0 - p0);
    let pi02 = pi02.clamp(0.0, 1.0);
    let pi11 = pi11.clamp(0.0, 1.0);
    OccupancyDist::new(vec![pi02, pi11, 1.0 - pi02 - pi11])
}

// -----------------------------------------------------------------------------
// No-jamming baseline
// -----------------------------------------------------------------------------

/// Stationary occupancy with the jammer silent.
///
/// For n = 2 this is the uniform closed form at q = 0, and the all-backlogged
/// probability additionally satisfies the identity
/// pi_20 = (1-p) alpha^2 / (1 - p alpha), which is asserted to 1e-9.  For
/// n > 2 no closed form exists; callers use the truncated solver via
/// `dtmc::baseline_no_jamming_solved`.
pub fn baseline_no_jamming(params: &SystemParams) -> Result<OccupancyDist> {
    params.require_stable()?;
    if params.n != 2 {
        return Err(Error::Domain(
            "closed-form baseline is two-user only; use the truncated solver for n > 2".into(),
        ));
    }
    let dist = steady_state_uniform(params, 0.0)?;
    let (p, alpha) = (params.p, params.alpha());
    let identity = (1.0 - p) * alpha * alpha / (1.0 - p * alpha);
    if (dist.pi[2] - identity).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "baseline identity violated: pi_20 = {} vs (1-p)a^2/(1-pa) = {}",
            dist.pi[2], identity
        )));
    }
    Ok(dist)
}

// -----------------------------------------------------------------------------
// Budgets and bounds
// -----------------------------------------------------------------------------

/// Maximum admissible long-run jammed fraction preserving stability:
/// beta_n = 1 - alpha_n.  Returns 0 for an already-unstable load.
pub fn jam_budget(params: &SystemParams) -> f64 {
    (1.0 - params.alpha()).max(0.0)
}

/// Lower bound on the baseline all-backlogged probability for n users:
///
/// ```text
/// [1 + p phat^(n-1) / (lambda (1 - (n-1) p phat^(n-2)))]^(-1)
/// ```
///
/// Valid when (n-1) p phat^(n-2) < 1; tends to 0 with the arrival rate.
pub fn pi_n0_lower_bound(n: usize, p: f64, lambda: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("user count {n} must be at least 2")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("attempt probability {p} outside (0,1)")));
    }
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::Domain(format!("arrival probability {lambda} negative")));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let ph = 1.0 - p;
    let gate = 1.0 - (n as f64 - 1.0) * p * ph.powi(n as i32 - 2);
    if gate <= 0.0 {
        return Err(Error::Domain(format!(
            "bound undefined: 1 - (n-1) p phat^(n-2) = {gate:.6} is not positive"
        )));
    }
    Ok(1.0 / (1.0 + p * ph.powi(n as i32 - 1) / (lambda * gate)))
}

// -----------------------------------------------------------------------------
// Tests
// -----------------------------------------------------------------------------
