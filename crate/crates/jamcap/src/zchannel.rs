//! Z-channel kernel: binary entropy, weight-constrained rates, the optimal
//! input weight, and the collision crossover probabilities of the induced
//! channel.
//!
//! The covert channel seen by the receiver is a Z-channel: a jammed slot is
//! received as '1' with certainty, while a clean slot can still flip to '1'
//! when two or more legitimate users collide on their own.  With k backlogged
//! users the crossover probability is
//!
//! ```text
//! pc(k) = (1 - (k p phat^(k-1) + phat^k)) / (1 - phat^k),   phat = 1 - p,
//! ```
//!
//! the chance of a multi-attempt collision given the slot is active.  The
//! rate of a Z-channel driven by i.i.d. weight-u input is
//!
//! ```text
//! R_z(u, pc) = H(u * (1-pc)) - u * H(1-pc)          (bits per active slot)
//! ```
//!
//! maximized over u at
//!
//! ```text
//! u_max = 1 / ((1-pc) * (1 + 2^(H(1-pc)/(1-pc)))).
//! ```
//!
//! All logarithms are base 2; 0*log(0) is taken as 0.

use crate::error::{Error, Result};

// -----------------------------------------------------------------------------
// Entropy and rate
// -----------------------------------------------------------------------------

/// Binary entropy H(x) in bits, with the 0*log(0) = 0 convention.
///
/// Defined for x in [0,1]; values outside are clamped by the convention
/// H(x) = 0 at both endpoints (callers validate their own domains).
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Rate of a Z-channel with crossover probability `pc` under i.i.d. input of
/// weight `u` (probability of sending '1'), in bits per channel use.
///
/// R_z(u, pc) = H(u*(1-pc)) - u*H(1-pc).  Total on u, pc in [0,1]; returns 0
/// at the degenerate corners (pc = 1 or u = 0).
pub fn z_rate(u: f64, pc: f64) -> f64 {
    let ph = 1.0 - pc;
    binary_entropy(u * ph) - u * binary_entropy(ph)
}

// -----------------------------------------------------------------------------
// Optimal input weight
// -----------------------------------------------------------------------------

/// Input weight maximizing R_z(., pc): the unique stationary point
///
/// ```text
/// u_max = 1 / ((1-pc) * (1 + 2^(H(1-pc)/(1-pc)))).
/// ```
///
/// `pc = 1` is degenerate (R_z is identically zero); by convention the weight
/// 0 is returned for it so parameter sweeps over corners do not abort.
pub fn optimal_weight(pc: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&pc) || !pc.is_finite() {
        return Err(Error::Domain(format!("crossover probability {pc} outside [0,1]")));
    }
    if pc == 1.0 {
        return Ok(0.0); // degenerate channel: flagged convention, not an error
    }
    let ph = 1.0 - pc;
    Ok(1.0 / (ph * (1.0 + (binary_entropy(ph) / ph).exp2())))
}

/// Numerical maximizer of `z_rate(., pc)` on [0,1], independent of the closed
/// form: golden-section bracketing followed by Newton steps on five-point
/// central-difference derivatives (the bare bracket stalls near 1e-8 from
/// flat-top rounding, and a parabolic fit inherits an h^2 cubic-term bias).
pub fn optimal_weight_numeric(pc: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&pc) || !pc.is_finite() {
        return Err(Error::Domain(format!("crossover probability {pc} outside [0,1]")));
    }
    if pc == 1.0 {
        return Ok(0.0);
    }
    let f = |u: f64| z_rate(u, pc);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc < fd {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        }
    }
    let mut x0 = 0.5 * (a + b);
    // Newton polish on stencil derivatives: the wide h keeps the difference
    // quotients far above rounding noise while the O(h^4) truncation error
    // stays below 1e-12 for this smooth objective.
    let h = 1e-4;
    for _ in 0..2 {
        let (ym2, ym1, y0) = (f(x0 - 2.0 * h), f(x0 - h), f(x0));
        let (yp1, yp2) = (f(x0 + h), f(x0 + 2.0 * h));
        let d1 = (-yp2 + 8.0 * yp1 - 8.0 * ym1 + ym2) / (12.0 * h);
        let d2 = (-yp2 + 16.0 * yp1 - 30.0 * y0 + 16.0 * ym1 - ym2) / (12.0 * h * h);
        if d2 >= 0.0 {
            break; // not locally concave: keep the bracket estimate
        }
        x0 = (x0 - d1 / d2).clamp(0.0, 1.0);
    }
    Ok(x0)
}

/// Z-channel capacity under a Hamming-weight constraint: the best rate with
/// at most a `beta` fraction of '1' inputs,
///
/// ```text
/// C_z(beta, pc) = R_z(min(u_max, beta), pc),
/// ```
///
/// monotone non-decreasing in `beta` and constant once `beta` passes the
/// unconstrained optimum.
pub fn z_capacity_constrained(beta: f64, pc: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) || !beta.is_finite() {
        return Err(Error::Domain(format!("weight budget {beta} outside [0,1]")));
    }
    let u = optimal_weight(pc)?;
    Ok(z_rate(u.min(beta), pc))
}

// -----------------------------------------------------------------------------
// Collision crossover
// -----------------------------------------------------------------------------

/// Crossover probability of the induced Z-channel when `k` users are
/// backlogged: the probability that an active slot carries a multi-attempt
/// collision, (1 - (k p phat^(k-1) + phat^k)) / (1 - phat^k).
///
/// Non-decreasing in k; k = 1 gives 0 (a lone user cannot self-collide).
pub fn crossover_k(k: usize, p: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("crossover undefined for zero backlogged users".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("attempt probability {p} outside (0,1)")));
    }
    let ph = 1.0 - p;
    let phk = ph.powi(k as i32 - 1);
    let active = 1.0 - phk * ph;
    let single = k as f64 * p * phk;
    Ok(((active - single) / active).clamp(0.0, 1.0))
}

/// Recover the attempt probability from the two-user crossover: the inverse
/// of `crossover_k(2, .)`, p = 2 pc / (1 + pc).
pub fn attempt_from_crossover(pc: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&pc) {
        return Err(Error::Domain(format!("crossover probability {pc} outside [0,1)")));
    }
    Ok(2.0 * pc / (1.0 + pc))
}

// -----------------------------------------------------------------------------
// Tests
// -----------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_matches_hand_values() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        // H(0.25) = 2 - 0.75*log2(3)
        let expect = 2.0 - 0.75 * 3f64.log2();
        assert!((binary_entropy(0.25) - expect).abs() < 1e-15);
    }

    #[test]
    fn rate_examples() {
        assert_eq!(z_rate(0.0, 0.3), 0.0);
        // Noiseless channel: R_z(u, 0) = H(u).
        assert!((z_rate(0.3, 0.0) - binary_entropy(0.3)).abs() < 1e-15);
        // H(0.2) - 0.4*H(0.5) = H(0.2) - 0.4
        let expect = binary_entropy(0.2) - 0.4;
        assert!((z_rate(0.4, 0.5) - expect).abs() < 1e-12);
        assert!((z_rate(0.4, 0.5) - 0.321928).abs() < 1e-6);
    }

    #[test]
    fn optimal_weight_closed_form_values() {
        assert!((optimal_weight(0.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((optimal_weight(0.5).unwrap() - 0.4).abs() < 1e-12);
        assert!((optimal_weight(1.0 / 3.0).unwrap() - 0.41690).abs() < 1e-4);
        assert_eq!(optimal_weight(1.0).unwrap(), 0.0);
        assert!(optimal_weight(1.2).is_err());
        assert!(optimal_weight(-0.1).is_err());
    }

    #[test]
    fn closed_form_agrees_with_numeric_maximizer() {
        for i in 0..20 {
            let pc = i as f64 * 0.05;
            let exact = optimal_weight(pc).unwrap();
            let numeric = optimal_weight_numeric(pc).unwrap();
            assert!(
                (exact - numeric).abs() < 1e-9,
                "pc={pc}: closed {exact} vs numeric {numeric}"
            );
        }
    }

    #[test]
    fn constrained_capacity_values() {
        assert_eq!(z_capacity_constrained(0.0, 0.3).unwrap(), 0.0);
        assert!((z_capacity_constrained(1.0, 1.0 / 3.0).unwrap() - 0.46985).abs() < 1e-4);
        assert!((z_capacity_constrained(0.2, 1.0 / 3.0).unwrap() - 0.38285).abs() < 1e-4);
        // Constant above the unconstrained optimum.
        let c1 = z_capacity_constrained(0.9, 0.2).unwrap();
        let c2 = z_capacity_constrained(1.0, 0.2).unwrap();
        assert_eq!(c1, c2);
    }

    #[test]
    fn unconstrained_capacity_identity() {
        // Independent closed form: C_z = log2(1 + (1-pc) * pc^(pc/(1-pc))).
        for i in 1..20 {
            let pc = i as f64 * 0.05;
            let ph = 1.0 - pc;
            let oracle = (1.0 + ph * pc.powf(pc / ph)).log2();
            let got = z_capacity_constrained(1.0, pc).unwrap();
            assert!((got - oracle).abs() < 1e-9, "pc={pc}: {got} vs {oracle}");
        }
        // pc = 0: capacity 1 (noiseless binary channel).
        assert!((z_capacity_constrained(1.0, 0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn crossover_values_and_monotonicity() {
        assert_eq!(crossover_k(1, 0.4).unwrap(), 0.0);
        assert!((crossover_k(2, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((crossover_k(3, 0.5).unwrap() - 0.571429).abs() < 1e-6);
        assert!(crossover_k(0, 0.5).is_err());
        for pi in 1..10 {
            let p = pi as f64 * 0.1;
            let mut prev = 0.0;
            for k in 1..=8 {
                let c = crossover_k(k, p).unwrap();
                assert!(c >= prev - 1e-12, "p={p} k={k}");
                prev = c;
            }
        }
    }

    #[test]
    fn crossover_round_trip() {
        assert_eq!(attempt_from_crossover(0.0).unwrap(), 0.0);
        assert!((attempt_from_crossover(1.0 / 3.0).unwrap() - 0.5).abs() < 1e-12);
        let p = 0.7;
        let back = attempt_from_crossover(crossover_k(2, p).unwrap()).unwrap();
        assert!((back - p).abs() < 1e-12);
        assert!(attempt_from_crossover(1.0).is_err());
    }
}
