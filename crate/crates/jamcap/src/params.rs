//! Shared domain types: system parameters, jamming policies, and occupancy
//! distributions over backlog states.

use crate::error::{Error, Result};

// -----------------------------------------------------------------------------
// System parameters
// -----------------------------------------------------------------------------

/// Parameters of the legitimate multi-access system: `n` symmetric users,
/// each receiving one packet per slot with probability `lambda` and, while
/// backlogged, attempting transmission with probability `p`.
///
/// The derived offered load is `alpha_n = lambda / (p * (1-p)^(n-1))`; the
/// system is stable without jamming iff `alpha_n < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub n: usize,
    pub p: f64,
    pub lambda: f64,
}

impl SystemParams {
    /// Validated constructor from the raw arrival rate.
    pub fn new(n: usize, p: f64, lambda: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("user count {n} must be at least 2")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("attempt probability {p} outside (0,1)")));
        }
        if !(0.0..=1.0).contains(&lambda) || !lambda.is_finite() {
            return Err(Error::Domain(format!("arrival probability {lambda} outside [0,1]")));
        }
        Ok(SystemParams { n, p, lambda })
    }

    /// Validated constructor from the offered load: `lambda = alpha * p * (1-p)^(n-1)`.
    pub fn from_alpha(n: usize, p: f64, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("offered load {alpha} must be non-negative")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("attempt probability {p} outside (0,1)")));
        }
        let lambda = alpha * p * (1.0 - p).powi(n as i32 - 1);
        Self::new(n, p, lambda)
    }

    /// Complement of the attempt probability.
    pub fn p_hat(&self) -> f64 {
        1.0 - self.p
    }

    /// Offered load `alpha_n = lambda / (p * (1-p)^(n-1))` (for n = 2 this is
    /// the familiar `lambda / (p * (1-p))`).
    pub fn alpha(&self) -> f64 {
        self.lambda / (self.p * self.p_hat().powi(self.n as i32 - 1))
    }

    /// Stability check: the unjammed system is stable iff the offered load is
    /// below one.
    pub fn is_stable(&self) -> bool {
        self.alpha() < 1.0
    }

    /// Convenience guard used by operations that require stability.
    pub fn require_stable(&self) -> Result<()> {
        if self.is_stable() {
            Ok(())
        } else {
            Err(Error::Unstable(format!(
                "offered load alpha = {:.6} is not below 1",
                self.alpha()
            )))
        }
    }
}

// -----------------------------------------------------------------------------
// Jamming policies
// -----------------------------------------------------------------------------

/// A stationary jamming policy: the probability with which the covert
/// transmitter jams an active slot, as a function of the backlog state
/// observed at the start of the slot.
#[derive(Debug, Clone, PartialEq)]
pub enum JamPolicy {
    /// Jam every active slot with the same probability `q`, regardless of how
    /// many users are backlogged.
    Uniform { q: f64 },
    /// Two-user policy with full state information: jam with probability `q`
    /// when both users are backlogged and `w` when exactly one is.
    SideInfo { q: f64, w: f64 },
    /// One jamming probability per backlog count: `qs[k-1]` applies when
    /// exactly k users are backlogged (k = 1..n).
    Vector { qs: Vec<f64> },
}

impl JamPolicy {
    /// Validate probability ranges and shape against the user count.
    pub fn validate(&self, n: usize) -> Result<()> {
        let check = |x: f64, name: &str| -> Result<()> {
            if (0.0..=1.0).contains(&x) && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} = {x} outside [0,1]")))
            }
        };
        match self {
            JamPolicy::Uniform { q } => check(*q, "q"),
            JamPolicy::SideInfo { q, w } => {
                if n != 2 {
                    return Err(Error::Domain(
                        "side-information policy is defined for n = 2 only".into(),
                    ));
                }
                check(*q, "q")?;
                check(*w, "w")
            }
            JamPolicy::Vector { qs } => {
                if qs.len() != n {
                    return Err(Error::Domain(format!(
                        "vector policy has {} entries, expected {n}",
                        qs.len()
                    )));
                }
                for (i, &x) in qs.iter().enumerate() {
                    check(x, &format!("q[{}]", i + 1))?;
                }
                Ok(())
            }
        }
    }

    /// Jamming probability applied in a slot whose start-of-slot backlog
    /// count is `k` (only consulted for active slots; `k = 0` returns 0).
    pub fn state_prob(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        match self {
            JamPolicy::Uniform { q } => *q,
            JamPolicy::SideInfo { q, w } => {
                if k >= 2 {
                    *q
                } else {
                    *w
                }
            }
            JamPolicy::Vector { qs } => qs[(k - 1).min(qs.len() - 1)],
        }
    }

    /// The all-zero (no jamming) policy.
    pub fn none() -> Self {
        JamPolicy::Uniform { q: 0.0 }
    }
}

// -----------------------------------------------------------------------------
// Occupancy distributions
// -----------------------------------------------------------------------------

/// Distribution over backlog states: `pi[k]` is the stationary probability
/// that exactly k of the n queues are nonempty.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyDist {
    pub pi: Vec<f64>,
}

impl OccupancyDist {
    /// Wrap a vector of n+1 state probabilities, checking non-negativity and
    /// normalization to within 1e-9.
    pub fn new(pi: Vec<f64>) -> Result<Self> {
        if pi.is_empty() {
            return Err(Error::Domain("occupancy vector is empty".into()));
        }
        let sum: f64 = pi.iter().sum();
        if pi.iter().any(|&x| !(-1e-12..=1.0 + 1e-9).contains(&x) || !x.is_finite()) {
            return Err(Error::Domain(format!("occupancy entries outside [0,1]: {pi:?}")));
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("occupancy sums to {sum}, not 1")));
        }
        Ok(OccupancyDist { pi })
    }

    /// Number of users this distribution describes.
    pub fn n(&self) -> usize {
        self.pi.len() - 1
    }

    /// The degenerate distribution with all mass on the all-backlogged state:
    /// the limit of the stationary law as the jamming weight approaches the
    /// stability budget.
    pub fn saturated(n: usize) -> Self {
        let mut pi = vec![0.0; n + 1];
        pi[n] = 1.0;
        OccupancyDist { pi }
    }

    /// The empty-system distribution (all queues empty almost surely).
    pub fn empty(n: usize) -> Self {
        let mut pi = vec![0.0; n + 1];
        pi[0] = 1.0;
        OccupancyDist { pi }
    }

    /// Long-run fraction of active slots under attempt probability `p`:
    /// sum over k of pi[k] * (1 - (1-p)^k).
    pub fn active_fraction(&self, p: f64) -> f64 {
        let ph = 1.0 - p;
        self.pi
            .iter()
            .enumerate()
            .map(|(k, &w)| w * (1.0 - ph.powi(k as i32)))
            .sum()
    }
}

// -----------------------------------------------------------------------------
// Tests
// -----------------------------------------------------------------------------
