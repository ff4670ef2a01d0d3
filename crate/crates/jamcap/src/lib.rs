//! Covert-capacity workbench for a jammer signaling over a slotted random
//! access channel.
//!
//! An adversary (the sender) corrupts a slotted ALOHA uplink: each slot she
//! either jams or stays quiet, and a monitor (the receiver) watches the
//! channel outcome — idle, clean success, or collision/corruption.  Because
//! collisions also happen naturally, the pair obtains a Z-channel whose
//! crossover is the collision probability given an active slot, and the
//! jamming budget couples the signaling rate to the queue dynamics of the
//! legitimate users.
//!
//! Layers, from pure math outward:
//!   * [`zchannel`] — Z-channel rates, the optimal input weight in closed
//!     and numeric form, and the per-state collision crossover;
//!   * [`params`] / [`queue_model`] — system parameters, jamming policies,
//!     and the closed-form two-user occupancy models;
//!   * [`dtmc`] — the truncated stationary solver used as the numerical
//!     oracle for every closed form;
//!   * [`bounds`] — achievable-rate lower bounds and ergodic upper bounds,
//!     two-user and n-user;
//!   * [`sim`] — the seeded slot simulator, induced-channel statistics,
//!     the coupled jammed/unjammed experiment, and the stability probe.

pub mod bounds;
pub mod dtmc;
pub mod error;
pub mod params;
pub mod queue_model;
pub mod sim;
pub mod zchannel;

pub use bounds::BoundResult;
pub use dtmc::{ScanSolver, SolveOutcome, TruncationSpec};
pub use error::{Error, Result};
pub use params::{JamPolicy, OccupancyDist, SystemParams};
pub use sim::{
    BobSymbol, ChannelStats, DominanceReport, SimConfig, SimRun, SimStats, SlotRecord,
    StabilityVerdict,
};
