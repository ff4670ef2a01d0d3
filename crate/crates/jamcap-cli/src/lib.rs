//! Command-line workbench over the capacity library: grid sweeps, the
//! standard figure set, single simulation runs with optional traces, the
//! coupled dominance experiment, and the cross-validation report.
//!
//! Every command is a thin shell around a pure function in one of these
//! modules, so the integration tests drive the same code paths as the
//! binary without spawning processes.

pub mod config;
pub mod figures;
pub mod fmtnum;
pub mod simulate;
pub mod sweep;
pub mod verify;
