//! Grid sweep over (p, alpha): every selected bound evaluated at every grid
//! point, one CSV row per point.
//!
//! Columns:
//!
//! ```text
//! n,p,alpha,lambda,beta,lb_s1,lb_s2,q2_opt,lb_s3,q3_opt,w3_opt,ub,beta_bar,clamped[,sim cols],note
//! ```
//!
//! `beta_bar` is the upper bound's long-run weight *before* clamping to
//! [0,1] (the clamped value is what the bound actually used; `clamped` is 1
//! when the two differ, or when the rate itself spilled out of [0,1]).  For
//! two users `q3_opt`/`w3_opt` are the state-informed pair; for more users
//! they are the top-state and lone-user entries of the optimizing weight
//! vector.  A strategy that fails at a point leaves its cells empty and
//! explains itself in `note`; the sweep itself still succeeds.
//!
//! Rows are computed independently (optionally in parallel), sorted by
//! (p, alpha) up front, and written once — so the bytes do not depend on
//! the number of worker threads.

use crate::config::{ConfigError, FlatConfig};
use crate::fmtnum::g6;
use jamcap::bounds::{
    lb_n_strategy1, lb_n_strategy2, lb_n_strategy3, lb_strategy1, lb_strategy2, lb_strategy3,
    ub_n_user, ub_two_user,
};
use jamcap::queue_model::jam_budget;
use jamcap::sim::{channel_stats, simulate};
use jamcap::{BoundResult, JamPolicy, OccupancyDist, SimConfig, SystemParams};
use rayon::prelude::*;

/// Default probability grid (the six attempt rates the figure set uses).
pub const DEFAULT_P_GRID: [f64; 6] = [0.01, 0.2, 0.4, 0.6, 0.8, 0.9];

/// Which bounds to evaluate.
#[derive(Debug, Clone, Copy)]
pub struct StrategySet {
    pub s1: bool,
    pub s2: bool,
    pub s3: bool,
    pub ub: bool,
}

impl StrategySet {
    pub fn all() -> Self {
        StrategySet { s1: true, s2: true, s3: true, ub: true }
    }
}

/// Validated sweep request.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub n: usize,
    pub p_grid: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    pub strategies: StrategySet,
    pub sim_confirm: bool,
    pub seed: u64,
}

impl SweepConfig {
    /// Build from a flat config, applying the default grids.
    pub fn from_flat(cfg: &FlatConfig) -> Result<Self, ConfigError> {
        let n = cfg.usize_or("n", 2)?;
        if n < 2 {
            return Err(ConfigError(format!("n = {n} must be at least 2")));
        }
        let p_grid = cfg.f64_list("p_grid")?.unwrap_or_else(|| DEFAULT_P_GRID.to_vec());
        let alpha_grid = cfg
            .f64_list("alpha_grid")?
            .unwrap_or_else(|| (2..=19).map(|i| i as f64 * 0.05).collect());
        for (name, grid) in [("p_grid", &p_grid), ("alpha_grid", &alpha_grid)] {
            if grid.iter().any(|v| !(*v > 0.0 && *v < 1.0)) {
                return Err(ConfigError(format!("{name}: every value must lie in (0,1)")));
            }
        }
        let strategies = match cfg.get("strategies") {
            None => StrategySet::all(),
            Some(raw) => {
                let mut set = StrategySet { s1: false, s2: false, s3: false, ub: false };
                for part in raw.split(',').map(str::trim) {
                    match part {
                        "s1" => set.s1 = true,
                        "s2" => set.s2 = true,
                        "s3" => set.s3 = true,
                        "ub" => set.ub = true,
                        other => {
                            return Err(ConfigError(format!("unknown strategy `{other}`")));
                        }
                    }
                }
                set
            }
        };
        Ok(SweepConfig {
            n,
            p_grid,
            alpha_grid,
            strategies,
            sim_confirm: cfg.bool_or("sim_confirm", false)?,
            seed: cfg.u64_opt("seed")?.unwrap_or(1),
        })
    }

    /// CSV header matching `rows`.
    pub fn header(&self) -> String {
        let mut h = String::from(
            "n,p,alpha,lambda,beta,lb_s1,lb_s2,q2_opt,lb_s3,q3_opt,w3_opt,ub,beta_bar,clamped",
        );
        if self.sim_confirm {
            h.push_str(",sim_active,sim_active_se,sim_crossover,sim_crossover_se");
        }
        h.push_str(",note");
        h
    }
}

/// One evaluated grid point, already rendered to CSV cells.
struct Row {
    cells: Vec<String>,
    notes: Vec<String>,
}

impl Row {
    fn push_num(&mut self, v: f64) {
        self.cells.push(g6(v));
    }

    fn push_empty(&mut self, count: usize) {
        for _ in 0..count {
            self.cells.push(String::new());
        }
    }

    fn note(&mut self, tag: &str, text: impl AsRef<str>) {
        // Notes share one comma-separated cell; keep them comma-free.
        self.notes.push(format!("{tag}: {}", text.as_ref().replace(',', ";")));
    }

    fn absorb(&mut self, tag: &str, result: &BoundResult) {
        for n in &result.notes {
            self.note(tag, n);
        }
    }

    fn finish(mut self) -> String {
        self.cells.push(self.notes.join("; "));
        self.cells.join(",")
    }
}

/// Evaluate one grid point.  Never fails: per-strategy errors become empty
/// cells plus a note.
fn evaluate_point(cfg: &SweepConfig, p: f64, alpha: f64, row_seed: u64) -> String {
    let mut row = Row { cells: Vec::new(), notes: Vec::new() };
    let params = match SystemParams::from_alpha(cfg.n, p, alpha) {
        Ok(p) => p,
        Err(e) => {
            // Grid validation keeps this unreachable in practice; belt and
            // braces for hand-written grids.
            row.cells.push(cfg.n.to_string());
            row.push_num(p);
            row.push_num(alpha);
            row.push_empty(11 + if cfg.sim_confirm { 4 } else { 0 });
            row.note("params", e.to_string());
            return row.finish();
        }
    };
    row.cells.push(cfg.n.to_string());
    row.push_num(p);
    row.push_num(alpha);
    row.push_num(params.lambda);
    row.push_num(jam_budget(&params));

    let two_user = cfg.n == 2;
    let saturated = OccupancyDist::saturated(cfg.n);

    // lb_s1
    if cfg.strategies.s1 {
        let r = if two_user { lb_strategy1(&params) } else { lb_n_strategy1(&params, &saturated) };
        match r {
            Ok(b) => {
                row.push_num(b.rate);
                row.absorb("s1", &b);
            }
            Err(e) => {
                row.push_empty(1);
                row.note("s1", e.to_string());
            }
        }
    } else {
        row.push_empty(1);
    }

    // lb_s2 + q2_opt
    let mut q2 = None;
    if cfg.strategies.s2 {
        let r = if two_user { lb_strategy2(&params) } else { lb_n_strategy2(&params, &saturated) };
        match r {
            Ok(b) => {
                row.push_num(b.rate);
                if let Some(JamPolicy::Uniform { q }) = b.optimizer {
                    row.push_num(q);
                    q2 = Some(q);
                } else {
                    row.push_empty(1);
                }
                row.absorb("s2", &b);
            }
            Err(e) => {
                row.push_empty(2);
                row.note("s2", e.to_string());
            }
        }
    } else {
        row.push_empty(2);
    }

    // lb_s3 + q3_opt + w3_opt
    if cfg.strategies.s3 {
        let r = if two_user { lb_strategy3(&params) } else { lb_n_strategy3(&params) };
        match r {
            Ok(b) => {
                row.push_num(b.rate);
                match &b.optimizer {
                    Some(JamPolicy::SideInfo { q, w }) => {
                        row.push_num(*q);
                        row.push_num(*w);
                    }
                    Some(JamPolicy::Vector { qs }) if !qs.is_empty() => {
                        row.push_num(qs[qs.len() - 1]);
                        row.push_num(qs[0]);
                    }
                    _ => row.push_empty(2),
                }
                row.absorb("s3", &b);
            }
            Err(e) => {
                row.push_empty(3);
                row.note("s3", e.to_string());
            }
        }
    } else {
        row.push_empty(3);
    }

    // ub + beta_bar + clamped
    if cfg.strategies.ub {
        let r = if two_user { ub_two_user(&params) } else { ub_n_user(&params) };
        match r {
            Ok(b) => {
                row.push_num(b.rate);
                let pre_clamp = b
                    .notes
                    .iter()
                    .find_map(|n| n.strip_prefix("budget pre-clamp "))
                    .and_then(|s| s.parse::<f64>().ok());
                row.push_num(pre_clamp.unwrap_or(b.budget));
                let clamped =
                    pre_clamp.is_some() || b.notes.iter().any(|n| n.starts_with("clamped:"));
                row.cells.push(if clamped { "1" } else { "0" }.to_string());
                row.absorb("ub", &b);
            }
            Err(e) => {
                row.push_empty(3);
                row.note("ub", e.to_string());
            }
        }
    } else {
        row.push_empty(3);
    }

    if cfg.sim_confirm {
        simulate_point(&params, q2, row_seed, &mut row);
    }

    row.finish()
}

/// Optional empirical confirmation: simulate at the strategy-2 optimizer
/// (or silence when it is unavailable) and report the active fraction and
/// crossover with their standard errors.
fn simulate_point(params: &SystemParams, q2: Option<f64>, seed: u64, row: &mut Row) {
    let policy = JamPolicy::Uniform { q: q2.unwrap_or(0.0) };
    if q2.is_none() {
        row.note("sim", "no strategy-2 weight available; simulated unjammed");
    }
    let sim_cfg = match SimConfig::new(200_000, 20_000, seed, false) {
        Ok(c) => c,
        Err(e) => {
            row.push_empty(4);
            row.note("sim", e.to_string());
            return;
        }
    };
    match simulate(params, &policy, &sim_cfg) {
        Ok(run) => {
            row.push_num(run.stats.active_fraction);
            // Active-slot SE from the batch count is folded into the
            // occupancy SEs; report the binomial-style error on the mean.
            let se_active = (run.stats.active_fraction * (1.0 - run.stats.active_fraction)
                / run.stats.slots_counted as f64)
                .sqrt();
            row.push_num(se_active);
            match channel_stats(&run.stats) {
                Ok(ch) => {
                    row.push_num(ch.crossover_hat);
                    row.push_num(ch.crossover_se);
                }
                Err(e) => {
                    row.push_empty(2);
                    row.note("sim", e.to_string());
                }
            }
        }
        Err(e) => {
            row.push_empty(4);
            row.note("sim", e.to_string());
        }
    }
}

/// Evaluate the whole grid.  Points are independent; with a Rayon pool
/// installed they run in parallel, and the ordered collect keeps the output
/// identical to the serial run.
pub fn run(cfg: &SweepConfig) -> String {
    let mut grid: Vec<(f64, f64)> = Vec::new();
    for &p in &cfg.p_grid {
        for &alpha in &cfg.alpha_grid {
            grid.push((p, alpha));
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let rows: Vec<String> = grid
        .par_iter()
        .enumerate()
        .map(|(idx, &(p, alpha))| evaluate_point(cfg, p, alpha, cfg.seed.wrapping_add(idx as u64)))
        .collect();

    let mut out = cfg.header();
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(text: &str) -> SweepConfig {
        SweepConfig::from_flat(&FlatConfig::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn default_grid_has_the_documented_shape() {
        let cfg = flat("");
        assert_eq!(cfg.p_grid.len(), 6);
        assert_eq!(cfg.alpha_grid.len(), 18);
        assert!((cfg.alpha_grid[0] - 0.10).abs() < 1e-12);
        assert!((cfg.alpha_grid[17] - 0.95).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_grid_values() {
        let cfg = FlatConfig::parse("p_grid = 0.5, 1.0").unwrap();
        assert!(SweepConfig::from_flat(&cfg).is_err());
        let cfg = FlatConfig::parse("alpha_grid = 0.0").unwrap();
        assert!(SweepConfig::from_flat(&cfg).is_err());
    }

    #[test]
    fn single_point_row_is_complete_and_ordered() {
        let cfg = flat("p_grid = 0.5\nalpha_grid = 0.8");
        let csv = run(&cfg);
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("n,p,alpha,lambda,beta,"));
        assert!(header.ends_with(",note"));
        let row = lines.next().unwrap();
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), header.split(',').count());
        assert_eq!(cells[0], "2");
        assert_eq!(cells[1], "0.5");
        assert_eq!(cells[2], "0.8");
        // beta = 1 - alpha
        assert_eq!(cells[4], "0.2");
        // All four bounds produced numbers.
        for cell in &cells[5..12] {
            assert!(!cell.is_empty(), "empty cell in {row}");
        }
    }

    #[test]
    fn strategy_subset_leaves_other_cells_empty() {
        let cfg = flat("p_grid = 0.5\nalpha_grid = 0.8\nstrategies = s1");
        let csv = run(&cfg);
        let row = csv.lines().nth(1).unwrap();
        let cells: Vec<&str> = row.split(',').collect();
        assert!(!cells[5].is_empty(), "lb_s1 missing: {row}");
        assert!(cells[6].is_empty() && cells[11].is_empty(), "unexpected cells: {row}");
    }
}
