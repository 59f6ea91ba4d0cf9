//! Parameter-grid experiment runner.
//!
//! Runs the lagged scenario over a (beta, N) grid and tabulates per-step and
//! total rows, optionally with a Monte-Carlo path estimate per cell. Cells
//! execute concurrently; rows are assembled in a fixed order and every cell
//! derives its own seed from the grid position, so output is identical for
//! identical configs regardless of thread count.

use crate::error::{Error, Result};
use crate::jarzynski::monte_carlo_estimate;
use crate::lagged::{n_step_scenario, UtilitySchedule};
use crate::parallel::try_indexed_map;
use crate::policy::Policy;
use crate::rng::split_seed;
use crate::utility::{ResourceParameter, UtilityChange};

/// Grid specification for one sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub prior: Policy,
    pub du: UtilityChange,
    pub beta_grid: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub seed: u64,
    /// Samples per cell for the Jarzynski columns; 0 disables them.
    pub mc_samples: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.du.ensure_space(self.prior.space())?;
        if self.beta_grid.is_empty() {
            return Err(Error::EmptyInput("beta grid"));
        }
        if self.n_grid.is_empty() {
            return Err(Error::EmptyInput("n grid"));
        }
        for b in &self.beta_grid {
            if !b.is_finite() {
                return Err(Error::NonFinite(format!("beta grid entry {b}")));
            }
        }
        for (i, b) in self.beta_grid.iter().enumerate() {
            if self.beta_grid[..i].contains(b) {
                return Err(Error::InvalidArgument(format!("duplicate beta {b}")));
            }
        }
        for n in &self.n_grid {
            if *n == 0 {
                return Err(Error::InvalidArgument("n grid entries must be >= 1".into()));
            }
        }
        for (i, n) in self.n_grid.iter().enumerate() {
            if self.n_grid[..i].contains(n) {
                return Err(Error::InvalidArgument(format!("duplicate n {n}")));
            }
        }
        Ok(())
    }
}

/// One output row. `t = 0` marks a totals row; step rows carry `t = 1..N`
/// with running cumulative sums. The Jarzynski columns are only populated on
/// totals rows, and only when sampling is enabled.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub beta: f64,
    pub n_steps: usize,
    pub t: usize,
    pub net_utility: f64,
    pub dissipated_utility: f64,
    pub free_energy_gain: f64,
    pub cumulative_net: f64,
    pub cumulative_dissipated: f64,
    pub cumulative_free_energy: f64,
    pub jarzynski_log_estimate: Option<f64>,
    pub jarzynski_se: Option<f64>,
}

impl SweepRow {
    pub fn is_totals(&self) -> bool {
        self.t == 0
    }
}

fn cell_rows(
    config: &SweepConfig,
    beta: f64,
    n_steps: usize,
    cell_seed: u64,
) -> Result<Vec<SweepRow>> {
    let beta = ResourceParameter::new(beta)?;
    let schedule = UtilitySchedule::linear(config.du.clone(), n_steps)?;
    let trace = n_step_scenario(&config.prior, &schedule, beta)?;

    let (jarzynski_log_estimate, jarzynski_se) = if config.mc_samples > 0 {
        let est = monte_carlo_estimate(
            &config.prior,
            &schedule,
            beta,
            config.mc_samples,
            cell_seed,
        )?;
        (Some(est.log_estimate), Some(est.standard_error))
    } else {
        (None, None)
    };

    let mut rows = Vec::with_capacity(n_steps + 1);
    rows.push(SweepRow {
        beta: beta.value(),
        n_steps,
        t: 0,
        net_utility: trace.total_net,
        dissipated_utility: trace.total_dissipated,
        free_energy_gain: trace.total_free_energy,
        cumulative_net: trace.total_net,
        cumulative_dissipated: trace.total_dissipated,
        cumulative_free_energy: trace.total_free_energy,
        jarzynski_log_estimate,
        jarzynski_se,
    });

    let mut running_net = 0.0;
    let mut running_diss = 0.0;
    let mut running_gain = 0.0;
    for step in &trace.steps {
        running_net += step.net_utility;
        running_diss += step.dissipated_utility;
        running_gain += step.free_energy_gain;
        rows.push(SweepRow {
            beta: beta.value(),
            n_steps,
            t: step.t,
            net_utility: step.net_utility,
            dissipated_utility: step.dissipated_utility,
            free_energy_gain: step.free_energy_gain,
            cumulative_net: running_net,
            cumulative_dissipated: running_diss,
            cumulative_free_energy: running_gain,
            jarzynski_log_estimate: None,
            jarzynski_se: None,
        });
    }
    Ok(rows)
}

/// Runs every (beta, N) cell and returns rows ordered by beta ascending,
/// then N ascending, then t ascending (the totals row, `t = 0`, leads each
/// cell). Deterministic for a fixed config and seed.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;

    let mut betas = config.beta_grid.clone();
    betas.sort_by(|a, b| a.partial_cmp(b).expect("finite betas"));
    let mut ns = config.n_grid.clone();
    ns.sort_unstable();

    let cells: Vec<(f64, usize)> = betas
        .iter()
        .flat_map(|b| ns.iter().map(move |n| (*b, *n)))
        .collect();

    let per_cell = try_indexed_map(cells.len(), |i| {
        let (beta, n_steps) = cells[i];
        cell_rows(config, beta, n_steps, split_seed(config.seed, i as u64))
    })?;
    Ok(per_cell.into_iter().flatten().collect())
}

/// The per-step quantities of a single-N sweep, reshaped into four blocks:
/// dissipation, free-energy gain, and net utility per (timestep, beta),
/// plus whole-process totals per beta.
#[derive(Debug, Clone)]
pub struct Figure1Report {
    pub betas: Vec<f64>,
    pub n_steps: usize,
    /// Block A, indexed `[t - 1][beta_index]`.
    pub dissipated: Vec<Vec<f64>>,
    /// Block B, same indexing.
    pub free_energy: Vec<Vec<f64>>,
    /// Block C, same indexing.
    pub net: Vec<Vec<f64>>,
    /// Block D: totals per beta.
    pub total_dissipated: Vec<f64>,
    pub total_free_energy: Vec<f64>,
    pub total_net: Vec<f64>,
}

/// Reshapes [`run_sweep`] output for a single-N config; no new computation.
pub fn figure1_report(config: &SweepConfig) -> Result<Figure1Report> {
    if config.n_grid.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "per-timestep report needs a single N, got {} grid points",
            config.n_grid.len()
        )));
    }
    let n_steps = config.n_grid[0];
    let rows = run_sweep(config)?;

    let mut betas = config.beta_grid.clone();
    betas.sort_by(|a, b| a.partial_cmp(b).expect("finite betas"));

    let mut report = Figure1Report {
        betas: betas.clone(),
        n_steps,
        dissipated: vec![Vec::with_capacity(betas.len()); n_steps],
        free_energy: vec![Vec::with_capacity(betas.len()); n_steps],
        net: vec![Vec::with_capacity(betas.len()); n_steps],
        total_dissipated: Vec::with_capacity(betas.len()),
        total_free_energy: Vec::with_capacity(betas.len()),
        total_net: Vec::with_capacity(betas.len()),
    };
    // rows arrive ordered (beta, t); per beta: totals first, then steps
    for row in &rows {
        if row.is_totals() {
            report.total_dissipated.push(row.dissipated_utility);
            report.total_free_energy.push(row.free_energy_gain);
            report.total_net.push(row.net_utility);
        } else {
            report.dissipated[row.t - 1].push(row.dissipated_utility);
            report.free_energy[row.t - 1].push(row.free_energy_gain);
            report.net[row.t - 1].push(row.net_utility);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagged::one_step_scenario;
    use crate::space::ActionSpace;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn config(mc_samples: u64) -> SweepConfig {
        let space = ActionSpace::new(["a", "b"]).unwrap();
        SweepConfig {
            prior: Policy::uniform(&space),
            du: UtilityChange::new(&space, vec![-2.0, 5.0]).unwrap(),
            beta_grid: vec![0.0, 0.25, 0.5, 1.0, 2.0, 5.0],
            n_grid: vec![4],
            seed: 17,
            mc_samples,
        }
    }

    #[test]
    fn totals_rows_have_constant_free_energy_across_n() {
        let mut cfg = config(0);
        cfg.n_grid = vec![1, 2, 4, 8];
        let rows = run_sweep(&cfg).unwrap();
        for beta in &cfg.beta_grid {
            let gains: Vec<f64> = rows
                .iter()
                .filter(|r| r.is_totals() && r.beta == *beta)
                .map(|r| r.free_energy_gain)
                .collect();
            assert_eq!(gains.len(), 4);
            for g in &gains {
                assert_abs_diff_eq!(*g, gains[0], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn zero_beta_column_has_no_dissipation() {
        let rows = run_sweep(&config(0)).unwrap();
        for row in rows.iter().filter(|r| r.beta == 0.0) {
            assert_eq!(row.dissipated_utility, 0.0);
            if row.is_totals() {
                assert_abs_diff_eq!(row.net_utility, row.free_energy_gain, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn single_step_rows_match_one_step_scenario() {
        let mut cfg = config(0);
        cfg.n_grid = vec![1];
        let rows = run_sweep(&cfg).unwrap();
        for beta in &cfg.beta_grid
        {
            let trace = one_step_scenario(
                &cfg.prior,
                &cfg.du,
                ResourceParameter::new(*beta).unwrap(),
            )
            .unwrap();
            let step = rows
                .iter()
                .find(|r| r.beta == *beta && r.t == 1)
                .expect("step row present");
            assert_eq!(step.net_utility, trace.steps[0].net_utility);
            assert_eq!(step.dissipated_utility, trace.steps[0].dissipated_utility);
            assert_eq!(step.free_energy_gain, trace.steps[0].free_energy_gain);
        }
    }

    #[test]
    fn rows_are_ordered_and_cumulative_sums_close() {
        let rows = run_sweep(&config(0)).unwrap();
        let mut previous: Option<(f64, usize, usize)> = None;
        for row in &rows {
            let key = (row.beta, row.n_steps, row.t);
            if let Some(prev) = previous {
                assert!(prev < key, "rows out of order: {prev:?} then {key:?}");
            }
            previous = Some(key);
        }
        for row in rows.iter().filter(|r| r.is_totals()) {
            assert_abs_diff_eq!(
                row.cumulative_net,
                row.cumulative_free_energy - row.cumulative_dissipated,
                epsilon = 1e-9
            );
            let last_step = rows
                .iter()
                .find(|r| r.beta == row.beta && r.t == row.n_steps)
                .unwrap();
            assert_abs_diff_eq!(last_step.cumulative_net, row.cumulative_net, epsilon = 1e-9);
        }
    }

    #[test]
    fn sweep_is_deterministic_including_mc_columns() {
        let cfg = config(500);
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a, b);
        let totals = &a[0];
        assert!(totals.jarzynski_log_estimate.is_some());
        assert!(a.iter().filter(|r| !r.is_totals()).all(|r| r.jarzynski_log_estimate.is_none()));
    }

    #[test]
    fn mc_columns_absent_when_disabled() {
        let rows = run_sweep(&config(0)).unwrap();
        assert!(rows.iter().all(|r| r.jarzynski_log_estimate.is_none()));
    }

    #[test]
    fn figure1_blocks_reshape_the_rows() {
        let report = figure1_report(&config(0)).unwrap();
        assert_eq!(report.betas.len(), 6);
        assert_eq!(report.net.len(), 4);

        // step-1 net utility does not depend on beta; 0.375 = 1.5 / 4
        for v in &report.net[0] {
            assert_abs_diff_eq!(*v, 0.375, epsilon = 1e-12);
        }
        // zero-resource column gains exactly the increment mean per step
        let zero_idx = report.betas.iter().position(|b| *b == 0.0).unwrap();
        for t in 0..4 {
            assert_abs_diff_eq!(report.free_energy[t][zero_idx], 0.375, epsilon = 1e-12);
        }
        // block D ledger identity per beta
        for i in 0..report.betas.len() {
            assert_abs_diff_eq!(
                report.total_net[i],
                report.total_free_energy[i] - report.total_dissipated[i],
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn figure1_requires_single_n() {
        let mut cfg = config(0);
        cfg.n_grid = vec![1, 4];
        assert!(figure1_report(&cfg).is_err());
    }

    #[test]
    fn validation_rejects_bad_grids() {
        let mut cfg = config(0);
        cfg.beta_grid = vec![];
        assert!(run_sweep(&cfg).is_err());

        let mut cfg = config(0);
        cfg.beta_grid = vec![1.0, 1.0];
        assert!(run_sweep(&cfg).is_err());

        let mut cfg = config(0);
        cfg.n_grid = vec![0];
        assert!(run_sweep(&cfg).is_err());
    }
}
