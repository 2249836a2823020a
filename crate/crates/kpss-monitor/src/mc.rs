//! Deterministic Monte Carlo harness: sweeps scenarios × control limits,
//! aggregating rejection rates and the conditional average run length
//! (CARL, the mean stop time among signaling replications).
//!
//! Each scenario's replications are simulated once with a sentinel control
//! limit the nonnegative statistic can never cross, storing the full
//! `(t, U_t)` path; every requested control limit is then answered by
//! replaying those paths. Replay is exactly equivalent to rerunning the
//! monitor at that limit (same stop times, same rates) but costs one
//! simulation pass instead of one per limit, and it makes rejection rates
//! nondecreasing in the limit by construction.
//!
//! Replication seeds derive from (master seed, scenario index, rep index)
//! only, never from the control limit, so every limit sees the same sample
//! paths. Parallel execution collects per-replication results in index
//! order, so output is independent of thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect::{run_monitor, DetectorConfig, StoppingResult};
use crate::dgp::{gen_scenario, ScenarioSpec};
use crate::error::{Error, Result};

/// Control limit no path can cross: the statistic is a ratio of
/// nonnegative quadratures (0 under the degeneracy convention), so it
/// never goes below zero. Monitoring at this limit records full paths.
pub const NO_STOP_SENTINEL: f64 = -1.0;

/// One named scenario of an experiment plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Identifier echoed in result rows.
    pub id: String,
    /// The data-generating recipe.
    pub spec: ScenarioSpec,
}

/// A full experiment: scenarios × control limits × replications.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    /// Scenarios to sweep, each labeled.
    pub scenarios: Vec<Scenario>,
    /// Detector template; its own `control_limit` is ignored and replaced
    /// by each entry of `control_limits` in turn.
    pub detector: DetectorConfig,
    /// Control limits to evaluate per scenario.
    pub control_limits: Vec<f64>,
    /// Replications per scenario.
    pub reps: usize,
    /// Master seed; replication seeds derive from it deterministically.
    pub master_seed: u64,
}

impl ExperimentPlan {
    /// Validate the plan: detector config sound, at least one scenario and
    /// limit, unique scenario ids, every scenario strictly valid and
    /// matching the detector's horizon and order.
    pub fn validate(&self) -> Result<()> {
        self.detector.validate()?;
        if self.reps == 0 {
            return Err(Error::InvalidConfig("reps must be at least 1".into()));
        }
        if self.scenarios.is_empty() {
            return Err(Error::InvalidConfig("plan has no scenarios".into()));
        }
        if self.control_limits.is_empty() {
            return Err(Error::InvalidConfig("plan has no control limits".into()));
        }
        if self.control_limits.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig("control limits must be finite".into()));
        }
        for (idx, scenario) in self.scenarios.iter().enumerate() {
            if self.scenarios[..idx].iter().any(|s| s.id == scenario.id) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate scenario id {:?}",
                    scenario.id
                )));
            }
            scenario.spec.validate().map_err(|e| {
                Error::InvalidConfig(format!("scenario {:?}: {e}", scenario.id))
            })?;
            if scenario.spec.horizon != self.detector.horizon {
                return Err(Error::InvalidConfig(format!(
                    "scenario {:?} horizon {} does not match detector horizon {}",
                    scenario.id, scenario.spec.horizon, self.detector.horizon
                )));
            }
            if scenario.spec.order != self.detector.order {
                return Err(Error::InvalidConfig(format!(
                    "scenario {:?} order {} does not match detector order {}",
                    scenario.id, scenario.spec.order, self.detector.order
                )));
            }
        }
        Ok(())
    }
}

/// One aggregated (scenario, control limit) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCResult {
    /// Scenario id.
    pub scenario: String,
    /// Control limit the cell was evaluated at.
    pub control_limit: f64,
    /// Fraction of replications that signaled.
    pub rejection_rate: f64,
    /// Mean stop time among signaling replications; `None` if none did.
    pub carl: Option<f64>,
    /// Replication count.
    pub reps: usize,
    /// Binomial standard error `sqrt(rate(1−rate)/reps)`.
    pub std_error: f64,
}

/// Replication seed: a splitmix-style mix of master seed, scenario index,
/// and replication index. The control limit deliberately does not enter,
/// so all limits replay identical sample paths.
pub fn derive_seed(master: u64, scenario: u64, rep: u64) -> u64 {
    let mut z = master
        ^ scenario.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ rep.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Simulate one scenario's full statistic paths (no stopping), in parallel
/// over replications with deterministic per-replication seeds.
pub fn simulate_paths(
    spec: &ScenarioSpec,
    detector: &DetectorConfig,
    scenario_idx: usize,
    reps: usize,
    master_seed: u64,
) -> Result<Vec<StoppingResult>> {
    let mut probe = detector.clone();
    probe.control_limit = NO_STOP_SENTINEL;
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let seed = derive_seed(master_seed, scenario_idx as u64, rep as u64);
            let ys = gen_scenario(spec, seed)?;
            run_monitor(ys, &probe)
        })
        .collect()
}

/// Rate and CARL of a path collection at one control limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellStats {
    /// Fraction of paths whose statistic reached the limit.
    pub rejection_rate: f64,
    /// Mean stop time among those, if any.
    pub carl: Option<f64>,
    /// Number of signaling paths.
    pub signals: usize,
}

fn first_crossing(path: &[(usize, f64)], c: f64) -> Option<usize> {
    path.iter().find(|(_, u)| *u <= c).map(|(t, _)| *t)
}

/// Evaluate recorded statistic paths against each control limit: the stop
/// time is the first `t` with `U_t ≤ c`, exactly as the live monitor
/// decides it.
pub fn replay_rates(paths: &[StoppingResult], c_grid: &[f64]) -> Vec<CellStats> {
    c_grid
        .iter()
        .map(|&c| {
            let mut signals = 0usize;
            let mut stop_sum = 0usize;
            for path in paths {
                if let Some(t) = first_crossing(&path.path, c) {
                    signals += 1;
                    stop_sum += t;
                }
            }
            let rate = signals as f64 / paths.len() as f64;
            CellStats {
                rejection_rate: rate,
                carl: (signals > 0).then(|| stop_sum as f64 / signals as f64),
                signals,
            }
        })
        .collect()
}

fn cell_result(scenario: &str, c: f64, stats: &CellStats, reps: usize) -> MCResult {
    let rate = stats.rejection_rate;
    MCResult {
        scenario: scenario.to_owned(),
        control_limit: c,
        rejection_rate: rate,
        carl: stats.carl,
        reps,
        std_error: (rate * (1.0 - rate) / reps as f64).sqrt(),
    }
}

fn scenario_cells(plan: &ExperimentPlan, idx: usize) -> Result<Vec<MCResult>> {
    let scenario = &plan.scenarios[idx];
    let paths = simulate_paths(
        &scenario.spec,
        &plan.detector,
        idx,
        plan.reps,
        plan.master_seed,
    )?;
    let stats = replay_rates(&paths, &plan.control_limits);
    Ok(plan
        .control_limits
        .iter()
        .zip(&stats)
        .map(|(c, cell)| cell_result(&scenario.id, *c, cell, plan.reps))
        .collect())
}

/// Run a single scenario of a validated plan, identified by its index, so
/// callers can interleave progress reporting. Results are identical to the
/// corresponding slice of [`run_plan`] output: replication seeds depend on
/// the scenario's index in the plan, not on which scenarios actually run.
pub fn run_scenario_cells(plan: &ExperimentPlan, idx: usize) -> Result<Vec<MCResult>> {
    plan.validate()?;
    if idx >= plan.scenarios.len() {
        return Err(Error::InvalidConfig(format!(
            "scenario index {idx} out of range ({} scenarios)",
            plan.scenarios.len()
        )));
    }
    scenario_cells(plan, idx)
}

/// Run a full plan: per scenario, one simulation pass and one replay per
/// control limit. Rows come back scenario-major, limits in given order.
pub fn run_plan(plan: &ExperimentPlan) -> Result<Vec<MCResult>> {
    plan.validate()?;
    let mut out = Vec::with_capacity(plan.scenarios.len() * plan.control_limits.len());
    for idx in 0..plan.scenarios.len() {
        out.extend(scenario_cells(plan, idx)?);
    }
    Ok(out)
}

/// Like [`run_plan`], for plotting rate/CARL against the limit: requires
/// the control-limit grid to be strictly ascending, which makes each
/// scenario's rejection-rate column nondecreasing by construction.
pub fn curve_sweep(plan: &ExperimentPlan) -> Result<Vec<MCResult>> {
    if plan.control_limits.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "curve sweep needs a strictly ascending control-limit grid".into(),
        ));
    }
    run_plan(plan)
}
