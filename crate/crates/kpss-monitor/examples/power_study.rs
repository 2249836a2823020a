//! A small end-to-end study: calibrate, then measure size and power.
//!
//! This wires the whole pipeline together the way the full simulation
//! harness does. A control limit is calibrated from the limit process at
//! alpha = 0.05, then an experiment plan sweeps scenarios that differ
//! in where the random walk freezes and in how the increments are
//! correlated. Replication seeds derive from (master seed, scenario,
//! replication), so any single cell can be reproduced in isolation.
//!
//! Rates here use few replications to stay quick; the acceptance suite
//! runs the full-size version of this study.

use kpss_monitor::dgp::{ChangeMode, ChangePoint, InnovationSpec, ScenarioSpec};
use kpss_monitor::mc::{run_plan, ExperimentPlan, Scenario};
use kpss_monitor::{calibrate, DetectorConfig, GridSpec, Kernel};

fn main() {
    let horizon = 500;
    let zeta = 20.0; // bandwidth 25 at this horizon
    let grid = GridSpec::new(500, 0.1, 0.02).unwrap();
    let table = calibrate(&Kernel::GaussianPaper, zeta, &grid, 1, &[0.05], 1500, 0).unwrap();
    let c = table.control_limit_for(0.05).unwrap();
    println!("calibrated control limit at alpha 0.05: {c:.4e}");

    let detector = DetectorConfig {
        horizon,
        order: 1,
        kappa: 0.1,
        gamma: 0.02,
        bandwidth: horizon as f64 / zeta,
        kernel: Kernel::GaussianPaper,
        control_limit: c,
        infinite_horizon: false,
    };

    let spec = |q: Option<usize>, beta_ma: f64| ScenarioSpec {
        horizon,
        order: 1,
        trend: vec![2.0, 0.1],
        change: q.map(|at| ChangePoint::At { at }),
        slope_delta: 0.0,
        mode: ChangeMode::Freeze,
        xi_exponent: 0.0,
        innovations: if beta_ma == 0.0 {
            InnovationSpec::iid(1.0)
        } else {
            InnovationSpec::arma(1.0, 0.3, beta_ma)
        },
    };

    let plan = ExperimentPlan {
        scenarios: vec![
            Scenario { id: "null iid".into(), spec: spec(None, 0.0) },
            Scenario { id: "early change, iid".into(), spec: spec(Some(25), 0.0) },
            Scenario { id: "early change, ma -0.8".into(), spec: spec(Some(25), -0.8) },
            Scenario { id: "early change, ma +0.8".into(), spec: spec(Some(25), 0.8) },
            Scenario { id: "late change, iid".into(), spec: spec(Some(250), 0.0) },
        ],
        detector,
        control_limits: vec![c],
        reps: 200,
        master_seed: 2024,
    };

    let results = run_plan(&plan).unwrap();
    println!(
        "{:<24} {:>6} {:>8} {:>10}",
        "scenario", "rate", "CARL", "std error"
    );
    for row in &results {
        println!(
            "{:<24} {:>6.3} {:>8.1} {:>10.4}",
            row.scenario,
            row.rejection_rate,
            row.carl.unwrap_or(f64::NAN),
            row.std_error,
        );
    }

    let rate = |id: &str| {
        results
            .iter()
            .find(|r| r.scenario == id)
            .unwrap()
            .rejection_rate
    };
    // An early freeze leaves a long stationary stretch and is easy to
    // detect; a late one leaves little room before the horizon.
    assert!(rate("early change, iid") > rate("null iid"));
    assert!(rate("early change, iid") > rate("late change, iid"));
}
