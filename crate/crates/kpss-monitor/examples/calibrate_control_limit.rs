//! Calibrating control limits by simulating the limit process.
//!
//! Under the null the monitoring statistic converges to a functional of a
//! Brownian motion that does not depend on the trend coefficients or the
//! error variance, so control limits can be tabulated once per
//! (kernel, zeta, order) and reused for any series. This example simulates
//! the limit paths, extracts quantiles of the path minimum, and saves the
//! table to JSON for the monitor to load.
//!
//! The run is deterministic: each path gets its own ChaCha stream derived
//! from the seed, so the table is reproducible bit for bit regardless of
//! how many threads rayon uses.

use kpss_monitor::limit::CalibrationTable;
use kpss_monitor::{calibrate, GridSpec, Kernel};

fn main() {
    let grid = GridSpec::new(1000, 0.1, 0.02).unwrap();
    let alphas = [0.01, 0.05, 0.1];

    // 2000 paths keeps this example quick; production tables use more.
    let table = calibrate(&Kernel::GaussianPaper, 20.0, &grid, 1, &alphas, 2000, 0).unwrap();

    println!("kernel = {}, zeta = {}", table.kernel, table.zeta);
    for entry in &table.entries {
        println!(
            "alpha = {:.2}  control limit = {:.6e}",
            entry.alpha, entry.control_limit
        );
    }
    if table.degenerate_paths > 0 {
        println!("degenerate paths excluded: {}", table.degenerate_paths);
    }

    // Smaller alpha means a stricter (smaller) limit.
    assert!(table.entries[0].control_limit <= table.entries[1].control_limit);
    assert!(table.entries[1].control_limit <= table.entries[2].control_limit);

    let path = std::env::temp_dir().join("kpss-monitor-example-table.json");
    table.save(&path).unwrap();
    let loaded = CalibrationTable::load(&path).unwrap();
    assert_eq!(
        loaded.control_limit_for(0.05).unwrap(),
        table.control_limit_for(0.05).unwrap()
    );
    println!("table saved to {}", path.display());
}
