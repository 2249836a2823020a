//! The limit process behind the calibration, computed two ways.
//!
//! The monitoring statistic's null limit is built from a detrended
//! two-parameter field E(r, s): a Brownian motion B(r) minus a projection
//! of its running moment integrals, with coefficients from the inverse
//! Hilbert matrix of the trend order. For order 1 the projection has a
//! short closed form,
//!
//!   E(r, s) = B(r) + (6r/s^2 - 4/s) M0(s) + (6/s^2 - 12r/s^3) M1(s)
//!
//! with M_k(s) the integral of u^k B(u) over [0, s]. This example draws one
//! Brownian path, evaluates the field generically via the Hilbert inverse
//! and via the closed form, and confirms they agree to quadrature accuracy.
//! It then runs the field through the variance-ratio functional to show a
//! single simulated limit path of the statistic.

use kpss_monitor::limit::{brownian_from_increments, limit_field, limit_vr, moment_functions};
use kpss_monitor::{GridSpec, Kernel, PolynomialModel};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() {
    let grid = GridSpec::new(1000, 0.1, 0.02).unwrap();
    let n = grid.n;
    let model = PolynomialModel::new(1).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let increments: Vec<f64> = (0..n)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let brownian = brownian_from_increments(&increments);
    let moments = moment_functions(&brownian, 1);
    let field = limit_field(&brownian, &moments, &model, &grid).unwrap();

    let mut max_err = 0.0f64;
    for (m, row) in field.rows.iter().enumerate() {
        let si = field.s_index(m);
        let s = si as f64 / n as f64;
        let m0 = moments.value(0, si);
        let m1 = moments.value(1, si);
        for (ri, &value) in row.iter().enumerate().take(si + 1) {
            let r = ri as f64 / n as f64;
            let explicit = brownian[ri]
                + (6.0 * r / (s * s) - 4.0 / s) * m0
                + (6.0 / (s * s) - 12.0 * r / (s * s * s)) * m1;
            max_err = max_err.max((value - explicit).abs());
        }
    }
    println!("max |generic - closed form| over the grid: {max_err:.3e}");
    assert!(max_err < 1e-8);

    // The field is the residual of B after projecting on the trend basis,
    // so for every s it integrates to zero against 1 and r. Check the s = 1
    // section by trapezoid; the defect is pure quadrature error.
    let row = field.rows.last().unwrap();
    let h = 1.0 / n as f64;
    for k in 0..=1usize {
        let mut integral = 0.0;
        for ri in 0..n {
            let f0 = (ri as f64 * h).powi(k as i32) * row[ri];
            let f1 = ((ri + 1) as f64 * h).powi(k as i32) * row[ri + 1];
            integral += 0.5 * h * (f0 + f1);
        }
        println!("int r^{k} E(r,1) dr = {integral:+.3e}");
        assert!(integral.abs() < 1e-3);
    }

    let vr = limit_vr(&field, &Kernel::GaussianPaper, 20.0);
    println!(
        "variance-ratio path: {} points, minimum {:.4e}",
        vr.values.len(),
        vr.minimum().unwrap()
    );
}
