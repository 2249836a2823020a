//! Polynomial least squares on the time index: design matrices, the exact
//! Hilbert-matrix inverse, batch residuals, and sequentially updated residuals.
//!
//! The regressors are `(1, t, …, t^p)` for `t = 1..=n`. Normal equations are
//! solved on the weighted system `W (X'X) W` with `W = diag(1, t⁻¹, …, t⁻ᵖ)`,
//! which keeps the condition number near that of the `(p+1)`-dimensional
//! Hilbert matrix instead of the raw Gram matrix (whose condition is
//! astronomical already for `p = 2`, `t = 500`).

use crate::error::{Error, Result};

/// Largest supported polynomial order. Beyond this the closed-form
/// Hilbert-inverse entries no longer fit exactly in 64-bit floats.
pub const MAX_ORDER: usize = 10;

/// Exact binomial coefficient in 128-bit integer arithmetic.
fn binomial(n: u64, k: u64) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as i128 / i as i128;
    }
    acc
}

/// The `(p+1)`-dimensional Hilbert matrix `H_ij = 1/(i+j-1)` (1-based indices).
pub fn hilbert_matrix(p: usize) -> Vec<Vec<f64>> {
    let n = p + 1;
    (1..=n)
        .map(|i| (1..=n).map(|j| 1.0 / (i + j - 1) as f64).collect())
        .collect()
}

/// Closed-form inverse of the `(p+1)`-dimensional Hilbert matrix, as exact
/// 128-bit integers:
/// `(H⁻¹)_ij = (−1)^{i+j} (i+j−1) C(p+i, p+1−j) C(p+j, p+1−i) C(i+j−2, i−1)²`.
///
/// Errors with [`Error::OrderOverflow`] for `p > MAX_ORDER`.
pub fn hilbert_inverse_exact(p: usize) -> Result<Vec<Vec<i128>>> {
    if p > MAX_ORDER {
        return Err(Error::OrderOverflow(p));
    }
    let n = p as u64 + 1;
    let mut out = Vec::with_capacity(n as usize);
    for i in 1..=n {
        let mut row = Vec::with_capacity(n as usize);
        for j in 1..=n {
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            let c = binomial(i + j - 2, i - 1);
            let entry = sign
                * (i + j - 1) as i128
                * binomial(p as u64 + i, n - j)
                * binomial(p as u64 + j, n - i)
                * c
                * c;
            row.push(entry);
        }
        out.push(row);
    }
    Ok(out)
}

/// Closed-form inverse of the `(p+1)`-dimensional Hilbert matrix in floats.
/// All entries are integers below 2⁵³ for `p ≤ MAX_ORDER`, so the conversion
/// is exact.
pub fn hilbert_inverse(p: usize) -> Result<Vec<Vec<f64>>> {
    let exact = hilbert_inverse_exact(p)?;
    Ok(exact
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| {
                    debug_assert!(v.unsigned_abs() < (1u128 << 53));
                    v as f64
                })
                .collect()
        })
        .collect())
}

/// A polynomial trend model of fixed order together with its Hilbert algebra.
#[derive(Clone, Debug)]
pub struct PolynomialModel {
    order: usize,
    hilbert_inv: Vec<Vec<f64>>,
}

impl PolynomialModel {
    /// Build the model for polynomial order `p ≤ MAX_ORDER`.
    pub fn new(p: usize) -> Result<Self> {
        Ok(Self {
            order: p,
            hilbert_inv: hilbert_inverse(p)?,
        })
    }

    /// Polynomial order `p`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// The exact `(p+1)×(p+1)` Hilbert inverse.
    pub fn hilbert_inverse(&self) -> &[Vec<f64>] {
        &self.hilbert_inv
    }
}

/// Design matrix of the polynomial regression: row `t` is `(1, t, …, t^p)`.
#[derive(Clone, Copy, Debug)]
pub struct DesignMatrix {
    n: usize,
    p: usize,
}

impl DesignMatrix {
    /// Design with `n` rows for polynomial order `p`.
    pub fn new(n: usize, p: usize) -> Self {
        Self { n, p }
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.n
    }

    /// Polynomial order.
    pub fn order(&self) -> usize {
        self.p
    }

    /// Row for time index `t` (1-based): `(1, t, …, t^p)`.
    pub fn row(&self, t: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.p + 1);
        let tf = t as f64;
        let mut pw = 1.0;
        for _ in 0..=self.p {
            out.push(pw);
            pw *= tf;
        }
        out
    }

    /// Materialize the full `n×(p+1)` matrix.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (1..=self.n).map(|t| self.row(t)).collect()
    }
}

/// Evaluate a polynomial with ascending coefficients at `t` (Horner).
pub(crate) fn poly_eval(coeffs: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

/// Gaussian elimination with partial pivoting on a small dense system.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&r1, &r2| {
            a[r1][col]
                .abs()
                .partial_cmp(&a[r2][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot_row][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Running sums behind the normal equations. Pushing observations in time
/// order accumulates `Σ t^m` and `Σ t^k Y_t` with a fixed summation order, so
/// a sequential fit and a batch fit over the same prefix are bitwise equal.
#[derive(Clone, Debug)]
struct NormalAccum {
    p: usize,
    /// `Σ_{u=1..t} u^m` for `m = 0..=2p`.
    power_sums: Vec<f64>,
    /// `Σ_{u=1..t} u^k Y_u` for `k = 0..=p`.
    moment_sums: Vec<f64>,
    t: usize,
}

impl NormalAccum {
    fn new(p: usize) -> Self {
        Self {
            p,
            power_sums: vec![0.0; 2 * p + 1],
            moment_sums: vec![0.0; p + 1],
            t: 0,
        }
    }

    fn push(&mut self, y: f64) {
        self.t += 1;
        let tf = self.t as f64;
        let mut pw = 1.0;
        for m in 0..=2 * self.p {
            self.power_sums[m] += pw;
            if m <= self.p {
                self.moment_sums[m] += pw * y;
            }
            pw *= tf;
        }
    }

    /// Solve the weighted normal equations at the current time.
    fn solve(&self) -> Result<Vec<f64>> {
        let p = self.p;
        if self.t < p + 1 {
            return Err(Error::InsufficientData {
                needed: p + 1,
                got: self.t,
                order: p,
            });
        }
        let tf = self.t as f64;
        let mut tpow = vec![1.0; 2 * p + 1];
        for m in 1..=2 * p {
            tpow[m] = tpow[m - 1] * tf;
        }
        let a: Vec<Vec<f64>> = (0..=p)
            .map(|i| {
                (0..=p)
                    .map(|j| self.power_sums[i + j] / tpow[i + j])
                    .collect()
            })
            .collect();
        let rhs: Vec<f64> = (0..=p).map(|i| self.moment_sums[i] / tpow[i]).collect();
        let z = solve_linear(a, rhs).ok_or(Error::SingularSystem { t: self.t })?;
        Ok((0..=p).map(|i| z[i] / tpow[i]).collect())
    }
}

/// Least-squares fit of a degree-`p` polynomial in the time index to
/// `observations` (interpreted as `Y_1..Y_t`). Returns ascending coefficients.
pub fn fit_ls(observations: &[f64], p: usize) -> Result<Vec<f64>> {
    if p > MAX_ORDER {
        return Err(Error::OrderOverflow(p));
    }
    if observations.len() < p + 1 {
        return Err(Error::InsufficientData {
            needed: p + 1,
            got: observations.len(),
            order: p,
        });
    }
    let mut accum = NormalAccum::new(p);
    for &y in observations {
        accum.push(y);
    }
    accum.solve()
}

/// Residuals of one batch fit on the full sample: `ε̂_j = Y_j − x_j'β̂`.
pub fn batch_residuals(observations: &[f64], p: usize) -> Result<Vec<f64>> {
    let coeffs = fit_ls(observations, p)?;
    Ok(observations
        .iter()
        .enumerate()
        .map(|(idx, &y)| y - poly_eval(&coeffs, (idx + 1) as f64))
        .collect())
}

/// Streaming state for sequentially updated residuals: each new observation
/// triggers a refit on all data so far and a recomputation of every residual.
///
/// Before `t = p+1` observations the fit is undetermined and all residuals
/// are defined as zero.
#[derive(Clone, Debug)]
pub struct ResidualState {
    accum: NormalAccum,
    observations: Vec<f64>,
    coeffs: Vec<f64>,
    residuals: Vec<f64>,
}

impl ResidualState {
    /// Empty state for polynomial order `p ≤ MAX_ORDER`.
    pub fn new(p: usize) -> Result<Self> {
        if p > MAX_ORDER {
            return Err(Error::OrderOverflow(p));
        }
        Ok(Self {
            accum: NormalAccum::new(p),
            observations: Vec::new(),
            coeffs: vec![0.0; p + 1],
            residuals: Vec::new(),
        })
    }

    /// Polynomial order.
    pub fn order(&self) -> usize {
        self.accum.p
    }

    /// Current time index `t` (number of observations consumed).
    pub fn time(&self) -> usize {
        self.observations.len()
    }

    /// Observations consumed so far.
    pub fn observations(&self) -> &[f64] {
        &self.observations
    }

    /// Current fit coefficients; all-zero until `t ≥ p+1`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Full residual vector `ε̂_1(t)..ε̂_t(t)` at the current time.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// Consume one observation: refit on all data and recompute every
    /// residual (no-op fit while `t < p+1`, residuals stay zero).
    ///
    /// The solve is mathematically guaranteed to succeed for `t ≥ p+1`
    /// (distinct abscissae); the error path exists only for floating-point
    /// breakdown.
    pub fn update(&mut self, new_obs: f64) -> Result<()> {
        self.observations.push(new_obs);
        self.accum.push(new_obs);
        let t = self.observations.len();
        if t < self.accum.p + 1 {
            self.residuals.push(0.0);
            return Ok(());
        }
        self.coeffs = self.accum.solve()?;
        self.residuals.clear();
        for (idx, &y) in self.observations.iter().enumerate() {
            self.residuals
                .push(y - poly_eval(&self.coeffs, (idx + 1) as f64));
        }
        Ok(())
    }
}

/// Non-updated residual sequence: entry `t` is the last residual of a fit on
/// `Y_1..Y_t` alone, i.e. `(…, ε̂_t(t), …)`, with zeros for `t < p+1`.
pub fn residuals_no_update(observations: &[f64], p: usize) -> Result<Vec<f64>> {
    if p > MAX_ORDER {
        return Err(Error::OrderOverflow(p));
    }
    if observations.len() < p + 1 {
        return Err(Error::InsufficientData {
            needed: p + 1,
            got: observations.len(),
            order: p,
        });
    }
    let mut accum = NormalAccum::new(p);
    let mut out = Vec::with_capacity(observations.len());
    for (idx, &y) in observations.iter().enumerate() {
        accum.push(y);
        let t = idx + 1;
        if t < p + 1 {
            out.push(0.0);
        } else {
            let coeffs = accum.solve()?;
            out.push(y - poly_eval(&coeffs, t as f64));
        }
    }
    Ok(out)
}
