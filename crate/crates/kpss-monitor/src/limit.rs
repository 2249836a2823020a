//! Simulation of the chart's asymptotic processes: Brownian paths on a
//! uniform grid, moment functions `∫₀ˢ uᵏB(u)du`, the residual limit field
//! `E(r,s)`, the variance-ratio limit `V(s)`, change-point variants, and
//! control-limit calibration from the distribution of `inf_s V(s)`.
//!
//! Everything lives on the uniform grid `{i/N}`. The field at outer time
//! `s = i_s/N` is
//!
//! `E(r,s) = B(r) − v(r,s)'·s⁻¹H⁻¹·w(s)`,  `v(r,s) = (1, r/s, …, (r/s)ᵖ)'`,
//!
//! where `w(s)_k = M_k(s)/sᵏ` collects the moment functions and `H⁻¹` is the
//! exact Hilbert inverse. `V(s)` is the ratio of the kernel-weighted
//! quadrature of `(∫₀ʳE)²` to the quadrature of `E²`, both over `r ∈ [γ,s]`,
//! with prefactors `s⁻⁴` and `s⁻²`. The scale of the driving noise cancels
//! in the ratio, so paths are simulated with unit long-run variance.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect::DetectorConfig;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::regress::PolynomialModel;

/// Default discretization size for calibration grids.
pub const DEFAULT_GRID_N: usize = 1000;

/// Master resolution for grid-coupled Brownian increments: whenever the
/// requested grid size divides this, increments are drawn at this resolution
/// and block-aggregated, so calibrations at different grid sizes under the
/// same seed traverse restrictions of the same Brownian paths (grid
/// refinement then measures discretization error, not Monte Carlo noise).
pub const COUPLING_RESOLUTION: usize = 2000;

/// Below this value a variance-ratio denominator counts as zero; a
/// numerator above it then marks the path degenerate.
pub const DEGENERATE_TOLERANCE: f64 = 1e-14;

/// Uniform discretization of the monitored time interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Number of grid steps; grid points are `i/n` for `i = 0..=n`.
    pub n: usize,
    /// Monitoring-start fraction κ; the s-grid runs from `round(κn)/n` to 1.
    pub kappa: f64,
    /// Calculation-start fraction γ; inner integrals over `r` start at
    /// `round(γn)/n`.
    pub gamma: f64,
}

impl GridSpec {
    /// Validated grid: `n ≥ 2`, `κ ∈ (0,1)`, `γ ∈ [0,κ)`, and the snapped
    /// indices must satisfy `0 ≤ i_γ < i_κ ≤ n`.
    pub fn new(n: usize, kappa: f64, gamma: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!("grid size {n} too small")));
        }
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "kappa must lie in (0,1), got {kappa}"
            )));
        }
        if !(gamma >= 0.0 && gamma < kappa) {
            return Err(Error::InvalidConfig(format!(
                "gamma must lie in [0, kappa), got gamma={gamma} kappa={kappa}"
            )));
        }
        let spec = Self { n, kappa, gamma };
        if spec.kappa_index() <= spec.gamma_index() || spec.kappa_index() > n {
            return Err(Error::InvalidConfig(format!(
                "grid indices collapse: kappa index {} vs gamma index {}",
                spec.kappa_index(),
                spec.gamma_index()
            )));
        }
        Ok(spec)
    }

    /// Index of the first monitored s-grid point, `round(κn)` (at least 1).
    pub fn kappa_index(&self) -> usize {
        ((self.kappa * self.n as f64).round() as usize).max(1)
    }

    /// Index of the calculation start, `round(γn)`.
    pub fn gamma_index(&self) -> usize {
        (self.gamma * self.n as f64).round() as usize
    }

    /// Number of points in the s-grid `i_κ..=n`.
    pub fn num_s_points(&self) -> usize {
        self.n - self.kappa_index() + 1
    }

    /// Resolution requirements for production calibration: `n ≥ 200` and at
    /// least 10 grid points before monitoring starts.
    pub fn check_resolution(&self) -> Result<()> {
        if self.n < 200 {
            return Err(Error::InvalidConfig(format!(
                "calibration grid needs n >= 200, got {}",
                self.n
            )));
        }
        if (self.kappa * self.n as f64) < 10.0 {
            return Err(Error::InvalidConfig(format!(
                "calibration grid needs kappa*n >= 10, got {}",
                self.kappa * self.n as f64
            )));
        }
        Ok(())
    }
}

/// Standard Brownian path on `{i/n}` by the Donsker construction: partial
/// sums of i.i.d. standard normal increments scaled by `n^{−1/2}`; `B[0]=0`.
pub fn simulate_brownian<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let increments: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    brownian_from_increments(&increments)
}

/// Brownian path from `n` standard-normal increments.
pub fn brownian_from_increments(increments: &[f64]) -> Vec<f64> {
    let n = increments.len();
    let scale = 1.0 / (n as f64).sqrt();
    let mut path = Vec::with_capacity(n + 1);
    let mut level = 0.0;
    path.push(0.0);
    for &z in increments {
        level += z * scale;
        path.push(level);
    }
    path
}

/// `n` standard-normal increments, drawn at [`COUPLING_RESOLUTION`] and
/// block-aggregated when that resolution is a multiple of `n` (block sums of
/// `b` i.i.d. normals divided by `√b` are again i.i.d. standard normal).
pub fn coupled_increments<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    if n == 0 || COUPLING_RESOLUTION % n != 0 {
        return (0..n).map(|_| rng.sample(StandardNormal)).collect();
    }
    let block = COUPLING_RESOLUTION / n;
    let scale = 1.0 / (block as f64).sqrt();
    (0..n)
        .map(|_| {
            let mut acc = 0.0;
            for _ in 0..block {
                acc += rng.sample::<f64, _>(StandardNormal);
            }
            acc * scale
        })
        .collect()
}

/// Cumulative moment functions `M_k(s) = ∫₀ˢ uᵏB(u)du`, `k = 0..=p`, by the
/// trapezoidal rule on the full grid.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentFunctions {
    order: usize,
    /// `values[k][i] = M_k(i/n)`.
    values: Vec<Vec<f64>>,
}

impl MomentFunctions {
    /// Highest moment order `p`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of grid steps `n`.
    pub fn grid_len(&self) -> usize {
        self.values[0].len() - 1
    }

    /// `M_k` at grid index `i`.
    pub fn value(&self, k: usize, i: usize) -> f64 {
        self.values[k][i]
    }
}

/// Compute the moment functions of a Brownian path for orders `0..=p`.
pub fn moment_functions(brownian: &[f64], p: usize) -> MomentFunctions {
    let n = brownian.len() - 1;
    let nf = n as f64;
    let mut values = Vec::with_capacity(p + 1);
    for k in 0..=p {
        let mut m = Vec::with_capacity(n + 1);
        m.push(0.0);
        let mut acc = 0.0;
        // Integrand at u = 0, with the 0^0 = 1 convention for k = 0.
        let mut prev = (0.0f64).powi(k as i32) * brownian[0];
        for i in 1..=n {
            let u = i as f64 / nf;
            let cur = u.powi(k as i32) * brownian[i];
            acc += (prev + cur) / (2.0 * nf);
            m.push(acc);
            prev = cur;
        }
        values.push(m);
    }
    MomentFunctions { order: p, values }
}

/// The residual limit field on the grid: row `m` holds `E(·, s)` for the
/// s-grid point `i_κ + m`, covering `r` indices `0..=i_κ+m`.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitField {
    /// Discretization the field lives on.
    pub grid: GridSpec,
    /// Polynomial order `p`.
    pub order: usize,
    /// Field rows, one per s-grid point.
    pub rows: Vec<Vec<f64>>,
}

impl LimitField {
    /// The s-grid index of row `m`.
    pub fn s_index(&self, m: usize) -> usize {
        self.grid.kappa_index() + m
    }
}

/// One field row `E(·, s)` at s-index `is`, appended to `row`.
fn field_row_into(
    row: &mut Vec<f64>,
    brownian: &[f64],
    moments: &MomentFunctions,
    hilbert_inv: &[Vec<f64>],
    is: usize,
    n: usize,
) {
    let p = hilbert_inv.len() - 1;
    let s = is as f64 / n as f64;
    // w_k = M_k(s)/s^k, then a = H⁻¹ w / s.
    let mut w = Vec::with_capacity(p + 1);
    let mut s_pow = 1.0;
    for k in 0..=p {
        w.push(moments.value(k, is) / s_pow);
        s_pow *= s;
    }
    let a: Vec<f64> = (0..=p)
        .map(|i| {
            let dot: f64 = (0..=p).map(|j| hilbert_inv[i][j] * w[j]).sum();
            dot / s
        })
        .collect();
    row.clear();
    for j in 0..=is {
        let ratio = j as f64 / is as f64;
        let mut poly = 0.0;
        for &coef in a.iter().rev() {
            poly = poly * ratio + coef;
        }
        row.push(brownian[j] - poly);
    }
}

fn check_field_inputs(
    brownian: &[f64],
    moments: &MomentFunctions,
    model: &PolynomialModel,
    grid: &GridSpec,
) -> Result<()> {
    if brownian.len() != grid.n + 1 {
        return Err(Error::InvalidConfig(format!(
            "brownian path length {} does not match grid n = {}",
            brownian.len(),
            grid.n
        )));
    }
    if moments.grid_len() != grid.n || moments.order() < model.order() {
        return Err(Error::InvalidConfig(
            "moment functions incompatible with grid or model order".into(),
        ));
    }
    Ok(())
}

/// The limit field `E(r,s)` on the s-grid `[κ, 1]`.
pub fn limit_field(
    brownian: &[f64],
    moments: &MomentFunctions,
    model: &PolynomialModel,
    grid: &GridSpec,
) -> Result<LimitField> {
    check_field_inputs(brownian, moments, model, grid)?;
    let mut rows = Vec::with_capacity(grid.num_s_points());
    for is in grid.kappa_index()..=grid.n {
        let mut row = Vec::new();
        field_row_into(
            &mut row,
            brownian,
            moments,
            model.hilbert_inverse(),
            is,
            grid.n,
        );
        rows.push(row);
    }
    Ok(LimitField {
        grid: *grid,
        order: model.order(),
        rows,
    })
}

/// The change-point limit field `E_ϑ(r,s)`: identical to [`limit_field`] for
/// `s < ϑ` and identically zero for `s ≥ ϑ`.
pub fn limit_field_cp(
    brownian: &[f64],
    moments: &MomentFunctions,
    model: &PolynomialModel,
    grid: &GridSpec,
    theta: f64,
) -> Result<LimitField> {
    if !(theta > grid.kappa && theta <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "theta must lie in (kappa, 1], got {theta}"
        )));
    }
    check_field_inputs(brownian, moments, model, grid)?;
    let nf = grid.n as f64;
    let mut rows = Vec::with_capacity(grid.num_s_points());
    for is in grid.kappa_index()..=grid.n {
        if is as f64 / nf >= theta {
            rows.push(vec![0.0; is + 1]);
        } else {
            let mut row = Vec::new();
            field_row_into(
                &mut row,
                brownian,
                moments,
                model.hilbert_inverse(),
                is,
                grid.n,
            );
            rows.push(row);
        }
    }
    Ok(LimitField {
        grid: *grid,
        order: model.order(),
        rows,
    })
}

/// The variance-ratio limit evaluated along the s-grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VrPath {
    /// Grid the path lives on.
    pub grid: GridSpec,
    /// `V` at each s-grid point (`NaN` where the ratio was degenerate).
    pub values: Vec<f64>,
    /// Whether any point had a vanishing denominator with a non-vanishing
    /// numerator.
    pub degenerate: bool,
}

impl VrPath {
    /// Infimum over the s-grid, `None` for degenerate paths.
    pub fn minimum(&self) -> Option<f64> {
        if self.degenerate {
            return None;
        }
        self.values
            .iter()
            .copied()
            .min_by(|a, b| a.partial_cmp(b).expect("no NaN in non-degenerate path"))
    }
}

/// Kernel values on the integer difference grid: entry `d` is
/// `K(−ζ d / n)`, the weight for an `r`-point `d` steps before `s`.
fn kernel_table(kernel: &Kernel, zeta: f64, n: usize, max_diff: usize) -> Vec<f64> {
    (0..=max_diff)
        .map(|d| kernel.evaluate(-(zeta * d as f64) / n as f64))
        .collect()
}

/// One V(s) evaluation from a field row. Returns `(numerator, denominator)`
/// before the ratio so callers can apply the degeneracy convention.
fn vr_row(
    row: &[f64],
    cumulative: &mut Vec<f64>,
    kernel_values: &[f64],
    i_gamma: usize,
    is: usize,
    n: usize,
) -> (f64, f64) {
    let nf = n as f64;
    cumulative.clear();
    cumulative.push(0.0);
    let mut acc = 0.0;
    for j in 1..=is {
        acc += (row[j - 1] + row[j]) / (2.0 * nf);
        cumulative.push(acc);
    }
    let mut z1 = 0.0;
    let mut z2 = 0.0;
    for j in i_gamma..=is {
        let weight = if j == i_gamma || j == is { 0.5 } else { 1.0 };
        let c = cumulative[j];
        let e = row[j];
        z1 += weight * c * c * kernel_values[is - j];
        z2 += weight * e * e;
    }
    let s = is as f64 / nf;
    (z1 / nf / s.powi(4), z2 / nf / s.powi(2))
}

/// Evaluate the variance-ratio limit along the s-grid of a computed field.
pub fn limit_vr(field: &LimitField, kernel: &Kernel, zeta: f64) -> VrPath {
    let grid = field.grid;
    let i_gamma = grid.gamma_index();
    let kernel_values = kernel_table(kernel, zeta, grid.n, grid.n - i_gamma);
    let mut cumulative = Vec::with_capacity(grid.n + 1);
    let mut values = Vec::with_capacity(field.rows.len());
    let mut degenerate = false;
    for (m, row) in field.rows.iter().enumerate() {
        let is = field.s_index(m);
        let (num, den) = vr_row(row, &mut cumulative, &kernel_values, i_gamma, is, grid.n);
        values.push(ratio_with_convention(num, den, &mut degenerate));
    }
    VrPath {
        grid,
        values,
        degenerate,
    }
}

fn ratio_with_convention(num: f64, den: f64, degenerate: &mut bool) -> f64 {
    if den > DEGENERATE_TOLERANCE {
        num / den
    } else if num.abs() <= DEGENERATE_TOLERANCE {
        0.0
    } else {
        *degenerate = true;
        f64::NAN
    }
}

/// One simulated trajectory of the limit machinery, bundled for inspection.
#[derive(Clone, Debug)]
pub struct LimitPath {
    /// The driving Brownian path.
    pub brownian: Vec<f64>,
    /// Its moment functions up to the model order.
    pub moments: MomentFunctions,
    /// The limit field (change-point variant when `theta` is set).
    pub field: LimitField,
    /// The variance-ratio path.
    pub v: VrPath,
    /// Change-point parameter, if any.
    pub theta: Option<f64>,
}

/// Simulate one full limit path (field plus variance ratio).
pub fn simulate_limit_path<R: Rng>(
    model: &PolynomialModel,
    grid: &GridSpec,
    kernel: &Kernel,
    zeta: f64,
    theta: Option<f64>,
    rng: &mut R,
) -> Result<LimitPath> {
    let brownian = simulate_brownian(grid.n, rng);
    let moments = moment_functions(&brownian, model.order());
    let field = match theta {
        Some(t) => limit_field_cp(&brownian, &moments, model, grid, t)?,
        None => limit_field(&brownian, &moments, model, grid)?,
    };
    let v = limit_vr(&field, kernel, zeta);
    Ok(LimitPath {
        brownian,
        moments,
        field,
        v,
        theta,
    })
}

/// Fused per-path minimum of `V(s)` (field rows are consumed as they are
/// produced). Bitwise-identical to `limit_vr(limit_field(..)).minimum()`.
fn path_min_vr(
    brownian: &[f64],
    model: &PolynomialModel,
    grid: &GridSpec,
    kernel_values: &[f64],
) -> Option<f64> {
    let moments = moment_functions(brownian, model.order());
    let i_gamma = grid.gamma_index();
    let mut row = Vec::with_capacity(grid.n + 1);
    let mut cumulative = Vec::with_capacity(grid.n + 1);
    let mut min = f64::INFINITY;
    let mut degenerate = false;
    for is in grid.kappa_index()..=grid.n {
        field_row_into(
            &mut row,
            brownian,
            &moments,
            model.hilbert_inverse(),
            is,
            grid.n,
        );
        let (num, den) = vr_row(&row, &mut cumulative, kernel_values, i_gamma, is, grid.n);
        let v = ratio_with_convention(num, den, &mut degenerate);
        if degenerate {
            return None;
        }
        min = min.min(v);
    }
    Some(min)
}

/// Type-7 empirical quantile (linear interpolation) of pre-sorted data.
fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < n {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[n - 1]
    }
}

/// One calibrated significance level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    /// Target type-I error rate α.
    pub alpha: f64,
    /// Calibrated control limit: the empirical α-quantile of the simulated
    /// path minima, so that `P(inf_s V ≤ c_R) = α` under the null.
    pub control_limit: f64,
}

/// A cached calibration run: parameters, seed, and the α → c_R grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    /// Format version of this document.
    pub schema_version: u32,
    /// Library version that produced it.
    pub library_version: String,
    /// Kernel the limits were calibrated for.
    pub kernel: Kernel,
    /// Bandwidth ratio ζ = T/h.
    pub zeta: f64,
    /// Monitoring-start fraction κ.
    pub kappa: f64,
    /// Calculation-start fraction γ.
    pub gamma: f64,
    /// Polynomial order p.
    pub order: usize,
    /// Grid size N.
    pub grid_n: usize,
    /// Number of simulated limit paths.
    pub num_paths: usize,
    /// Master seed of the simulation.
    pub seed: u64,
    /// Paths excluded for degenerate ratios.
    pub degenerate_paths: usize,
    /// Quantile grid, ascending in α (and therefore in c_R).
    pub entries: Vec<CalibrationEntry>,
}

impl CalibrationTable {
    /// Current serialization format version.
    pub const SCHEMA_VERSION: u32 = 1;

    /// Look up the control limit for a significance level.
    pub fn control_limit_for(&self, alpha: f64) -> Result<f64> {
        self.entries
            .iter()
            .find(|e| (e.alpha - alpha).abs() <= 1e-9)
            .map(|e| e.control_limit)
            .ok_or(Error::AlphaNotFound(alpha))
    }

    /// Verify the table was calibrated for the same statistic a monitoring
    /// run will compute. Kernel kind, ζ, κ, γ, and order must all agree.
    pub fn check_compatible(&self, config: &DetectorConfig) -> Result<()> {
        if self.kernel != config.kernel {
            return Err(Error::TableMismatch(format!(
                "kernel {} in table vs {} in run",
                self.kernel, config.kernel
            )));
        }
        let zeta = config.zeta();
        if (self.zeta - zeta).abs() > 1e-9 * self.zeta.abs().max(1.0) {
            return Err(Error::TableMismatch(format!(
                "zeta {} in table vs T/h = {zeta} in run",
                self.zeta
            )));
        }
        if self.order != config.order {
            return Err(Error::TableMismatch(format!(
                "order {} in table vs {} in run",
                self.order, config.order
            )));
        }
        if (self.kappa - config.kappa).abs() > 1e-9 {
            return Err(Error::TableMismatch(format!(
                "kappa {} in table vs {} in run",
                self.kappa, config.kappa
            )));
        }
        if (self.gamma - config.gamma).abs() > 1e-9 {
            return Err(Error::TableMismatch(format!(
                "gamma {} in table vs {} in run",
                self.gamma, config.gamma
            )));
        }
        Ok(())
    }

    /// Write the table as pretty JSON.
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    /// Load a table written by [`CalibrationTable::save`].
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let table: CalibrationTable = serde_json::from_reader(std::io::BufReader::new(file))?;
        if table.schema_version != Self::SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported calibration table schema version {}",
                table.schema_version
            )));
        }
        Ok(table)
    }
}

/// Calibrate control limits by simulating `num_paths` limit paths and taking
/// empirical α-quantiles of the per-path minima `m_i = inf_s V(s)`.
///
/// Paths are simulated in parallel but deterministically: path `i` draws
/// from a fixed-seed ChaCha stream `i`, and grid-coupled increments (see
/// [`COUPLING_RESOLUTION`]) make same-seed calibrations at nested grid sizes
/// comparable. `alphas` must be strictly ascending, each in (0,1);
/// `num_paths ≥ 1000` is recommended for production tables.
pub fn calibrate(
    kernel: &Kernel,
    zeta: f64,
    grid: &GridSpec,
    order: usize,
    alphas: &[f64],
    num_paths: usize,
    seed: u64,
) -> Result<CalibrationTable> {
    grid.check_resolution()?;
    if !(zeta >= 1.0 && zeta.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "zeta must be a finite value >= 1, got {zeta}"
        )));
    }
    if alphas.is_empty() {
        return Err(Error::InvalidConfig("no alpha levels given".into()));
    }
    if alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(Error::InvalidConfig(
            "alpha levels must lie strictly inside (0,1)".into(),
        ));
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "alpha levels must be strictly ascending".into(),
        ));
    }
    if num_paths == 0 {
        return Err(Error::InvalidConfig("num_paths must be positive".into()));
    }
    let model = PolynomialModel::new(order)?;
    let kernel_values = kernel_table(kernel, zeta, grid.n, grid.n - grid.gamma_index());

    let minima: Vec<Option<f64>> = (0..num_paths)
        .into_par_iter()
        .map(|path_idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(path_idx as u64);
            let increments = coupled_increments(grid.n, &mut rng);
            let brownian = brownian_from_increments(&increments);
            path_min_vr(&brownian, &model, grid, &kernel_values)
        })
        .collect();

    let mut valid: Vec<f64> = minima.iter().filter_map(|m| *m).collect();
    let degenerate_paths = num_paths - valid.len();
    if valid.is_empty() {
        return Err(Error::InvalidConfig(
            "all simulated paths were degenerate".into(),
        ));
    }
    valid.sort_by(|a, b| a.partial_cmp(b).expect("minima are finite"));

    let entries = alphas
        .iter()
        .map(|&alpha| CalibrationEntry {
            alpha,
            control_limit: quantile_type7(&valid, alpha),
        })
        .collect();

    Ok(CalibrationTable {
        schema_version: CalibrationTable::SCHEMA_VERSION,
        library_version: env!("CARGO_PKG_VERSION").to_owned(),
        kernel: kernel.clone(),
        zeta,
        kappa: grid.kappa,
        gamma: grid.gamma,
        order,
        grid_n: grid.n,
        num_paths,
        seed,
        degenerate_paths,
        entries,
    })
}
