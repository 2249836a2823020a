//! Synthetic data generators for chart experiments: polynomial trends on
//! top of integrated (random-walk) errors, with optional structural change
//! at a known index.
//!
//! Innovations come in three flavors: i.i.d. Gaussian, ARMA(1,1), and a
//! truncated ARCH(∞) recursion, all scaled by a common `sigma`. Error paths
//! are built from the innovations in one of two change modes:
//!
//! - **freeze**: the error is a random walk before the change index `q` and
//!   freezes at its pre-change level afterwards, fluctuating around it by a
//!   single innovation: `ε_t = Σ_{i≤t} η_i` for `t < q`, and
//!   `ε_t = Σ_{i<q} η_i + η_t` for `t ≥ q`. The observed series changes
//!   from I(1) to I(0) at `q`.
//! - **rescale**: the error is a random walk (including a time-zero draw,
//!   `ε_t = Σ_{j=0}^t u_j`) before `q` and collapses to the rescaled noise
//!   `ε_t = T^β·u_t` afterwards, with `β ∈ [0, 1/2)` the `xi_exponent`.
//!
//! Observations add a polynomial trend and an optional slope shift:
//! `Y_t = Σ_k trend[k]·t^k + Δ·t·1{t ≥ q} + ε_t`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regress::poly_eval;

/// Presample steps discarded before an ARMA(1,1) path starts; leaves the
/// initialization bias far below double precision for |rho| ≤ 0.9.
pub const ARMA_BURN_IN: usize = 500;

/// ARCH burn-in is this multiple of the truncation lag count.
pub const ARCH_WARMUP_FACTOR: usize = 5;

/// Innovation process driving the error paths. `sigma` scales the output
/// series linearly in every variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InnovationSpec {
    /// Independent N(0, sigma²) draws.
    IidGaussian { sigma: f64 },
    /// `η_t = rho·η_{t−1} + ξ_t − beta_ma·ξ_{t−1}` with ξ i.i.d. N(0,1),
    /// burned in for [`ARMA_BURN_IN`] steps.
    Arma11 { sigma: f64, rho: f64, beta_ma: f64 },
    /// Truncated ARCH(∞): `u_t = σ_t e_t`, `σ_t² = a + Σ_j b_j u_{t−j}²`
    /// over the listed lags, e i.i.d. N(0,1). The fourth-moment condition
    /// `(E e⁸)^{1/4} Σ b_j < 1` (105^{1/4} for Gaussian e) guarantees the
    /// weak dependence the chart's theory needs.
    ArchInf { sigma: f64, a: f64, b: Vec<f64> },
}

impl InnovationSpec {
    /// Independent Gaussians.
    pub fn iid(sigma: f64) -> Self {
        Self::IidGaussian { sigma }
    }

    /// ARMA(1,1) with the given AR and MA coefficients.
    pub fn arma(sigma: f64, rho: f64, beta_ma: f64) -> Self {
        Self::Arma11 {
            sigma,
            rho,
            beta_ma,
        }
    }

    /// Library preset for a valid ARCH(∞) spec: geometric lag weights
    /// `b_k = 0.05·0.7^(k−1)` truncated at 100 lags (Σb = 1/6, comfortably
    /// inside the fourth-moment constraint) on base level `a = 1`.
    pub fn arch_preset(sigma: f64) -> Self {
        Self::ArchInf {
            sigma,
            a: 1.0,
            b: (0..100).map(|k| 0.05 * 0.7f64.powi(k)).collect(),
        }
    }

    /// Check stationarity/moment conditions and parameter sanity.
    pub fn validate(&self) -> Result<()> {
        let sigma = match self {
            Self::IidGaussian { sigma } => sigma,
            Self::Arma11 { sigma, rho, beta_ma } => {
                if !(rho.abs() < 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "arma11 needs |rho| < 1 for stationarity, got {rho}"
                    )));
                }
                if !beta_ma.is_finite() {
                    return Err(Error::InvalidConfig("beta_ma must be finite".into()));
                }
                sigma
            }
            Self::ArchInf { sigma, a, b } => {
                if !(*a >= 0.0) || !a.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "arch-inf base level must be finite and nonnegative, got {a}"
                    )));
                }
                if b.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
                    return Err(Error::InvalidConfig(
                        "arch-inf lag weights must be finite and nonnegative".into(),
                    ));
                }
                let weight_sum: f64 = b.iter().sum();
                // E e⁸ = 105 for standard normal e.
                if 105f64.powf(0.25) * weight_sum >= 1.0 {
                    return Err(Error::InvalidConfig(format!(
                        "arch-inf fourth-moment condition violated: 105^(1/4) * {weight_sum} >= 1"
                    )));
                }
                sigma
            }
        };
        if !(*sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "sigma must be finite and nonnegative, got {sigma}"
            )));
        }
        Ok(())
    }
}

/// Draw `n` innovations from a caller-supplied RNG.
pub fn gen_innovations_rng<R: Rng>(
    spec: &InnovationSpec,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidConfig("need at least one innovation".into()));
    }
    let out = match spec {
        InnovationSpec::IidGaussian { sigma } => (0..n)
            .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
            .collect(),
        InnovationSpec::Arma11 {
            sigma,
            rho,
            beta_ma,
        } => {
            let mut eta = 0.0;
            let mut xi_prev = 0.0;
            let mut out = Vec::with_capacity(n);
            for t in 0..ARMA_BURN_IN + n {
                let xi: f64 = rng.sample(StandardNormal);
                eta = rho * eta + xi - beta_ma * xi_prev;
                xi_prev = xi;
                if t >= ARMA_BURN_IN {
                    out.push(sigma * eta);
                }
            }
            out
        }
        InnovationSpec::ArchInf { sigma, a, b } => {
            let burn = ARCH_WARMUP_FACTOR * b.len();
            let mut squared: Vec<f64> = Vec::with_capacity(burn + n);
            let mut out = Vec::with_capacity(n);
            for t in 0..burn + n {
                let mut s2 = *a;
                for (lag, &bj) in b.iter().enumerate() {
                    if t <= lag {
                        break;
                    }
                    s2 += bj * squared[t - 1 - lag];
                }
                let e: f64 = rng.sample(StandardNormal);
                let u = s2.sqrt() * e;
                squared.push(u * u);
                if t >= burn {
                    out.push(sigma * u);
                }
            }
            out
        }
    };
    Ok(out)
}

/// Draw `n` innovations reproducibly from a seed.
pub fn gen_innovations(spec: &InnovationSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen_innovations_rng(spec, n, &mut rng)
}

/// Long-run standard deviation η of the innovation process, the scale in
/// the functional CLT `T^{−1/2} Σ_{i≤sT} u_i ⇒ η B(s)`. Closed form for the
/// linear processes; a fixed-seed batch-means estimate for ARCH (whose
/// martingale-difference structure makes η equal the marginal SD).
pub fn long_run_sd(spec: &InnovationSpec) -> Result<f64> {
    spec.validate()?;
    match spec {
        InnovationSpec::IidGaussian { sigma } => Ok(*sigma),
        InnovationSpec::Arma11 {
            sigma,
            rho,
            beta_ma,
        } => Ok(sigma * (1.0 - beta_ma).abs() / (1.0 - rho).abs()),
        InnovationSpec::ArchInf { .. } => {
            const BATCHES: usize = 2000;
            const BATCH_LEN: usize = 500;
            const INTERNAL_SEED: u64 = 0x5EED_CA1B;
            let sample = gen_innovations(spec, BATCHES * BATCH_LEN, INTERNAL_SEED)?;
            let means: Vec<f64> = sample
                .chunks_exact(BATCH_LEN)
                .map(|batch| batch.iter().sum::<f64>() / BATCH_LEN as f64)
                .collect();
            let grand = means.iter().sum::<f64>() / BATCHES as f64;
            let var_of_means = means
                .iter()
                .map(|m| (m - grand) * (m - grand))
                .sum::<f64>()
                / (BATCHES - 1) as f64;
            Ok((BATCH_LEN as f64 * var_of_means).sqrt())
        }
    }
}

/// Where the structural change happens: an absolute 1-based index or a
/// fraction of the horizon (index `⌊T·fraction⌋`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChangePoint {
    /// Absolute 1-based change index.
    At { at: usize },
    /// Change at `⌊T·fraction⌋`.
    Fraction { fraction: f64 },
}

impl ChangePoint {
    /// Resolve to an absolute index for horizon `t`.
    pub fn index(&self, horizon: usize) -> usize {
        match self {
            Self::At { at } => *at,
            Self::Fraction { fraction } => (horizon as f64 * fraction).floor() as usize,
        }
    }
}

/// How the error path behaves after the change index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChangeMode {
    /// Random walk freezes at its pre-change level, plus one stationary
    /// innovation per step.
    #[default]
    Freeze,
    /// Errors collapse to `T^β`-rescaled stationary noise.
    Rescale,
}

/// Full recipe for one synthetic series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    /// Series length T.
    pub horizon: usize,
    /// Polynomial trend order p.
    pub order: usize,
    /// Trend coefficients β₀..β_p (constant first).
    pub trend: Vec<f64>,
    /// Optional change point; absent means a pure random-walk error.
    #[serde(default)]
    pub change: Option<ChangePoint>,
    /// Slope shift Δ added as `Δ·(t/T)` from the change index on. The shift
    /// lives on normalized time, so Δ is the amount the trend has moved by
    /// the end of the horizon; detection power is insensitive to moderate
    /// values, matching the finite-sample study.
    #[serde(default)]
    pub slope_delta: f64,
    /// Post-change error behavior.
    #[serde(default)]
    pub mode: ChangeMode,
    /// Rescale exponent β ∈ [0, 1/2) (only used by [`ChangeMode::Rescale`]).
    #[serde(default)]
    pub xi_exponent: f64,
    /// Innovation process.
    pub innovations: InnovationSpec,
}

impl ScenarioSpec {
    /// The resolved absolute change index, if any.
    pub fn change_index(&self) -> Option<usize> {
        self.change.map(|c| c.index(self.horizon))
    }

    /// Trend polynomial evaluated at (1-based) time `t`.
    pub fn trend_value(&self, t: usize) -> f64 {
        poly_eval(&self.trend, t as f64)
    }

    /// Structural sanity shared by generation and validation: shapes,
    /// finiteness, exponent range, and a change index of at least 1.
    fn check_structure(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be positive".into()));
        }
        if self.trend.len() != self.order + 1 {
            return Err(Error::InvalidConfig(format!(
                "trend needs {} coefficients for order {}, got {}",
                self.order + 1,
                self.order,
                self.trend.len()
            )));
        }
        if self.trend.iter().any(|c| !c.is_finite()) || !self.slope_delta.is_finite() {
            return Err(Error::InvalidConfig(
                "trend coefficients and slope_delta must be finite".into(),
            ));
        }
        if !(self.xi_exponent >= 0.0 && self.xi_exponent < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "xi_exponent must lie in [0, 1/2), got {}",
                self.xi_exponent
            )));
        }
        self.innovations.validate()?;
        if let Some(q) = self.change_index() {
            if q < 1 {
                return Err(Error::InvalidConfig(format!(
                    "change index resolves to {q}, must be at least 1"
                )));
            }
        }
        Ok(())
    }

    /// Full experiment-level validation: structure plus the change-index
    /// window `q ∈ (p+1, T]` that keeps a fittable pre-change segment.
    /// Generation itself only needs [`structure`](Self::check_structure),
    /// so degenerate cases like `q = 1` (stationary errors from the start)
    /// remain expressible in tests.
    pub fn validate(&self) -> Result<()> {
        self.check_structure()?;
        if let Some(q) = self.change_index() {
            if q <= self.order + 1 || q > self.horizon {
                return Err(Error::InvalidConfig(format!(
                    "change index {q} outside (p+1, T] = ({}, {}]",
                    self.order + 1,
                    self.horizon
                )));
            }
        }
        Ok(())
    }
}

/// Generate the error path ε_1..ε_T alone (no trend, no slope shift).
///
/// Freeze mode consumes exactly the innovations `gen_innovations(spec, T,
/// seed)` would return; rescale mode draws one extra value for the
/// time-zero term of `ε_t = Σ_{j=0}^t u_j`.
pub fn gen_errors(spec: &ScenarioSpec, seed: u64) -> Result<Vec<f64>> {
    spec.check_structure()?;
    let t_max = spec.horizon;
    let q = spec.change_index();
    let changed = |t: usize| q.is_some_and(|q| t >= q);
    match spec.mode {
        ChangeMode::Freeze => {
            let eta = gen_innovations(&spec.innovations, t_max, seed)?;
            let mut eps = Vec::with_capacity(t_max);
            let mut level = 0.0;
            for t in 1..=t_max {
                if changed(t) {
                    eps.push(level + eta[t - 1]);
                } else {
                    level += eta[t - 1];
                    eps.push(level);
                }
            }
            Ok(eps)
        }
        ChangeMode::Rescale => {
            let u = gen_innovations(&spec.innovations, t_max + 1, seed)?;
            let xi = (t_max as f64).powf(spec.xi_exponent);
            let mut eps = Vec::with_capacity(t_max);
            let mut cum = u[0];
            for t in 1..=t_max {
                if changed(t) {
                    eps.push(xi * u[t]);
                } else {
                    cum += u[t];
                    eps.push(cum);
                }
            }
            Ok(eps)
        }
    }
}

/// Generate one observation series `Y_1..Y_T` from a scenario:
/// trend + optional post-change slope shift + error path.
pub fn gen_scenario(spec: &ScenarioSpec, seed: u64) -> Result<Vec<f64>> {
    let eps = gen_errors(spec, seed)?;
    let q = spec.change_index();
    Ok((1..=spec.horizon)
        .map(|t| {
            let mut y = spec.trend_value(t) + eps[t - 1];
            if q.is_some_and(|q| t >= q) {
                y += spec.slope_delta * t as f64 / spec.horizon as f64;
            }
            y
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lag1_autocorr(xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
        let cov: f64 = xs
            .windows(2)
            .map(|w| (w[0] - mean) * (w[1] - mean))
            .sum();
        cov / var
    }

    fn scenario(
        horizon: usize,
        change: Option<ChangePoint>,
        mode: ChangeMode,
        innovations: InnovationSpec,
    ) -> ScenarioSpec {
        ScenarioSpec {
            horizon,
            order: 1,
            trend: vec![1.0, 0.05],
            change,
            slope_delta: 0.0,
            mode,
            xi_exponent: 0.0,
            innovations,
        }
    }

    #[test]
    fn innovations_are_reproducible() {
        for spec in [
            InnovationSpec::iid(1.0),
            InnovationSpec::arma(1.0, 0.3, 0.8),
            InnovationSpec::arch_preset(1.0),
        ] {
            let a = gen_innovations(&spec, 500, 42).unwrap();
            let b = gen_innovations(&spec, 500, 42).unwrap();
            assert_eq!(a, b);
            let c = gen_innovations(&spec, 500, 43).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn innovations_need_positive_length() {
        assert!(gen_innovations(&InnovationSpec::iid(1.0), 0, 1).is_err());
    }

    #[test]
    fn sigma_scales_output_linearly() {
        for base in [
            InnovationSpec::iid(1.0),
            InnovationSpec::arma(1.0, 0.3, -0.8),
            InnovationSpec::arch_preset(1.0),
        ] {
            let scaled = match base.clone() {
                InnovationSpec::IidGaussian { .. } => InnovationSpec::iid(2.5),
                InnovationSpec::Arma11 { rho, beta_ma, .. } => {
                    InnovationSpec::arma(2.5, rho, beta_ma)
                }
                InnovationSpec::ArchInf { a, b, .. } => InnovationSpec::ArchInf {
                    sigma: 2.5,
                    a,
                    b,
                },
            };
            let unit = gen_innovations(&base, 200, 7).unwrap();
            let wide = gen_innovations(&scaled, 200, 7).unwrap();
            for (u, w) in unit.iter().zip(&wide) {
                assert_eq!(*w, 2.5 * u, "sigma must be a pure output scale");
            }
        }
    }

    #[test]
    fn white_noise_has_no_autocorrelation() {
        let xs = gen_innovations(&InnovationSpec::iid(1.0), 100_000, 5).unwrap();
        assert!(lag1_autocorr(&xs).abs() < 0.01);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64;
        assert!((var - 1.0).abs() < 0.02);
    }

    #[test]
    fn ar1_lag1_autocorrelation_matches_rho() {
        let xs = gen_innovations(&InnovationSpec::arma(1.0, 0.3, 0.0), 100_000, 6).unwrap();
        assert!((lag1_autocorr(&xs) - 0.3).abs() < 0.02);
    }

    #[test]
    fn arma11_lag1_autocorrelation_matches_closed_form() {
        // rho1 = (1 - rho*beta)(rho - beta) / (1 + beta^2 - 2 rho beta)
        for (beta, expected) in [(0.8, -0.327_586), (-0.8, 0.643_396)] {
            let spec = InnovationSpec::arma(1.0, 0.3, beta);
            let xs = gen_innovations(&spec, 100_000, 8).unwrap();
            let rho1 = (1.0 - 0.3 * beta) * (0.3 - beta) / (1.0 + beta * beta - 2.0 * 0.3 * beta);
            assert!((rho1 - expected).abs() < 1e-6, "formula transcription");
            assert!(
                (lag1_autocorr(&xs) - rho1).abs() < 0.02,
                "beta {beta}: {} vs {rho1}",
                lag1_autocorr(&xs)
            );
        }
    }

    #[test]
    fn arch_is_uncorrelated_with_finite_fourth_moment() {
        let xs = gen_innovations(&InnovationSpec::arch_preset(1.0), 100_000, 9).unwrap();
        assert!(lag1_autocorr(&xs).abs() < 0.02, "martingale differences");
        let m4 = xs.iter().map(|x| x.powi(4)).sum::<f64>() / xs.len() as f64;
        assert!(m4.is_finite() && m4 > 0.0);
        // Squares are autocorrelated: that is what makes it ARCH.
        let squares: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!(lag1_autocorr(&squares) > 0.02);
    }

    #[test]
    fn innovation_validation_rejects_bad_parameters() {
        assert!(InnovationSpec::iid(-1.0).validate().is_err());
        assert!(InnovationSpec::iid(f64::NAN).validate().is_err());
        assert!(InnovationSpec::arma(1.0, 1.0, 0.0).validate().is_err());
        assert!(InnovationSpec::arma(1.0, -1.2, 0.0).validate().is_err());
        assert!(InnovationSpec::arma(1.0, 0.3, f64::INFINITY).validate().is_err());
        let bad_weight = InnovationSpec::ArchInf {
            sigma: 1.0,
            a: 1.0,
            b: vec![-0.1],
        };
        assert!(bad_weight.validate().is_err());
        // 105^(1/4) * 0.35 > 1 violates the fourth-moment condition.
        let heavy = InnovationSpec::ArchInf {
            sigma: 1.0,
            a: 1.0,
            b: vec![0.35],
        };
        assert!(heavy.validate().is_err());
        let ok = InnovationSpec::ArchInf {
            sigma: 1.0,
            a: 1.0,
            b: vec![0.2],
        };
        assert!(ok.validate().is_ok());
        assert!(InnovationSpec::arch_preset(1.0).validate().is_ok());
    }

    #[test]
    fn long_run_sd_closed_forms() {
        assert_eq!(long_run_sd(&InnovationSpec::iid(1.0)).unwrap(), 1.0);
        assert_eq!(long_run_sd(&InnovationSpec::iid(2.0)).unwrap(), 2.0);
        let ar = long_run_sd(&InnovationSpec::arma(1.0, 0.3, 0.0)).unwrap();
        assert!((ar - 1.0 / 0.7).abs() < 1e-12);
        let arma = long_run_sd(&InnovationSpec::arma(1.0, 0.3, 0.8)).unwrap();
        assert!((arma - 0.2 / 0.7).abs() < 1e-12);
        let neg = long_run_sd(&InnovationSpec::arma(1.0, 0.3, -0.8)).unwrap();
        assert!((neg - 1.8 / 0.7).abs() < 1e-12);
    }

    #[test]
    fn long_run_sd_batch_means_cross_check() {
        // Batch means on a long simulated stretch must land near the
        // closed form; same estimator then backs the ARCH value.
        let spec = InnovationSpec::arma(1.0, 0.3, 0.8);
        let sample = gen_innovations(&spec, 1_000_000, 77).unwrap();
        let batch_len = 500;
        let means: Vec<f64> = sample
            .chunks_exact(batch_len)
            .map(|b| b.iter().sum::<f64>() / batch_len as f64)
            .collect();
        let grand = means.iter().sum::<f64>() / means.len() as f64;
        let var = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>()
            / (means.len() - 1) as f64;
        let estimate = (batch_len as f64 * var).sqrt();
        let exact = 0.2 / 0.7;
        assert!(
            (estimate / exact - 1.0).abs() < 0.08,
            "batch means {estimate} vs closed form {exact}"
        );
    }

    #[test]
    fn arch_long_run_sd_matches_martingale_marginal_sd() {
        // Uncorrelated ARCH output makes the long-run variance equal the
        // marginal variance a/(1 - sum b).
        let spec = InnovationSpec::arch_preset(1.0);
        let estimate = long_run_sd(&spec).unwrap();
        let InnovationSpec::ArchInf { a, ref b, .. } = spec else {
            unreachable!()
        };
        let marginal = (a / (1.0 - b.iter().sum::<f64>())).sqrt();
        assert!(
            (estimate / marginal - 1.0).abs() < 0.05,
            "{estimate} vs {marginal}"
        );
        // Deterministic: same internal seed, same value.
        assert_eq!(estimate, long_run_sd(&spec).unwrap());
    }

    #[test]
    fn zero_scale_innovations_leave_the_pure_trend() {
        let mut spec = scenario(50, None, ChangeMode::Freeze, InnovationSpec::iid(0.0));
        spec.trend = vec![2.0, -0.3];
        let ys = gen_scenario(&spec, 3).unwrap();
        for (idx, y) in ys.iter().enumerate() {
            let t = (idx + 1) as f64;
            assert_eq!(*y, 2.0 - 0.3 * t);
        }
    }

    #[test]
    fn degenerate_change_at_one_gives_stationary_errors_throughout() {
        let spec = scenario(
            100,
            Some(ChangePoint::At { at: 1 }),
            ChangeMode::Freeze,
            InnovationSpec::arma(1.0, 0.3, 0.8),
        );
        let eps = gen_errors(&spec, 21).unwrap();
        let eta = gen_innovations(&spec.innovations, 100, 21).unwrap();
        assert_eq!(eps, eta, "q = 1 freezes the walk at level zero");
    }

    #[test]
    fn pre_change_walk_accumulates_the_innovations_exactly() {
        let spec = scenario(
            200,
            Some(ChangePoint::At { at: 25 }),
            ChangeMode::Freeze,
            InnovationSpec::arma(1.0, 0.3, 0.8),
        );
        let eps = gen_errors(&spec, 99).unwrap();
        let eta = gen_innovations(&spec.innovations, 200, 99).unwrap();
        assert_eq!(eps[0], eta[0]);
        for t in 1..24 {
            // Same running-sum arithmetic, so equality is bitwise.
            assert_eq!(eps[t], eps[t - 1] + eta[t]);
        }
        // After the change the walk level freezes at the q-1 partial sum.
        let level = eps[23];
        for t in 24..200 {
            assert_eq!(eps[t], level + eta[t]);
        }
    }

    #[test]
    fn frozen_segment_variance_does_not_grow_with_the_window() {
        let spec = scenario(
            2000,
            Some(ChangePoint::At { at: 100 }),
            ChangeMode::Freeze,
            InnovationSpec::arma(1.0, 0.3, 0.8),
        );
        let eps = gen_errors(&spec, 4).unwrap();
        let var = |xs: &[f64]| {
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
        };
        let early = var(&eps[100..1050]);
        let late = var(&eps[1050..2000]);
        assert!(
            (early / late).abs() < 3.0 && (late / early).abs() < 3.0,
            "stationary fluctuation around the frozen level: {early} vs {late}"
        );
        // The pre-change walk, in contrast, has strongly growing spread.
        let walk_early = var(&eps[0..30]);
        let walk_all = var(&eps[0..99]);
        assert!(walk_all > walk_early);
    }

    #[test]
    fn rescale_mode_includes_time_zero_and_rescales_after_change() {
        let mut spec = scenario(
            50,
            Some(ChangePoint::At { at: 20 }),
            ChangeMode::Rescale,
            InnovationSpec::iid(1.0),
        );
        spec.xi_exponent = 0.25;
        let eps = gen_errors(&spec, 13).unwrap();
        let u = gen_innovations(&spec.innovations, 51, 13).unwrap();
        assert_eq!(eps[0], u[0] + u[1], "time-zero draw enters the walk");
        for t in 2..20 {
            assert_eq!(eps[t - 1], eps[t - 2] + u[t]);
        }
        let xi = 50f64.powf(0.25);
        for t in 20..=50 {
            assert_eq!(eps[t - 1], xi * u[t], "post-change rescaled noise");
        }
    }

    #[test]
    fn rescale_exponent_zero_means_plain_stationary_noise() {
        let spec = scenario(
            40,
            Some(ChangePoint::At { at: 10 }),
            ChangeMode::Rescale,
            InnovationSpec::iid(1.0),
        );
        let eps = gen_errors(&spec, 2).unwrap();
        let u = gen_innovations(&spec.innovations, 41, 2).unwrap();
        for t in 10..=40 {
            assert_eq!(eps[t - 1], u[t]);
        }
    }

    #[test]
    fn slope_delta_shifts_exactly_from_the_change_on() {
        let base = scenario(
            120,
            Some(ChangePoint::At { at: 30 }),
            ChangeMode::Freeze,
            InnovationSpec::arma(1.0, 0.3, 0.8),
        );
        let mut shifted = base.clone();
        shifted.slope_delta = 0.25;
        let y0 = gen_scenario(&base, 11).unwrap();
        let y1 = gen_scenario(&shifted, 11).unwrap();
        for t in 1..=120usize {
            if t >= 30 {
                assert_eq!(y1[t - 1], y0[t - 1] + 0.25 * t as f64 / 120.0);
            } else {
                assert_eq!(y1[t - 1], y0[t - 1]);
            }
        }
    }

    #[test]
    fn fractional_change_point_resolves_by_flooring() {
        let cp = ChangePoint::Fraction { fraction: 0.05 };
        assert_eq!(cp.index(500), 25);
        assert_eq!(cp.index(499), 24);
        let at = ChangePoint::At { at: 100 };
        assert_eq!(at.index(500), 100);
    }

    #[test]
    fn scenario_validation_enforces_the_change_window() {
        let mut spec = scenario(
            100,
            Some(ChangePoint::At { at: 25 }),
            ChangeMode::Freeze,
            InnovationSpec::iid(1.0),
        );
        assert!(spec.validate().is_ok());
        spec.change = Some(ChangePoint::At { at: 2 }); // q <= p+1
        assert!(spec.validate().is_err());
        assert!(gen_scenario(&spec, 0).is_ok(), "generation stays mechanical");
        spec.change = Some(ChangePoint::At { at: 101 }); // q > T
        assert!(spec.validate().is_err());
        spec.change = Some(ChangePoint::At { at: 0 });
        assert!(gen_scenario(&spec, 0).is_err(), "q = 0 is structurally bad");
        spec.change = None;
        assert!(spec.validate().is_ok());
        spec.trend = vec![0.0];
        assert!(spec.validate().is_err(), "trend length must match order");
        spec.trend = vec![0.0, 0.0];
        spec.xi_exponent = 0.5;
        assert!(spec.validate().is_err(), "exponent must stay below 1/2");
    }

    #[test]
    fn variance_growth_slope_matches_long_run_variance() {
        // Across replications, Var(eps_t) for a pre-change random walk grows
        // linearly in t with slope equal to the long-run variance. The first
        // few partial sums carry boundary terms from the moving-average lag
        // structure, so the regression uses t >= 8 where growth is linear.
        let spec = scenario(24, None, ChangeMode::Freeze, InnovationSpec::arma(1.0, 0.3, 0.8));
        let reps = 5000usize;
        let t_len = 24usize;
        let mut sum = vec![0.0; t_len];
        let mut sum_sq = vec![0.0; t_len];
        for r in 0..reps {
            let eps = gen_errors(&spec, 9000 + r as u64).unwrap();
            for t in 0..t_len {
                sum[t] += eps[t];
                sum_sq[t] += eps[t] * eps[t];
            }
        }
        let variances: Vec<f64> = (0..t_len)
            .map(|t| {
                let m = sum[t] / reps as f64;
                sum_sq[t] / reps as f64 - m * m
            })
            .collect();
        let pts: Vec<(f64, f64)> = (8..=t_len)
            .map(|t| (t as f64, variances[t - 1]))
            .collect();
        let n = pts.len() as f64;
        let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let slope = pts
            .iter()
            .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
            .sum::<f64>()
            / pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum::<f64>();
        let lrv = long_run_sd(&spec.innovations).unwrap().powi(2);
        assert!(
            (slope / lrv - 1.0).abs() < 0.15,
            "variance slope {slope} vs long-run variance {lrv}"
        );
    }

    #[test]
    fn scenario_generation_is_reproducible() {
        let spec = scenario(
            300,
            Some(ChangePoint::Fraction { fraction: 0.2 }),
            ChangeMode::Freeze,
            InnovationSpec::arma(1.0, 0.3, -0.8),
        );
        assert_eq!(gen_scenario(&spec, 5).unwrap(), gen_scenario(&spec, 5).unwrap());
        assert_ne!(gen_scenario(&spec, 5).unwrap(), gen_scenario(&spec, 6).unwrap());
    }

    #[test]
    fn specs_round_trip_through_serde() {
        let spec = ScenarioSpec {
            horizon: 500,
            order: 1,
            trend: vec![1.0, 0.1],
            change: Some(ChangePoint::Fraction { fraction: 0.05 }),
            slope_delta: 0.25,
            mode: ChangeMode::Rescale,
            xi_exponent: 0.1,
            innovations: InnovationSpec::arma(1.0, 0.3, 0.8),
        };
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<ScenarioSpec>(&json).unwrap(), spec);
        let toml_text = toml::to_string(&spec).unwrap();
        assert_eq!(toml::from_str::<ScenarioSpec>(&toml_text).unwrap(), spec);
    }

    #[test]
    fn spec_parsing_accepts_the_documented_dialect() {
        let text = r#"
            horizon = 500
            order = 1
            trend = [0.0, 0.0]
            change = { at = 25 }
            mode = "freeze"

            [innovations]
            kind = "arma11"
            sigma = 1.0
            rho = 0.3
            beta_ma = 0.8
        "#;
        let spec: ScenarioSpec = toml::from_str(text).unwrap();
        assert_eq!(spec.change_index(), Some(25));
        assert_eq!(spec.slope_delta, 0.0, "defaults fill in");
        assert_eq!(spec.mode, ChangeMode::Freeze);
        let iid = r#"
            horizon = 100
            order = 0
            trend = [2.0]
            change = { fraction = 0.5 }

            [innovations]
            kind = "iid-gaussian"
            sigma = 2.0
        "#;
        let spec: ScenarioSpec = toml::from_str(iid).unwrap();
        assert_eq!(spec.change_index(), Some(50));
        assert_eq!(spec.innovations, InnovationSpec::iid(2.0));
        let bad = r#"
            horizon = 100
            order = 0
            trend = [2.0]
            typo_field = 1

            [innovations]
            kind = "iid-gaussian"
            sigma = 2.0
        "#;
        assert!(toml::from_str::<ScenarioSpec>(bad).is_err(), "unknown keys rejected");
    }
}
