//! The monitoring statistic and stopping rule.
//!
//! At each time `t ≥ k = ⌊Tκ⌋` the detector computes a kernel-weighted
//! variance ratio `U_t` of the sequentially updated residuals and signals the
//! first time `U_t ≤ c_R`. Small values of the ratio indicate that the
//! cumulative residual process has stopped wandering, i.e. the errors have
//! become stationary.

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::regress::{ResidualState, MAX_ORDER};

/// Default monitoring-start fraction κ. Chosen together with
/// [`DEFAULT_GAMMA`] by simulation sweep so that monitoring with a
/// calibrated limit holds its nominal null rate at desk-scale horizons
/// (T around 500) while keeping early changes detectable.
pub const DEFAULT_KAPPA: f64 = 0.1;

/// Default calculation-start fraction γ (first index entering the outer
/// sums of the statistic, as a fraction of the horizon).
pub const DEFAULT_GAMMA: f64 = 0.02;

/// Residuals whose largest magnitude falls below this multiple of
/// `max(1, ‖Y‖∞)` are treated as exactly zero, making the statistic 0 by the
/// 0/0 convention. This realizes the degenerate noiseless-input case, where
/// the fitted trend reproduces the data and the residual vector is pure
/// floating-point dust.
pub const RESIDUAL_FLOOR: f64 = 1e-10;

/// Configuration of one monitoring run.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorConfig {
    /// Time horizon `T` (monitoring stops after `T` observations in
    /// finite-horizon mode).
    pub horizon: usize,
    /// Polynomial trend order `p`.
    pub order: usize,
    /// Monitoring-start fraction κ ∈ (0,1); monitoring begins at `⌊Tκ⌋`.
    pub kappa: f64,
    /// Calculation-start fraction γ ∈ [0,κ); sums start at `g = ⌊Tγ⌋`.
    pub gamma: f64,
    /// Kernel bandwidth `h` (memory scale in observations; `ζ = T/h`).
    pub bandwidth: f64,
    /// Weighting kernel.
    pub kernel: Kernel,
    /// Control limit `c_R`; the chart signals when `U_t ≤ c_R`.
    pub control_limit: f64,
    /// When set, monitoring continues until the stream ends instead of
    /// stopping at the horizon.
    pub infinite_horizon: bool,
}

impl DetectorConfig {
    /// First monitored time index `k = ⌊Tκ⌋`.
    pub fn monitor_start(&self) -> usize {
        (self.horizon as f64 * self.kappa).floor() as usize
    }

    /// First index entering the statistic's outer sums, `g = ⌊Tγ⌋`.
    pub fn calc_start(&self) -> usize {
        (self.horizon as f64 * self.gamma).floor() as usize
    }

    /// Bandwidth ratio `ζ = T/h`.
    pub fn zeta(&self) -> f64 {
        self.horizon as f64 / self.bandwidth
    }

    /// Check all config invariants.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.horizon == 0 {
            return fail("horizon must be positive".into());
        }
        if self.order > MAX_ORDER {
            return Err(Error::OrderOverflow(self.order));
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return fail(format!("kappa must lie in (0,1), got {}", self.kappa));
        }
        if !(self.gamma >= 0.0 && self.gamma < self.kappa) {
            return fail(format!(
                "gamma must lie in [0, kappa), got gamma={} kappa={}",
                self.gamma, self.kappa
            ));
        }
        let g = self.calc_start();
        let k = self.monitor_start();
        if g < self.order + 1 {
            return fail(format!(
                "calculation start floor(T*gamma) = {g} must be at least p+1 = {}",
                self.order + 1
            ));
        }
        if k <= g {
            return fail(format!(
                "monitoring start floor(T*kappa) = {k} must exceed calculation start {g}"
            ));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return fail(format!("bandwidth must be positive, got {}", self.bandwidth));
        }
        if self.zeta() < 1.0 {
            return fail(format!(
                "T/h must be at least 1, got {} (h exceeds the horizon)",
                self.zeta()
            ));
        }
        if !self.control_limit.is_finite() {
            return fail("control limit must be finite".into());
        }
        Ok(())
    }
}

/// Outcome of one monitoring run.
#[derive(Clone, Debug, PartialEq)]
pub struct StoppingResult {
    /// First time `t` with `U_t ≤ c_R`, or `None` if the chart never
    /// signaled.
    pub stop_time: Option<usize>,
    /// The statistic path `(t, U_t)` for `t = k..=` (stop or stream/horizon
    /// end).
    pub path: Vec<(usize, f64)>,
}

impl StoppingResult {
    /// Whether the chart signaled.
    pub fn signaled(&self) -> bool {
        self.stop_time.is_some()
    }
}

/// The kernel-weighted variance ratio at time `t = residuals.len()`:
///
/// `[t⁻⁴ Σ_{i=g}^{t} (Σ_{j=1}^{i} ε̂_j)² K((i−t)/h)] / [t⁻² Σ_{j=g}^{t} ε̂_j²]`
///
/// with the convention `0/0 = 0`. The inner cumulative sum always starts at
/// `j = 1`; both outer sums start at `g`.
pub fn variance_ratio(residuals: &[f64], g: usize, bandwidth: f64, kernel: &Kernel) -> Result<f64> {
    let t = residuals.len();
    if g < 1 || g > t {
        return Err(Error::InvalidConfig(format!(
            "calculation start g={g} outside 1..={t}"
        )));
    }
    let tf = t as f64;
    let mut cumulative = 0.0;
    let mut num = 0.0;
    let mut den = 0.0;
    for (idx, &r) in residuals.iter().enumerate() {
        let i = idx + 1;
        cumulative += r;
        if i >= g {
            let weight = kernel.evaluate((i as f64 - tf) / bandwidth);
            num += cumulative * cumulative * weight;
            den += r * r;
        }
    }
    if den == 0.0 {
        if num == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::DegenerateStatistic)
        }
    } else {
        Ok((num / tf.powi(4)) / (den / tf.powi(2)))
    }
}

/// Run the chart over an observation stream.
///
/// Observations are consumed one at a time; the polynomial fit is refreshed
/// and every residual recomputed at each step. From `t = k` on, `U_t` is
/// evaluated and the run stops at the first `U_t ≤ c_R` (ties signal). In
/// finite-horizon mode at most `T` observations are consumed and the stream
/// must reach `k`; in infinite-horizon mode the run continues until the
/// stream ends.
pub fn run_monitor<I>(observations: I, config: &DetectorConfig) -> Result<StoppingResult>
where
    I: IntoIterator<Item = f64>,
{
    config.validate()?;
    let k = config.monitor_start();
    let g = config.calc_start();
    let mut state = ResidualState::new(config.order)?;
    let mut y_max = 0.0f64;
    let mut path = Vec::new();
    let mut stop_time = None;

    for y in observations {
        state.update(y)?;
        y_max = y_max.max(y.abs());
        let t = state.time();
        if t >= k {
            let residuals = state.residuals();
            let r_max = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
            let statistic = if r_max <= RESIDUAL_FLOOR * y_max.max(1.0) {
                0.0
            } else {
                variance_ratio(residuals, g, config.bandwidth, &config.kernel)?
            };
            path.push((t, statistic));
            if statistic <= config.control_limit {
                stop_time = Some(t);
                break;
            }
        }
        if !config.infinite_horizon && t >= config.horizon {
            break;
        }
    }

    if !config.infinite_horizon && stop_time.is_none() && state.time() < k {
        return Err(Error::InsufficientStream {
            got: state.time(),
            start: k,
        });
    }
    Ok(StoppingResult { stop_time, path })
}

/// Conditional average run length: mean stop time among runs that signaled,
/// `None` when none did.
pub fn carl(results: &[StoppingResult]) -> Option<f64> {
    let stops: Vec<usize> = results.iter().filter_map(|r| r.stop_time).collect();
    if stops.is_empty() {
        None
    } else {
        Some(stops.iter().sum::<usize>() as f64 / stops.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelTable;
    use crate::regress::batch_residuals;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn flat_kernel() -> Kernel {
        Kernel::CustomTable(KernelTable::new(-1e9, 1e9, vec![1.0, 1.0]).unwrap())
    }

    fn config(t: usize, c: f64) -> DetectorConfig {
        DetectorConfig {
            horizon: t,
            order: 1,
            kappa: DEFAULT_KAPPA,
            gamma: DEFAULT_GAMMA,
            bandwidth: t as f64 / 20.0,
            kernel: Kernel::GaussianPaper,
            control_limit: c,
            infinite_horizon: false,
        }
    }

    fn random_walk(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut level = 0.0;
        (0..n)
            .map(|_| {
                level += rng.sample::<f64, _>(StandardNormal);
                level
            })
            .collect()
    }

    #[test]
    fn three_term_oracle_flat_kernel() {
        // residuals (1,-1,1), g=1: prefix sums 1,0,1; with K = 1
        // numerator 2/81, denominator 3/9, ratio 6/81.
        let v = variance_ratio(&[1.0, -1.0, 1.0], 1, 7.0, &flat_kernel()).unwrap();
        assert!((v - 6.0 / 81.0).abs() < 1e-15, "{v}");
    }

    #[test]
    fn three_term_oracle_gaussian_paper() {
        // Same residuals with the Gaussian weighting spelled out by hand:
        // prefix sums (1, 0, 1) weight K at (i-3)/2 for i = 1, 3.
        let h = 2.0;
        let k = |z: f64| (-0.5 * z * z).exp() / std::f64::consts::TAU;
        let expected = ((k(-1.0) + k(0.0)) / 81.0) / (3.0 / 9.0);
        let v = variance_ratio(&[1.0, -1.0, 1.0], 1, h, &Kernel::GaussianPaper).unwrap();
        assert!((v - expected).abs() < 1e-15, "{v} vs {expected}");
    }

    #[test]
    fn zero_residuals_give_zero() {
        assert_eq!(
            variance_ratio(&[0.0; 8], 2, 3.0, &Kernel::GaussianPaper).unwrap(),
            0.0
        );
    }

    #[test]
    fn degenerate_denominator_errors() {
        // Nonzero mass before g, exact zeros after: denominator 0, numerator > 0.
        let r = [1.0, 0.0, 0.0];
        assert!(matches!(
            variance_ratio(&r, 2, 3.0, &flat_kernel()),
            Err(Error::DegenerateStatistic)
        ));
    }

    #[test]
    fn variance_ratio_rejects_bad_calc_start() {
        assert!(variance_ratio(&[1.0, 2.0], 0, 1.0, &flat_kernel()).is_err());
        assert!(variance_ratio(&[1.0, 2.0], 3, 1.0, &flat_kernel()).is_err());
    }

    #[test]
    fn config_validation_catches_bad_fields() {
        let base = config(100, 0.1);
        assert!(base.validate().is_ok());
        for (mutate, _label) in [
            (
                Box::new(|c: &mut DetectorConfig| c.kappa = 1.2) as Box<dyn Fn(&mut DetectorConfig)>,
                "kappa",
            ),
            (Box::new(|c: &mut DetectorConfig| c.gamma = 0.5), "gamma order"),
            (Box::new(|c: &mut DetectorConfig| c.gamma = -0.1), "gamma sign"),
            (Box::new(|c: &mut DetectorConfig| c.order = 7), "g < p+1"),
            (Box::new(|c: &mut DetectorConfig| c.bandwidth = 0.0), "bandwidth"),
            (
                Box::new(|c: &mut DetectorConfig| c.bandwidth = 1000.0),
                "zeta < 1",
            ),
            (
                Box::new(|c: &mut DetectorConfig| c.control_limit = f64::NAN),
                "limit",
            ),
            (Box::new(|c: &mut DetectorConfig| c.horizon = 0), "horizon"),
        ] {
            let mut cfg = base.clone();
            mutate(&mut cfg);
            assert!(cfg.validate().is_err());
        }
        // kappa*T <= gamma*T after rounding.
        let mut cfg = base;
        cfg.kappa = 0.021;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn huge_limit_stops_immediately() {
        let cfg = config(100, 1e12);
        let out = run_monitor(random_walk(100, 7), &cfg).unwrap();
        assert_eq!(out.stop_time, Some(cfg.monitor_start()));
        assert_eq!(out.path.len(), 1);
    }

    #[test]
    fn zero_limit_never_signals_on_random_walk() {
        let cfg = config(150, 0.0);
        let out = run_monitor(random_walk(150, 11), &cfg).unwrap();
        assert_eq!(out.stop_time, None);
        assert_eq!(out.path.len(), 150 - cfg.monitor_start() + 1);
        assert!(out.path.iter().all(|&(_, u)| u > 0.0));
    }

    #[test]
    fn noiseless_trend_signals_at_start() {
        let ys: Vec<f64> = (1..=100).map(|t| 5.0 + 0.3 * t as f64).collect();
        let cfg = config(100, 1e-9);
        let out = run_monitor(ys, &cfg).unwrap();
        assert_eq!(out.stop_time, Some(cfg.monitor_start()));
        assert_eq!(out.path, vec![(cfg.monitor_start(), 0.0)]);
    }

    #[test]
    fn short_stream_errors_in_finite_mode() {
        let cfg = config(100, 0.1);
        let err = run_monitor(random_walk(5, 3), &cfg).unwrap_err();
        assert!(matches!(err, Error::InsufficientStream { got: 5, start: 10 }));
    }

    #[test]
    fn infinite_horizon_runs_past_horizon() {
        let mut cfg = config(100, 0.0);
        cfg.infinite_horizon = true;
        let out = run_monitor(random_walk(250, 13), &cfg).unwrap();
        assert_eq!(out.stop_time, None);
        assert_eq!(out.path.last().unwrap().0, 250);

        // A short stream is not an error without a horizon.
        let out = run_monitor(random_walk(4, 13), &cfg).unwrap();
        assert_eq!(out.stop_time, None);
        assert!(out.path.is_empty());
    }

    #[test]
    fn tie_at_limit_signals() {
        let ys = random_walk(100, 21);
        let cfg = config(100, 0.0);
        let free = run_monitor(ys.clone(), &cfg).unwrap();
        let (t5, u5) = free.path[5];
        let mut pinned = cfg;
        pinned.control_limit = u5;
        let out = run_monitor(ys, &pinned).unwrap();
        assert_eq!(out.stop_time, Some(t5));
    }

    #[test]
    fn stop_time_matches_brute_force_on_small_instances() {
        for seed in 0..20u64 {
            let t_max = 40;
            let ys = random_walk(t_max, 100 + seed);
            let mut cfg = config(t_max, 0.0);
            cfg.kappa = 0.2;
            cfg.gamma = 0.08;
            let k = cfg.monitor_start();
            let g = cfg.calc_start();

            // Independent recomputation of every U_t from scratch.
            let all: Vec<(usize, f64)> = (k..=t_max)
                .map(|t| {
                    let res = batch_residuals(&ys[..t], cfg.order).unwrap();
                    (t, variance_ratio(&res, g, cfg.bandwidth, &cfg.kernel).unwrap())
                })
                .collect();

            let quantile = all[all.len() / 3].1;
            for c in [0.0, quantile, 10.0 * quantile] {
                let mut brute = None;
                for &(t, u) in &all {
                    if u <= c {
                        brute = Some(t);
                        break;
                    }
                }
                let mut run_cfg = cfg.clone();
                run_cfg.control_limit = c;
                let out = run_monitor(ys.clone(), &run_cfg).unwrap();
                assert_eq!(out.stop_time, brute, "seed {seed} c {c}");
            }
        }
    }

    #[test]
    fn monotone_signal_set_in_limit() {
        let ys = random_walk(120, 31);
        let mut stops = Vec::new();
        for c in [1e-8, 1e-6, 1e-4, 1e-2, 1.0] {
            let cfg = config(120, c);
            let out = run_monitor(ys.clone(), &cfg).unwrap();
            stops.push(out.stop_time.unwrap_or(usize::MAX));
        }
        for w in stops.windows(2) {
            assert!(w[0] >= w[1], "stop times should shrink as c grows");
        }
    }

    #[test]
    fn carl_basics() {
        let a = StoppingResult {
            stop_time: Some(100),
            path: vec![],
        };
        let b = StoppingResult {
            stop_time: Some(300),
            path: vec![],
        };
        let none = StoppingResult {
            stop_time: None,
            path: vec![],
        };
        assert_eq!(carl(&[a, b, none.clone()]), Some(200.0));
        assert_eq!(carl(&[none]), None);
        assert_eq!(carl(&[]), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn scale_invariance(
            seed in 0u64..1000,
            c in prop_oneof![Just(0.001f64), Just(-3.0), Just(256.0), Just(1e5)],
        ) {
            let ys = random_walk(60, seed);
            let res = batch_residuals(&ys, 1).unwrap();
            let scaled: Vec<f64> = res.iter().map(|r| r * c).collect();
            let base = variance_ratio(&res, 3, 5.0, &Kernel::GaussianPaper).unwrap();
            let moved = variance_ratio(&scaled, 3, 5.0, &Kernel::GaussianPaper).unwrap();
            prop_assert!((base - moved).abs() <= 1e-12 * base.abs().max(1e-300));
        }

        #[test]
        fn trend_invariance_of_path(
            seed in 0u64..500,
            a in -2.0f64..2.0,
            b in -0.02f64..0.02,
        ) {
            let ys = random_walk(100, seed);
            let shifted: Vec<f64> = ys
                .iter()
                .enumerate()
                .map(|(idx, &y)| y + a + b * (idx + 1) as f64)
                .collect();
            let cfg = config(100, 0.0);
            let base = run_monitor(ys, &cfg).unwrap();
            let moved = run_monitor(shifted, &cfg).unwrap();
            prop_assert_eq!(base.path.len(), moved.path.len());
            for (x, y) in base.path.iter().zip(&moved.path) {
                prop_assert_eq!(x.0, y.0);
                prop_assert!((x.1 - y.1).abs() < 1e-9, "{} vs {}", x.1, y.1);
            }
        }
    }
}
