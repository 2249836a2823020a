//! Sequential monitoring of polynomial trend stability with a
//! kernel-weighted variance-ratio chart.
//!
//! The monitored statistic is a KPSS-type variance ratio computed from
//! recursively refitted polynomial-regression residuals: at each time `t`
//! the trend is refit on everything observed so far, and the ratio compares
//! the kernel-weighted running variance of the residual partial sums to the
//! residual variance itself. In control, the errors around the trend are a
//! random walk (unit root) and the ratio has a nondegenerate limit, staying
//! above a calibrated control limit with probability `1 − α`. When the
//! errors switch to a stationary regime the partial sums stop growing, the
//! ratio collapses toward zero, and the chart signals the first time it
//! reaches the limit.
//!
//! The crate is organized around that workflow:
//!
//! - [`regress`]: sequential polynomial least squares with exact
//!   Hilbert-matrix algebra for the normal equations.
//! - [`kernel`]: the weighting kernels (two Gaussian variants, Epanechnikov,
//!   and tabulated custom kernels).
//! - [`detect`]: the variance-ratio statistic and the stopping rule.
//! - [`limit`]: simulation of the distribution-free limit processes and
//!   control-limit calibration from their infima.
//! - [`dgp`]: synthetic data generators (polynomial trends, dependent
//!   innovations, unit-root and rescaling change points) for experiments.
//! - [`mc`]: a deterministic, parallel Monte Carlo harness measuring
//!   rejection rates and conditional average run lengths.
//! - [`io`]: plain-text series files, TOML experiment plans, and CSV/JSON
//!   result writers shared with the command-line front end.
//!
//! Everything is deterministic given a seed: simulations use counter-mode
//! RNG streams per path or repetition, so results do not depend on thread
//! count or scheduling.

pub mod detect;
pub mod dgp;
pub mod error;
pub mod io;
pub mod kernel;
pub mod limit;
pub mod mc;
pub mod regress;

pub use detect::{run_monitor, variance_ratio, DetectorConfig, StoppingResult};
pub use error::{Error, Result};
pub use kernel::Kernel;
pub use limit::{calibrate, CalibrationTable, GridSpec};
pub use regress::PolynomialModel;
