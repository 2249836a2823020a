//! Weighting kernels for the variance-ratio statistic.
//!
//! The statistic is a ratio, so a kernel's overall level cancels once the
//! control limit is calibrated with the *same* kernel; only the shape
//! matters. Two Gaussian variants are offered: `gaussian-paper` scales the
//! bell by `(2π)⁻¹` (the chart's traditional weighting) and
//! `gaussian-normalized` by `(2π)^{-1/2}` (a true density). Calibration and
//! monitoring must agree on the kind.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A tabulated kernel on a uniform grid over `[lo, hi]`, evaluated by linear
/// interpolation and zero outside the table range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelTable {
    /// Left end of the support grid.
    pub lo: f64,
    /// Right end of the support grid.
    pub hi: f64,
    /// Kernel values at the uniform grid points, `values[0]` at `lo`.
    pub values: Vec<f64>,
}

impl KernelTable {
    /// Validated table: `lo < hi`, at least two finite nonnegative values.
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidConfig(format!(
                "kernel table needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        if values.len() < 2 {
            return Err(Error::InvalidConfig(
                "kernel table needs at least two values".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidConfig(
                "kernel table values must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { lo, hi, values })
    }

    fn evaluate(&self, z: f64) -> f64 {
        if z < self.lo || z > self.hi {
            return 0.0;
        }
        let m = self.values.len() - 1;
        let pos = (z - self.lo) / (self.hi - self.lo) * m as f64;
        let idx = (pos.floor() as usize).min(m - 1);
        let frac = pos - idx as f64;
        self.values[idx] + frac * (self.values[idx + 1] - self.values[idx])
    }
}

/// Kernel kinds understood by the detector and the limit simulator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelRepr", into = "KernelRepr")]
pub enum Kernel {
    /// `K(z) = (2π)⁻¹ exp(−z²/2)`.
    GaussianPaper,
    /// `K(z) = (2π)^{−1/2} exp(−z²/2)`, integrates to one.
    GaussianNormalized,
    /// `K(z) = (3/4)(1−z²)` on `[−1, 1]`, zero outside.
    Epanechnikov,
    /// User-supplied tabulated kernel.
    CustomTable(KernelTable),
}

impl Kernel {
    /// Evaluate the kernel at `z`.
    pub fn evaluate(&self, z: f64) -> f64 {
        match self {
            Kernel::GaussianPaper => (-0.5 * z * z).exp() / std::f64::consts::TAU,
            Kernel::GaussianNormalized => {
                (-0.5 * z * z).exp() / std::f64::consts::TAU.sqrt()
            }
            Kernel::Epanechnikov => {
                if z.abs() <= 1.0 {
                    0.75 * (1.0 - z * z)
                } else {
                    0.0
                }
            }
            Kernel::CustomTable(table) => table.evaluate(z),
        }
    }

    /// Stable name of the kind.
    pub fn name(&self) -> &'static str {
        match self {
            Kernel::GaussianPaper => "gaussian-paper",
            Kernel::GaussianNormalized => "gaussian-normalized",
            Kernel::Epanechnikov => "epanechnikov",
            Kernel::CustomTable(_) => "custom-table",
        }
    }
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian-paper" => Ok(Kernel::GaussianPaper),
            "gaussian-normalized" => Ok(Kernel::GaussianNormalized),
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            other => Err(Error::InvalidConfig(format!(
                "unknown kernel {other:?}; expected gaussian-paper, \
                 gaussian-normalized, or epanechnikov"
            ))),
        }
    }
}

/// Serialized form: a bare name string for built-ins, a table object for
/// custom kernels.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum KernelRepr {
    Name(String),
    Custom {
        #[serde(rename = "custom-table")]
        table: KernelTable,
    },
}

impl TryFrom<KernelRepr> for Kernel {
    type Error = Error;

    fn try_from(repr: KernelRepr) -> Result<Self> {
        match repr {
            KernelRepr::Name(name) => name.parse(),
            KernelRepr::Custom { table } => {
                Ok(Kernel::CustomTable(KernelTable::new(table.lo, table.hi, table.values)?))
            }
        }
    }
}

impl From<Kernel> for KernelRepr {
    fn from(kernel: Kernel) -> Self {
        match kernel {
            Kernel::CustomTable(table) => KernelRepr::Custom { table },
            builtin => KernelRepr::Name(builtin.name().to_owned()),
        }
    }
}
