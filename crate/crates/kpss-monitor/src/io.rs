//! File formats shared by the library and the command-line front end:
//! plain-text observation series, TOML experiment plans, CSV result
//! tables, and a JSON run summary carrying provenance.
//!
//! A series file holds one observation per line (UTF-8). The first line
//! may be a non-numeric header; after that, every line must parse as a
//! finite float; blank lines, missing values, and non-finite entries are
//! hard errors naming the offending line. Values are written with Rust's
//! shortest-round-trip float formatting, so write → read is lossless.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::detect::{DetectorConfig, DEFAULT_GAMMA, DEFAULT_KAPPA};
use crate::dgp::ScenarioSpec;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::limit::CalibrationTable;
use crate::mc::{ExperimentPlan, MCResult, Scenario};

/// Read a series: optional single header line, then one finite float per
/// line. Line numbers in errors are 1-based.
pub fn read_series<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut lines = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        lines += 1;
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("non-finite observation {text:?}"),
                })
            }
            Err(_) => {
                // A single leading non-numeric line passes as a header.
                if idx == 0 && !text.is_empty() {
                    continue;
                }
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: if text.is_empty() {
                        "blank line".into()
                    } else {
                        format!("not a number: {text:?}")
                    },
                });
            }
        }
    }
    if lines == 0 || values.is_empty() {
        return Err(Error::InvalidConfig(
            "input contains no observations".into(),
        ));
    }
    Ok(values)
}

/// Read a series from a file path.
pub fn read_series_path(path: &Path) -> Result<Vec<f64>> {
    let file = std::fs::File::open(path)?;
    read_series(std::io::BufReader::new(file))
}

/// Write a series, one value per line, in shortest-round-trip form.
/// Non-finite values are rejected so written files always read back.
pub fn write_series<W: Write>(mut writer: W, values: &[f64]) -> Result<()> {
    for (idx, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "cannot write non-finite value at position {idx}"
            )));
        }
        writeln!(writer, "{v}")?;
    }
    Ok(())
}

/// Write a series to a file path.
pub fn write_series_path(path: &Path, values: &[f64]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_series(std::io::BufWriter::new(file), values)
}

/// Finite- vs infinite-horizon monitoring, as written in plan files and
/// on the command line.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HorizonMode {
    /// Stop no later than the design horizon.
    #[default]
    Finite,
    /// Keep monitoring past the horizon until the stream ends.
    Infinite,
}

/// `[detector]` section of a plan file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    /// Design horizon T.
    pub horizon: usize,
    /// Polynomial order p.
    pub order: usize,
    /// Monitoring-start fraction κ (defaults to the library default).
    #[serde(default)]
    pub kappa: Option<f64>,
    /// Calculation-start fraction γ (defaults to the library default).
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Kernel bandwidth h. Exactly one of `bandwidth` and `zeta`.
    #[serde(default)]
    pub bandwidth: Option<f64>,
    /// Bandwidth ratio ζ = T/h. Exactly one of `bandwidth` and `zeta`.
    #[serde(default)]
    pub zeta: Option<f64>,
    /// Weighting kernel (name, or a custom table).
    pub kernel: Kernel,
    /// Monitoring mode.
    #[serde(default)]
    pub mode: HorizonMode,
}

impl DetectorSection {
    /// Build the detector template; its control limit starts at 0 and is
    /// replaced per experiment cell.
    pub fn resolve(&self) -> Result<DetectorConfig> {
        let bandwidth = match (self.bandwidth, self.zeta) {
            (Some(h), None) => h,
            (None, Some(z)) => {
                if !(z.is_finite() && z > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "zeta must be positive and finite, got {z}"
                    )));
                }
                self.horizon as f64 / z
            }
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig(
                    "give either bandwidth or zeta, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidConfig(
                    "detector needs a bandwidth or a zeta ratio".into(),
                ))
            }
        };
        let config = DetectorConfig {
            horizon: self.horizon,
            order: self.order,
            kappa: self.kappa.unwrap_or(DEFAULT_KAPPA),
            gamma: self.gamma.unwrap_or(DEFAULT_GAMMA),
            bandwidth,
            kernel: self.kernel.clone(),
            control_limit: 0.0,
            infinite_horizon: self.mode == HorizonMode::Infinite,
        };
        config.validate()?;
        Ok(config)
    }
}

/// `[limits]` section: either explicit control limits, or significance
/// levels resolved against a calibration table file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsSection {
    /// Explicit control limits.
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    /// Significance levels to look up in `table`.
    #[serde(default)]
    pub alphas: Option<Vec<f64>>,
    /// Calibration table path (relative paths resolve against the plan
    /// file's directory).
    #[serde(default)]
    pub table: Option<PathBuf>,
}

impl LimitsSection {
    /// Resolve to concrete control limits. A table, when used, must be
    /// compatible with the detector (same kernel, ζ, κ, γ, order).
    pub fn resolve(&self, detector: &DetectorConfig, base_dir: &Path) -> Result<Vec<f64>> {
        match (&self.values, &self.alphas, &self.table) {
            (Some(values), None, None) => Ok(values.clone()),
            (None, Some(alphas), Some(table_path)) => {
                let full = if table_path.is_absolute() {
                    table_path.clone()
                } else {
                    base_dir.join(table_path)
                };
                let table = CalibrationTable::load(&full)?;
                table.check_compatible(detector)?;
                alphas
                    .iter()
                    .map(|&a| table.control_limit_for(a))
                    .collect()
            }
            (Some(_), _, _) => Err(Error::InvalidConfig(
                "limits: give either values, or alphas with a table, not both".into(),
            )),
            (None, Some(_), None) => Err(Error::InvalidConfig(
                "limits: alphas need a calibration table file".into(),
            )),
            (None, None, Some(_)) => Err(Error::InvalidConfig(
                "limits: a table needs the alphas to look up".into(),
            )),
            (None, None, None) => Err(Error::InvalidConfig(
                "limits: empty section; give values, or alphas with a table".into(),
            )),
        }
    }
}

/// One `[[scenarios]]` entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    /// Identifier echoed in result rows.
    pub id: String,
    /// The generator recipe.
    pub spec: ScenarioSpec,
}

/// A whole experiment plan document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    /// Replications per scenario.
    pub reps: usize,
    /// Master seed for replication-seed derivation.
    pub master_seed: u64,
    /// Detector template.
    pub detector: DetectorSection,
    /// Control limits or α-levels.
    pub limits: LimitsSection,
    /// Scenario list.
    pub scenarios: Vec<ScenarioSection>,
}

impl PlanFile {
    /// Parse a plan document from TOML text.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Load a plan file, returning the parsed document and its raw text
    /// (echoed into summaries for provenance).
    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)?;
        Ok((Self::parse(&text)?, text))
    }

    /// Resolve into a runnable [`ExperimentPlan`]. `base_dir` anchors
    /// relative calibration-table paths, normally the plan file's parent.
    pub fn resolve(&self, base_dir: &Path) -> Result<ExperimentPlan> {
        let detector = self.detector.resolve()?;
        let control_limits = self.limits.resolve(&detector, base_dir)?;
        let plan = ExperimentPlan {
            scenarios: self
                .scenarios
                .iter()
                .map(|s| Scenario {
                    id: s.id.clone(),
                    spec: s.spec.clone(),
                })
                .collect(),
            detector,
            control_limits,
            reps: self.reps,
            master_seed: self.master_seed,
        };
        plan.validate()?;
        Ok(plan)
    }
}

/// CSV header used by both result and curve tables.
pub const RESULTS_CSV_HEADER: &str =
    "scenario,control_limit,control_limit_1e6,rejection_rate,carl,reps,std_error";

/// Write result cells as CSV: one row per (scenario, control limit), the
/// limit both raw and ×10⁶ (the conventional plotting scale), CARL blank
/// when no replication signaled.
pub fn write_results_csv<W: Write>(mut writer: W, results: &[MCResult]) -> Result<()> {
    writeln!(writer, "{RESULTS_CSV_HEADER}")?;
    for row in results {
        let carl = row.carl.map(|c| c.to_string()).unwrap_or_default();
        writeln!(
            writer,
            "{},{},{},{},{},{},{}",
            row.scenario,
            row.control_limit,
            row.control_limit * 1e6,
            row.rejection_rate,
            carl,
            row.reps,
            row.std_error,
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    library_version: &'static str,
    master_seed: u64,
    reps: usize,
    plan_echo: &'a str,
    results: &'a [MCResult],
}

/// Write the JSON run summary: library version, seed, replication count,
/// the verbatim plan text, and every result cell.
pub fn write_summary<W: Write>(
    writer: W,
    plan_echo: &str,
    plan: &ExperimentPlan,
    results: &[MCResult],
) -> Result<()> {
    let doc = SummaryDoc {
        library_version: env!("CARGO_PKG_VERSION"),
        master_seed: plan.master_seed,
        reps: plan.reps,
        plan_echo,
        results,
    };
    serde_json::to_writer_pretty(writer, &doc)?;
    Ok(())
}
