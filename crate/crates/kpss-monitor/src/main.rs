//! Command-line front end for the variance-ratio monitoring chart.
//!
//! Four subcommands: `monitor` watches a series file or stdin and reports
//! the stopping decision; `calibrate` simulates the limit processes and
//! writes a control-limit table; `simulate` runs an experiment plan;
//! `curves` runs a plan over an ascending control-limit grid and emits a
//! plottable rate/CARL table.
//!
//! Exit codes: 0 = success (monitor: no signal), 10 = monitor signaled,
//! 11 = any error.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use kpss_monitor::detect::{run_monitor, DetectorConfig, StoppingResult, DEFAULT_GAMMA, DEFAULT_KAPPA};
use kpss_monitor::error::{Error, Result};
use kpss_monitor::io::{
    read_series, read_series_path, write_results_csv, write_summary, DetectorSection,
    HorizonMode, PlanFile,
};
use kpss_monitor::kernel::Kernel;
use kpss_monitor::limit::{calibrate, CalibrationTable, GridSpec, DEFAULT_GRID_N};
use kpss_monitor::mc::{run_scenario_cells, ExperimentPlan, MCResult};

const EXIT_SIGNAL: i32 = 10;
const EXIT_ERROR: i32 = 11;

#[derive(Parser)]
#[command(
    name = "kpss-monitor",
    about = "Kernel-weighted variance-ratio control chart for trend stability",
    version
)]
struct Cli {
    /// Worker threads for calibrate/simulate/curves (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monitor a series and report the stopping decision.
    Monitor(MonitorArgs),
    /// Simulate the limit processes and write a control-limit table.
    Calibrate(CalibrateArgs),
    /// Run an experiment plan and write result cells.
    Simulate(SimulateArgs),
    /// Run a plan over an ascending control-limit grid for plotting.
    Curves(CurvesArgs),
}

#[derive(Args)]
struct DetectorArgs {
    /// Design horizon T.
    #[arg(long)]
    horizon: usize,
    /// Polynomial trend order p.
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Monitoring-start fraction kappa.
    #[arg(long, default_value_t = DEFAULT_KAPPA)]
    kappa: f64,
    /// Calculation-start fraction gamma.
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    gamma: f64,
    /// Kernel bandwidth h (exactly one of --bandwidth and --zeta).
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Bandwidth ratio zeta = T/h (exactly one of --bandwidth and --zeta).
    #[arg(long)]
    zeta: Option<f64>,
    /// Kernel: gaussian-paper, gaussian-normalized, or epanechnikov.
    #[arg(long, default_value = "gaussian-paper")]
    kernel: String,
}

impl DetectorArgs {
    fn resolve(&self, mode: HorizonMode) -> Result<DetectorConfig> {
        let section = DetectorSection {
            horizon: self.horizon,
            order: self.order,
            kappa: Some(self.kappa),
            gamma: Some(self.gamma),
            bandwidth: self.bandwidth,
            zeta: self.zeta,
            kernel: Kernel::from_str(&self.kernel)?,
            mode,
        };
        section.resolve()
    }
}

#[derive(Args)]
struct MonitorArgs {
    #[command(flatten)]
    detector: DetectorArgs,
    /// Input series file; stdin when omitted or "-".
    #[arg(long)]
    input: Option<PathBuf>,
    /// Control limit (takes precedence over --table/--alpha). The statistic
    /// is nonnegative, so a negative value means "never signal".
    #[arg(long, allow_negative_numbers = true)]
    climit: Option<f64>,
    /// Calibration table for looking up the control limit.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Significance level to look up in --table.
    #[arg(long)]
    alpha: Option<f64>,
    /// finite: stop at the horizon; infinite: monitor to stream end.
    #[arg(long, default_value = "finite")]
    mode: String,
    /// Write the full (t, statistic) path as CSV ("-" for stdout).
    #[arg(long)]
    emit_path: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Kernel to calibrate for.
    #[arg(long, default_value = "gaussian-paper")]
    kernel: String,
    /// Bandwidth ratio zeta = T/h.
    #[arg(long)]
    zeta: f64,
    /// Monitoring-start fraction kappa.
    #[arg(long, default_value_t = DEFAULT_KAPPA)]
    kappa: f64,
    /// Calculation-start fraction gamma.
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    gamma: f64,
    /// Polynomial trend order p.
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Significance level(s); repeat for several.
    #[arg(long = "alpha", required = true)]
    alphas: Vec<f64>,
    /// Simulated limit paths.
    #[arg(long, default_value_t = 5000)]
    paths: usize,
    /// Discretization grid size N.
    #[arg(long, default_value_t = DEFAULT_GRID_N)]
    grid: usize,
    /// Simulation seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output table file (JSON).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment plan file (TOML).
    #[arg(long)]
    plan: PathBuf,
    /// Output CSV file.
    #[arg(long)]
    output: PathBuf,
    /// Optional JSON summary with plan echo and provenance.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct CurvesArgs {
    /// Experiment plan file (TOML); its limits must ascend strictly.
    #[arg(long)]
    plan: PathBuf,
    /// Output CSV file.
    #[arg(long)]
    output: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Errors only if a global pool already exists, which is fine.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_ERROR
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Monitor(args) => cmd_monitor(args),
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Curves(args) => cmd_curves(args),
    }
}

fn parse_mode(text: &str) -> Result<HorizonMode> {
    match text {
        "finite" => Ok(HorizonMode::Finite),
        "infinite" => Ok(HorizonMode::Infinite),
        other => Err(Error::InvalidConfig(format!(
            "mode must be finite or infinite, got {other:?}"
        ))),
    }
}

fn resolve_control_limit(args: &MonitorArgs, config: &DetectorConfig) -> Result<f64> {
    match (args.climit, &args.table, args.alpha) {
        (Some(c), table, alpha) => {
            if table.is_some() || alpha.is_some() {
                eprintln!("note: --climit overrides --table/--alpha");
            }
            Ok(c)
        }
        (None, Some(table_path), Some(alpha)) => {
            let table = CalibrationTable::load(table_path)?;
            table.check_compatible(config)?;
            table.control_limit_for(alpha)
        }
        (None, Some(_), None) => Err(Error::InvalidConfig(
            "--table needs --alpha to pick the control limit".into(),
        )),
        (None, None, Some(_)) => Err(Error::InvalidConfig(
            "--alpha needs --table to look the control limit up".into(),
        )),
        (None, None, None) => Err(Error::InvalidConfig(
            "give a control limit: --climit, or --table with --alpha".into(),
        )),
    }
}

fn emit_path(target: &Path, result: &StoppingResult) -> Result<()> {
    let mut rows = String::from("t,statistic\n");
    for (t, u) in &result.path {
        rows.push_str(&format!("{t},{u}\n"));
    }
    if target == Path::new("-") {
        print!("{rows}");
    } else {
        std::fs::write(target, rows)?;
    }
    Ok(())
}

fn cmd_monitor(args: MonitorArgs) -> Result<i32> {
    let mode = parse_mode(&args.mode)?;
    let mut config = args.detector.resolve(mode)?;
    config.control_limit = resolve_control_limit(&args, &config)?;
    config.validate()?;

    let observations = match &args.input {
        Some(path) if path != Path::new("-") => read_series_path(path)?,
        _ => read_series(std::io::stdin().lock())?,
    };
    let count = observations.len();
    let result = run_monitor(observations, &config)?;

    if let Some(target) = &args.emit_path {
        emit_path(target, &result)?;
    }
    match result.stop_time {
        Some(t) => {
            println!("signal: yes");
            println!("stop-time: {t}");
            Ok(EXIT_SIGNAL)
        }
        None => {
            println!("signal: no");
            println!("observations: {count}");
            Ok(0)
        }
    }
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<i32> {
    let kernel = Kernel::from_str(&args.kernel)?;
    let grid = GridSpec::new(args.grid, args.kappa, args.gamma)?;
    let table = calibrate(
        &kernel,
        args.zeta,
        &grid,
        args.order,
        &args.alphas,
        args.paths,
        args.seed,
    )?;
    table.save(&args.output)?;
    for entry in &table.entries {
        println!("alpha {}: control-limit {}", entry.alpha, entry.control_limit);
    }
    if table.degenerate_paths > 0 {
        eprintln!(
            "note: {} of {} paths were degenerate and excluded",
            table.degenerate_paths, table.num_paths
        );
    }
    Ok(0)
}

fn run_plan_with_progress(plan: &ExperimentPlan) -> Result<Vec<MCResult>> {
    plan.validate()?;
    let mut results = Vec::with_capacity(plan.scenarios.len() * plan.control_limits.len());
    for idx in 0..plan.scenarios.len() {
        results.extend(run_scenario_cells(plan, idx)?);
        eprintln!(
            "scenario {}: {} reps done ({}/{})",
            plan.scenarios[idx].id,
            plan.reps,
            idx + 1,
            plan.scenarios.len()
        );
    }
    Ok(results)
}

fn load_plan(path: &Path) -> Result<(ExperimentPlan, String)> {
    let (file, text) = PlanFile::load(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    Ok((file.resolve(base)?, text))
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let (plan, text) = load_plan(&args.plan)?;
    let results = run_plan_with_progress(&plan)?;
    let out = std::fs::File::create(&args.output)?;
    write_results_csv(std::io::BufWriter::new(out), &results)?;
    if let Some(summary_path) = &args.summary {
        let file = std::fs::File::create(summary_path)?;
        let mut writer = std::io::BufWriter::new(file);
        write_summary(&mut writer, &text, &plan, &results)?;
        writer.flush()?;
    }
    Ok(0)
}

fn cmd_curves(args: CurvesArgs) -> Result<i32> {
    let (plan, _) = load_plan(&args.plan)?;
    if plan.control_limits.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "curves needs a strictly ascending control-limit grid".into(),
        ));
    }
    let results = run_plan_with_progress(&plan)?;
    let out = std::fs::File::create(&args.output)?;
    write_results_csv(std::io::BufWriter::new(out), &results)?;
    Ok(0)
}
