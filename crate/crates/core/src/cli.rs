//! Command-line front end of the `vdp` binary.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::io::{arnold_table, density_table, records_table, tomogram_table, wigner_table, Format};
use crate::liouvillian::{auto_dim, build_element_form, SystemParams};
use crate::metrics::{all_metrics, MetricsOptions, DEFAULT_REGIME_TOL};
use crate::steady::solve_steady_state;
use crate::sweep::{arnold_maps, plan, run, Axis, DimPolicy, Metric, SweepConfig, SweepMode, SweepRecord};
use crate::tomography::{required_extent, tomogram, wigner, PhaseSpaceGrid, QuadratureGrid, DEFAULT_N_THETA};
use crate::validate;

pub const THREADS_ENV: &str = "VDP_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vdp", version, about = "Driven quantum van der Pol oscillator: steady states, tomograms, synchronization maps")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady-state density matrix as (m, n, re, im) rows.
    #[command(allow_negative_numbers = true)]
    Steady(SteadyArgs),
    /// Homodyne tomogram as (theta, X, omega) rows.
    #[command(allow_negative_numbers = true)]
    Tomogram(TomogramArgs),
    /// Wigner function as (x, p, W) rows.
    #[command(allow_negative_numbers = true)]
    Wigner(WignerArgs),
    /// Synchronization metrics of one steady state.
    #[command(allow_negative_numbers = true)]
    Metrics(MetricsArgs),
    /// Parameter sweep from a config file, a preset or axis flags.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Run the reference checks and print a pass/fail table.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Drive strength F.
    #[arg(short = 'F', long = "drive")]
    pub drive: Option<f64>,
    /// Detuning Delta.
    #[arg(short = 'D', long = "detuning")]
    pub detuning: Option<f64>,
    /// Nonlinear (two-photon) damping.
    #[arg(long)]
    pub kappa2: Option<f64>,
    /// Linear gain; all rates are in these units.
    #[arg(long, default_value_t = 1.0)]
    pub kappa1: f64,
    /// Fock cutoff (required when kappa2 < 0.1).
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted or `-`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Args)]
pub struct SteadyArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PanelPreset {
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
    Fig3e,
    Fig3f,
}

impl PanelPreset {
    /// `(Delta, F, kappa2, dim)`.
    fn params(self) -> (f64, f64, f64, usize) {
        let f = match self {
            PanelPreset::Fig3a | PanelPreset::Fig3d => 0.0,
            PanelPreset::Fig3b | PanelPreset::Fig3e => 1.0,
            PanelPreset::Fig3c | PanelPreset::Fig3f => 10.0,
        };
        (2.0, f, 1e3, 12)
    }
}

#[derive(Debug, Clone, Args)]
pub struct TomogramArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Panel parameters (Delta = 2, kappa2 = 1e3, dim 12); flags override.
    #[arg(long, value_enum)]
    pub preset: Option<PanelPreset>,
    /// Quadrature range `min,max`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    pub x_range: Option<(f64, f64)>,
    #[arg(long, default_value_t = 201)]
    pub nx: usize,
    #[arg(long, default_value_t = 64)]
    pub ntheta: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct WignerArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, value_enum)]
    pub preset: Option<PanelPreset>,
    /// Range `min,max` used for both x and p.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    pub x_range: Option<(f64, f64)>,
    /// Points per axis.
    #[arg(long, default_value_t = 201)]
    pub nx: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Angles used for the nonclassical area.
    #[arg(long, default_value_t = DEFAULT_N_THETA)]
    pub ntheta: usize,
    #[arg(long, default_value_t = DEFAULT_REGIME_TOL)]
    pub regime_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepPreset {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig2a,
    Fig2b,
    Fig2c,
    Fig4,
    Fig5,
    Fig6b,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Numeric,
    Analytic,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// JSON sweep configuration.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<SweepPreset>,
    /// Drive axis: `a,b,c` or `start:stop:num`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_axis)]
    pub drive_values: Option<Axis>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_axis)]
    pub detuning_values: Option<Axis>,
    /// `a,b,c`; `inf` selects the analytic limit.
    #[arg(long, value_delimiter = ',', value_parser = parse_kappa2)]
    pub kappa2_values: Option<Vec<f64>>,
    #[arg(long)]
    pub kappa1: Option<f64>,
    /// Fixed Fock cutoff for every point.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub ntheta: Option<usize>,
    /// Metrics written as maps next to the records.
    #[arg(long, value_delimiter = ',', value_parser = parse_metric)]
    pub metrics: Option<Vec<Metric>>,
    /// Resumable record log (default: next to `--out`).
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Only these check numbers, e.g. `1,3,12`.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<u32>>,
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `min,max`, got {s:?}"))?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if !(lo < hi) {
        return Err(format!("empty range {lo},{hi}"));
    }
    Ok((lo, hi))
}

fn parse_axis(s: &str) -> std::result::Result<Axis, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, n] => Ok(Axis::linspace(
            num(start)?,
            num(stop)?,
            n.trim().parse().map_err(|e| format!("{n:?}: {e}"))?,
        )),
        [_] => s.split(',').map(num).collect::<std::result::Result<_, _>>().map(Axis::Values),
        _ => Err(format!("expected `a,b,c` or `start:stop:num`, got {s:?}")),
    }
}

fn parse_kappa2(s: &str) -> std::result::Result<f64, String> {
    match s.trim() {
        "inf" => Ok(f64::INFINITY),
        t => t.parse().map_err(|e| format!("{t:?}: {e}")),
    }
}

fn parse_metric(s: &str) -> std::result::Result<Metric, String> {
    Metric::parse(s.trim()).map_err(|e| e.to_string())
}

fn usage(msg: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(ErrorKind::MissingRequiredArgument, msg)
}

fn point_params(p: &PointArgs, preset: Option<PanelPreset>) -> std::result::Result<SystemParams, RunError> {
    let defaults = preset.map(PanelPreset::params);
    let detuning = p.detuning.or(defaults.map(|d| d.0)).unwrap_or(0.0);
    let drive = p.drive.or(defaults.map(|d| d.1)).unwrap_or(0.0);
    let kappa2 = p
        .kappa2
        .or(defaults.map(|d| d.2))
        .ok_or_else(|| RunError::Usage(usage("the following required argument was not provided: --kappa2 <KAPPA2>")))?;
    let dim = match p.dim.or(defaults.map(|d| d.3)) {
        Some(d) => d,
        None => auto_dim(drive, p.kappa1, kappa2)?,
    };
    Ok(SystemParams::with_dim(detuning, drive, p.kappa1, kappa2, dim)?)
}

pub fn preset_config(preset: SweepPreset) -> SweepConfig {
    let drive = Axis::linspace(0.0, 10.0, 51);
    let detuning = Axis::linspace(-5.0, 5.0, 51);
    let numeric = |k2: f64, dim: DimPolicy, metrics: Vec<Metric>| {
        let mut c = SweepConfig::new(drive.clone(), detuning.clone(), vec![k2], dim);
        c.metrics = metrics;
        c
    };
    let analytic = |metrics: Vec<Metric>| {
        let mut c = SweepConfig::new(drive.clone(), detuning.clone(), vec![f64::INFINITY], DimPolicy::Auto);
        c.mode = SweepMode::Analytic;
        c.metrics = metrics;
        c
    };
    match preset {
        SweepPreset::Fig1a => numeric(0.0, DimPolicy::Fixed(validate::CLASSICAL_DIM), vec![Metric::Delta]),
        SweepPreset::Fig1b => validate::fig1b_config().with_metrics(vec![Metric::Delta]),
        SweepPreset::Fig1c => {
            let k2: Vec<f64> = (0..=30).map(|i| 10f64.powf(i as f64 / 10.0)).collect();
            let mut c = SweepConfig::new(
                Axis::Values(vec![0.0, 1.0, 5.0, 10.0]),
                Axis::Values(vec![2.0]),
                k2,
                DimPolicy::Auto,
            );
            c.metrics = vec![Metric::Delta];
            c
        }
        SweepPreset::Fig2a => numeric(0.0, DimPolicy::Fixed(validate::CLASSICAL_DIM), vec![Metric::G2]),
        SweepPreset::Fig2b => numeric(1.0, DimPolicy::Auto, vec![Metric::G2]),
        SweepPreset::Fig2c => numeric(1e3, DimPolicy::Fixed(12), vec![Metric::G2]),
        SweepPreset::Fig4 => analytic(vec![Metric::Coherence]),
        SweepPreset::Fig5 => analytic(vec![Metric::Coherence, Metric::CoherenceGradient]),
        SweepPreset::Fig6b => analytic(vec![Metric::MeanN]),
    }
}

impl SweepConfig {
    fn with_metrics(mut self, metrics: Vec<Metric>) -> Self {
        self.metrics = metrics;
        self
    }
}

fn sweep_config(a: &SweepArgs) -> std::result::Result<SweepConfig, RunError> {
    let mut c = match (&a.config, a.preset) {
        (Some(path), _) => SweepConfig::load(path)?,
        (None, Some(p)) => preset_config(p),
        (None, None) => match (&a.drive_values, &a.detuning_values, &a.kappa2_values) {
            (Some(f), Some(d), Some(k)) => SweepConfig::new(
                f.clone(),
                d.clone(),
                k.clone(),
                a.dim.map_or(DimPolicy::Auto, DimPolicy::Fixed),
            ),
            _ => {
                return Err(RunError::Usage(usage(
                    "sweep needs --config, --preset, or all of --drive-values, --detuning-values, --kappa2-values",
                )))
            }
        },
    };
    if let Some(v) = &a.drive_values {
        c.drive_values = v.clone();
    }
    if let Some(v) = &a.detuning_values {
        c.detuning_values = v.clone();
    }
    if let Some(v) = &a.kappa2_values {
        c.kappa2_values = v.clone();
    }
    if let Some(k) = a.kappa1 {
        c.kappa1 = k;
    }
    if let Some(d) = a.dim {
        c.dim_policy = DimPolicy::Fixed(d);
    }
    if let Some(m) = a.mode {
        c.mode = match m {
            ModeArg::Numeric => SweepMode::Numeric,
            ModeArg::Analytic => SweepMode::Analytic,
        };
    }
    if let Some(n) = a.ntheta {
        c.n_theta = n;
    }
    if let Some(m) = &a.metrics {
        c.metrics = m.clone();
    }
    if let Some(out) = &a.output.out {
        c.output_path = Some(out.clone());
    }
    Ok(c)
}

/// Fully resolved invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub threads: usize,
    pub task: Task,
}

#[derive(Debug, Clone)]
pub enum Task {
    Steady {
        params: SystemParams,
        format: Format,
        out: Option<PathBuf>,
    },
    Tomogram {
        params: SystemParams,
        grid: Option<QuadratureGrid>,
        nx: usize,
        ntheta: usize,
        format: Format,
        out: Option<PathBuf>,
    },
    Wigner {
        params: SystemParams,
        range: Option<(f64, f64)>,
        nx: usize,
        format: Format,
        out: Option<PathBuf>,
    },
    Metrics {
        params: SystemParams,
        options: MetricsOptions,
        format: Format,
        out: Option<PathBuf>,
    },
    Sweep {
        config: SweepConfig,
        log: Option<PathBuf>,
        format: Format,
        out: Option<PathBuf>,
    },
    Validate {
        only: Option<Vec<u32>>,
    },
}

#[derive(Debug)]
pub enum RunError {
    Usage(clap::Error),
    Failure(Error),
    ChecksFailed { failed: usize, total: usize },
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::InvalidDimension { .. }
            | Error::CutoffRequired(_)
            | Error::Config(_)
            | Error::Json(_) => RunError::Usage(Cli::command().error(ErrorKind::ValueValidation, e.to_string())),
            other => RunError::Failure(other),
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(e) if !e.use_stderr() => EXIT_OK,
            RunError::Usage(_) => EXIT_USAGE,
            RunError::Failure(_) | RunError::ChecksFailed { .. } => EXIT_FAILURE,
        }
    }
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, RunError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(RunError::Usage)?;
    let threads = match cli.threads {
        Some(0) => return Err(RunError::Usage(Cli::command().error(ErrorKind::ValueValidation, "--threads must be at least 1"))),
        Some(n) => n,
        None => default_threads(),
    };
    let task = match cli.command {
        Command::Steady(a) => Task::Steady {
            params: point_params(&a.point, None)?,
            format: a.output.format.into(),
            out: a.output.out,
        },
        Command::Tomogram(a) => Task::Tomogram {
            params: point_params(&a.point, a.preset)?,
            grid: a
                .x_range
                .map(|(lo, hi)| QuadratureGrid::new(lo, hi, a.nx, a.ntheta))
                .transpose()?,
            nx: a.nx,
            ntheta: a.ntheta,
            format: a.output.format.into(),
            out: a.output.out,
        },
        Command::Wigner(a) => Task::Wigner {
            params: point_params(&a.point, a.preset)?,
            range: a.x_range,
            nx: a.nx,
            format: a.output.format.into(),
            out: a.output.out,
        },
        Command::Metrics(a) => Task::Metrics {
            params: point_params(&a.point, None)?,
            options: MetricsOptions {
                n_theta: a.ntheta,
                regime_tol: a.regime_tol,
            },
            format: a.output.format.into(),
            out: a.output.out,
        },
        Command::Sweep(a) => {
            let config = sweep_config(&a)?;
            plan(&config)?;
            let log = a.log.clone().or_else(|| {
                a.output
                    .out
                    .as_ref()
                    .filter(|p| p.as_os_str() != "-")
                    .map(|p| sibling(p, "log", "jsonl"))
            });
            Task::Sweep {
                config,
                log,
                format: a.output.format.into(),
                out: a.output.out,
            }
        }
        Command::Validate(a) => Task::Validate { only: a.only },
    };
    Ok(RunConfig { threads, task })
}

/// `dir/stem.<tag>.<ext>` next to `path`.
fn sibling(path: &Path, tag: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn solve(params: &SystemParams) -> Result<crate::steady::SteadyStateSolution> {
    let sol = solve_steady_state(&build_element_form(params))?;
    eprintln!(
        "steady state: dim {} residual {:.3e} method {:?}{}",
        params.dim,
        sol.residual,
        sol.method,
        if params.cutoff_dependent() { " (cutoff-dependent)" } else { "" }
    );
    Ok(sol)
}

fn tomogram_grid(rho: &crate::fock::DensityMatrix, nx: usize, ntheta: usize) -> Result<QuadratureGrid> {
    // wide enough for the occupied levels to decay below the normalization tolerance
    let support = rho.populations().iter().rposition(|&p| p > 1e-10).unwrap_or(0) as f64;
    let half = (4.0 + (2.0 * support + 1.0).sqrt()).max(6.0).ceil();
    QuadratureGrid::new(-half, half, nx, ntheta)
}

fn write_sweep_outputs(config: &SweepConfig, records: &[SweepRecord], format: Format, out: Option<&Path>) -> Result<()> {
    records_table(records).emit(format, out)?;
    let Some(out) = out.filter(|p| p.as_os_str() != "-") else {
        return Ok(());
    };
    let ext = extension(format);
    for &metric in &config.metrics {
        let maps = arnold_maps(records, metric)?;
        let multi = maps.len() > 1;
        for (i, map) in maps.iter().enumerate() {
            let tag = if multi {
                format!("{}.k2-{i}", metric.name())
            } else {
                metric.name().to_string()
            };
            arnold_table(map).emit(format, Some(&sibling(out, &tag, ext)))?;
        }
    }
    let meta = serde_json::json!({
        "config": config,
        "config_hash": config.hash(),
        "tasks": records.len(),
        "failed": records.iter().filter(|r| r.failure.is_some()).count(),
        "columns": crate::io::RECORD_COLUMNS,
    });
    let path = sibling(out, "meta", "json");
    std::fs::write(&path, serde_json::to_string_pretty(&meta)? + "\n").map_err(|e| Error::io(&path, e))
}

pub fn execute(config: RunConfig) -> std::result::Result<(), RunError> {
    // ignore a second initialization (tests call this repeatedly)
    let _ = rayon::ThreadPoolBuilder::new().num_threads(config.threads).build_global();
    match config.task {
        Task::Steady { params, format, out } => {
            let sol = solve(&params)?;
            density_table(&sol.rho).emit(format, out.as_deref())?;
        }
        Task::Tomogram {
            params,
            grid,
            nx,
            ntheta,
            format,
            out,
        } => {
            let sol = solve(&params)?;
            let grid = match grid {
                Some(g) => g,
                None => tomogram_grid(&sol.rho, nx, ntheta)?,
            };
            tomogram_table(&tomogram(&sol.rho, &grid)?).emit(format, out.as_deref())?;
        }
        Task::Wigner {
            params,
            range,
            nx,
            format,
            out,
        } => {
            let sol = solve(&params)?;
            let grid = match range {
                Some((lo, hi)) => PhaseSpaceGrid {
                    x_min: lo,
                    x_max: hi,
                    n_x: nx,
                    p_min: lo,
                    p_max: hi,
                    n_p: nx,
                },
                None => PhaseSpaceGrid::square(required_extent(&sol.rho).max(5.0).ceil(), nx),
            };
            wigner_table(&wigner(&sol.rho, &grid)?).emit(format, out.as_deref())?;
        }
        Task::Metrics {
            params,
            options,
            format,
            out,
        } => {
            let sol = solve(&params)?;
            let record = SweepRecord {
                index: 0,
                drive: params.drive,
                detuning: params.detuning,
                kappa1: params.kappa1,
                kappa2: params.kappa2,
                dim_used: params.dim,
                cutoff_flag: params.cutoff_dependent(),
                metrics: Some(all_metrics(&sol.rho, &options)?),
                coherence_gradient: None,
                within_ansatz_range: None,
                solver_residual: Some(sol.residual),
                converged: true,
                failure: None,
                wall_time_ms: 0,
            };
            records_table(&[record]).emit(format, out.as_deref())?;
        }
        Task::Sweep {
            config: sweep,
            log,
            format,
            out,
        } => {
            let p = plan(&sweep)?;
            eprintln!("sweep: {} points on {} threads", p.tasks.len(), config.threads);
            let records = run(&p, config.threads, log.as_deref())?;
            let failed: Vec<&SweepRecord> = records.iter().filter(|r| r.failure.is_some()).collect();
            for r in failed.iter().take(5) {
                eprintln!(
                    "point F={} Delta={} kappa2={} failed: {}",
                    r.drive,
                    r.detuning,
                    r.kappa2,
                    r.failure.as_deref().unwrap_or("")
                );
            }
            if !failed.is_empty() {
                eprintln!("sweep: {} of {} points failed", failed.len(), records.len());
            }
            write_sweep_outputs(&sweep, &records, format, out.as_deref())?;
        }
        Task::Validate { only } => {
            let ids: Vec<u32> = match only {
                Some(ids) => ids,
                None => validate::CHECKS.iter().map(|c| c.0).collect(),
            };
            let total = ids.len();
            let mut failed = 0;
            for id in ids {
                let report = validate::run_check(id).ok_or_else(|| {
                    RunError::Usage(Cli::command().error(ErrorKind::ValueValidation, format!("no check numbered {id}")))
                })?;
                println!("{report}");
                failed += usize::from(!report.passed());
            }
            if failed > 0 {
                return Err(RunError::ChecksFailed { failed, total });
            }
        }
    }
    Ok(())
}

/// Parse, run and report; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_args(argv).and_then(execute);
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            match &e {
                RunError::Usage(err) => {
                    let _ = err.print();
                }
                RunError::Failure(err) => eprintln!("error: {err}"),
                RunError::ChecksFailed { failed, total } => eprintln!("{failed} of {total} checks failed"),
            }
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<RunConfig, RunError> {
        parse_args(std::iter::once("vdp").chain(args.iter().copied()))
    }

    #[test]
    fn steady_flags() {
        let c = parse(&["steady", "-F", "1", "-D", "-2", "--kappa2", "1000"]).unwrap();
        match c.task {
            Task::Steady { params, format, out } => {
                assert_eq!((params.drive, params.detuning, params.kappa2, params.kappa1), (1.0, -2.0, 1e3, 1.0));
                assert_eq!(params.dim, 12);
                assert_eq!(format, Format::Csv);
                assert!(out.is_none());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn usage_errors_exit_2() {
        for args in [
            &["steady", "-F", "abc", "--kappa2", "1"][..],
            &["steady", "-F", "1"],
            &["steady", "--kappa2", "1", "--bogus"],
            &["steady", "--kappa2", "0"],
            &["steady", "--kappa2", "1", "--kappa1", "-1"],
            &["sweep"],
            &["frobnicate"],
        ] {
            let err = parse(args).unwrap_err();
            assert_eq!(err.exit_code(), EXIT_USAGE, "{args:?}");
        }
        assert_eq!(parse(&["--help"]).unwrap_err().exit_code(), EXIT_OK);
    }

    #[test]
    fn axis_and_range_parsing() {
        assert_eq!(parse_axis("0:10:11").unwrap().values().len(), 11);
        assert_eq!(parse_axis("-1,0,2.5").unwrap(), Axis::Values(vec![-1.0, 0.0, 2.5]));
        assert!(parse_axis("1:2").is_err());
        assert_eq!(parse_range("-6,6").unwrap(), (-6.0, 6.0));
        assert!(parse_range("6,-6").is_err());
        assert_eq!(parse_kappa2("inf").unwrap(), f64::INFINITY);
    }

    #[test]
    fn sweep_flags_override_presets() {
        let c = parse(&["sweep", "--preset", "fig1b", "--drive-values", "0,5", "--threads", "3"]).unwrap();
        assert_eq!(c.threads, 3);
        match c.task {
            Task::Sweep { config, log, .. } => {
                assert_eq!(config.drive_values, Axis::Values(vec![0.0, 5.0]));
                assert_eq!(config.detuning_values.values().len(), 51);
                assert_eq!(config.kappa2_values, vec![1e3]);
                assert_eq!(config.dim_policy, DimPolicy::Fixed(12));
                assert!(log.is_none());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn every_preset_plans() {
        for p in SweepPreset::value_variants() {
            let c = preset_config(*p);
            assert!(plan(&c).is_ok(), "{p:?}");
        }
        assert_eq!(plan(&preset_config(SweepPreset::Fig1b)).unwrap().tasks.len(), 2601);
    }

    #[test]
    fn panel_presets() {
        let c = parse(&["wigner", "--preset", "fig3f"]).unwrap();
        match c.task {
            Task::Wigner { params, .. } => assert_eq!((params.detuning, params.drive, params.kappa2, params.dim), (2.0, 10.0, 1e3, 12)),
            other => panic!("{other:?}"),
        }
        let c = parse(&["tomogram", "--preset", "fig3b", "-F", "3", "--x-range", "-7,7"]).unwrap();
        match c.task {
            Task::Tomogram { params, grid, .. } => {
                assert_eq!(params.drive, 3.0);
                assert_eq!(grid.unwrap().x_min, -7.0);
            }
            other => panic!("{other:?}"),
        }
    }
}
