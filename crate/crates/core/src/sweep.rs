//! Parameter sweeps over `(F, Delta, kappa2)` with a resumable record log.
//!
//! Every grid point is solved independently. Records are appended to a JSON
//! Lines log as they finish; a re-run with the same configuration skips the
//! indices already present.

use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::analytic::{analytic_steady_state, coherence_gradient, DeepQuantumParams};
use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::liouvillian::{auto_dim, build_element_form, SystemParams};
use crate::metrics::{all_metrics, MetricsOptions, MetricsRecord, DEFAULT_REGIME_TOL};
use crate::steady::{solve_steady_state, FALLBACK_RESIDUAL};
use crate::tomography::DEFAULT_N_THETA;

pub const CONFIG_VERSION: u32 = 1;
pub const LOG_SCHEMA: &str = "vdp-sweep-log";
pub const LOG_VERSION: u32 = 1;
/// Successive relative change below which a cutoff scan counts as converged.
pub const CONVERGENCE_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimPolicy {
    Auto,
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Full master-equation steady state.
    Numeric,
    /// Three-level closed form; `kappa2 = "inf"` selects the limit.
    Analytic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Delta,
    G2,
    Coherence,
    MeanN,
    Purity,
    CoherenceGradient,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Delta,
        Metric::G2,
        Metric::Coherence,
        Metric::MeanN,
        Metric::Purity,
        Metric::CoherenceGradient,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Delta => "delta",
            Metric::G2 => "g2",
            Metric::Coherence => "coherence",
            Metric::MeanN => "mean_n",
            Metric::Purity => "purity",
            Metric::CoherenceGradient => "coherence_gradient",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown metric {s:?}")))
    }

    pub fn value(&self, record: &SweepRecord) -> Option<f64> {
        if *self == Metric::CoherenceGradient {
            return record.coherence_gradient;
        }
        let m = record.metrics.as_ref()?;
        match self {
            Metric::Delta => Some(m.delta),
            Metric::G2 => m.g2,
            Metric::Coherence => Some(m.coherence_01),
            Metric::MeanN => Some(m.mean_n),
            Metric::Purity => Some(m.purity),
            Metric::CoherenceGradient => unreachable!(),
        }
    }
}

/// A list of values or an inclusive `linspace`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Values(Vec<f64>),
    Linspace { start: f64, stop: f64, num: usize },
}

impl Axis {
    pub fn linspace(start: f64, stop: f64, num: usize) -> Self {
        Axis::Linspace { start, stop, num }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Values(v) => v.clone(),
            Axis::Linspace { start, stop, num } => match num {
                0 => vec![],
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }
}

/// `kappa2` values; `f64::INFINITY` is written as the string `"inf"`.
mod kappa2_axis {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Value(f64),
        Text(String),
    }

    fn to_entry(v: f64) -> Entry {
        if v == f64::INFINITY {
            Entry::Text("inf".into())
        } else {
            Entry::Value(v)
        }
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(|&x| to_entry(x)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
        Vec::<Entry>::deserialize(d)?
            .into_iter()
            .map(|e| match e {
                Entry::Value(x) => Ok(x),
                Entry::Text(t) if t == "inf" => Ok(f64::INFINITY),
                Entry::Text(t) => Err(serde::de::Error::custom(format!("bad kappa2 value {t:?}"))),
            })
            .collect()
    }
}

fn default_kappa1() -> f64 {
    1.0
}

fn default_n_theta() -> usize {
    DEFAULT_N_THETA
}

fn default_regime_tol() -> f64 {
    DEFAULT_REGIME_TOL
}

fn default_metrics() -> Vec<Metric> {
    vec![Metric::Delta, Metric::G2, Metric::Coherence, Metric::MeanN]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub version: u32,
    pub drive_values: Axis,
    pub detuning_values: Axis,
    #[serde(with = "kappa2_axis")]
    pub kappa2_values: Vec<f64>,
    #[serde(default = "default_kappa1")]
    pub kappa1: f64,
    pub dim_policy: DimPolicy,
    #[serde(default = "default_mode")]
    pub mode: SweepMode,
    /// Metrics written out as maps; records always carry every metric.
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    #[serde(default = "default_regime_tol")]
    pub regime_tol: f64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

fn default_mode() -> SweepMode {
    SweepMode::Numeric
}

impl SweepConfig {
    pub fn new(drive: Axis, detuning: Axis, kappa2: Vec<f64>, dim_policy: DimPolicy) -> Self {
        Self {
            version: CONFIG_VERSION,
            drive_values: drive,
            detuning_values: detuning,
            kappa2_values: kappa2,
            kappa1: 1.0,
            dim_policy,
            mode: SweepMode::Numeric,
            metrics: default_metrics(),
            n_theta: DEFAULT_N_THETA,
            regime_tol: DEFAULT_REGIME_TOL,
            output_path: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("version").and_then(|v| v.as_u64()) {
            Some(v) if v == CONFIG_VERSION as u64 => {}
            Some(v) => return Err(Error::Config(format!("unsupported sweep config version {v}"))),
            None => return Err(Error::Config("sweep config has no version".into())),
        }
        serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON of everything that affects results.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_path = None;
        c.metrics.clear();
        let digest = Sha256::digest(serde_json::to_vec(&c).expect("config serializes"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!("unsupported sweep config version {}", self.version)));
        }
        for (name, axis) in [
            ("drive_values", self.drive_values.values()),
            ("detuning_values", self.detuning_values.values()),
            ("kappa2_values", self.kappa2_values.clone()),
        ] {
            if axis.is_empty() {
                return Err(Error::Config(format!("{name} is empty")));
            }
        }
        if let DimPolicy::Fixed(d) = self.dim_policy {
            if d < 3 {
                return Err(Error::Config(format!("fixed dim {d} is below 3")));
            }
        }
        if self.n_theta < crate::tomography::MIN_N_THETA {
            return Err(Error::Config(format!("n_theta {} is below 16", self.n_theta)));
        }
        if self.mode == SweepMode::Numeric && self.kappa2_values.iter().any(|k| k.is_infinite()) {
            return Err(Error::Config("kappa2 = inf needs analytic mode".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTask {
    pub index: usize,
    pub drive: f64,
    pub detuning: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub dim: usize,
    pub cutoff_flag: bool,
}

#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub config: SweepConfig,
    pub config_hash: String,
    pub tasks: Vec<SweepTask>,
}

/// Cartesian product ordered `kappa2` outer, `Delta` middle, `F` inner.
pub fn plan(config: &SweepConfig) -> Result<SweepPlan> {
    config.validate()?;
    let (drives, detunings) = (config.drive_values.values(), config.detuning_values.values());
    let mut tasks = Vec::with_capacity(drives.len() * detunings.len() * config.kappa2_values.len());
    for &k2 in &config.kappa2_values {
        for &delta in &detunings {
            for &f in &drives {
                let dim = match (config.mode, config.dim_policy) {
                    (SweepMode::Analytic, _) => 3,
                    (_, DimPolicy::Fixed(d)) => d,
                    (_, DimPolicy::Auto) => auto_dim(f, config.kappa1, k2).map_err(|e| {
                        Error::Config(format!("{e}; use a fixed dim policy for this grid"))
                    })?,
                };
                tasks.push(SweepTask {
                    index: tasks.len(),
                    drive: f,
                    detuning: delta,
                    kappa1: config.kappa1,
                    kappa2: k2,
                    dim,
                    cutoff_flag: config.mode == SweepMode::Numeric
                        && k2 / config.kappa1 < crate::liouvillian::CUTOFF_KAPPA2_THRESHOLD,
                });
            }
        }
    }
    Ok(SweepPlan {
        config: config.clone(),
        config_hash: config.hash(),
        tasks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub index: usize,
    pub drive: f64,
    pub detuning: f64,
    pub kappa1: f64,
    #[serde(with = "kappa2_scalar")]
    pub kappa2: f64,
    pub dim_used: usize,
    pub cutoff_flag: bool,
    pub metrics: Option<MetricsRecord>,
    /// Closed-form slope of the coherence (analytic mode only).
    pub coherence_gradient: Option<f64>,
    /// Analytic mode: false for drives beyond the ansatz range.
    pub within_ansatz_range: Option<bool>,
    pub solver_residual: Option<f64>,
    pub converged: bool,
    pub failure: Option<String>,
    pub wall_time_ms: u64,
}

mod kappa2_scalar {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        super::kappa2_axis::serialize(std::slice::from_ref(v), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        super::kappa2_axis::deserialize(d)?
            .pop()
            .ok_or_else(|| serde::de::Error::custom("empty kappa2"))
    }
}

struct Outcome {
    metrics: MetricsRecord,
    residual: Option<f64>,
    gradient: Option<f64>,
    within_range: Option<bool>,
}

fn compute(task: &SweepTask, config: &SweepConfig) -> Result<Outcome> {
    let options = MetricsOptions {
        n_theta: config.n_theta,
        regime_tol: config.regime_tol,
    };
    match config.mode {
        SweepMode::Numeric => {
            let params = SystemParams::with_dim(task.detuning, task.drive, task.kappa1, task.kappa2, task.dim)?;
            let sol = solve_steady_state(&build_element_form(&params))?;
            Ok(Outcome {
                metrics: all_metrics(&sol.rho, &options)?,
                residual: Some(sol.residual),
                gradient: None,
                within_range: None,
            })
        }
        SweepMode::Analytic => {
            let dq = if task.kappa2.is_infinite() {
                DeepQuantumParams::limit(task.detuning, task.drive, task.kappa1)
            } else {
                DeepQuantumParams::finite(task.detuning, task.drive, task.kappa1, task.kappa2)
            };
            let state = analytic_steady_state(&dq)?;
            let rho = state.to_density(FockSpace::new(3)?)?;
            Ok(Outcome {
                metrics: all_metrics(&rho, &options)?,
                residual: None,
                gradient: Some(coherence_gradient(task.drive, task.detuning, task.kappa1)),
                within_range: Some(state.within_ansatz_range),
            })
        }
    }
}

fn run_task(task: &SweepTask, config: &SweepConfig) -> SweepRecord {
    let start = Instant::now();
    let outcome = compute(task, config);
    let wall_time_ms = start.elapsed().as_millis() as u64;
    let base = SweepRecord {
        index: task.index,
        drive: task.drive,
        detuning: task.detuning,
        kappa1: task.kappa1,
        kappa2: task.kappa2,
        dim_used: task.dim,
        cutoff_flag: task.cutoff_flag,
        metrics: None,
        coherence_gradient: None,
        within_ansatz_range: None,
        solver_residual: None,
        converged: false,
        failure: None,
        wall_time_ms,
    };
    match outcome {
        Ok(o) => SweepRecord {
            metrics: Some(o.metrics),
            coherence_gradient: o.gradient,
            within_ansatz_range: o.within_range,
            converged: o.residual.is_none_or(|r| r <= FALLBACK_RESIDUAL),
            solver_residual: o.residual,
            ..base
        },
        Err(e) => {
            let residual = match e {
                Error::SolverFailure { residual } => Some(residual),
                _ => None,
            };
            SweepRecord {
                solver_residual: residual,
                failure: Some(e.to_string()),
                ..base
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct LogHeader {
    schema: String,
    version: u32,
    config_hash: String,
    tasks: usize,
}

/// Completed records of an existing log, after checking it belongs to `plan`.
fn read_log(path: &Path, plan: &SweepPlan) -> Result<Vec<SweepRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header: LogHeader = match lines.next() {
        Some(line) => serde_json::from_str(&line.map_err(|e| Error::io(path, e))?)?,
        None => return Ok(vec![]),
    };
    if header.schema != LOG_SCHEMA || header.version != LOG_VERSION {
        return Err(Error::Config(format!(
            "{} is not a version {LOG_VERSION} sweep log",
            path.display()
        )));
    }
    if header.config_hash != plan.config_hash {
        return Err(Error::Config(format!(
            "{} was written for a different sweep configuration",
            path.display()
        )));
    }
    let mut out = Vec::new();
    for line in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        // a torn final line from an interrupted run is simply redone
        match serde_json::from_str::<SweepRecord>(&line) {
            Ok(r) if r.index < plan.tasks.len() => out.push(r),
            _ => continue,
        }
    }
    Ok(out)
}

fn open_log(path: &Path, plan: &SweepPlan) -> Result<(Vec<SweepRecord>, File)> {
    let exists = path.metadata().map(|m| m.len() > 0).unwrap_or(false);
    let done = if exists { read_log(path, plan)? } else { vec![] };
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    if !exists {
        let header = LogHeader {
            schema: LOG_SCHEMA.into(),
            version: LOG_VERSION,
            config_hash: plan.config_hash.clone(),
            tasks: plan.tasks.len(),
        };
        writeln!(file, "{}", serde_json::to_string(&header)?).map_err(|e| Error::io(path, e))?;
    } else {
        // terminate a torn line so appended records start cleanly
        writeln!(file).map_err(|e| Error::io(path, e))?;
    }
    Ok((done, file))
}

/// Run every task of `plan` on `parallelism` threads, one record per task in
/// index order. With `log`, records are appended as they complete and a
/// re-run resumes from what the log already holds.
pub fn run(plan: &SweepPlan, parallelism: usize, log: Option<&Path>) -> Result<Vec<SweepRecord>> {
    if parallelism == 0 {
        return Err(Error::Config("parallelism must be at least 1".into()));
    }
    let (mut done, sink) = match log {
        Some(path) => {
            let (done, file) = open_log(path, plan)?;
            (done, Some(Mutex::new(file)))
        }
        None => (vec![], None),
    };
    let finished: HashSet<usize> = done.iter().map(|r| r.index).collect();
    let pending: Vec<&SweepTask> = plan.tasks.iter().filter(|t| !finished.contains(&t.index)).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let fresh: Vec<Result<SweepRecord>> = pool.install(|| {
        pending
            .par_iter()
            .map(|task| {
                let record = run_task(task, &plan.config);
                if let (Some(sink), Some(path)) = (&sink, log) {
                    let line = serde_json::to_string(&record)?;
                    let mut f = sink.lock().expect("log lock");
                    writeln!(f, "{line}").and_then(|_| f.flush()).map_err(|e| Error::io(path, e))?;
                }
                Ok(record)
            })
            .collect()
    });
    for r in fresh {
        done.push(r?);
    }
    let mut by_index: BTreeMap<usize, SweepRecord> = BTreeMap::new();
    for r in done {
        by_index.entry(r.index).or_insert(r);
    }
    Ok(by_index.into_values().collect())
}

/// Dense `Delta x F` map of one metric at a single `kappa2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArnoldMap {
    pub metric: Metric,
    pub kappa2: f64,
    /// Ascending row axis.
    pub detunings: Vec<f64>,
    /// Ascending column axis.
    pub drives: Vec<f64>,
    /// `values[row][col]`; `None` for failed points and undefined metrics.
    pub values: Vec<Vec<Option<f64>>>,
}

impl ArnoldMap {
    pub fn get(&self, detuning: f64, drive: f64) -> Option<f64> {
        let r = self.detunings.iter().position(|&d| d == detuning)?;
        let c = self.drives.iter().position(|&f| f == drive)?;
        self.values[r][c]
    }

    /// Largest `|M(Delta) - M(-Delta)|` over rows present with both signs.
    pub fn evenness_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (r, &d) in self.detunings.iter().enumerate() {
            let Some(mirror) = self.detunings.iter().position(|&e| e == -d) else {
                continue;
            };
            for c in 0..self.drives.len() {
                if let (Some(a), Some(b)) = (self.values[r][c], self.values[mirror][c]) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        worst
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn arnold_map(records: &[SweepRecord], metric: Metric) -> Result<ArnoldMap> {
    let first = records
        .first()
        .ok_or_else(|| Error::Config("no records to map".into()))?;
    if let Some(r) = records.iter().find(|r| r.kappa2 != first.kappa2) {
        return Err(Error::ShapeMismatch {
            expected: format!("single kappa2 = {}", first.kappa2),
            found: format!("kappa2 = {}", r.kappa2),
        });
    }
    let detunings = sorted_unique(records.iter().map(|r| r.detuning).collect());
    let drives = sorted_unique(records.iter().map(|r| r.drive).collect());
    let mut cells: Vec<Vec<Option<Option<f64>>>> = vec![vec![None; drives.len()]; detunings.len()];
    for r in records {
        let row = detunings.iter().position(|&d| d == r.detuning).expect("axis value");
        let col = drives.iter().position(|&f| f == r.drive).expect("axis value");
        cells[row][col].get_or_insert(metric.value(r));
    }
    let mut missing = Vec::new();
    for (row, &d) in detunings.iter().enumerate() {
        for (col, &f) in drives.iter().enumerate() {
            if cells[row][col].is_none() {
                missing.push((d, f));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::RaggedGrid(missing));
    }
    Ok(ArnoldMap {
        metric,
        kappa2: first.kappa2,
        detunings,
        drives,
        values: cells
            .into_iter()
            .map(|row| row.into_iter().map(|c| c.flatten()).collect())
            .collect(),
    })
}

/// Group records by `kappa2` (in first-seen order) and map each group.
pub fn arnold_maps(records: &[SweepRecord], metric: Metric) -> Result<Vec<ArnoldMap>> {
    let mut order: Vec<f64> = Vec::new();
    for r in records {
        if !order.contains(&r.kappa2) {
            order.push(r.kappa2);
        }
    }
    order
        .into_iter()
        .map(|k2| {
            let group: Vec<SweepRecord> = records.iter().filter(|r| r.kappa2 == k2).cloned().collect();
            arnold_map(&group, metric)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub metric: Metric,
    pub dims: Vec<usize>,
    pub values: Vec<f64>,
    /// `|v[k+1] - v[k]| / |v[k+1]|`.
    pub relative_changes: Vec<f64>,
    /// Every successive change below [`CONVERGENCE_TOL`].
    pub converged: bool,
}

impl ConvergenceReport {
    pub fn cutoff_dependent(&self) -> bool {
        !self.converged
    }
}

/// Recompute `metric` at each cutoff in `dims` (strictly ascending, at least two).
pub fn convergence_check(params: &SystemParams, metric: Metric, dims: &[usize]) -> Result<ConvergenceReport> {
    if dims.len() < 2 || dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!(
            "cutoff list must be strictly ascending with at least two entries, got {dims:?}"
        )));
    }
    if metric == Metric::CoherenceGradient {
        return Err(Error::InvalidParameter("coherence_gradient has no cutoff".into()));
    }
    let mut values = Vec::with_capacity(dims.len());
    for &d in dims {
        let p = params.with_cutoff(d);
        p.validate()?;
        let sol = solve_steady_state(&build_element_form(&p))?;
        let m = all_metrics(&sol.rho, &MetricsOptions::default())?;
        let rec = SweepRecord {
            index: 0,
            drive: p.drive,
            detuning: p.detuning,
            kappa1: p.kappa1,
            kappa2: p.kappa2,
            dim_used: d,
            cutoff_flag: p.cutoff_dependent(),
            metrics: Some(m),
            coherence_gradient: None,
            within_ansatz_range: None,
            solver_residual: Some(sol.residual),
            converged: true,
            failure: None,
            wall_time_ms: 0,
        };
        let v = metric
            .value(&rec)
            .ok_or_else(|| Error::Domain(format!("{} undefined at dim {d}", metric.name())))?;
        values.push(v);
    }
    let relative_changes: Vec<f64> = values
        .windows(2)
        .map(|w| (w[1] - w[0]).abs() / w[1].abs().max(f64::MIN_POSITIVE))
        .collect();
    let converged = relative_changes.iter().all(|&c| c < CONVERGENCE_TOL);
    Ok(ConvergenceReport {
        metric,
        dims: dims.to_vec(),
        values,
        relative_changes,
        converged,
    })
}
