//! Tabular output for records and maps.
//!
//! Everything is written as a flat table, CSV or a JSON array of objects.
//! CSV floats carry 17 significant digits; JSON floats use the shortest
//! representation that reads back to the same bits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::fock::DensityMatrix;
use crate::sweep::{ArnoldMap, SweepRecord};
use crate::tomography::{Tomogram, WignerMap};

pub const RECORD_COLUMNS: [&str; 13] = [
    "F",
    "Delta",
    "kappa1",
    "kappa2",
    "dim",
    "delta",
    "g2",
    "coherence",
    "mean_n",
    "purity",
    "residual",
    "cutoff_flag",
    "regime",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParameter(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// 17 significant digits; non-finite values as `inf`, `-inf`, `nan`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(v) if v.is_finite() => Value::from(*v),
            Cell::Float(v) => Value::from(format_float(*v)),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::to_csv))?;
                }
                w.flush().map_err(csv::Error::from)?;
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .cloned()
                            .zip(row.iter().map(Cell::to_json))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut out = out;
                serde_json::to_writer_pretty(&mut out, &rows)?;
                out.write_all(b"\n").map_err(csv::Error::from)?;
            }
        }
        Ok(())
    }

    /// Write to `path`, or to standard output when `path` is `None` or `-`.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) if p != Path::new("-") => {
                let file = File::create(p).map_err(|e| Error::io(p, e))?;
                let mut w = BufWriter::new(file);
                self.write(format, &mut w).map_err(|e| rewrap(e, p))?;
                w.flush().map_err(|e| Error::io(p, e))
            }
            _ => {
                let stdout = std::io::stdout();
                self.write(format, stdout.lock())
            }
        }
    }
}

fn rewrap(e: Error, path: &Path) -> Error {
    match e {
        Error::Csv(c) if c.is_io_error() => match c.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        },
        other => other,
    }
}

pub fn records_table(records: &[SweepRecord]) -> Table {
    let mut t = Table::new(&RECORD_COLUMNS);
    for r in records {
        let m = r.metrics.as_ref();
        t.push(vec![
            r.drive.into(),
            r.detuning.into(),
            r.kappa1.into(),
            r.kappa2.into(),
            r.dim_used.into(),
            m.map(|m| m.delta).into(),
            m.and_then(|m| m.g2).into(),
            m.map(|m| m.coherence_01).into(),
            m.map(|m| m.mean_n).into(),
            m.map(|m| m.purity).into(),
            r.solver_residual.into(),
            r.cutoff_flag.into(),
            m.map_or(Cell::Empty, |m| Cell::Text(m.regime.to_string())),
        ]);
    }
    t
}

/// One CSV/JSON row of [`records_table`], as read back.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    #[serde(rename = "F")]
    pub drive: f64,
    #[serde(rename = "Delta")]
    pub detuning: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub dim: usize,
    pub delta: Option<f64>,
    pub g2: Option<f64>,
    pub coherence: Option<f64>,
    pub mean_n: Option<f64>,
    pub purity: Option<f64>,
    pub residual: Option<f64>,
    pub cutoff_flag: bool,
    pub regime: Option<String>,
}

pub fn read_records_csv(path: &Path) -> Result<Vec<RecordRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Long format `(theta, X, omega)`.
pub fn tomogram_table(t: &Tomogram) -> Table {
    let mut table = Table::new(&["theta", "X", "omega"]);
    let xs = t.grid.xs();
    for (ti, &theta) in t.grid.thetas().iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            table.push(vec![theta.into(), x.into(), t.get(ti, i).into()]);
        }
    }
    table
}

/// Long format `(x, p, W)`.
pub fn wigner_table(w: &WignerMap) -> Table {
    let mut table = Table::new(&["x", "p", "W"]);
    let ps = w.grid.ps();
    for (i, &x) in w.grid.xs().iter().enumerate() {
        for (j, &p) in ps.iter().enumerate() {
            table.push(vec![x.into(), p.into(), w.values[(i, j)].into()]);
        }
    }
    table
}

/// Long format `(Delta, F, <metric>)` with empty cells for missing values.
pub fn arnold_table(map: &ArnoldMap) -> Table {
    let mut table = Table::new(&["Delta", "F", map.metric.name()]);
    for (r, &d) in map.detunings.iter().enumerate() {
        for (c, &f) in map.drives.iter().enumerate() {
            table.push(vec![d.into(), f.into(), map.values[r][c].into()]);
        }
    }
    table
}

/// Long format `(m, n, re, im)` over every density-matrix entry.
pub fn density_table(rho: &DensityMatrix) -> Table {
    let mut table = Table::new(&["m", "n", "re", "im"]);
    for m in 0..rho.dim() {
        for n in 0..rho.dim() {
            let z = rho.get(m, n);
            table.push(vec![m.into(), n.into(), z.re.into(), z.im.into()]);
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{plan, run, Axis, DimPolicy, SweepConfig};
    use crate::tomography::{tomogram, QuadratureGrid};
    use crate::fock::FockSpace;

    fn records() -> Vec<SweepRecord> {
        let c = SweepConfig::new(
            Axis::Values(vec![0.0, 0.5, 1.0]),
            Axis::Values(vec![-1.0, 0.0, 1.0]),
            vec![1e3],
            DimPolicy::Fixed(8),
        );
        run(&plan(&c).unwrap(), 1, None).unwrap()
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0, f64::MAX] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn record_csv_round_trip() {
        let recs = records();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        records_table(&recs).emit(Format::Csv, Some(&path)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 10);
        assert_eq!(text.lines().next().unwrap(), RECORD_COLUMNS.join(","));
        let back = read_records_csv(&path).unwrap();
        for (r, row) in recs.iter().zip(&back) {
            let m = r.metrics.unwrap();
            assert_eq!(row.drive.to_bits(), r.drive.to_bits());
            assert_eq!(row.delta.unwrap().to_bits(), m.delta.to_bits());
            assert_eq!(row.g2.map(f64::to_bits), m.g2.map(f64::to_bits));
            assert_eq!(row.purity.unwrap().to_bits(), m.purity.to_bits());
            assert_eq!(row.residual.unwrap().to_bits(), r.solver_residual.unwrap().to_bits());
            assert_eq!(row.regime.as_deref(), Some(m.regime.as_str()));
        }
    }

    #[test]
    fn record_json_round_trip() {
        let recs = records();
        let mut buf = Vec::new();
        records_table(&recs).write(Format::Json, &mut buf).unwrap();
        let back: Vec<RecordRow> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back.len(), 9);
        for (r, row) in recs.iter().zip(&back) {
            assert_eq!(row.coherence.unwrap().to_bits(), r.metrics.unwrap().coherence_01.to_bits());
            assert_eq!(row.mean_n.unwrap().to_bits(), r.metrics.unwrap().mean_n.to_bits());
        }
        let obj: Vec<Map<String, Value>> = serde_json::from_slice(&buf).unwrap();
        let keys: Vec<&String> = obj[0].keys().collect();
        assert_eq!(keys.len(), RECORD_COLUMNS.len());
    }

    #[test]
    fn tomogram_long_format() {
        let rho = DensityMatrix::vacuum(FockSpace::new(3).unwrap());
        let grid = QuadratureGrid::new(-7.0, 7.0, 5, 4).unwrap();
        // too coarse to normalize; build the table directly
        let err = tomogram(&rho, &grid);
        assert!(err.is_err());
        let fine = QuadratureGrid::new(-7.0, 7.0, 141, 4).unwrap();
        let t = tomogram(&rho, &fine).unwrap();
        assert_eq!(tomogram_table(&t).rows.len(), 141 * 4);
        let small = Tomogram {
            grid,
            values: nalgebra::DMatrix::from_element(4, 5, 0.25),
        };
        let table = tomogram_table(&small);
        assert_eq!(table.rows.len(), 20);
        let mut buf = Vec::new();
        table.write(Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 21);
    }

    #[test]
    fn unwritable_path_is_echoed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("out.csv");
        let err = records_table(&records()).emit(Format::Csv, Some(&path)).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("missing"));
    }

    #[test]
    fn format_parsing() {
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }
}
