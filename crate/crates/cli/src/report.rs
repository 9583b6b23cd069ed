//! Report assembly and CSV, JSON and gnuplot emission.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use latmesh_core::RealBall;
use rug::Rational;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Meta {
    pub subcommand: String,
    pub config: Value,
    pub config_hash: String,
    pub version: String,
    pub core_version: String,
    pub wall_time_s: f64,
    pub escalations: u64,
    #[serde(default)]
    pub extra: serde_json::Map<String, Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub warnings: Vec<String>,
}

/// Figure kinds with a gnuplot template.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plot {
    RatioVsT,
    DeltaTrace,
    RmsVsH,
}

impl Plot {
    pub fn name(self) -> &'static str {
        match self {
            Plot::RatioVsT => "ratio_vs_T",
            Plot::DeltaTrace => "delta_trace",
            Plot::RmsVsH => "rms_vs_H",
        }
    }
}

/// Rows under construction for one subcommand.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub warnings: Vec<String>,
    pub extra: serde_json::Map<String, Value>,
    pub plot: Option<Plot>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }
}

pub fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Midpoint and radius cells of a ball.
pub fn ball_cells(b: &RealBall) -> [String; 2] {
    [fmt_f64(b.to_f64()), fmt_f64(b.rad_f64())]
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

/// Exact rationals print as integers when integral, else as `p/q`.
pub fn fmt_rational(q: &Rational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        q.to_string()
    }
}

pub fn to_csv(columns: &[String], rows: &[Vec<String>]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

/// Paths written for one run.
#[derive(Clone, Debug)]
pub struct Written {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub plot: Option<PathBuf>,
}

fn timestamp() -> String {
    let d = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .unwrap_or_default();
    format!("{}{:03}", d.as_secs(), d.subsec_millis())
}

fn unique_stem(dir: &Path, sub: &str) -> String {
    let ts = timestamp();
    let mut stem = format!("{sub}-{ts}");
    let mut k = 1;
    while dir.join(format!("{stem}.csv")).exists() {
        stem = format!("{sub}-{ts}-{k}");
        k += 1;
    }
    stem
}

impl Report {
    pub fn csv(&self) -> String {
        to_csv(&self.columns, &self.rows)
    }

    /// Writes `<sub>-<timestamp>.csv`, `.json` and, for plotted kinds with
    /// rows, `.<figure>.gp`.
    pub fn write(&mut self, dir: &Path, plot: Option<Plot>) -> Result<Written, CliError> {
        fs::create_dir_all(dir)?;
        let stem = unique_stem(dir, &self.meta.subcommand);
        let csv = dir.join(format!("{stem}.csv"));
        let json = dir.join(format!("{stem}.json"));
        let plot = match plot {
            Some(kind) => emit_plot(self, kind, dir, &stem, &csv)?,
            None => None,
        };
        fs::write(&csv, self.csv())?;
        fs::write(&json, serde_json::to_string_pretty(self).map_err(CliError::internal)?)?;
        Ok(Written { csv, json, plot })
    }
}

/// Writes a gnuplot script for `kind`; with no rows, warns and writes nothing.
pub fn emit_plot(report: &mut Report, kind: Plot, dir: &Path, stem: &str, csv: &Path) -> Result<Option<PathBuf>, CliError> {
    if report.rows.is_empty() {
        report.warnings.push(format!("no rows; {} plot skipped", kind.name()));
        return Ok(None);
    }
    let data = csv.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let col = |name: &str| report.columns.iter().position(|c| c == name).map(|i| i + 1).unwrap_or(1);
    let body = match kind {
        Plot::RatioVsT => format!(
            "set datafile separator ','\nset key autotitle columnhead\nset logscale x\nset xlabel 'T'\nset ylabel 'ratio'\n\
             plot '{data}' using {}:{} with linespoints title 'integral of Delta^2 / predicted', 1 with lines dt 2 title ''\n",
            col("T"),
            col("ratio")
        ),
        Plot::DeltaTrace => format!(
            "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'x'\nset ylabel 'Delta(x)'\n\
             plot '{data}' using {}:{}:{} with yerrorbars title 'Delta'\n",
            col("x"),
            col("delta"),
            col("delta_err")
        ),
        Plot::RmsVsH => format!(
            "set datafile separator ','\nset key autotitle columnhead\nset logscale xy\nset xlabel 'H'\nset ylabel 'rms residual'\n\
             plot '{data}' using {}:{} with linespoints title 'rms |Delta - Delta*|'\n",
            col("H"),
            col("rms_residual")
        ),
    };
    let path = dir.join(format!("{stem}.{}.gp", kind.name()));
    fs::write(&path, body)?;
    Ok(Some(path))
}
