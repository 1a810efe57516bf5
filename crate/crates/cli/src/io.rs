// SPDX-License-Identifier: Apache-2.0

//! Kernel, potential, family and sample files.
//!
//! Kernels are JSON `{"points": [...], "values": [[...], ...]}` or CSV with a
//! header row of labels followed by `n` rows of `n` values. Files ending in
//! `.csv` are read as CSV, everything else as JSON.

use std::fs;
use std::path::{Path, PathBuf};

use kernineq_core::gruss::FunctionSample;
use kernineq_core::{Kernel, PointSet, Potential, PotentialFamily};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{origin}: line {line}, column {column}: {message}")]
    Json {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{origin}: line {line}: {message}")]
    Csv {
        origin: String,
        line: u64,
        message: String,
    },
    #[error("{origin}: {source}")]
    Invalid {
        origin: String,
        source: kernineq_core::Error,
    },
}

impl IoError {
    /// The core error behind an `Invalid` variant.
    pub fn core(&self) -> Option<&kernineq_core::Error> {
        match self {
            IoError::Invalid { source, .. } => Some(source),
            _ => None,
        }
    }
}

type Result<T> = std::result::Result<T, IoError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn json_err(origin: &str, e: serde_json::Error) -> IoError {
    IoError::Json {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn invalid(origin: &str) -> impl FnOnce(kernineq_core::Error) -> IoError + '_ {
    move |source| IoError::Invalid {
        origin: origin.to_string(),
        source,
    }
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| json_err(origin, e))
}

#[derive(Deserialize)]
struct KernelFile {
    points: Vec<String>,
    values: Vec<Vec<f64>>,
}

pub fn parse_kernel_json(text: &str, origin: &str) -> Result<Kernel> {
    let file: KernelFile = parse(text, origin)?;
    let points = PointSet::new(file.points).map_err(invalid(origin))?;
    Kernel::from_rows(points, file.values).map_err(invalid(origin))
}

pub fn parse_kernel_csv(text: &str, origin: &str) -> Result<Kernel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| IoError::Csv {
        origin: origin.to_string(),
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    };
    let labels: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(String::from)
        .collect();
    let points = PointSet::new(labels).map_err(invalid(origin))?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field.parse::<f64>().map_err(|e| IoError::Csv {
                    origin: origin.to_string(),
                    line,
                    message: format!("column {}: `{field}`: {e}", col + 1),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Kernel::from_rows(points, rows).map_err(invalid(origin))
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn load_kernel(path: &Path) -> Result<Kernel> {
    let text = read(path)?;
    let origin = path.display().to_string();
    if is_csv(path) {
        parse_kernel_csv(&text, &origin)
    } else {
        parse_kernel_json(&text, &origin)
    }
}

pub fn kernel_value(k: &Kernel) -> Value {
    json!({
        "points": k.points().labels(),
        "values": k.rows(),
    })
}

/// Canonical JSON text: sorted keys, shortest round-trip numbers, trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("a Value always serializes");
    s.push('\n');
    s
}

pub fn kernel_to_json(k: &Kernel) -> String {
    to_canonical_string(&kernel_value(k))
}

pub fn kernel_to_csv(k: &Kernel) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(k.points().labels()).expect("in-memory write");
    for i in 0..k.n() {
        w.write_record(k.row(i).iter().map(|v| format_f64(*v)))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    serde_json::Number::from_f64(v).map_or_else(|| v.to_string(), |n| n.to_string())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| IoError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_kernel(k: &Kernel, path: &Path) -> Result<()> {
    let text = if is_csv(path) {
        kernel_to_csv(k)
    } else {
        kernel_to_json(k)
    };
    write_text(path, &text)
}

#[derive(Deserialize)]
struct VectorFile {
    points: Vec<String>,
    values: Vec<f64>,
}

pub fn parse_potential(text: &str, origin: &str) -> Result<Potential> {
    let file: VectorFile = parse(text, origin)?;
    let points = PointSet::new(file.points).map_err(invalid(origin))?;
    Potential::new(points, file.values).map_err(invalid(origin))
}

pub fn load_potential(path: &Path) -> Result<Potential> {
    parse_potential(&read(path)?, &path.display().to_string())
}

pub fn potential_value(p: &Potential) -> Value {
    json!({
        "points": p.points().labels(),
        "values": p.values(),
    })
}

#[derive(Deserialize)]
struct FamilyFile {
    points: Vec<String>,
    members: Vec<Vec<f64>>,
}

pub fn parse_family(text: &str, origin: &str) -> Result<PotentialFamily> {
    let file: FamilyFile = parse(text, origin)?;
    let points = PointSet::new(file.points).map_err(invalid(origin))?;
    PotentialFamily::new(points, file.members).map_err(invalid(origin))
}

pub fn load_family(path: &Path) -> Result<PotentialFamily> {
    parse_family(&read(path)?, &path.display().to_string())
}

pub fn family_value(f: &PotentialFamily) -> Value {
    json!({
        "points": f.points.labels(),
        "members": f.members,
    })
}

/// `breaks` is optional: `[[index, left_limit], ...]` marks jumps at grid nodes.
#[derive(Deserialize)]
struct SampleFile {
    a: f64,
    b: f64,
    values: Vec<f64>,
    #[serde(default)]
    bounds: Option<(f64, f64)>,
    #[serde(default)]
    breaks: Vec<(usize, f64)>,
}

pub fn parse_sample(text: &str, origin: &str) -> Result<FunctionSample> {
    let f: SampleFile = parse(text, origin)?;
    FunctionSample::with_breaks(f.a, f.b, f.values, f.bounds, f.breaks).map_err(invalid(origin))
}

pub fn load_sample(path: &Path) -> Result<FunctionSample> {
    parse_sample(&read(path)?, &path.display().to_string())
}

pub fn sample_value(s: &FunctionSample) -> Value {
    let mut v = json!({
        "a": s.a(),
        "b": s.b(),
        "values": s.values(),
    });
    if let Some((lo, hi)) = s.declared_bounds() {
        v["bounds"] = json!([lo, hi]);
    }
    if !s.breaks().is_empty() {
        v["breaks"] = json!(s.breaks());
    }
    v
}
