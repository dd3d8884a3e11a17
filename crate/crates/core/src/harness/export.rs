//! Flat-file outputs. CSV floats use 9 significant digits (`%.9g`); missing
//! values are empty cells.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::{GeodesicTrace, Termination};
use crate::metric::{LiftedPoint, PlanarPoint};

use super::protocol::{CompareRow, ConvergenceRow, RunRecord, SummaryStats};

/// C-style `%.9g`.
pub fn format_g9(x: f64) -> String {
    const P: i32 = 9;
    if x.is_nan() {
        return String::new();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_g9).unwrap_or_default()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub const RUNS_HEADER: [&str; 10] = [
    "scenario",
    "algorithm",
    "seed",
    "n_samples",
    "h_length",
    "lifted_length",
    "backend_cost",
    "nodes",
    "wall_ms",
    "status",
];

pub fn write_runs_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(RUNS_HEADER)?;
    for r in records {
        w.write_record([
            r.scenario.clone(),
            r.algorithm.as_str().to_owned(),
            r.seed.to_string(),
            r.n_samples.to_string(),
            opt(r.h_length),
            opt(r.lifted_length),
            opt(r.backend_cost),
            r.nodes.to_string(),
            r.wall_ms.to_string(),
            r.status.as_str().to_owned(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub const CONVERGENCE_HEADER: [&str; 5] = ["n_samples", "trials", "mean_h_length", "std_h_length", "failures"];

pub fn write_convergence_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(CONVERGENCE_HEADER)?;
    for r in rows {
        w.write_record([
            r.n_samples.to_string(),
            r.stats.trials.to_string(),
            format_g9(r.stats.mean),
            format_g9(r.stats.std),
            r.stats.failures.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub const BOXPLOT_HEADER: [&str; 9] = ["trials", "min", "q1", "median", "q3", "max", "mean", "std", "failures"];

pub fn write_boxplot_csv(path: &Path, stats: &SummaryStats) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(BOXPLOT_HEADER)?;
    let f = format_g9;
    w.write_record([
        stats.trials.to_string(),
        f(stats.min),
        f(stats.q1),
        f(stats.median),
        f(stats.q3),
        f(stats.max),
        f(stats.mean),
        f(stats.std),
        stats.failures.to_string(),
    ])?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub const COMPARE_HEADER: [&str; 6] = [
    "scenario",
    "seed",
    "n_samples",
    "rrtstar_r_h_length",
    "rrtstar_euclid_h_length",
    "geodesic_length",
];

pub fn write_compare_csv(path: &Path, scenario: &str, rows: &[CompareRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(COMPARE_HEADER)?;
    for r in rows {
        w.write_record([
            scenario.to_owned(),
            r.seed.to_string(),
            r.n_samples.to_string(),
            opt(r.riemannian),
            opt(r.euclidean),
            opt(r.geodesic),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathExport {
    pub scenario: String,
    pub algorithm: String,
    pub seed: u64,
    pub n_samples: usize,
    pub h_length: f64,
    pub backend_cost: f64,
    pub planar: Vec<PlanarPoint>,
    pub lifted: Vec<LiftedPoint>,
    pub cumulative_cost: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceExport {
    pub angle: f64,
    pub termination: Termination,
    pub length: f64,
    pub refined: bool,
    pub polyline: Vec<PlanarPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicsExport {
    pub scenario: String,
    pub fan_count: usize,
    pub hits: usize,
    pub best_angle: f64,
    pub best_length: f64,
    pub traces: Vec<TraceExport>,
}

/// Keep at most `max_points` evenly strided points, always including the ends.
pub fn decimate(points: &[PlanarPoint], max_points: usize) -> Vec<PlanarPoint> {
    let max_points = max_points.max(2);
    if points.len() <= max_points {
        return points.to_vec();
    }
    let stride = points.len().div_ceil(max_points - 1);
    let mut out: Vec<PlanarPoint> = points.iter().step_by(stride).copied().collect();
    if out.last() != points.last() {
        out.push(*points.last().expect("nonempty"));
    }
    out
}

impl TraceExport {
    pub fn new(trace: &GeodesicTrace, refined: bool, max_points: usize) -> Self {
        Self {
            angle: trace.angle,
            termination: trace.termination,
            length: trace.arc_length(),
            refined,
            polyline: decimate(&trace.polyline(), max_points),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g9_matches_printf() {
        let cases = [
            (14.142135623730951, "14.1421356"),
            (16.14253, "16.14253"),
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1e-5, "1e-05"),
            (0.0001234567891, "0.000123456789"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.1 + 0.2, "0.3"),
            (9.9999999999, "10"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g9(x), want, "{x}");
        }
        assert_eq!(format_g9(f64::NAN), "");
    }

    #[test]
    fn g9_reparses_within_nine_digits() {
        for x in [std::f64::consts::PI, 17.021961234, 1.0 / 3.0, 123.456e7] {
            let back: f64 = format_g9(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-9, "{x}");
        }
    }

    #[test]
    fn decimate_keeps_ends() {
        let pts: Vec<_> = (0..1001).map(|i| PlanarPoint::new(i as f64, 0.0)).collect();
        let d = decimate(&pts, 100);
        assert!(d.len() <= 101);
        assert_eq!(d[0], pts[0]);
        assert_eq!(d.last(), pts.last());
        assert_eq!(decimate(&pts[..3], 100).len(), 3);
    }
}
