//! Versioned file formats and the bundled knot diagrams.
//!
//! | file | format |
//! |------|--------|
//! | grid | JSON `{"n", "cells"}` plus optional `name`, `gauss`, `provenance` |
//! | plan | JSON [`PlanFile`] |
//! | trajectory | JSON [`TrajectoryFile`] |
//! | trace | CSV `step,t,robot,phase,px,py,pz,vx,vy,vz,ux,uy,uz` |
//! | margins | CSV `step,t,pair,margin` |
//! | verdict | JSON [`VerdictFile`] |
//! | curve samples | CSV `x,y,z` |

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::knot::{GaussCode, GridDiagram};
use crate::representation::{KnotPlan, PlanParams, Verdict};
use crate::sim::{Interval, SimTrace};
use crate::trajectory::FoldPlan;
use crate::Point3;

/// Version stamped into every JSON file and checked on read.
pub const FORMAT_VERSION: u32 = 1;
/// Environment variable naming a directory that replaces the bundled assets.
pub const ASSETS_ENV: &str = "KNOTFOLD_ASSETS";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown bundled knot `{0}` (available: overhand, figure-eight, carrick)")]
    UnknownAsset(String),
    #[error("expected a {expected} file, found `{found}`")]
    WrongSchema { expected: &'static str, found: String },
    #[error("unsupported {schema} version {found} (this build reads version {FORMAT_VERSION})")]
    WrongVersion { schema: &'static str, found: u32 },
}

/// A grid diagram on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauss: Option<GaussCode>,
    /// Where the diagram came from (transcribed or search-derived).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub n: usize,
    pub cells: Vec<Vec<i8>>,
}

impl GridFile {
    pub fn from_grid(grid: &GridDiagram) -> Self {
        GridFile { name: None, gauss: None, provenance: None, n: grid.n, cells: grid.cells.clone() }
    }

    pub fn grid(&self) -> GridDiagram {
        GridDiagram { n: self.n, cells: self.cells.clone() }
    }

    /// JSON with one grid row per line.
    pub fn to_json(&self) -> String {
        let quote = |s: &str| serde_json::to_string(s).expect("string");
        let mut out = String::from("{\n");
        if let Some(name) = &self.name {
            let _ = writeln!(out, "  \"name\": {},", quote(name));
        }
        if let Some(gauss) = &self.gauss {
            let _ = writeln!(out, "  \"gauss\": {},", quote(&gauss.to_string()));
        }
        if let Some(p) = &self.provenance {
            let _ = writeln!(out, "  \"provenance\": {},", quote(p));
        }
        let _ = writeln!(out, "  \"n\": {},", self.n);
        out.push_str("  \"cells\": [\n");
        for (k, row) in self.cells.iter().enumerate() {
            let items: Vec<String> = row.iter().map(|v| format!("{v:2}")).collect();
            let sep = if k + 1 < self.cells.len() { "," } else { "" };
            let _ = writeln!(out, "    [{}]{sep}", items.join(", "));
        }
        out.push_str("  ]\n}\n");
        out
    }
}

const BUNDLED: [(&str, &str); 3] = [
    ("overhand", include_str!("../assets/overhand.json")),
    ("figure_eight", include_str!("../assets/figure_eight.json")),
    ("carrick", include_str!("../assets/carrick.json")),
];

/// Names of the bundled knots.
pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

fn asset_key(name: &str) -> Option<&'static str> {
    match name.to_ascii_lowercase().replace('-', "_").as_str() {
        "overhand" | "trefoil" => Some("overhand"),
        "figure_eight" | "figure8" | "eight" => Some("figure_eight"),
        "carrick" | "carrick_mat" => Some("carrick"),
        _ => None,
    }
}

/// Loads a bundled knot, from `$KNOTFOLD_ASSETS/<name>.json` when the
/// variable is set.
pub fn load_asset(name: &str) -> Result<GridFile, IoError> {
    let key = asset_key(name).ok_or_else(|| IoError::UnknownAsset(name.to_string()))?;
    match std::env::var_os(ASSETS_ENV) {
        Some(dir) => read_grid(&Path::new(&dir).join(format!("{key}.json"))),
        None => {
            let text = BUNDLED.iter().find(|(n, _)| *n == key).map(|(_, t)| *t).expect("bundled asset");
            Ok(serde_json::from_str(text)?)
        }
    }
}

fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File { path: path.to_path_buf(), source })
}

fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::File { path: path.to_path_buf(), source })
}

pub fn read_grid(path: &Path) -> Result<GridFile, IoError> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

pub fn write_grid(path: &Path, grid: &GridFile) -> Result<(), IoError> {
    write_text(path, &grid.to_json())
}

fn check_header(schema: &str, version: u32, expected: &'static str) -> Result<(), IoError> {
    if schema != expected {
        return Err(IoError::WrongSchema { expected, found: schema.to_string() });
    }
    if version != FORMAT_VERSION {
        return Err(IoError::WrongVersion { schema: expected, found: version });
    }
    Ok(())
}

pub const PLAN_SCHEMA: &str = "knotfold-plan";
pub const TRAJECTORY_SCHEMA: &str = "knotfold-trajectory";
pub const VERDICT_SCHEMA: &str = "knotfold-verdict";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub schema: String,
    pub version: u32,
    pub name: Option<String>,
    pub grid: GridDiagram,
    pub params: PlanParams,
    pub plan: KnotPlan,
}

impl PlanFile {
    pub fn new(name: Option<String>, grid: GridDiagram, params: PlanParams, plan: KnotPlan) -> Self {
        PlanFile { schema: PLAN_SCHEMA.into(), version: FORMAT_VERSION, name, grid, params, plan }
    }
}

pub fn plan_to_json(file: &PlanFile) -> Result<String, IoError> {
    Ok(serde_json::to_string_pretty(file)? + "\n")
}

pub fn plan_from_json(text: &str) -> Result<PlanFile, IoError> {
    let file: PlanFile = serde_json::from_str(text)?;
    check_header(&file.schema, file.version, PLAN_SCHEMA)?;
    Ok(file)
}

pub fn write_plan(path: &Path, file: &PlanFile) -> Result<(), IoError> {
    write_text(path, &plan_to_json(file)?)
}

pub fn read_plan(path: &Path) -> Result<PlanFile, IoError> {
    plan_from_json(&read_text(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFile {
    pub schema: String,
    pub version: u32,
    pub motion: FoldPlan,
}

pub fn write_trajectory(path: &Path, motion: &FoldPlan) -> Result<(), IoError> {
    let file = TrajectoryFile { schema: TRAJECTORY_SCHEMA.into(), version: FORMAT_VERSION, motion: motion.clone() };
    write_text(path, &(serde_json::to_string_pretty(&file)? + "\n"))
}

pub fn read_trajectory(path: &Path) -> Result<FoldPlan, IoError> {
    let file: TrajectoryFile = serde_json::from_str(&read_text(path)?)?;
    check_header(&file.schema, file.version, TRAJECTORY_SCHEMA)?;
    Ok(file.motion)
}

#[derive(Serialize)]
struct TraceRecord<'a> {
    step: u64,
    t: f64,
    robot: usize,
    phase: &'a str,
    px: f64,
    py: f64,
    pz: f64,
    vx: f64,
    vy: f64,
    vz: f64,
    ux: f64,
    uy: f64,
    uz: f64,
}

/// One row per recorded step and robot.
pub fn write_trace_csv<W: Write>(out: W, trace: &SimTrace) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    for row in &trace.rows {
        for (robot, (s, u)) in row.robots.iter().zip(&row.controls).enumerate() {
            w.serialize(TraceRecord {
                step: row.step,
                t: row.t,
                robot: robot + 1,
                phase: s.phase.as_str(),
                px: s.position.x,
                py: s.position.y,
                pz: s.position.z,
                vx: s.velocity.x,
                vy: s.velocity.y,
                vz: s.velocity.z,
                ux: u.x,
                uy: u.y,
                uz: u.z,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct MarginRecord {
    step: u64,
    t: f64,
    pair: usize,
    margin: f64,
}

/// One row per recorded step and cable segment; pair `k` joins robots
/// `k` and `k + 1`.
pub fn write_margins_csv<W: Write>(out: W, trace: &SimTrace) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    for row in &trace.rows {
        for (k, &margin) in row.margins.iter().enumerate() {
            w.serialize(MarginRecord { step: row.step, t: row.t, pair: k + 1, margin })?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct SampleRecord {
    x: f64,
    y: f64,
    z: f64,
}

pub fn write_samples_csv<W: Write>(out: W, samples: &[Point3]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    for p in samples {
        w.serialize(SampleRecord { x: p.x, y: p.y, z: p.z })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `x,y,z` rows; a header row is optional.
pub fn read_samples_csv<R: Read>(input: R) -> Result<Vec<Point3>, IoError> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
    let mut out = Vec::new();
    for (k, record) in r.records().enumerate() {
        let record = record?;
        if k == 0 && record.get(0).is_some_and(|s| s.parse::<f64>().is_err()) {
            continue;
        }
        let p: SampleRecord = record.deserialize(None)?;
        out.push(Point3::new(p.x, p.y, p.z));
    }
    Ok(out)
}

/// Final result of a simulated fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictFile {
    pub schema: String,
    pub version: u32,
    /// `match`, `mismatch`, `inconclusive` or `incomplete`.
    pub status: String,
    pub completed: bool,
    pub target: GaussCode,
    pub extracted: Option<GaussCode>,
    pub min_crossing_gap: Option<f64>,
    pub plan_min_clearance: Option<f64>,
    pub final_time: f64,
    pub final_errors: Vec<f64>,
    pub max_tracking_errors: Vec<f64>,
    pub min_margins: Vec<f64>,
    pub violations_after_entry: Vec<Interval>,
    pub floor_contacts: Vec<Interval>,
    /// Run-dependent values kept apart from the reproducible fields.
    pub metadata: RunMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub runtime_seconds: f64,
}

impl VerdictFile {
    pub fn new(plan: &KnotPlan, trace: &SimTrace, runtime_seconds: f64) -> Self {
        let o = &trace.outcome;
        let status = match (&o.topology, o.completed) {
            (_, false) | (None, _) => "incomplete",
            (Some(r), true) => match r.verdict {
                Verdict::Match => "match",
                Verdict::Mismatch => "mismatch",
                Verdict::Inconclusive => "inconclusive",
            },
        };
        VerdictFile {
            schema: VERDICT_SCHEMA.into(),
            version: FORMAT_VERSION,
            status: status.into(),
            completed: o.completed,
            target: plan.target.clone(),
            extracted: o.topology.as_ref().and_then(|r| r.extracted.clone()),
            min_crossing_gap: o.topology.as_ref().and_then(|r| r.min_abs_gap),
            plan_min_clearance: plan.min_clearance(),
            final_time: o.final_time,
            final_errors: o.final_errors.clone(),
            max_tracking_errors: o.max_tracking_errors.clone(),
            min_margins: o.min_margins.clone(),
            violations_after_entry: trace.violations_after_entry(),
            floor_contacts: trace.floor_contacts.clone(),
            metadata: RunMetadata { runtime_seconds },
        }
    }
}

pub fn write_verdict(path: &Path, verdict: &VerdictFile) -> Result<(), IoError> {
    write_text(path, &(serde_json::to_string_pretty(verdict)? + "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::parse_gauss_code;
    use crate::representation::plan_grid;

    #[test]
    fn bundled_assets_parse() {
        for name in bundled_names() {
            let file = load_asset(name).unwrap();
            assert!(file.grid().validate().is_ok(), "{name}");
            assert!(file.provenance.is_some());
            assert!(file.gauss.is_some());
        }
        assert!(load_asset("figure-eight").is_ok());
        assert!(matches!(load_asset("granny"), Err(IoError::UnknownAsset(_))));
    }

    #[test]
    fn grid_json_round_trip() {
        let mut file = load_asset("overhand").unwrap();
        file.name = Some("x\"y".into());
        let back: GridFile = serde_json::from_str(&file.to_json()).unwrap();
        assert_eq!(back, file);
        let bare: GridFile = serde_json::from_str(r#"{"n": 2, "cells": [[1, -1], [-1, 1]]}"#).unwrap();
        assert_eq!(bare.grid().crossing_count(), 0);
    }

    #[test]
    fn plan_round_trip_is_exact() {
        let grid = load_asset("overhand").unwrap().grid();
        let params = PlanParams::new(1.0, 1.34);
        let plan = plan_grid(&grid, &params).unwrap();
        let file = PlanFile::new(Some("overhand".into()), grid, params, plan);
        let text = plan_to_json(&file).unwrap();
        let back = plan_from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(plan_to_json(&back).unwrap(), text);
    }

    #[test]
    fn plan_header_checked() {
        let grid = load_asset("overhand").unwrap().grid();
        let params = PlanParams::new(1.0, 1.34);
        let mut file = PlanFile::new(None, grid.clone(), params, plan_grid(&grid, &params).unwrap());
        file.version = 99;
        assert!(matches!(plan_from_json(&plan_to_json(&file).unwrap()), Err(IoError::WrongVersion { .. })));
        file.version = FORMAT_VERSION;
        file.schema = "other".into();
        assert!(matches!(plan_from_json(&plan_to_json(&file).unwrap()), Err(IoError::WrongSchema { .. })));
    }

    #[test]
    fn samples_csv_round_trip() {
        let pts = vec![Point3::new(0.1, -2.0, 3.0), Point3::new(1e-17, 0.0, 1.0 / 3.0)];
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &pts).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("x,y,z\n"));
        assert_eq!(read_samples_csv(buf.as_slice()).unwrap(), pts);
        assert_eq!(read_samples_csv("1, 2, 3\n4,5,6\n".as_bytes()).unwrap().len(), 2);
        assert!(read_samples_csv("1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn gauss_field_validated() {
        let bad = r#"{"n": 2, "gauss": "1+ 1+", "cells": [[1, -1], [-1, 1]]}"#;
        assert!(serde_json::from_str::<GridFile>(bad).is_err());
        let ok: GridFile = serde_json::from_str(r#"{"n": 2, "gauss": "", "cells": [[1, -1], [-1, 1]]}"#).unwrap();
        assert_eq!(ok.gauss, Some(parse_gauss_code("").unwrap()));
    }
}
