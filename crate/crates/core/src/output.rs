//! Result files: trajectory and landscape CSV, summary and optimum JSON,
//! and a manifest with content hashes and the resolved config.
//!
//! CSV floats are written as `{:.16e}` (17 significant digits); JSON floats
//! use the shortest representation that parses back to the same value. No
//! timestamps are written anywhere, so identical runs give identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Format, PulseConfig};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::hamiltonian::MatrixDump;
use crate::levels::{DotParameters, LevelBasis};
use crate::metrics::TransferReport;
use crate::optimizer::{OptimizationResult, ScanPoint, SearchSpace, TraceEntry};
use crate::pulses::{GaussianPulse, PulseScheme, SchemeKind};
use crate::validate::Check;

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const LANDSCAPE_FILE: &str = "landscape.csv";
pub const OPTIMUM_FILE: &str = "optimum.json";
pub const MATRIX_FILE: &str = "hamiltonian.json";
pub const VALIDATION_FILE: &str = "validation.json";
pub const MANIFEST_FILE: &str = "manifest.json";

impl PulseConfig {
    pub fn from_pulse(p: &GaussianPulse, params: &DotParameters) -> Self {
        PulseConfig {
            amplitude_meV: p.amplitude,
            center_fs: p.center,
            width_fs: p.width,
            detuning_meV: p.carrier - params.omega1,
            phase_rad: p.phase,
        }
    }
}

/// Pulse parameters as they appear in result files.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemeRecord {
    pub scheme: SchemeKind,
    pub pulse1: PulseConfig,
    pub pulse2: PulseConfig,
    pub delay_fs: f64,
}

impl SchemeRecord {
    pub fn new(scheme: &PulseScheme, params: &DotParameters) -> Self {
        SchemeRecord {
            scheme: scheme.kind,
            pulse1: PulseConfig::from_pulse(&scheme.pulse1, params),
            pulse2: PulseConfig::from_pulse(&scheme.pulse2, params),
            delay_fs: scheme.delay(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub verb: String,
    #[serde(flatten)]
    pub scheme: SchemeRecord,
    #[serde(flatten)]
    pub report: TransferReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct Optimum {
    #[serde(flatten)]
    pub scheme: SchemeRecord,
    pub free_params: BTreeMap<String, f64>,
    #[serde(flatten)]
    pub report: TransferReport,
    pub grid_points: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub trace: Vec<TraceEntry>,
}

impl Optimum {
    pub fn new(result: &OptimizationResult, space: &SearchSpace, grid_points: usize, params: &DotParameters) -> Self {
        Optimum {
            scheme: SchemeRecord::new(&result.best_params, params),
            free_params: space
                .axes
                .iter()
                .map(|a| (a.param.name().to_string(), a.param.get(&result.best_params)))
                .collect(),
            report: result.best_report.clone(),
            grid_points,
            evaluations: result.evaluations,
            converged: result.converged,
            trace: result.trace.clone(),
        }
    }
}

/// Everything a command produced; absent parts are not written.
#[derive(Default)]
pub struct Artifacts<'a> {
    pub trajectory: Option<(&'a Trajectory, &'a LevelBasis)>,
    pub summary: Option<Summary>,
    pub landscape: Option<(&'a SearchSpace, &'a [ScanPoint])>,
    pub optimum: Option<Optimum>,
    pub matrix: Option<MatrixDump>,
    pub validation: Option<Vec<Check>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub verb: String,
    pub files: Vec<FileEntry>,
    pub config: Value,
}

pub fn trajectory_csv(traj: &Trajectory, basis: &LevelBasis) -> String {
    let mut out = String::from("t_fs");
    for s in basis.states() {
        write!(out, ",P_{s}").unwrap();
    }
    out.push_str(",Re_env1_meV,Re_env2_meV\n");
    for ((t, pops), field) in traj.times.iter().zip(&traj.populations).zip(&traj.pulse_fields) {
        write!(out, "{t:.16e}").unwrap();
        for p in pops.iter().chain(field) {
            write!(out, ",{p:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// One row per grid point: free parameters, then target population, dwell
/// and objective.
pub fn landscape_csv(space: &SearchSpace, points: &[ScanPoint]) -> String {
    let mut out = space.axes.iter().map(|a| a.param.name()).collect::<Vec<_>>().join(",");
    out.push_str(",p_biexciton_target,dwell_fs,objective\n");
    for p in points {
        let r = &p.report;
        let row: Vec<String> = p
            .coordinates
            .iter()
            .chain([&r.p_biexciton_target, &r.dwell_fs, &r.objective])
            .map(|v| format!("{v:.16e}"))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<FileEntry> {
    let path: PathBuf = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(FileEntry { name: name.to_string(), bytes: contents.len(), sha256: sha256_hex(contents.as_bytes()) })
}

/// Writes the artifacts enabled by the config's output formats, then the
/// manifest. The manifest is always written and lists the other files in
/// name order.
pub fn write_outputs(dir: &Path, verb: &str, config: &ExperimentConfig, artifacts: &Artifacts) -> Result<Manifest> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv = config.output.wants(Format::Csv);
    let js = config.output.wants(Format::Json);
    let mut files = Vec::new();
    if let (true, Some((traj, basis))) = (csv, artifacts.trajectory) {
        files.push(write_file(dir, TRAJECTORY_FILE, &trajectory_csv(traj, basis))?);
    }
    if let (true, Some((space, points))) = (csv, artifacts.landscape) {
        files.push(write_file(dir, LANDSCAPE_FILE, &landscape_csv(space, points))?);
    }
    if let (true, Some(s)) = (js, &artifacts.summary) {
        files.push(write_file(dir, SUMMARY_FILE, &json(s))?);
    }
    if let (true, Some(o)) = (js, &artifacts.optimum) {
        files.push(write_file(dir, OPTIMUM_FILE, &json(o))?);
    }
    if let (true, Some(m)) = (js, &artifacts.matrix) {
        files.push(write_file(dir, MATRIX_FILE, &json(m))?);
    }
    if let (true, Some(v)) = (js, &artifacts.validation) {
        files.push(write_file(dir, VALIDATION_FILE, &json(v))?);
    }
    files.sort_by(|a, b| a.name.cmp(&b.name));
    let manifest = Manifest { verb: verb.to_string(), files, config: config.to_json() };
    write_file(dir, MANIFEST_FILE, &json(&manifest))?;
    Ok(manifest)
}
