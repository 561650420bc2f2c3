//! Experiment configuration files.
//!
//! A config is a JSON object; every key is optional. Loading resolves it
//! into an [`ExperimentConfig`] with all defaults filled in, so the resolved
//! form can be written next to the results and loaded again unchanged.
//!
//! ```json
//! {
//!   "dot": {"omega1": 1300, "level_offsets": [0, 40], "binding_energy": 4,
//!           "dipoles": [1, 1.4142135623730951], "biexciton_dipole_ratio": 0.8, "gamma": 1},
//!   "basis": {"n_levels": 2},
//!   "scheme": "sequential",
//!   "pulse1": {"amplitude_meV": 0.78, "center_fs": 0, "width_fs": 1000, "detuning_meV": 0, "phase_rad": 0},
//!   "pulse2": {"width_fs": 1000, "detuning_meV": -4},
//!   "sim": {"dt_fs": 1, "record_stride": 10, "frame": "rotating"},
//!   "optimize": {"axes": [{"param": "delay", "lower": 2355, "upper": 4000, "points": 5}]},
//!   "output": {"directory": "out", "formats": ["csv", "json"]}
//! }
//! ```

use std::f64::consts::PI;
use std::path::Path;

use log::{info, warn};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::dynamics::{DEFAULT_DT_LAB, DEFAULT_DT_ROTATING, DEFAULT_RECORD_STRIDE};
use crate::error::{Error, Result};
use crate::experiment::{FrameKind, Setup, SimConfig};
use crate::levels::DotParameters;
use crate::optimizer::{self, Axis, Objective, Param, SearchSpace, SimplexOptions, DEFAULT_GRID_CAP};
use crate::pulses::{
    amplitude_for_area, exciton_biexciton_coupling, ground_exciton_coupling, GaussianPulse, PulseScheme,
    SchemeKind, WidthWarning, SEQUENTIAL_DEFAULT_SEPARATION,
};

const DEFAULT_N_LEVELS: u32 = 2;
const DEFAULT_WIDTH_FS: f64 = 1000.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub n_levels: u32,
}

/// One pulse. The carrier is given as a detuning from ℏω₁.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct PulseConfig {
    pub amplitude_meV: f64,
    pub center_fs: f64,
    pub width_fs: f64,
    pub detuning_meV: f64,
    pub phase_rad: f64,
}

impl PulseConfig {
    fn to_pulse(self, params: &DotParameters) -> GaussianPulse {
        GaussianPulse {
            amplitude: self.amplitude_meV,
            center: self.center_fs,
            width: self.width_fs,
            carrier: params.omega1 + self.detuning_meV,
            phase: self.phase_rad,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub param: Param,
    pub lower: f64,
    pub upper: f64,
    /// Grid points along this axis for scans.
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    pub axes: Vec<AxisConfig>,
    pub penalty: f64,
    pub p_min: f64,
    pub max_evaluations: usize,
    pub relative_tolerance: f64,
    pub initial_step: f64,
    pub grid_cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: String,
    pub formats: Vec<Format>,
}

impl OutputConfig {
    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }
}

/// Fully resolved experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub dot: DotParameters,
    pub basis: BasisConfig,
    pub scheme: SchemeKind,
    pub pulse1: PulseConfig,
    pub pulse2: PulseConfig,
    pub sim: SimConfig,
    pub optimize: OptimizeConfig,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn pulse_scheme(&self) -> PulseScheme {
        PulseScheme {
            pulse1: self.pulse1.to_pulse(&self.dot),
            pulse2: self.pulse2.to_pulse(&self.dot),
            kind: self.scheme,
        }
    }

    pub fn setup(&self) -> Result<Setup> {
        Setup::new(self.dot.clone(), self.sim)
    }

    pub fn search_space(&self) -> SearchSpace {
        SearchSpace {
            base: self.pulse_scheme(),
            axes: self
                .optimize
                .axes
                .iter()
                .map(|a| Axis { param: a.param, lower: a.lower, upper: a.upper })
                .collect(),
        }
    }

    pub fn resolution(&self) -> Vec<usize> {
        self.optimize.axes.iter().map(|a| a.points).collect()
    }

    pub fn objective(&self) -> Objective {
        Objective { penalty: self.optimize.penalty, p_min: self.optimize.p_min }
    }

    pub fn simplex_options(&self) -> SimplexOptions {
        SimplexOptions {
            initial_step: self.optimize.initial_step,
            relative_tolerance: self.optimize.relative_tolerance,
            max_evaluations: self.optimize.max_evaluations,
        }
    }

    pub fn warnings(&self) -> Vec<WidthWarning> {
        self.pulse_scheme().width_warnings(&self.dot)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Re-checks every invariant, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        self.dot.validate()?;
        if self.basis.n_levels as usize != self.dot.level_offsets.len() {
            return Err(Error::invalid(
                "basis.n_levels",
                format!("{} levels but dot.level_offsets has {}", self.basis.n_levels, self.dot.level_offsets.len()),
            ));
        }
        for (name, p) in [("pulse1", &self.pulse1), ("pulse2", &self.pulse2)] {
            if !p.detuning_meV.is_finite() {
                return Err(Error::invalid(format!("{name}.detuning_meV"), "must be finite"));
            }
        }
        if self.pulse1.detuning_meV != 0.0 {
            return Err(Error::invalid("pulse1.detuning_meV", "pulse 1 must be resonant with the lowest exciton"));
        }
        let scheme = self.pulse_scheme();
        scheme.validate(&self.dot)?;

        let sim = &self.sim;
        if !(sim.dt_fs > 0.0 && sim.dt_fs.is_finite()) {
            return Err(Error::invalid("sim.dt_fs", "must be positive"));
        }
        if sim.record_stride == 0 {
            return Err(Error::invalid("sim.record_stride", "must be at least 1"));
        }
        if sim.frame == FrameKind::Rotating {
            let tau = self.narrowest_width();
            if sim.dt_fs > tau / 200.0 {
                return Err(Error::invalid(
                    "sim.dt_fs",
                    format!("rotating frame needs dt ≤ τ/200 = {} fs", tau / 200.0),
                ));
            }
        }

        let opt = &self.optimize;
        if !(opt.penalty >= 0.0 && opt.penalty.is_finite()) {
            return Err(Error::invalid("optimize.penalty", "must be finite and nonnegative"));
        }
        if !(0.0..=1.0).contains(&opt.p_min) {
            return Err(Error::invalid("optimize.p_min", "must lie in [0, 1]"));
        }
        if opt.max_evaluations == 0 {
            return Err(Error::invalid("optimize.max_evaluations", "must be at least 1"));
        }
        if !(opt.relative_tolerance >= 0.0 && opt.relative_tolerance.is_finite()) {
            return Err(Error::invalid("optimize.relative_tolerance", "must be finite and nonnegative"));
        }
        if !(opt.initial_step > 0.0 && opt.initial_step <= 1.0) {
            return Err(Error::invalid("optimize.initial_step", "must lie in (0, 1]"));
        }
        for (i, a) in opt.axes.iter().enumerate() {
            if a.points < 2 {
                return Err(Error::invalid(format!("optimize.axes[{i}].points"), "need at least 2 grid points"));
            }
        }
        let total = opt.axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.points));
        if total.is_none_or(|t| t > opt.grid_cap) {
            return Err(Error::invalid(
                "optimize.axes",
                format!("grid exceeds optimize.grid_cap = {} points", opt.grid_cap),
            ));
        }
        self.search_space().validate()?;

        if self.output.formats.is_empty() {
            return Err(Error::invalid("output.formats", "need at least one format"));
        }
        Ok(())
    }

    /// Smallest pulse width reachable by the run or the search box.
    fn narrowest_width(&self) -> f64 {
        let box_width = self
            .optimize
            .axes
            .iter()
            .filter(|a| a.param == Param::Width)
            .map(|a| a.lower)
            .fold(f64::INFINITY, f64::min);
        self.pulse1.width_fs.min(self.pulse2.width_fs).min(box_width)
    }
}

// Raw file layout: same keys as ExperimentConfig, everything optional.

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dot: Option<RawDot>,
    basis: Option<RawBasis>,
    scheme: Option<SchemeKind>,
    pulse1: Option<RawPulse>,
    pulse2: Option<RawPulse>,
    sim: Option<RawSim>,
    optimize: Option<RawOptimize>,
    output: Option<RawOutput>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDot {
    omega1: Option<f64>,
    level_offsets: Option<Vec<f64>>,
    binding_energy: Option<f64>,
    dipoles: Option<Vec<f64>>,
    biexciton_dipole_ratio: Option<f64>,
    gamma: Option<f64>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBasis {
    n_levels: Option<u32>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawPulse {
    amplitude_meV: Option<f64>,
    center_fs: Option<f64>,
    width_fs: Option<f64>,
    detuning_meV: Option<f64>,
    phase_rad: Option<f64>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    dt_fs: Option<f64>,
    record_stride: Option<usize>,
    frame: Option<FrameKind>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptimize {
    axes: Option<Vec<AxisConfig>>,
    penalty: Option<f64>,
    p_min: Option<f64>,
    max_evaluations: Option<usize>,
    relative_tolerance: Option<f64>,
    initial_step: Option<f64>,
    grid_cap: Option<usize>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    directory: Option<String>,
    formats: Option<Vec<Format>>,
}

/// Collects the names of defaulted fields.
struct Defaults(Vec<String>);

impl Defaults {
    fn or<T: std::fmt::Debug>(&mut self, field: &str, given: Option<T>, default: impl FnOnce() -> T) -> T {
        given.unwrap_or_else(|| {
            let v = default();
            info!("config: {field} not given, using {v:?}");
            self.0.push(field.to_string());
            v
        })
    }
}

/// A resolved config plus what loading had to say about it.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub config: ExperimentConfig,
    /// Dotted paths of every field that fell back to its default.
    pub defaults: Vec<String>,
    pub warnings: Vec<WidthWarning>,
}

/// Reads, overrides, resolves and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    load_with_overrides(path, &[]).map(|l| l.config)
}

pub fn load_with_overrides(path: &Path, overrides: &[String]) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::ConfigSyntax { message: e.to_string(), field: None })?;
    resolve(value, overrides)
}

/// Applies `overrides` to `value`, then resolves and validates.
pub fn resolve(mut value: Value, overrides: &[String]) -> Result<Loaded> {
    if !value.is_object() {
        return Err(Error::ConfigSyntax { message: "config must be a JSON object".into(), field: None });
    }
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    let raw: RawConfig = typed(value)?;
    let mut d = Defaults(Vec::new());
    let config = fill(raw, &mut d)?;
    config.validate()?;
    let warnings = config.warnings();
    for w in &warnings {
        warn!("{w}");
    }
    Ok(Loaded { config, defaults: d.0, warnings })
}

fn typed<T: DeserializeOwned>(value: Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let message = e.inner().to_string();
        if let Some(key) = unknown_key(&message) {
            let field = if path == "." || path.is_empty() { key.to_string() } else { format!("{path}.{key}") };
            // the tracked path already ends at the offending key for some formats
            let field = if path.ends_with(key) { path } else { field };
            Error::ConfigUnknownKey { field }
        } else {
            Error::ConfigInvalid { field: path, message }
        }
    })
}

fn unknown_key(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("unknown field `")?;
    rest.split('`').next()
}

/// Sets a dotted path such as `pulse1.width_fs=100` or
/// `dot.level_offsets.1=35`. The value is parsed as JSON when it can be,
/// otherwise taken as a string.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .filter(|(k, _)| !k.trim().is_empty())
        .ok_or_else(|| Error::InvalidArgument(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        let here = parts[..=i].join(".");
        node = match node {
            Value::Object(map) => {
                if last {
                    info!("config: override {key} = {value}");
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()))
            }
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .ok()
                    .filter(|&j| j < items.len())
                    .ok_or_else(|| Error::ConfigUnknownKey { field: here.clone() })?;
                if last {
                    info!("config: override {key} = {value}");
                    items[idx] = value;
                    return Ok(());
                }
                &mut items[idx]
            }
            _ => return Err(Error::ConfigUnknownKey { field: here }),
        };
    }
    unreachable!("split yields at least one part")
}

fn fill(raw: RawConfig, d: &mut Defaults) -> Result<ExperimentConfig> {
    let rd = raw.dot.unwrap_or_default();
    let given_levels = rd.level_offsets.as_ref().map(|v| v.len() as u32);
    let n_levels = d.or(
        "basis.n_levels",
        raw.basis.and_then(|b| b.n_levels),
        || given_levels.unwrap_or(DEFAULT_N_LEVELS),
    );
    if n_levels == 0 {
        return Err(Error::invalid("basis.n_levels", "must be at least 1"));
    }
    if given_levels.is_some_and(|g| g != n_levels) {
        return Err(Error::invalid("basis.n_levels", "disagrees with the length of dot.level_offsets"));
    }
    let table = DotParameters::typical(n_levels).ok();
    let scalars = DotParameters::typical(1)?;
    let tabulated = |field: &str, pick: fn(&DotParameters) -> Vec<f64>| {
        table
            .as_ref()
            .map(pick)
            .ok_or_else(|| Error::invalid(field, format!("required for n_levels = {n_levels}")))
    };
    let level_offsets = match rd.level_offsets {
        Some(v) => v,
        None => {
            let v = tabulated("dot.level_offsets", |p| p.level_offsets.clone())?;
            d.or("dot.level_offsets", None, || v)
        }
    };
    let dipoles = match rd.dipoles {
        Some(v) => v,
        None => {
            let v = tabulated("dot.dipoles", |p| p.dipoles.clone())?;
            d.or("dot.dipoles", None, || v)
        }
    };
    let dot = DotParameters {
        omega1: d.or("dot.omega1", rd.omega1, || scalars.omega1),
        level_offsets,
        binding_energy: d.or("dot.binding_energy", rd.binding_energy, || scalars.binding_energy),
        dipoles,
        biexciton_dipole_ratio: d.or("dot.biexciton_dipole_ratio", rd.biexciton_dipole_ratio, || {
            scalars.biexciton_dipole_ratio
        }),
        gamma: d.or("dot.gamma", rd.gamma, || scalars.gamma),
    };
    // pulse defaults need a consistent dot
    dot.validate()?;

    let scheme = d.or("scheme", raw.scheme, || SchemeKind::Sequential);
    let r1 = raw.pulse1.unwrap_or_default();
    let r2 = raw.pulse2.unwrap_or_default();
    let w1 = d.or("pulse1.width_fs", r1.width_fs, || DEFAULT_WIDTH_FS);
    let w2 = d.or("pulse2.width_fs", r2.width_fs, || w1);
    let c1 = d.or("pulse1.center_fs", r1.center_fs, || 0.0);
    let pulse1 = PulseConfig {
        amplitude_meV: d.or("pulse1.amplitude_meV", r1.amplitude_meV, || {
            amplitude_for_area(PI, w1, ground_exciton_coupling(&dot))
        }),
        center_fs: c1,
        width_fs: w1,
        detuning_meV: d.or("pulse1.detuning_meV", r1.detuning_meV, || 0.0),
        phase_rad: d.or("pulse1.phase_rad", r1.phase_rad, || 0.0),
    };
    let pulse2 = PulseConfig {
        amplitude_meV: d.or("pulse2.amplitude_meV", r2.amplitude_meV, || {
            amplitude_for_area(PI, w2, exciton_biexciton_coupling(&dot))
        }),
        center_fs: d.or("pulse2.center_fs", r2.center_fs, || match scheme {
            SchemeKind::Sequential => c1 + SEQUENTIAL_DEFAULT_SEPARATION * w1.max(w2),
            SchemeKind::Concurrent => c1,
        }),
        width_fs: w2,
        detuning_meV: d.or("pulse2.detuning_meV", r2.detuning_meV, || -dot.binding_energy),
        phase_rad: d.or("pulse2.phase_rad", r2.phase_rad, || 0.0),
    };

    let rs = raw.sim.unwrap_or_default();
    let frame = d.or("sim.frame", rs.frame, || FrameKind::Rotating);
    let sim = SimConfig {
        // short pulses pull the rotating-frame default below 1 fs
        dt_fs: d.or("sim.dt_fs", rs.dt_fs, || match frame {
            FrameKind::Rotating => DEFAULT_DT_ROTATING.min(w1.min(w2) / 200.0),
            FrameKind::Lab => DEFAULT_DT_LAB,
        }),
        record_stride: d.or("sim.record_stride", rs.record_stride, || DEFAULT_RECORD_STRIDE),
        frame,
    };

    let ro = raw.optimize.unwrap_or_default();
    let objective = Objective::default();
    let simplex = SimplexOptions::default();
    let axes = d.or("optimize.axes", ro.axes, || {
        optimizer::default_axes(&dot, scheme, w1.max(w2))
            .into_iter()
            .zip(optimizer::default_resolution(scheme))
            .map(|(a, points)| AxisConfig { param: a.param, lower: a.lower, upper: a.upper, points })
            .collect()
    });
    let optimize = OptimizeConfig {
        axes,
        penalty: d.or("optimize.penalty", ro.penalty, || objective.penalty),
        p_min: d.or("optimize.p_min", ro.p_min, || objective.p_min),
        max_evaluations: d.or("optimize.max_evaluations", ro.max_evaluations, || simplex.max_evaluations),
        relative_tolerance: d.or("optimize.relative_tolerance", ro.relative_tolerance, || {
            simplex.relative_tolerance
        }),
        initial_step: d.or("optimize.initial_step", ro.initial_step, || simplex.initial_step),
        grid_cap: d.or("optimize.grid_cap", ro.grid_cap, || DEFAULT_GRID_CAP),
    };

    let rout = raw.output.unwrap_or_default();
    let output = OutputConfig {
        directory: d.or("output.directory", rout.directory, || "out".to_string()),
        formats: d.or("output.formats", rout.formats, || vec![Format::Csv, Format::Json]),
    };

    Ok(ExperimentConfig {
        dot,
        basis: BasisConfig { n_levels },
        scheme,
        pulse1,
        pulse2,
        sim,
        optimize,
        output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn load(v: Value) -> Result<Loaded> {
        resolve(v, &[])
    }

    #[test]
    fn empty_object_gives_typical_dot() {
        let l = load(json!({})).unwrap();
        let c = &l.config;
        assert_eq!(c.dot, DotParameters::typical(2).unwrap());
        assert_eq!(c.basis.n_levels, 2);
        assert_eq!(c.scheme, SchemeKind::Sequential);
        assert_eq!(c.pulse1.width_fs, 1000.0);
        assert_eq!(c.pulse2.width_fs, 1000.0);
        assert_eq!(c.pulse2.detuning_meV, -4.0);
        assert_eq!(c.pulse2.center_fs, 2500.0);
        assert_eq!(c.sim.dt_fs, 1.0);
        let s = c.pulse_scheme();
        assert!((s.pulse1.area(std::f64::consts::SQRT_2) - PI).abs() < 1e-12);
        assert!(l.warnings.is_empty(), "{:?}", l.warnings);
        assert!(l.defaults.contains(&"dot.binding_energy".to_string()));
        assert!(l.defaults.contains(&"optimize.axes".to_string()));
    }

    #[test]
    fn negative_binding_energy() {
        let e = load(json!({"dot": {"binding_energy": -1}})).unwrap_err();
        assert_eq!(e.code(), "config-invalid");
        assert_eq!(e.field(), Some("dot.binding_energy"));
    }

    #[test]
    fn short_pulses_warn() {
        let l = load(json!({"pulse1": {"width_fs": 100}, "pulse2": {"width_fs": 100}})).unwrap();
        assert!(!l.warnings.is_empty());
        assert_eq!(l.config.pulse2.center_fs, 250.0);
        assert_eq!(l.config.sim.dt_fs, 0.5);
    }

    #[test]
    fn unknown_keys() {
        let e = load(json!({"dot": {"omega2": 1}})).unwrap_err();
        assert_eq!(e.code(), "config-unknown-key");
        assert_eq!(e.field(), Some("dot.omega2"));
        let e = load(json!({"colour": "blue"})).unwrap_err();
        assert_eq!(e.field(), Some("colour"));
        let e = load(json!({"optimize": {"axes": [{"param": "delay", "lower": 0, "upper": 1, "points": 2, "x": 0}]}}))
            .unwrap_err();
        assert_eq!(e.code(), "config-unknown-key");
    }

    #[test]
    fn type_errors_are_invalid() {
        let e = load(json!({"pulse1": {"width_fs": "wide"}})).unwrap_err();
        assert_eq!(e.code(), "config-invalid");
        assert_eq!(e.field(), Some("pulse1.width_fs"));
        let e = load(json!([1, 2])).unwrap_err();
        assert_eq!(e.code(), "config-syntax");
    }

    #[test]
    fn resolved_config_round_trips() {
        for v in [
            json!({}),
            json!({"scheme": "concurrent", "sim": {"frame": "lab"}, "basis": {"n_levels": 1}}),
            json!({"pulse1": {"width_fs": 700, "phase_rad": 0.3}, "optimize": {"p_min": 0.98}}),
        ] {
            let c = load(v).unwrap().config;
            let again = load(c.to_json()).unwrap();
            assert_eq!(again.config, c);
            assert!(again.defaults.is_empty(), "{:?}", again.defaults);
        }
    }

    #[test]
    fn overrides_last_write_wins() {
        let o = ["scheme=concurrent".to_string(), "pulse1.width_fs=800".into(), "pulse1.width_fs=900".into()];
        let c = resolve(json!({}), &o).unwrap().config;
        assert_eq!(c.scheme, SchemeKind::Concurrent);
        assert_eq!(c.pulse1.width_fs, 900.0);
        assert_eq!(c.pulse2.center_fs, 0.0);
        let c = resolve(json!({}), &["dot.level_offsets=[0, 35]".to_string()]).unwrap().config;
        assert_eq!(c.dot.level_offsets, vec![0.0, 35.0]);
        let c = resolve(json!({"dot": {"level_offsets": [0, 40]}}), &["dot.level_offsets.1=30".to_string()])
            .unwrap()
            .config;
        assert_eq!(c.dot.level_offsets[1], 30.0);
    }

    #[test]
    fn bad_overrides() {
        let e = resolve(json!({}), &["pulse3.width_fs=1".to_string()]).unwrap_err();
        assert_eq!(e.code(), "config-unknown-key");
        let e = resolve(json!({"sim": {"dt_fs": 1}}), &["sim.dt_fs.x=1".to_string()]).unwrap_err();
        assert_eq!(e.field(), Some("sim.dt_fs.x"));
        assert_eq!(resolve(json!({}), &["novalue".to_string()]).unwrap_err().code(), "invalid-argument");
    }

    #[test]
    fn scheme_rules_checked() {
        let e = load(json!({"pulse2": {"center_fs": 1000}})).unwrap_err();
        assert_eq!(e.field(), Some("pulse2.center_fs"));
        let e = load(json!({"pulse2": {"detuning_meV": -3}})).unwrap_err();
        assert_eq!(e.field(), Some("pulse2.detuning_meV"));
        let e = load(json!({"sim": {"dt_fs": 10}})).unwrap_err();
        assert_eq!(e.field(), Some("sim.dt_fs"));
        let e = load(json!({"basis": {"n_levels": 3}})).unwrap_err();
        assert_eq!(e.field(), Some("dot.level_offsets"));
        let e = load(json!({"basis": {"n_levels": 1}, "dot": {"level_offsets": [0, 40]}})).unwrap_err();
        assert_eq!(e.field(), Some("basis.n_levels"));
    }

    #[test]
    fn three_levels_with_tables() {
        let c = load(json!({"dot": {"level_offsets": [0, 40, 75], "dipoles": [1, 1.4, 1.7]}})).unwrap().config;
        assert_eq!(c.basis.n_levels, 3);
        assert_eq!(c.setup().unwrap().basis.len(), 22);
    }
}
