//! Pulse-parameter search: full-factorial grid scans and bounded simplex
//! refinement of the penalized bad-photon objective
//!
//! `bad_photon_estimate + penalty · max(0, p_min − p_target)`.

pub mod nelder_mead;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::Setup;
use crate::levels::DotParameters;
use crate::metrics::TransferReport;
use crate::parallel;
use crate::pulses::{
    amplitude_for_area, exciton_biexciton_coupling, ground_exciton_coupling, PulseScheme, SchemeKind,
    SEQUENTIAL_MIN_SEPARATION,
};

pub use nelder_mead::SimplexOptions;

/// Largest default concurrent delay, in widths: the two envelopes cross at
/// or above half their peak, `exp(−8 ln2 (d/2τ)²) ≥ ½`.
pub const CONCURRENT_MAX_DELAY: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Default cap on grid points.
pub const DEFAULT_GRID_CAP: usize = 10_000;

/// A tunable scheme parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    /// Peak coupling of pulse 1, meV.
    Amplitude1,
    /// Peak coupling of pulse 2, meV.
    Amplitude2,
    /// Center of pulse 2 minus center of pulse 1, fs.
    Delay,
    /// Common FWHM of both pulses, fs.
    Width,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::Amplitude1 => "amplitude1_meV",
            Param::Amplitude2 => "amplitude2_meV",
            Param::Delay => "delay_fs",
            Param::Width => "width_fs",
        }
    }

    pub fn get(self, scheme: &PulseScheme) -> f64 {
        match self {
            Param::Amplitude1 => scheme.pulse1.amplitude,
            Param::Amplitude2 => scheme.pulse2.amplitude,
            Param::Delay => scheme.delay(),
            Param::Width => scheme.pulse1.width,
        }
    }

    fn set(self, scheme: &mut PulseScheme, value: f64) {
        match self {
            Param::Amplitude1 => scheme.pulse1.amplitude = value,
            Param::Amplitude2 => scheme.pulse2.amplitude = value,
            Param::Delay => scheme.pulse2.center = scheme.pulse1.center + value,
            Param::Width => {
                scheme.pulse1.width = value;
                scheme.pulse2.width = value;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: Param,
    pub lower: f64,
    pub upper: f64,
}

/// Box of free parameters around a base scheme; everything not on an axis
/// stays at its base value.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpace {
    pub base: PulseScheme,
    pub axes: Vec<Axis>,
}

impl SearchSpace {
    pub fn new(base: PulseScheme, axes: Vec<Axis>) -> Result<Self> {
        let space = SearchSpace { base, axes };
        space.validate()?;
        Ok(space)
    }

    pub fn kind(&self) -> SchemeKind {
        self.base.kind
    }

    pub fn lower(&self) -> Vec<f64> {
        self.axes.iter().map(|a| a.lower).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.axes.iter().map(|a| a.upper).collect()
    }

    fn range(&self, param: Param) -> (f64, f64) {
        match self.axes.iter().find(|a| a.param == param) {
            Some(a) => (a.lower, a.upper),
            None => {
                let v = param.get(&self.base);
                (v, v)
            }
        }
    }

    /// Bounds are finite and ordered, no parameter appears twice, and the
    /// timing rule of the scheme kind holds at every corner of the box.
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::InvalidArgument("search space has no free axes".into()));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if !(a.lower.is_finite() && a.upper.is_finite() && a.lower < a.upper) {
                return Err(Error::invalid(
                    format!("optimize.axes[{i}]"),
                    format!("bounds must be finite with lower < upper, got [{}, {}]", a.lower, a.upper),
                ));
            }
            if self.axes[..i].iter().any(|b| b.param == a.param) {
                return Err(Error::invalid(format!("optimize.axes[{i}]"), "parameter listed twice"));
            }
            let positive = matches!(a.param, Param::Width) && a.lower <= 0.0;
            let negative = matches!(a.param, Param::Amplitude1 | Param::Amplitude2) && a.lower < 0.0;
            if positive || negative {
                return Err(Error::invalid(format!("optimize.axes[{i}]"), "bounds leave the physical range"));
            }
        }
        let (d_lo, d_hi) = self.range(Param::Delay);
        let (w_lo, w_hi) = self.range(Param::Width);
        let ok = match self.kind() {
            SchemeKind::Sequential => d_lo.abs().min(d_hi.abs()) >= SEQUENTIAL_MIN_SEPARATION * w_hi && d_lo * d_hi > 0.0,
            SchemeKind::Concurrent => d_lo.abs().max(d_hi.abs()) < w_lo,
        };
        if !ok {
            return Err(Error::invalid(
                "optimize.axes",
                format!("delay range [{d_lo}, {d_hi}] fs violates the {} timing rule for widths up to {w_hi} fs", self.kind()),
            ));
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.axes.len() && self.axes.iter().zip(x).all(|(a, &v)| v >= a.lower && v <= a.upper)
    }

    /// Coordinates of `scheme` along the free axes.
    pub fn coordinates(&self, scheme: &PulseScheme) -> Vec<f64> {
        self.axes.iter().map(|a| a.param.get(scheme)).collect()
    }

    pub fn scheme_at(&self, x: &[f64]) -> PulseScheme {
        let mut s = self.base;
        for (a, &v) in self.axes.iter().zip(x) {
            a.param.set(&mut s, v);
        }
        s
    }

    /// Default box for `kind` around π-area amplitudes at `width`, see
    /// [`default_axes`].
    pub fn around_pi_pulses(setup: &Setup, kind: SchemeKind, width: f64) -> Self {
        SearchSpace {
            base: PulseScheme::pi_pulses(&setup.params, kind, width),
            axes: default_axes(&setup.params, kind, width),
        }
    }
}

/// Both amplitudes and the delay are free. Amplitudes span a band around
/// the π-area values at `width`. Sequential delays run from the minimum
/// separation to 4τ; concurrent delays are limited to
/// [`CONCURRENT_MAX_DELAY`]·τ.
pub fn default_axes(params: &DotParameters, kind: SchemeKind, width: f64) -> Vec<Axis> {
    let a1 = amplitude_for_area(PI, width, ground_exciton_coupling(params));
    let a2 = amplitude_for_area(PI, width, exciton_biexciton_coupling(params));
    let (amp_lo, amp_hi, d_lo, d_hi) = match kind {
        SchemeKind::Sequential => (0.8, 1.6, SEQUENTIAL_MIN_SEPARATION * width, 4.0 * width),
        SchemeKind::Concurrent => (0.5, 2.0, -CONCURRENT_MAX_DELAY * width, CONCURRENT_MAX_DELAY * width),
    };
    vec![
        Axis { param: Param::Amplitude1, lower: amp_lo * a1, upper: amp_hi * a1 },
        Axis { param: Param::Amplitude2, lower: amp_lo * a2, upper: amp_hi * a2 },
        Axis { param: Param::Delay, lower: d_lo, upper: d_hi },
    ]
}

/// Default grid resolution matching [`default_axes`].
pub fn default_resolution(kind: SchemeKind) -> Vec<usize> {
    match kind {
        SchemeKind::Sequential => vec![9, 9, 5],
        SchemeKind::Concurrent => vec![9, 9, 9],
    }
}

/// Penalty on falling short of the target population. With the default
/// `p_min = 1` the penalty is always active and the search maximizes the
/// target population, using the bad-photon estimate to break near-ties.
/// Ground population counts as neither, so a `p_min` below the reachable
/// optimum lets the search trade target population for shorter dwell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Objective {
    pub penalty: f64,
    pub p_min: f64,
}

impl Default for Objective {
    fn default() -> Self {
        Objective { penalty: 10.0, p_min: 1.0 }
    }
}

impl Objective {
    pub fn value(&self, report: &TransferReport) -> f64 {
        report.bad_photon_estimate + self.penalty * (self.p_min - report.p_biexciton_target).max(0.0)
    }

    /// Simulates `scheme` and stores the penalized value in the report's
    /// `objective` field.
    pub fn evaluate(&self, setup: &Setup, scheme: PulseScheme) -> Result<TransferReport> {
        let mut report = setup.report(scheme)?;
        report.objective = self.value(&report);
        Ok(report)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanPoint {
    pub coordinates: Vec<f64>,
    pub scheme: PulseScheme,
    pub report: TransferReport,
}

/// Full-factorial scan; the last axis varies fastest.
pub fn grid_scan(
    space: &SearchSpace,
    resolution: &[usize],
    setup: &Setup,
    objective: &Objective,
    cap: usize,
) -> Result<Vec<ScanPoint>> {
    space.validate()?;
    if resolution.len() != space.axes.len() {
        return Err(Error::InvalidArgument(format!(
            "resolution has {} entries for {} axes",
            resolution.len(),
            space.axes.len()
        )));
    }
    if let Some(&r) = resolution.iter().find(|&&r| r < 2) {
        return Err(Error::InvalidArgument(format!("grid resolution must be at least 2 per axis, got {r}")));
    }
    let total = resolution
        .iter()
        .try_fold(1usize, |acc, &r| acc.checked_mul(r))
        .filter(|&t| t <= cap)
        .ok_or_else(|| Error::InvalidArgument(format!("grid of {resolution:?} exceeds the cap of {cap} points")))?;

    let points: Vec<Vec<f64>> = (0..total)
        .map(|mut flat| {
            let mut x = vec![0.0; resolution.len()];
            for k in (0..resolution.len()).rev() {
                let i = flat % resolution[k];
                flat /= resolution[k];
                let a = &space.axes[k];
                x[k] = a.lower + (a.upper - a.lower) * i as f64 / (resolution[k] - 1) as f64;
            }
            x
        })
        .collect();

    parallel::map(&points, |x| {
        let scheme = space.scheme_at(x);
        objective
            .evaluate(setup, scheme)
            .map(|report| ScanPoint { coordinates: x.clone(), scheme, report })
    })
    .into_iter()
    .collect()
}

/// Index of the scan point with the lowest objective; ties go to the
/// earliest point.
pub fn best_point(points: &[ScanPoint]) -> Option<&ScanPoint> {
    points.iter().reduce(|best, p| if p.report.objective < best.report.objective { p } else { best })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub params: Vec<f64>,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult {
    pub best_params: PulseScheme,
    /// Report at the optimum; its `objective` is the penalized value.
    pub best_report: TransferReport,
    pub evaluations: usize,
    pub trace: Vec<TraceEntry>,
    pub converged: bool,
}

/// Simplex refinement from `start` inside `space`.
pub fn refine(
    start: &PulseScheme,
    space: &SearchSpace,
    setup: &Setup,
    objective: &Objective,
    options: SimplexOptions,
) -> Result<OptimizationResult> {
    space.validate()?;
    let x0 = space.coordinates(start);
    if !space.contains(&x0) {
        return Err(Error::InvalidArgument(format!("start point {x0:?} lies outside the search box")));
    }
    let f = |x: &[f64]| objective.evaluate(setup, space.scheme_at(x)).map(|r| r.objective);
    let result = nelder_mead::minimize(&f, &x0, &space.lower(), &space.upper(), options)?;
    let best_params = space.scheme_at(&result.best);
    let best_report = objective.evaluate(setup, best_params)?;
    let trace: Vec<TraceEntry> = result
        .trace
        .into_iter()
        .map(|(params, objective)| TraceEntry { params, objective })
        .collect();
    Ok(OptimizationResult {
        best_params,
        best_report,
        evaluations: trace.len(),
        trace,
        converged: result.converged,
    })
}
