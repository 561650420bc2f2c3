//! Self-checks against analytic and numerical oracles, run by the
//! `validate` command.

use std::f64::consts::PI;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::dynamics::{self, basis_state, norm};
use crate::error::Result;
use crate::hamiltonian::HamiltonianModel;
use crate::levels::{DotParameters, LevelBasis};
use crate::pulses::{amplitude_for_area, ground_exciton_coupling, Frame, PulseScheme, SchemeKind};

pub const RABI_TOLERANCE: f64 = 1e-4;
pub const NORM_DRIFT_LIMIT: f64 = 1e-9;
pub const DEFECT_LIMIT: f64 = 1e-8;
pub const ORDER_SLACK: f64 = 1.0;
pub const FRAME_TOLERANCE: f64 = 1e-3;
pub const FRAME_TEST_WIDTH: f64 = 200.0;
pub const LAB_DT: f64 = 0.02;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Measured value; `None` when the check itself failed to run.
    pub value: Option<f64>,
    pub limit: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn check(name: &str, limit: String, measured: Result<f64>, pass: impl Fn(f64) -> bool) -> Check {
    match measured {
        Ok(v) => Check { name: name.into(), value: Some(v), limit, passed: pass(v), error: None },
        Err(e) => Check { name: name.into(), value: None, limit, passed: false, error: Some(e.to_string()) },
    }
}

/// The dot restricted to its lowest exciton level.
pub fn level_one(params: &DotParameters) -> DotParameters {
    let mut p = params.clone();
    p.level_offsets.truncate(1);
    p.dipoles.truncate(1);
    p
}

/// Level-1 subsystem driven by pulse 1 alone, biexciton coupling removed.
pub fn rabi_model(params: &DotParameters, width: f64, area: f64) -> Result<HamiltonianModel> {
    let p = level_one(params);
    let mut s = PulseScheme::pi_pulses(&p, SchemeKind::Sequential, width);
    s.pulse1.amplitude = amplitude_for_area(area, width, ground_exciton_coupling(&p));
    s.pulse2.amplitude = 0.0;
    Ok(HamiltonianModel::rotating(LevelBasis::new(1)?, p, s)?.without_biexciton_coupling())
}

/// Final ground population after a resonant pulse of the given area.
pub fn rabi_ground(params: &DotParameters, width: f64, area: f64, dt: f64) -> Result<f64> {
    let m = rabi_model(params, width, area)?;
    let traj = dynamics::propagate(&m, &basis_state(m.dim(), 0), dt, usize::MAX)?;
    Ok(traj.final_populations()[0])
}

/// Single π pulse of width `width` on all levels with biexciton coupling
/// removed, in `frame`.
pub fn single_pulse_model(params: &DotParameters, width: f64, frame: Frame) -> Result<HamiltonianModel> {
    let mut s = PulseScheme::pi_pulses(params, SchemeKind::Sequential, width);
    s.pulse2.amplitude = 0.0;
    let basis = LevelBasis::new(params.n_levels())?;
    Ok(HamiltonianModel::new(basis, params.clone(), s, frame)?.without_biexciton_coupling())
}

/// Largest final-population difference between the lab frame at
/// [`LAB_DT`] and the rotating frame at `dt` for a single π pulse. Pass the
/// level-1 subsystem to isolate the frame change: with more levels the
/// counter-rotating coupling to off-resonant excitons is a real effect
/// (about 6e-4 for the typical two-level dot at 200 fs).
pub fn frame_difference(params: &DotParameters, width: f64, dt: f64) -> Result<f64> {
    let lab = single_pulse_model(params, width, Frame::Lab)?;
    let rot = single_pulse_model(params, width, Frame::Rotating { reference: params.omega1 })?;
    let psi0 = basis_state(lab.dim(), 0);
    let a = dynamics::propagate(&lab, &psi0, LAB_DT, usize::MAX)?;
    let b = dynamics::propagate(&rot, &psi0, dt, usize::MAX)?;
    Ok(a.final_populations()
        .iter()
        .zip(b.final_populations())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

fn configured_model(config: &ExperimentConfig) -> Result<HamiltonianModel> {
    let basis = LevelBasis::new(config.dot.n_levels())?;
    HamiltonianModel::rotating(basis, config.dot.clone(), config.pulse_scheme())
}

/// Runs every check. Checks on the full model use the configured dot,
/// pulses and step size in the rotating frame.
pub fn run(config: &ExperimentConfig) -> Vec<Check> {
    let params = &config.dot;
    let width = config.pulse1.width_fs;
    let dt = config.sim.dt_fs;
    let frame_dt = dt.min(FRAME_TEST_WIDTH / 200.0);
    let mut out = vec![
        check(
            "rabi pi pulse: ground population",
            format!("< {RABI_TOLERANCE:e}"),
            rabi_ground(params, width, PI, dt),
            |v| v < RABI_TOLERANCE,
        ),
        check(
            "rabi 2pi pulse: ground population",
            format!("> 1 - {RABI_TOLERANCE:e}"),
            rabi_ground(params, width, 2.0 * PI, dt),
            |v| v > 1.0 - RABI_TOLERANCE,
        ),
    ];

    let psi0 = basis_state(crate::levels::basis_size(params.n_levels()), 0);
    let with_model = |f: &dyn Fn(&HamiltonianModel) -> Result<f64>| configured_model(config).and_then(|m| f(&m));

    let hermiticity = with_model(&|m| {
        let s = m.scheme();
        Ok([s.pulse1.center, s.pulse2.center, 0.5 * (s.pulse1.center + s.pulse2.center)]
            .iter()
            .map(|&t| m.hermiticity_defect(t))
            .fold(0.0, f64::max))
    });
    out.push(check("hamiltonian hermiticity defect", "< 1e-12".into(), hermiticity, |v| v < 1e-12));

    let drift = with_model(&|m| {
        let traj = dynamics::propagate(m, &psi0, dt, usize::MAX)?;
        Ok((norm(traj.final_state()) - 1.0).abs())
    });
    out.push(check("unitarity: final norm drift", format!("< {NORM_DRIFT_LIMIT:e}"), drift, |v| {
        v < NORM_DRIFT_LIMIT
    }));

    let defect = with_model(&|m| dynamics::convergence_check(m, &psi0, dt));
    out.push(check("step-halving population defect", format!("< {DEFECT_LIMIT:e}"), defect, |v| {
        v < DEFECT_LIMIT
    }));

    // the order is read off above the roundoff floor
    let coarse = (4.0 * dt).min(config.pulse1.width_fs.min(config.pulse2.width_fs) / 200.0);
    let order = with_model(&|m| dynamics::observed_order(m, &psi0, coarse));
    out.push(check("convergence order", format!("4 ± {ORDER_SLACK}"), order, |v| (v - 4.0).abs() <= ORDER_SLACK));

    out.push(check(
        "lab vs rotating frame populations",
        format!("< {FRAME_TOLERANCE:e}"),
        frame_difference(&level_one(params), FRAME_TEST_WIDTH, frame_dt),
        |v| v < FRAME_TOLERANCE,
    ));
    out
}

/// Fixed-width pass/fail table.
pub fn table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for c in checks {
        let value = c.value.map_or_else(|| "error".to_string(), |v| format!("{v:.3e}"));
        s.push_str(&format!(
            "{:<4}  {:<width$}  {:>10}  (limit {})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            value,
            c.limit
        ));
        if let Some(e) = &c.error {
            s.push_str(&format!("  {e}"));
        }
        s.push('\n');
    }
    s
}
