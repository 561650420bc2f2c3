//! Fixed-step fourth-order Runge–Kutta propagation of `iℏ ∂ψ/∂t = H(t) ψ`.
//!
//! The norm is never renormalized; a drift beyond [`NORM_TOLERANCE`] aborts
//! the run. In the lab frame a constant energy is subtracted from the
//! diagonal to centre the spectrum of coupled states on zero, which shrinks
//! the per-step amplitude damping of the integrator. The corresponding
//! global phase is put back on every recorded state.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianModel;
use crate::pulses::Frame;
use crate::units::HBAR;

/// Largest tolerated `| ‖ψ‖ − 1 |` at any step.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Default step in the rotating frame, fs.
pub const DEFAULT_DT_ROTATING: f64 = 1.0;
/// Default step in the lab frame, fs.
pub const DEFAULT_DT_LAB: f64 = 0.02;
pub const DEFAULT_RECORD_STRIDE: usize = 10;

/// Sampled solution on the pulse window.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    pub populations: Vec<Vec<f64>>,
    /// Real part of each pulse's field contribution at the sample times.
    pub pulse_fields: Vec<[f64; 2]>,
    pub dt_used: f64,
    pub frame: Frame,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[C64] {
        self.states.last().expect("trajectory has at least one sample")
    }

    pub fn final_populations(&self) -> &[f64] {
        self.populations.last().expect("trajectory has at least one sample")
    }
}

pub fn populations(psi: &[C64]) -> Vec<f64> {
    psi.iter().map(|z| z.norm_sqr()).collect()
}

pub fn norm(psi: &[C64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// All amplitude in basis state `index`.
pub fn basis_state(dim: usize, index: usize) -> Vec<C64> {
    let mut psi = vec![C64::new(0.0, 0.0); dim];
    psi[index] = C64::new(1.0, 0.0);
    psi
}

fn energy_reference(model: &HamiltonianModel) -> f64 {
    match model.frame() {
        Frame::Rotating { .. } => 0.0,
        Frame::Lab => {
            let coupled = coupled_states(model);
            let (lo, hi) = coupled
                .iter()
                .map(|&i| model.diagonal()[i])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e), hi.max(e)));
            if lo.is_finite() {
                0.5 * (lo + hi)
            } else {
                0.0
            }
        }
    }
}

/// States that take part in at least one coupling, found by applying `H`
/// with a unit drive to each basis vector.
fn coupled_states(model: &HamiltonianModel) -> Vec<usize> {
    let n = model.dim();
    let unit = crate::pulses::Drive { plus: C64::new(1.0, 0.0), minus: C64::new(1.0, 0.0) };
    let mut out = vec![C64::default(); n];
    (0..n)
        .filter(|&i| {
            model.apply(&unit, &basis_state(n, i), &mut out);
            out.iter().enumerate().any(|(j, z)| j != i && z.norm() > 0.0)
        })
        .collect()
}

/// Reusable RK4 workspace.
struct Stepper<'a> {
    model: &'a HamiltonianModel,
    offset: f64,
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
}

impl<'a> Stepper<'a> {
    fn new(model: &'a HamiltonianModel, offset: f64) -> Self {
        let n = model.dim();
        let z = || vec![C64::default(); n];
        Stepper { model, offset, k: [z(), z(), z(), z()], tmp: z() }
    }

    /// `out = −i/ℏ (H(t) − offset) ψ`
    fn rhs(model: &HamiltonianModel, offset: f64, t: f64, psi: &[C64], out: &mut [C64]) {
        model.apply(&model.drive(t), psi, out);
        let scale = C64::new(0.0, -1.0 / HBAR);
        for (o, p) in out.iter_mut().zip(psi) {
            *o = (*o - offset * p) * scale;
        }
    }

    fn step(&mut self, t: f64, dt: f64, psi: &mut [C64]) {
        let (m, c) = (self.model, self.offset);
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;

        Self::rhs(m, c, t, psi, k1);
        for ((x, p), k) in tmp.iter_mut().zip(psi.iter()).zip(k1.iter()) {
            *x = p + k * (0.5 * dt);
        }
        Self::rhs(m, c, t + 0.5 * dt, tmp, k2);
        for ((x, p), k) in tmp.iter_mut().zip(psi.iter()).zip(k2.iter()) {
            *x = p + k * (0.5 * dt);
        }
        Self::rhs(m, c, t + 0.5 * dt, tmp, k3);
        for ((x, p), k) in tmp.iter_mut().zip(psi.iter()).zip(k3.iter()) {
            *x = p + k * dt;
        }
        Self::rhs(m, c, t + dt, tmp, k4);
        let w = dt / 6.0;
        for i in 0..psi.len() {
            psi[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * w;
        }
    }
}

fn check_initial(psi0: &[C64], dim: usize) -> Result<()> {
    if psi0.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "initial state has dimension {}, basis has {dim}",
            psi0.len()
        )));
    }
    let n = norm(psi0);
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("initial state norm {n} is not 1")));
    }
    Ok(())
}

fn restore_phase(psi: &[C64], offset: f64, elapsed: f64) -> Vec<C64> {
    if offset == 0.0 {
        return psi.to_vec();
    }
    let phase = C64::from_polar(1.0, -offset * elapsed / HBAR);
    psi.iter().map(|z| z * phase).collect()
}

/// Evolves `psi` from `t_from` to `t_to` in `steps` equal steps; `t_to` may
/// lie before `t_from`.
pub fn evolve(model: &HamiltonianModel, psi: &[C64], t_from: f64, t_to: f64, steps: usize) -> Result<Vec<C64>> {
    check_initial(psi, model.dim())?;
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    let offset = energy_reference(model);
    let dt = (t_to - t_from) / steps as f64;
    let mut stepper = Stepper::new(model, offset);
    let mut state = psi.to_vec();
    for i in 0..steps {
        let t = t_from + i as f64 * dt;
        stepper.step(t, dt, &mut state);
        check_norm(&state, t + dt)?;
    }
    Ok(restore_phase(&state, offset, t_to - t_from))
}

#[inline]
fn check_norm(psi: &[C64], t: f64) -> Result<()> {
    let drift = (norm(psi) - 1.0).abs();
    if drift > NORM_TOLERANCE || drift.is_nan() {
        return Err(Error::IntegrationFailure { time_fs: t, drift, tolerance: NORM_TOLERANCE });
    }
    Ok(())
}

/// Propagates over the scheme's total window starting from `psi0`.
///
/// The window is divided into `ceil(T/dt)` equal steps, so `dt_used ≤ dt`.
/// Samples are kept every `record_stride` steps and at the final time.
pub fn propagate(model: &HamiltonianModel, psi0: &[C64], dt: f64, record_stride: usize) -> Result<Trajectory> {
    check_initial(psi0, model.dim())?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if record_stride == 0 {
        return Err(Error::InvalidArgument("record_stride must be at least 1".into()));
    }
    let scheme = model.scheme();
    if let Frame::Rotating { .. } = model.frame() {
        let tau = scheme.pulse1.width.min(scheme.pulse2.width);
        if dt > tau / 200.0 {
            return Err(Error::InvalidArgument(format!(
                "dt = {dt} fs exceeds τ/200 = {} fs",
                tau / 200.0
            )));
        }
    }
    let (start, end) = scheme.total_window();
    let steps = ((end - start) / dt).ceil().max(1.0) as usize;
    let h = (end - start) / steps as f64;
    let offset = energy_reference(model);
    let frame = model.frame();

    let capacity = steps / record_stride + 2;
    let mut traj = Trajectory {
        times: Vec::with_capacity(capacity),
        states: Vec::with_capacity(capacity),
        populations: Vec::with_capacity(capacity),
        pulse_fields: Vec::with_capacity(capacity),
        dt_used: h,
        frame,
    };
    let record = |traj: &mut Trajectory, t: f64, psi: &[C64]| {
        let state = restore_phase(psi, offset, t - start);
        traj.populations.push(populations(&state));
        traj.states.push(state);
        traj.times.push(t);
        traj.pulse_fields.push([scheme.pulse1.field(t, frame).re, scheme.pulse2.field(t, frame).re]);
    };

    let mut stepper = Stepper::new(model, offset);
    let mut psi = psi0.to_vec();
    record(&mut traj, start, &psi);
    for i in 0..steps {
        let t = start + i as f64 * h;
        stepper.step(t, h, &mut psi);
        let t_next = if i + 1 == steps { end } else { start + (i + 1) as f64 * h };
        check_norm(&psi, t_next)?;
        if (i + 1) % record_stride == 0 || i + 1 == steps {
            record(&mut traj, t_next, &psi);
        }
    }
    Ok(traj)
}

/// Largest absolute difference of final populations between step sizes
/// `dt` and `dt/2`.
pub fn convergence_check(model: &HamiltonianModel, psi0: &[C64], dt: f64) -> Result<f64> {
    let coarse = propagate(model, psi0, dt, usize::MAX)?;
    let fine = propagate(model, psi0, dt / 2.0, usize::MAX)?;
    Ok(coarse
        .final_populations()
        .iter()
        .zip(fine.final_populations())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Euclidean distance between the final states at step sizes `dt` and
/// `dt/2`.
pub fn state_defect(model: &HamiltonianModel, psi0: &[C64], dt: f64) -> Result<f64> {
    let coarse = propagate(model, psi0, dt, usize::MAX)?;
    let fine = propagate(model, psi0, dt / 2.0, usize::MAX)?;
    Ok(coarse
        .final_state()
        .iter()
        .zip(fine.final_state())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Convergence order from three step sizes `dt`, `dt/2`, `dt/4`:
/// `log₂(defect(dt) / defect(dt/2))`.
pub fn observed_order(model: &HamiltonianModel, psi0: &[C64], dt: f64) -> Result<f64> {
    Ok((state_defect(model, psi0, dt)? / state_defect(model, psi0, dt / 2.0)?).log2())
}
