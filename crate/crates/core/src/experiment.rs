//! One-shot simulation of a scheme: build the model, propagate from the
//! ground state and summarize.

use serde::{Deserialize, Serialize};

use crate::dynamics::{self, basis_state, Trajectory};
use crate::error::Result;
use crate::hamiltonian::HamiltonianModel;
use crate::levels::{DotParameters, LevelBasis};
use crate::metrics::{summarize, TransferReport};
use crate::pulses::{Frame, PulseScheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    Lab,
    Rotating,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub dt_fs: f64,
    pub record_stride: usize,
    pub frame: FrameKind,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt_fs: dynamics::DEFAULT_DT_ROTATING,
            record_stride: dynamics::DEFAULT_RECORD_STRIDE,
            frame: FrameKind::Rotating,
        }
    }
}

impl SimConfig {
    pub fn frame_for(&self, params: &DotParameters) -> Frame {
        match self.frame {
            FrameKind::Lab => Frame::Lab,
            FrameKind::Rotating => Frame::Rotating { reference: params.omega1 },
        }
    }
}

/// Fixed physics shared by every evaluation of an experiment.
#[derive(Clone, Debug)]
pub struct Setup {
    pub basis: LevelBasis,
    pub params: DotParameters,
    pub sim: SimConfig,
}

impl Setup {
    pub fn new(params: DotParameters, sim: SimConfig) -> Result<Self> {
        let basis = LevelBasis::new(params.n_levels())?;
        Ok(Setup { basis, params, sim })
    }

    pub fn model(&self, scheme: PulseScheme) -> Result<HamiltonianModel> {
        HamiltonianModel::new(self.basis.clone(), self.params.clone(), scheme, self.sim.frame_for(&self.params))
    }

    /// Propagates `scheme` from the ground state.
    pub fn run(&self, scheme: PulseScheme) -> Result<(Trajectory, TransferReport)> {
        let model = self.model(scheme)?;
        let psi0 = basis_state(model.dim(), 0);
        let traj = dynamics::propagate(&model, &psi0, self.sim.dt_fs, self.sim.record_stride)?;
        let report = summarize(&traj, &self.basis, &self.params)?;
        Ok((traj, report))
    }

    pub fn report(&self, scheme: PulseScheme) -> Result<TransferReport> {
        self.run(scheme).map(|(_, r)| r)
    }
}
