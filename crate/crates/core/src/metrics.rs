//! Figures of merit: final population bookkeeping, time spent in the single
//! exciton states and the resulting estimate of unentangled photons.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::levels::{DotParameters, LevelBasis};
use crate::units::PER_NS_TO_PER_FS;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub final_populations: BTreeMap<String, f64>,
    /// Population of `|1⁺,1⁻⟩`.
    pub p_biexciton_target: f64,
    pub p_ground: f64,
    /// Everything that is neither target nor ground.
    pub p_residual: f64,
    pub dwell_fs: f64,
    pub bad_photon_estimate: f64,
    pub objective: f64,
}

/// Trapezoidal integral over the recorded samples of the summed population
/// of `states`, in fs.
pub fn dwell_time(traj: &Trajectory, states: &[usize]) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::InvalidArgument("dwell_time needs at least one state".into()));
    }
    let summed = |i: usize| states.iter().map(|&s| traj.populations[i][s]).sum::<f64>();
    Ok(traj
        .times
        .windows(2)
        .enumerate()
        .map(|(i, w)| 0.5 * (w[1] - w[0]) * (summed(i) + summed(i + 1)))
        .sum())
}

/// Leftover population outside ground and target plus in-flight decay
/// `γ·dwell` (γ in 1/ns, dwell in fs).
pub fn bad_photon_estimate(p_residual: f64, dwell_fs: f64, gamma_per_ns: f64) -> f64 {
    p_residual + gamma_per_ns * PER_NS_TO_PER_FS * dwell_fs
}

pub fn summarize(traj: &Trajectory, basis: &LevelBasis, params: &DotParameters) -> Result<TransferReport> {
    let last = traj.final_populations();
    if last.len() != basis.len() {
        return Err(Error::InvalidArgument("trajectory does not match basis".into()));
    }
    let final_populations = basis
        .states()
        .iter()
        .zip(last)
        .map(|(s, &p)| (s.to_string(), p))
        .collect();
    let p_biexciton_target = last[basis.target()];
    let p_ground = last[0];
    let total: f64 = last.iter().sum();
    // clamp away norm drift at the 1e-9 level
    let p_residual = (total - p_biexciton_target - p_ground).max(0.0);
    let dwell_fs = dwell_time(traj, &basis.single_excitons())?;
    let bad = bad_photon_estimate(p_residual, dwell_fs, params.gamma);
    Ok(TransferReport {
        final_populations,
        p_biexciton_target,
        p_ground,
        p_residual,
        dwell_fs,
        bad_photon_estimate: bad,
        objective: bad,
    })
}
