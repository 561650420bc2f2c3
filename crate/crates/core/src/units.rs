//! Unit conventions.
//!
//! Energies and frequencies are stored in meV, times in fs. The reduced
//! Planck constant is the only conversion factor between the two.

/// ℏ in meV·fs.
pub const HBAR: f64 = 658.2119569;

/// Converts an energy (meV) to an angular frequency (rad/fs).
#[inline]
pub fn angular(energy_mev: f64) -> f64 {
    energy_mev / HBAR
}

/// Rate conversion: 1/ns to 1/fs.
pub const PER_NS_TO_PER_FS: f64 = 1e-6;
