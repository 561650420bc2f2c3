//! Coherent two-pulse preparation of the lowest biexciton of a
//! self-assembled quantum dot.
//!
//! The crate builds the ground/exciton/biexciton ladder of a dot with a
//! configurable number of exciton levels, drives it with two linearly
//! polarized Gaussian pulses (one resonant with the ground-to-exciton line,
//! one red-shifted by the biexciton binding energy), integrates the
//! Schrödinger equation and reports how much population ends in `|1⁺,1⁻⟩`
//! together with an estimate of unentangled photon emission. An optimizer
//! tunes pulse amplitudes and timing for the sequential and concurrent
//! pulse orderings.

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod hamiltonian;
pub mod levels;
pub mod metrics;
pub mod optimizer;
pub mod output;
pub mod parallel;
pub mod pulses;
pub mod units;
pub mod validate;

pub use error::{Error, Result};
pub use experiment::{FrameKind, Setup, SimConfig};
pub use hamiltonian::HamiltonianModel;
pub use levels::{DotParameters, LevelBasis, Spin, StateLabel};
pub use metrics::TransferReport;
pub use pulses::{Frame, GaussianPulse, PulseScheme, SchemeKind};
