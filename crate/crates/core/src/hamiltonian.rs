//! Dipole-approximation Hamiltonian over a [`LevelBasis`].
//!
//! Diagonal: `0` for ground, `ℏω_k` for `|k^s⟩`, `2ℏω_k − Δ` for `|k⁺,k⁻⟩`
//! and `ℏω_j + ℏω_k − Δ` for mixed biexcitons. Each allowed transition adds
//! `−d·E^s(t)` below the diagonal and its conjugate above. In the rotating
//! frame every diagonal entry is lowered by `exciton_count·ℏω₁` and the
//! field is replaced by its co-rotating half-envelope.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::levels::{allowed_transitions, DotParameters, LevelBasis, Spin, StateLabel, Transition};
use crate::pulses::{Drive, Frame, PulseScheme};

#[derive(Clone, Copy, Debug, PartialEq)]
struct Coupling {
    upper: usize,
    lower: usize,
    polarization: Spin,
    dipole: f64,
}

#[derive(Clone, Debug)]
pub struct HamiltonianModel {
    basis: LevelBasis,
    params: DotParameters,
    scheme: PulseScheme,
    frame: Frame,
    diagonal: Vec<f64>,
    couplings: Vec<Coupling>,
}

fn bare_energy(label: &StateLabel, params: &DotParameters) -> f64 {
    match *label {
        StateLabel::Ground => 0.0,
        StateLabel::Exciton(x) => params.exciton_energy(x.level),
        StateLabel::Biexciton(a, b) => {
            params.exciton_energy(a.level) + params.exciton_energy(b.level) - params.binding_energy
        }
    }
}

impl HamiltonianModel {
    /// Fails with `InvalidConfiguration` when a rotating frame does not
    /// co-rotate with ω₁, and with `InvalidArgument` when basis and
    /// parameters disagree on the number of levels.
    pub fn new(basis: LevelBasis, params: DotParameters, scheme: PulseScheme, frame: Frame) -> Result<Self> {
        if let Frame::Rotating { reference } = frame {
            if reference != params.omega1 {
                return Err(Error::InvalidConfiguration(format!(
                    "rotating frame reference {reference} meV differs from ω₁ = {} meV",
                    params.omega1
                )));
            }
        }
        let edges = allowed_transitions(&basis, &params)?;
        let shift = match frame {
            Frame::Lab => 0.0,
            Frame::Rotating { reference } => reference,
        };
        let diagonal = basis
            .states()
            .iter()
            .map(|s| bare_energy(s, &params) - s.exciton_count() as f64 * shift)
            .collect();
        let couplings = edges
            .iter()
            .map(|e: &Transition| Coupling {
                upper: basis.index_of(&e.to).expect("edge target in basis"),
                lower: basis.index_of(&e.from).expect("edge source in basis"),
                polarization: e.polarization,
                dipole: e.dipole,
            })
            .collect();
        Ok(HamiltonianModel { basis, params, scheme, frame, diagonal, couplings })
    }

    /// Rotating frame at ω₁.
    pub fn rotating(basis: LevelBasis, params: DotParameters, scheme: PulseScheme) -> Result<Self> {
        let frame = Frame::Rotating { reference: params.omega1 };
        Self::new(basis, params, scheme, frame)
    }

    /// Drops every exciton-to-biexciton coupling, leaving the ground-to-exciton
    /// ladder as an isolated two-level problem per polarization.
    pub fn without_biexciton_coupling(mut self) -> Self {
        let basis = &self.basis;
        self.couplings.retain(|c| basis.exciton_count(c.lower) == 0);
        self
    }

    pub fn basis(&self) -> &LevelBasis {
        &self.basis
    }

    pub fn params(&self) -> &DotParameters {
        &self.params
    }

    pub fn scheme(&self) -> &PulseScheme {
        &self.scheme
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Diagonal energies in meV, in basis order.
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn coupling_count(&self) -> usize {
        self.couplings.len()
    }

    #[inline]
    pub fn drive(&self, t: f64) -> Drive {
        self.scheme.field(t, self.frame)
    }

    /// Dense `H(t)` in meV.
    pub fn evaluate(&self, t: f64) -> DMatrix<C64> {
        let drive = self.drive(t);
        let n = self.dim();
        let mut h = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            self.diagonal.iter().map(|&e| C64::new(e, 0.0)),
        ));
        for c in &self.couplings {
            let v = self.element(c, &drive);
            h[(c.upper, c.lower)] += v;
            h[(c.lower, c.upper)] += v.conj();
        }
        h
    }

    #[inline]
    fn element(&self, c: &Coupling, drive: &Drive) -> C64 {
        let e = match c.polarization {
            Spin::Plus => drive.plus,
            Spin::Minus => drive.minus,
        };
        -c.dipole * e
    }

    /// `out = H(t)·ψ` for a precomputed drive, without forming the matrix.
    #[inline]
    pub fn apply(&self, drive: &Drive, psi: &[C64], out: &mut [C64]) {
        for ((o, &e), &p) in out.iter_mut().zip(&self.diagonal).zip(psi) {
            *o = p * e;
        }
        for c in &self.couplings {
            let v = self.element(c, drive);
            out[c.upper] += v * psi[c.lower];
            out[c.lower] += v.conj() * psi[c.upper];
        }
    }

    pub fn hermiticity_defect(&self, t: f64) -> f64 {
        hermiticity_defect(&self.evaluate(t))
    }

    /// Matrix at `t` for cross-implementation diffing.
    pub fn dump(&self, t: f64) -> MatrixDump {
        let h = self.evaluate(t);
        let n = self.dim();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push([h[(i, j)].re, h[(i, j)].im]);
            }
        }
        MatrixDump {
            t_fs: t,
            dim: n,
            labels: self.basis.states().iter().map(|s| s.to_string()).collect(),
            entries,
        }
    }
}

/// Largest `|H − H†|` entry.
pub fn hermiticity_defect(h: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Row-major matrix with `[re, im]` entries.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixDump {
    pub t_fs: f64,
    pub dim: usize,
    pub labels: Vec<String>,
    pub entries: Vec<[f64; 2]>,
}
