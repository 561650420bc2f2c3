//! Gaussian two-carrier drive fields.
//!
//! Both pulses are linearly polarized, so the σ⁺ and σ⁻ components are
//! equal. The width of a pulse is the FWHM of its field envelope.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levels::DotParameters;
use crate::units::{angular, HBAR};

/// Minimum center separation, in units of the width, for a sequential scheme.
/// At the midpoint the product of the two peak-normalized envelopes is then
/// below 10⁻³.
pub const SEQUENTIAL_MIN_SEPARATION: f64 = 2.355;

/// Default center separation for the sequential scheme, in widths.
pub const SEQUENTIAL_DEFAULT_SEPARATION: f64 = 2.5;

/// Half-width of the simulation window around each pulse, in widths.
pub const WINDOW_HALF_WIDTHS: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPulse {
    /// Peak coupling d₁·A in meV.
    pub amplitude: f64,
    /// Center in fs.
    pub center: f64,
    /// Field-envelope FWHM in fs.
    pub width: f64,
    /// Carrier photon energy in meV.
    pub carrier: f64,
    pub phase: f64,
}

impl GaussianPulse {
    /// `A·exp(−4 ln2 (t − t₀)²/τ²)`.
    #[inline]
    pub fn envelope(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.width;
        self.amplitude * (-4.0 * LN_2 * x * x).exp()
    }

    /// ∫ exp(−4 ln2 t²/τ²) dt = τ·√(π / (4 ln2)).
    pub fn envelope_integral_per_amplitude(width: f64) -> f64 {
        width * (PI / (4.0 * LN_2)).sqrt()
    }

    /// Rabi pulse area for a transition whose effective coupling is
    /// `effective_dipole · d₁`.
    pub fn area(&self, effective_dipole: f64) -> f64 {
        effective_dipole * self.amplitude * Self::envelope_integral_per_amplitude(self.width) / HBAR
    }

    /// This pulse's contribution to one circular field component.
    #[inline]
    pub fn field(&self, t: f64, frame: Frame) -> C64 {
        let env = self.envelope(t);
        match frame {
            Frame::Lab => C64::new(env * (angular(self.carrier) * t + self.phase).cos(), 0.0),
            Frame::Rotating { reference } => {
                let arg = angular(self.carrier - reference) * t + self.phase;
                C64::from_polar(0.5 * env, -arg)
            }
        }
    }

    fn check(&self, name: &str) -> Result<()> {
        let all_finite = [self.amplitude, self.center, self.width, self.carrier, self.phase]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::invalid(name, "pulse parameters must be finite"));
        }
        if self.width <= 0.0 {
            return Err(Error::invalid(format!("{name}.width_fs"), "must be positive"));
        }
        if self.amplitude < 0.0 {
            return Err(Error::invalid(format!("{name}.amplitude_meV"), "must be nonnegative"));
        }
        Ok(())
    }
}

/// Amplitude giving the requested Rabi area on a transition with coupling
/// `effective_dipole · d₁`.
pub fn amplitude_for_area(area: f64, width: f64, effective_dipole: f64) -> f64 {
    area * HBAR / (effective_dipole * GaussianPulse::envelope_integral_per_amplitude(width))
}

/// Bright-state coupling of the ground-to-exciton step: σ⁺ and σ⁻ both
/// drive level 1, so the effective dipole is √2·d₁.
pub fn ground_exciton_coupling(params: &DotParameters) -> f64 {
    std::f64::consts::SQRT_2 * params.dipole(1)
}

/// Bright-state coupling of the exciton-to-biexciton step, √2·√r·d₁.
pub fn exciton_biexciton_coupling(params: &DotParameters) -> f64 {
    std::f64::consts::SQRT_2 * params.biexciton_dipole(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Sequential,
    Concurrent,
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SchemeKind::Sequential => "sequential",
            SchemeKind::Concurrent => "concurrent",
        })
    }
}

/// Reference frame for field and Hamiltonian evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Frame {
    Lab,
    /// Co-rotating with the given photon energy (meV); counter-rotating
    /// terms are dropped.
    Rotating { reference: f64 },
}

/// Complex σ⁺/σ⁻ field components at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Drive {
    pub plus: C64,
    pub minus: C64,
}

/// Ground-to-exciton pulse followed by or overlapping an
/// exciton-to-biexciton pulse red-shifted by Δ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseScheme {
    pub pulse1: GaussianPulse,
    pub pulse2: GaussianPulse,
    pub kind: SchemeKind,
}

impl PulseScheme {
    /// Scheme with π-area amplitudes on both ladder steps, carriers at ω₁ and
    /// ω₁ − Δ, and default timing for `kind`.
    pub fn pi_pulses(params: &DotParameters, kind: SchemeKind, width: f64) -> Self {
        let a1 = amplitude_for_area(PI, width, ground_exciton_coupling(params));
        let a2 = amplitude_for_area(PI, width, exciton_biexciton_coupling(params));
        let delay = match kind {
            SchemeKind::Sequential => SEQUENTIAL_DEFAULT_SEPARATION * width,
            SchemeKind::Concurrent => 0.0,
        };
        PulseScheme {
            pulse1: GaussianPulse {
                amplitude: a1,
                center: 0.0,
                width,
                carrier: params.omega1,
                phase: 0.0,
            },
            pulse2: GaussianPulse {
                amplitude: a2,
                center: delay,
                width,
                carrier: params.omega1 - params.binding_energy,
                phase: 0.0,
            },
            kind,
        }
    }

    pub fn pulses(&self) -> [&GaussianPulse; 2] {
        [&self.pulse1, &self.pulse2]
    }

    /// Center of pulse 2 minus center of pulse 1.
    pub fn delay(&self) -> f64 {
        self.pulse2.center - self.pulse1.center
    }

    fn max_width(&self) -> f64 {
        self.pulse1.width.max(self.pulse2.width)
    }

    /// Checks pulse invariants, the Δ carrier split and the timing rule of the
    /// scheme kind.
    pub fn validate(&self, params: &DotParameters) -> Result<()> {
        self.pulse1.check("pulse1")?;
        self.pulse2.check("pulse2")?;
        let split = self.pulse1.carrier - self.pulse2.carrier;
        if (split - params.binding_energy).abs() > 1e-9 * params.omega1.abs().max(1.0) {
            return Err(Error::invalid(
                "pulse2.detuning_meV",
                format!(
                    "carrier split between pulses is {split} meV, must equal the binding energy {}",
                    params.binding_energy
                ),
            ));
        }
        let gap = self.delay().abs();
        let tau = self.max_width();
        match self.kind {
            SchemeKind::Sequential if gap < SEQUENTIAL_MIN_SEPARATION * tau => Err(Error::invalid(
                "pulse2.center_fs",
                format!("sequential pulses must be at least {SEQUENTIAL_MIN_SEPARATION}·τ apart, got {gap} fs"),
            )),
            SchemeKind::Concurrent if gap >= tau => Err(Error::invalid(
                "pulse2.center_fs",
                format!("concurrent pulses must be less than τ apart, got {gap} fs"),
            )),
            _ => Ok(()),
        }
    }

    /// Field components. Linear polarization: `E⁺ = E⁻`.
    #[inline]
    pub fn field(&self, t: f64, frame: Frame) -> Drive {
        let e = self.pulse1.field(t, frame) + self.pulse2.field(t, frame);
        Drive { plus: e, minus: e }
    }

    /// `[min t₀ − 4τ, max t₀ + 4τ]`.
    pub fn total_window(&self) -> (f64, f64) {
        let start = self
            .pulses()
            .iter()
            .map(|p| p.center - WINDOW_HALF_WIDTHS * p.width)
            .fold(f64::INFINITY, f64::min);
        let end = self
            .pulses()
            .iter()
            .map(|p| p.center + WINDOW_HALF_WIDTHS * p.width)
            .fold(f64::NEG_INFINITY, f64::max);
        (start, end)
    }

    /// Time-energy uncertainty checks for both pulses.
    pub fn width_warnings(&self, params: &DotParameters) -> Vec<WidthWarning> {
        let mut out = Vec::new();
        for (name, p) in [("pulse1", &self.pulse1), ("pulse2", &self.pulse2)] {
            out.extend(width_warnings(name, p.width, params));
        }
        out
    }
}

/// A pulse too short to spectrally resolve two transitions `spacing` apart.
#[derive(Clone, Debug, PartialEq)]
pub struct WidthWarning {
    pub pulse: String,
    pub width: f64,
    pub spacing: f64,
    pub min_width: f64,
}

impl std::fmt::Display for WidthWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: width {} fs is inside the time-energy uncertainty of a {} meV splitting (needs ≳ {:.0} fs)",
            self.pulse, self.width, self.spacing, self.min_width
        )
    }
}

/// Slack on `2πℏ/E`: the resolution bound is an order-of-magnitude
/// estimate, so 1000 fs passes for the 4 meV binding energy.
const UNCERTAINTY_SLACK: f64 = 0.9;

/// `2πℏ/E` in fs.
pub fn uncertainty_width(spacing_mev: f64) -> f64 {
    2.0 * PI * HBAR / spacing_mev
}

fn width_warnings(name: &str, width: f64, params: &DotParameters) -> Vec<WidthWarning> {
    let mut spacings = vec![params.binding_energy];
    if let Some(&next) = params.level_offsets.get(1) {
        spacings.push(next);
    }
    spacings
        .into_iter()
        .filter_map(|spacing| {
            let min_width = uncertainty_width(spacing);
            (width < UNCERTAINTY_SLACK * min_width).then(|| WidthWarning {
                pulse: name.to_string(),
                width,
                spacing,
                min_width,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pulse() -> GaussianPulse {
        GaussianPulse { amplitude: 2.0, center: 150.0, width: 1000.0, carrier: 1300.0, phase: 0.0 }
    }

    fn params() -> DotParameters {
        DotParameters::typical(2).unwrap()
    }

    #[test]
    fn envelope_landmarks() {
        let p = pulse();
        assert_relative_eq!(p.envelope(150.0), 2.0);
        assert_relative_eq!(p.envelope(150.0 + 500.0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(p.envelope(150.0 - 500.0), 1.0, epsilon = 1e-14);
        // 2^(-36) at three widths
        assert_relative_eq!(p.envelope(150.0 + 3000.0), 2.0 * 2f64.powi(-36), max_relative = 1e-12);
    }

    #[test]
    fn envelope_integral_matches_quadrature() {
        let p = GaussianPulse { amplitude: 1.0, ..pulse() };
        let (a, b, n) = (p.center - 10.0 * p.width, p.center + 10.0 * p.width, 200_000);
        let h = (b - a) / n as f64;
        let sum: f64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * p.envelope(a + i as f64 * h)
            })
            .sum();
        assert_relative_eq!(sum * h, GaussianPulse::envelope_integral_per_amplitude(1000.0), max_relative = 1e-10);
    }

    #[test]
    fn lab_field_peak() {
        // ω t₀ = 2π·m for t₀ = m·2πℏ/ω
        let carrier = 1300.0;
        let t0 = 7.0 * 2.0 * PI * HBAR / carrier;
        let p = GaussianPulse { center: t0, carrier, ..pulse() };
        let e = p.field(t0, Frame::Lab);
        assert_relative_eq!(e.re, 2.0, epsilon = 1e-12);
        assert_eq!(e.im, 0.0);
    }

    #[test]
    fn rotating_field_resonant_has_no_beat() {
        let p = pulse();
        let f = Frame::Rotating { reference: 1300.0 };
        for t in [-800.0, 0.0, 150.0, 900.0] {
            let e = p.field(t, f);
            assert_relative_eq!(e.re, 0.5 * p.envelope(t), epsilon = 1e-15);
            assert!(e.im.abs() < 1e-15);
        }
    }

    #[test]
    fn rotating_field_beats_at_binding_energy() {
        let p = GaussianPulse { carrier: 1296.0, ..pulse() };
        let f = Frame::Rotating { reference: 1300.0 };
        let period = 2.0 * PI * 658.2119569 / 4.0;
        assert_relative_eq!(period, 1033.9, epsilon = 0.1);
        let phase = |t: f64| {
            let e = p.field(t, f);
            (e / e.norm()).arg()
        };
        assert_relative_eq!(phase(0.0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(phase(period / 4.0), PI / 2.0, epsilon = 1e-9);
        assert_relative_eq!(phase(period).sin(), 0.0, epsilon = 1e-9);
        assert_relative_eq!(phase(period).cos(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn windows() {
        let params = params();
        let mut s = PulseScheme::pi_pulses(&params, SchemeKind::Concurrent, 1000.0);
        assert_eq!(s.total_window(), (-4000.0, 4000.0));
        s.pulse2.center = 2500.0;
        s.kind = SchemeKind::Sequential;
        assert_eq!(s.total_window(), (-4000.0, 6500.0));
        let (a, b) = s.total_window();
        // γ⁻¹ = 1 ns = 10⁶ fs
        assert!(b - a < 0.02 * 1e6);
        for p in s.pulses() {
            assert!(p.envelope(a) < 1e-19 * p.amplitude);
            assert!(p.envelope(b) < 1e-19 * p.amplitude);
        }
    }

    #[test]
    fn scheme_validation() {
        let params = params();
        let s = PulseScheme::pi_pulses(&params, SchemeKind::Sequential, 1000.0);
        s.validate(&params).unwrap();
        assert!(s.delay() >= SEQUENTIAL_MIN_SEPARATION * 1000.0);
        // normalized envelope overlap at the midpoint below 1e-3
        let mid = s.pulse1.center + s.delay() / 2.0;
        let overlap = s.pulse1.envelope(mid) / s.pulse1.amplitude * s.pulse2.envelope(mid) / s.pulse2.amplitude;
        assert!(overlap < 1e-3);
        let edge = GaussianPulse { center: SEQUENTIAL_MIN_SEPARATION * 1000.0, ..s.pulse1 };
        let mid = edge.center / 2.0;
        assert!((s.pulse1.envelope(mid) / s.pulse1.amplitude).powi(2) < 1e-3);

        let mut bad = s;
        bad.pulse2.center = 1000.0;
        assert_eq!(bad.validate(&params).unwrap_err().field(), Some("pulse2.center_fs"));

        let mut c = PulseScheme::pi_pulses(&params, SchemeKind::Concurrent, 1000.0);
        c.validate(&params).unwrap();
        c.pulse2.center = 1000.0;
        assert!(c.validate(&params).is_err());

        let mut wrong_carrier = s;
        wrong_carrier.pulse2.carrier = params.omega1;
        assert!(wrong_carrier.validate(&params).is_err());

        let mut neg = s;
        neg.pulse1.width = 0.0;
        assert_eq!(neg.validate(&params).unwrap_err().field(), Some("pulse1.width_fs"));
    }

    #[test]
    fn pi_amplitudes_have_pi_area() {
        let params = params();
        let s = PulseScheme::pi_pulses(&params, SchemeKind::Sequential, 1000.0);
        assert_relative_eq!(s.pulse1.area(ground_exciton_coupling(&params)), PI, epsilon = 1e-12);
        assert_relative_eq!(s.pulse2.area(exciton_biexciton_coupling(&params)), PI, epsilon = 1e-12);
    }

    #[test]
    fn uncertainty_warnings() {
        let params = params();
        let long = PulseScheme::pi_pulses(&params, SchemeKind::Sequential, 1000.0);
        assert!(long.width_warnings(&params).is_empty());
        let short = PulseScheme::pi_pulses(&params, SchemeKind::Sequential, 100.0);
        let w = short.width_warnings(&params);
        assert!(w.iter().any(|w| w.spacing == 4.0));
        assert_relative_eq!(uncertainty_width(4.0), 1033.9, epsilon = 0.1);
        assert_relative_eq!(uncertainty_width(40.0), 103.39, epsilon = 0.01);
        let very_short = PulseScheme::pi_pulses(&params, SchemeKind::Sequential, 50.0);
        assert_eq!(very_short.width_warnings(&params).len(), 4);
    }

    proptest! {
        #[test]
        fn envelope_even_and_positive(x in 0.0f64..10.0, width in 50.0f64..3000.0) {
            let p = GaussianPulse { width, ..pulse() };
            let dt = x * width;
            let (l, r) = (p.envelope(p.center - dt), p.envelope(p.center + dt));
            prop_assert!((l - r).abs() <= 1e-12 * r);
            prop_assert!(r > 0.0);
        }

        #[test]
        fn lab_field_is_real(t in -5000.0f64..5000.0, phase in -3.2f64..3.2) {
            let params = params();
            let mut s = PulseScheme::pi_pulses(&params, SchemeKind::Concurrent, 1000.0);
            s.pulse2.phase = phase;
            let d = s.field(t, Frame::Lab);
            prop_assert_eq!(d.plus.im, 0.0);
            prop_assert_eq!(d.plus, d.minus);
        }
    }
}
