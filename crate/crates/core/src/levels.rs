//! State basis and dipole selection rules.
//!
//! The basis holds the ground state, `2n` single excitons `|k^s⟩` and every
//! biexciton built from two distinct `(level, spin)` excitons. Ordering is
//! fixed: ground, then excitons sorted by `(level, spin)` with `+` before `-`,
//! then biexcitons in lexicographic order of their canonical pair. CSV
//! columns and matrix indices follow this order.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Circular polarization / spin index of an exciton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    Plus,
    Minus,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Plus, Spin::Minus];

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Plus => Spin::Minus,
            Spin::Minus => Spin::Plus,
        }
    }

    fn symbol(self) -> char {
        match self {
            Spin::Plus => '+',
            Spin::Minus => '-',
        }
    }
}

impl std::ops::Neg for Spin {
    type Output = Spin;
    fn neg(self) -> Spin {
        self.flipped()
    }
}

/// A single exciton `|k^s⟩`; `level` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exciton {
    pub level: u32,
    pub spin: Spin,
}

impl Exciton {
    pub fn new(level: u32, spin: Spin) -> Self {
        Exciton { level, spin }
    }
}

impl fmt::Display for Exciton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.level, self.spin.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateLabel {
    Ground,
    Exciton(Exciton),
    /// Always stored with the smaller member first; build through
    /// [`StateLabel::biexciton`].
    Biexciton(Exciton, Exciton),
}

impl StateLabel {
    pub fn exciton(level: u32, spin: Spin) -> Self {
        StateLabel::Exciton(Exciton::new(level, spin))
    }

    /// Canonical biexciton label. Returns `None` when both members coincide.
    pub fn biexciton(a: Exciton, b: Exciton) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(StateLabel::Biexciton(a, b)),
            std::cmp::Ordering::Greater => Some(StateLabel::Biexciton(b, a)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn exciton_count(&self) -> u8 {
        match self {
            StateLabel::Ground => 0,
            StateLabel::Exciton(_) => 1,
            StateLabel::Biexciton(..) => 2,
        }
    }

    /// Excitons occupied in this state, in canonical order.
    pub fn members(&self) -> Vec<Exciton> {
        match *self {
            StateLabel::Ground => vec![],
            StateLabel::Exciton(x) => vec![x],
            StateLabel::Biexciton(a, b) => vec![a, b],
        }
    }

    fn max_level(&self) -> u32 {
        self.members().iter().map(|x| x.level).max().unwrap_or(0)
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateLabel::Ground => write!(f, "G"),
            StateLabel::Exciton(x) => write!(f, "X{x}"),
            StateLabel::Biexciton(a, b) => write!(f, "B({a},{b})"),
        }
    }
}

fn parse_exciton(s: &str) -> Option<Exciton> {
    let (level, spin) = s.split_at(s.len().checked_sub(1)?);
    let spin = match spin {
        "+" => Spin::Plus,
        "-" => Spin::Minus,
        _ => return None,
    };
    let level: u32 = level.parse().ok()?;
    (level >= 1).then_some(Exciton::new(level, spin))
}

impl FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("malformed state label {s:?}"));
        if s == "G" {
            return Ok(StateLabel::Ground);
        }
        if let Some(rest) = s.strip_prefix('X') {
            return parse_exciton(rest).map(StateLabel::Exciton).ok_or_else(bad);
        }
        let inner = s
            .strip_prefix("B(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let a = parse_exciton(a.trim()).ok_or_else(bad)?;
        let b = parse_exciton(b.trim()).ok_or_else(bad)?;
        StateLabel::biexciton(a, b).ok_or_else(bad)
    }
}

impl Serialize for StateLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StateLabel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug)]
pub struct LevelBasis {
    n_levels: u32,
    states: Vec<StateLabel>,
    index: HashMap<StateLabel, usize>,
}

/// `1 + 2n + n(2n - 1)`.
pub fn basis_size(n_levels: u32) -> usize {
    let n = n_levels as usize;
    1 + 2 * n + n * (2 * n - 1)
}

impl LevelBasis {
    pub fn new(n_levels: u32) -> Result<Self> {
        if n_levels == 0 {
            return Err(Error::InvalidArgument("n_levels must be at least 1".into()));
        }
        let excitons: Vec<Exciton> = (1..=n_levels)
            .flat_map(|k| Spin::BOTH.map(|s| Exciton::new(k, s)))
            .collect();
        let mut states = Vec::with_capacity(basis_size(n_levels));
        states.push(StateLabel::Ground);
        states.extend(excitons.iter().copied().map(StateLabel::Exciton));
        for (i, &a) in excitons.iter().enumerate() {
            for &b in &excitons[i + 1..] {
                states.push(StateLabel::Biexciton(a, b));
            }
        }
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Ok(LevelBasis { n_levels, states, index })
    }

    pub fn n_levels(&self) -> u32 {
        self.n_levels
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[StateLabel] {
        &self.states
    }

    pub fn label(&self, i: usize) -> StateLabel {
        self.states[i]
    }

    pub fn index_of(&self, label: &StateLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn exciton_count(&self, i: usize) -> u8 {
        self.states[i].exciton_count()
    }

    /// Indices of the `2n` single-exciton states.
    pub fn single_excitons(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.exciton_count(i) == 1).collect()
    }

    /// Index of the lowest biexciton `|1⁺,1⁻⟩`.
    pub fn target(&self) -> usize {
        let label = StateLabel::biexciton(Exciton::new(1, Spin::Plus), Exciton::new(1, Spin::Minus))
            .expect("distinct members");
        self.index[&label]
    }

    pub fn contains(&self, label: &StateLabel) -> bool {
        label.max_level() <= self.n_levels && self.index.contains_key(label)
    }
}

/// Physical constants of the dot. Energies in meV, dipoles relative to `d₁`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DotParameters {
    /// ℏω₁, ground-to-lowest-exciton transition energy.
    pub omega1: f64,
    /// ω_k − ω₁ for each exciton level; first entry is 0.
    pub level_offsets: Vec<f64>,
    /// Biexciton binding energy Δ.
    pub binding_energy: f64,
    /// Ground-to-exciton dipoles d_k.
    pub dipoles: Vec<f64>,
    /// Oscillator-strength ratio r, exciton-to-biexciton dipoles are √r·d_k.
    pub biexciton_dipole_ratio: f64,
    /// Radiative decay rate γ in 1/ns.
    pub gamma: f64,
}

impl DotParameters {
    /// Typical lens-shaped InGaAs/GaAs dot: ℏω₁ = 1.3 eV, second level 40 meV
    /// higher with a √2 stronger dipole, Δ = 4 meV, ratio 0.8, γ = 1/ns.
    ///
    /// Only `n_levels` 1 and 2 have published values.
    pub fn typical(n_levels: u32) -> Result<Self> {
        let (level_offsets, dipoles) = match n_levels {
            1 => (vec![0.0], vec![1.0]),
            2 => (vec![0.0, 40.0], vec![1.0, std::f64::consts::SQRT_2]),
            n => {
                return Err(Error::InvalidArgument(format!(
                    "no default level table for n_levels = {n}; give level_offsets and dipoles"
                )))
            }
        };
        Ok(DotParameters {
            omega1: 1300.0,
            level_offsets,
            binding_energy: 4.0,
            dipoles,
            biexciton_dipole_ratio: 0.8,
            gamma: 1.0,
        })
    }

    pub fn n_levels(&self) -> u32 {
        self.level_offsets.len() as u32
    }

    /// ℏω_k for a 1-based level.
    pub fn exciton_energy(&self, level: u32) -> f64 {
        self.omega1 + self.level_offsets[level as usize - 1]
    }

    pub fn dipole(&self, level: u32) -> f64 {
        self.dipoles[level as usize - 1]
    }

    pub fn biexciton_dipole(&self, level: u32) -> f64 {
        self.biexciton_dipole_ratio.sqrt() * self.dipole(level)
    }

    /// Checks all invariants; errors name the offending `dot.*` field.
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("dot.{name}"), "must be finite"))
            }
        };
        finite("omega1", self.omega1)?;
        finite("binding_energy", self.binding_energy)?;
        finite("biexciton_dipole_ratio", self.biexciton_dipole_ratio)?;
        finite("gamma", self.gamma)?;
        if self.omega1 <= 0.0 {
            return Err(Error::invalid("dot.omega1", "must be positive"));
        }
        if self.binding_energy <= 0.0 {
            return Err(Error::invalid("dot.binding_energy", "must be positive"));
        }
        if self.level_offsets.is_empty() {
            return Err(Error::invalid("dot.level_offsets", "needs at least one level"));
        }
        if self.level_offsets[0] != 0.0 {
            return Err(Error::invalid("dot.level_offsets", "first offset must be 0"));
        }
        if self.level_offsets.iter().any(|v| !v.is_finite())
            || self.level_offsets.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::invalid("dot.level_offsets", "must be finite and strictly increasing"));
        }
        if self.dipoles.len() != self.level_offsets.len() {
            return Err(Error::invalid(
                "dot.dipoles",
                format!("expected {} entries, one per level", self.level_offsets.len()),
            ));
        }
        if self.dipoles.iter().any(|d| !d.is_finite() || *d <= 0.0) {
            return Err(Error::invalid("dot.dipoles", "must be finite and positive"));
        }
        if !(self.biexciton_dipole_ratio > 0.0 && self.biexciton_dipole_ratio <= 1.0) {
            return Err(Error::invalid("dot.biexciton_dipole_ratio", "must lie in (0, 1]"));
        }
        if self.gamma < 0.0 {
            return Err(Error::invalid("dot.gamma", "must be nonnegative"));
        }
        Ok(())
    }
}

/// One dipole-allowed edge, lower → upper. The Hermitian partner is implied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub from: StateLabel,
    pub to: StateLabel,
    pub polarization: Spin,
    pub dipole: f64,
}

/// All dipole-allowed transitions: `|0⟩ → |k^s⟩` via σ_s with `d_k`, and
/// `|j^{s'}⟩ → |k^s, j^{s'}⟩` via σ_s with `√r·d_k` (this includes the
/// same-level pair `|k⁺,k⁻⟩`).
pub fn allowed_transitions(basis: &LevelBasis, params: &DotParameters) -> Result<Vec<Transition>> {
    if basis.n_levels() != params.n_levels() {
        return Err(Error::InvalidArgument(format!(
            "basis has {} levels but parameters describe {}",
            basis.n_levels(),
            params.n_levels()
        )));
    }
    let mut edges = Vec::new();
    for label in basis.states() {
        match *label {
            StateLabel::Ground => {}
            StateLabel::Exciton(x) => edges.push(Transition {
                from: StateLabel::Ground,
                to: *label,
                polarization: x.spin,
                dipole: params.dipole(x.level),
            }),
            StateLabel::Biexciton(a, b) => {
                for (present, added) in [(a, b), (b, a)] {
                    edges.push(Transition {
                        from: StateLabel::Exciton(present),
                        to: *label,
                        polarization: added.spin,
                        dipole: params.biexciton_dipole(added.level),
                    });
                }
            }
        }
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(level: u32, spin: Spin) -> Exciton {
        Exciton::new(level, spin)
    }

    #[test]
    fn one_level_basis() {
        let b = LevelBasis::new(1).unwrap();
        let names: Vec<String> = b.states().iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["G", "X1+", "X1-", "B(1+,1-)"]);
    }

    #[test]
    fn two_level_biexcitons() {
        let b = LevelBasis::new(2).unwrap();
        assert_eq!(b.len(), 11);
        let names: Vec<String> = b.states()[5..].iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["B(1+,1-)", "B(1+,2+)", "B(1+,2-)", "B(1-,2+)", "B(1-,2-)", "B(2+,2-)"]);
        assert_eq!(b.target(), 5);
    }

    #[test]
    fn zero_levels_rejected() {
        assert!(matches!(LevelBasis::new(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn size_against_brute_force() {
        for n in 1..=4u32 {
            let excitons: Vec<_> = (1..=n).flat_map(|k| Spin::BOTH.map(|s| (k, s))).collect();
            let mut pairs = 0;
            for a in &excitons {
                for b in &excitons {
                    if a < b {
                        pairs += 1;
                    }
                }
            }
            let expected = 1 + excitons.len() + pairs;
            assert_eq!(LevelBasis::new(n).unwrap().len(), expected);
            assert_eq!(basis_size(n), expected);
        }
    }

    #[test]
    fn biexciton_label_is_order_free() {
        let b = LevelBasis::new(2).unwrap();
        let p = StateLabel::biexciton(x(2, Spin::Minus), x(1, Spin::Plus)).unwrap();
        let q = StateLabel::biexciton(x(1, Spin::Plus), x(2, Spin::Minus)).unwrap();
        assert_eq!(b.index_of(&p), b.index_of(&q));
        assert!(StateLabel::biexciton(x(1, Spin::Plus), x(1, Spin::Plus)).is_none());
    }

    #[test]
    fn label_strings_parse_back() {
        let b = LevelBasis::new(3).unwrap();
        for s in b.states() {
            assert_eq!(s.to_string().parse::<StateLabel>().unwrap(), *s);
        }
        assert_eq!("B(2-,1+)".parse::<StateLabel>().unwrap().to_string(), "B(1+,2-)");
        assert!("X0+".parse::<StateLabel>().is_err());
        assert!("B(1+,1+)".parse::<StateLabel>().is_err());
        assert!("Y".parse::<StateLabel>().is_err());
    }

    #[test]
    fn spin_negation_is_involution() {
        for s in Spin::BOTH {
            assert_eq!(-(-s), s);
            assert_ne!(-s, s);
        }
    }

    #[test]
    fn one_level_edges() {
        let b = LevelBasis::new(1).unwrap();
        let p = DotParameters::typical(1).unwrap();
        let e = allowed_transitions(&b, &p).unwrap();
        let got: Vec<(String, String, Spin)> =
            e.iter().map(|t| (t.from.to_string(), t.to.to_string(), t.polarization)).collect();
        let want = [
            ("G", "X1+", Spin::Plus),
            ("G", "X1-", Spin::Minus),
            ("X1+", "B(1+,1-)", Spin::Minus),
            ("X1-", "B(1+,1-)", Spin::Plus),
        ];
        assert_eq!(got.len(), 4);
        for (f, t, s) in want {
            assert!(got.contains(&(f.into(), t.into(), s)), "missing {f}->{t}");
        }
    }

    /// Exciton → biexciton edges enumerated from the coupling sums directly:
    /// same-level `|k^{-s}⟩ → |k⁺,k⁻⟩` via s, and `|j^{s'}⟩ → |k^s,j^{s'}⟩`
    /// for k ≠ j.
    fn hand_enumerated(n: u32, ratio: f64, d: &[f64]) -> Vec<(StateLabel, StateLabel, Spin, f64)> {
        let mut out = vec![];
        for k in 1..=n {
            for s in Spin::BOTH {
                out.push((
                    StateLabel::exciton(k, -s),
                    StateLabel::biexciton(x(k, Spin::Plus), x(k, Spin::Minus)).unwrap(),
                    s,
                    ratio.sqrt() * d[k as usize - 1],
                ));
            }
        }
        for k in 1..=n {
            for j in 1..=n {
                if k == j {
                    continue;
                }
                for s in Spin::BOTH {
                    for sp in Spin::BOTH {
                        out.push((
                            StateLabel::exciton(j, sp),
                            StateLabel::biexciton(x(k, s), x(j, sp)).unwrap(),
                            s,
                            ratio.sqrt() * d[k as usize - 1],
                        ));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn two_level_edges_match_hand_enumeration() {
        let b = LevelBasis::new(2).unwrap();
        let p = DotParameters::typical(2).unwrap();
        let edges = allowed_transitions(&b, &p).unwrap();
        let upper: Vec<_> = edges.iter().filter(|e| e.from != StateLabel::Ground).collect();
        let hand = hand_enumerated(2, 0.8, &p.dipoles);
        assert_eq!(upper.len(), hand.len());
        assert_eq!(upper.len(), 12);
        for (f, t, s, d) in hand {
            let hit = upper
                .iter()
                .find(|e| e.from == f && e.to == t)
                .unwrap_or_else(|| panic!("missing {f} -> {t}"));
            assert_eq!(hit.polarization, s);
            assert!((hit.dipole - d).abs() < 1e-15);
        }
        assert_eq!(edges.iter().filter(|e| e.from == StateLabel::Ground).count(), 4);
    }

    #[test]
    fn mixed_edge_polarization_and_dipole() {
        let b = LevelBasis::new(2).unwrap();
        let p = DotParameters::typical(2).unwrap();
        let edges = allowed_transitions(&b, &p).unwrap();
        let from: StateLabel = "X2-".parse().unwrap();
        let to: StateLabel = "B(1+,2-)".parse().unwrap();
        let e = edges.iter().find(|e| e.from == from && e.to == to).unwrap();
        assert_eq!(e.polarization, Spin::Plus);
        assert!((e.dipole - 0.8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn edges_change_exciton_number_by_one() {
        for n in 1..=3 {
            let b = LevelBasis::new(n).unwrap();
            let mut p = DotParameters::typical(2).unwrap();
            p.level_offsets = (0..n).map(|k| 40.0 * k as f64).collect();
            p.dipoles = vec![1.0; n as usize];
            for e in allowed_transitions(&b, &p).unwrap() {
                assert_eq!(e.to.exciton_count(), e.from.exciton_count() + 1);
                let (i, j) = (b.index_of(&e.from).unwrap(), b.index_of(&e.to).unwrap());
                assert_eq!(b.label(i), e.from);
                assert_eq!(b.label(j), e.to);
            }
        }
    }

    #[test]
    fn mismatched_levels_rejected() {
        let b = LevelBasis::new(1).unwrap();
        let p = DotParameters::typical(2).unwrap();
        assert!(allowed_transitions(&b, &p).is_err());
    }

    #[test]
    fn parameter_validation_names_field() {
        let mut p = DotParameters::typical(2).unwrap();
        p.binding_energy = -1.0;
        assert_eq!(p.validate().unwrap_err().field(), Some("dot.binding_energy"));
        let mut p = DotParameters::typical(2).unwrap();
        p.biexciton_dipole_ratio = 1.5;
        assert_eq!(p.validate().unwrap_err().field(), Some("dot.biexciton_dipole_ratio"));
        let mut p = DotParameters::typical(2).unwrap();
        p.level_offsets = vec![0.0, -3.0];
        assert_eq!(p.validate().unwrap_err().field(), Some("dot.level_offsets"));
    }
}
