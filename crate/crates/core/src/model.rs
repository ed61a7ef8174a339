//! System, bath, and spectrum specifications.
//!
//! Everything here is declarative and immutable after validation; the
//! compute modules consume these specs without further checking.
//!
//! Level ordering conventions (fixed, used by all matrices downstream):
//! - Λ-type: |0⟩ = g₁, |1⟩ = g₂, |2⟩ = e
//! - V-type: |0⟩ = g,  |1⟩ = e₁, |2⟩ = e₂
//! - Ξ-type: |0⟩ = g,  |1⟩ = e₁, |2⟩ = e₂ (ladder)
//! - coupled TLS pair (eigenbasis): |0⟩ = G, |1⟩ = E₁, |2⟩ = E₂, |3⟩ = D

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rates::weight_factor;
use crate::CMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("{kind:?}: level ordering violates the structure: {detail}")]
    InvalidLevelOrdering { kind: SystemKind, detail: String },
    #[error("coupled pair requires omega1, omega2 > 0 (got {omega1}, {omega2})")]
    NonPositiveSplitting { omega1: f64, omega2: f64 },
    #[error("bath temperature must be >= 0, got {0}")]
    NegativeTemperature(f64),
    #[error("diagonal spectral value gamma{pair}{pair}({omega}) = {value} is negative")]
    NegativeSpectralValue { pair: usize, omega: f64, value: f64 },
    #[error("tabulated spectrum has no entry for pair ({i},{j}) at omega = {omega}")]
    MissingSpectralEntry { i: usize, j: usize, omega: f64 },
    #[error("weight factor must lie in [0, 1], got {0}")]
    WeightOutOfRange(f64),
    #[error("weight factor dimension must be 1, 2, or 3, got {0}")]
    BadWeightDimension(u8),
    #[error("distance scale must be >= 0, got {0}")]
    NegativeDistanceScale(f64),
    #[error("spectral model only defined for omega > 0, got {0}")]
    NonPositiveFrequency(f64),
    #[error("operation requires a three-level system, got {0:?}")]
    NotThreeLevel(SystemKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Lambda,
    Vee,
    Xi,
    CoupledTls,
}

/// Validated level structure of the open system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemSpec {
    /// Two low levels g₁, g₂ below a common excited level e.
    Lambda { e_g1: f64, e_g2: f64, e_e: f64 },
    /// Two excited levels e₁, e₂ above a common ground level g.
    Vee { e_g: f64, e_e1: f64, e_e2: f64 },
    /// Strict ladder g < e₁ < e₂ with transitions g↔e₁ and e₁↔e₂.
    Xi { e_g: f64, e_e1: f64, e_e2: f64 },
    /// Two exchange-coupled two-level systems (see [`crate::flux`]).
    CoupledTls { omega1: f64, omega2: f64, g: f64 },
}

impl SystemSpec {
    pub fn lambda(e_g1: f64, e_g2: f64, e_e: f64) -> Result<Self, ModelError> {
        if e_e <= e_g1 || e_e <= e_g2 {
            return Err(ModelError::InvalidLevelOrdering {
                kind: SystemKind::Lambda,
                detail: format!("need E_e > E_g1 and E_e > E_g2, got ({e_g1}, {e_g2}, {e_e})"),
            });
        }
        Ok(SystemSpec::Lambda { e_g1, e_g2, e_e })
    }

    pub fn vee(e_g: f64, e_e1: f64, e_e2: f64) -> Result<Self, ModelError> {
        if e_e1 <= e_g || e_e2 <= e_g {
            return Err(ModelError::InvalidLevelOrdering {
                kind: SystemKind::Vee,
                detail: format!("need E_e1 > E_g and E_e2 > E_g, got ({e_g}, {e_e1}, {e_e2})"),
            });
        }
        Ok(SystemSpec::Vee { e_g, e_e1, e_e2 })
    }

    pub fn xi(e_g: f64, e_e1: f64, e_e2: f64) -> Result<Self, ModelError> {
        if !(e_g < e_e1 && e_e1 < e_e2) {
            return Err(ModelError::InvalidLevelOrdering {
                kind: SystemKind::Xi,
                detail: format!(
                    "need strict ladder E_g < E_e1 < E_e2, got ({e_g}, {e_e1}, {e_e2})"
                ),
            });
        }
        Ok(SystemSpec::Xi { e_g, e_e1, e_e2 })
    }

    pub fn coupled_tls(omega1: f64, omega2: f64, g: f64) -> Result<Self, ModelError> {
        if omega1 <= 0.0 || omega2 <= 0.0 {
            return Err(ModelError::NonPositiveSplitting { omega1, omega2 });
        }
        Ok(SystemSpec::CoupledTls { omega1, omega2, g })
    }

    /// Validate a spec deserialized from a config document.
    pub fn validate(&self) -> Result<(), ModelError> {
        match *self {
            SystemSpec::Lambda { e_g1, e_g2, e_e } => Self::lambda(e_g1, e_g2, e_e).map(|_| ()),
            SystemSpec::Vee { e_g, e_e1, e_e2 } => Self::vee(e_g, e_e1, e_e2).map(|_| ()),
            SystemSpec::Xi { e_g, e_e1, e_e2 } => Self::xi(e_g, e_e1, e_e2).map(|_| ()),
            SystemSpec::CoupledTls { omega1, omega2, g } => {
                Self::coupled_tls(omega1, omega2, g).map(|_| ())
            }
        }
    }

    pub fn kind(&self) -> SystemKind {
        match self {
            SystemSpec::Lambda { .. } => SystemKind::Lambda,
            SystemSpec::Vee { .. } => SystemKind::Vee,
            SystemSpec::Xi { .. } => SystemKind::Xi,
            SystemSpec::CoupledTls { .. } => SystemKind::CoupledTls,
        }
    }

    /// Hilbert-space dimension (3, or 4 for the coupled pair).
    pub fn dim(&self) -> usize {
        match self {
            SystemSpec::CoupledTls { .. } => 4,
            _ => 3,
        }
    }

    /// Level energies in the fixed basis order. For the coupled pair these
    /// are the eigenenergies of the full Hamiltonian (G, E₁, E₂, D).
    pub fn energies(&self) -> Vec<f64> {
        match *self {
            SystemSpec::Lambda { e_g1, e_g2, e_e } => vec![e_g1, e_g2, e_e],
            SystemSpec::Vee { e_g, e_e1, e_e2 } => vec![e_g, e_e1, e_e2],
            SystemSpec::Xi { e_g, e_e1, e_e2 } => vec![e_g, e_e1, e_e2],
            SystemSpec::CoupledTls { omega1, omega2, g } => {
                let mean = 0.5 * (omega1 + omega2);
                let split = 0.5 * ((omega1 - omega2).powi(2) + 4.0 * g * g).sqrt();
                vec![-mean, -split, split, mean]
            }
        }
    }

    /// Level labels in basis order.
    pub fn level_labels(&self) -> Vec<&'static str> {
        match self {
            SystemSpec::Lambda { .. } => vec!["g1", "g2", "e"],
            SystemSpec::Vee { .. } | SystemSpec::Xi { .. } => vec!["g", "e1", "e2"],
            SystemSpec::CoupledTls { .. } => vec!["G", "E1", "E2", "D"],
        }
    }

    /// Diagonal system Hamiltonian in the fixed basis order.
    pub fn hamiltonian(&self) -> CMatrix {
        let e = self.energies();
        let d = e.len();
        CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(e[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Basis index pair carrying the headline coherence ρ₁₂:
    /// (g₁, g₂) for Λ, (e₁, e₂) for V and Ξ, (E₁, E₂) for the coupled pair.
    pub fn coherence_pair(&self) -> (usize, usize) {
        match self {
            SystemSpec::Lambda { .. } => (0, 1),
            _ => (1, 2),
        }
    }
}

/// One dipole transition: lowering operator |lower⟩⟨upper| at gap `frequency`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub lower: usize,
    pub upper: usize,
    pub frequency: f64,
    pub lower_label: String,
    pub upper_label: String,
}

impl Transition {
    pub fn new(lower: usize, upper: usize, frequency: f64, lo: &str, up: &str) -> Self {
        Self {
            lower,
            upper,
            frequency,
            lower_label: lo.to_string(),
            upper_label: up.to_string(),
        }
    }

    /// Lowering operator |lower⟩⟨upper| as a dense d×d matrix.
    pub fn lowering_matrix(&self, dim: usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        m[(self.lower, self.upper)] = Complex64::new(1.0, 0.0);
        m
    }

    /// Raising operator, the adjoint of [`Self::lowering_matrix`].
    pub fn raising_matrix(&self, dim: usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        m[(self.upper, self.lower)] = Complex64::new(1.0, 0.0);
        m
    }
}

/// The two transitions of a three-level system (or four, for the coupled
/// pair in its eigenbasis), wired per the conventions above.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSet {
    pub dim: usize,
    pub transitions: Vec<Transition>,
}

impl TransitionSet {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    /// Transition gaps ε in transition order.
    pub fn frequencies(&self) -> Vec<f64> {
        self.transitions.iter().map(|t| t.frequency).collect()
    }

    /// Δ₁₂ = ε₁ − ε₂ (meaningful for the two-transition systems).
    pub fn delta12(&self) -> f64 {
        self.transitions[0].frequency - self.transitions[1].frequency
    }
}

/// Transition wirings for the three-level systems. The coupled pair is
/// handled by [`crate::flux::build_coupled_tls`], which derives its four
/// eigenbasis transitions itself.
pub fn transitions_of(system: &SystemSpec) -> Result<TransitionSet, ModelError> {
    let transitions = match *system {
        SystemSpec::Lambda { e_g1, e_g2, e_e } => vec![
            Transition::new(0, 2, e_e - e_g1, "g1", "e"),
            Transition::new(1, 2, e_e - e_g2, "g2", "e"),
        ],
        SystemSpec::Vee { e_g, e_e1, e_e2 } => vec![
            Transition::new(0, 1, e_e1 - e_g, "g", "e1"),
            Transition::new(0, 2, e_e2 - e_g, "g", "e2"),
        ],
        SystemSpec::Xi { e_g, e_e1, e_e2 } => vec![
            Transition::new(0, 1, e_e1 - e_g, "g", "e1"),
            Transition::new(1, 2, e_e2 - e_e1, "e1", "e2"),
        ],
        SystemSpec::CoupledTls { .. } => {
            return Err(ModelError::NotThreeLevel(SystemKind::CoupledTls))
        }
    };
    Ok(TransitionSet {
        dim: system.dim(),
        transitions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BathLabel {
    L,
    R,
}

impl std::fmt::Display for BathLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BathLabel::L => write!(f, "L"),
            BathLabel::R => write!(f, "R"),
        }
    }
}

/// Diagonal coupling spectra γ₁₁(ω), γ₂₂(ω) of one bath.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpectralModel {
    /// Frequency-independent values.
    Flat { gamma11: f64, gamma22: f64 },
    /// Explicit values at explicit frequencies; anything else is an error,
    /// never an extrapolation.
    Tabulated { entries: Vec<TabulatedEntry> },
    /// Smooth step per pair: low + (high − low)·logistic((ω − center)/width).
    /// Realizes crossing spectra where one transition couples mostly to one
    /// bath and the other transition to the other bath.
    LogisticStep {
        pair1: LogisticStepSpec,
        pair2: LogisticStepSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedEntry {
    pub frequency: f64,
    pub gamma11: f64,
    pub gamma22: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticStepSpec {
    pub low: f64,
    pub high: f64,
    pub center: f64,
    pub width: f64,
}

impl LogisticStepSpec {
    fn value(&self, omega: f64) -> f64 {
        let s = 1.0 / (1.0 + (-(omega - self.center) / self.width).exp());
        self.low + (self.high - self.low) * s
    }
}

/// Frequency lookups match within this tolerance (tabulated entries).
const FREQ_TOL: f64 = 1e-9;

impl SpectralModel {
    /// Diagonal spectrum γ_pp(ω) for pair p ∈ {1, 2}.
    pub fn diagonal(&self, pair: usize, omega: f64) -> Result<f64, ModelError> {
        if omega <= 0.0 {
            return Err(ModelError::NonPositiveFrequency(omega));
        }
        debug_assert!(pair == 1 || pair == 2);
        let value = match self {
            SpectralModel::Flat { gamma11, gamma22 } => {
                if pair == 1 {
                    *gamma11
                } else {
                    *gamma22
                }
            }
            SpectralModel::Tabulated { entries } => {
                // nearest entry within tolerance
                let entry = entries
                    .iter()
                    .filter(|e| (e.frequency - omega).abs() <= FREQ_TOL)
                    .min_by(|a, b| {
                        (a.frequency - omega)
                            .abs()
                            .partial_cmp(&(b.frequency - omega).abs())
                            .unwrap()
                    })
                    .ok_or(ModelError::MissingSpectralEntry {
                        i: pair,
                        j: pair,
                        omega,
                    })?;
                if pair == 1 {
                    entry.gamma11
                } else {
                    entry.gamma22
                }
            }
            SpectralModel::LogisticStep { pair1, pair2 } => {
                if pair == 1 {
                    pair1.value(omega)
                } else {
                    pair2.value(omega)
                }
            }
        };
        if value < 0.0 {
            return Err(ModelError::NegativeSpectralValue { pair, omega, value });
        }
        Ok(value)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            SpectralModel::Flat { gamma11, gamma22 } => {
                for (pair, v) in [(1usize, *gamma11), (2, *gamma22)] {
                    if v < 0.0 {
                        return Err(ModelError::NegativeSpectralValue {
                            pair,
                            omega: f64::NAN,
                            value: v,
                        });
                    }
                }
            }
            SpectralModel::Tabulated { entries } => {
                for e in entries {
                    for (pair, v) in [(1usize, e.gamma11), (2, e.gamma22)] {
                        if v < 0.0 {
                            return Err(ModelError::NegativeSpectralValue {
                                pair,
                                omega: e.frequency,
                                value: v,
                            });
                        }
                    }
                }
            }
            SpectralModel::LogisticStep { pair1, pair2 } => {
                for (pair, s) in [(1usize, pair1), (2, pair2)] {
                    if s.low < 0.0 || s.high < 0.0 {
                        return Err(ModelError::NegativeSpectralValue {
                            pair,
                            omega: s.center,
                            value: s.low.min(s.high),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Cross-spectrum weight |γ₁₂|²/(γ₁₁γ₂₂) ∈ [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WeightFactorModel {
    Constant {
        value: f64,
    },
    /// f_D(ω·x₀): cos² (D=1), J₀² (D=2), sinc² (D=3). Comes from two
    /// emitters a distance x₀ apart in a D-dimensional field.
    Dimensional {
        d: u8,
        distance_scale: f64,
    },
}

impl WeightFactorModel {
    pub fn validate(&self) -> Result<(), ModelError> {
        match *self {
            WeightFactorModel::Constant { value } => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(ModelError::WeightOutOfRange(value));
                }
            }
            WeightFactorModel::Dimensional { d, distance_scale } => {
                if !(1..=3).contains(&d) {
                    return Err(ModelError::BadWeightDimension(d));
                }
                if distance_scale < 0.0 {
                    return Err(ModelError::NegativeDistanceScale(distance_scale));
                }
            }
        }
        Ok(())
    }
}

/// Cross-spectrum construction: weight factor plus the phase of γ₁₂.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferenceSpec {
    pub weight: WeightFactorModel,
    /// Phase θ of γ₁₂ in radians; γ₂₁ = γ₁₂* always.
    #[serde(default)]
    pub phase: f64,
}

impl InterferenceSpec {
    pub fn maximal() -> Self {
        Self {
            weight: WeightFactorModel::Constant { value: 1.0 },
            phase: 0.0,
        }
    }

    pub fn none() -> Self {
        Self {
            weight: WeightFactorModel::Constant { value: 0.0 },
            phase: 0.0,
        }
    }

    pub fn constant(value: f64, phase: f64) -> Self {
        Self {
            weight: WeightFactorModel::Constant { value },
            phase,
        }
    }
}

/// One heat bath: a temperature plus its coupling spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub label: BathLabel,
    pub temperature: f64,
    pub spectrum: SpectralModel,
    pub interference: InterferenceSpec,
}

impl BathSpec {
    pub fn new(
        label: BathLabel,
        temperature: f64,
        spectrum: SpectralModel,
        interference: InterferenceSpec,
    ) -> Result<Self, ModelError> {
        let bath = Self {
            label,
            temperature,
            spectrum,
            interference,
        };
        bath.validate()?;
        Ok(bath)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.temperature < 0.0 {
            return Err(ModelError::NegativeTemperature(self.temperature));
        }
        self.spectrum.validate()?;
        self.interference.weight.validate()
    }
}

/// Coupling spectrum γ_ij(ω) of one bath, i, j ∈ {1, 2}.
///
/// Diagonal entries come from the spectral model; the cross entry is
/// √f(ω)·e^{iθ}·√(γ₁₁γ₂₂) with γ₂₁ = γ₁₂*, so |γ₁₂|² = f·γ₁₁·γ₂₂ holds
/// exactly by construction.
pub fn gamma(bath: &BathSpec, i: usize, j: usize, omega: f64) -> Result<Complex64, ModelError> {
    debug_assert!((1..=2).contains(&i) && (1..=2).contains(&j));
    if i == j {
        return Ok(Complex64::new(bath.spectrum.diagonal(i, omega)?, 0.0));
    }
    let g11 = bath.spectrum.diagonal(1, omega)?;
    let g22 = bath.spectrum.diagonal(2, omega)?;
    let f = weight_factor(&bath.interference.weight, omega);
    let modulus = (f * g11 * g22).sqrt();
    let phase = Complex64::from_polar(1.0, bath.interference.phase);
    let g12 = phase * modulus;
    Ok(if i == 1 { g12 } else { g12.conj() })
}

/// Full 2×2 coupling-spectrum matrix of one bath at ω.
pub fn gamma_matrix(bath: &BathSpec, omega: f64) -> Result<CMatrix, ModelError> {
    let mut m = CMatrix::zeros(2, 2);
    for i in 1..=2 {
        for j in 1..=2 {
            m[(i - 1, j - 1)] = gamma(bath, i, j, omega)?;
        }
    }
    Ok(m)
}

/// Born-Markov sanity advisory: warn when the coupling is not small against
/// the transition gaps. The computation proceeds regardless.
pub fn born_markov_warning(baths: &[BathSpec], transitions: &TransitionSet) -> Option<String> {
    let min_eps = transitions
        .frequencies()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let mut max_gamma = 0.0f64;
    for bath in baths {
        for t in &transitions.transitions {
            for pair in 1..=2 {
                if let Ok(v) = bath.spectrum.diagonal(pair, t.frequency) {
                    max_gamma = max_gamma.max(v);
                }
            }
        }
    }
    if max_gamma > 0.1 * min_eps {
        Some(format!(
            "weak-coupling assumption strained: max gamma = {max_gamma:.3e} \
             exceeds 0.1 * min transition gap = {:.3e}",
            0.1 * min_eps
        ))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn flat_bath(label: BathLabel, t: f64, g11: f64, g22: f64, f: f64, theta: f64) -> BathSpec {
        BathSpec::new(
            label,
            t,
            SpectralModel::Flat {
                gamma11: g11,
                gamma22: g22,
            },
            InterferenceSpec::constant(f, theta),
        )
        .unwrap()
    }

    #[test]
    fn lambda_crossed_gaps() {
        let s = SystemSpec::lambda(0.0, 0.01, 1.005).unwrap();
        let t = transitions_of(&s).unwrap();
        assert_relative_eq!(t.transitions[0].frequency, 1.005);
        assert_relative_eq!(t.transitions[1].frequency, 0.995);
        assert_relative_eq!(t.delta12(), 0.01, epsilon = 1e-15);
        assert_eq!(t.transitions[0].upper_label, "e");
    }

    #[test]
    fn vee_crossed_delta_is_negative() {
        let s = SystemSpec::vee(0.0, 0.995, 1.005).unwrap();
        let t = transitions_of(&s).unwrap();
        assert_relative_eq!(t.delta12(), -0.01, epsilon = 1e-15);
        // both raising operators share the ground level
        assert_eq!(t.transitions[0].lower, 0);
        assert_eq!(t.transitions[1].lower, 0);
    }

    #[test]
    fn xi_wiring_and_degenerate_rejection() {
        let s = SystemSpec::xi(0.0, 1.0, 2.1).unwrap();
        let t = transitions_of(&s).unwrap();
        // chain g->e1->e2, no direct g<->e2
        assert_eq!((t.transitions[0].lower, t.transitions[0].upper), (0, 1));
        assert_eq!((t.transitions[1].lower, t.transitions[1].upper), (1, 2));

        assert!(matches!(
            SystemSpec::xi(0.0, 1.0, 1.0),
            Err(ModelError::InvalidLevelOrdering { .. })
        ));
    }

    #[test]
    fn lambda_rejects_inverted_levels() {
        assert!(SystemSpec::lambda(0.0, 1.2, 1.0).is_err());
        assert!(SystemSpec::vee(0.5, 0.4, 1.0).is_err());
    }

    #[test]
    fn transition_operators_are_elementary_and_adjoint() {
        let s = SystemSpec::lambda(0.0, 0.01, 1.005).unwrap();
        let t = transitions_of(&s).unwrap();
        for tr in &t.transitions {
            let lo = tr.lowering_matrix(3);
            let up = tr.raising_matrix(3);
            assert_eq!(crate::linalg::dagger(&lo), up);
            assert_eq!(lo.iter().filter(|z| z.norm() > 0.0).count(), 1);
        }
    }

    #[test]
    fn gamma_cross_spectrum_construction() {
        let b = flat_bath(BathLabel::L, 1.0, 0.01, 0.02, 1.0, 0.0);
        let g12 = gamma(&b, 1, 2, 1.0).unwrap();
        assert_relative_eq!(g12.re, (0.01f64 * 0.02).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(g12.im, 0.0);

        // zero weight kills interference
        let b0 = flat_bath(BathLabel::L, 1.0, 0.01, 0.02, 0.0, 0.0);
        assert_eq!(gamma(&b0, 1, 2, 0.7).unwrap(), Complex64::new(0.0, 0.0));

        // phase rotation preserves the modulus
        let bi = flat_bath(
            BathLabel::L,
            1.0,
            0.01,
            0.02,
            1.0,
            std::f64::consts::FRAC_PI_2,
        );
        let g12 = gamma(&bi, 1, 2, 1.0).unwrap();
        assert_relative_eq!(g12.re, 0.0, epsilon = 1e-18);
        assert_relative_eq!(g12.norm_sqr(), 0.01 * 0.02, epsilon = 1e-15);

        // Hermitian in the transition indices
        let g21 = gamma(&bi, 2, 1, 1.0).unwrap();
        assert_eq!(g21, g12.conj());
    }

    #[test]
    fn tabulated_missing_entry_is_an_error() {
        let b = BathSpec::new(
            BathLabel::R,
            2.0,
            SpectralModel::Tabulated {
                entries: vec![TabulatedEntry {
                    frequency: 1.005,
                    gamma11: 0.01,
                    gamma22: 0.02,
                }],
            },
            InterferenceSpec::maximal(),
        )
        .unwrap();
        assert!(gamma(&b, 1, 1, 1.005).is_ok());
        assert!(matches!(
            gamma(&b, 1, 1, 0.995),
            Err(ModelError::MissingSpectralEntry { .. })
        ));
    }

    #[test]
    fn logistic_step_is_monotone_between_bounds() {
        let spec = LogisticStepSpec {
            low: 0.01,
            high: 0.02,
            center: 1.0,
            width: 0.05,
        };
        let m = SpectralModel::LogisticStep {
            pair1: spec.clone(),
            pair2: LogisticStepSpec {
                low: 0.02,
                high: 0.01,
                center: 1.0,
                width: 0.05,
            },
        };
        let lo = m.diagonal(1, 0.5).unwrap();
        let hi = m.diagonal(1, 1.5).unwrap();
        assert!(lo > 0.01 && lo < 0.012);
        assert!(hi > 0.018 && hi < 0.02);
        // pair2 crosses the other way
        assert!(m.diagonal(2, 0.5).unwrap() > m.diagonal(2, 1.5).unwrap());
    }

    #[test]
    fn bath_validation() {
        assert!(matches!(
            BathSpec::new(
                BathLabel::L,
                -0.1,
                SpectralModel::Flat {
                    gamma11: 0.01,
                    gamma22: 0.01
                },
                InterferenceSpec::maximal(),
            ),
            Err(ModelError::NegativeTemperature(_))
        ));
        assert!(InterferenceSpec::constant(1.5, 0.0)
            .weight
            .validate()
            .is_err());
    }

    #[test]
    fn coupled_tls_eigenenergies() {
        let s = SystemSpec::coupled_tls(1.05, 0.95, 0.05).unwrap();
        let e = s.energies();
        assert_relative_eq!(e[0], -1.0, epsilon = 1e-15);
        assert_relative_eq!(e[3], 1.0, epsilon = 1e-15);
        assert_relative_eq!(e[2] - e[1], 0.02f64.sqrt(), epsilon = 1e-15);
        assert!(transitions_of(&s).is_err());
    }

    #[test]
    fn born_markov_advisory_fires_on_strong_coupling() {
        let s = SystemSpec::lambda(0.0, 0.01, 1.005).unwrap();
        let t = transitions_of(&s).unwrap();
        let weak = flat_bath(BathLabel::L, 1.0, 0.01, 0.02, 1.0, 0.0);
        let strong = flat_bath(BathLabel::R, 1.0, 0.5, 0.02, 1.0, 0.0);
        assert!(born_markov_warning(std::slice::from_ref(&weak), &t).is_none());
        assert!(born_markov_warning(&[weak, strong], &t).is_some());
    }

    #[test]
    fn spec_roundtrips_through_serde() {
        let s = SystemSpec::lambda(0.0, 0.01, 1.005).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: SystemSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);

        let b = flat_bath(BathLabel::L, 1.0, 0.01, 0.02, 0.75, 0.3);
        let json = serde_json::to_string(&b).unwrap();
        let back: BathSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(b, back);
    }
}
