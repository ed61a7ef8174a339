//! Non-secular and secular generators as explicit superoperators.
//!
//! The non-secular master equation kept here in its time-independent
//! Schrödinger-picture form reads
//!
//! ```text
//! ρ̇ = i[ρ, H_S + H_c]
//!    + Σ_ij [Γ⁺_ji(ε_i) + Γ⁺_ji(ε_j)] (φ_i⁺ ρ φ_j⁻ − ½{ρ, φ_j⁻ φ_i⁺})
//!    + Σ_ij [Γ⁻_ij(ε_i) + Γ⁻_ij(ε_j)] (φ_i⁻ ρ φ_j⁺ − ½{ρ, φ_j⁺ φ_i⁻})
//! ```
//!
//! with the non-diagonal Lamb shift
//!
//! ```text
//! H_c = Σ_ij [Γ⁺_ji(ε_i) − Γ⁺_ji(ε_j)]/(2i) · φ_j⁻ φ_i⁺
//!     + Σ_ij [Γ⁻_ij(ε_i) − Γ⁻_ij(ε_j)]/(2i) · φ_j⁺ φ_i⁻
//! ```
//!
//! An algebraically identical "asymmetric" grouping exists in which the
//! frequency arguments stay attached to their commutators and no H_c
//! appears; both assembly routes are implemented and compared by the
//! verify suite ([`GeneratorForm`]).
//!
//! Vectorization convention (fixed everywhere): column stacking,
//! vec(ρ)[i + d·j] = ρ[i, j], so ρ ↦ AρB becomes Bᵀ ⊗ A.

use num_complex::Complex64;
use thiserror::Error;

use crate::density::DensityMatrix;
use crate::linalg::{self, left_mul, right_mul, sandwich};
use crate::model::{transitions_of, ModelError, SystemSpec, Transition};
use crate::rates::DissipationRates;
use crate::CMatrix;

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error(
        "dimension mismatch: superoperator acts on {expected}x{expected}, state is {got}x{got}"
    )]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    NonSecular,
    Secular,
}

/// Assembly route for the non-secular generator; the two are algebraically
/// identical and their agreement is a standing check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GeneratorForm {
    /// Symmetrized dissipators plus explicit H_c.
    #[default]
    Symmetrized,
    /// Frequency arguments kept on their own commutators, no explicit H_c.
    Appendix,
}

/// Build knobs. `hc_sign` exists for the mutation-testing mode of the
/// verify suite; it multiplies H_c and must be +1 for correct physics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorOptions {
    pub form: GeneratorForm,
    pub hc_sign: f64,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        Self {
            form: GeneratorForm::Symmetrized,
            hc_sign: 1.0,
        }
    }
}

/// Non-diagonal Lamb shift H_c (d×d Hermitian).
#[derive(Debug, Clone, PartialEq)]
pub struct LambShift {
    pub matrix: CMatrix,
}

/// Dense d²×d² generator acting on column-vectorized density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
    kind: GeneratorKind,
}

impl Superoperator {
    pub(crate) fn from_matrix(dim: usize, matrix: CMatrix, kind: GeneratorKind) -> Self {
        debug_assert_eq!(matrix.nrows(), dim * dim);
        Self { dim, matrix, kind }
    }

    /// Zero generator (L[ρ] = 0 for all ρ).
    pub fn zero(dim: usize, kind: GeneratorKind) -> Self {
        Self {
            dim,
            matrix: CMatrix::zeros(dim * dim, dim * dim),
            kind,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// L[ρ] for a raw matrix (no validation).
    pub fn apply_matrix(&self, rho: &CMatrix) -> CMatrix {
        let v = linalg::vectorize(rho);
        linalg::unvectorize(&(&self.matrix * v), self.dim)
    }

    /// Entrywise sum of two generators on the same space.
    pub fn add(&self, other: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, other.dim);
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix + &other.matrix,
            kind: self.kind,
        }
    }

    /// Max |tr L[ρ]| over the matrix-unit basis; zero for a trace-preserving
    /// generator.
    pub fn trace_preservation_defect(&self) -> f64 {
        let d = self.dim;
        let mut sums = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            let row = self.matrix.row(i + d * i);
            for (k, s) in sums.iter_mut().enumerate() {
                *s += row[k];
            }
        }
        sums.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max elementwise defect of L[ρ†] = (L[ρ])† over the matrix-unit basis.
    pub fn hermiticity_preservation_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                let col_ab = self.matrix.column(a + d * b).into_owned();
                let col_ba = self.matrix.column(b + d * a).into_owned();
                let l_ab = linalg::unvectorize(&col_ab, d);
                let l_ba = linalg::unvectorize(&col_ba, d);
                let defect = linalg::fro_norm(&(linalg::dagger(&l_ab) - l_ba));
                worst = worst.max(defect);
            }
        }
        worst
    }

    /// Induced infinity norm, used by the integrator's stability guard.
    pub fn inf_norm(&self) -> f64 {
        linalg::inf_norm(&self.matrix)
    }
}

/// L[ρ] with dimension checking.
pub fn apply(l: &Superoperator, rho: &DensityMatrix) -> Result<CMatrix, GeneratorError> {
    if rho.dim() != l.dim() {
        return Err(GeneratorError::DimensionMismatch {
            expected: l.dim(),
            got: rho.dim(),
        });
    }
    Ok(l.apply_matrix(rho.as_matrix()))
}

fn operators(transitions: &[Transition], dim: usize) -> (Vec<CMatrix>, Vec<CMatrix>) {
    let lowering: Vec<CMatrix> = transitions.iter().map(|t| t.lowering_matrix(dim)).collect();
    let raising: Vec<CMatrix> = transitions.iter().map(|t| t.raising_matrix(dim)).collect();
    (lowering, raising)
}

/// H_c from the rate table; Hermitian by construction (and symmetrized
/// against rounding).
pub fn build_hc_generic(
    rates: &DissipationRates,
    transitions: &[Transition],
    dim: usize,
) -> LambShift {
    let k = transitions.len();
    let (lo, up) = operators(transitions, dim);
    let mut hc = CMatrix::zeros(dim, dim);
    let half_over_i = Complex64::new(0.0, -0.5); // 1/(2i)
    for i in 0..k {
        for j in 0..k {
            let cp = rates.plus(j, i, i) - rates.plus(j, i, j);
            hc += (&lo[j] * &up[i]) * (half_over_i * cp);
            let cm = rates.minus(i, j, i) - rates.minus(i, j, j);
            hc += (&up[j] * &lo[i]) * (half_over_i * cm);
        }
    }
    let herm = (&hc + linalg::dagger(&hc)) * Complex64::new(0.5, 0.0);
    LambShift { matrix: herm }
}

/// H_c for a three-level system.
pub fn build_hc(rates: &DissipationRates, transitions: &crate::model::TransitionSet) -> LambShift {
    build_hc_generic(rates, &transitions.transitions, transitions.dim)
}

/// Superoperator of ρ ↦ i[ρ, H].
fn hamiltonian_superop(h: &CMatrix) -> CMatrix {
    (right_mul(h) - left_mul(h)) * Complex64::new(0.0, 1.0)
}

/// Pure precession generator ρ̇ = i[ρ, H] as a [`Superoperator`].
pub fn hamiltonian_precession(h: &CMatrix) -> Superoperator {
    Superoperator::from_matrix(h.nrows(), hamiltonian_superop(h), GeneratorKind::NonSecular)
}

/// Assemble the non-secular generator for an arbitrary transition
/// decomposition (three-level systems and the coupled pair both route
/// through here).
pub fn assemble_nonsecular(
    hamiltonian: &CMatrix,
    transitions: &[Transition],
    rates: &DissipationRates,
    options: &GeneratorOptions,
) -> (Superoperator, LambShift) {
    let dim = hamiltonian.nrows();
    let k = transitions.len();
    let (lo, up) = operators(transitions, dim);
    let hc = build_hc_generic(rates, transitions, dim);
    let mut m = CMatrix::zeros(dim * dim, dim * dim);

    match options.form {
        GeneratorForm::Symmetrized => {
            let h_tot = hamiltonian + &hc.matrix * Complex64::new(options.hc_sign, 0.0);
            m += hamiltonian_superop(&h_tot);
            let half = Complex64::new(0.5, 0.0);
            for i in 0..k {
                for j in 0..k {
                    let a = rates.plus(j, i, i) + rates.plus(j, i, j);
                    let n = &lo[j] * &up[i];
                    m += (sandwich(&up[i], &lo[j]) - (right_mul(&n) + left_mul(&n)) * half) * a;

                    let b = rates.minus(i, j, i) + rates.minus(i, j, j);
                    let n2 = &up[j] * &lo[i];
                    m += (sandwich(&lo[i], &up[j]) - (right_mul(&n2) + left_mul(&n2)) * half) * b;
                }
            }
        }
        GeneratorForm::Appendix => {
            m += hamiltonian_superop(hamiltonian);
            for i in 0..k {
                for j in 0..k {
                    // Γ⁺_ji(ε_j) [φ_i⁺, ρ φ_j⁻] + Γ⁺_ji(ε_i) [φ_i⁺ ρ, φ_j⁻]
                    let s = sandwich(&up[i], &lo[j]);
                    let n = &lo[j] * &up[i];
                    m += (&s - right_mul(&n)) * rates.plus(j, i, j);
                    m += (&s - left_mul(&n)) * rates.plus(j, i, i);
                    // Γ⁻_ij(ε_j) [φ_i⁻, ρ φ_j⁺] + Γ⁻_ij(ε_i) [φ_i⁻ ρ, φ_j⁺]
                    let s2 = sandwich(&lo[i], &up[j]);
                    let n2 = &up[j] * &lo[i];
                    m += (&s2 - right_mul(&n2)) * rates.minus(i, j, j);
                    m += (&s2 - left_mul(&n2)) * rates.minus(i, j, i);
                }
            }
        }
    }

    (
        Superoperator::from_matrix(dim, m, GeneratorKind::NonSecular),
        hc,
    )
}

/// Non-secular generator of a three-level system.
pub fn build_nonsecular(
    system: &SystemSpec,
    rates: &DissipationRates,
) -> Result<Superoperator, ModelError> {
    build_nonsecular_with(system, rates, &GeneratorOptions::default())
}

/// Non-secular generator with explicit build options (verify suite).
pub fn build_nonsecular_with(
    system: &SystemSpec,
    rates: &DissipationRates,
    options: &GeneratorOptions,
) -> Result<Superoperator, ModelError> {
    let transitions = transitions_of(system)?;
    let h = system.hamiltonian();
    Ok(assemble_nonsecular(&h, &transitions.transitions, rates, options).0)
}

/// Secular generator: only the i = j dissipators survive, and populations
/// decouple from coherences. This is the plain time-independent Lindblad
/// dissipator; the diagonal Hamiltonian precession is not included, so the
/// operator matches the rate-equation picture exactly.
pub fn assemble_secular(
    dim: usize,
    transitions: &[Transition],
    rates: &DissipationRates,
) -> Superoperator {
    let (lo, up) = operators(transitions, dim);
    let mut m = CMatrix::zeros(dim * dim, dim * dim);
    for i in 0..transitions.len() {
        let gp = rates.plus(i, i, i);
        let n = &lo[i] * &up[i];
        m += (sandwich(&up[i], &lo[i]) * Complex64::new(2.0, 0.0) - right_mul(&n) - left_mul(&n))
            * gp;
        let gm = rates.minus(i, i, i);
        let n2 = &up[i] * &lo[i];
        m += (sandwich(&lo[i], &up[i]) * Complex64::new(2.0, 0.0) - right_mul(&n2) - left_mul(&n2))
            * gm;
    }
    Superoperator::from_matrix(dim, m, GeneratorKind::Secular)
}

/// Secular generator of a three-level system.
pub fn build_secular(
    system: &SystemSpec,
    rates: &DissipationRates,
) -> Result<Superoperator, ModelError> {
    let transitions = transitions_of(system)?;
    Ok(assemble_secular(
        system.dim(),
        &transitions.transitions,
        rates,
    ))
}

/// Matrix-free evaluation of the non-secular right-hand side by direct
/// matrix products. Independent of the vectorized assembly; the two paths
/// are cross-checked against each other.
pub fn apply_direct(
    hamiltonian: &CMatrix,
    transitions: &[Transition],
    rates: &DissipationRates,
    options: &GeneratorOptions,
    rho: &CMatrix,
) -> CMatrix {
    let dim = hamiltonian.nrows();
    let k = transitions.len();
    let (lo, up) = operators(transitions, dim);
    let i1 = Complex64::new(0.0, 1.0);
    let half = Complex64::new(0.5, 0.0);

    let hc = build_hc_generic(rates, transitions, dim);
    let h_tot = hamiltonian + &hc.matrix * Complex64::new(options.hc_sign, 0.0);
    let mut out = (rho * &h_tot - &h_tot * rho) * i1;
    for i in 0..k {
        for j in 0..k {
            let a = rates.plus(j, i, i) + rates.plus(j, i, j);
            let n = &lo[j] * &up[i];
            out += (&up[i] * rho * &lo[j] - (rho * &n + &n * rho) * half) * a;
            let b = rates.minus(i, j, i) + rates.minus(i, j, j);
            let n2 = &up[j] * &lo[i];
            out += (&lo[i] * rho * &up[j] - (rho * &n2 + &n2 * rho) * half) * b;
        }
    }
    out
}
