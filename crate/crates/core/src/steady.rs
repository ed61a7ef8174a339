//! Steady states: generic null-space extraction, the specialized 4×4 Bloch
//! solves for Λ- and V-type systems, the closed-form determinant, and the
//! zero-coherence conditions.
//!
//! Bloch unknowns are ordered (n̄₁, n̄₂, τ̄₁₂, τ̄₂₁) with
//! - Λ: n̄ᵢ = ⟨gᵢ|ρ|gᵢ⟩, τ̄₁₂ = ⟨g₂|ρ|g₁⟩, reservoir population n̄_e;
//! - V: n̄ᵢ = ⟨eᵢ|ρ|eᵢ⟩, τ̄₁₂ = ⟨e₂|ρ|e₁⟩, reservoir population n̄_g.
//!
//! Two matrices are kept per system: the coefficient matrix of the four
//! steady equations with the reservoir population on the right-hand side
//! (`coefficient_matrix`, whose determinant has the closed form below),
//! and the solvable system after eliminating the reservoir population by
//! the trace constraint (`matrix`, `rhs`).
//!
//! Note on conventions: the low-level coherence of the Λ system precesses
//! as τ̄̇₁₂ ⊃ −iΔ₁₂ τ̄₁₂ (the level pair sits at energy splitting −Δ₁₂),
//! while the V system's excited-pair coherence carries +iΔ₁₂. The closed
//! determinant is stated here in the arrangement that matches those
//! equations of motion; for real cross-spectra it coincides with the
//! common real-weight form.

use num_complex::Complex64;
use thiserror::Error;

use crate::density::DensityMatrix;
use crate::generator::Superoperator;
use crate::linalg;
use crate::model::{SystemKind, SystemSpec, TransitionSet};
use crate::rates::DissipationRates;
use crate::{CMatrix, CVector};

/// Relative singular-value threshold below which the steady state is
/// reported as non-unique.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SteadyError {
    #[error("singular value decomposition produced no null candidate")]
    NoNullVector,
    #[error("all null-space candidates are traceless; no steady state representative")]
    TracelessNullSpace,
    #[error("Bloch system is numerically singular and cannot be solved")]
    SingularBloch,
    #[error(
        "zero-coherence condition needs Γ⁺₁₁(ε₁) and Γ⁺₂₂(ε₂) > 0 (is some bath above T = 0?)"
    )]
    ZeroDenominator,
    #[error("expected a {expected:?} system, got {got:?}")]
    WrongKind {
        expected: SystemKind,
        got: SystemKind,
    },
    #[error("rate table carries {0} transitions, need 2")]
    WrongTransitionCount(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyMethod {
    NullSpace,
    BlochLinear,
}

/// A solved steady state with its uniqueness diagnostic.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    pub method: SteadyMethod,
    pub unique: bool,
    /// ‖L[ρ]‖_F for the null-space route, ‖Ax − b‖₂ for the Bloch route.
    pub residual: f64,
}

/// Steady state from the null space of the vectorized generator.
///
/// The state is the trace-normalized, Hermitized null vector; `unique` is
/// false when the second-smallest singular value falls below
/// [`DEGENERACY_THRESHOLD`] relative to the largest, in which case a
/// representative (the maximal-trace combination of null candidates) is
/// still returned.
pub fn steady_nullspace(l: &Superoperator) -> Result<SteadyState, SteadyError> {
    let d = l.dim();
    let n = d * d;
    let (sigmas, vecs) = linalg::complex_svd(l.matrix());
    if sigmas.is_empty() {
        return Err(SteadyError::NoNullVector);
    }
    let scale = sigmas[0].max(f64::MIN_POSITIVE);
    let unique = sigmas[n - 2] > DEGENERACY_THRESHOLD * scale;

    let candidate = if unique {
        vecs[n - 1].clone()
    } else {
        // combination of all null candidates maximizing |trace|
        let mut combo = CVector::zeros(n);
        for (k, sigma) in sigmas.iter().enumerate() {
            if *sigma <= DEGENERACY_THRESHOLD * scale {
                let tr = trace_of_vec(&vecs[k], d);
                combo += &vecs[k] * tr.conj();
            }
        }
        if combo.norm() < 1e-14 {
            return Err(SteadyError::TracelessNullSpace);
        }
        combo
    };

    let tr = trace_of_vec(&candidate, d);
    if tr.norm() < 1e-12 {
        return Err(SteadyError::TracelessNullSpace);
    }
    let mut rho = linalg::unvectorize(&candidate, d);
    rho /= tr;
    let rho = (&rho + linalg::dagger(&rho)) * Complex64::new(0.5, 0.0);
    let residual = linalg::fro_norm(&l.apply_matrix(&rho));
    Ok(SteadyState {
        rho: DensityMatrix::new_unchecked(rho),
        method: SteadyMethod::NullSpace,
        unique,
        residual,
    })
}

fn trace_of_vec(v: &CVector, d: usize) -> Complex64 {
    (0..d).map(|i| v[i + d * i]).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BlochKind {
    Lambda,
    Vee,
}

/// The 4×4 steady linear system of a two-transition system.
#[derive(Debug, Clone)]
pub struct BlochSystem {
    /// Eliminated system A (reservoir population substituted by the trace).
    pub matrix: CMatrix,
    /// Right-hand side of the eliminated system.
    pub rhs: CVector,
    /// Coefficient matrix of the four equations with the reservoir
    /// population as the inhomogeneity; its determinant is `det_formula`.
    pub coefficient_matrix: CMatrix,
    /// Closed-form determinant of `coefficient_matrix`.
    pub det_formula: Complex64,
    kind: BlochKind,
}

/// Bloch solution with consistency diagnostics.
#[derive(Debug, Clone)]
pub struct BlochSolution {
    pub state: SteadyState,
    /// |τ̄₂₁ − τ̄₁₂*| of the solution; the two coherences are solved as
    /// independent unknowns and must come out conjugate.
    pub conjugacy_residual: f64,
    /// Raw unknowns (n̄₁, n̄₂, τ̄₁₂, τ̄₂₁).
    pub unknowns: [Complex64; 4],
}

fn check_two_transitions(rates: &DissipationRates) -> Result<(), SteadyError> {
    if rates.len() != 2 {
        return Err(SteadyError::WrongTransitionCount(rates.len()));
    }
    Ok(())
}

/// Assemble the Λ-type steady system.
///
/// With n̄_e as inhomogeneity (coefficient matrix M, rows n̄₁, n̄₂, τ̄₁₂, τ̄₂₁):
///
/// ```text
/// 2Γ⁺₁₁(ε₁) n̄₁ + Γ⁺₁₂(ε₂) τ̄₁₂ + Γ⁺₂₁(ε₂) τ̄₂₁                  = 2Γ⁻₁₁(ε₁) n̄_e
/// 2Γ⁺₂₂(ε₂) n̄₂ + Γ⁺₁₂(ε₁) τ̄₁₂ + Γ⁺₂₁(ε₁) τ̄₂₁                  = 2Γ⁻₂₂(ε₂) n̄_e
/// Γ⁺₂₁(ε₁) n̄₁ + Γ⁺₂₁(ε₂) n̄₂ + [Γ⁺₁₁(ε₁)+Γ⁺₂₂(ε₂)+iΔ₁₂] τ̄₁₂    = [Γ⁻₂₁(ε₁)+Γ⁻₂₁(ε₂)] n̄_e
/// Γ⁺₁₂(ε₁) n̄₁ + Γ⁺₁₂(ε₂) n̄₂ + [Γ⁺₁₁(ε₁)+Γ⁺₂₂(ε₂)−iΔ₁₂] τ̄₂₁    = [Γ⁻₁₂(ε₁)+Γ⁻₁₂(ε₂)] n̄_e
/// ```
///
/// The returned `matrix`/`rhs` eliminate n̄_e = 1 − n̄₁ − n̄₂.
pub fn build_bloch_lambda(
    rates: &DissipationRates,
    transitions: &TransitionSet,
) -> Result<BlochSystem, SteadyError> {
    check_two_transitions(rates)?;
    // both transitions must share the upper level (Λ wiring)
    if transitions.transitions[0].upper != transitions.transitions[1].upper {
        return Err(SteadyError::WrongKind {
            expected: SystemKind::Lambda,
            got: SystemKind::Xi,
        });
    }
    let delta12 = rates.frequencies()[0] - rates.frequencies()[1];
    let g_sum = rates.plus(0, 0, 0) + rates.plus(1, 1, 1);
    let i_delta = Complex64::new(0.0, delta12);
    let z = Complex64::new(0.0, 0.0);

    #[rustfmt::skip]
    let m = CMatrix::from_row_slice(4, 4, &[
        2.0 * rates.plus(0, 0, 0), z,                         rates.plus(0, 1, 1), rates.plus(1, 0, 1),
        z,                         2.0 * rates.plus(1, 1, 1), rates.plus(0, 1, 0), rates.plus(1, 0, 0),
        rates.plus(1, 0, 0),       rates.plus(1, 0, 1),       g_sum + i_delta,     z,
        rates.plus(0, 1, 0),       rates.plus(0, 1, 1),       z,                   g_sum - i_delta,
    ]);
    let c = CVector::from_column_slice(&[
        2.0 * rates.minus(0, 0, 0),
        2.0 * rates.minus(1, 1, 1),
        rates.minus(1, 0, 0) + rates.minus(1, 0, 1),
        rates.minus(0, 1, 0) + rates.minus(0, 1, 1),
    ]);
    Ok(finish_bloch(
        m,
        c,
        det_formula(rates, delta12),
        BlochKind::Lambda,
    ))
}

/// Assemble the V-type steady system (roles of Γ⁺ and Γ⁻ exchanged, and
/// the excited-pair coherence precesses with the opposite sign).
pub fn build_bloch_vee(
    rates: &DissipationRates,
    transitions: &TransitionSet,
) -> Result<BlochSystem, SteadyError> {
    check_two_transitions(rates)?;
    if transitions.transitions[0].lower != transitions.transitions[1].lower {
        return Err(SteadyError::WrongKind {
            expected: SystemKind::Vee,
            got: SystemKind::Xi,
        });
    }
    let delta12 = rates.frequencies()[0] - rates.frequencies()[1];
    let g_sum = rates.minus(0, 0, 0) + rates.minus(1, 1, 1);
    let i_delta = Complex64::new(0.0, delta12);
    let z = Complex64::new(0.0, 0.0);

    #[rustfmt::skip]
    let m = CMatrix::from_row_slice(4, 4, &[
        2.0 * rates.minus(0, 0, 0), z,                          rates.minus(1, 0, 1), rates.minus(0, 1, 1),
        z,                          2.0 * rates.minus(1, 1, 1), rates.minus(1, 0, 0), rates.minus(0, 1, 0),
        rates.minus(0, 1, 0),       rates.minus(0, 1, 1),       g_sum - i_delta,      z,
        rates.minus(1, 0, 0),       rates.minus(1, 0, 1),       z,                    g_sum + i_delta,
    ]);
    let c = CVector::from_column_slice(&[
        2.0 * rates.plus(0, 0, 0),
        2.0 * rates.plus(1, 1, 1),
        rates.plus(0, 1, 0) + rates.plus(0, 1, 1),
        rates.plus(1, 0, 0) + rates.plus(1, 0, 1),
    ]);
    let det = linalg::determinant(&m);
    Ok(finish_bloch(m, c, det, BlochKind::Vee))
}

fn finish_bloch(m: CMatrix, c: CVector, det: Complex64, kind: BlochKind) -> BlochSystem {
    // eliminated system: A = M + c·(1,1,0,0), b = c
    let mut a = m.clone();
    for row in 0..4 {
        a[(row, 0)] += c[row];
        a[(row, 1)] += c[row];
    }
    BlochSystem {
        matrix: a,
        rhs: c,
        coefficient_matrix: m,
        det_formula: det,
        kind,
    }
}

impl BlochSystem {
    /// True when the coefficient matrix is singular at the relative
    /// threshold, i.e. the steady state is not unique.
    pub fn coefficient_singular(&self, rel_tol: f64) -> bool {
        let (sigmas, _) = linalg::complex_svd(&self.coefficient_matrix);
        sigmas[3] <= rel_tol * sigmas[0].max(f64::MIN_POSITIVE)
    }

    /// Solve the eliminated system and assemble the steady density matrix.
    pub fn solve(&self) -> Result<BlochSolution, SteadyError> {
        let x = linalg::solve(&self.matrix, &self.rhs).ok_or(SteadyError::SingularBloch)?;
        let unknowns = [x[0], x[1], x[2], x[3]];
        let conjugacy_residual = (x[3] - x[2].conj()).norm();
        let n1 = x[0].re;
        let n2 = x[1].re;
        let nr = 1.0 - n1 - n2;
        let tau12 = 0.5 * (x[2] + x[3].conj());

        let mut rho = CMatrix::zeros(3, 3);
        match self.kind {
            BlochKind::Lambda => {
                // basis g1, g2, e; τ̄₁₂ = ⟨g₂|ρ|g₁⟩ lives at (1, 0)
                rho[(0, 0)] = Complex64::new(n1, 0.0);
                rho[(1, 1)] = Complex64::new(n2, 0.0);
                rho[(2, 2)] = Complex64::new(nr, 0.0);
                rho[(1, 0)] = tau12;
                rho[(0, 1)] = tau12.conj();
            }
            BlochKind::Vee => {
                // basis g, e1, e2; τ̄₁₂ = ⟨e₂|ρ|e₁⟩ lives at (2, 1)
                rho[(0, 0)] = Complex64::new(nr, 0.0);
                rho[(1, 1)] = Complex64::new(n1, 0.0);
                rho[(2, 2)] = Complex64::new(n2, 0.0);
                rho[(2, 1)] = tau12;
                rho[(1, 2)] = tau12.conj();
            }
        }
        let residual = (&self.matrix * &x - &self.rhs).norm();
        let unique = !self.coefficient_singular(DEGENERACY_THRESHOLD);
        Ok(BlochSolution {
            state: SteadyState {
                rho: DensityMatrix::new_unchecked(rho),
                method: SteadyMethod::BlochLinear,
                unique,
                residual,
            },
            conjugacy_residual,
            unknowns,
        })
    }
}

/// Closed-form determinant of the Λ-type coefficient matrix:
///
/// ```text
/// det = [Γ⁺₁₁(ε₁)+Γ⁺₂₂(ε₂)]² [4Γ⁺₁₁(ε₁)Γ⁺₂₂(ε₂) − 4Re P + Δ₁₂²]
///     − [2Im P − Δ₁₂(Γ⁺₁₁(ε₁)−Γ⁺₂₂(ε₂))]²,   P = Γ⁺₁₂(ε₂)Γ⁺₂₁(ε₁)
/// ```
///
/// Real-valued; returned as a complex number with zero imaginary part.
/// det = 0 signals a degenerate (initial-state-dependent) steady state.
pub fn det_formula(rates: &DissipationRates, delta12: f64) -> Complex64 {
    let a = rates.plus(0, 0, 0).re;
    let b = rates.plus(1, 1, 1).re;
    let p = rates.plus(0, 1, 1) * rates.plus(1, 0, 0);
    let value = (a + b).powi(2) * (4.0 * a * b - 4.0 * p.re + delta12 * delta12)
        - (2.0 * p.im - delta12 * (a - b)).powi(2);
    Complex64::new(value, 0.0)
}

/// Real-weight specialization (θ = 0, Γ⁺₁₂ = Γ⁺₂₁ real):
///
/// ```text
/// det = 4[Γ⁺₁₁(ε₁)+Γ⁺₂₂(ε₂)]² [Γ⁺₁₁(ε₁)Γ⁺₂₂(ε₂) − Γ⁺₁₂(ε₂)Γ⁺₂₁(ε₁)]
///     + 4Δ₁₂² Γ⁺₁₁(ε₁)Γ⁺₂₂(ε₂)
/// ```
pub fn det_formula_real(rates: &DissipationRates, delta12: f64) -> f64 {
    let a = rates.plus(0, 0, 0).re;
    let b = rates.plus(1, 1, 1).re;
    let cross = (rates.plus(0, 1, 1) * rates.plus(1, 0, 0)).re;
    4.0 * (a + b).powi(2) * (a * b - cross) + 4.0 * delta12 * delta12 * a * b
}

/// Outcome of the zero-coherence necessary condition.
#[derive(Debug, Clone, Copy)]
pub struct ZeroCoherenceCheck {
    /// Left-hand side, evaluated with the Γ⁺₂₁/Γ⁺₂₁ ratio cancelled
    /// analytically so the Γ⁺₂₁ → 0 limit needs no special casing:
    /// [Γ⁻₂₁(ε₁) − Γ⁺₂₁(ε₁)Γ⁻₁₁(ε₁)/Γ⁺₁₁(ε₁)] + [Γ⁻₂₁(ε₂) − Γ⁺₂₁(ε₂)Γ⁻₂₂(ε₂)/Γ⁺₂₂(ε₂)]
    pub lhs: Complex64,
    pub satisfied: bool,
}

/// Tolerance on |lhs| below which the condition counts as satisfied.
pub const ZERO_COHERENCE_TOL: f64 = 1e-12;

/// Necessary condition for a coherence-free Λ-type steady state; also
/// sufficient when the steady state is unique.
pub fn zero_coherence_condition(
    rates: &DissipationRates,
) -> Result<ZeroCoherenceCheck, SteadyError> {
    check_two_transitions(rates)?;
    let g11 = rates.plus(0, 0, 0);
    let g22 = rates.plus(1, 1, 1);
    if g11.norm() == 0.0 || g22.norm() == 0.0 {
        return Err(SteadyError::ZeroDenominator);
    }
    let term1 = rates.minus(1, 0, 0) - rates.plus(1, 0, 0) * rates.minus(0, 0, 0) / g11;
    let term2 = rates.minus(1, 0, 1) - rates.plus(1, 0, 1) * rates.minus(1, 1, 1) / g22;
    let lhs = term1 + term2;
    Ok(ZeroCoherenceCheck {
        lhs,
        satisfied: lhs.norm() <= ZERO_COHERENCE_TOL,
    })
}

/// V-type analogue of the zero-coherence condition (Γ± roles exchanged;
/// the reservoir is the shared ground level, so the brackets compare the
/// upward cross rates against the individual upward/downward ratios).
pub fn zero_coherence_condition_vee(
    rates: &DissipationRates,
) -> Result<ZeroCoherenceCheck, SteadyError> {
    check_two_transitions(rates)?;
    let g11 = rates.minus(0, 0, 0);
    let g22 = rates.minus(1, 1, 1);
    if g11.norm() == 0.0 || g22.norm() == 0.0 {
        return Err(SteadyError::ZeroDenominator);
    }
    let term1 = rates.plus(0, 1, 0) - rates.minus(0, 1, 0) * rates.plus(0, 0, 0) / g11;
    let term2 = rates.plus(0, 1, 1) - rates.minus(0, 1, 1) * rates.plus(1, 1, 1) / g22;
    let lhs = term1 + term2;
    Ok(ZeroCoherenceCheck {
        lhs,
        satisfied: lhs.norm() <= ZERO_COHERENCE_TOL,
    })
}

/// Secular (rate-equation) steady populations in basis order; coherences
/// are identically zero in this approximation.
///
/// When every upward rate vanishes (all baths at T = 0) the ratio form is
/// undefined and all population is placed on the lowest level(s).
pub fn secular_reference(
    rates: &DissipationRates,
    system: &SystemSpec,
) -> Result<Vec<f64>, SteadyError> {
    check_two_transitions(rates)?;
    let gp1 = rates.plus(0, 0, 0).re;
    let gp2 = rates.plus(1, 1, 1).re;
    let gm1 = rates.minus(0, 0, 0).re;
    let gm2 = rates.minus(1, 1, 1).re;

    let pops = match system.kind() {
        SystemKind::Lambda => {
            if gp1 == 0.0 || gp2 == 0.0 {
                return Ok(ground_state_populations(system));
            }
            let r1 = gm1 / gp1;
            let r2 = gm2 / gp2;
            let ne = 1.0 / (1.0 + r1 + r2);
            vec![r1 * ne, r2 * ne, ne]
        }
        SystemKind::Vee => {
            // n̄ᵢ/n̄_g = Γ⁺ᵢᵢ(εᵢ)/Γ⁻ᵢᵢ(εᵢ); Γ⁻ > 0 whenever the coupling is on
            let r1 = if gm1 > 0.0 { gp1 / gm1 } else { 0.0 };
            let r2 = if gm2 > 0.0 { gp2 / gm2 } else { 0.0 };
            let ng = 1.0 / (1.0 + r1 + r2);
            vec![ng, r1 * ng, r2 * ng]
        }
        SystemKind::Xi => {
            let r1 = if gm1 > 0.0 { gp1 / gm1 } else { 0.0 };
            let r2 = if gm2 > 0.0 { gp2 / gm2 } else { 0.0 };
            let ng = 1.0 / (1.0 + r1 + r1 * r2);
            vec![ng, r1 * ng, r1 * r2 * ng]
        }
        SystemKind::CoupledTls => {
            return Err(SteadyError::WrongKind {
                expected: SystemKind::Lambda,
                got: SystemKind::CoupledTls,
            })
        }
    };
    Ok(pops)
}

fn ground_state_populations(system: &SystemSpec) -> Vec<f64> {
    let e = system.energies();
    let min = e.iter().copied().fold(f64::INFINITY, f64::min);
    let lowest: Vec<usize> = (0..e.len()).filter(|&i| e[i] == min).collect();
    let mut pops = vec![0.0; e.len()];
    for &i in &lowest {
        pops[i] = 1.0 / lowest.len() as f64;
    }
    pops
}

/// Convenience: solve the V-type steady state from its rate table.
pub fn steady_vee(
    rates: &DissipationRates,
    transitions: &TransitionSet,
) -> Result<SteadyState, SteadyError> {
    Ok(build_bloch_vee(rates, transitions)?.solve()?.state)
}
