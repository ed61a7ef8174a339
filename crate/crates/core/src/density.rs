//! Density matrices: d×d complex, Hermitian, unit trace.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::linalg;
use crate::CMatrix;

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("density matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("density matrix not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("density matrix trace {trace:.6e} too far from 1")]
    BadTrace { trace: f64 },
}

/// Hermitian, unit-trace state of a d-level system.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validate and wrap a matrix. Hermiticity must hold to 1e-9; the trace
    /// must be within 1e-9 of 1 and is then normalized away exactly.
    pub fn new(m: CMatrix) -> Result<Self, DensityError> {
        if m.nrows() != m.ncols() {
            return Err(DensityError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let defect = linalg::hermiticity_defect(&m);
        if defect > 1e-9 {
            return Err(DensityError::NotHermitian { defect });
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(DensityError::BadTrace { trace: tr.re });
        }
        let mut m = m;
        m /= tr;
        // symmetrize away the sub-tolerance asymmetry
        let h = (&m + linalg::dagger(&m)) * Complex64::new(0.5, 0.0);
        Ok(Self { m: h })
    }

    /// Wrap without validation; callers guarantee the invariants.
    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        Self { m }
    }

    /// Pure state |level⟩⟨level|.
    pub fn ground(dim: usize, level: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(level, level)] = Complex64::new(1.0, 0.0);
        Self { m }
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        let m = CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        Self { m }
    }

    /// Diagonal state from populations (normalized here).
    pub fn from_populations(pops: &[f64]) -> Self {
        let total: f64 = pops.iter().sum();
        let d = pops.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, p) in pops.iter().enumerate() {
            m[(i, i)] = Complex64::new(p / total, 0.0);
        }
        Self { m }
    }

    /// Random full-rank state ρ = G G† / tr(G G†) with Ginibre G.
    pub fn random<R: Rng>(dim: usize, rng: &mut R) -> Self {
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let mut m = &g * linalg::dagger(&g);
        let tr = m.trace();
        m /= tr;
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn population(&self, level: usize) -> f64 {
        self.m[(level, level)].re
    }

    /// ⟨i|ρ|j⟩.
    pub fn coherence(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_min_eigenvalue(&self.m)
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        linalg::fro_norm(&(&self.m - &other.m))
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ground_and_mixed_are_valid() {
        let g = DensityMatrix::ground(3, 1);
        assert_eq!(g.population(1), 1.0);
        assert_eq!(g.population(0), 0.0);
        let m = DensityMatrix::maximally_mixed(4);
        assert_relative_eq!(m.population(2), 0.25);
        assert_relative_eq!(m.trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn random_states_are_positive_unit_trace() {
        let mut rng = rand::rngs::mock::StepRng::new(42, 0x9E3779B97F4A7C15);
        for _ in 0..5 {
            let rho = DensityMatrix::random(3, &mut rng);
            assert_relative_eq!(rho.trace().re, 1.0, epsilon = 1e-12);
            assert!(rho.min_eigenvalue() > -1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian_and_bad_trace() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            DensityMatrix::new(m),
            Err(DensityError::NotHermitian { .. })
        ));

        let m = CMatrix::identity(2, 2);
        assert!(matches!(
            DensityMatrix::new(m),
            Err(DensityError::BadTrace { .. })
        ));
    }
}
