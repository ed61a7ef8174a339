//! Small-dimension complex linear algebra built on real decompositions.
//!
//! Every complex decomposition here goes through the real embedding
//! `M = X + iY  ->  [[X, -Y], [Y, X]]`. The matrices this crate works
//! with are tiny (d ≤ 4, superoperators ≤ 16×16), so the doubled
//! dimension costs nothing.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{CMatrix, CVector};

/// Conjugate transpose.
pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// Max elementwise deviation from Hermiticity.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Real embedding [[Re, -Im], [Im, Re]] of a complex matrix.
pub fn real_embedding(m: &CMatrix) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut e = DMatrix::<f64>::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            e[(i, j)] = z.re;
            e[(i, j + c)] = -z.im;
            e[(i + r, j)] = z.im;
            e[(i + r, j + c)] = z.re;
        }
    }
    e
}

/// Singular values (descending) and right singular vectors of a complex
/// matrix. The embedding doubles every singular value; this returns the
/// de-duplicated complex spectrum with one right vector per value.
pub fn complex_svd(m: &CMatrix) -> (Vec<f64>, Vec<CVector>) {
    let n = m.ncols();
    let e = real_embedding(m);
    let svd = e.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });
    // Embedding vectors come in pairs (a;b), (-b;a) with equal sigma; taking
    // every other one in descending order yields one representative per
    // complex singular value.
    let mut sigmas = Vec::with_capacity(n);
    let mut vecs = Vec::with_capacity(n);
    for k in 0..n {
        let idx = order[2 * k];
        sigmas.push(svd.singular_values[idx]);
        let row = vt.row(idx);
        let mut v = CVector::zeros(n);
        for j in 0..n {
            v[j] = Complex64::new(row[j], row[j + n]);
        }
        let norm = v.norm();
        if norm > 0.0 {
            v /= Complex64::new(norm, 0.0);
        }
        vecs.push(v);
    }
    (sigmas, vecs)
}

/// Eigenvalues of a complex Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let e = real_embedding(m);
    let sym = nalgebra::SymmetricEigen::new(e);
    let mut vals: Vec<f64> = sym.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // doubled spectrum: take every other entry
    vals.into_iter().step_by(2).collect()
}

/// Smallest eigenvalue of a complex Hermitian matrix.
pub fn hermitian_min_eigenvalue(m: &CMatrix) -> f64 {
    let e = real_embedding(m);
    let sym = nalgebra::SymmetricEigen::new(e);
    sym.eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Real parts of the eigenvalues of a general complex matrix.
///
/// The embedding's spectrum is eig(M) ∪ conj(eig(M)), so the multiset of
/// real parts is exactly doubled; this halves it back.
pub fn eigenvalue_real_parts(m: &CMatrix) -> Vec<f64> {
    let e = real_embedding(m);
    let eig = e.complex_eigenvalues();
    let mut re: Vec<f64> = eig.iter().map(|z| z.re).collect();
    re.sort_by(|a, b| a.partial_cmp(b).unwrap());
    re.into_iter().step_by(2).collect()
}

/// Solve the square complex system A x = b by LU with full pivoting.
pub fn solve(a: &CMatrix, b: &CVector) -> Option<CVector> {
    a.clone().full_piv_lu().solve(b)
}

/// Determinant of a square complex matrix.
pub fn determinant(a: &CMatrix) -> Complex64 {
    a.clone().full_piv_lu().determinant()
}

/// Frobenius norm.
pub fn fro_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Induced infinity norm (max absolute row sum).
pub fn inf_norm(m: &CMatrix) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0f64, f64::max)
}

/// Column-stacking vectorization: vec(ρ)[i + d·j] = ρ[i, j].
pub fn vectorize(m: &CMatrix) -> CVector {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &CVector, d: usize) -> CMatrix {
    DMatrix::from_column_slice(d, d, v.as_slice())
}

/// Superoperator of ρ ↦ A ρ B under column stacking: Bᵀ ⊗ A.
pub fn sandwich(a: &CMatrix, b: &CMatrix) -> CMatrix {
    b.transpose().kronecker(a)
}

/// Superoperator of ρ ↦ A ρ.
pub fn left_mul(a: &CMatrix) -> CMatrix {
    let d = a.nrows();
    CMatrix::identity(d, d).kronecker(a)
}

/// Superoperator of ρ ↦ ρ B.
pub fn right_mul(b: &CMatrix) -> CMatrix {
    let d = b.nrows();
    b.transpose().kronecker(&CMatrix::identity(d, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64 as C;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn svd_recovers_null_vector() {
        // rank-deficient 3x3 with known kernel (1, -1, 0)/sqrt(2) rotated by i
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 2.0),
                c(0.0, 1.0),
                c(0.0, 1.0),
                c(3.0, 0.0),
                c(2.0, -1.0),
                c(2.0, -1.0),
                c(0.5, 0.5),
            ],
        );
        let (sigmas, vecs) = complex_svd(&m);
        assert!(sigmas[0] >= sigmas[1] && sigmas[1] >= sigmas[2]);
        assert!(sigmas[2] < 1e-12 * sigmas[0]);
        let null = &vecs[2];
        assert!((&m * null).norm() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_matches_known_values() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let m =
            CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let vals = hermitian_eigenvalues(&m);
        assert_relative_eq!(vals[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(vals[1], 3.0, epsilon = 1e-12);
        assert_relative_eq!(hermitian_min_eigenvalue(&m), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn vectorization_roundtrip_and_sandwich() {
        let a =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 1.0), c(0.0, 2.0), c(3.0, 0.0), c(0.0, -1.0)]);
        let b =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(2.0, 0.0), c(1.0, -1.0), c(0.5, 0.0)]);
        let rho =
            CMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.4, 0.0)]);
        let direct = &a * &rho * &b;
        let via_super = unvectorize(&(sandwich(&a, &b) * vectorize(&rho)), 2);
        assert!(fro_norm(&(direct - via_super)) < 1e-14);
        assert_eq!(unvectorize(&vectorize(&rho), 2), rho);
    }

    #[test]
    fn eigenvalue_real_parts_of_rotation_like_matrix() {
        // [[0, 1], [-1, 0]] has eigenvalues ±i (real parts 0);
        // add -0.5 I to shift them.
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(-0.5, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(-0.5, 0.0)],
        );
        let re = eigenvalue_real_parts(&m);
        assert_eq!(re.len(), 2);
        assert_relative_eq!(re[0], -0.5, epsilon = 1e-10);
        assert_relative_eq!(re[1], -0.5, epsilon = 1e-10);
    }
}
