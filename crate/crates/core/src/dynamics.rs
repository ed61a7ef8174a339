//! Fixed-step time evolution of vectorized density matrices.
//!
//! Classical 4th-order Runge-Kutta on ρ̇ = L[ρ]. No trace renormalization
//! is applied during integration: trace drift is a correctness signal and
//! is reported on the trajectory. Positivity is monitored, never enforced
//! (non-secular generators may transiently dip below zero).

use thiserror::Error;

use crate::density::DensityMatrix;
use crate::generator::Superoperator;
use crate::linalg;
use crate::CVector;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("dt must be > 0, got {0}")]
    NonPositiveDt(f64),
    #[error(
        "stability guard: dt·‖L‖ = {product:.3e} exceeds 0.1 (dt = {dt:.3e}, ‖L‖ = {norm:.3e})"
    )]
    StabilityGuard { dt: f64, norm: f64, product: f64 },
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("dimension mismatch: generator dim {expected}, state dim {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Positivity dips below this raise the trajectory warning flag.
pub const POSITIVITY_TOL: f64 = -1e-8;

/// Sampled time evolution.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Strictly increasing sample times, starting at 0.
    pub times: Vec<f64>,
    /// States at the sample times (as integrated; trace and Hermiticity
    /// hold within the accumulated integrator tolerance).
    pub states: Vec<DensityMatrix>,
    /// Smallest eigenvalue of each sampled state.
    pub min_eigenvalues: Vec<f64>,
    /// True when any sampled state dipped below [`POSITIVITY_TOL`].
    pub positivity_warning: bool,
    /// |tr ρ(t_end) − 1|.
    pub final_trace_drift: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states
            .last()
            .expect("trajectory has at least one sample")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Population series of one level.
    pub fn populations(&self, level: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.population(level)).collect()
    }

    /// Coherence series ⟨i|ρ(t)|j⟩.
    pub fn coherences(&self, i: usize, j: usize) -> Vec<num_complex::Complex64> {
        self.states.iter().map(|s| s.coherence(i, j)).collect()
    }
}

/// Step size resolving the fastest precession: 0.01 / max gap.
pub fn default_dt(max_frequency: f64) -> f64 {
    0.01 / max_frequency.abs().max(f64::MIN_POSITIVE)
}

/// Integrate ρ̇ = L[ρ] from `rho0` to `t_end` with fixed step `dt`,
/// sampling roughly 2000 points (always including start and end).
pub fn evolve(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    let steps = (t_end / dt).ceil().max(1.0) as usize;
    let stride = (steps / 2000).max(1);
    evolve_with_stride(l, rho0, t_end, dt, stride)
}

/// [`evolve`] with an explicit sampling stride (in steps).
pub fn evolve_with_stride(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory, DynamicsError> {
    if dt <= 0.0 {
        return Err(DynamicsError::NonPositiveDt(dt));
    }
    if rho0.dim() != l.dim() {
        return Err(DynamicsError::DimensionMismatch {
            expected: l.dim(),
            got: rho0.dim(),
        });
    }
    let norm = l.inf_norm();
    if dt * norm > 0.1 {
        return Err(DynamicsError::StabilityGuard {
            dt,
            norm,
            product: dt * norm,
        });
    }
    let stride = stride.max(1);
    let d = l.dim();
    let m = l.matrix();

    let mut v = linalg::vectorize(rho0.as_matrix());
    let mut k1 = CVector::zeros(d * d);
    let mut k2 = CVector::zeros(d * d);
    let mut k3 = CVector::zeros(d * d);
    let mut k4 = CVector::zeros(d * d);
    let mut scratch = CVector::zeros(d * d);

    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        min_eigenvalues: Vec::new(),
        positivity_warning: false,
        final_trace_drift: 0.0,
    };
    record_sample(&mut traj, 0.0, &v, d);

    let full_steps = (t_end / dt + 1e-12).floor() as usize;
    let remainder = t_end - full_steps as f64 * dt;
    let mut t = 0.0;
    for step in 1..=full_steps {
        rk4_step(
            m,
            &mut v,
            dt,
            &mut k1,
            &mut k2,
            &mut k3,
            &mut k4,
            &mut scratch,
        );
        t = step as f64 * dt;
        if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(DynamicsError::NonFinite { t });
        }
        if step % stride == 0 && !(remainder <= 1e-12 * dt && step == full_steps) {
            record_sample(&mut traj, t, &v, d);
        }
    }
    if remainder > 1e-12 * dt {
        rk4_step(
            m,
            &mut v,
            remainder,
            &mut k1,
            &mut k2,
            &mut k3,
            &mut k4,
            &mut scratch,
        );
        t += remainder;
        if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(DynamicsError::NonFinite { t });
        }
    }
    if full_steps > 0 || remainder > 1e-12 * dt {
        record_sample(&mut traj, t_end, &v, d);
    }

    let final_trace: num_complex::Complex64 = (0..d).map(|i| v[i + d * i]).sum();
    traj.final_trace_drift = (final_trace - num_complex::Complex64::new(1.0, 0.0)).norm();
    Ok(traj)
}

#[allow(clippy::too_many_arguments)]
fn rk4_step(
    m: &crate::CMatrix,
    v: &mut CVector,
    h: f64,
    k1: &mut CVector,
    k2: &mut CVector,
    k3: &mut CVector,
    k4: &mut CVector,
    scratch: &mut CVector,
) {
    use num_complex::Complex64;
    let h_c = Complex64::new(h, 0.0);
    let half = Complex64::new(0.5, 0.0);

    m.mul_to(v, k1);
    scratch.copy_from(v);
    scratch.axpy(half * h_c, k1, Complex64::new(1.0, 0.0));
    m.mul_to(scratch, k2);
    scratch.copy_from(v);
    scratch.axpy(half * h_c, k2, Complex64::new(1.0, 0.0));
    m.mul_to(scratch, k3);
    scratch.copy_from(v);
    scratch.axpy(h_c, k3, Complex64::new(1.0, 0.0));
    m.mul_to(scratch, k4);

    let w = Complex64::new(h / 6.0, 0.0);
    v.axpy(w, k1, Complex64::new(1.0, 0.0));
    v.axpy(w * 2.0, k2, Complex64::new(1.0, 0.0));
    v.axpy(w * 2.0, k3, Complex64::new(1.0, 0.0));
    v.axpy(w, k4, Complex64::new(1.0, 0.0));
}

fn record_sample(traj: &mut Trajectory, t: f64, v: &CVector, d: usize) {
    let rho = linalg::unvectorize(v, d);
    let herm = (&rho + linalg::dagger(&rho)) * num_complex::Complex64::new(0.5, 0.0);
    let min_eig = linalg::hermitian_min_eigenvalue(&herm);
    if min_eig < POSITIVITY_TOL {
        traj.positivity_warning = true;
    }
    traj.times.push(t);
    traj.states.push(DensityMatrix::new_unchecked(rho));
    traj.min_eigenvalues.push(min_eig);
}

/// First sampled time at which ‖ρ(t) − target‖_F ≤ eps, if any.
pub fn convergence_time(traj: &Trajectory, target: &DensityMatrix, eps: f64) -> Option<f64> {
    traj.times
        .iter()
        .zip(&traj.states)
        .find(|(_, s)| s.frobenius_distance(target) <= eps)
        .map(|(t, _)| *t)
}
