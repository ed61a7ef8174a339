//! Steady states, dynamics, and heat fluxes of small open quantum systems
//! coupled to two heat baths at different temperatures, using a non-secular
//! Born-Markov master equation that keeps the interference (cross-transition)
//! terms usually dropped by the secular approximation.
//!
//! The library covers the three canonical three-level configurations
//! (Λ, V, Ξ) with two dipole transitions, and a pair of coupled two-level
//! systems whose internal energy flux is tied to the steady coherence
//! between its single-excitation eigenstates.
//!
//! Units: ℏ = k_B = 1 throughout; energies are dimensionless and typically
//! expressed relative to the mean transition gap.
//!
//! Layout:
//! - [`model`]: system/bath/spectrum specifications and validation
//! - [`rates`]: Planck occupations, dissipation rates Γ±, weight factors
//! - [`generator`]: non-secular and secular superoperators, Lamb shift
//! - [`steady`]: null-space and Bloch-linear steady-state solvers,
//!   determinant and zero-coherence diagnostics
//! - [`dynamics`]: fixed-step 4th-order time evolution
//! - [`flux`]: coupled two-qubit model and flux-coherence identities
//! - [`verify`]: the named self-checks behind `neqcoh verify`

pub mod density;
pub mod dynamics;
pub mod flux;
pub mod generator;
pub mod linalg;
pub mod model;
pub mod rates;
pub mod steady;
pub mod verify;

pub use density::DensityMatrix;
pub use model::{
    BathLabel, BathSpec, InterferenceSpec, SpectralModel, SystemKind, SystemSpec, Transition,
    TransitionSet, WeightFactorModel,
};
pub use rates::DissipationRates;

/// Dense complex matrix used throughout.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<num_complex::Complex64>;
/// Complex scalar.
pub type C64 = num_complex::Complex64;
