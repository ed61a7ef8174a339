//! Bath occupations, dissipation rates Γ±, and weight factors.
//!
//! The dissipation rates at frequency ω are
//!
//! ```text
//! Γ⁺_ij(ω) = ½ γ_ij^L(ω) N_L(ω) + ½ γ_ij^R(ω) N_R(ω)
//! Γ⁻_ij(ω) = ½ γ_ij^L(ω) [N_L(ω)+1] + ½ γ_ij^R(ω) [N_R(ω)+1]
//! ```
//!
//! with N the Planck occupation. Only the transition gaps ε are ever used
//! as evaluation frequencies, so a [`DissipationRates`] table holds one
//! K×K complex matrix per transition frequency and per sign.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::model::{gamma, BathSpec, ModelError, TransitionSet, WeightFactorModel};
use crate::CMatrix;

#[derive(Debug, Error)]
pub enum RatesError {
    #[error("Planck occupation requires omega > 0, got {0}")]
    NonPositiveFrequency(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Planck occupation N(ω, T) = 1/(e^{ω/T} − 1), with N ≡ 0 at T = 0.
///
/// Uses expm1 so that the T ≫ ω regime does not lose precision.
pub fn planck_occupation(omega: f64, temperature: f64) -> Result<f64, RatesError> {
    if omega <= 0.0 {
        return Err(RatesError::NonPositiveFrequency(omega));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// Weight factor f(ω) ∈ [0, 1].
pub fn weight_factor(model: &WeightFactorModel, omega: f64) -> f64 {
    match *model {
        WeightFactorModel::Constant { value } => value,
        WeightFactorModel::Dimensional { d, distance_scale } => {
            let x = omega * distance_scale;
            let a = match d {
                1 => x.cos(),
                2 => bessel_j0(x),
                3 => sinc(x),
                _ => unreachable!("dimension validated at construction"),
            };
            a * a
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // sin(x)/x = 1 - x^2/6 + x^4/120 - ...
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

/// Bessel function of the first kind, order zero.
///
/// Power series for |x| ≤ 20 (cancellation stays below ~1e-9 absolute
/// there), Hankel asymptotic expansion through x⁻⁷ beyond.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 20.0 {
        let q = -0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..80 {
            term *= q / ((k * k) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        let w = 1.0 / (x * x);
        let p = 1.0 - w * (9.0 / 128.0 - w * (3675.0 / 32768.0 - w * 2401245.0 / 4194304.0));
        let q = (1.0 / x)
            * (-0.125
                + w * (75.0 / 1024.0 - w * (59535.0 / 262144.0 - w * 57972915.0 / 33554432.0)));
        let chi = x - std::f64::consts::FRAC_PI_4;
        (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}

/// Dissipation-rate tables: for each transition frequency ε_m one K×K
/// complex matrix per sign, Hermitian in the transition indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipationRates {
    frequencies: Vec<f64>,
    gamma_plus: Vec<CMatrix>,
    gamma_minus: Vec<CMatrix>,
}

impl DissipationRates {
    pub(crate) fn from_parts(
        frequencies: Vec<f64>,
        gamma_plus: Vec<CMatrix>,
        gamma_minus: Vec<CMatrix>,
    ) -> Self {
        debug_assert_eq!(frequencies.len(), gamma_plus.len());
        debug_assert_eq!(frequencies.len(), gamma_minus.len());
        Self {
            frequencies,
            gamma_plus,
            gamma_minus,
        }
    }

    /// Number of transitions K.
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Evaluation frequencies (the transition gaps, in transition order).
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Γ⁺_ij(ε_m); all indices zero-based.
    pub fn plus(&self, i: usize, j: usize, m: usize) -> Complex64 {
        self.gamma_plus[m][(i, j)]
    }

    /// Γ⁻_ij(ε_m); all indices zero-based.
    pub fn minus(&self, i: usize, j: usize, m: usize) -> Complex64 {
        self.gamma_minus[m][(i, j)]
    }

    pub fn plus_matrix(&self, m: usize) -> &CMatrix {
        &self.gamma_plus[m]
    }

    pub fn minus_matrix(&self, m: usize) -> &CMatrix {
        &self.gamma_minus[m]
    }

    /// Entrywise sum of two tables over the same frequencies.
    pub fn add(&self, other: &DissipationRates) -> DissipationRates {
        assert_eq!(self.frequencies, other.frequencies);
        DissipationRates {
            frequencies: self.frequencies.clone(),
            gamma_plus: self
                .gamma_plus
                .iter()
                .zip(&other.gamma_plus)
                .map(|(a, b)| a + b)
                .collect(),
            gamma_minus: self
                .gamma_minus
                .iter()
                .zip(&other.gamma_minus)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Max Hermiticity defect over both signs and all frequencies.
    pub fn hermiticity_defect(&self) -> f64 {
        self.gamma_plus
            .iter()
            .chain(&self.gamma_minus)
            .map(crate::linalg::hermiticity_defect)
            .fold(0.0, f64::max)
    }
}

/// Evaluate Γ± for the two transitions of a three-level system at both
/// transition gaps, summing over the given baths.
pub fn dissipation_rates(
    baths: &[BathSpec],
    transitions: &TransitionSet,
) -> Result<DissipationRates, RatesError> {
    let freqs = transitions.frequencies();
    let k = freqs.len();
    let mut gp = vec![DMatrix::zeros(k, k); k];
    let mut gm = vec![DMatrix::zeros(k, k); k];
    for (m, &omega) in freqs.iter().enumerate() {
        for bath in baths {
            let n = planck_occupation(omega, bath.temperature)?;
            for i in 0..k {
                for j in 0..k {
                    let g = gamma(bath, i + 1, j + 1, omega)?;
                    gp[m][(i, j)] += 0.5 * g * n;
                    gm[m][(i, j)] += 0.5 * g * (n + 1.0);
                }
            }
        }
    }
    Ok(DissipationRates::from_parts(freqs, gp, gm))
}

/// Max over (i, j, ω) of |Γ⁺_ij(ω)/Γ⁻_ij(ω) − e^{−ω/T}|, skipping entries
/// with Γ⁻ = 0. Zero (to rounding) exactly when both baths sit at T.
pub fn micro_reversibility_residual(rates: &DissipationRates, temperature: f64) -> f64 {
    let mut worst = 0.0f64;
    for (m, &omega) in rates.frequencies().iter().enumerate() {
        let boltzmann = if temperature == 0.0 {
            0.0
        } else {
            (-omega / temperature).exp()
        };
        for i in 0..rates.len() {
            for j in 0..rates.len() {
                let minus = rates.minus(i, j, m);
                if minus.norm() == 0.0 {
                    continue;
                }
                let ratio = rates.plus(i, j, m) / minus;
                worst = worst.max((ratio - Complex64::new(boltzmann, 0.0)).norm());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BathLabel, InterferenceSpec, SpectralModel, SystemSpec};
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

    fn crossed_baths(tl: f64, tr: f64) -> [BathSpec; 2] {
        [
            flat_bath(BathLabel::L, tl, 0.01, 0.02, 1.0, 0.0),
            flat_bath(BathLabel::R, tr, 0.02, 0.01, 1.0, 0.0),
        ]
    }

    fn lambda_transitions() -> TransitionSet {
        crate::model::transitions_of(&SystemSpec::lambda(0.0, 0.01, 1.005).unwrap()).unwrap()
    }

    #[test]
    fn planck_values() {
        // closed form at omega = T = 1, evaluated independently:
        // 1/(e - 1) = 0.5819767068693263
        assert_relative_eq!(
            planck_occupation(1.0, 1.0).unwrap(),
            0.581_976_706_869_326_3,
            epsilon = 1e-15
        );
        assert_eq!(planck_occupation(1.0, 0.0).unwrap(), 0.0);
        // high-temperature expansion N = T/w - 1/2 + O(w/T)
        let n = planck_occupation(1.0, 100.0).unwrap();
        assert_relative_eq!(n, 99.500_833_331_944_43, epsilon = 1e-12);
        assert!((n - (100.0 - 0.5)).abs() < 1e-3);
        assert!((n / 100.0 - 1.0).abs() < 2.0 * (1.0f64 / 100.0));
        assert!(planck_occupation(-1.0, 1.0).is_err());
        assert!(planck_occupation(0.0, 1.0).is_err());
    }

    #[test]
    fn planck_stable_for_tiny_ratio() {
        // naive 1/(exp(w/T)-1) loses digits at w/T = 1e-12; expm1 does not
        let n = planck_occupation(1e-12, 1.0).unwrap();
        assert_relative_eq!(n, 1e12 - 0.5, epsilon = 1e-3);
    }

    #[test]
    fn weight_factor_dimensional_values() {
        let d3 = WeightFactorModel::Dimensional {
            d: 3,
            distance_scale: 0.0,
        };
        assert_relative_eq!(weight_factor(&d3, 1.0), 1.0);

        let d1 = WeightFactorModel::Dimensional {
            d: 1,
            distance_scale: 1.0,
        };
        assert!(weight_factor(&d1, std::f64::consts::FRAC_PI_2).abs() < 1e-30);

        // first zero of J0
        let d2 = WeightFactorModel::Dimensional {
            d: 2,
            distance_scale: 1.0,
        };
        assert!(weight_factor(&d2, 2.404_825_557_695_773).abs() < 1e-24);
    }

    #[test]
    fn bessel_j0_against_integral_oracle() {
        // independent oracle: J0(x) = (1/pi) * int_0^pi cos(x sin t) dt,
        // composite Simpson with 2000 panels
        let oracle = |x: f64| {
            let n = 4000;
            let h = std::f64::consts::PI / n as f64;
            let f = |t: f64| (x * t.sin()).cos();
            let mut s = f(0.0) + f(std::f64::consts::PI);
            for k in 1..n {
                let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                s += w * f(k as f64 * h);
            }
            s * h / 3.0 / std::f64::consts::PI
        };
        for &x in &[
            0.0,
            0.5,
            1.0,
            2.404825557695773,
            5.0,
            7.9,
            12.0,
            19.9,
            20.1,
            35.0,
        ] {
            assert_relative_eq!(bessel_j0(x), oracle(x), epsilon = 1e-9, max_relative = 1e-8);
        }
    }

    #[test]
    fn zero_temperature_rates() {
        let tr = lambda_transitions();
        let rates = dissipation_rates(&crossed_baths(0.0, 0.0), &tr).unwrap();
        for m in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(rates.plus(i, j, m), Complex64::new(0.0, 0.0));
                }
            }
            // Gamma- = (gamma_L + gamma_R)/2
            assert_relative_eq!(rates.minus(0, 0, m).re, 0.015, epsilon = 1e-15);
            assert_relative_eq!(rates.minus(1, 1, m).re, 0.015, epsilon = 1e-15);
        }
    }

    #[test]
    fn crossed_gamma_plus_value() {
        // hand evaluation against the planck_occupation oracle:
        // Γ⁺₁₁(1) = ½·0.01·N(1,1) + ½·0.02·N(1,2)
        let n1 = planck_occupation(1.0, 1.0).unwrap();
        let n2 = planck_occupation(1.0, 2.0).unwrap();
        let expected = 0.5 * 0.01 * n1 + 0.5 * 0.02 * n2;
        assert_relative_eq!(expected, 0.018_324_824_359_714_616, epsilon = 1e-15);

        // same number out of the table when evaluated at gap 1.0
        let sys = SystemSpec::lambda(0.0, 0.0, 1.0).unwrap();
        let tr = crate::model::transitions_of(&sys).unwrap();
        let rates = dissipation_rates(&crossed_baths(1.0, 2.0), &tr).unwrap();
        assert_relative_eq!(rates.plus(0, 0, 0).re, expected, epsilon = 1e-15);
    }

    #[test]
    fn equal_temperature_detailed_balance() {
        let tr = lambda_transitions();
        for t in [0.3, 1.0, 4.2] {
            let rates = dissipation_rates(&crossed_baths(t, t), &tr).unwrap();
            assert!(micro_reversibility_residual(&rates, t) <= 1e-12);
        }
    }

    #[test]
    fn unequal_temperatures_break_detailed_balance() {
        let tr = lambda_transitions();
        let rates = dissipation_rates(&crossed_baths(1.0, 2.0), &tr).unwrap();
        assert!(micro_reversibility_residual(&rates, 1.0) > 1e-3);
    }

    #[test]
    fn f_zero_keeps_diagonal_balance() {
        let tr = lambda_transitions();
        let baths = [
            flat_bath(BathLabel::L, 1.5, 0.01, 0.02, 0.0, 0.0),
            flat_bath(BathLabel::R, 1.5, 0.02, 0.01, 0.0, 0.0),
        ];
        let rates = dissipation_rates(&baths, &tr).unwrap();
        assert_eq!(rates.plus(0, 1, 0), Complex64::new(0.0, 0.0));
        assert!(micro_reversibility_residual(&rates, 1.5) <= 1e-12);
    }

    #[test]
    fn rates_additive_over_baths() {
        let tr = lambda_transitions();
        let [l, r] = crossed_baths(0.8, 2.3);
        let both = dissipation_rates(&[l.clone(), r.clone()], &tr).unwrap();
        let only_l = dissipation_rates(&[l], &tr).unwrap();
        let only_r = dissipation_rates(&[r], &tr).unwrap();
        let sum = only_l.add(&only_r);
        for m in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_relative_eq!(
                        (both.plus(i, j, m) - sum.plus(i, j, m)).norm(),
                        0.0,
                        epsilon = 1e-18
                    );
                    assert_relative_eq!(
                        (both.minus(i, j, m) - sum.minus(i, j, m)).norm(),
                        0.0,
                        epsilon = 1e-18
                    );
                }
            }
        }
    }

    #[test]
    fn gamma_plus_monotone_in_temperature() {
        let tr = lambda_transitions();
        let mut prev = -1.0;
        for t in [0.5, 1.0, 2.0, 4.0] {
            let rates = dissipation_rates(&crossed_baths(t, 1.0), &tr).unwrap();
            let v = rates.plus(0, 0, 0).re;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn emission_dominates_absorption() {
        let tr = lambda_transitions();
        let rates = dissipation_rates(&crossed_baths(0.7, 3.0), &tr).unwrap();
        for m in 0..2 {
            for i in 0..2 {
                assert!(rates.minus(i, i, m).re > rates.plus(i, i, m).re);
            }
        }
    }
}
