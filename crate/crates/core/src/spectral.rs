//! Frequency-domain response functions `𝒢(λ) = ∫ dΔτ e^{iλΔτ} G(Δτ)`.
//!
//! Both backgrounds give the same structure: a Bose-type detailed-balance
//! weight times a geometric factor for the cross-atom response. In de Sitter
//! the inverse temperature is `2πκ` and the geometric factor is
//! [`geometric_factor_f`]; in thermal Minkowski the inverse temperature is
//! `1/T` and the factor reduces to `sin(λL)/(λL)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::correlators::PairKind;
use crate::error::{Error, Result};
use crate::geometry::Spacetime;

/// Below this magnitude the removable singularities use their Taylor series.
const SERIES_SWITCH: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralValue {
    pub lambda: f64,
    pub value: f64,
}

/// `x / (1 - e^{-x})`, continuous through `x = 0`.
pub(crate) fn bose_weight(x: f64) -> f64 {
    if x.abs() < SERIES_SWITCH {
        let x2 = x * x;
        1.0 + 0.5 * x + x2 / 12.0 - x2 * x2 / 720.0
    } else {
        x / -(-x).exp_m1()
    }
}

/// `sin(x) / x`.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < SERIES_SWITCH {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `asinh(y) / y`.
fn asinh_ratio(y: f64) -> f64 {
    if y.abs() < SERIES_SWITCH {
        let y2 = y * y;
        1.0 - y2 / 6.0 + 3.0 * y2 * y2 / 40.0
    } else {
        y.asinh() / y
    }
}

/// De Sitter same-atom response `(1/2π) λ / (1 - e^{-2πκλ})`.
pub fn fourier_desitter_same(lambda: f64, kappa: f64) -> f64 {
    let beta = 2.0 * PI * kappa;
    bose_weight(beta * lambda) / (2.0 * PI * beta)
}

/// Phase length `2κ asinh(z/κ)` of the geometric factor; tends to `2z` in flat space.
pub fn phase_length(z: f64, kappa: f64) -> f64 {
    2.0 * z * asinh_ratio(z / kappa)
}

/// Geometric factor
/// `f(λ, z) = sin(2κλ asinh(z/κ)) / (2zλ sqrt(1 + z²/κ²))`,
/// with the `λ → 0` and `z → 0` limits filled in.
pub fn geometric_factor_f(lambda: f64, z: f64, kappa: f64) -> f64 {
    let u = phase_length(z, kappa);
    let d = (1.0 + (z / kappa).powi(2)).sqrt();
    // f = (u / 2z d) · sinc(λu); the prefactor is asinh(z/κ)/(z/κ) / d
    asinh_ratio(z / kappa) / d * sinc(lambda.abs() * u)
}

/// De Sitter cross-atom response `𝒢^(11)(λ) f(λ, L/2)`.
pub fn fourier_desitter_cross(lambda: f64, kappa: f64, separation: f64) -> f64 {
    fourier_desitter_same(lambda, kappa) * geometric_factor_f(lambda, 0.5 * separation, kappa)
}

/// Thermal Minkowski response.
///
/// Closing the `Δτ` contour picks up the light-cone poles of every image
/// `n ≥ 0` for `λ > 0` (and `n ≤ -1` for `λ < 0`); the vacuum pole pair
/// contributes `sin(λL) / (2πL)` and image `n` carries an extra
/// `e^{-nλ/T}`. Summing the geometric series gives
/// `(λ/2π) sinc(λL) / (1 - e^{-λ/T})`, and `(λ/2π) θ(λ) sinc(λL)` at `T = 0`.
pub fn fourier_thermal_minkowski(
    lambda: f64,
    temperature: f64,
    separation: f64,
    pair: PairKind,
) -> Result<f64> {
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(Error::invalid(
            "temperature",
            temperature,
            "temperature must be non-negative",
        ));
    }
    if pair == PairKind::Cross && !(separation > 0.0) {
        return Err(Error::invalid(
            "L",
            separation,
            "cross response needs positive separation",
        ));
    }
    Ok(thermal_unchecked(lambda, temperature, separation, pair))
}

fn thermal_unchecked(lambda: f64, temperature: f64, separation: f64, pair: PairKind) -> f64 {
    let base = if temperature == 0.0 {
        if lambda > 0.0 {
            lambda / (2.0 * PI)
        } else {
            0.0
        }
    } else {
        temperature * bose_weight(lambda / temperature) / (2.0 * PI)
    };
    match pair {
        PairKind::Same => base,
        PairKind::Cross => base * sinc(lambda * separation),
    }
}

/// Response function of the given background and pair at frequency `lambda`.
/// `separation` is ignored for [`PairKind::Same`].
pub fn response(spacetime: &Spacetime, pair: PairKind, lambda: f64, separation: f64) -> f64 {
    match (spacetime, pair) {
        (Spacetime::DeSitter(p), PairKind::Same) => fourier_desitter_same(lambda, p.kappa()),
        (Spacetime::DeSitter(p), PairKind::Cross) => {
            fourier_desitter_cross(lambda, p.kappa(), separation)
        }
        (Spacetime::ThermalMinkowski(b), _) => {
            thermal_unchecked(lambda, b.temperature(), separation, pair)
        }
    }
}

/// Detailed-balance factor `𝒢(λ)/𝒢(-λ)` the background must satisfy:
/// `e^{2πκλ}` or `e^{λ/T}`.
pub fn kms_factor(spacetime: &Spacetime, lambda: f64) -> f64 {
    match spacetime {
        Spacetime::DeSitter(p) => (2.0 * PI * p.kappa() * lambda).exp(),
        Spacetime::ThermalMinkowski(b) => (lambda / b.temperature()).exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn same_at_zero_frequency() {
        for &k in &[0.3, 1.0, 7.0] {
            assert!(rel(fourier_desitter_same(0.0, k), 1.0 / (4.0 * PI * PI * k)) < 1e-15);
        }
    }

    #[test]
    fn same_reference_value() {
        // (1/2π)/(1 - e^{-2π}) at 30 digits
        assert!(rel(fourier_desitter_same(1.0, 1.0), 0.159_452_711_899_783_7) < 1e-15);
    }

    #[test]
    fn series_branches_are_continuous() {
        let x = SERIES_SWITCH;
        let below = bose_weight(x * (1.0 - 1e-12));
        let above = bose_weight(x * (1.0 + 1e-12));
        assert!((below - above).abs() < 1e-10);
        let below = sinc(x * (1.0 - 1e-12));
        let above = sinc(x * (1.0 + 1e-12));
        assert!((below - above).abs() < 1e-10);
        let below = asinh_ratio(x * (1.0 - 1e-12));
        let above = asinh_ratio(x * (1.0 + 1e-12));
        assert!((below - above).abs() < 1e-10);
    }

    #[test]
    fn geometric_factor_limits() {
        let k = 1.5;
        assert!((geometric_factor_f(2.0, 1e-9, k) - 1.0).abs() < 1e-12);
        let z = 0.8;
        let lim = k * (z / k).asinh() / (z * (1.0 + (z / k).powi(2)).sqrt());
        assert!(rel(geometric_factor_f(0.0, z, k), lim) < 1e-15);
        assert!(rel(geometric_factor_f(1e-9, z, k), lim) < 1e-12);
        let direct = (2.0 * k * 3.0 * (z / k).asinh()).sin()
            / (2.0 * z * 3.0 * (1.0 + (z / k).powi(2)).sqrt());
        assert!(rel(geometric_factor_f(3.0, z, k), direct) < 1e-14);
    }

    #[test]
    fn geometric_factor_decays_with_separation() {
        let k = 1.0;
        let envelope = |l: f64| 1.0 / (l * (1.0 + (l / (2.0 * k)).powi(2)).sqrt());
        for &l in &[10.0, 100.0, 1000.0] {
            assert!(geometric_factor_f(1.0, 0.5 * l, k).abs() <= envelope(l) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn cross_tends_to_same() {
        let k = 0.9;
        assert!(
            rel(
                fourier_desitter_cross(1.3, k, 1e-9),
                fourier_desitter_same(1.3, k)
            ) < 1e-12
        );
        for &lambda in &[0.5, 2.0] {
            for &l in &[1e-3 / lambda, 1e-4 / lambda] {
                let same = fourier_thermal_minkowski(lambda, 0.4, l, PairKind::Same).unwrap();
                let cross = fourier_thermal_minkowski(lambda, 0.4, l, PairKind::Cross).unwrap();
                let x = lambda * l;
                assert!(rel(cross, same) <= x * x / 6.0 * 1.01);
            }
        }
    }

    #[test]
    fn thermal_vacuum_limit() {
        assert!(
            rel(
                fourier_thermal_minkowski(2.0, 0.0, 1.0, PairKind::Same).unwrap(),
                2.0 / (2.0 * PI)
            ) < 1e-15
        );
        assert_eq!(
            fourier_thermal_minkowski(-2.0, 0.0, 1.0, PairKind::Same).unwrap(),
            0.0
        );
        // T → 0 from above approaches the step response
        let cold = fourier_thermal_minkowski(2.0, 1e-3, 1.0, PairKind::Same).unwrap();
        assert!(rel(cold, 2.0 / (2.0 * PI)) < 1e-12);
        let cross = fourier_thermal_minkowski(2.0, 1e-3, 0.7, PairKind::Cross).unwrap();
        assert!(rel(cross / cold, (2.0f64 * 0.7).sin() / (2.0 * 0.7)) < 1e-12);
        assert!(fourier_thermal_minkowski(1.0, -0.1, 1.0, PairKind::Same).is_err());
    }

    #[test]
    fn thermal_matches_explicit_residue_sum() {
        // sum the image residues term by term instead of the geometric series
        let (t, l) = (0.7, 1.3);
        for &lambda in &[0.4f64, 1.5, -0.8, -2.2] {
            let mut acc = 0.0;
            let (start, sign) = if lambda > 0.0 { (0, 1.0) } else { (1, -1.0) };
            for n in start..2000 {
                acc += (-(n as f64) * lambda.abs() / t).exp();
            }
            let expected = sign * (lambda * l).sin() / (2.0 * PI * l) * acc;
            let got = fourier_thermal_minkowski(lambda, t, l, PairKind::Cross).unwrap();
            assert!(rel(got, expected) < 1e-13, "lambda={lambda}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn desitter_kms(lambda in -10.0f64..10.0, kappa in 0.1f64..2.0, l in 0.01f64..20.0) {
                prop_assume!(lambda.abs() > 1e-6);
                let s = Spacetime::de_sitter(kappa, 0.0).unwrap();
                let ratio = fourier_desitter_same(lambda, kappa) / fourier_desitter_same(-lambda, kappa);
                prop_assert!(rel(ratio, kms_factor(&s, lambda)) < 1e-12);
                let c = fourier_desitter_cross(lambda, kappa, l);
                prop_assume!(c.abs() > 1e-200);
                let ratio = c / fourier_desitter_cross(-lambda, kappa, l);
                prop_assert!(rel(ratio, kms_factor(&s, lambda)) < 1e-12);
            }

            #[test]
            fn thermal_kms(lambda in -10.0f64..10.0, t in 0.05f64..10.0, l in 0.01f64..20.0) {
                prop_assume!(lambda.abs() > 1e-6);
                let s = Spacetime::thermal(t).unwrap();
                for pair in [PairKind::Same, PairKind::Cross] {
                    let a = fourier_thermal_minkowski(lambda, t, l, pair).unwrap();
                    let b = fourier_thermal_minkowski(-lambda, t, l, pair).unwrap();
                    prop_assume!(b.abs() > 1e-200);
                    prop_assert!(rel(a / b, kms_factor(&s, lambda)) < 1e-12);
                }
            }

            #[test]
            fn f_even_and_bounded(lambda in -20.0f64..20.0, z in 1e-6f64..50.0, kappa in 0.05f64..10.0) {
                let f = geometric_factor_f(lambda, z, kappa);
                prop_assert_eq!(f, geometric_factor_f(-lambda, z, kappa));
                prop_assert!(f.abs() <= 1.0 + 1e-15);
                if lambda > 0.0 {
                    prop_assert!(fourier_desitter_cross(lambda, kappa, 2.0 * z).abs()
                        <= fourier_desitter_same(lambda, kappa) * (1.0 + 1e-15));
                }
            }

            #[test]
            fn same_response_positive(lambda in 1e-6f64..50.0, kappa in 0.01f64..10.0) {
                prop_assert!(fourier_desitter_same(lambda, kappa) > 0.0);
            }
        }
    }
}
