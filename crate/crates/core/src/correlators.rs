//! Positive-frequency Wightman functions along static trajectories.
//!
//! These are kept in the time domain with an explicit `iε` regulator. The
//! rest of the crate works with exact frequency-domain closed forms; the
//! functions here serve as the independent time-domain reference.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Spacetime;

/// Which pair of atoms the two field insertions sit on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    /// Both insertions on the same atom, `G^(11) = G^(22)`.
    Same,
    /// One insertion on each atom, `G^(12) = G^(21)`.
    Cross,
}

/// De Sitter same-atom correlator `-1 / (16π²κ² sinh²(Δτ/2κ - iε))`.
pub fn wightman_desitter_same(delta_tau: f64, epsilon: f64, kappa: f64) -> Complex64 {
    let s = Complex64::new(delta_tau / (2.0 * kappa), -epsilon).sinh();
    -1.0 / (16.0 * PI * PI * kappa * kappa * s * s)
}

/// De Sitter cross correlator for two atoms at equal `r` separated by `delta_theta`.
pub fn wightman_desitter_cross(
    delta_tau: f64,
    epsilon: f64,
    kappa: f64,
    r: f64,
    delta_theta: f64,
) -> Complex64 {
    let s = Complex64::new(delta_tau / (2.0 * kappa), -epsilon).sinh();
    let offset = (r / kappa * (0.5 * delta_theta).sin()).powi(2);
    -1.0 / (16.0 * PI * PI * kappa * kappa * (s * s - offset))
}

/// Partial image sum plus a rigorous bound on the omitted terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSum {
    pub value: Complex64,
    pub terms_used: usize,
    pub tail_bound: f64,
}

/// Thermal Minkowski correlator as a sum over imaginary-time images
/// `n ∈ [-n_max, n_max]`.
///
/// Each image term obeys `|term| <= 1/(4π² y²)` with `y` the imaginary part of
/// its shifted argument, so the omitted tail is bounded by comparison with
/// `Σ 1/(m - εT)²`. At zero temperature only the vacuum term exists.
pub fn wightman_thermal_minkowski(
    delta_tau: f64,
    epsilon: f64,
    temperature: f64,
    separation: f64,
    pair: PairKind,
    n_max: usize,
) -> Result<TruncatedSum> {
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
            "cross correlator needs positive separation",
        ));
    }
    let l2 = match pair {
        PairKind::Same => 0.0,
        PairKind::Cross => separation * separation,
    };
    let term = |shift: f64| {
        let z = Complex64::new(delta_tau, -(shift + epsilon));
        -1.0 / (4.0 * PI * PI * (z * z - l2))
    };

    if temperature == 0.0 {
        return Ok(TruncatedSum {
            value: term(0.0),
            terms_used: 1,
            tail_bound: 0.0,
        });
    }

    let beta = 1.0 / temperature;
    let mut value = term(0.0);
    for n in 1..=n_max {
        let shift = n as f64 * beta;
        value += term(shift) + term(-shift);
    }

    let offset = epsilon * temperature;
    let n = n_max as f64;
    let tail_bound = if n > offset {
        2.0 * temperature * temperature / (4.0 * PI * PI * (n - offset))
    } else {
        f64::INFINITY
    };

    Ok(TruncatedSum {
        value,
        terms_used: 2 * n_max + 1,
        tail_bound,
    })
}

/// A single correlator evaluation request.
#[derive(Debug, Clone, Copy)]
pub struct CorrelatorQuery {
    pub delta_tau: f64,
    pub epsilon: f64,
    pub pair: PairKind,
    pub spacetime: Spacetime,
    pub separation: f64,
}

impl CorrelatorQuery {
    /// Evaluates the query; thermal image sums are truncated at `n_max` and
    /// the tail bound is returned alongside. De Sitter values are exact.
    pub fn evaluate(&self, n_max: usize) -> Result<TruncatedSum> {
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid(
                "epsilon",
                self.epsilon,
                "regulator must be positive",
            ));
        }
        if self.pair == PairKind::Cross && !(self.separation > 0.0) {
            return Err(Error::invalid(
                "L",
                self.separation,
                "cross correlator needs positive separation",
            ));
        }
        match self.spacetime {
            Spacetime::DeSitter(patch) => {
                let kappa = patch.kappa();
                let value = match self.pair {
                    PairKind::Same => wightman_desitter_same(self.delta_tau, self.epsilon, kappa),
                    PairKind::Cross => {
                        // equal-r pair whose chord is the requested separation
                        let offset = 0.5 * self.separation;
                        let s =
                            Complex64::new(self.delta_tau / (2.0 * kappa), -self.epsilon).sinh();
                        -1.0 / (16.0 * PI * PI * (kappa * kappa * s * s - offset * offset))
                    }
                };
                Ok(TruncatedSum {
                    value,
                    terms_used: 1,
                    tail_bound: 0.0,
                })
            }
            Spacetime::ThermalMinkowski(bath) => wightman_thermal_minkowski(
                self.delta_tau,
                self.epsilon,
                bath.temperature(),
                self.separation,
                self.pair,
                n_max,
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DeSitterPatch;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn vacuum_term_only_at_zero_temperature() {
        let s = wightman_thermal_minkowski(0.7, 1e-3, 0.0, 1.0, PairKind::Same, 50).unwrap();
        let z = Complex64::new(0.7, -1e-3);
        let expected = -1.0 / (4.0 * PI * PI * z * z);
        assert!(rel(s.value, expected) < 1e-15);
        assert_eq!(s.terms_used, 1);
        assert_eq!(s.tail_bound, 0.0);
    }

    #[test]
    fn negative_temperature_rejected() {
        assert!(wightman_thermal_minkowski(0.1, 1e-3, -0.5, 1.0, PairKind::Same, 5).is_err());
        assert!(wightman_thermal_minkowski(0.1, 1e-3, 0.5, 0.0, PairKind::Cross, 5).is_err());
    }

    #[test]
    fn tail_bound_is_monotone_and_rigorous() {
        for &pair in &[PairKind::Same, PairKind::Cross] {
            for &t in &[0.1, 1.0, 3.0] {
                let mut n = 4;
                let mut prev = f64::INFINITY;
                while n <= 4096 {
                    let a = wightman_thermal_minkowski(0.3, 1e-2, t, 0.8, pair, n).unwrap();
                    let b = wightman_thermal_minkowski(0.3, 1e-2, t, 0.8, pair, 2 * n).unwrap();
                    assert!(a.tail_bound <= prev);
                    assert!(b.tail_bound <= a.tail_bound);
                    assert!((b.value - a.value).norm() <= a.tail_bound, "n={n} T={t}");
                    prev = a.tail_bound;
                    n *= 2;
                }
            }
        }
    }

    #[test]
    fn desitter_same_reduces_to_minkowski_vacuum() {
        // sinh²(Δτ/2κ - iε) ≈ (Δτ - 2iκε)²/4κ², so ε' = 2κε is the flat regulator
        let eps_flat = 0.05;
        for &dt in &[0.3, 1.0, 2.0] {
            let kappa = 1e4 * dt;
            let ds = wightman_desitter_same(dt, eps_flat / (2.0 * kappa), kappa);
            let flat =
                wightman_thermal_minkowski(dt, eps_flat, 0.0, 1.0, PairKind::Same, 0).unwrap();
            assert!(rel(ds, flat.value) < 1e-5, "dt={dt}");
        }
    }

    #[test]
    fn cross_reduces_to_same() {
        let (dt, eps, kappa) = (0.9, 1e-3, 1.3);
        let same = wightman_desitter_same(dt, eps, kappa);
        let cross = wightman_desitter_cross(dt, eps, kappa, 0.5, 1e-7);
        assert!(rel(cross, same) < 1e-10);

        let same = wightman_thermal_minkowski(dt, eps, 0.4, 1.0, PairKind::Same, 64).unwrap();
        let cross = wightman_thermal_minkowski(dt, eps, 0.4, 1e-7, PairKind::Cross, 64).unwrap();
        assert!(rel(cross.value, same.value) < 1e-10);
    }

    #[test]
    fn cross_offset_matches_embedding_interval() {
        let patch = DeSitterPatch::new(2.0, 1.1).unwrap();
        let (kappa, dtheta) = (patch.kappa(), 0.8);
        let a = patch.embed(0.0, 0.2, 0.5);
        let b = patch.embed(0.0, 0.2 + dtheta, 0.5);
        let spatial: f64 = a.iter().zip(&b).skip(2).map(|(x, y)| (x - y).powi(2)).sum();
        // chord² = 4 r² sin²(Δθ/2), so the offset is chord²/(4κ²)
        let offset_from_embedding = spatial / (4.0 * kappa * kappa);
        let offset = (patch.r() / kappa * (0.5 * dtheta).sin()).powi(2);
        assert!((offset - offset_from_embedding).abs() <= 1e-12 * offset);

        let q = CorrelatorQuery {
            delta_tau: 0.4,
            epsilon: 1e-3,
            pair: PairKind::Cross,
            spacetime: Spacetime::DeSitter(patch),
            separation: 2.0 * patch.r() * (0.5 * dtheta).sin(),
        };
        let via_query = q.evaluate(0).unwrap().value;
        let direct = wightman_desitter_cross(0.4, 1e-3, kappa, patch.r(), dtheta);
        assert!(rel(via_query, direct) < 1e-13);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn hermiticity(dt in -20.0f64..20.0, eps in 1e-4f64..0.5, kappa in 0.2f64..5.0,
                           t in 0.05f64..3.0, l in 0.1f64..4.0) {
                let a = wightman_desitter_same(dt, eps, kappa);
                let b = wightman_desitter_same(-dt, eps, kappa);
                prop_assert!((a - b.conj()).norm() <= 1e-14 * a.norm());

                let a = wightman_desitter_cross(dt, eps, kappa, 1.0, 1.2);
                let b = wightman_desitter_cross(-dt, eps, kappa, 1.0, 1.2);
                prop_assert!((a - b.conj()).norm() <= 1e-14 * a.norm());

                for pair in [PairKind::Same, PairKind::Cross] {
                    let a = wightman_thermal_minkowski(dt, eps, t, l, pair, 32).unwrap().value;
                    let b = wightman_thermal_minkowski(-dt, eps, t, l, pair, 32).unwrap().value;
                    prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm());
                }
            }
        }
    }
}
