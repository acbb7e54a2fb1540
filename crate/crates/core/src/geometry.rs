//! Static-patch de Sitter geometry and the thermal Minkowski bath.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Static patch of de Sitter space with radius `alpha = sqrt(3/Λ)`; both atoms
/// sit at static radial coordinate `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeSitterPatch {
    alpha: f64,
    r: f64,
}

impl DeSitterPatch {
    pub fn new(alpha: f64, r: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid(
                "alpha",
                alpha,
                "de Sitter radius must be positive",
            ));
        }
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::invalid(
                "r",
                r,
                "radial coordinate must be non-negative",
            ));
        }
        if r >= alpha {
            return Err(Error::invalid(
                "r",
                r,
                "atoms must lie strictly inside the horizon r < alpha",
            ));
        }
        Ok(Self { alpha, r })
    }

    /// Geodesic observer at the pole of the patch, where `kappa == alpha`.
    pub fn at_pole(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `kappa = sqrt(g00) * alpha = sqrt(alpha^2 - r^2)`, the length scale
    /// that sets both the local temperature and the curvature crossover.
    pub fn kappa(&self) -> f64 {
        // (alpha - r)(alpha + r) keeps precision as r approaches alpha
        ((self.alpha - self.r) * (self.alpha + self.r)).sqrt()
    }

    /// Proper acceleration needed to hold an atom at fixed `r`.
    pub fn proper_acceleration(&self) -> f64 {
        let x = self.r / self.alpha;
        (self.r / (self.alpha * self.alpha)) / ((1.0 - x) * (1.0 + x)).sqrt()
    }

    pub fn local_temperature(&self) -> TemperatureDecomposition {
        let acceleration = self.proper_acceleration();
        TemperatureDecomposition {
            total: 1.0 / (2.0 * PI * self.kappa()),
            gibbons_hawking: 1.0 / (2.0 * PI * self.alpha),
            unruh: acceleration / (2.0 * PI),
            acceleration,
        }
    }

    /// Ricci scalar `R = 12 / alpha^2`.
    pub fn ricci_scalar(&self) -> f64 {
        12.0 / (self.alpha * self.alpha)
    }

    /// Embedding of the static point `(t, r, theta, phi)` into the 5D
    /// Minkowski space hosting the de Sitter hyperboloid.
    pub fn embed(&self, t: f64, theta: f64, phi: f64) -> [f64; 5] {
        let k = self.kappa();
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        [
            k * (t / self.alpha).sinh(),
            k * (t / self.alpha).cosh(),
            self.r * ct,
            self.r * st * cp,
            self.r * st * sp,
        ]
    }
}

/// Split of the local static-observer temperature into the Gibbons-Hawking
/// part and the Unruh part, `total^2 = gibbons_hawking^2 + unruh^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperatureDecomposition {
    pub total: f64,
    pub gibbons_hawking: f64,
    pub unruh: f64,
    pub acceleration: f64,
}

/// Minkowski spacetime with the field in a thermal state; temperature zero is
/// the Minkowski vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalBath {
    temperature: f64,
}

impl ThermalBath {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::invalid(
                "temperature",
                temperature,
                "temperature must be non-negative",
            ));
        }
        Ok(Self { temperature })
    }

    pub fn vacuum() -> Self {
        Self { temperature: 0.0 }
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }
}

/// Background spacetime together with the field state the atoms couple to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Spacetime {
    DeSitter(DeSitterPatch),
    ThermalMinkowski(ThermalBath),
}

impl Spacetime {
    pub fn de_sitter(alpha: f64, r: f64) -> Result<Self> {
        DeSitterPatch::new(alpha, r).map(Spacetime::DeSitter)
    }

    pub fn thermal(temperature: f64) -> Result<Self> {
        ThermalBath::new(temperature).map(Spacetime::ThermalMinkowski)
    }

    /// Temperature felt by a static atom: `1/(2πκ)` in de Sitter, the bath
    /// temperature in Minkowski.
    pub fn temperature(&self) -> f64 {
        match self {
            Spacetime::DeSitter(p) => p.local_temperature().total,
            Spacetime::ThermalMinkowski(b) => b.temperature(),
        }
    }

    /// Curvature length scale, `None` for flat spacetime.
    pub fn kappa(&self) -> Option<f64> {
        match self {
            Spacetime::DeSitter(p) => Some(p.kappa()),
            Spacetime::ThermalMinkowski(_) => None,
        }
    }
}

/// Probe parameters: transition frequency, coupling and separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomPair {
    pub omega0: f64,
    pub mu: f64,
    pub separation: f64,
}

impl AtomPair {
    pub fn new(omega0: f64, mu: f64, separation: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::invalid(
                "omega0",
                omega0,
                "transition frequency must be positive",
            ));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::invalid("mu", mu, "coupling must be positive"));
        }
        if !(separation.is_finite() && separation > 0.0) {
            return Err(Error::invalid(
                "L",
                separation,
                "separation must be positive",
            ));
        }
        Ok(Self {
            omega0,
            mu,
            separation,
        })
    }

    pub fn with_separation(&self, separation: f64) -> Result<Self> {
        Self::new(self.omega0, self.mu, separation)
    }
}

/// Two atoms on a common sphere of radius `r`, separated by polar angle
/// `delta_theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomPairGeometry {
    pub r: f64,
    pub delta_theta: f64,
    pub separation: f64,
}

impl AtomPairGeometry {
    pub fn new(r: f64, delta_theta: f64) -> Result<Self> {
        let separation = euclidean_separation(r, delta_theta)?;
        Ok(Self {
            r,
            delta_theta,
            separation,
        })
    }
}

/// Chord length `L = 2 r sin(Δθ/2)` between the atoms.
pub fn euclidean_separation(r: f64, delta_theta: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid("r", r, "radius must be positive"));
    }
    if !(delta_theta > 0.0 && delta_theta <= PI) {
        return Err(Error::invalid(
            "delta_theta",
            delta_theta,
            "angular separation must lie in (0, pi]",
        ));
    }
    Ok(2.0 * r * (0.5 * delta_theta).sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kappa_examples() {
        assert_eq!(DeSitterPatch::new(1.0, 0.0).unwrap().kappa(), 1.0);
        assert_eq!(DeSitterPatch::new(2.0, 0.0).unwrap().kappa(), 2.0);
        assert_relative_eq!(
            DeSitterPatch::new(1.0, 0.6).unwrap().kappa(),
            0.8,
            max_relative = 1e-15
        );
    }

    #[test]
    fn horizon_is_rejected() {
        assert!(DeSitterPatch::new(1.0, 1.0).is_err());
        assert!(DeSitterPatch::new(1.0, 1.5).is_err());
        assert!(DeSitterPatch::new(0.0, 0.0).is_err());
        assert!(DeSitterPatch::new(1.0, -0.1).is_err());
        assert!(ThermalBath::new(-1.0).is_err());
    }

    #[test]
    fn temperature_at_pole_is_gibbons_hawking() {
        let t = DeSitterPatch::new(1.0, 0.0).unwrap().local_temperature();
        assert_eq!(t.unruh, 0.0);
        assert_eq!(t.acceleration, 0.0);
        assert_relative_eq!(t.total, 1.0 / (2.0 * PI), max_relative = 1e-15);
        assert_relative_eq!(t.gibbons_hawking, 1.0 / (2.0 * PI), max_relative = 1e-15);
    }

    #[test]
    fn temperature_decomposition_closes() {
        let t = DeSitterPatch::new(1.0, 0.6).unwrap().local_temperature();
        assert_relative_eq!(t.total, 1.0 / (2.0 * PI * 0.8), max_relative = 1e-15);
        // a = 0.6 / 0.8 = 0.75, so T_a = 0.75 / 2π; T_f = 1 / 2π
        let direct = (1.0 / (2.0 * PI)).powi(2) + (0.75 / (2.0 * PI)).powi(2);
        assert_relative_eq!(t.total * t.total, direct, max_relative = 1e-14);
        assert!(t.total >= t.gibbons_hawking);
    }

    #[test]
    fn ricci_scalar_values() {
        assert_eq!(DeSitterPatch::at_pole(1.0).unwrap().ricci_scalar(), 12.0);
        assert_eq!(DeSitterPatch::at_pole(2.0).unwrap().ricci_scalar(), 3.0);
        assert!(DeSitterPatch::at_pole(1e9).unwrap().ricci_scalar() < 1e-15);
    }

    #[test]
    fn separation_examples() {
        assert_relative_eq!(
            euclidean_separation(1.0, PI).unwrap(),
            2.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            euclidean_separation(1.0, PI / 3.0).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            euclidean_separation(0.5, PI).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        assert!(euclidean_separation(1.0, 0.0).is_err());
        assert!(euclidean_separation(1.0, 3.5).is_err());
    }

    #[test]
    fn embedding_at_pole_origin() {
        let z = DeSitterPatch::at_pole(1.0).unwrap().embed(0.0, 0.3, 1.1);
        assert_eq!(z, [0.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn equal_time_interval_matches_chord() {
        let patch = DeSitterPatch::new(3.0, 1.7).unwrap();
        let (theta, dtheta, phi) = (0.4, 1.3, 0.9);
        let a = patch.embed(2.5, theta, phi);
        let b = patch.embed(2.5, theta + dtheta, phi);
        let dz2: f64 = a.iter().zip(&b).skip(1).map(|(x, y)| (x - y).powi(2)).sum();
        let dz0 = a[0] - b[0];
        assert_eq!(dz0, 0.0);
        let r = patch.r();
        assert_relative_eq!(
            dz2,
            2.0 * r * r * (1.0 - dtheta.cos()),
            max_relative = 1e-12
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn hyperboloid_constraint(alpha in 0.1f64..100.0, frac in 0.0f64..0.999,
                                      t in -5.0f64..5.0, theta in 0.0f64..PI, phi in 0.0f64..(2.0 * PI)) {
                let patch = DeSitterPatch::new(alpha, frac * alpha).unwrap();
                // keep t/alpha bounded so cosh stays representable
                let z = patch.embed(t * alpha, theta, phi);
                let lhs = z[0] * z[0] - z[1] * z[1] - z[2] * z[2] - z[3] * z[3] - z[4] * z[4];
                let scale = alpha * alpha * (t.cosh().powi(2));
                prop_assert!((lhs + alpha * alpha).abs() <= 1e-12 * scale);
            }

            #[test]
            fn decomposition_holds(alpha in 0.01f64..1e3, frac in 0.0f64..0.99) {
                let t = DeSitterPatch::new(alpha, frac * alpha).unwrap().local_temperature();
                let rhs = t.gibbons_hawking.powi(2) + t.unruh.powi(2);
                prop_assert!((t.total.powi(2) - rhs).abs() <= 1e-12 * rhs);
            }

            #[test]
            fn kappa_decreases_with_r(alpha in 0.1f64..10.0, a in 0.0f64..0.99, b in 0.0f64..0.99) {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                prop_assume!(hi - lo > 1e-9);
                let k_lo = DeSitterPatch::new(alpha, lo * alpha).unwrap().kappa();
                let k_hi = DeSitterPatch::new(alpha, hi * alpha).unwrap().kappa();
                prop_assert!(k_hi < k_lo);
            }
        }
    }
}
