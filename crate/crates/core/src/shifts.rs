//! Dicke collective states, level shifts and the resonance interaction energy.

use std::f64::consts::PI;

use nalgebra::Vector4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Spacetime;
use crate::liouvillian::{GeneratorMatrices, SelfTerms};
use crate::quadrature::{rcpi_integral_with, QuadratureOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DickeState {
    /// `|gg⟩`
    G,
    /// `|ee⟩`
    E,
    /// `(|eg⟩ + |ge⟩)/√2`
    S,
    /// `(|eg⟩ - |ge⟩)/√2`
    A,
}

impl DickeState {
    pub const ALL: [DickeState; 4] = [DickeState::G, DickeState::E, DickeState::S, DickeState::A];

    /// Components in the `{|gg⟩, |ge⟩, |eg⟩, |ee⟩}` basis.
    pub fn vector(self) -> Vector4<Complex64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = match self {
            DickeState::G => [1.0, 0.0, 0.0, 0.0],
            DickeState::E => [0.0, 0.0, 0.0, 1.0],
            DickeState::S => [0.0, h, h, 0.0],
            DickeState::A => [0.0, -h, h, 0.0],
        };
        Vector4::from_iterator(v.iter().map(|&x| Complex64::from(x)))
    }

    /// Sign of the resonance interaction relative to `|S⟩`, zero for the
    /// uncorrelated states.
    pub fn resonance_sign(self) -> f64 {
        match self {
            DickeState::S => 1.0,
            DickeState::A => -1.0,
            DickeState::G | DickeState::E => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    AsymptoticFar,
    AsymptoticNear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Far,
    Near,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftResult {
    pub state: DickeState,
    pub delta_e: f64,
    pub method: Method,
    pub spacetime: Spacetime,
    pub separation: f64,
    /// Quadrature error estimate; zero for analytic methods.
    pub error: f64,
}

/// `⟨ψ|H_LS|ψ⟩` from the explicit index combinations of the generator
/// blocks. With [`SelfTerms::Exclude`] only the separation-dependent
/// cross-atom part is kept.
pub fn levelshift_general(
    gen: &GeneratorMatrices,
    state: DickeState,
    self_terms: SelfTerms,
) -> f64 {
    let (h11, h12) = (&gen.h_same, &gen.h_cross);
    // H^(11) = H^(22), H^(12) = H^(21)
    let keep = if self_terms == SelfTerms::Include {
        1.0
    } else {
        0.0
    };
    let cross33 = h12[(2, 2)] * 2.0;
    let cross_tr = h12.trace() * 2.0;
    let same_tr = h11.trace() * 2.0 * keep;
    let same_asym = (h11[(0, 1)] - h11[(1, 0)]) * 2.0 * keep;
    let i = Complex64::i();
    let half = Complex64::new(0.0, -0.5);
    let v = match state {
        DickeState::G => half * (cross33 + same_tr - i * same_asym),
        DickeState::E => half * (cross33 + same_tr + i * same_asym),
        DickeState::S => half * (cross_tr + same_tr - cross33 * 2.0),
        DickeState::A => -half * (cross_tr - same_tr),
    };
    v.re
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, v, "must be positive"))
    }
}

fn check_pair(state: DickeState) -> Result<f64> {
    match state {
        DickeState::S | DickeState::A => Ok(state.resonance_sign()),
        _ => Err(Error::invalid(
            "state",
            0.0,
            "resonance interaction is defined for S and A",
        )),
    }
}

/// `δE_S = -(μ²/4π) cos(2ω₀κ asinh(L/2κ)) / (L √(1 + (L/2κ)²))`; `A` negates.
pub fn rcpi_closed_desitter(
    l: f64,
    kappa: f64,
    omega0: f64,
    mu: f64,
    state: DickeState,
) -> Result<f64> {
    let sign = check_pair(state)?;
    for (n, v) in [("L", l), ("kappa", kappa), ("omega0", omega0), ("mu", mu)] {
        check_positive(n, v)?;
    }
    let z = l / (2.0 * kappa);
    let phase = 2.0 * omega0 * kappa * z.asinh();
    Ok(-sign * mu * mu / (4.0 * PI) * phase.cos() / (l * z.hypot(1.0)))
}

/// `δE_S = -(μ²/4π) cos(ω₀L)/L`. The bath temperature drops out.
pub fn rcpi_closed_minkowski(l: f64, omega0: f64, mu: f64, state: DickeState) -> Result<f64> {
    let sign = check_pair(state)?;
    for (n, v) in [("L", l), ("omega0", omega0), ("mu", mu)] {
        check_positive(n, v)?;
    }
    Ok(-sign * mu * mu / (4.0 * PI) * (omega0 * l).cos() / l)
}

/// Limiting forms of the de Sitter interaction far from and close to the
/// horizon scale.
pub fn rcpi_asymptotic(
    l: f64,
    kappa: f64,
    omega0: f64,
    mu: f64,
    regime: Regime,
    state: DickeState,
) -> Result<f64> {
    let sign = check_pair(state)?;
    for (n, v) in [("L", l), ("kappa", kappa), ("omega0", omega0), ("mu", mu)] {
        check_positive(n, v)?;
    }
    let v = match regime {
        Regime::Far => {
            -mu * mu / (2.0 * PI) * kappa / (l * l)
                * (2.0 * omega0 * kappa * (l / kappa).ln()).cos()
        }
        Regime::Near => -mu * mu / (4.0 * PI) * (omega0 * l).cos() / l,
    };
    Ok(sign * v)
}

/// Amplitude `|δE_S|` would have with the cosine set to one.
pub fn rcpi_envelope(spacetime: &Spacetime, l: f64, mu: f64) -> f64 {
    let base = mu * mu / (4.0 * PI * l);
    match spacetime.kappa() {
        Some(kappa) => base / (l / (2.0 * kappa)).hypot(1.0),
        None => base,
    }
}

/// Closed-form interaction energy in either background.
pub fn rcpi_closed(
    spacetime: &Spacetime,
    l: f64,
    omega0: f64,
    mu: f64,
    state: DickeState,
) -> Result<f64> {
    match spacetime.kappa() {
        Some(kappa) => rcpi_closed_desitter(l, kappa, omega0, mu, state),
        None => rcpi_closed_minkowski(l, omega0, mu, state),
    }
}

/// Interaction energy from the frequency integral over the cross-atom
/// response, `δE_S = -(μ²/4π²) P∫ …`.
pub fn rcpi_quadrature(
    spacetime: &Spacetime,
    l: f64,
    omega0: f64,
    mu: f64,
    state: DickeState,
    opts: &QuadratureOptions,
) -> Result<ShiftResult> {
    let sign = check_pair(state)?;
    check_positive("mu", mu)?;
    let r = rcpi_integral_with(spacetime, omega0, l, opts)?;
    let scale = mu * mu / (4.0 * PI * PI);
    Ok(ShiftResult {
        state,
        delta_e: -sign * scale * r.value,
        method: Method::Quadrature,
        spacetime: *spacetime,
        separation: l,
        error: scale * r.error,
    })
}

/// Evaluates the interaction with the requested method.
pub fn rcpi(
    spacetime: &Spacetime,
    l: f64,
    omega0: f64,
    mu: f64,
    state: DickeState,
    method: Method,
    opts: &QuadratureOptions,
) -> Result<ShiftResult> {
    let analytic = |delta_e| ShiftResult {
        state,
        delta_e,
        method,
        spacetime: *spacetime,
        separation: l,
        error: 0.0,
    };
    match (method, spacetime.kappa()) {
        (Method::Quadrature, _) => rcpi_quadrature(spacetime, l, omega0, mu, state, opts),
        (Method::ClosedForm, _) => rcpi_closed(spacetime, l, omega0, mu, state).map(analytic),
        (Method::AsymptoticFar, Some(k)) => {
            rcpi_asymptotic(l, k, omega0, mu, Regime::Far, state).map(analytic)
        }
        (Method::AsymptoticNear, Some(k)) => {
            rcpi_asymptotic(l, k, omega0, mu, Regime::Near, state).map(analytic)
        }
        // flat space has a single regime
        (Method::AsymptoticFar | Method::AsymptoticNear, None) => {
            rcpi_closed_minkowski(l, omega0, mu, state).map(analytic)
        }
    }
}

/// `F = -∂δE/∂L` of the closed form, differentiated analytically.
pub fn rcpi_force(
    spacetime: &Spacetime,
    l: f64,
    omega0: f64,
    mu: f64,
    state: DickeState,
) -> Result<f64> {
    let sign = check_pair(state)?;
    check_positive("L", l)?;
    check_positive("omega0", omega0)?;
    check_positive("mu", mu)?;
    let c = -sign * mu * mu / (4.0 * PI);
    // δE = c cos(φ) / D, dδE/dL = c (-sin φ φ' D - cos φ D') / D²
    let (phi, dphi, d, dd) = match spacetime.kappa() {
        Some(kappa) => {
            let z = l / (2.0 * kappa);
            let root = z.hypot(1.0);
            (
                2.0 * omega0 * kappa * z.asinh(),
                omega0 / root,
                l * root,
                root + z * z / root,
            )
        }
        None => (omega0 * l, omega0, l, 1.0),
    };
    let derivative = c * (-phi.sin() * dphi * d - phi.cos() * dd) / (d * d);
    Ok(-derivative)
}

/// One row of an interaction sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub l: f64,
    pub delta_e_s: f64,
    pub delta_e_a: f64,
    pub envelope: f64,
}

/// Evaluates `δE_S`, `δE_A` on every separation in `ls`. Rows come back in
/// input order regardless of how the work is scheduled.
pub fn sweep(
    spacetime: &Spacetime,
    ls: &[f64],
    omega0: f64,
    mu: f64,
    method: Method,
    opts: &QuadratureOptions,
) -> Result<Vec<SweepRow>> {
    let rows = crate::parallel::map(ls, |&l| {
        let s = rcpi(spacetime, l, omega0, mu, DickeState::S, method, opts)?;
        Ok(SweepRow {
            l,
            delta_e_s: s.delta_e,
            delta_e_a: -s.delta_e,
            envelope: rcpi_envelope(spacetime, l, mu),
        })
    });
    rows.into_iter().collect()
}

/// `n` points from `l_min` to `l_max`, spaced evenly in `ln L`.
pub fn log_grid(l_min: f64, l_max: f64, n: usize) -> Result<Vec<f64>> {
    check_positive("l_min", l_min)?;
    check_positive("l_max", l_max)?;
    if l_max <= l_min {
        return Err(Error::invalid("l_max", l_max, "must exceed l_min"));
    }
    if n < 2 {
        return Err(Error::invalid(
            "n_points",
            n as f64,
            "need at least two points",
        ));
    }
    let (a, b) = (l_min.ln(), l_max.ln());
    Ok((0..n)
        .map(|k| match k {
            0 => l_min,
            k if k == n - 1 => l_max,
            k => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AtomPair;
    use crate::liouvillian::{assemble_generator, CoefficientSet};
    use proptest::prelude::*;

    fn ds(kappa: f64) -> Spacetime {
        Spacetime::de_sitter(kappa, 0.0).unwrap()
    }

    #[test]
    fn dicke_states_are_orthonormal() {
        for a in DickeState::ALL {
            for b in DickeState::ALL {
                let ip = (a.vector().adjoint() * b.vector())[(0, 0)];
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - Complex64::from(expected)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn index_combinations_match_expectation_values() {
        let atoms = AtomPair::new(1.0, 0.7, 0.9).unwrap();
        let c =
            CoefficientSet::compute(&ds(1.3), &atoms, Some(40.0), &QuadratureOptions::default())
                .unwrap();
        let g = assemble_generator(&c, 1.0);
        for terms in [SelfTerms::Include, SelfTerms::Exclude] {
            let h = g.lamb_shift(terms);
            for s in DickeState::ALL {
                let psi = s.vector();
                let direct = (psi.adjoint() * h * psi)[(0, 0)];
                let combo = levelshift_general(&g, s, terms);
                assert!(direct.im.abs() < 1e-14);
                assert!(
                    (direct.re - combo).abs() < 1e-13 * (1.0 + combo.abs()),
                    "{s:?} {direct} {combo}"
                );
            }
        }
    }

    #[test]
    fn uncorrelated_states_do_not_feel_separation() {
        let o = QuadratureOptions::default();
        let mut previous: Option<(f64, f64)> = None;
        for &l in &[0.3, 0.8, 2.5] {
            let atoms = AtomPair::new(1.0, 0.5, l).unwrap();
            let c = CoefficientSet::compute(&ds(1.0), &atoms, Some(25.0), &o).unwrap();
            let g = assemble_generator(&c, 1.0);
            let pair = (
                levelshift_general(&g, DickeState::G, SelfTerms::Include),
                levelshift_general(&g, DickeState::E, SelfTerms::Include),
            );
            if let Some(p) = previous {
                assert_eq!(p, pair);
            }
            previous = Some(pair);
        }
    }

    #[test]
    fn generator_route_matches_closed_form() {
        let o = QuadratureOptions::default();
        for &(kappa, w0, l) in &[(1.0, 1.0, 0.5), (2.0, 0.7, 3.0), (0.5, 2.0, 1.7)] {
            let atoms = AtomPair::new(w0, 0.3, l).unwrap();
            let c = CoefficientSet::compute(&ds(kappa), &atoms, None, &o).unwrap();
            let g = assemble_generator(&c, w0);
            for s in [DickeState::S, DickeState::A] {
                let via_generator = levelshift_general(&g, s, SelfTerms::Exclude);
                let closed = rcpi_closed_desitter(l, kappa, w0, 0.3, s).unwrap();
                let scale = rcpi_envelope(&ds(kappa), l, 0.3);
                assert!(
                    (via_generator - closed).abs() < 1e-8 * scale,
                    "{via_generator} {closed}"
                );
            }
        }
    }

    #[test]
    fn zero_crossing() {
        let (kappa, w0, mu) = (1.5, 0.8, 1.0);
        let l_star = 2.0 * kappa * (PI / (4.0 * w0 * kappa)).sinh();
        let v = rcpi_closed_desitter(l_star, kappa, w0, mu, DickeState::S).unwrap();
        assert!(v.abs() < 1e-12 * rcpi_envelope(&ds(kappa), l_star, mu));
    }

    #[test]
    fn minkowski_sign_flip() {
        let w0 = 2.0;
        let v = rcpi_closed_minkowski(PI / w0, w0, 1.0, DickeState::S).unwrap();
        let expected = w0 / (4.0 * PI * PI);
        assert!((v - expected).abs() < 1e-15);
    }

    #[test]
    fn regimes() {
        let kappa = 1.0;
        let far = rcpi_asymptotic(100.0, kappa, 1.0, 1.0, Regime::Far, DickeState::S).unwrap();
        let closed = rcpi_closed_desitter(100.0, kappa, 1.0, 1.0, DickeState::S).unwrap();
        assert!((far / closed - 1.0).abs() < 0.01);
        let near = rcpi_asymptotic(0.01, kappa, 1.0, 1.0, Regime::Near, DickeState::S).unwrap();
        let closed = rcpi_closed_desitter(0.01, kappa, 1.0, 1.0, DickeState::S).unwrap();
        assert!((near / closed - 1.0).abs() < 1e-4);
        let near = rcpi_closed_desitter(1e-3, kappa, 1.0, 1.0, DickeState::S).unwrap();
        let flat = rcpi_closed_minkowski(1e-3, 1.0, 1.0, DickeState::S).unwrap();
        assert!((near / flat - 1.0).abs() < 1e-5);
    }

    #[test]
    fn flat_limit() {
        for &l in &[0.1, 1.0, 7.0] {
            let curved = rcpi_closed_desitter(l, 1e6, 1.3, 1.0, DickeState::S).unwrap();
            let flat = rcpi_closed_minkowski(l, 1.3, 1.0, DickeState::S).unwrap();
            assert!((curved - flat).abs() < 1e-8 * flat.abs());
        }
    }

    #[test]
    fn ground_and_upper_states_rejected() {
        assert!(rcpi_closed_minkowski(1.0, 1.0, 1.0, DickeState::G).is_err());
        assert!(rcpi_closed_desitter(1.0, 1.0, 1.0, 1.0, DickeState::E).is_err());
        assert!(rcpi_closed_desitter(-1.0, 1.0, 1.0, 1.0, DickeState::S).is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(2.0, 2000.0, 4).unwrap();
        assert_eq!(g[0], 2.0);
        assert_eq!(g[3], 2000.0);
        assert!((g[1] - 20.0).abs() < 1e-12);
        assert!(log_grid(1.0, 1.0, 3).is_err());
    }

    proptest! {
        #[test]
        fn antisymmetry_is_exact(l in 1e-3f64..1e3, kappa in 0.1f64..100.0, w0 in 0.1f64..10.0, mu in 0.01f64..2.0) {
            let s = rcpi_closed_desitter(l, kappa, w0, mu, DickeState::S).unwrap();
            let a = rcpi_closed_desitter(l, kappa, w0, mu, DickeState::A).unwrap();
            prop_assert_eq!(a, -s);
            let s = rcpi_closed_minkowski(l, w0, mu, DickeState::S).unwrap();
            let a = rcpi_closed_minkowski(l, w0, mu, DickeState::A).unwrap();
            prop_assert_eq!(a, -s);
            for regime in [Regime::Far, Regime::Near] {
                let s = rcpi_asymptotic(l, kappa, w0, mu, regime, DickeState::S).unwrap();
                let a = rcpi_asymptotic(l, kappa, w0, mu, regime, DickeState::A).unwrap();
                prop_assert_eq!(a, -s);
            }
        }

        #[test]
        fn envelope_strictly_decreasing(l in 1e-3f64..1e3, step in 1.0001f64..3.0, kappa in 0.1f64..100.0) {
            let s = ds(kappa);
            prop_assert!(rcpi_envelope(&s, l * step, 1.0) < rcpi_envelope(&s, l, 1.0));
            let near = 1.0 / (4.0 * PI * l);
            let far = kappa / (2.0 * PI * l * l);
            let e = rcpi_envelope(&s, l, 1.0);
            prop_assert!(e <= near * (1.0 + 1e-12) && e <= far * (1.0 + 1e-12));
        }

        #[test]
        fn force_matches_finite_difference(l in 0.05f64..50.0, kappa in 0.2f64..20.0, w0 in 0.1f64..3.0) {
            for s in [ds(kappa), Spacetime::thermal(0.3).unwrap()] {
                let f = rcpi_force(&s, l, w0, 1.0, DickeState::S).unwrap();
                let h = 1e-5 * l;
                let e = |x| rcpi_closed(&s, x, w0, 1.0, DickeState::S).unwrap();
                let fd = -(e(l + h) - e(l - h)) / (2.0 * h);
                let scale = rcpi_envelope(&s, l, 1.0) * (w0 + 1.0 / l);
                prop_assert!((f - fd).abs() < 1e-6 * scale, "{} {}", f, fd);
            }
        }
    }
}
