//! Kossakowski-Lindblad generator of the two-atom reduced dynamics.
//!
//! Each atom couples to the field through `σ₂`. Tracing the field out leaves
//! `∂ρ/∂τ = -i[H_eff, ρ] + 𝓛[ρ]` with
//!
//! ```text
//! H_eff = Σ_α ½ω₀ σ₃^(α) - (i/2) Σ_{αβ} Σ_{ij} H_ij^(αβ) σ_i^(α) σ_j^(β)
//! 𝓛[ρ]  = ½ Σ_{αβ} Σ_{ij} C_ij^(αβ) (2 σ_j^(β) ρ σ_i^(α) - σ_i^(α) σ_j^(β) ρ - ρ σ_i^(α) σ_j^(β))
//! ```
//!
//! and both coefficient matrices share the tensor structure
//! `X δ_ij - i Y ε_ij3 - X δ_3i δ_3j`. The dissipator side `(Ã, B̃)` comes from
//! the response functions at `±ω₀`; the Hamiltonian side `(A, B)` from their
//! Hilbert transforms. Same-atom entries use subscript 1, cross entries 2.
//!
//! Basis: `{|gg⟩, |ge⟩, |eg⟩, |ee⟩}`, first factor is atom 1, and
//! `σ₃|e⟩ = |e⟩`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Matrix4, SMatrix, SVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::correlators::PairKind;
use crate::error::{Error, Result};
use crate::geometry::{AtomPair, Spacetime};
use crate::ode::{Stepper, Tolerance};
use crate::quadrature::{hilbert_integral, HilbertKind, QuadratureOptions};
use crate::shifts::DickeState;
use crate::spectral;

type C = Complex64;
pub type Operator = Matrix4<C>;
type Superoperator = SMatrix<C, 16, 16>;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Dissipator-side coefficients `Ã₁, B̃₁, Ã₂, B̃₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DissipatorCoefficients {
    pub at1: f64,
    pub bt1: f64,
    pub at2: f64,
    pub bt2: f64,
}

/// `Ã = (μ²/4)[𝒢(ω₀) + 𝒢(-ω₀)]`, `B̃ = (μ²/4)[𝒢(ω₀) - 𝒢(-ω₀)]` for the
/// same-atom and cross-atom responses.
pub fn dissipator_coefficients(spacetime: &Spacetime, atoms: &AtomPair) -> DissipatorCoefficients {
    let w = atoms.omega0;
    let l = atoms.separation;
    let q = 0.25 * atoms.mu * atoms.mu;
    let g = |pair, lambda| spectral::response(spacetime, pair, lambda, l);
    let (s_up, s_down) = (g(PairKind::Same, w), g(PairKind::Same, -w));
    let (c_up, c_down) = (g(PairKind::Cross, w), g(PairKind::Cross, -w));
    DissipatorCoefficients {
        at1: q * (s_up + s_down),
        bt1: q * (s_up - s_down),
        at2: q * (c_up + c_down),
        bt2: q * (c_up - c_down),
    }
}

/// Hamiltonian-side coefficients. They are purely imaginary: the Hilbert
/// transform carries a `1/i`, which the `-i/2` in `H_eff` turns back into
/// real energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HamiltonianCoefficients {
    pub a1: C,
    pub b1: C,
    pub a2: C,
    pub b2: C,
    /// Frequency cutoff used for the divergent same-atom pair.
    pub cutoff: f64,
    /// Summed quadrature error estimates, in the units of the coefficients.
    pub error: f64,
}

fn hilbert_coefficient(
    spacetime: &Spacetime,
    pair: PairKind,
    kind: HilbertKind,
    atoms: &AtomPair,
    cutoff: Option<f64>,
    opts: &QuadratureOptions,
) -> Result<(C, f64)> {
    let r = hilbert_integral(
        spacetime,
        pair,
        kind,
        atoms.omega0,
        atoms.separation,
        cutoff,
        opts,
    )?;
    // μ² P∫ … / (8π² i)
    let scale = atoms.mu * atoms.mu / (8.0 * PI * PI);
    Ok((C::new(0.0, -scale * r.value), scale * r.error))
}

/// Cross-atom `A₂, B₂`. Both integrals converge without a cutoff; the
/// oscillatory tail is summed to infinity.
pub fn cross_hamiltonian_coefficients(
    spacetime: &Spacetime,
    atoms: &AtomPair,
    opts: &QuadratureOptions,
) -> Result<(C, C, f64)> {
    let (a2, ea) = hilbert_coefficient(
        spacetime,
        PairKind::Cross,
        HilbertKind::Symmetric,
        atoms,
        None,
        opts,
    )?;
    let (b2, eb) = hilbert_coefficient(
        spacetime,
        PairKind::Cross,
        HilbertKind::Antisymmetric,
        atoms,
        None,
        opts,
    )?;
    Ok((a2, b2, ea + eb))
}

/// All four Hamiltonian coefficients. `A₁, B₁` diverge with the upper
/// frequency limit and are evaluated Bethe-style up to `cutoff`; `A₂, B₂`
/// do not see the cutoff.
pub fn hamiltonian_coefficients(
    spacetime: &Spacetime,
    atoms: &AtomPair,
    cutoff: Option<f64>,
    opts: &QuadratureOptions,
) -> Result<HamiltonianCoefficients> {
    let omega_max = cutoff.ok_or(Error::MissingCutoff)?;
    let (a1, e1) = hilbert_coefficient(
        spacetime,
        PairKind::Same,
        HilbertKind::Symmetric,
        atoms,
        Some(omega_max),
        opts,
    )?;
    let (b1, e2) = hilbert_coefficient(
        spacetime,
        PairKind::Same,
        HilbertKind::Antisymmetric,
        atoms,
        Some(omega_max),
        opts,
    )?;
    let (a2, b2, e3) = cross_hamiltonian_coefficients(spacetime, atoms, opts)?;
    Ok(HamiltonianCoefficients {
        a1,
        b1,
        a2,
        b2,
        cutoff: omega_max,
        error: e1 + e2 + e3,
    })
}

/// The eight scalars that fix the generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientSet {
    pub a1: C,
    pub b1: C,
    pub a2: C,
    pub b2: C,
    pub at1: f64,
    pub bt1: f64,
    pub at2: f64,
    pub bt2: f64,
    /// `None` when the same-atom Hamiltonian pair was not evaluated (then
    /// `a1 = b1 = 0`).
    pub cutoff: Option<f64>,
}

impl CoefficientSet {
    pub fn compute(
        spacetime: &Spacetime,
        atoms: &AtomPair,
        cutoff: Option<f64>,
        opts: &QuadratureOptions,
    ) -> Result<Self> {
        let d = dissipator_coefficients(spacetime, atoms);
        let (a1, b1, a2, b2) = match cutoff {
            Some(_) => {
                let h = hamiltonian_coefficients(spacetime, atoms, cutoff, opts)?;
                (h.a1, h.b1, h.a2, h.b2)
            }
            None => {
                let (a2, b2, _) = cross_hamiltonian_coefficients(spacetime, atoms, opts)?;
                (ZERO, ZERO, a2, b2)
            }
        };
        Ok(Self {
            a1,
            b1,
            a2,
            b2,
            at1: d.at1,
            bt1: d.bt1,
            at2: d.at2,
            bt2: d.bt2,
            cutoff,
        })
    }

    /// Only the dissipator side, for dynamics without Lamb-type shifts.
    pub fn dissipative_only(spacetime: &Spacetime, atoms: &AtomPair) -> Self {
        let d = dissipator_coefficients(spacetime, atoms);
        Self {
            a1: ZERO,
            b1: ZERO,
            a2: ZERO,
            b2: ZERO,
            at1: d.at1,
            bt1: d.bt1,
            at2: d.at2,
            bt2: d.bt2,
            cutoff: None,
        }
    }
}

/// `X δ_ij - i Y ε_ij3 - X δ_3i δ_3j`.
fn structured(x: C, y: C) -> Matrix3<C> {
    Matrix3::new(x, -I * y, ZERO, I * y, x, ZERO, ZERO, ZERO, ZERO)
}

/// Whether same-atom (`α = β`) Hamiltonian terms enter an operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfTerms {
    Include,
    Exclude,
}

/// Assembled `H_ij^(αβ)` and `C_ij^(αβ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrices {
    pub h_same: Matrix3<C>,
    pub h_cross: Matrix3<C>,
    pub c_same: Matrix3<C>,
    pub c_cross: Matrix3<C>,
    pub omega0: f64,
}

pub fn assemble_generator(coeffs: &CoefficientSet, omega0: f64) -> GeneratorMatrices {
    GeneratorMatrices {
        h_same: structured(coeffs.a1, coeffs.b1),
        h_cross: structured(coeffs.a2, coeffs.b2),
        c_same: structured(C::from(coeffs.at1), C::from(coeffs.bt1)),
        c_cross: structured(C::from(coeffs.at2), C::from(coeffs.bt2)),
        omega0,
    }
}

fn pauli(i: usize) -> Matrix2<C> {
    // ordering (g, e): σ₃ = diag(-1, 1), σ₊ = |e⟩⟨g| sits at (1, 0)
    match i {
        0 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        1 => Matrix2::new(ZERO, I, -I, ZERO),
        2 => Matrix2::new(-ONE, ZERO, ZERO, ONE),
        _ => unreachable!("Pauli index out of range"),
    }
}

/// `σ_i` acting on `atom` (0 or 1) of the pair, `i ∈ {0, 1, 2}` for σ₁..σ₃.
pub fn sigma(atom: usize, i: usize) -> Operator {
    let s = pauli(i);
    let id = Matrix2::<C>::identity();
    let (a, b) = if atom == 0 { (s, id) } else { (id, s) };
    a.kronecker(&b).fixed_view::<4, 4>(0, 0).into_owned()
}

impl GeneratorMatrices {
    fn h_block(&self, alpha: usize, beta: usize) -> &Matrix3<C> {
        if alpha == beta {
            &self.h_same
        } else {
            &self.h_cross
        }
    }

    fn c_block(&self, alpha: usize, beta: usize) -> &Matrix3<C> {
        if alpha == beta {
            &self.c_same
        } else {
            &self.c_cross
        }
    }

    /// `H_LS = -(i/2) Σ H_ij^(αβ) σ_i^(α) σ_j^(β)`.
    pub fn lamb_shift(&self, self_terms: SelfTerms) -> Operator {
        let mut h = Operator::zeros();
        for alpha in 0..2 {
            for beta in 0..2 {
                if alpha == beta && self_terms == SelfTerms::Exclude {
                    continue;
                }
                let block = self.h_block(alpha, beta);
                for i in 0..3 {
                    for j in 0..3 {
                        if block[(i, j)] != ZERO {
                            h += sigma(alpha, i) * sigma(beta, j) * block[(i, j)];
                        }
                    }
                }
            }
        }
        h * C::new(0.0, -0.5)
    }

    pub fn bare_hamiltonian(&self) -> Operator {
        (sigma(0, 2) + sigma(1, 2)) * C::from(0.5 * self.omega0)
    }

    pub fn effective_hamiltonian(&self, self_terms: SelfTerms) -> Operator {
        self.bare_hamiltonian() + self.lamb_shift(self_terms)
    }

    pub fn dissipator(&self, rho: &Operator) -> Operator {
        let mut out = Operator::zeros();
        for alpha in 0..2 {
            for beta in 0..2 {
                let block = self.c_block(alpha, beta);
                for i in 0..3 {
                    for j in 0..3 {
                        let c = block[(i, j)];
                        if c == ZERO {
                            continue;
                        }
                        let si = sigma(alpha, i);
                        let sj = sigma(beta, j);
                        let sisj = si * sj;
                        out += (sj * rho * si * C::from(2.0) - sisj * rho - rho * sisj) * (c * 0.5);
                    }
                }
            }
        }
        out
    }

    /// `∂ρ/∂τ` for the given effective Hamiltonian choice.
    pub fn apply(&self, rho: &Operator, self_terms: SelfTerms) -> Operator {
        let h = self.effective_hamiltonian(self_terms);
        (h * rho - rho * h) * (-I) + self.dissipator(rho)
    }

    /// Generator as a real 16×16 matrix on the hermitian coordinates of
    /// [`to_real`]. Working in these coordinates keeps every integrated state
    /// exactly hermitian.
    fn superoperator(&self, self_terms: SelfTerms) -> Superoperator {
        let mut s = Superoperator::zeros();
        for col in 0..16 {
            let mut x = SVector::<C, 16>::zeros();
            x[col] = ONE;
            let image = to_real(&self.apply(&from_real(&x), self_terms));
            s.set_column(col, &image);
        }
        s
    }

    /// Rate at which population leaves `state` when the system sits in it.
    pub fn population_loss_rate(&self, state: DickeState, self_terms: SelfTerms) -> f64 {
        let psi = state.vector();
        let rho = psi * psi.adjoint();
        -(psi.adjoint() * self.apply(&rho, self_terms) * psi)[(0, 0)].re
    }
}

const UPPER: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Hermitian part of `m` as 16 real numbers (stored with zero imaginary
/// part): the diagonal, then real and imaginary parts of the upper triangle.
fn to_real(m: &Operator) -> SVector<C, 16> {
    let mut x = SVector::<C, 16>::zeros();
    for i in 0..4 {
        x[i] = C::from(m[(i, i)].re);
    }
    for (p, &(i, j)) in UPPER.iter().enumerate() {
        let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        x[4 + p] = C::from(z.re);
        x[10 + p] = C::from(z.im);
    }
    x
}

fn from_real(x: &SVector<C, 16>) -> Operator {
    let mut m = Operator::zeros();
    for i in 0..4 {
        m[(i, i)] = C::from(x[i].re);
    }
    for (p, &(i, j)) in UPPER.iter().enumerate() {
        let z = C::new(x[4 + p].re, x[10 + p].re);
        m[(i, j)] = z;
        m[(j, i)] = z.conj();
    }
    m
}

/// Density matrix of the two atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    rho: Operator,
}

impl TwoQubitState {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(rho: Operator) -> Result<Self> {
        let s = Self { rho };
        if s.hermiticity_defect() > 1e-12 {
            return Err(Error::invalid(
                "rho",
                s.hermiticity_defect(),
                "density matrix must be hermitian",
            ));
        }
        if (s.trace() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "rho",
                s.trace(),
                "density matrix must have unit trace",
            ));
        }
        if s.min_eigenvalue() < -1e-10 {
            return Err(Error::invalid(
                "rho",
                s.min_eigenvalue(),
                "density matrix must be positive",
            ));
        }
        Ok(s)
    }

    pub fn pure(state: DickeState) -> Self {
        let psi = state.vector();
        Self {
            rho: psi * psi.adjoint(),
        }
    }

    pub fn matrix(&self) -> &Operator {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self.rho - self.rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        // eigenvalues of the hermitian part; the anti-hermitian remainder is
        // reported separately by hermiticity_defect
        let h = (self.rho + self.rho.adjoint()) * C::from(0.5);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn population(&self, state: DickeState) -> f64 {
        let psi = state.vector();
        (psi.adjoint() * self.rho * psi)[(0, 0)].re
    }

    /// Reduced state of one atom in the `(g, e)` basis.
    pub fn reduced(&self, atom: usize) -> Matrix2<C> {
        let mut out = Matrix2::zeros();
        for a in 0..2 {
            for b in 0..2 {
                for k in 0..2 {
                    let (i, j) = if atom == 0 {
                        (2 * a + k, 2 * b + k)
                    } else {
                        (2 * k + a, 2 * k + b)
                    };
                    out[(a, b)] += self.rho[(i, j)];
                }
            }
        }
        out
    }
}

/// Integrator settings for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Re-include the cutoff-dependent same-atom shifts in `H_eff`.
    pub self_terms: SelfTerms,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            self_terms: SelfTerms::Exclude,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub tau: f64,
    pub state: TwoQubitState,
}

impl TrajectoryPoint {
    /// `[pG, pE, pS, pA, trace, min_eig]`.
    pub fn diagnostics(&self) -> [f64; 6] {
        let s = &self.state;
        [
            s.population(DickeState::G),
            s.population(DickeState::E),
            s.population(DickeState::S),
            s.population(DickeState::A),
            s.trace(),
            s.min_eigenvalue(),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    /// Set when some output state had an eigenvalue below `-1e-8`.
    pub positivity_violated: bool,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Integrates the master equation from `rho0` and records the state at every
/// time in `tau_grid` (which must be strictly increasing; the first entry is
/// the initial time). The state is integrated in hermitian coordinates, so
/// only its hermitian part is used. No renormalisation is applied and trace
/// drift stays visible.
pub fn evolve(
    rho0: &TwoQubitState,
    generator: &GeneratorMatrices,
    tau_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if tau_grid.is_empty() {
        return Err(Error::invalid(
            "tau_grid",
            0.0,
            "time grid must not be empty",
        ));
    }
    if let Some(w) = tau_grid.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::invalid(
            "tau_grid",
            w[1],
            "time grid must be strictly increasing",
        ));
    }
    let sup = generator.superoperator(opts.self_terms);
    let rhs = |_t: f64, y: &SVector<C, 16>| sup * y;
    let mut y = to_real(&rho0.rho);

    let scale = generator
        .omega0
        .abs()
        .max(sup.iter().map(|z| z.norm()).fold(0.0, f64::max));
    let mut stepper = Stepper::<16>::new(
        Tolerance {
            rtol: opts.rtol,
            atol: opts.atol,
        },
        0.01 / scale,
    );
    let mut points = Vec::with_capacity(tau_grid.len());
    let mut positivity_violated = false;
    for (k, &tau) in tau_grid.iter().enumerate() {
        if k > 0 {
            stepper.advance(&rhs, tau_grid[k - 1], tau, &mut y)?;
        }
        let state = TwoQubitState { rho: from_real(&y) };
        positivity_violated |= state.min_eigenvalue() < -1e-8;
        points.push(TrajectoryPoint { tau, state });
    }
    Ok(Trajectory {
        points,
        positivity_violated,
        accepted_steps: stepper.stats.accepted,
        rejected_steps: stepper.stats.rejected,
    })
}
