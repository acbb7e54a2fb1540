//! Principal-value and oscillatory-tail quadrature.
//!
//! The interaction energy is a principal-value integral with a simple pole at
//! the transition frequency and an integrand that only decays like an
//! oscillation over a `1/ω` envelope, so it converges conditionally. The
//! engine splits it into three pieces:
//!
//! * plain adaptive Gauss-Kronrod away from the pole,
//! * a symmetric window `[ω₀ - δ, ω₀ + δ]` folded onto `u ∈ (0, δ]` where the
//!   pole cancels between `g(ω₀ + u)` and `g(ω₀ - u)`,
//! * a tail summed lobe by lobe between consecutive zeros of the oscillation
//!   and extrapolated with iterated Aitken Δ².

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::correlators::PairKind;
use crate::error::{Error, Result};
use crate::geometry::Spacetime;
use crate::spectral::{self, phase_length};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Integral value with an error estimate and the evaluation count behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Tolerances and budgets shared by every integrator in this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of subintervals per adaptive integration.
    pub max_intervals: usize,
    /// Maximum number of tail lobes.
    pub max_lobes: usize,
    /// Lobes summed before extrapolated values are trusted.
    pub min_lobes: usize,
    /// Maximum number of iterated Aitken passes.
    pub max_depth: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-11,
            max_intervals: 2000,
            max_lobes: 400,
            min_lobes: 8,
            max_depth: 12,
        }
    }
}

/// One 15-point Kronrod panel: (kronrod value, error estimate, |f| integral).
fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err, resabs)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (value, error, resabs) = kronrod15(&f, a, b);
    let mut evaluations = 15;
    let mut total = value;
    let mut total_err = error;
    let mut total_abs = resabs;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });

    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        // below this the error is roundoff, not truncation
        let floor = 50.0 * f64::EPSILON * total_abs;
        if total_err <= tol.max(floor) {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                reason: format!(
                    "subinterval budget of {} exhausted on [{a}, {b}]",
                    opts.max_intervals
                ),
                evaluations,
                last_error: total_err,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature {
                reason: format!("interval around {mid} cannot be subdivided further"),
                evaluations,
                last_error: total_err,
            });
        }
        let (v1, e1, r1) = kronrod15(&f, worst.a, mid);
        let (v2, e2, r2) = kronrod15(&f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        total_abs += r1 + r2;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    // re-sum in a fixed order so the result does not depend on heap history
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// Setup for a Cauchy principal-value integral with one simple pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PVIntegralSpec {
    pub pole: f64,
    /// Upper integration limit used for divergent pieces; `None` when the
    /// caller supplies a finite support on its own.
    pub cutoff: Option<f64>,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Preferred window radius; clipped so the window stays inside the support.
    pub window: Option<f64>,
}

impl PVIntegralSpec {
    pub fn new(pole: f64) -> Self {
        let d = QuadratureOptions::default();
        Self {
            pole,
            cutoff: None,
            abs_tol: d.abs_tol,
            rel_tol: d.rel_tol,
            window: None,
        }
    }

    fn options(&self, base: &QuadratureOptions) -> QuadratureOptions {
        QuadratureOptions {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            ..*base
        }
    }
}

/// Principal value result with the window radius finally used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrincipalValue {
    pub estimate: Estimate,
    pub window: f64,
}

fn pv_with_window<F: Fn(f64) -> f64>(
    f: &F,
    pole: f64,
    lo: f64,
    hi: f64,
    delta: f64,
    opts: &QuadratureOptions,
) -> Result<Estimate> {
    let left = integrate(f, lo, pole - delta, opts)?;
    let folded = integrate(|u: f64| f(pole + u) + f(pole - u), 0.0, delta, opts)?;
    let right = integrate(f, pole + delta, hi, opts)?;
    Ok(Estimate {
        value: left.value + folded.value + right.value,
        error: left.error + folded.error + right.error,
        evaluations: left.evaluations + folded.evaluations + right.evaluations,
    })
}

/// Cauchy principal value of `∫ f` over `support`, where `f` has a simple
/// pole at `spec.pole` strictly inside the support.
///
/// The window radius starts at `min(spec.window, half the distance to either
/// end)` and is halved until two successive radii agree within tolerance.
pub fn principal_value<F: Fn(f64) -> f64>(
    f: F,
    spec: &PVIntegralSpec,
    support: (f64, f64),
) -> Result<PrincipalValue> {
    principal_value_with(f, spec, support, &QuadratureOptions::default())
}

pub fn principal_value_with<F: Fn(f64) -> f64>(
    f: F,
    spec: &PVIntegralSpec,
    support: (f64, f64),
    base: &QuadratureOptions,
) -> Result<PrincipalValue> {
    let (lo, hi) = support;
    let pole = spec.pole;
    if !(lo < hi) {
        return Err(Error::invalid(
            "support",
            hi - lo,
            "support must be a non-empty interval",
        ));
    }
    if !(pole > lo && pole < hi) {
        return Err(Error::invalid(
            "pole",
            pole,
            "pole must lie strictly inside the support",
        ));
    }
    if !(spec.abs_tol > 0.0 && spec.rel_tol > 0.0) {
        return Err(Error::invalid(
            "tolerance",
            spec.abs_tol.min(spec.rel_tol),
            "tolerances must be positive",
        ));
    }
    let opts = spec.options(base);
    let mut delta = 0.5 * (pole - lo).min(hi - pole);
    if let Some(w) = spec.window {
        delta = delta.min(w);
    }

    let mut current = pv_with_window(&f, pole, lo, hi, delta, &opts)?;
    let mut evaluations = current.evaluations;
    for _ in 0..8 {
        let next = pv_with_window(&f, pole, lo, hi, 0.5 * delta, &opts)?;
        evaluations += next.evaluations;
        let diff = (next.value - current.value).abs();
        let tol = opts
            .abs_tol
            .max(opts.rel_tol * next.value.abs())
            .max(current.error + next.error);
        delta *= 0.5;
        if diff <= tol {
            return Ok(PrincipalValue {
                estimate: Estimate {
                    value: next.value,
                    error: next.error.max(diff),
                    evaluations,
                },
                window: delta,
            });
        }
        current = next;
    }
    Err(Error::Quadrature {
        reason: format!("principal value at {pole} did not stabilise under window halving"),
        evaluations,
        last_error: current.error,
    })
}

/// Extrapolated tail integral together with the bookkeeping behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub value: f64,
    pub error: f64,
    pub lobes: usize,
    pub evaluations: usize,
}

/// Repeated Aitken Δ² on a sequence of partial sums. Returns the deepest
/// extrapolated value and an error estimate built from its neighbours.
fn iterated_aitken(sums: &[f64], max_depth: usize) -> (f64, f64) {
    let mut col = sums.to_vec();
    let mut prev_last = *col.last().expect("non-empty sequence");
    let mut depth = 0;
    while col.len() >= 4 && depth < max_depth {
        let next: Vec<f64> = col
            .windows(3)
            .map(|w| {
                let d1 = w[1] - w[0];
                let d2 = w[2] - w[1];
                let den = d2 - d1;
                if den == 0.0 || !den.is_finite() {
                    w[2]
                } else {
                    w[2] - d2 * d2 / den
                }
            })
            .collect();
        prev_last = *col.last().expect("non-empty column");
        col = next;
        depth += 1;
    }
    let n = col.len();
    let value = col[n - 1];
    let mut err = (value - prev_last).abs();
    if n >= 2 {
        err = err.max((value - col[n - 2]).abs());
    }
    (value, err)
}

/// Improper integral `∫_{first_zero}^∞ f` for an integrand whose sign
/// alternates between consecutive zeros spaced by half of `period`.
///
/// Lobes are integrated one at a time; after each lobe the partial sums are
/// extrapolated and the value with the smallest error estimate so far is
/// kept, so a larger lobe budget never yields a larger reported error.
pub fn oscillatory_tail<F: Fn(f64) -> f64>(
    f: F,
    first_zero: f64,
    period: f64,
    opts: &QuadratureOptions,
) -> Result<TailEstimate> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::invalid(
            "period",
            period,
            "oscillation period must be positive",
        ));
    }
    let width = 0.5 * period;
    let lobe_opts = QuadratureOptions {
        // lobe errors feed the extrapolation, so keep them well below its target
        abs_tol: 0.01 * opts.abs_tol,
        rel_tol: (0.01 * opts.rel_tol).max(4.0 * f64::EPSILON),
        ..*opts
    };
    let mut sums = Vec::with_capacity(opts.max_lobes);
    let mut lobes = Vec::with_capacity(opts.max_lobes);
    let mut lobe_error = 0.0;
    let mut evaluations = 0;
    let mut acc = 0.0;
    let mut best: Option<(f64, f64)> = None;

    for k in 0..opts.max_lobes {
        let a = first_zero + k as f64 * width;
        let lobe = integrate(&f, a, a + width, &lobe_opts)?;
        evaluations += lobe.evaluations;
        lobe_error += lobe.error;
        acc += lobe.value;
        sums.push(acc);
        lobes.push(lobe.value.abs());

        if sums.len() < opts.min_lobes.max(4) {
            continue;
        }
        // extrapolation also "sums" divergent alternating series, so only
        // trust it once the lobes are visibly shrinking
        if !lobes_decreasing(&lobes) {
            continue;
        }
        let (value, err) = iterated_aitken(&sums, opts.max_depth);
        let err = err + lobe_error;
        if !value.is_finite() {
            continue;
        }
        if best.is_none_or(|(_, e)| err < e) {
            best = Some((value, err));
        }
        let (bv, be) = best.expect("best was just set");
        if be <= opts.abs_tol.max(opts.rel_tol * bv.abs()) {
            return Ok(TailEstimate {
                value: bv,
                error: be,
                lobes: sums.len(),
                evaluations,
            });
        }
    }

    match best {
        Some((value, error)) if lobes_decreasing(&lobes) => Ok(TailEstimate {
            value,
            error,
            lobes: lobes.len(),
            evaluations,
        }),
        _ => Err(Error::TailDivergence {
            lobes: lobes.len(),
            last_error: best.map_or(f64::INFINITY, |(_, e)| e),
        }),
    }
}

fn lobes_decreasing(lobes: &[f64]) -> bool {
    let n = lobes.len();
    n >= 4 && lobes[n - 1] < lobes[n / 2] && lobes[n / 2] < lobes[0]
}

/// Which frequency kernel multiplies the response in a Hilbert-type integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HilbertKind {
    /// `2ω/(ω² - ω₀²) · 2π[𝒢(ω) - 𝒢(-ω)]`, the `A`-type combination.
    Symmetric,
    /// `2ω₀/(ω² - ω₀²) · 2π[𝒢(ω) + 𝒢(-ω)]`, the `B`-type combination.
    Antisymmetric,
}

/// Result of a Hilbert-type frequency integral over `(0, ∞)` or `(0, Ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HilbertIntegral {
    pub value: f64,
    pub error: f64,
    pub lobes: usize,
    pub evaluations: usize,
    pub window: f64,
    pub cutoff: Option<f64>,
}

/// Frequency integral behind the Hamiltonian coefficients:
/// `P∫_{-∞}^{∞} 𝒢(ω)[1/(ω-ω₀) ± 1/(ω+ω₀)] dω` folded onto the positive axis.
///
/// With a cutoff the integral stops at `Ω`; without one the oscillatory tail
/// is summed to infinity, which only converges for the cross-atom response.
pub fn hilbert_integral(
    spacetime: &Spacetime,
    pair: PairKind,
    kind: HilbertKind,
    omega0: f64,
    separation: f64,
    cutoff: Option<f64>,
    opts: &QuadratureOptions,
) -> Result<HilbertIntegral> {
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(Error::invalid(
            "omega0",
            omega0,
            "transition frequency must be positive",
        ));
    }
    if pair == PairKind::Cross && !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::invalid(
            "L",
            separation,
            "separation must be positive",
        ));
    }
    let s = *spacetime;
    let integrand = move |w: f64| {
        let plus = spectral::response(&s, pair, w, separation);
        let minus = spectral::response(&s, pair, -w, separation);
        let den = (w - omega0) * (w + omega0);
        match kind {
            HilbertKind::Symmetric => 2.0 * w / den * (2.0 * PI) * (plus - minus),
            HilbertKind::Antisymmetric => 2.0 * omega0 / den * (2.0 * PI) * (plus + minus),
        }
    };

    let mut spec = PVIntegralSpec {
        pole: omega0,
        cutoff,
        abs_tol: opts.abs_tol,
        rel_tol: opts.rel_tol,
        window: None,
    };

    if let Some(omega_max) = cutoff {
        if !(omega_max > omega0) {
            return Err(Error::invalid(
                "cutoff",
                omega_max,
                "cutoff must exceed the transition frequency",
            ));
        }
        let pv = principal_value_with(integrand, &spec, (0.0, omega_max), opts)?;
        return Ok(HilbertIntegral {
            value: pv.estimate.value,
            error: pv.estimate.error,
            lobes: 0,
            evaluations: pv.estimate.evaluations,
            window: pv.window,
            cutoff,
        });
    }

    if pair == PairKind::Same {
        return Err(Error::MissingCutoff);
    }
    let phase = match spacetime {
        Spacetime::DeSitter(p) => phase_length(0.5 * separation, p.kappa()),
        Spacetime::ThermalMinkowski(_) => separation,
    };
    let half_period = PI / phase;
    spec.window = Some(half_period);
    let delta = (0.5 * omega0).min(half_period);
    // first zero of the oscillation past the pole window
    let first_zero = (((omega0 + delta) / half_period).floor() + 1.0) * half_period;

    let pv = principal_value_with(integrand, &spec, (0.0, first_zero), opts)?;
    let tail_opts = QuadratureOptions {
        abs_tol: opts.abs_tol.max(opts.rel_tol * pv.estimate.value.abs()),
        ..*opts
    };
    let tail = oscillatory_tail(integrand, first_zero, 2.0 * half_period, &tail_opts)?;
    Ok(HilbertIntegral {
        value: pv.estimate.value + tail.value,
        error: pv.estimate.error + tail.error,
        lobes: tail.lobes,
        evaluations: pv.estimate.evaluations + tail.evaluations,
        window: pv.window,
        cutoff: None,
    })
}

/// `∫_0^∞ (ω/(ω-ω₀) + ω/(ω+ω₀)) F(ω) dω` with `F` the cross-atom geometric
/// factor of the background; equals `-(4π²/μ²) δE_S`.
pub fn rcpi_integral(
    spacetime: &Spacetime,
    omega0: f64,
    separation: f64,
) -> Result<HilbertIntegral> {
    rcpi_integral_with(spacetime, omega0, separation, &QuadratureOptions::default())
}

pub fn rcpi_integral_with(
    spacetime: &Spacetime,
    omega0: f64,
    separation: f64,
    opts: &QuadratureOptions,
) -> Result<HilbertIntegral> {
    hilbert_integral(
        spacetime,
        PairKind::Cross,
        HilbertKind::Symmetric,
        omega0,
        separation,
        None,
        opts,
    )
}
