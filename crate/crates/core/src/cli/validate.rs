//! Built-in self-checks behind `rcpi validate`.

use serde::Serialize;

use crate::correlators::PairKind;
use crate::discriminator::{discriminate, SweepRecord, Thresholds, Verdict};
use crate::geometry::{AtomPair, DeSitterPatch, Spacetime};
use crate::liouvillian::{
    assemble_generator, evolve, CoefficientSet, EvolveOptions, SelfTerms, TwoQubitState,
};
use crate::quadrature::QuadratureOptions;
use crate::shifts::{
    log_grid, rcpi, rcpi_asymptotic, rcpi_closed_desitter, rcpi_closed_minkowski, rcpi_quadrature,
    DickeState, Method, Regime,
};
use crate::spectral::{kms_factor, response};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Largest observed deviation, in the check's own measure.
    pub max_error: f64,
    pub tolerance: f64,
    /// Worst parameter point with both compared values, or the error text.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub level: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Tracks the worst deviation seen by a check.
struct Worst {
    error: f64,
    detail: String,
}

impl Worst {
    fn new() -> Self {
        Self {
            error: 0.0,
            detail: String::new(),
        }
    }

    fn see(&mut self, error: f64, detail: impl FnOnce() -> String) {
        // NaN must count as a failure
        if !(error <= self.error) {
            self.error = error;
            self.detail = detail();
        }
    }

    fn finish(self, name: &'static str, tolerance: f64) -> Check {
        Check {
            name,
            passed: self.error <= tolerance,
            max_error: self.error,
            tolerance,
            detail: self.detail,
        }
    }
}

fn failed(name: &'static str, tolerance: f64, e: impl std::fmt::Display) -> Check {
    Check {
        name,
        passed: false,
        max_error: f64::INFINITY,
        tolerance,
        detail: e.to_string(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn kms(spacetimes: &[Spacetime], name: &'static str) -> Check {
    let omega0 = 1.0;
    let mut w = Worst::new();
    for s in spacetimes {
        for pair in [PairKind::Same, PairKind::Cross] {
            for k in 1..=40 {
                let lambda = 10.0 * omega0 * k as f64 / 40.0;
                for lambda in [lambda, -lambda] {
                    let ratio = response(s, pair, lambda, 0.7) / response(s, pair, -lambda, 0.7);
                    let expected = kms_factor(s, lambda);
                    w.see(rel(ratio, expected), || {
                        format!("{s:?} {pair:?} lambda={lambda}: ratio {ratio:e} vs {expected:e}")
                    });
                }
            }
        }
    }
    w.finish(name, 1e-12)
}

fn oracle_grid() -> Check {
    let opts = QuadratureOptions::default();
    let mut w = Worst::new();
    for &lk in &[0.1, 0.3, 1.0, 3.0, 10.0] {
        for &wk in &[0.5, 1.0, 2.0] {
            let s = Spacetime::de_sitter(1.0, 0.0).expect("unit patch");
            let closed = rcpi_closed_desitter(lk, 1.0, wk, 1.0, DickeState::S);
            let quad = rcpi_quadrature(&s, lk, wk, 1.0, DickeState::S, &opts);
            match (closed, quad) {
                (Ok(c), Ok(q)) => w.see(rel(q.delta_e, c), || {
                    format!(
                        "L/kappa={lk} omega0*kappa={wk}: quadrature {:e} vs closed {c:e}",
                        q.delta_e
                    )
                }),
                (Err(e), _) | (_, Err(e)) => return failed("oracle_grid", 1e-6, e),
            }
        }
    }
    w.finish("oracle_grid", 1e-6)
}

fn regime_ratios() -> Vec<Check> {
    let far = |l| -> crate::Result<(f64, f64)> {
        Ok((
            rcpi_closed_desitter(l, 1.0, 1.0, 1.0, DickeState::S)?,
            rcpi_asymptotic(l, 1.0, 1.0, 1.0, Regime::Far, DickeState::S)?,
        ))
    };
    let near = |l| -> crate::Result<(f64, f64)> {
        Ok((
            rcpi_closed_desitter(l, 1.0, 1.0, 1.0, DickeState::S)?,
            rcpi_asymptotic(l, 1.0, 1.0, 1.0, Regime::Near, DickeState::S)?,
        ))
    };
    let mut out = Vec::new();
    for (name, f, l, tol) in [
        (
            "far_regime_ratio",
            &far as &dyn Fn(f64) -> crate::Result<(f64, f64)>,
            100.0,
            1e-2,
        ),
        ("near_regime_ratio", &near, 0.01, 1e-4),
    ] {
        out.push(match f(l) {
            Ok((c, a)) => {
                let mut w = Worst::new();
                w.see((c / a - 1.0).abs(), || {
                    format!("L/kappa={l}: closed {c:e} vs asymptotic {a:e}")
                });
                w.finish(name, tol)
            }
            Err(e) => failed(name, tol, e),
        });
    }
    out
}

fn flat_limit() -> Check {
    let mut w = Worst::new();
    for &l in &[0.1, 1.0, 10.0] {
        for &w0 in &[0.5, 1.0, 2.0] {
            let curved = rcpi_closed_desitter(l, 1e6, w0, 1.0, DickeState::S);
            let flat = rcpi_closed_minkowski(l, w0, 1.0, DickeState::S);
            if let (Ok(c), Ok(f)) = (curved, flat) {
                w.see(rel(c, f), || {
                    format!("L={l} omega0={w0}: de Sitter {c:e} vs flat {f:e}")
                });
            }
        }
    }
    w.finish("flat_limit", 1e-8)
}

fn temperature_decomposition() -> Check {
    let mut w = Worst::new();
    for i in 0..20 {
        let alpha = 0.1 * 10f64.powf(3.0 * i as f64 / 19.0);
        for j in 0..20 {
            let r = alpha * 0.99 * j as f64 / 19.0;
            let Ok(p) = DeSitterPatch::new(alpha, r) else {
                continue;
            };
            let t = p.local_temperature();
            let lhs = t.total * t.total;
            let rhs = t.gibbons_hawking.powi(2) + t.unruh.powi(2);
            w.see(rel(rhs, lhs), || {
                format!("alpha={alpha} r={r}: T^2 {lhs:e} vs sum {rhs:e}")
            });
        }
    }
    w.finish("temperature_decomposition", 1e-12)
}

fn antisymmetry() -> Check {
    let opts = QuadratureOptions::default();
    let spacetimes = [
        Spacetime::de_sitter(1.0, 0.0).expect("unit patch"),
        Spacetime::de_sitter(2.0, 1.0).expect("valid patch"),
        Spacetime::thermal(0.0).expect("vacuum"),
        Spacetime::thermal(1.0).expect("bath"),
    ];
    let mut w = Worst::new();
    for s in &spacetimes {
        for method in [
            Method::ClosedForm,
            Method::Quadrature,
            Method::AsymptoticFar,
            Method::AsymptoticNear,
        ] {
            for &l in &[0.05, 0.8, 20.0] {
                let pair = rcpi(s, l, 1.0, 0.3, DickeState::S, method, &opts).and_then(|a| {
                    Ok((
                        a.delta_e,
                        rcpi(s, l, 1.0, 0.3, DickeState::A, method, &opts)?.delta_e,
                    ))
                });
                match pair {
                    Ok((es, ea)) => {
                        let defect = if ea == -es { 0.0 } else { 1.0 };
                        w.see(defect, || {
                            format!("{s:?} {method:?} L={l}: S {es:e} vs A {ea:e}")
                        });
                    }
                    Err(e) => return failed("antisymmetry", 0.0, e),
                }
            }
        }
    }
    w.finish("antisymmetry", 0.0)
}

fn lindblad_contracts(tau_max: f64) -> Vec<Check> {
    let s = Spacetime::de_sitter(1.0, 0.0).expect("unit patch");
    let atoms = AtomPair::new(1.0, 0.5, 0.5).expect("valid atoms");
    let coeffs =
        match CoefficientSet::compute(&s, &atoms, Some(20.0), &QuadratureOptions::default()) {
            Ok(c) => c,
            Err(e) => {
                return vec![
                    failed("lindblad_trace", 1e-9, &e),
                    failed("lindblad_hermiticity", 1e-10, &e),
                    failed("lindblad_positivity", 1e-8, &e),
                ]
            }
        };
    let gen = assemble_generator(&coeffs, 1.0);
    let opts = EvolveOptions {
        self_terms: SelfTerms::Include,
        ..EvolveOptions::default()
    };
    let grid: Vec<f64> = (0..=50).map(|k| tau_max * k as f64 / 50.0).collect();
    let (mut tr, mut herm, mut pos) = (Worst::new(), Worst::new(), Worst::new());
    for state in DickeState::ALL {
        let traj = match evolve(&TwoQubitState::pure(state), &gen, &grid, &opts) {
            Ok(t) => t,
            Err(e) => {
                let msg = format!("{state:?}: {e}");
                return vec![
                    failed("lindblad_trace", 1e-9, &msg),
                    failed("lindblad_hermiticity", 1e-10, &msg),
                    failed("lindblad_positivity", 1e-8, &msg),
                ];
            }
        };
        for p in &traj.points {
            let t = p.state.trace();
            tr.see((t - 1.0).abs(), || {
                format!("{state:?} tau={}: trace {t}", p.tau)
            });
            let h = p.state.hermiticity_defect();
            herm.see(h, || format!("{state:?} tau={}: defect {h:e}", p.tau));
            let m = p.state.min_eigenvalue();
            pos.see(-m, || {
                format!("{state:?} tau={}: min eigenvalue {m:e}", p.tau)
            });
        }
    }
    vec![
        tr.finish("lindblad_trace", 1e-9),
        herm.finish("lindblad_hermiticity", 1e-10),
        pos.finish("lindblad_positivity", 1e-8),
    ]
}

fn thermal_independence() -> Check {
    let opts = QuadratureOptions::default();
    let mut w = Worst::new();
    for &l in &[0.3, 1.0, 3.0] {
        let mut values = Vec::new();
        for &t in &[0.0, 0.1, 1.0, 10.0] {
            let s = Spacetime::thermal(t).expect("non-negative temperature");
            match rcpi_quadrature(&s, l, 1.0, 1.0, DickeState::S, &opts) {
                Ok(r) => values.push((t, r.delta_e)),
                Err(e) => return failed("thermal_temperature_independence", 1e-12, e),
            }
        }
        let (t0, v0) = values[0];
        for &(t, v) in &values[1..] {
            w.see(rel(v, v0), || {
                format!("L={l}: T={t} gives {v:e}, T={t0} gives {v0:e}")
            });
        }
    }
    w.finish("thermal_temperature_independence", 1e-12)
}

fn steady_state() -> Check {
    let kappa = 1.0;
    let omega0 = 0.5;
    let s = Spacetime::de_sitter(kappa, 0.0).expect("unit patch");
    let atoms = AtomPair::new(omega0, 1.0, 10.0).expect("valid atoms");
    let gen = assemble_generator(&CoefficientSet::dissipative_only(&s, &atoms), omega0);
    let traj = match evolve(
        &TwoQubitState::pure(DickeState::E),
        &gen,
        &[0.0, 600.0],
        &EvolveOptions::default(),
    ) {
        Ok(t) => t,
        Err(e) => return failed("steady_state_ratio", 1e-4, e),
    };
    let rho = traj.points[1].state.reduced(0);
    let ratio = rho[(1, 1)].re / rho[(0, 0)].re;
    let expected = (-2.0 * std::f64::consts::PI * kappa * omega0).exp();
    let mut w = Worst::new();
    w.see((ratio - expected).abs(), || {
        format!("ratio {ratio:e} vs {expected:e}")
    });
    w.finish("steady_state_ratio", 1e-4)
}

fn subradiance() -> Check {
    let s = Spacetime::de_sitter(1.0, 0.0).expect("unit patch");
    let atoms = AtomPair::new(1.0, 0.5, 1e-3).expect("valid atoms");
    let gen = assemble_generator(&CoefficientSet::dissipative_only(&s, &atoms), 1.0);
    let ra = gen.population_loss_rate(DickeState::A, SelfTerms::Exclude);
    let rs = gen.population_loss_rate(DickeState::S, SelfTerms::Exclude);
    let mut w = Worst::new();
    w.see(ra / rs, || format!("A rate {ra:e} vs S rate {rs:e}"));
    w.finish("subradiance", 1e-4)
}

fn pipeline() -> Vec<Check> {
    let t = Thresholds::default();
    let run =
        |s: Spacetime, ls: Vec<f64>, omega0: f64, want: Verdict, name: &'static str| -> Check {
            let records: crate::Result<Vec<SweepRecord>> = ls
                .iter()
                .map(|&l| {
                    let r = rcpi(
                        &s,
                        l,
                        omega0,
                        0.1,
                        DickeState::S,
                        Method::ClosedForm,
                        &QuadratureOptions::default(),
                    )?;
                    SweepRecord::new(l, r.delta_e, -r.delta_e)
                })
                .collect();
            match records.and_then(|r| discriminate(&r, None, &t)) {
                Ok(d) => {
                    let mut w = Worst::new();
                    let miss = if d.verdict == want { 0.0 } else { 1.0 };
                    w.see(miss, || {
                        format!(
                            "exponent {:.4} gave {:?}, wanted {want:?}",
                            d.exponent, d.verdict
                        )
                    });
                    if miss == 0.0 {
                        w.detail = format!("exponent {:.6}", d.exponent);
                    }
                    w.finish(name, 0.0)
                }
                Err(e) => failed(name, 0.0, e),
            }
        };
    let grid = |a, b| log_grid(a, b, 3000).expect("valid grid");
    vec![
        run(
            Spacetime::de_sitter(1.0, 0.0).expect("unit patch"),
            grid(30.0, 1000.0),
            5.0,
            Verdict::DeSitterFar,
            "discriminate_de_sitter",
        ),
        run(
            Spacetime::thermal(1.0).expect("bath"),
            grid(10.0, 100.0),
            1.0,
            Verdict::FlatOrThermal,
            "discriminate_thermal",
        ),
    ]
}

pub fn run(level: Level) -> Report {
    let mut checks = vec![
        kms(
            &[0.5, 1.0, 2.0].map(|k| Spacetime::de_sitter(k, 0.0).expect("valid patch")),
            "kms_de_sitter",
        ),
        kms(
            &[0.1, 1.0, 10.0].map(|t| Spacetime::thermal(t).expect("bath")),
            "kms_thermal",
        ),
        oracle_grid(),
    ];
    checks.extend(regime_ratios());
    checks.push(flat_limit());
    checks.push(temperature_decomposition());
    checks.push(antisymmetry());
    checks.extend(lindblad_contracts(if level == Level::Full {
        200.0
    } else {
        20.0
    }));
    if level == Level::Full {
        checks.push(thermal_independence());
        checks.push(steady_state());
        checks.push(subradiance());
        checks.extend(pipeline());
    }
    Report {
        level: match level {
            Level::Quick => "quick",
            Level::Full => "full",
        },
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
