//! Flat JSON run configuration.

use serde::{Deserialize, Serialize};

use crate::geometry::{euclidean_separation, AtomPair, Spacetime};
use crate::liouvillian::{EvolveOptions, SelfTerms};
use crate::quadrature::QuadratureOptions;
use crate::shifts::{log_grid, DickeState, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacetimeKind {
    DeSitter,
    ThermalMinkowski,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Log,
    Linear,
}

/// The document as written on disk. Every key is optional; [`RunConfig`]
/// applies defaults and checks consistency.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacetime: Option<SpacetimeKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_theta: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Spacing>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope_column: Option<bool>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<DickeState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_tau: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_lobes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ode_rtol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ode_atol: Option<f64>,
}

/// A field-level configuration problem.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("config field `{field}`: {message}")]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

fn bad(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field,
        message: message.into(),
    }
}

fn positive(field: &'static str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(bad(field, format!("must be positive and finite, got {v}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub l_min: f64,
    pub l_max: f64,
    pub n_points: usize,
    pub spacing: Spacing,
    pub method: Method,
    pub envelope_column: bool,
}

impl SweepConfig {
    pub fn grid(&self) -> Vec<f64> {
        match self.spacing {
            // bounds were checked when the config was built
            Spacing::Log => log_grid(self.l_min, self.l_max, self.n_points).unwrap_or_default(),
            Spacing::Linear => {
                let n = self.n_points;
                (0..n)
                    .map(|k| match k {
                        k if k == n - 1 => self.l_max,
                        k => self.l_min + (self.l_max - self.l_min) * k as f64 / (n - 1) as f64,
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveConfig {
    pub initial_state: DickeState,
    pub tau_max: f64,
    pub n_tau: usize,
    pub cutoff: Option<f64>,
    pub options: EvolveOptions,
}

impl EvolveConfig {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.n_tau;
        (0..n)
            .map(|k| match k {
                k if k == n - 1 => self.tau_max,
                k => self.tau_max * k as f64 / (n - 1) as f64,
            })
            .collect()
    }
}

/// Validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spacetime: Spacetime,
    pub omega0: f64,
    pub mu: f64,
    pub separation: Option<f64>,
    pub sweep: Option<SweepConfig>,
    pub evolve: Option<EvolveConfig>,
    pub quadrature: QuadratureOptions,
}

pub const DEFAULT_MU: f64 = 0.1;
pub const DEFAULT_OMEGA0: f64 = 1.0;

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| bad("<document>", e.to_string()))?;
        Self::from_raw(&raw)
    }

    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let kind = raw
            .spacetime
            .ok_or_else(|| bad("spacetime", "required: de_sitter or thermal_minkowski"))?;
        let spacetime = match kind {
            SpacetimeKind::DeSitter => {
                if raw.temperature.is_some() {
                    return Err(bad("temperature", "not allowed for a de_sitter spacetime"));
                }
                let alpha = positive("alpha", raw.alpha.unwrap_or(1.0))?;
                let r = raw.r.unwrap_or(0.0);
                Spacetime::de_sitter(alpha, r).map_err(|e| bad("r", e.to_string()))?
            }
            SpacetimeKind::ThermalMinkowski => {
                if raw.alpha.is_some() {
                    return Err(bad(
                        "alpha",
                        "not allowed for a thermal_minkowski spacetime",
                    ));
                }
                let t = raw
                    .temperature
                    .ok_or_else(|| bad("temperature", "required for thermal_minkowski"))?;
                Spacetime::thermal(t).map_err(|e| bad("temperature", e.to_string()))?
            }
        };
        let omega0 = positive("omega0", raw.omega0.unwrap_or(DEFAULT_OMEGA0))?;
        let mu = positive("mu", raw.mu.unwrap_or(DEFAULT_MU))?;

        let separation = match (raw.l, raw.delta_theta) {
            (Some(_), Some(_)) => {
                return Err(bad("delta_theta", "give either L or delta_theta, not both"))
            }
            (Some(l), None) => Some(positive("L", l)?),
            (None, Some(dt)) => {
                let r = raw
                    .r
                    .ok_or_else(|| bad("r", "delta_theta needs the radius r"))?;
                Some(euclidean_separation(r, dt).map_err(|e| bad("delta_theta", e.to_string()))?)
            }
            (None, None) => None,
        };

        let sweep = match (raw.l_min, raw.l_max) {
            (None, None) => {
                if raw.n_points.is_some() || raw.spacing.is_some() {
                    return Err(bad("l_min", "sweep settings given without l_min and l_max"));
                }
                None
            }
            (Some(a), Some(b)) => {
                let (a, b) = (positive("l_min", a)?, positive("l_max", b)?);
                if a >= b {
                    return Err(bad("l_max", format!("must exceed l_min ({b} <= {a})")));
                }
                let n_points = raw.n_points.unwrap_or(200);
                if n_points < 2 {
                    return Err(bad("n_points", "need at least 2 points"));
                }
                Some(SweepConfig {
                    l_min: a,
                    l_max: b,
                    n_points,
                    spacing: raw.spacing.unwrap_or(Spacing::Log),
                    method: raw.method.unwrap_or(Method::ClosedForm),
                    envelope_column: raw.envelope_column.unwrap_or(true),
                })
            }
            (None, Some(_)) => return Err(bad("l_min", "required together with l_max")),
            (Some(_), None) => return Err(bad("l_max", "required together with l_min")),
        };

        let evolve = match raw.tau_max {
            None => {
                if raw.initial_state.is_some() || raw.n_tau.is_some() {
                    return Err(bad("tau_max", "evolution settings given without tau_max"));
                }
                None
            }
            Some(t) => {
                let tau_max = positive("tau_max", t)?;
                let n_tau = raw.n_tau.unwrap_or(101);
                if n_tau < 2 {
                    return Err(bad("n_tau", "need at least 2 output times"));
                }
                let cutoff = match raw.cutoff {
                    Some(c) if !(c > omega0 && c.is_finite()) => {
                        return Err(bad("cutoff", format!("must exceed omega0, got {c}")))
                    }
                    c => c,
                };
                Some(EvolveConfig {
                    initial_state: raw.initial_state.unwrap_or(DickeState::E),
                    tau_max,
                    n_tau,
                    cutoff,
                    options: EvolveOptions {
                        rtol: positive("ode_rtol", raw.ode_rtol.unwrap_or(1e-10))?,
                        atol: positive("ode_atol", raw.ode_atol.unwrap_or(1e-12))?,
                        self_terms: if cutoff.is_some() {
                            SelfTerms::Include
                        } else {
                            SelfTerms::Exclude
                        },
                    },
                })
            }
        };

        let mut quadrature = QuadratureOptions::default();
        if let Some(v) = raw.quad_abs_tol {
            quadrature.abs_tol = positive("quad_abs_tol", v)?;
        }
        if let Some(v) = raw.quad_rel_tol {
            quadrature.rel_tol = positive("quad_rel_tol", v)?;
        }
        if let Some(v) = raw.max_lobes {
            if v < quadrature.min_lobes {
                return Err(bad(
                    "max_lobes",
                    format!("must be at least {}", quadrature.min_lobes),
                ));
            }
            quadrature.max_lobes = v;
        }

        Ok(Self {
            spacetime,
            omega0,
            mu,
            separation,
            sweep,
            evolve,
            quadrature,
        })
    }

    pub fn atoms(&self) -> Result<AtomPair, ConfigError> {
        let l = self
            .separation
            .ok_or_else(|| bad("L", "required (or delta_theta with r)"))?;
        AtomPair::new(self.omega0, self.mu, l).map_err(|e| bad("L", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"{
        "spacetime": "de_sitter", "alpha": 2.0, "r": 0.5,
        "omega0": 1.5, "mu": 0.2, "L": 0.7,
        "l_min": 0.1, "l_max": 100.0, "n_points": 50, "spacing": "log", "method": "quadrature",
        "envelope_column": false,
        "initial_state": "A", "tau_max": 10.0, "n_tau": 11, "cutoff": 30.0,
        "quad_abs_tol": 1e-13, "quad_rel_tol": 1e-10, "max_lobes": 300,
        "ode_rtol": 1e-9, "ode_atol": 1e-11
    }"#;

    #[test]
    fn round_trip() {
        let raw: RawConfig = serde_json::from_str(FULL).unwrap();
        let text = serde_json::to_string(&raw).unwrap();
        let again: RawConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(raw, again);
        assert_eq!(
            RunConfig::from_raw(&raw).unwrap(),
            RunConfig::from_raw(&again).unwrap()
        );
    }

    #[test]
    fn defaults() {
        let c = RunConfig::parse(r#"{"spacetime": "de_sitter", "L": 1.0}"#).unwrap();
        assert_eq!(c.mu, DEFAULT_MU);
        assert_eq!(c.omega0, DEFAULT_OMEGA0);
        assert_eq!(c.spacetime.kappa(), Some(1.0));
        assert!(c.sweep.is_none() && c.evolve.is_none());
    }

    #[test]
    fn rejects_inconsistent_documents() {
        for (doc, field) in [
            (r#"{"alpha": 1.0}"#, "spacetime"),
            (r#"{"spacetime": "thermal_minkowski"}"#, "temperature"),
            (
                r#"{"spacetime": "de_sitter", "temperature": 1.0}"#,
                "temperature",
            ),
            (r#"{"spacetime": "de_sitter", "alpha": 1.0, "r": 1.5}"#, "r"),
            (
                r#"{"spacetime": "de_sitter", "l_min": 2.0, "l_max": 1.0}"#,
                "l_max",
            ),
            (r#"{"spacetime": "de_sitter", "l_min": 2.0}"#, "l_max"),
            (
                r#"{"spacetime": "de_sitter", "L": 1.0, "delta_theta": 0.5, "r": 0.5}"#,
                "delta_theta",
            ),
            (
                r#"{"spacetime": "de_sitter", "tau_max": 1.0, "cutoff": 0.5}"#,
                "cutoff",
            ),
            (r#"{"spacetime": "de_sitter", "bogus": 1}"#, "<document>"),
        ] {
            let err = RunConfig::parse(doc).unwrap_err();
            assert_eq!(err.field, field, "{doc}: {err}");
        }
    }

    #[test]
    fn separation_from_angle() {
        let c = RunConfig::parse(
            r#"{"spacetime": "de_sitter", "r": 0.5, "delta_theta": 3.141592653589793}"#,
        )
        .unwrap();
        assert!((c.separation.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grids_hit_endpoints() {
        let c = RunConfig::parse(FULL).unwrap();
        let g = c.sweep.unwrap().grid();
        assert_eq!((g[0], g[49]), (0.1, 100.0));
        let t = c.evolve.unwrap().grid();
        assert_eq!((t[0], t[10]), (0.0, 10.0));
    }
}
