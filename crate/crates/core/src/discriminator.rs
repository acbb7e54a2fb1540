//! Blind power-law test on interaction sweeps: strip the oscillation by
//! locating maxima of `|δE_S|`, fit `|δE| ∝ L^-p` on the maxima and read off
//! which universe produced the data.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One sample of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "dE_S")]
    pub delta_e_s: f64,
    #[serde(rename = "dE_A")]
    pub delta_e_a: f64,
}

impl SweepRecord {
    pub fn new(l: f64, delta_e_s: f64, delta_e_a: f64) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::invalid("L", l, "separation must be positive"));
        }
        if !(delta_e_s.is_finite() && delta_e_a.is_finite()) {
            return Err(Error::invalid("dE_S", delta_e_s, "energies must be finite"));
        }
        if (delta_e_a + delta_e_s).abs() > 1e-10 * delta_e_s.abs().max(delta_e_a.abs()) {
            return Err(Error::invalid("dE_A", delta_e_a, "dE_A must equal -dE_S"));
        }
        Ok(Self {
            l,
            delta_e_s,
            delta_e_a,
        })
    }
}

/// Reads `L,dE_S,dE_A[,envelope]` CSV with a header row. Extra columns are
/// ignored; rows must be strictly increasing in `L`.
pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse {
                row: 1,
                message: format!("missing column `{name}`"),
            })
    };
    let (il, is, ia) = (column("L")?, column("dE_S")?, column("dE_A")?);
    let mut out: Vec<SweepRecord> = Vec::new();
    for (k, row) in reader.records().enumerate() {
        // header is row 1
        let row_no = k + 2;
        let row = row.map_err(|e| Error::Parse {
            row: row_no,
            message: e.to_string(),
        })?;
        let field = |i: usize, name: &str| -> Result<f64> {
            let raw = row.get(i).ok_or_else(|| Error::Parse {
                row: row_no,
                message: format!("missing field `{name}`"),
            })?;
            raw.parse().map_err(|_| Error::Parse {
                row: row_no,
                message: format!("`{name}` is not a number: {raw:?}"),
            })
        };
        let rec = SweepRecord::new(field(il, "L")?, field(is, "dE_S")?, field(ia, "dE_A")?)
            .map_err(|e| Error::Parse {
                row: row_no,
                message: e.to_string(),
            })?;
        if let Some(prev) = out.last() {
            if rec.l <= prev.l {
                return Err(Error::Parse {
                    row: row_no,
                    message: format!("L must increase (got {} after {})", rec.l, prev.l),
                });
            }
        }
        out.push(rec);
    }
    Ok(out)
}

/// A local maximum of `|δE_S|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopePoint {
    pub l: f64,
    pub magnitude: f64,
}

/// Locates the interior local maxima of `|δE_S|` and refines each one with a
/// parabola through the neighbouring samples in `(ln L, ln|δE|)`.
pub fn extract_envelope(samples: &[SweepRecord]) -> Result<Vec<EnvelopePoint>> {
    let sign_changes = samples
        .windows(2)
        .filter(|w| w[0].delta_e_s * w[1].delta_e_s < 0.0)
        .count();
    let mut points = Vec::new();
    for w in samples.windows(3) {
        let (a, b, c) = (
            w[0].delta_e_s.abs(),
            w[1].delta_e_s.abs(),
            w[2].delta_e_s.abs(),
        );
        if !(b >= a && b > c && a > 0.0 && c > 0.0) {
            continue;
        }
        let (x0, x1, x2) = (w[0].l.ln(), w[1].l.ln(), w[2].l.ln());
        let (y0, y1, y2) = (a.ln(), b.ln(), c.ln());
        // Lagrange parabola through the three points, vertex by derivative
        let d01 = (y1 - y0) / (x1 - x0);
        let d12 = (y2 - y1) / (x2 - x1);
        let curv = (d12 - d01) / (x2 - x0);
        let (x, y) = if curv < 0.0 {
            let x = 0.5 * (x0 + x1) - 0.5 * d01 / curv;
            let x = x.clamp(x0, x2);
            (x, y0 + d01 * (x - x0) + curv * (x - x0) * (x - x1))
        } else {
            (x1, y1)
        };
        points.push(EnvelopePoint {
            l: x.exp(),
            magnitude: y.exp(),
        });
    }
    if sign_changes < 3 && points.len() < 5 {
        return Err(Error::InsufficientOscillations {
            sign_changes,
            maxima: points.len(),
        });
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub amplitude: f64,
    /// Root-mean-square residual of `ln|δE|`.
    pub residual_rms: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

/// Least-squares line through `(ln L, ln|δE|)` for the points with
/// `window.0 ≤ L ≤ window.1`; the exponent is minus the slope.
pub fn fit_power_law(points: &[EnvelopePoint], window: (f64, f64)) -> Result<PowerLawFit> {
    if !(window.0 < window.1) {
        return Err(Error::invalid(
            "window",
            window.1,
            "window must satisfy L_min < L_max",
        ));
    }
    let inside: Vec<&EnvelopePoint> = points
        .iter()
        .filter(|p| p.l >= window.0 && p.l <= window.1)
        .collect();
    if inside.len() < 4 {
        return Err(Error::InsufficientPoints(inside.len()));
    }
    if let Some(p) = inside.iter().find(|p| !(p.magnitude > 0.0)) {
        return Err(Error::NonPositive {
            length: p.l,
            value: p.magnitude,
        });
    }
    let n = inside.len() as f64;
    let xs: Vec<f64> = inside.iter().map(|p| p.l.ln()).collect();
    let ys: Vec<f64> = inside.iter().map(|p| p.magnitude.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(PowerLawFit {
        exponent: -slope,
        amplitude: intercept.exp(),
        residual_rms: (ss / n).sqrt(),
        window: (inside[0].l, inside[inside.len() - 1].l),
        n_points: inside.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    DeSitterFar,
    FlatOrThermal,
    Indeterminate,
}

/// Closed exponent intervals for each verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub de_sitter: (f64, f64),
    pub flat: (f64, f64),
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            de_sitter: (1.8, 2.2),
            flat: (0.8, 1.2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

pub fn classify(fit: &PowerLawFit, thresholds: &Thresholds) -> Classification {
    let p = fit.exponent;
    let within = |(lo, hi): (f64, f64)| p >= lo && p <= hi;
    let mut notes = Vec::new();
    let verdict = if within(thresholds.de_sitter) {
        notes.push(format!("exponent {p:.4} matches the 1/L^2 far-horizon law"));
        Verdict::DeSitterFar
    } else if within(thresholds.flat) {
        notes.push(format!("exponent {p:.4} matches the 1/L flat-space law"));
        Verdict::FlatOrThermal
    } else {
        notes.push(format!(
            "exponent {p:.4} lies outside both bands; window may straddle the crossover"
        ));
        Verdict::Indeterminate
    };
    if fit.residual_rms > 0.05 {
        notes.push(format!(
            "residual rms {:.3e} in ln|dE| suggests the envelope is not a single power law",
            fit.residual_rms
        ));
    }
    if fit.n_points < 8 {
        notes.push(format!("only {} envelope points in the fit", fit.n_points));
    }
    Classification { verdict, notes }
}

/// Envelope, fit and verdict together, serialised as the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrimination {
    pub exponent: f64,
    pub amplitude: f64,
    pub residual_rms: f64,
    pub window: (f64, f64),
    pub n_points: usize,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// Full pipeline. Without a window every envelope point is used.
pub fn discriminate(
    samples: &[SweepRecord],
    window: Option<(f64, f64)>,
    thresholds: &Thresholds,
) -> Result<Discrimination> {
    let envelope = extract_envelope(samples)?;
    let window = window.unwrap_or((0.0, f64::INFINITY));
    let fit = fit_power_law(&envelope, window)?;
    let c = classify(&fit, thresholds);
    Ok(Discrimination {
        exponent: fit.exponent,
        amplitude: fit.amplitude,
        residual_rms: fit.residual_rms,
        window: fit.window,
        n_points: fit.n_points,
        verdict: c.verdict,
        notes: c.notes,
    })
}
