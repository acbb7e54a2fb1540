//! Dormand-Prince 5(4) stepping for fixed-size complex state vectors.

use nalgebra::SVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order weights minus the embedded fourth-order ones
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

pub(crate) struct Stepper<const N: usize> {
    tol: Tolerance,
    h: f64,
    pub stats: Stats,
}

impl<const N: usize> Stepper<N> {
    pub fn new(tol: Tolerance, initial_step: f64) -> Self {
        Self {
            tol,
            h: initial_step,
            stats: Stats::default(),
        }
    }

    /// Advances `y` from `t0` to exactly `t1`.
    pub fn advance<F>(
        &mut self,
        f: &F,
        t0: f64,
        t1: f64,
        y: &mut SVector<Complex64, N>,
    ) -> Result<()>
    where
        F: Fn(f64, &SVector<Complex64, N>) -> SVector<Complex64, N>,
    {
        let mut t = t0;
        let mut k1 = f(t, y);
        while t < t1 {
            let last = t + self.h >= t1;
            let h = if last { t1 - t } else { self.h };
            if h < 1e-14 * t.abs().max(1.0) && !last {
                return Err(Error::StepUnderflow { tau: t, step: h });
            }

            let k2 = f(t + C2 * h, &(*y + k1 * r(h * A21)));
            let k3 = f(t + C3 * h, &(*y + (k1 * r(A31) + k2 * r(A32)) * r(h)));
            let k4 = f(
                t + C4 * h,
                &(*y + (k1 * r(A41) + k2 * r(A42) + k3 * r(A43)) * r(h)),
            );
            let k5 = f(
                t + C5 * h,
                &(*y + (k1 * r(A51) + k2 * r(A52) + k3 * r(A53) + k4 * r(A54)) * r(h)),
            );
            let k6 = f(
                t + h,
                &(*y + (k1 * r(A61) + k2 * r(A62) + k3 * r(A63) + k4 * r(A64) + k5 * r(A65))
                    * r(h)),
            );
            let y_new =
                *y + (k1 * r(B1) + k3 * r(B3) + k4 * r(B4) + k5 * r(B5) + k6 * r(B6)) * r(h);
            let k7 = f(t + h, &y_new);
            let err = (k1 * r(E1) + k3 * r(E3) + k4 * r(E4) + k5 * r(E5) + k6 * r(E6) + k7 * r(E7))
                * r(h);

            let mut norm = 0.0;
            for i in 0..N {
                let scale = self.tol.atol + self.tol.rtol * y[i].norm().max(y_new[i].norm());
                norm += (err[i].norm() / scale).powi(2);
            }
            let norm = (norm / N as f64).sqrt();

            let factor = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            if norm <= 1.0 {
                t = if last { t1 } else { t + h };
                *y = y_new;
                k1 = k7;
                self.stats.accepted += 1;
                if !last {
                    self.h = h * factor;
                }
            } else {
                self.stats.rejected += 1;
                self.h = h * factor.min(1.0);
                if self.h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow {
                        tau: t,
                        step: self.h,
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_rotation() {
        // y' = -i w y  ⇒  y = e^{-iwt}
        let w = 3.0;
        let f = |_t: f64, y: &SVector<Complex64, 1>| y * Complex64::new(0.0, -w);
        let mut y = SVector::<Complex64, 1>::new(Complex64::new(1.0, 0.0));
        let mut s = Stepper::new(
            Tolerance {
                rtol: 1e-11,
                atol: 1e-13,
            },
            0.01,
        );
        s.advance(&f, 0.0, 10.0, &mut y).unwrap();
        let exact = Complex64::new(0.0, -w * 10.0).exp();
        assert!((y[0] - exact).norm() < 1e-8);
        assert!(s.stats.accepted > 10);
    }

    #[test]
    fn decay() {
        let f =
            |_t: f64, y: &SVector<Complex64, 2>| SVector::<Complex64, 2>::new(-y[0], -2.0 * y[1]);
        let mut y =
            SVector::<Complex64, 2>::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let mut s = Stepper::new(
            Tolerance {
                rtol: 1e-10,
                atol: 1e-14,
            },
            0.1,
        );
        s.advance(&f, 0.0, 1.0, &mut y).unwrap();
        s.advance(&f, 1.0, 2.0, &mut y).unwrap();
        assert!((y[0].re - (-2.0f64).exp()).abs() < 1e-10);
        assert!((y[1].re - (-4.0f64).exp()).abs() < 1e-10);
    }
}
