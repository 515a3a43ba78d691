//! Adaptive Dormand–Prince 5(4) integrator over complex state vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest step accepted before the integration is declared failed.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
            min_step: 1e-14,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

// Dormand–Prince coefficients.
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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// error weights: 5th order minus embedded 4th order
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrator for `dy/dt = f(t, y)`. The right-hand side writes into its
/// third argument.
pub struct Dopri5<F>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    rhs: F,
    tol: Tolerances,
    k: [Vec<Complex64>; 7],
    scratch: Vec<Complex64>,
    y_new: Vec<Complex64>,
    h: Option<f64>,
    fsal_valid: bool,
    pub stats: Stats,
}

impl<F> Dopri5<F>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    pub fn new(dim: usize, tol: Tolerances, rhs: F) -> Self {
        let z = || vec![Complex64::new(0.0, 0.0); dim];
        Dopri5 {
            rhs,
            tol,
            k: [z(), z(), z(), z(), z(), z(), z()],
            scratch: z(),
            y_new: z(),
            h: None,
            fsal_valid: false,
            stats: Stats::default(),
        }
    }

    fn eval(&mut self, t: f64, stage: usize) {
        let (rhs, k, scratch) = (&mut self.rhs, &mut self.k, &self.scratch);
        rhs(t, scratch, &mut k[stage]);
        self.stats.rhs_evals += 1;
    }

    fn combine(&mut self, y: &[Complex64], h: f64, weights: &[(usize, f64)]) {
        for (i, s) in self.scratch.iter_mut().enumerate() {
            let mut acc = y[i];
            for &(j, w) in weights {
                acc += self.k[j][i] * (h * w);
            }
            *s = acc;
        }
    }

    fn error_norm(&self, y: &[Complex64], h: f64) -> f64 {
        let mut sum = 0.0;
        for i in 0..y.len() {
            let e = (self.k[0][i] * E1
                + self.k[2][i] * E3
                + self.k[3][i] * E4
                + self.k[4][i] * E5
                + self.k[5][i] * E6
                + self.k[6][i] * E7)
                * h;
            let scale = self.tol.atol + self.tol.rtol * y[i].norm().max(self.y_new[i].norm());
            sum += e.norm_sqr() / (scale * scale);
        }
        (sum / y.len().max(1) as f64).sqrt()
    }

    fn initial_step(&self, y: &[Complex64], span: f64) -> f64 {
        let scale = |v: &Complex64| self.tol.atol + self.tol.rtol * v.norm();
        let d0 = (y.iter().map(|v| (v.norm() / scale(v)).powi(2)).sum::<f64>() / y.len() as f64).sqrt();
        let d1 = (y
            .iter()
            .zip(&self.k[0])
            .map(|(v, f)| (f.norm() / scale(v)).powi(2))
            .sum::<f64>()
            / y.len() as f64)
            .sqrt();
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(span.abs())
    }

    /// Forget the cached derivative; required when `y` is modified between
    /// calls to [`Dopri5::integrate`].
    pub fn reset(&mut self) {
        self.fsal_valid = false;
    }

    /// Advance `y` from `t0` to `t1` (t1 > t0). Successive calls continue
    /// from the state left by the previous one.
    pub fn integrate(&mut self, t0: f64, t1: f64, y: &mut [Complex64]) -> Result<()> {
        if !(t1 > t0) {
            if t1 == t0 {
                return Ok(());
            }
            return Err(Error::Integration {
                t: t0,
                reason: format!("end time {t1} precedes start time {t0}"),
            });
        }
        if !self.fsal_valid {
            self.scratch.copy_from_slice(y);
            self.eval(t0, 0);
            self.fsal_valid = true;
        }
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(y, t1 - t0),
        };
        let mut t = t0;
        let mut steps = 0usize;
        while t < t1 {
            if steps >= self.tol.max_steps {
                return Err(Error::Integration {
                    t,
                    reason: format!("exceeded {} steps", self.tol.max_steps),
                });
            }
            steps += 1;
            let last = t + h >= t1;
            let h_try = if last { t1 - t } else { h };

            self.combine(y, h_try, &[(0, A21)]);
            self.eval(t + C2 * h_try, 1);
            self.combine(y, h_try, &[(0, A31), (1, A32)]);
            self.eval(t + C3 * h_try, 2);
            self.combine(y, h_try, &[(0, A41), (1, A42), (2, A43)]);
            self.eval(t + C4 * h_try, 3);
            self.combine(y, h_try, &[(0, A51), (1, A52), (2, A53), (3, A54)]);
            self.eval(t + C5 * h_try, 4);
            self.combine(y, h_try, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)]);
            self.eval(t + h_try, 5);
            self.combine(y, h_try, &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)]);
            self.y_new.copy_from_slice(&self.scratch);
            self.eval(t + h_try, 6);

            let err = self.error_norm(y, h_try);
            if !err.is_finite() {
                return Err(Error::Integration {
                    t,
                    reason: "non-finite error estimate".to_string(),
                });
            }
            if err <= 1.0 {
                self.stats.accepted += 1;
                t = if last { t1 } else { t + h_try };
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6);
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || h_try >= h {
                    h = h_try * factor;
                }
            } else {
                self.stats.rejected += 1;
                h = h_try * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h < self.tol.min_step {
                    return Err(Error::Integration {
                        t,
                        reason: format!("step size {h:e} fell below the minimum {:e}", self.tol.min_step),
                    });
                }
            }
        }
        self.h = Some(h);
        Ok(())
    }

    /// Derivative at the current state (valid after an `integrate` call).
    pub fn last_derivative(&self) -> &[Complex64] {
        &self.k[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_rotation() {
        // dy/dt = -i y → y(t) = e^{-it}
        let mut solver = Dopri5::new(1, Tolerances::default(), |_t, y, dy| {
            dy[0] = -Complex64::i() * y[0];
        });
        let mut y = vec![Complex64::new(1.0, 0.0)];
        solver.integrate(0.0, 10.0, &mut y).unwrap();
        let exact = Complex64::new(0.0, -10.0).exp();
        assert!((y[0] - exact).norm() < 1e-9);
    }

    #[test]
    fn time_dependent_rhs_and_continuation() {
        // dy/dt = 2t → y = t²
        let mut solver = Dopri5::new(1, Tolerances::default(), |t, _y, dy| {
            dy[0] = Complex64::new(2.0 * t, 0.0);
        });
        let mut y = vec![Complex64::new(0.0, 0.0)];
        for k in 1..=4 {
            solver.integrate((k - 1) as f64, k as f64, &mut y).unwrap();
            assert!((y[0].re - (k * k) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn reports_step_failure() {
        let tol = Tolerances {
            max_steps: 3,
            ..Tolerances::default()
        };
        let mut solver = Dopri5::new(1, tol, |_t, y, dy| dy[0] = -1000.0 * y[0]);
        let mut y = vec![Complex64::new(1.0, 0.0)];
        assert!(matches!(solver.integrate(0.0, 100.0, &mut y), Err(Error::Integration { .. })));
    }
}
