//! Damped two-mode squeezing through the Heisenberg–Langevin moment equations.
//!
//! With the drive phase fixed at −π/2 the resonator operators obey
//!
//! ```text
//! d/dt b_L = −ξ b_R† − κ_L/2 b_L + F_L
//! d/dt b_R = −ξ b_L† − κ_R/2 b_R + F_R
//! ```
//!
//! with zero-temperature Markov noise, `⟨b_i F_i†⟩ = κ_i/2` and every other
//! noise product zero. The first moments together with the ten symmetrized
//! bilinear moments in [`MomentState`] form a closed linear system.

use nalgebra::{Matrix2, Matrix4, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::device::ZeroPoint;
use crate::error::{Error, Result};
use crate::moments::MomentState;
use crate::ode::{Dopri5, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DampingParams {
    pub xi: f64,
    pub kappa_l: f64,
    pub kappa_r: f64,
}

impl DampingParams {
    pub fn new(xi: f64, kappa_l: f64, kappa_r: f64) -> Self {
        DampingParams { xi, kappa_l, kappa_r }
    }

    /// ξ < κ_L/2 and ξ < κ_R/2.
    pub fn regime_ok(&self) -> bool {
        self.xi < self.kappa_l / 2.0 && self.xi < self.kappa_r / 2.0
    }

    /// Description of the first violated per-mode threshold, if any.
    pub fn regime_violation(&self) -> Option<String> {
        if !(self.xi >= 0.0) {
            return Some(format!("xi = {} must be non-negative", self.xi));
        }
        if !(self.kappa_l > 0.0 && self.kappa_r > 0.0) {
            return Some("damping rates must be positive".to_string());
        }
        if self.xi >= self.kappa_l / 2.0 {
            return Some(format!("xi = {} >= kappa_L/2 = {}", self.xi, self.kappa_l / 2.0));
        }
        if self.xi >= self.kappa_r / 2.0 {
            return Some(format!("xi = {} >= kappa_R/2 = {}", self.xi, self.kappa_r / 2.0));
        }
        None
    }

    pub fn kappa_plus(&self) -> f64 {
        self.kappa_l + self.kappa_r
    }

    pub fn kappa_minus(&self) -> f64 {
        self.kappa_l - self.kappa_r
    }

    /// κ_Lκ_R / (κ_Lκ_R − 4ξ²).
    pub fn delta_xi(&self) -> f64 {
        let p = self.kappa_l * self.kappa_r;
        p / (p - 4.0 * self.xi * self.xi)
    }

    /// Slowest decay rate of the first moments, κ_+/4 − sqrt(κ_−²/16 + ξ²).
    /// Positive exactly when ξ < sqrt(κ_Lκ_R)/2.
    pub fn slowest_rate(&self) -> f64 {
        let d = self.kappa_minus() / 4.0;
        self.kappa_plus() / 4.0 - d.hypot(self.xi)
    }
}

/// Drift matrix M of d𝓑/dt = −M𝓑 + 𝓕 for 𝓑 = (b_L, b_L†, b_R, b_R†).
pub fn drift_matrix(params: &DampingParams) -> Matrix4<f64> {
    let (kl, kr, xi) = (params.kappa_l / 2.0, params.kappa_r / 2.0, params.xi);
    Matrix4::new(
        kl, 0.0, 0.0, xi, //
        0.0, kl, xi, 0.0, //
        0.0, xi, kr, 0.0, //
        xi, 0.0, 0.0, kr,
    )
}

/// Right-hand side of the moment equations.
pub fn moment_derivative(params: &DampingParams, m: &MomentState) -> MomentState {
    let (kl, kr, xi) = (params.kappa_l, params.kappa_r, params.xi);
    let kp = 0.5 * (kl + kr);
    MomentState {
        b_l: -0.5 * kl * m.b_l - xi * m.b_r.conj(),
        b_r: -0.5 * kr * m.b_r - xi * m.b_l.conj(),
        l1: -kl * m.l1 - xi * m.c2,
        l2: -kl * m.l2 - xi * (m.c1 + m.c4) + kl,
        l3: -kl * m.l3 - xi * m.c3,
        r1: -kr * m.r1 - xi * m.c3,
        r2: -kr * m.r2 - xi * (m.c1 + m.c4) + kr,
        r3: -kr * m.r3 - xi * m.c2,
        c1: -kp * m.c1 - xi * (m.l2 + m.r2),
        c2: -kp * m.c2 - 2.0 * xi * (m.r3 + m.l1),
        c3: -kp * m.c3 - 2.0 * xi * (m.r1 + m.l3),
        c4: -kp * m.c4 - xi * (m.l2 + m.r2),
    }
}

fn rhs_slices(params: DampingParams) -> impl FnMut(f64, &[Complex64], &mut [Complex64]) {
    move |_t, y, dy| {
        let d = moment_derivative(&params, &MomentState::from_slice(y));
        dy.copy_from_slice(&d.to_array());
    }
}

/// Moment trajectory sampled on `t_grid` (strictly increasing). The first
/// sample is `initial` evolved to `t_grid[0]` from t = 0.
pub fn integrate_moments(
    initial: &MomentState,
    params: &DampingParams,
    t_grid: &[f64],
    tol: Tolerances,
) -> Result<Vec<MomentState>> {
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            field: "t_grid",
            reason: "times must be strictly increasing".to_string(),
        });
    }
    if t_grid.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParameter {
            field: "t_grid",
            reason: "times must be non-negative".to_string(),
        });
    }
    let mut y = initial.to_array().to_vec();
    let mut solver = Dopri5::new(MomentState::LEN, tol, rhs_slices(*params));
    let mut t = 0.0;
    let mut out = Vec::with_capacity(t_grid.len());
    for &target in t_grid {
        solver.integrate(t, target, &mut y)?;
        t = target;
        out.push(MomentState::from_slice(&y));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct RelaxOptions {
    /// stop when ‖dy/dt‖ ≤ derivative_tol·(‖y‖ + 1)
    pub derivative_tol: f64,
    /// give up after this many multiples of 1/min(κ)
    pub max_time_constants: f64,
    pub tol: Tolerances,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        RelaxOptions {
            derivative_tol: 1e-10,
            max_time_constants: 1e5,
            tol: Tolerances::default(),
        }
    }
}

/// Integrates until the moment derivative vanishes to the requested
/// tolerance. Returns the final moments and the elapsed time.
pub fn relax_to_steady_state(
    initial: &MomentState,
    params: &DampingParams,
    opts: RelaxOptions,
) -> Result<(MomentState, f64)> {
    if params.slowest_rate() <= 0.0 {
        return Err(Error::OutOfRegime(format!(
            "xi = {} >= sqrt(kappa_L kappa_R)/2; moments grow without bound",
            params.xi
        )));
    }
    let chunk = 1.0 / params.kappa_l.max(params.kappa_r);
    let t_max = opts.max_time_constants / params.kappa_l.min(params.kappa_r);
    let mut y = initial.to_array().to_vec();
    let mut solver = Dopri5::new(MomentState::LEN, opts.tol, rhs_slices(*params));
    let mut t = 0.0;
    loop {
        solver.integrate(t, t + chunk, &mut y)?;
        t += chunk;
        let dnorm = solver.last_derivative().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let ynorm = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if dnorm <= opts.derivative_tol * (ynorm + 1.0) {
            return Ok((MomentState::from_slice(&y), t));
        }
        if t > t_max {
            return Err(Error::Integration {
                t,
                reason: format!("no steady state after t = {t_max} (derivative norm {dnorm:e})"),
            });
        }
    }
}

/// ⟨b_L⟩(t), ⟨b_R⟩(t) from the exact solution of the linear first-moment
/// equations, valid for any κ_L, κ_R.
pub fn first_moments_closed_form(
    b_l0: Complex64,
    b_r0: Complex64,
    params: &DampingParams,
    t: f64,
) -> (Complex64, Complex64) {
    // (⟨b_L⟩, ⟨b_R⟩*) obeys d/dt u = −K u with K = mean·1 + N, N² = ω²·1.
    let mean = params.kappa_plus() / 4.0;
    let d = params.kappa_minus() / 4.0;
    let omega = d.hypot(params.xi);
    let n = Matrix2::new(d, params.xi, params.xi, -d);
    let sinhc = if omega * t == 0.0 { t } else { (omega * t).sinh() / omega };
    let prop = ((omega * t).cosh() * Matrix2::identity() - sinhc * n) * (-mean * t).exp();
    let re = prop * Vector2::new(b_l0.re, b_r0.re);
    let im = prop * Vector2::new(b_l0.im, -b_r0.im);
    (Complex64::new(re[0], im[0]), Complex64::new(re[1], -im[1]))
}

/// Equal-damping form e^{−κt/2}[b_L(0) cosh ξt − b_R†(0) sinh ξt] and its
/// mirror image. Uses κ_L for ⟨b_L⟩ and κ_R for ⟨b_R⟩.
pub fn first_moments_equal_damping(
    b_l0: Complex64,
    b_r0: Complex64,
    params: &DampingParams,
    t: f64,
) -> (Complex64, Complex64) {
    let (ch, sh) = ((params.xi * t).cosh(), (params.xi * t).sinh());
    (
        (-0.5 * params.kappa_l * t).exp() * (b_l0 * ch - b_r0.conj() * sh),
        (-0.5 * params.kappa_r * t).exp() * (b_r0 * ch - b_l0.conj() * sh),
    )
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SteadyStateResult {
    pub moments: MomentState,
    #[serde(rename = "var_XT")]
    pub var_xt: f64,
    /// var_XT(ξ) / var_XT(0)
    pub var_ratio: f64,
    #[serde(rename = "Delta_xi")]
    pub delta_xi: f64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    /// (δ_X²/4) Δ_ξ (1 − 4ξ/κ_+) with δ_X² = δ_L² + δ_R²; printed only for
    /// comparison, it is a quarter of `var_xt` at ξ = 0.
    #[serde(rename = "var_XT_quarter_prefactor_form")]
    pub quarter_prefactor_form: f64,
}

/// Stationary moments below both per-mode thresholds.
pub fn closed_form_steady_state(params: &DampingParams, zp: &ZeroPoint) -> Result<SteadyStateResult> {
    if let Some(reason) = params.regime_violation() {
        return Err(Error::OutOfRegime(reason));
    }
    let kp = params.kappa_plus();
    let km = params.kappa_minus();
    let dx = params.delta_xi();
    let l2 = km / kp + 2.0 * params.kappa_r * dx / kp;
    let r2 = -km / kp + 2.0 * params.kappa_l * dx / kp;
    let c = -4.0 * params.xi * dx / kp;

    let zero = Complex64::new(0.0, 0.0);
    let moments = MomentState {
        l2: Complex64::new(l2, 0.0),
        r2: Complex64::new(r2, 0.0),
        c1: Complex64::new(c, 0.0),
        c4: Complex64::new(c, 0.0),
        ..MomentState {
            b_l: zero,
            b_r: zero,
            l1: zero,
            l2: zero,
            l3: zero,
            r1: zero,
            r2: zero,
            r3: zero,
            c1: zero,
            c2: zero,
            c3: zero,
            c4: zero,
        }
    };
    let (dl, dr) = (zp.delta_l, zp.delta_r);
    let var_xt = dl * dl * l2 + dr * dr * r2 + dl * dr * 2.0 * c;
    let vacuum = zp.collective_vacuum_variance();
    Ok(SteadyStateResult {
        moments,
        var_xt,
        var_ratio: var_xt / vacuum,
        delta_xi: dx,
        kappa_plus: kp,
        kappa_minus: km,
        quarter_prefactor_form: vacuum / 4.0 * dx * (1.0 - 4.0 * params.xi / kp),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfacePoint {
    pub kappa_l_over_xi: f64,
    pub kappa_r_over_xi: f64,
    pub var_ratio: f64,
    pub var_xt_over_delta_x2: f64,
    pub in_regime: bool,
    pub reason: Option<String>,
}

/// Steady-state collective variance over a grid of κ_L/ξ × κ_R/ξ, κ_L
/// varying slowest. Out-of-regime points carry NaN and the violated threshold.
pub fn variance_surface(kappa_l_over_xi: &[f64], kappa_r_over_xi: &[f64], zp: &ZeroPoint) -> Vec<SurfacePoint> {
    let grid: Vec<(f64, f64)> = kappa_l_over_xi
        .iter()
        .flat_map(|&kl| kappa_r_over_xi.iter().map(move |&kr| (kl, kr)))
        .collect();
    let vacuum = zp.collective_vacuum_variance();
    grid.par_iter()
        .map(|&(kl, kr)| match closed_form_steady_state(&DampingParams::new(1.0, kl, kr), zp) {
            Ok(s) => SurfacePoint {
                kappa_l_over_xi: kl,
                kappa_r_over_xi: kr,
                var_ratio: s.var_ratio,
                var_xt_over_delta_x2: s.var_xt / vacuum,
                in_regime: true,
                reason: None,
            },
            Err(e) => SurfacePoint {
                kappa_l_over_xi: kl,
                kappa_r_over_xi: kr,
                var_ratio: f64::NAN,
                var_xt_over_delta_x2: f64::NAN,
                in_regime: false,
                reason: Some(e.to_string()),
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::SymmetricEigen;

    #[test]
    fn drift_matrix_layout() {
        let m = drift_matrix(&DampingParams::new(0.3, 1.0, 2.0));
        assert_eq!(m[(0, 0)], 0.5);
        assert_eq!(m[(3, 3)], 1.0);
        for (r, c) in [(0, 3), (1, 2), (2, 1), (3, 0)] {
            assert_eq!(m[(r, c)], 0.3);
        }
        assert_eq!(m[(0, 1)], 0.0);
    }

    #[test]
    fn drift_eigenvalues_uncoupled_and_symmetric() {
        let mut e: Vec<f64> = SymmetricEigen::new(drift_matrix(&DampingParams::new(0.0, 1.0, 3.0)))
            .eigenvalues
            .iter()
            .copied()
            .collect();
        e.sort_by(f64::total_cmp);
        assert_eq!(e, vec![0.5, 0.5, 1.5, 1.5]);

        let (k, xi) = (1.7, 0.4);
        let mut e: Vec<f64> = SymmetricEigen::new(drift_matrix(&DampingParams::new(xi, k, k)))
            .eigenvalues
            .iter()
            .copied()
            .collect();
        e.sort_by(f64::total_cmp);
        let expected = [k / 2.0 - xi, k / 2.0 - xi, k / 2.0 + xi, k / 2.0 + xi];
        for (a, b) in e.iter().zip(expected) {
            assert_relative_eq!(*a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn drift_determinant_vanishes_at_threshold() {
        let (kl, kr) = (1.2, 3.1);
        for xi in [0.0, 0.3, 0.7] {
            let det = drift_matrix(&DampingParams::new(xi, kl, kr)).determinant();
            let expected = (kl * kr / 4.0 - xi * xi).powi(2);
            assert_relative_eq!(det, expected, epsilon = 1e-13);
        }
        let xi_c = (kl * kr).sqrt() / 2.0;
        assert!(drift_matrix(&DampingParams::new(xi_c, kl, kr)).determinant().abs() < 1e-13);
    }

    #[test]
    fn vacuum_is_stationary_without_coupling() {
        let traj = integrate_moments(
            &MomentState::vacuum(),
            &DampingParams::new(0.0, 1.0, 2.0),
            &[0.5, 1.0, 5.0],
            Tolerances::default(),
        )
        .unwrap();
        for m in traj {
            assert_eq!(m, MomentState::vacuum());
        }
    }

    #[test]
    fn rejects_non_monotone_grid() {
        let r = integrate_moments(
            &MomentState::vacuum(),
            &DampingParams::new(0.1, 1.0, 1.0),
            &[1.0, 0.5],
            Tolerances::default(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn steady_state_at_zero_coupling_is_vacuum() {
        let zp = ZeroPoint { delta_l: 1.3, delta_r: 0.8 };
        let s = closed_form_steady_state(&DampingParams::new(0.0, 1.0, 2.5), &zp).unwrap();
        assert_relative_eq!(s.moments.l2.re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(s.moments.r2.re, 1.0, epsilon = 1e-15);
        assert_eq!(s.moments.c1.re, 0.0);
        assert_relative_eq!(s.var_xt, 1.3 * 1.3 + 0.8 * 0.8, epsilon = 1e-14);
        assert_relative_eq!(s.var_ratio, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn equal_damping_ratio() {
        for &(k, xi) in &[(1.0, 0.1), (2.2, 1.0), (20.0, 1.0), (3.0, 1.49)] {
            let s = closed_form_steady_state(&DampingParams::new(xi, k, k), &ZeroPoint::UNIT).unwrap();
            assert_relative_eq!(s.var_ratio, k / (k + 2.0 * xi), max_relative = 1e-12);
        }
    }

    #[test]
    fn generic_point_intermediates() {
        let s = closed_form_steady_state(&DampingParams::new(0.3, 1.0, 2.0), &ZeroPoint::UNIT).unwrap();
        assert_relative_eq!(s.delta_xi, 2.0 / 1.64, max_relative = 1e-14);
        assert_eq!(s.kappa_plus, 3.0);
        assert_eq!(s.kappa_minus, -1.0);
    }

    #[test]
    fn unequal_fluctuation_display_form_agrees() {
        // δ_L²(2κ_RΔ + κ_−)/κ_+ + δ_R²(2κ_LΔ − κ_−)/κ_+ − 8δ_Lδ_R ξΔ/κ_+
        let p = DampingParams::new(0.35, 0.9, 2.7);
        let zp = ZeroPoint { delta_l: 1.7, delta_r: 0.6 };
        let s = closed_form_steady_state(&p, &zp).unwrap();
        let (kp, km, d) = (p.kappa_plus(), p.kappa_minus(), p.delta_xi());
        let display = zp.delta_l.powi(2) / kp * (2.0 * p.kappa_r * d + km)
            + zp.delta_r.powi(2) / kp * (2.0 * p.kappa_l * d - km)
            - 8.0 * zp.delta_l * zp.delta_r / kp * p.xi * d;
        assert_relative_eq!(s.var_xt, display, max_relative = 1e-13);
    }

    #[test]
    fn refuses_out_of_regime() {
        let err = closed_form_steady_state(&DampingParams::new(0.6, 1.0, 5.0), &ZeroPoint::UNIT).unwrap_err();
        assert!(err.to_string().contains("kappa_L/2"), "{err}");
        let err = closed_form_steady_state(&DampingParams::new(0.6, 5.0, 1.0), &ZeroPoint::UNIT).unwrap_err();
        assert!(err.to_string().contains("kappa_R/2"), "{err}");
    }

    #[test]
    fn first_moment_forms_agree_for_equal_damping() {
        let p = DampingParams::new(0.3, 1.1, 1.1);
        let (bl, br) = (Complex64::new(0.4, -0.2), Complex64::new(-0.1, 0.7));
        for t in [0.0, 0.5, 3.0] {
            let (a, b) = first_moments_closed_form(bl, br, &p, t);
            let (c, d) = first_moments_equal_damping(bl, br, &p, t);
            assert!((a - c).norm() < 1e-14 && (b - d).norm() < 1e-14);
        }
    }

    #[test]
    fn surface_marks_out_of_regime() {
        let pts = variance_surface(&[1.5, 4.0], &[4.0], &ZeroPoint::UNIT);
        assert_eq!(pts.len(), 2);
        assert!(!pts[0].in_regime && pts[0].var_ratio.is_nan());
        assert!(pts[0].reason.as_deref().unwrap().contains("kappa_L"));
        assert!(pts[1].in_regime);
        assert_relative_eq!(pts[1].var_ratio, 4.0 / 6.0, max_relative = 1e-12);
    }
}
