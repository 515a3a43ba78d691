//! First and bilinear moments of the two resonator modes, and the quantities
//! assembled from them (collective quadrature variances, covariance matrix,
//! symplectic spectrum).

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use crate::device::ZeroPoint;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `⟨b_L⟩, ⟨b_R⟩` and the symmetrized bilinear moments
///
/// * `l1 = ⟨b_L²⟩`, `l3 = ⟨b_L†²⟩`, `l2 = ⟨b_L†b_L + b_L b_L†⟩`
/// * `r1, r2, r3` likewise for the right resonator
/// * `c1 = ⟨b_L b_R + b_R b_L⟩`, `c4 = ⟨b_L† b_R† + b_R† b_L†⟩`
/// * `c2 = ⟨b_L b_R† + b_R† b_L⟩`, `c3 = ⟨b_L† b_R + b_R b_L†⟩`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentState {
    pub b_l: Complex64,
    pub b_r: Complex64,
    pub l1: Complex64,
    pub l2: Complex64,
    pub l3: Complex64,
    pub r1: Complex64,
    pub r2: Complex64,
    pub r3: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: Complex64,
    pub c4: Complex64,
}

impl MomentState {
    pub const LEN: usize = 12;

    pub fn vacuum() -> Self {
        let one = Complex64::new(1.0, 0.0);
        MomentState {
            b_l: ZERO,
            b_r: ZERO,
            l1: ZERO,
            l2: one,
            l3: ZERO,
            r1: ZERO,
            r2: one,
            r3: ZERO,
            c1: ZERO,
            c2: ZERO,
            c3: ZERO,
            c4: ZERO,
        }
    }

    /// Product coherent state |β_L⟩|β_R⟩.
    pub fn coherent(beta_l: Complex64, beta_r: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let two = 2.0;
        MomentState {
            b_l: beta_l,
            b_r: beta_r,
            l1: beta_l * beta_l,
            l2: one + two * beta_l.norm_sqr(),
            l3: (beta_l * beta_l).conj(),
            r1: beta_r * beta_r,
            r2: one + two * beta_r.norm_sqr(),
            r3: (beta_r * beta_r).conj(),
            c1: two * beta_l * beta_r,
            c2: two * beta_l * beta_r.conj(),
            c3: two * beta_l.conj() * beta_r,
            c4: two * (beta_l * beta_r).conj(),
        }
    }

    /// Product thermal state with mean occupations `n_l`, `n_r`.
    pub fn thermal(n_l: f64, n_r: f64) -> Self {
        MomentState {
            l2: Complex64::new(2.0 * n_l + 1.0, 0.0),
            r2: Complex64::new(2.0 * n_r + 1.0, 0.0),
            ..Self::vacuum()
        }
    }

    pub fn to_array(&self) -> [Complex64; Self::LEN] {
        [
            self.b_l, self.b_r, self.l1, self.l2, self.l3, self.r1, self.r2, self.r3, self.c1,
            self.c2, self.c3, self.c4,
        ]
    }

    pub fn from_slice(v: &[Complex64]) -> Self {
        assert_eq!(v.len(), Self::LEN);
        MomentState {
            b_l: v[0],
            b_r: v[1],
            l1: v[2],
            l2: v[3],
            l3: v[4],
            r1: v[5],
            r2: v[6],
            r3: v[7],
            c1: v[8],
            c2: v[9],
            c3: v[10],
            c4: v[11],
        }
    }

    pub fn mean_occupations(&self) -> (f64, f64) {
        (0.5 * (self.l2.re - 1.0), 0.5 * (self.r2.re - 1.0))
    }

    /// Largest violation of `l3 = l1*`, `r3 = r1*`, `c4 = c1*`, `c3 = c2*`
    /// and of the reality of `l2`, `r2`.
    pub fn conjugation_defect(&self) -> f64 {
        [
            (self.l3 - self.l1.conj()).norm(),
            (self.r3 - self.r1.conj()).norm(),
            (self.c4 - self.c1.conj()).norm(),
            (self.c3 - self.c2.conj()).norm(),
            self.l2.im.abs(),
            self.r2.im.abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Variance of X_T = X_L + X_R with X_i = δ_i (b_i + b_i†).
    pub fn collective_position_variance(&self, zp: &ZeroPoint) -> f64 {
        let (dl, dr) = (zp.delta_l, zp.delta_r);
        let second = dl * dl * (self.l1 + self.l3 + self.l2)
            + dr * dr * (self.r1 + self.r3 + self.r2)
            + dl * dr * (self.c1 + self.c2 + self.c3 + self.c4);
        let mean = dl * (self.b_l + self.b_l.conj()) + dr * (self.b_r + self.b_r.conj());
        second.re - mean.re * mean.re
    }

    /// Variance of P_T = P_L + P_R with P_i = i ζ_i (b_i† − b_i).
    pub fn collective_momentum_variance(&self, zeta_l: f64, zeta_r: f64) -> f64 {
        let second = zeta_l * zeta_l * (self.l2 - self.l1 - self.l3)
            + zeta_r * zeta_r * (self.r2 - self.r1 - self.r3)
            - zeta_l * zeta_r * (self.c1 + self.c4 - self.c2 - self.c3);
        let i = Complex64::i();
        let mean = i * (zeta_l * (self.b_l.conj() - self.b_l) + zeta_r * (self.b_r.conj() - self.b_r));
        second.re - mean.re * mean.re
    }

    /// Quadrature covariance matrix of (x_L, p_L, x_R, p_R) with
    /// x = b + b†, p = i(b† − b), so that the vacuum maps to the identity.
    pub fn covariance(&self) -> Matrix4<f64> {
        let i = Complex64::i();
        let half = 0.5;
        let xx_l = self.l1 + self.l3 + self.l2;
        let pp_l = self.l2 - self.l1 - self.l3;
        let xp_l = i * (self.l3 - self.l1);
        let xx_r = self.r1 + self.r3 + self.r2;
        let pp_r = self.r2 - self.r1 - self.r3;
        let xp_r = i * (self.r3 - self.r1);
        let xlxr = half * (self.c1 + self.c2 + self.c3 + self.c4);
        let xlpr = half * i * (self.c2 - self.c1 + self.c4 - self.c3);
        let plxr = half * i * (self.c3 + self.c4 - self.c1 - self.c2);
        let plpr = -half * (self.c4 - self.c3 - self.c2 + self.c1);

        let mx_l = (self.b_l + self.b_l.conj()).re;
        let mp_l = (i * (self.b_l.conj() - self.b_l)).re;
        let mx_r = (self.b_r + self.b_r.conj()).re;
        let mp_r = (i * (self.b_r.conj() - self.b_r)).re;
        let m = [mx_l, mp_l, mx_r, mp_r];

        let raw = [
            [xx_l.re, xp_l.re, xlxr.re, xlpr.re],
            [xp_l.re, pp_l.re, plxr.re, plpr.re],
            [xlxr.re, plxr.re, xx_r.re, xp_r.re],
            [xlpr.re, plpr.re, xp_r.re, pp_r.re],
        ];
        Matrix4::from_fn(|r, c| raw[r][c] - m[r] * m[c])
    }
}

/// Symplectic eigenvalues (ν₋, ν₊) of a two-mode covariance matrix in
/// vacuum-normalized units. A physical state has ν₋ ≥ 1.
pub fn symplectic_eigenvalues(v: &Matrix4<f64>) -> (f64, f64) {
    let a = v.fixed_view::<2, 2>(0, 0).determinant();
    let b = v.fixed_view::<2, 2>(2, 2).determinant();
    let c = v.fixed_view::<2, 2>(0, 2).determinant();
    let delta = a + b + 2.0 * c;
    let det = v.determinant();
    let disc = (delta * delta - 4.0 * det).max(0.0).sqrt();
    (
        (0.5 * (delta - disc)).max(0.0).sqrt(),
        (0.5 * (delta + disc)).sqrt(),
    )
}

/// Smallest symplectic eigenvalue after partial transposition of the right
/// mode. Values below 1 certify entanglement.
pub fn partial_transpose_min_eigenvalue(v: &Matrix4<f64>) -> f64 {
    let flip = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
    symplectic_eigenvalues(&(flip * v * flip)).0
}

/// var(x_L + x_R) + var(p_L − p_R); below 4 is sufficient for entanglement.
pub fn duan_sum(v: &Matrix4<f64>) -> f64 {
    let plus = v[(0, 0)] + v[(2, 2)] + 2.0 * v[(0, 2)];
    let minus = v[(1, 1)] + v[(3, 3)] - 2.0 * v[(1, 3)];
    plus + minus
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_quantities() {
        let v = MomentState::vacuum();
        assert_eq!(v.covariance(), Matrix4::identity());
        let (lo, hi) = symplectic_eigenvalues(&v.covariance());
        assert_relative_eq!(lo, 1.0, epsilon = 1e-14);
        assert_relative_eq!(hi, 1.0, epsilon = 1e-14);
        let zp = ZeroPoint { delta_l: 2.0, delta_r: 3.0 };
        assert_relative_eq!(v.collective_position_variance(&zp), 13.0);
        assert_relative_eq!(v.collective_momentum_variance(0.25, 1.0 / 6.0), 0.0625 + 1.0 / 36.0);
        assert_relative_eq!(duan_sum(&v.covariance()), 4.0);
    }

    #[test]
    fn coherent_state_has_vacuum_noise() {
        let s = MomentState::coherent(Complex64::new(0.7, -0.2), Complex64::new(-1.0, 0.4));
        let cov = s.covariance();
        for r in 0..4 {
            for c in 0..4 {
                let e = if r == c { 1.0 } else { 0.0 };
                assert!((cov[(r, c)] - e).abs() < 1e-12);
            }
        }
        assert_relative_eq!(s.collective_position_variance(&ZeroPoint::UNIT), 2.0, epsilon = 1e-12);
        assert!(s.conjugation_defect() < 1e-15);
    }

    #[test]
    fn thermal_symplectic_eigenvalues() {
        let s = MomentState::thermal(0.5, 2.0);
        let (lo, hi) = symplectic_eigenvalues(&s.covariance());
        assert_relative_eq!(lo, 2.0, epsilon = 1e-12);
        assert_relative_eq!(hi, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn slice_round_trip() {
        let s = MomentState::coherent(Complex64::new(0.1, 0.2), Complex64::new(0.3, 0.4));
        assert_eq!(MomentState::from_slice(&s.to_array()), s);
    }
}
