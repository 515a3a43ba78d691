//! Lossless two-mode squeezing under a classical drive of the SQUID mode.
//!
//! In the interaction picture the drive Hamiltonian is
//! `V_I = |α|η (e^{iφ} b_L b_R + e^{−iφ} b_L† b_R†)` and the resonator
//! operators undergo the Bogoliubov transformation
//!
//! ```text
//! b_L(t) = cosh γ b_L − i e^{−iφ} sinh γ b_R†,   γ = |α|ηt
//! ```
//!
//! together with its image under L ↔ R. Gaussian moments are propagated
//! exactly through the 4×4 map acting on 𝓑 = (b_L, b_L†, b_R, b_R†).

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::Serialize;

use crate::device::{DerivedQuantities, ZeroPoint};
use crate::moments::MomentState;

type CMatrix4 = Matrix4<Complex64>;

/// Commutator matrix J₀ with J₀[i][j] = [𝓑_i, 𝓑_j].
pub fn commutator_form() -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    j[(0, 1)] = 1.0;
    j[(1, 0)] = -1.0;
    j[(2, 3)] = 1.0;
    j[(3, 2)] = -1.0;
    j
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovMap {
    pub gamma: f64,
    pub phi_drive: f64,
    /// 𝓑(t) = matrix · 𝓑(0)
    pub matrix: CMatrix4,
}

impl BogoliubovMap {
    pub fn new(gamma: f64, phi_drive: f64) -> Self {
        let c = Complex64::new(gamma.cosh(), 0.0);
        let s = -Complex64::i() * Complex64::from_polar(1.0, -phi_drive) * gamma.sinh();
        let z = Complex64::new(0.0, 0.0);
        #[rustfmt::skip]
        let matrix = CMatrix4::new(
            c, z, z, s,
            z, c, s.conj(), z,
            z, s, c, z,
            s.conj(), z, z, c,
        );
        BogoliubovMap { gamma, phi_drive, matrix }
    }

    /// γ = |α| η t.
    pub fn from_drive(alpha_mag: f64, eta: f64, t: f64, phi_drive: f64) -> Self {
        Self::new(alpha_mag * eta * t, phi_drive)
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0)
    }

    /// Map applying `other` first and then `self`.
    pub fn compose(&self, other: &BogoliubovMap) -> CMatrix4 {
        self.matrix * other.matrix
    }

    /// max |T J₀ Tᵀ − J₀|, zero for a map that preserves the bosonic
    /// commutators.
    pub fn symplectic_defect(&self) -> f64 {
        let j0 = commutator_form().map(|v| Complex64::new(v, 0.0));
        (self.matrix * j0 * self.matrix.transpose() - j0)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

/// First moments and unsymmetrized second moments S_ij = ⟨𝓑_i 𝓑_j⟩ of a
/// two-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMoments {
    pub mean: Vector4<Complex64>,
    pub second: CMatrix4,
}

impl GaussianMoments {
    pub fn vacuum() -> Self {
        Self::from_moment_state(&MomentState::vacuum())
    }

    pub fn coherent(beta_l: Complex64, beta_r: Complex64) -> Self {
        Self::from_moment_state(&MomentState::coherent(beta_l, beta_r))
    }

    pub fn thermal(n_l: f64, n_r: f64) -> Self {
        Self::from_moment_state(&MomentState::thermal(n_l, n_r))
    }

    pub fn from_moment_state(m: &MomentState) -> Self {
        // S_ij = (⟨𝓑_i𝓑_j + 𝓑_j𝓑_i⟩ + [𝓑_i, 𝓑_j]) / 2
        let l2 = m.l2;
        let r2 = m.r2;
        #[rustfmt::skip]
        let sym = CMatrix4::new(
            2.0 * m.l1, l2, m.c1, m.c2,
            l2, 2.0 * m.l3, m.c3, m.c4,
            m.c1, m.c3, 2.0 * m.r1, r2,
            m.c2, m.c4, r2, 2.0 * m.r3,
        );
        let j0 = commutator_form().map(|v| Complex64::new(v, 0.0));
        GaussianMoments {
            mean: Vector4::new(m.b_l, m.b_l.conj(), m.b_r, m.b_r.conj()),
            second: (sym + j0) * Complex64::new(0.5, 0.0),
        }
    }

    pub fn to_moment_state(&self) -> MomentState {
        let s = &self.second;
        let sym = |i: usize, j: usize| s[(i, j)] + s[(j, i)];
        MomentState {
            b_l: self.mean[0],
            b_r: self.mean[2],
            l1: s[(0, 0)],
            l2: sym(0, 1),
            l3: s[(1, 1)],
            r1: s[(2, 2)],
            r2: sym(2, 3),
            r3: s[(3, 3)],
            c1: sym(0, 2),
            c2: sym(0, 3),
            c3: sym(1, 2),
            c4: sym(1, 3),
        }
    }

    pub fn evolve(&self, map: &BogoliubovMap) -> Self {
        GaussianMoments {
            mean: map.matrix * self.mean,
            second: map.matrix * self.second * map.matrix.transpose(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureStats {
    #[serde(rename = "var_XT")]
    pub var_xt: f64,
    #[serde(rename = "var_PT")]
    pub var_pt: f64,
    /// Δ X_T · Δ P_T
    pub product: f64,
    /// Δ X_T · Δ P_T / (δ_X ζ_P)
    pub normalized_product: f64,
    /// var_XT / δ_X²
    pub var_ratio: f64,
    pub warnings: Vec<String>,
}

/// |cosh²γ + e^{2iφ} sinh²γ|
pub fn uncertainty_law(gamma: f64, phi_drive: f64) -> f64 {
    let (c, s) = (gamma.cosh(), gamma.sinh());
    (Complex64::new(c * c, 0.0) + Complex64::from_polar(s * s, 2.0 * phi_drive)).norm()
}

/// Collective quadrature statistics of `initial` after `map`.
pub fn quadrature_stats(
    initial: &GaussianMoments,
    map: &BogoliubovMap,
    zp: &ZeroPoint,
    zeta_l: f64,
    zeta_r: f64,
) -> QuadratureStats {
    let m = initial.evolve(map).to_moment_state();
    let var_xt = m.collective_position_variance(zp);
    let var_pt = m.collective_momentum_variance(zeta_l, zeta_r);
    let delta_x2 = zp.collective_vacuum_variance();
    let zeta_p = zeta_l.hypot(zeta_r);
    let product = (var_xt * var_pt).sqrt();
    let mut warnings = Vec::new();
    if !zp.is_symmetric() {
        warnings.push(format!(
            "delta_L = {:e} differs from delta_R = {:e}; the exp(2 gamma) law assumes equal zero-point fluctuations",
            zp.delta_l, zp.delta_r
        ));
    }
    QuadratureStats {
        var_xt,
        var_pt,
        product,
        normalized_product: product / (delta_x2.sqrt() * zeta_p),
        var_ratio: var_xt / delta_x2,
        warnings,
    }
}

/// Statistics for the two-mode vacuum evolved by `map`.
pub fn collective_variance(map: &BogoliubovMap, derived: &DerivedQuantities) -> QuadratureStats {
    quadrature_stats(
        &GaussianMoments::vacuum(),
        map,
        &derived.fluctuations(),
        derived.zeta_l,
        derived.zeta_r,
    )
}
