//! Device parameters, effective coupling constants and the SQUID potential.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{ELEMENTARY_CHARGE, FLUX_QUANTUM, HBAR};
use crate::error::{Error, Result};

/// Allowed distance of `Phi_b / Phi_0` from an even integer for the quadratic
/// expansion of the potential.
pub const BIAS_FLUX_TOLERANCE: f64 = 1e-6;

/// Raw device parameters in SI units. Energies are angular frequencies (rad/s).
///
/// Field names on the wire are the ones used in configuration files
/// (`m_L`, `omega_R`, `E_J`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConfig {
    #[serde(rename = "m_L")]
    pub m_l: f64,
    #[serde(rename = "m_R")]
    pub m_r: f64,
    #[serde(rename = "omega_L")]
    pub omega_l: f64,
    #[serde(rename = "omega_R")]
    pub omega_r: f64,
    pub l_eff: f64,
    #[serde(rename = "B_L")]
    pub b_l: f64,
    #[serde(rename = "B_R")]
    pub b_r: f64,
    #[serde(rename = "I_c")]
    pub i_c: f64,
    #[serde(rename = "I_b")]
    pub i_b: f64,
    #[serde(rename = "Phi_b")]
    pub phi_b: f64,
    #[serde(rename = "E_C")]
    pub e_c: f64,
    #[serde(rename = "E_J")]
    pub e_j: f64,
    #[serde(rename = "kappa_L")]
    pub kappa_l: f64,
    #[serde(rename = "kappa_R")]
    pub kappa_r: f64,
    pub alpha_mag: f64,
    pub phi_drive: f64,
}

impl PhysicalConfig {
    /// The published feasibility parameter set, read with "GHz" meaning
    /// 10⁹ rad/s. The bias current is chosen so that the SQUID frequency
    /// matches ω_L + ω_R with both resonators in their ground state, and the
    /// drive amplitude puts the system well inside the overdamped regime.
    pub fn paper_preset() -> Self {
        let e_j = 120e9;
        let base = PhysicalConfig {
            m_l: 1e-18,
            m_r: 1e-18,
            omega_l: 1.5e9,
            omega_r: 1.2e9,
            l_eff: 10e-6,
            b_l: 1.0,
            b_r: 1.0,
            i_c: 2.0 * ELEMENTARY_CHARGE * e_j,
            i_b: 0.0,
            phi_b: 0.0,
            e_c: 0.061e9,
            e_j,
            kappa_l: 2e6,
            kappa_r: 2e6,
            alpha_mag: 50.0,
            phi_drive: -PI / 2.0,
        };
        base.with_resonant_bias()
            .expect("preset frequencies admit a resonant bias")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: PhysicalConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m_L", self.m_l),
            ("m_R", self.m_r),
            ("omega_L", self.omega_l),
            ("omega_R", self.omega_r),
            ("l_eff", self.l_eff),
            ("B_L", self.b_l),
            ("B_R", self.b_r),
            ("I_c", self.i_c),
            ("E_C", self.e_c),
            ("E_J", self.e_j),
            ("kappa_L", self.kappa_l),
            ("kappa_R", self.kappa_r),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be finite and strictly positive, got {value}"),
                });
            }
        }
        for (field, value) in [("I_b", self.i_b), ("Phi_b", self.phi_b)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be finite, got {value}"),
                });
            }
        }
        if self.i_b.abs() >= 2.0 * self.i_c {
            return Err(Error::BiasAboveCritical {
                bias: self.i_b,
                limit: 2.0 * self.i_c,
            });
        }
        if !(self.alpha_mag.is_finite() && self.alpha_mag >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "alpha_mag",
                reason: format!("must be finite and non-negative, got {}", self.alpha_mag),
            });
        }
        if !(self.phi_drive >= -PI && self.phi_drive < PI) {
            return Err(Error::InvalidParameter {
                field: "phi_drive",
                reason: format!("must lie in [-pi, pi), got {}", self.phi_drive),
            });
        }
        Ok(())
    }

    /// Returns a copy whose bias current tunes Ω = sqrt(E_C E_J cos q_0) onto
    /// ω_L + ω_R.
    pub fn with_resonant_bias(mut self) -> Result<Self> {
        let target = self.omega_l + self.omega_r;
        let cos_q0 = target * target / (self.e_c * self.e_j);
        if !(cos_q0 > 0.0 && cos_q0 <= 1.0) {
            return Err(Error::InvalidParameter {
                field: "I_b",
                reason: format!(
                    "no bias current reaches Omega = omega_L + omega_R (needs cos q0 = {cos_q0})"
                ),
            });
        }
        self.i_b = 2.0 * self.i_c * cos_q0.acos().sin();
        Ok(self)
    }

    /// The same numbers read as cyclic frequencies: every frequency, rate and
    /// energy is multiplied by 2π.
    pub fn with_cycles_convention(&self) -> Self {
        let s = 2.0 * PI;
        PhysicalConfig {
            omega_l: self.omega_l * s,
            omega_r: self.omega_r * s,
            e_c: self.e_c * s,
            e_j: self.e_j * s,
            kappa_l: self.kappa_l * s,
            kappa_r: self.kappa_r * s,
            i_c: self.i_c * s,
            i_b: self.i_b * s,
            ..*self
        }
    }
}

/// Effective parameters of the coupled SQUID/resonator Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub q_0: f64,
    #[serde(rename = "E_J_prime")]
    pub e_j_prime: f64,
    #[serde(rename = "Omega")]
    pub omega_sq: f64,
    #[serde(rename = "Delta_U")]
    pub delta_u: f64,
    #[serde(rename = "N_max")]
    pub n_max: f64,
    #[serde(rename = "g_L")]
    pub g_l: f64,
    #[serde(rename = "g_R")]
    pub g_r: f64,
    pub c_1: f64,
    pub c_2: f64,
    pub eta: f64,
    pub xi: f64,
    #[serde(rename = "delta_L")]
    pub delta_l: f64,
    #[serde(rename = "delta_R")]
    pub delta_r: f64,
    #[serde(rename = "delta_X")]
    pub delta_x: f64,
    #[serde(rename = "zeta_L")]
    pub zeta_l: f64,
    #[serde(rename = "zeta_R")]
    pub zeta_r: f64,
    #[serde(rename = "zeta_P")]
    pub zeta_p: f64,
}

impl DerivedQuantities {
    pub fn fluctuations(&self) -> ZeroPoint {
        ZeroPoint {
            delta_l: self.delta_l,
            delta_r: self.delta_r,
        }
    }
}

/// Zero-point position fluctuations of the two resonators (m, or any unit the
/// caller normalizes to).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroPoint {
    pub delta_l: f64,
    pub delta_r: f64,
}

impl ZeroPoint {
    pub const UNIT: ZeroPoint = ZeroPoint {
        delta_l: 1.0,
        delta_r: 1.0,
    };

    /// Vacuum variance of X_T = X_L + X_R.
    pub fn collective_vacuum_variance(&self) -> f64 {
        self.delta_l * self.delta_l + self.delta_r * self.delta_r
    }

    pub fn is_symmetric(&self) -> bool {
        (self.delta_l - self.delta_r).abs() <= 1e-12 * self.delta_l.abs().max(self.delta_r.abs())
    }
}

/// sqrt(ħ / (2 m ω)).
pub fn zero_point_fluctuation(mass: f64, omega: f64) -> f64 {
    (HBAR / (2.0 * mass * omega)).sqrt()
}

/// Height of the tilted-washboard barrier, 2 E_J [2 cos q_0 + sin q_0 (2 q_0 − π)].
pub fn barrier_height(e_j: f64, q_0: f64) -> f64 {
    2.0 * e_j * (2.0 * q_0.cos() + q_0.sin() * (2.0 * q_0 - PI))
}

pub fn derive(config: &PhysicalConfig) -> Result<DerivedQuantities> {
    config.validate()?;
    let q_0 = (config.i_b / (2.0 * config.i_c)).asin();
    let e_j_prime = config.e_j * q_0.cos();
    let omega_sq = (config.e_c * e_j_prime).sqrt();
    let delta_u = barrier_height(config.e_j, q_0);

    let delta_l = zero_point_fluctuation(config.m_l, config.omega_l);
    let delta_r = zero_point_fluctuation(config.m_r, config.omega_r);
    let flux_scale = PI * config.l_eff / FLUX_QUANTUM;
    let g_l = flux_scale * config.b_l * delta_l;
    let g_r = flux_scale * config.b_r * delta_r;

    let c_1 = 0.5 * omega_sq * q_0.tan() * (e_j_prime / config.e_c).powf(0.25);
    let c_2 = omega_sq / 8.0;
    // + 0.0 turns −0 into 0 at zero bias
    let eta = -c_1 * g_l * g_r + 0.0;

    let zeta_l = HBAR / (2.0 * delta_l);
    let zeta_r = HBAR / (2.0 * delta_r);

    Ok(DerivedQuantities {
        q_0,
        e_j_prime,
        omega_sq,
        delta_u,
        n_max: delta_u / omega_sq,
        g_l,
        g_r,
        c_1,
        c_2,
        eta,
        xi: config.alpha_mag * eta.abs(),
        delta_l,
        delta_r,
        delta_x: delta_l.hypot(delta_r),
        zeta_l,
        zeta_r,
        zeta_p: zeta_l.hypot(zeta_r),
    })
}

/// SQUID potential energy (rad/s) at phase `phi` with resonator flux `phi_x` (Wb).
pub fn potential(phi: f64, phi_x: f64, config: &PhysicalConfig) -> f64 {
    let flux_phase = PI * (config.phi_b + phi_x) / FLUX_QUANTUM;
    -2.0 * config.e_j * flux_phase.cos() * phi.cos() - config.i_b / config.i_c * config.e_j * phi
}

/// Additional loop flux B_L X_L l + B_R X_R l (Wb).
pub fn flux_from_displacement(x_l: f64, x_r: f64, config: &PhysicalConfig) -> f64 {
    (config.b_l * x_l + config.b_r * x_r) * config.l_eff
}

/// Second-order expansion of the potential about (q_0, 0) at Φ_b = 2nΦ_0.
///
/// With θ = φ − q_0 and y = πΦ_X/Φ_0 the expansion reads
/// `θ² E_J cos q_0 + y² E_J cos q_0 − y² E_J (θ sin q_0 + ½ θ² cos q_0)`,
/// constants dropped. The linear tilt cancels at the minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticExpansion {
    /// coefficient of θ²
    pub theta2: f64,
    /// coefficient of y²
    pub flux2: f64,
    /// coefficient of θ y²
    pub theta_flux2: f64,
    /// coefficient of θ² y²
    pub theta2_flux2: f64,
}

impl QuadraticExpansion {
    pub fn new(config: &PhysicalConfig) -> Result<Self> {
        check_even_flux_bias(config)?;
        let q_0 = (config.i_b / (2.0 * config.i_c)).asin();
        let (s, c) = q_0.sin_cos();
        Ok(QuadraticExpansion {
            theta2: config.e_j * c,
            flux2: config.e_j * c,
            theta_flux2: -config.e_j * s,
            theta2_flux2: -0.5 * config.e_j * c,
        })
    }

    pub fn eval(&self, theta: f64, phi_x: f64) -> f64 {
        let y2 = (PI * phi_x / FLUX_QUANTUM).powi(2);
        self.theta2 * theta * theta
            + y2 * (self.flux2 + self.theta_flux2 * theta + self.theta2_flux2 * theta * theta)
    }
}

/// Expansion value at θ = φ − q_0, flux `phi_x` (Wb).
pub fn quadratic_expansion(theta: f64, phi_x: f64, config: &PhysicalConfig) -> Result<f64> {
    Ok(QuadraticExpansion::new(config)?.eval(theta, phi_x))
}

fn check_even_flux_bias(config: &PhysicalConfig) -> Result<()> {
    let ratio = config.phi_b / FLUX_QUANTUM;
    let offset = ratio - 2.0 * (ratio / 2.0).round();
    if offset.abs() > BIAS_FLUX_TOLERANCE {
        return Err(Error::BiasFluxOffLattice {
            ratio,
            tolerance: BIAS_FLUX_TOLERANCE,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSample {
    pub phi: f64,
    pub flux_ratio: f64,
    pub u_over_ej: f64,
}

/// Potential on the grid φ ∈ [−π, 3π], Φ_X/Φ_0 ∈ [−0.1, 0.1], endpoints
/// included, φ varying slowest.
pub fn potential_scan(config: &PhysicalConfig, phi_points: usize, flux_points: usize) -> Vec<PotentialSample> {
    let phis = linspace(-PI, 3.0 * PI, phi_points);
    let fluxes = linspace(-0.1, 0.1, flux_points);
    let mut out = Vec::with_capacity(phis.len() * fluxes.len());
    for &phi in &phis {
        for &flux_ratio in &fluxes {
            let u = potential(phi, flux_ratio * FLUX_QUANTUM, config);
            out.push(PotentialSample {
                phi,
                flux_ratio,
                u_over_ej: u / config.e_j,
            });
        }
    }
    out
}

pub(crate) fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Numbers that decide whether the parameter set is experimentally sensible.
#[derive(Debug, Clone, Serialize)]
pub struct ConventionReport {
    pub convention: &'static str,
    #[serde(rename = "N_max")]
    pub n_max: f64,
    #[serde(rename = "Phi_X_over_Phi0")]
    pub flux_ratio: f64,
    pub n_max_within_factor_two_of_150: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub derived: DerivedQuantities,
    pub declared: ConventionReport,
    pub alternate: ConventionReport,
    /// Ω − δ_LR − (ω_L + ω_R) with both resonators in vacuum (rad/s)
    pub resonance_mismatch: f64,
    pub regime_ok_left: bool,
    pub regime_ok_right: bool,
    pub warnings: Vec<String>,
}

impl FeasibilityReport {
    pub fn regime_ok(&self) -> bool {
        self.regime_ok_left && self.regime_ok_right
    }
}

fn convention_report(config: &PhysicalConfig, convention: &'static str) -> Result<ConventionReport> {
    let derived = derive(config)?;
    let flux = flux_from_displacement(derived.delta_l, derived.delta_r, config);
    Ok(ConventionReport {
        convention,
        n_max: derived.n_max,
        flux_ratio: flux / FLUX_QUANTUM,
        n_max_within_factor_two_of_150: derived.n_max >= 75.0 && derived.n_max <= 300.0,
    })
}

pub fn feasibility(config: &PhysicalConfig) -> Result<FeasibilityReport> {
    let derived = derive(config)?;
    let declared = convention_report(config, "GHz = 1e9 rad/s")?;
    let alternate = convention_report(&config.with_cycles_convention(), "GHz = 2*pi*1e9 rad/s")?;
    let mut warnings = Vec::new();
    if derived.eta == 0.0 {
        warnings.push("eta = 0: no three-mode coupling (zero bias current)".to_string());
    }
    let regime_ok_left = derived.xi < config.kappa_l / 2.0;
    let regime_ok_right = derived.xi < config.kappa_r / 2.0;
    if !(regime_ok_left && regime_ok_right) {
        warnings.push(format!(
            "xi = {:e} rad/s is not below kappa/2 for both resonators",
            derived.xi
        ));
    }
    if derived.n_max < 10.0 {
        warnings.push(format!(
            "only {:.1} levels fit in the SQUID well; harmonic approximation is poor",
            derived.n_max
        ));
    }
    Ok(FeasibilityReport {
        derived,
        declared,
        alternate,
        resonance_mismatch: derived.omega_sq - (config.omega_l + config.omega_r),
        regime_ok_left,
        regime_ok_right,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn zero_bias() -> PhysicalConfig {
        PhysicalConfig {
            i_b: 0.0,
            ..PhysicalConfig::paper_preset()
        }
    }

    #[test]
    fn zero_bias_has_no_three_mode_coupling() {
        let d = derive(&zero_bias()).unwrap();
        assert_eq!(d.q_0, 0.0);
        assert_eq!(d.c_1, 0.0);
        assert_eq!(d.eta, 0.0);
        assert_eq!(d.xi, 0.0);
        let report = feasibility(&zero_bias()).unwrap();
        assert!(report.warnings.iter().any(|w| w.contains("no three-mode coupling")));
    }

    #[test]
    fn coupling_constant_two_routes() {
        let c = PhysicalConfig::paper_preset();
        let d = derive(&c).unwrap();
        let delta = (HBAR / (2.0 * c.m_l * c.omega_l)).sqrt();
        let g = PI * c.b_l * c.l_eff * delta / FLUX_QUANTUM;
        assert_relative_eq!(d.g_l, g, max_relative = 1e-12);
        assert_relative_eq!(d.delta_l, delta, max_relative = 1e-12);
    }

    #[test]
    fn preset_is_on_resonance() {
        let c = PhysicalConfig::paper_preset();
        let d = derive(&c).unwrap();
        assert_relative_eq!(d.omega_sq, c.omega_l + c.omega_r, max_relative = 1e-12);
        assert!(d.eta < 0.0);
        assert!(d.xi < c.kappa_l / 2.0);
    }

    #[test]
    fn rejects_supercritical_bias() {
        let c = PhysicalConfig {
            i_b: 2.0 * PhysicalConfig::paper_preset().i_c,
            ..PhysicalConfig::paper_preset()
        };
        assert!(matches!(derive(&c), Err(Error::BiasAboveCritical { .. })));
    }

    #[test]
    fn rejects_non_positive_inputs() {
        let c = PhysicalConfig {
            m_r: 0.0,
            ..PhysicalConfig::paper_preset()
        };
        match derive(&c) {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "m_R"),
            other => panic!("unexpected {other:?}"),
        }
        let c = PhysicalConfig {
            phi_drive: PI,
            ..PhysicalConfig::paper_preset()
        };
        assert!(derive(&c).is_err());
    }

    #[test]
    fn potential_at_origin() {
        let c = PhysicalConfig {
            i_b: 0.0,
            phi_b: 0.0,
            ..PhysicalConfig::paper_preset()
        };
        assert_eq!(potential(0.0, 0.0, &c), -2.0 * c.e_j);
    }

    #[test]
    fn half_flux_bias_leaves_pure_tilt() {
        let base = PhysicalConfig::paper_preset();
        let c = PhysicalConfig {
            phi_b: 2.5 * FLUX_QUANTUM,
            i_b: 0.1 * base.i_c,
            ..base
        };
        for phi in [-1.0, 0.0, 0.7, 2.0] {
            let expected = -0.1 * c.e_j * phi;
            assert!((potential(phi, 0.0, &c) - expected).abs() < 1e-6 * c.e_j);
        }
    }

    #[test]
    fn potential_is_periodic_in_two_flux_quanta() {
        let c = PhysicalConfig::paper_preset();
        for &(phi, fx) in &[(0.3, 1e-17), (-2.0, 4e-16), (5.0, -3e-16)] {
            let a = potential(phi, fx, &c);
            let b = potential(phi, fx + 2.0 * FLUX_QUANTUM, &c);
            assert!((a - b).abs() <= 1e-12 * c.e_j);
        }
    }

    #[test]
    fn expansion_vanishes_at_origin_and_checks_bias() {
        let c = PhysicalConfig::paper_preset();
        assert_eq!(quadratic_expansion(0.0, 0.0, &c).unwrap(), 0.0);
        let off = PhysicalConfig {
            phi_b: 0.25 * FLUX_QUANTUM,
            ..c
        };
        assert!(matches!(
            quadratic_expansion(0.0, 0.0, &off),
            Err(Error::BiasFluxOffLattice { .. })
        ));
        let even = PhysicalConfig {
            phi_b: 4.0 * FLUX_QUANTUM,
            ..c
        };
        assert!(quadratic_expansion(0.1, 0.0, &even).is_ok());
    }

    #[test]
    fn expansion_curvature_matches_finite_difference() {
        let c = PhysicalConfig {
            i_b: 0.5 * PhysicalConfig::paper_preset().i_c,
            ..PhysicalConfig::paper_preset()
        };
        let q0 = (c.i_b / (2.0 * c.i_c)).asin();
        let h = 1e-3;
        let u = |t: f64| potential(q0 + t, 0.0, &c);
        let second = (-u(2.0 * h) + 16.0 * u(h) - 30.0 * u(0.0) + 16.0 * u(-h) - u(-2.0 * h))
            / (12.0 * h * h);
        assert_relative_eq!(second, 2.0 * c.e_j * q0.cos(), max_relative = 1e-7);
        let e = QuadraticExpansion::new(&c).unwrap();
        assert_relative_eq!(2.0 * e.theta2, second, max_relative = 1e-7);
    }

    #[test]
    fn flux_is_linear() {
        let c = PhysicalConfig::paper_preset();
        assert_eq!(flux_from_displacement(0.0, 0.0, &c), 0.0);
        let x = 3.2e-13;
        assert_relative_eq!(
            flux_from_displacement(2.0 * x, 0.0, &c),
            2.0 * flux_from_displacement(x, 0.0, &c),
            max_relative = 1e-15
        );
    }

    #[test]
    fn doubling_field_doubles_coupling_only() {
        let c = PhysicalConfig::paper_preset();
        let d1 = derive(&c).unwrap();
        let d2 = derive(&PhysicalConfig { b_l: 2.0 * c.b_l, ..c }).unwrap();
        assert_relative_eq!(d2.g_l, 2.0 * d1.g_l, max_relative = 1e-14);
        assert_eq!(d2.omega_sq, d1.omega_sq);
        assert_eq!(d2.c_1, d1.c_1);
        assert_eq!(d2.c_2, d1.c_2);
    }

    #[test]
    fn barrier_shrinks_monotonically_to_zero() {
        let mut prev = f64::INFINITY;
        for i in 0..=200 {
            let q = 0.5 * PI * i as f64 / 200.0;
            let du = barrier_height(1.0, q);
            assert!(du < prev + 1e-15, "not monotone at q = {q}");
            prev = du;
        }
        assert!(barrier_height(1.0, 0.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn symmetric_masses_give_sqrt2_collective_scale() {
        let c = PhysicalConfig {
            omega_r: PhysicalConfig::paper_preset().omega_l,
            ..PhysicalConfig::paper_preset()
        };
        let d = derive(&c).unwrap();
        assert_relative_eq!(d.delta_x, 2f64.sqrt() * d.delta_l, max_relative = 1e-15);
        assert_relative_eq!(d.delta_x * d.zeta_p, HBAR, max_relative = 1e-12);
    }

    #[test]
    fn json_round_trip_and_field_names() {
        let c = PhysicalConfig::paper_preset();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"omega_L\"") && text.contains("\"Phi_b\""));
        assert_eq!(PhysicalConfig::from_json_str(&text).unwrap(), c);
        let missing = text.replace("\"m_L\":1e-18,", "");
        let err = PhysicalConfig::from_json_str(&missing).unwrap_err().to_string();
        assert!(err.contains("m_L"), "{err}");
    }

    #[test]
    fn scan_grid_shape() {
        let c = PhysicalConfig::paper_preset();
        let s = potential_scan(&c, 9, 5);
        assert_eq!(s.len(), 45);
        assert_eq!(s[0].phi, -PI);
        assert_eq!(s[44].phi, 3.0 * PI);
        assert_eq!(s[4].flux_ratio, 0.1);
    }

    proptest::proptest! {
        #[test]
        fn eta_is_non_positive_for_positive_tilt(ratio in 1e-3f64..1.99) {
            let base = PhysicalConfig::paper_preset();
            let c = PhysicalConfig { i_b: ratio * base.i_c, ..base };
            let d = derive(&c).unwrap();
            proptest::prop_assert!(d.eta < 0.0);
            proptest::prop_assert!(d.e_j_prime > 0.0);
            proptest::prop_assert!((d.omega_sq - (c.e_c * d.e_j_prime).sqrt()).abs() <= 1e-6 * d.omega_sq);
        }
    }
}
