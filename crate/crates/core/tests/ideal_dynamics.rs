use std::f64::consts::FRAC_PI_2;

use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use sqnamr_core::device::{derive, PhysicalConfig, ZeroPoint};
use sqnamr_core::ideal::{collective_variance, quadrature_stats, uncertainty_law, BogoliubovMap, GaussianMoments};
use sqnamr_core::moments::{partial_transpose_min_eigenvalue, MomentState};
use sqnamr_core::oracle::probes::ideal_squeezing;
use sqnamr_core::oracle::{
    build_generator, evolve, measure_moments, EvolveMethod, GeneratorSpec, TruncatedState, TruncationSpec,
};

fn max_moment_gap(a: &MomentState, b: &MomentState) -> f64 {
    a.to_array()
        .iter()
        .zip(b.to_array())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn real_map_at_quarter_turn_phase() {
    let m = BogoliubovMap::new(-0.3, -FRAC_PI_2);
    assert_relative_eq!(m.matrix[(0, 0)].re, 0.3f64.cosh(), epsilon = 1e-15);
    assert_relative_eq!(m.matrix[(0, 3)].re, -(0.3f64.sinh()), epsilon = 1e-15);
    assert_relative_eq!(m.matrix[(2, 1)].re, -(0.3f64.sinh()), epsilon = 1e-15);
}

#[test]
fn map_matches_fock_propagator() {
    let gamma = -0.3;
    let spec = TruncationSpec::two_mode(40);
    let (bl, br) = (Complex64::new(0.4, -0.1), Complex64::new(0.0, 0.2));
    let start = TruncatedState::coherent(&spec, bl, br, Complex64::new(0.0, 0.0)).unwrap();
    let gen = build_generator(&GeneratorSpec::classical_drive(gamma, -FRAC_PI_2), &spec).unwrap();
    let (end, trust) = evolve(&start, &gen, 1.0, EvolveMethod::Integrate, spec.leakage_bound).unwrap();
    assert!(trust.trusted, "{:?}", trust.reasons);
    let oracle = measure_moments(&end, &ZeroPoint::UNIT).moments;
    let map = BogoliubovMap::new(gamma, -FRAC_PI_2);
    let analytic = GaussianMoments::coherent(bl, br).evolve(&map).to_moment_state();
    assert!(max_moment_gap(&oracle, &analytic) < 1e-6, "{oracle:?} {analytic:?}");
}

#[test]
fn vacuum_statistics() {
    let d = derive(&PhysicalConfig::paper_preset()).unwrap();
    let st = collective_variance(&BogoliubovMap::identity(), &d);
    assert_relative_eq!(st.var_xt, d.delta_x * d.delta_x, max_relative = 1e-14);
    assert_relative_eq!(st.normalized_product, 1.0, epsilon = 1e-12);
}

#[test]
fn minimum_uncertainty_at_quarter_turn() {
    for g in [-2.0, -0.7, 0.1, 1.5] {
        let st = quadrature_stats(
            &GaussianMoments::vacuum(),
            &BogoliubovMap::new(g, -FRAC_PI_2),
            &ZeroPoint::UNIT,
            0.5,
            0.5,
        );
        assert_relative_eq!(st.normalized_product, 1.0, epsilon = 1e-10);
        assert_relative_eq!(uncertainty_law(g, -FRAC_PI_2), 1.0, epsilon = 1e-12);
    }
}

#[test]
fn half_gamma_squeezing_against_oracle() {
    let rep = ideal_squeezing(40, -0.5, -FRAC_PI_2, &ZeroPoint::UNIT).unwrap();
    assert!((rep.var_ratio - (-1.0f64).exp()).abs() < 1e-4, "{}", rep.var_ratio);
    assert!(rep.trusted);
    let st = quadrature_stats(
        &GaussianMoments::vacuum(),
        &BogoliubovMap::new(-0.5, -FRAC_PI_2),
        &ZeroPoint::UNIT,
        0.5,
        0.5,
    );
    assert_relative_eq!(st.var_ratio, 0.36787944117144233, max_relative = 1e-13);
}

#[test]
fn preset_squeezes() {
    let c = PhysicalConfig::paper_preset();
    let d = derive(&c).unwrap();
    let map = BogoliubovMap::from_drive(c.alpha_mag, d.eta, 1e-6, c.phi_drive);
    assert!(map.gamma < 0.0);
    let st = collective_variance(&map, &d);
    assert!(st.var_ratio < 1.0);
    assert!(st.warnings.len() == 1, "unequal resonator frequencies give unequal zero-point motion");
}

#[test]
fn coherent_input_becomes_entangled() {
    // A coherent input acquires the same covariance as the vacuum, so it is
    // entangled after the drive.
    let map = BogoliubovMap::new(-0.5, -FRAC_PI_2);
    let out = GaussianMoments::coherent(Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.5)).evolve(&map);
    let nu = partial_transpose_min_eigenvalue(&out.to_moment_state().covariance());
    assert_relative_eq!(nu, (-1.0f64).exp(), max_relative = 1e-10);
}

#[test]
fn hot_thermal_input_stays_separable() {
    let map = BogoliubovMap::new(-0.5, -FRAC_PI_2);
    let out = GaussianMoments::thermal(2.0, 2.0).evolve(&map);
    let nu = partial_transpose_min_eigenvalue(&out.to_moment_state().covariance());
    assert_relative_eq!(nu, 5.0 * (-1.0f64).exp(), max_relative = 1e-10);
    assert!(nu > 1.0);
}

proptest! {
    #[test]
    fn commutators_preserved(g in -5.0..5.0f64, phi in -3.14..3.14f64) {
        let m = BogoliubovMap::new(g, phi);
        prop_assert!(m.symplectic_defect() <= 1e-12 * g.cosh().powi(2));
    }

    #[test]
    fn one_parameter_group(a in -2.0..2.0f64, b in -2.0..2.0f64, phi in -3.14..3.14f64) {
        let lhs = BogoliubovMap::new(a, phi).compose(&BogoliubovMap::new(b, phi));
        let rhs = BogoliubovMap::new(a + b, phi).matrix;
        let gap = (lhs - rhs).iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-12 * (a.abs() + b.abs()).cosh().powi(2));
    }

    #[test]
    fn product_follows_phase_law(g in -2.0..2.0f64, phi in -3.14..3.14f64) {
        let st = quadrature_stats(&GaussianMoments::vacuum(), &BogoliubovMap::new(g, phi), &ZeroPoint::UNIT, 0.5, 0.5);
        let law = uncertainty_law(g, phi);
        prop_assert!((st.normalized_product - law).abs() <= 1e-10 * law);
    }
}
