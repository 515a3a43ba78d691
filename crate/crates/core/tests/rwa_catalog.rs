use proptest::prelude::*;
use sqnamr_core::device::{derive, PhysicalConfig};
use sqnamr_core::rwa::{
    completeness_check, enumerate_terms, enumerate_with, format_csv, resonance_shift, select_resonant,
    symbolic_rows, InteractionTerm, ModeFrequencies, SymbolValues, CATALOG_CSV_HEADER,
};

const GOLDEN: &str = include_str!("golden/table_i.csv");

fn values() -> SymbolValues {
    SymbolValues {
        c_1: 0.3,
        c_2: 0.05,
        g_l: 0.02,
        g_r: 0.03,
    }
}

fn terms(omega: f64, omega_l: f64, omega_r: f64) -> Vec<InteractionTerm> {
    enumerate_with(&values(), &ModeFrequencies { omega, omega_l, omega_r })
}

#[test]
fn catalogue_matches_golden_table() {
    let rows = symbolic_rows();
    let golden: Vec<Vec<&str>> = GOLDEN.lines().skip(1).map(|l| l.splitn(4, ',').collect()).collect();
    assert_eq!(rows.len(), 23);
    assert_eq!(golden.len(), 23);
    for (row, g) in rows.iter().zip(&golden) {
        assert_eq!(row.index.to_string(), g[0]);
        assert_eq!(row.frequency_expr(), g[1], "row {}", row.index);
        assert_eq!(row.coefficient_expr(), g[2], "row {}", row.index);
        assert_eq!(row.operators(), g[3], "row {}", row.index);
    }
}

#[test]
fn quoted_rows() {
    let rows = symbolic_rows();
    assert_eq!(rows[3].coefficient_expr(), "c_2*g_L*g_R");
    assert_eq!(rows[3].operators(), "bL bR adag a");
    assert_eq!(rows[3].frequency_expr(), "omega_L+omega_R");
    assert_eq!(rows[20].coefficient_expr(), "c_1*g_L*g_R");
    assert_eq!(rows[20].operators(), "bL bR adag");
    assert_eq!(rows[20].frequency_expr(), "omega_L+omega_R-Omega");
    assert!(rows[0].frequency.is_identically_zero());
    assert_eq!(rows[0].coefficient_expr(), "1/2*c_2");
}

#[test]
fn csv_has_header_and_23_rows() {
    let csv = format_csv(&terms(2.7, 1.5, 1.2));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CATALOG_CSV_HEADER));
    assert_eq!(lines.count(), 23);
}

#[test]
fn expansion_is_complete() {
    let r = completeness_check();
    assert!(r.closes(), "{r:?}");
    assert_eq!(r.rows, 23);
    assert_eq!(r.residual_terms, 0);
}

#[test]
fn numeric_coefficients_follow_symbols() {
    let d = derive(&PhysicalConfig::paper_preset()).unwrap();
    let t = enumerate_terms(&d, 1.5e9, 1.2e9);
    let row20 = &t[20];
    assert!((row20.coefficient_value - d.c_1 * d.g_l * d.g_r).abs() <= 1e-12 * row20.coefficient_value.abs());
    assert!((t[0].coefficient_value - 0.5 * d.c_2).abs() <= 1e-12 * d.c_2);
    assert!(row20.frequency_value.abs() < 1e-6 * d.omega_sq);
}

#[test]
fn degenerate_resonators_select_exchange_row() {
    let red = select_resonant(&terms(3.7, 1.0, 1.0), 3.7, 1.0, 1.0, 1e-3).unwrap();
    assert_eq!(red.indices(), vec![0, 4]);
    assert!(red.warnings.is_empty());
    assert!(red.polynomial(true).is_hermitian());
}

#[test]
fn sum_resonance_selects_three_wave_row() {
    let red = select_resonant(&terms(2.7, 1.5, 1.2), 2.7, 1.5, 1.2, 1e-3).unwrap();
    assert_eq!(red.indices(), vec![0, 20]);
    assert!(red.warnings.is_empty());
}

#[test]
fn zero_tolerance_keeps_only_static_row() {
    let (w, wl, wr) = (std::f64::consts::E, 1.0, std::f64::consts::SQRT_2);
    let red = select_resonant(&terms(w, wl, wr), w, wl, wr, 0.0).unwrap();
    assert_eq!(red.indices(), vec![0]);
}

#[test]
fn coincident_resonances_warn() {
    // ω_L = ω_R = Ω/2 puts rows 4, 16, 18, 20 on resonance together.
    let red = select_resonant(&terms(2.0, 1.0, 1.0), 2.0, 1.0, 1.0, 1e-9).unwrap();
    assert!(red.indices().contains(&20) && red.indices().contains(&4));
    assert_eq!(red.warnings.len(), 1);
}

#[test]
fn negative_tolerance_rejected() {
    assert!(select_resonant(&terms(2.7, 1.5, 1.2), 2.7, 1.5, 1.2, -1.0).is_err());
}

#[test]
fn shift_examples() {
    let d = derive(&PhysicalConfig::paper_preset()).unwrap();
    let s0 = resonance_shift(&d, 0.0, 0.0).unwrap();
    assert_eq!(s0.delta_lr, 0.0);
    assert_eq!(s0.omega_prime, d.omega_sq);
    let s1 = resonance_shift(&d, 1.0, 1.0).unwrap();
    assert!(s1.delta_lr / d.omega_sq < 1e-4, "{}", s1.delta_lr / d.omega_sq);
    let doubled = sqnamr_core::device::DerivedQuantities {
        g_l: 2.0 * d.g_l,
        g_r: 2.0 * d.g_r,
        ..d
    };
    let s2 = resonance_shift(&doubled, 1.0, 1.0).unwrap();
    assert!((s2.delta_lr / s1.delta_lr - 4.0).abs() < 1e-12);
    assert!(resonance_shift(&d, -1.0, 0.0).is_err());
}

proptest! {
    #[test]
    fn selection_monotone_in_tolerance(
        w in 0.5..5.0f64,
        wl in 0.5..3.0f64,
        wr in 0.5..3.0f64,
        t1 in 0.0..2.0f64,
        t2 in 0.0..2.0f64,
    ) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let all = terms(w, wl, wr);
        let small = select_resonant(&all, w, wl, wr, lo).unwrap().indices();
        let large = select_resonant(&all, w, wl, wr, hi).unwrap().indices();
        prop_assert!(small.iter().all(|i| large.contains(i)));
        prop_assert!(small.contains(&0));
    }

    #[test]
    fn every_row_hermitian_with_partner(c1 in -1.0..1.0f64, c2 in -1.0..1.0f64) {
        let v = SymbolValues { c_1: c1, c_2: c2, g_l: 0.1, g_r: 0.2 };
        for row in symbolic_rows() {
            let p = row.polynomial(true);
            prop_assert!(p.is_hermitian());
            let numeric = p.evaluate(&v);
            for (op, c) in &numeric {
                let partner = numeric.iter().find(|(o, _)| *o == op.conjugate());
                prop_assert_eq!(partner.map(|(_, pc)| *pc), Some(*c));
            }
        }
    }
}
