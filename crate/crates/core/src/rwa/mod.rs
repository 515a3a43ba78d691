//! Rotating-frame classification of the SQUID/resonator interaction
//!
//! ```text
//! V = −[g_L(b_L + b_L†) + g_R(b_R + b_R†)]² [c_1(a + a†) + c_2(a + a†)²]
//! ```
//!
//! The interaction is expanded in normal order, its terms are grouped by the
//! frequency at which they rotate in the interaction picture of
//! `H_0 = Ω a†a + ω_L b_L†b_L + ω_R b_R†b_R`, and the groups are listed as
//! 23 representative rows (their Hermitian conjugates rotate at the negated
//! frequency). Frequencies follow the table convention in which every
//! annihilation operator contributes `+ω` of its mode, so a term `T` with
//! frequency `f` satisfies `[H_0, T] = −f T`.
//!
//! Terms of zeroth order in either subsystem (pure SQUID or pure resonator
//! terms produced by reordering `(x)²`) are kept separately as the ordering
//! residue.

mod polynomial;

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_rational::Rational64;
use serde::Serialize;

use crate::device::DerivedQuantities;
use crate::error::{Error, Result};

pub use polynomial::{
    OperatorSignature, Polynomial, SymbolMonomial, SymbolValues, MODE_A, MODE_L, MODE_R,
};

/// Integer combination k_L ω_L + k_R ω_R + k_Ω Ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FrequencyCombo {
    pub k_l: i32,
    pub k_r: i32,
    pub k_omega: i32,
}

impl FrequencyCombo {
    pub fn of(op: &OperatorSignature) -> Self {
        let [k_l, k_r, k_omega] = op.rotation();
        FrequencyCombo { k_l, k_r, k_omega }
    }

    pub fn negate(self) -> Self {
        FrequencyCombo {
            k_l: -self.k_l,
            k_r: -self.k_r,
            k_omega: -self.k_omega,
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        self.k_l == 0 && self.k_r == 0 && self.k_omega == 0
    }

    /// Orientation used for the listed row: the first nonzero entry of
    /// (k_L + k_R, k_L, k_Ω) is positive.
    pub fn is_representative(&self) -> bool {
        [self.k_l + self.k_r, self.k_l, self.k_omega]
            .into_iter()
            .find(|&k| k != 0)
            .is_none_or(|k| k > 0)
    }

    pub fn representative(self) -> Self {
        if self.is_representative() {
            self
        } else {
            self.negate()
        }
    }

    pub fn value(&self, omega: f64, omega_l: f64, omega_r: f64) -> f64 {
        self.k_l as f64 * omega_l + self.k_r as f64 * omega_r + self.k_omega as f64 * omega
    }

    fn render(&self, names: [&str; 3], plus: &str, minus: &str, times: &str) -> String {
        let mut out = String::new();
        for (k, name) in [self.k_l, self.k_r, self.k_omega].into_iter().zip(names) {
            if k == 0 {
                continue;
            }
            if k < 0 {
                out.push_str(if out.is_empty() { "-" } else { minus });
            } else if !out.is_empty() {
                out.push_str(plus);
            }
            if k.abs() != 1 {
                let _ = write!(out, "{}{times}", k.abs());
            }
            out.push_str(name);
        }
        if out.is_empty() {
            "0".to_string()
        } else {
            out
        }
    }

    /// ASCII form, e.g. `omega_L+omega_R-Omega`, `2*Omega`, `0`.
    pub fn ascii(&self) -> String {
        self.render(["omega_L", "omega_R", "Omega"], "+", "-", "*")
    }

    pub fn unicode(&self) -> String {
        self.render(["ω_L", "ω_R", "Ω"], " + ", " − ", "")
    }
}

/// One operator product of a row together with its symbol monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Component {
    pub operators: OperatorSignature,
    pub symbols: SymbolMonomial,
}

/// Symbolic content of one listed row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolicRow {
    pub index: usize,
    pub frequency: FrequencyCombo,
    pub components: Vec<Component>,
    /// symbol factor shared by every component
    pub common_symbols: SymbolMonomial,
    /// prefactor as listed in the published table
    pub table_prefactor: Rational64,
    /// prefactor produced by the normal-ordered expansion
    pub exact_prefactor: Rational64,
}

impl SymbolicRow {
    pub fn is_composite(&self) -> bool {
        self.components.len() > 1
    }

    pub fn frequency_expr(&self) -> String {
        self.frequency.ascii()
    }

    /// e.g. `c_2*g_L*g_R`, `1/2*c_2`.
    pub fn coefficient_expr(&self) -> String {
        prefixed(self.table_prefactor, &self.common_symbols.to_string())
    }

    pub fn exact_coefficient_expr(&self) -> String {
        prefixed(self.exact_prefactor, &self.common_symbols.to_string())
    }

    /// e.g. `bL bR adag`, `(g_L^2 bLdag bL + g_R^2 bRdag bR) adag a`.
    pub fn operators(&self) -> String {
        self.render_operators(|op| op.ascii(), |s| s.to_string(), " ")
    }

    pub fn operators_unicode(&self) -> String {
        self.render_operators(|op| op.to_string(), |s| s.to_string().replace("^2", "²").replace('*', ""), " ")
    }

    fn render_operators(
        &self,
        op_fmt: impl Fn(&OperatorSignature) -> String,
        sym_fmt: impl Fn(&SymbolMonomial) -> String,
        sep: &str,
    ) -> String {
        if !self.is_composite() {
            return op_fmt(&self.components[0].operators);
        }
        let squid = squid_part(&self.components[0].operators);
        let inner: Vec<String> = self
            .components
            .iter()
            .map(|c| {
                let extra = c.symbols.div(self.common_symbols);
                format!("{}{sep}{}", sym_fmt(&extra), op_fmt(&resonator_part(&c.operators)))
            })
            .collect();
        format!("({}){sep}{}", inner.join(" + "), op_fmt(&squid))
    }

    /// Row plus its Hermitian conjugate, with either the listed or the
    /// exact prefactor.
    pub fn polynomial(&self, exact: bool) -> Polynomial {
        let pre = if exact { self.exact_prefactor } else { self.table_prefactor };
        let mut p = Polynomial::zero();
        for c in &self.components {
            p.add_term(c.operators, c.symbols, pre);
        }
        if self.frequency.is_identically_zero() {
            p
        } else {
            let conj = p.conjugate();
            p + conj
        }
    }
}

fn prefixed(pre: Rational64, symbols: &str) -> String {
    if pre == Rational64::from_integer(1) {
        symbols.to_string()
    } else if pre == Rational64::from_integer(-1) {
        format!("-{symbols}")
    } else {
        format!("{pre}*{symbols}")
    }
}

fn squid_part(op: &OperatorSignature) -> OperatorSignature {
    let p = op.powers;
    OperatorSignature::new([p[0], p[1], 0, 0, 0, 0])
}

fn resonator_part(op: &OperatorSignature) -> OperatorSignature {
    let p = op.powers;
    OperatorSignature::new([0, 0, p[2], p[3], p[4], p[5]])
}

/// Rows whose printed prefactor is 1/2; every other printed prefactor is 1.
const TABLE_HALF_ROWS: [usize; 1] = [0];

/// Normal-ordered expansion of the interaction.
pub fn interaction_expansion() -> Polynomial {
    let one = Rational64::from_integer(1);
    let x_l = Polynomial::position(MODE_L);
    let x_r = Polynomial::position(MODE_R);
    let x_a = Polynomial::position(MODE_A);
    let flux = x_l.scale(one, SymbolMonomial::GL) + x_r.scale(one, SymbolMonomial::GR);
    let squid = x_a.scale(one, SymbolMonomial::C1) + (&x_a * &x_a).scale(one, SymbolMonomial::C2);
    -(&(&flux * &flux) * &squid)
}

fn is_catalogued(op: &OperatorSignature) -> bool {
    op.squid_degree() >= 1 && op.resonator_degree() == 2
}

/// Terms of the expansion that are constant in either subsystem.
pub fn ordering_residue() -> Polynomial {
    interaction_expansion().filter(|op| !is_catalogued(op))
}

fn resonator_rank(f: &FrequencyCombo) -> u8 {
    match (f.k_l, f.k_r) {
        (2, 0) | (0, 0) => 0,
        (0, 2) => 1,
        (1, 1) => 2,
        _ => 3,
    }
}

fn row_sort_key(components: &[Component], f: &FrequencyCombo) -> (u8, u8, bool) {
    let squid = components[0].operators.mode(MODE_A);
    let composite = components.len() > 1;
    let class = match (composite, squid) {
        (true, (1, 1)) => 0,
        (false, (1, 1)) => 1,
        (true, (q, p)) if q + p == 2 => 2,
        (true, _) => 3,
        (false, (q, p)) if q + p == 2 => 4,
        (false, _) => 5,
    };
    (class, resonator_rank(f), f.k_omega < 0)
}

/// The 23 representative rows, in table order.
pub fn symbolic_rows() -> Vec<SymbolicRow> {
    let catalogued = interaction_expansion().filter(is_catalogued);
    let mut groups: Vec<(FrequencyCombo, Vec<(Component, Rational64)>)> = Vec::new();
    for (op, sym, coeff) in catalogued.iter() {
        let f = FrequencyCombo::of(op);
        let keep = if f.is_identically_zero() {
            *op <= op.conjugate()
        } else {
            f.is_representative()
        };
        if !keep {
            continue;
        }
        let comp = Component {
            operators: *op,
            symbols: *sym,
        };
        match groups.iter_mut().find(|(g, _)| *g == f) {
            Some((_, v)) => v.push((comp, *coeff)),
            None => groups.push((f, vec![(comp, *coeff)])),
        }
    }
    groups.sort_by(|(fa, ca), (fb, cb)| {
        let ka: Vec<Component> = ca.iter().map(|c| c.0).collect();
        let kb: Vec<Component> = cb.iter().map(|c| c.0).collect();
        row_sort_key(&ka, fa).cmp(&row_sort_key(&kb, fb)).then(Ordering::Equal)
    });
    groups
        .into_iter()
        .enumerate()
        .map(|(index, (frequency, mut comps))| {
            comps.sort_by_key(|(c, _)| std::cmp::Reverse(c.operators.mode(MODE_L)));
            let exact = comps[0].1;
            assert!(comps.iter().all(|(_, c)| *c == exact), "row {index} mixes prefactors");
            let common = comps
                .iter()
                .map(|(c, _)| c.symbols)
                .reduce(SymbolMonomial::gcd)
                .unwrap_or(SymbolMonomial::ONE);
            let table_prefactor = if TABLE_HALF_ROWS.contains(&index) {
                Rational64::new(1, 2)
            } else {
                Rational64::from_integer(1)
            };
            SymbolicRow {
                index,
                frequency,
                components: comps.into_iter().map(|(c, _)| c).collect(),
                common_symbols: common,
                table_prefactor,
                exact_prefactor: exact,
            }
        })
        .collect()
}

/// Mode frequencies used to evaluate the rotating frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeFrequencies {
    pub omega: f64,
    pub omega_l: f64,
    pub omega_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionTerm {
    #[serde(flatten)]
    pub row: SymbolicRow,
    pub frequency_expr: String,
    pub frequency_value: f64,
    pub coefficient_expr: String,
    /// listed prefactor × common symbols
    pub coefficient_value: f64,
    /// exact prefactor × common symbols
    pub exact_coefficient_value: f64,
    pub operators: String,
}

impl InteractionTerm {
    fn from_row(row: SymbolicRow, values: &SymbolValues, freqs: &ModeFrequencies) -> Self {
        let common = row.common_symbols.eval(values);
        let ratio = |r: Rational64| *r.numer() as f64 / *r.denom() as f64;
        InteractionTerm {
            frequency_expr: row.frequency_expr(),
            frequency_value: row.frequency.value(freqs.omega, freqs.omega_l, freqs.omega_r),
            coefficient_expr: row.coefficient_expr(),
            coefficient_value: ratio(row.table_prefactor) * common,
            exact_coefficient_value: ratio(row.exact_prefactor) * common,
            operators: row.operators(),
            row,
        }
    }

    pub fn index(&self) -> usize {
        self.row.index
    }
}

pub fn symbol_values(derived: &DerivedQuantities) -> SymbolValues {
    SymbolValues {
        c_1: derived.c_1,
        c_2: derived.c_2,
        g_l: derived.g_l,
        g_r: derived.g_r,
    }
}

/// Catalogue with numeric coefficients and frequencies.
pub fn enumerate_terms(derived: &DerivedQuantities, omega_l: f64, omega_r: f64) -> Vec<InteractionTerm> {
    let freqs = ModeFrequencies {
        omega: derived.omega_sq,
        omega_l,
        omega_r,
    };
    enumerate_with(&symbol_values(derived), &freqs)
}

pub fn enumerate_with(values: &SymbolValues, freqs: &ModeFrequencies) -> Vec<InteractionTerm> {
    symbolic_rows()
        .into_iter()
        .map(|r| InteractionTerm::from_row(r, values, freqs))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PrefactorMismatch {
    pub index: usize,
    pub table: Rational64,
    pub exact: Rational64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompletenessReport {
    pub rows: usize,
    /// operator products covered by the rows and their conjugates
    pub catalogued_terms: usize,
    pub residue_terms: usize,
    /// expansion − (rows + conjugates + residue) with exact prefactors
    pub residual_terms: usize,
    pub hermitian: bool,
    pub prefactor_mismatches: Vec<PrefactorMismatch>,
    /// nonzero terms left when the listed prefactors are used instead
    pub residual_terms_with_table_prefactors: usize,
}

impl CompletenessReport {
    pub fn closes(&self) -> bool {
        self.residual_terms == 0 && self.hermitian
    }
}

pub fn completeness_check() -> CompletenessReport {
    let expansion = interaction_expansion();
    let residue = ordering_residue();
    let rows = symbolic_rows();
    let sum = |exact: bool| {
        rows.iter()
            .fold(Polynomial::zero(), |acc, r| acc + r.polynomial(exact))
    };
    let exact_sum = sum(true);
    let residual = expansion.clone() - exact_sum.clone() - residue.clone();
    let table_residual = expansion.clone() - sum(false) - residue.clone();
    CompletenessReport {
        rows: rows.len(),
        catalogued_terms: exact_sum.len(),
        residue_terms: residue.len(),
        residual_terms: residual.len(),
        hermitian: expansion.is_hermitian() && exact_sum.is_hermitian(),
        prefactor_mismatches: rows
            .iter()
            .filter(|r| r.table_prefactor != r.exact_prefactor)
            .map(|r| PrefactorMismatch {
                index: r.index,
                table: r.table_prefactor,
                exact: r.exact_prefactor,
            })
            .collect(),
        residual_terms_with_table_prefactors: table_residual.len(),
    }
}

/// Three-wave Hamiltonian η(a† b_L b_R + a b_L† b_R†) with η = −c_1 g_L g_R.
pub fn three_wave_polynomial() -> Polynomial {
    let op = OperatorSignature::new([0, 1, 1, 0, 1, 0]);
    let p = Polynomial::monomial(
        Rational64::from_integer(-1),
        SymbolMonomial::C1.mul(SymbolMonomial::GL).mul(SymbolMonomial::GR),
        op,
    );
    p.clone() + p.conjugate()
}

#[derive(Debug, Clone, Serialize)]
pub struct ReducedHamiltonian {
    /// representative rows; each implies its Hermitian conjugate
    pub terms: Vec<InteractionTerm>,
    pub description: String,
    pub warnings: Vec<String>,
}

impl ReducedHamiltonian {
    pub fn indices(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.index()).collect()
    }

    pub fn polynomial(&self, exact: bool) -> Polynomial {
        self.terms
            .iter()
            .fold(Polynomial::zero(), |acc, t| acc + t.row.polynomial(exact))
    }
}

/// Default selection width: ten times the larger damping rate.
pub fn default_tolerance(kappa_l: f64, kappa_r: f64) -> f64 {
    10.0 * kappa_l.max(kappa_r)
}

/// Keeps the rows whose frequency, evaluated at (Ω_eff, ω_L, ω_R), lies
/// within `tol` of zero. Warns when several distinct non-trivial frequency
/// combinations are selected together.
pub fn select_resonant(
    terms: &[InteractionTerm],
    omega_eff: f64,
    omega_l: f64,
    omega_r: f64,
    tol: f64,
) -> Result<ReducedHamiltonian> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "tol",
            reason: format!("must be non-negative, got {tol}"),
        });
    }
    let kept: Vec<InteractionTerm> = terms
        .iter()
        .filter_map(|t| {
            let f = t.row.frequency.value(omega_eff, omega_l, omega_r);
            (f.abs() <= tol).then(|| InteractionTerm {
                frequency_value: f,
                ..t.clone()
            })
        })
        .collect();
    let mut distinct: Vec<String> = kept
        .iter()
        .filter(|t| !t.row.frequency.is_identically_zero())
        .map(|t| t.frequency_expr.clone())
        .collect();
    distinct.sort();
    distinct.dedup();
    let mut warnings = Vec::new();
    if distinct.len() >= 2 {
        warnings.push(format!(
            "ambiguous rotating-wave selection: {} distinct frequencies within tol = {tol:e}: {}",
            distinct.len(),
            distinct.join(", ")
        ));
    }
    Ok(ReducedHamiltonian {
        description: format!(
            "rows with |frequency| <= {tol:e} at Omega = {omega_eff:e}, omega_L = {omega_l:e}, omega_R = {omega_r:e}, plus Hermitian conjugates"
        ),
        terms: kept,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResonanceShift {
    #[serde(rename = "delta_LR")]
    pub delta_lr: f64,
    /// Ω′ = Ω − δ_LR
    #[serde(rename = "Omega_prime")]
    pub omega_prime: f64,
}

/// δ_LR = c_2 (g_R² n_R + g_L² n_L).
pub fn resonance_shift(derived: &DerivedQuantities, n_l: f64, n_r: f64) -> Result<ResonanceShift> {
    for (field, n) in [("n_L", n_l), ("n_R", n_r)] {
        if !(n >= 0.0) {
            return Err(Error::InvalidParameter {
                field,
                reason: format!("occupation must be non-negative, got {n}"),
            });
        }
    }
    let delta_lr = derived.c_2 * (derived.g_r * derived.g_r * n_r + derived.g_l * derived.g_l * n_l);
    Ok(ResonanceShift {
        delta_lr,
        omega_prime: derived.omega_sq - delta_lr,
    })
}

/// Aligned text rendering of the catalogue.
pub fn format_table(terms: &[InteractionTerm]) -> String {
    let freq: Vec<String> = terms.iter().map(|t| t.row.frequency.unicode()).collect();
    let width = freq.iter().map(|f| f.chars().count()).max().unwrap_or(0).max(9);
    let mut out = String::new();
    let _ = writeln!(out, "{:>3}  {:<width$}  {:>13}  term", "#", "frequency", "value (rad/s)");
    for (t, f) in terms.iter().zip(&freq) {
        let coeff = t.row.coefficient_expr().replace('*', " ").replace("^2", "²");
        let _ = writeln!(
            out,
            "{:>3}  {:<width$}  {:>13.6e}  {} {}",
            t.index(),
            f,
            t.frequency_value,
            coeff,
            t.row.operators_unicode()
        );
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CATALOG_CSV_HEADER: &str = "index,frequency_expr,frequency_value,coefficient_expr,operators";

/// CSV rows (header first) of the catalogue.
pub fn format_csv(terms: &[InteractionTerm]) -> String {
    let mut out = String::from(CATALOG_CSV_HEADER);
    out.push('\n');
    for t in terms {
        let _ = writeln!(
            out,
            "{},{},{:e},{},{}",
            t.index(),
            csv_field(&t.frequency_expr),
            t.frequency_value,
            csv_field(&t.coefficient_expr),
            csv_field(&t.operators)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn twenty_three_rows() {
        let rows = symbolic_rows();
        assert_eq!(rows.len(), 23);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.index, i);
            assert!(row.frequency.is_representative());
            for c in &row.components {
                assert_eq!(c.operators.resonator_degree(), 2);
                assert!((1..=2).contains(&c.operators.squid_degree()));
                assert_eq!(FrequencyCombo::of(&c.operators), row.frequency);
            }
        }
    }

    #[test]
    fn frequency_strings() {
        let f = FrequencyCombo { k_l: 1, k_r: 1, k_omega: -1 };
        assert_eq!(f.ascii(), "omega_L+omega_R-Omega");
        assert_eq!(f.unicode(), "ω_L + ω_R − Ω");
        let f = FrequencyCombo { k_l: 0, k_r: 0, k_omega: 2 };
        assert_eq!(f.ascii(), "2*Omega");
        assert_eq!(FrequencyCombo { k_l: 0, k_r: 0, k_omega: 0 }.ascii(), "0");
        let f = FrequencyCombo { k_l: 2, k_r: 0, k_omega: -2 };
        assert_eq!(f.ascii(), "2*omega_L-2*Omega");
    }

    #[test]
    fn exact_prefactors() {
        let expected = [-4, -2, -2, -4, -4, -2, -2, -1, -1, -1, -1, -2, -2, -2, -2, -1, -1, -1, -1, -2, -2, -2, -2];
        for (row, e) in symbolic_rows().iter().zip(expected) {
            assert_eq!(row.exact_prefactor, r(e), "row {}", row.index);
        }
    }

    #[test]
    fn expansion_closes() {
        let rep = completeness_check();
        assert!(rep.closes(), "{rep:?}");
        assert_eq!(rep.catalogued_terms, 50);
        assert_eq!(rep.prefactor_mismatches.len(), 23);
        assert!(rep.residual_terms_with_table_prefactors > 0);
    }

    #[test]
    fn commuting_product_differs_by_reordering_constants() {
        let one = Rational64::from_integer(1);
        let x_l = Polynomial::position(MODE_L);
        let x_r = Polynomial::position(MODE_R);
        let x_a = Polynomial::position(MODE_A);
        let flux = x_l.scale(one, SymbolMonomial::GL) + x_r.scale(one, SymbolMonomial::GR);
        let squid = x_a.scale(one, SymbolMonomial::C1) + x_a.mul_commuting(&x_a).scale(one, SymbolMonomial::C2);
        let commuting = -flux.mul_commuting(&flux).mul_commuting(&squid);
        // [b, b†] = 1 adds exactly 1 to each (x)², so the operator content with
        // both subsystems active is shared.
        let boson = interaction_expansion();
        let corrections = boson.clone() - commuting.clone();
        // reading b b† as b†b in the commuting product moves no terms between rows
        assert_eq!(commuting.filter(is_catalogued), boson.filter(is_catalogued));
        assert!(corrections.iter().all(|(op, _, _)| !is_catalogued(op)));
        assert!(!corrections.is_empty());
    }

    #[test]
    fn residue_contents() {
        let res = ordering_residue();
        assert!(res.is_hermitian());
        for (op, _, _) in res.iter() {
            assert!(op.squid_degree() == 0 || op.resonator_degree() == 0);
        }
        // −(g_L² + g_R²) c_2 constant from both reorderings
        let c = res.coefficient(&OperatorSignature::IDENTITY, &SymbolMonomial::C2.mul(SymbolMonomial::GL).mul(SymbolMonomial::GL));
        assert_eq!(c, r(-1));
    }

    #[test]
    fn three_wave_is_hermitian() {
        assert!(three_wave_polynomial().is_hermitian());
        assert_eq!(three_wave_polynomial().len(), 2);
    }

    #[test]
    fn tolerance_validation() {
        assert!(select_resonant(&[], 1.0, 1.0, 1.0, -1.0).is_err());
        assert!(select_resonant(&[], 1.0, 1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn csv_quotes_composite_rows() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("bL bR adag"), "bL bR adag");
    }
}
