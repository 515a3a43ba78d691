//! Normal-ordered polynomials in the three bosonic modes a, b_L, b_R with
//! coefficients that are rational multiples of monomials in c_1, c_2, g_L, g_R.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use serde::Serialize;

/// Exponents of (a, a†, b_L, b_L†, b_R, b_R†). When `normal_ordered` is set
/// the monomial is read mode by mode as (creation)^p (annihilation)^q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OperatorSignature {
    pub powers: [u8; 6],
    pub normal_ordered: bool,
}

pub const MODE_A: usize = 0;
pub const MODE_L: usize = 1;
pub const MODE_R: usize = 2;

const OPERATOR_NAMES: [&str; 6] = ["a", "adag", "bL", "bLdag", "bR", "bRdag"];
const OPERATOR_NAMES_UNICODE: [&str; 6] = ["a", "a†", "b_L", "b_L†", "b_R", "b_R†"];

impl OperatorSignature {
    pub const IDENTITY: OperatorSignature = OperatorSignature {
        powers: [0; 6],
        normal_ordered: true,
    };

    pub fn new(powers: [u8; 6]) -> Self {
        OperatorSignature {
            powers,
            normal_ordered: true,
        }
    }

    /// (annihilation, creation) exponents of a mode.
    pub fn mode(&self, mode: usize) -> (u8, u8) {
        (self.powers[2 * mode], self.powers[2 * mode + 1])
    }

    pub fn degree(&self, mode: usize) -> u8 {
        let (q, p) = self.mode(mode);
        q + p
    }

    pub fn squid_degree(&self) -> u8 {
        self.degree(MODE_A)
    }

    pub fn resonator_degree(&self) -> u8 {
        self.degree(MODE_L) + self.degree(MODE_R)
    }

    pub fn conjugate(&self) -> Self {
        let p = self.powers;
        OperatorSignature {
            powers: [p[1], p[0], p[3], p[2], p[5], p[4]],
            normal_ordered: self.normal_ordered,
        }
    }

    /// Net (annihilation − creation) count per mode, ordered (L, R, a).
    pub fn rotation(&self) -> [i32; 3] {
        let net = |m: usize| {
            let (q, p) = self.mode(m);
            q as i32 - p as i32
        };
        [net(MODE_L), net(MODE_R), net(MODE_A)]
    }

    fn render(&self, names: &[&str; 6], sep: &str) -> String {
        let mut parts = Vec::new();
        for mode in [MODE_L, MODE_R, MODE_A] {
            for idx in [2 * mode + 1, 2 * mode] {
                match self.powers[idx] {
                    0 => {}
                    1 => parts.push(names[idx].to_string()),
                    k => parts.push(format!("{}^{k}", names[idx])),
                }
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(sep)
        }
    }

    /// ASCII form such as `bLdag bL adag a`.
    pub fn ascii(&self) -> String {
        self.render(&OPERATOR_NAMES, " ")
    }
}

impl fmt::Display for OperatorSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&OPERATOR_NAMES_UNICODE, " "))
    }
}

/// Exponents of (c_1, c_2, g_L, g_R).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct SymbolMonomial(pub [u8; 4]);

const SYMBOL_NAMES: [&str; 4] = ["c_1", "c_2", "g_L", "g_R"];

impl SymbolMonomial {
    pub const ONE: SymbolMonomial = SymbolMonomial([0; 4]);
    pub const C1: SymbolMonomial = SymbolMonomial([1, 0, 0, 0]);
    pub const C2: SymbolMonomial = SymbolMonomial([0, 1, 0, 0]);
    pub const GL: SymbolMonomial = SymbolMonomial([0, 0, 1, 0]);
    pub const GR: SymbolMonomial = SymbolMonomial([0, 0, 0, 1]);

    pub fn mul(self, other: SymbolMonomial) -> SymbolMonomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a += b;
        }
        SymbolMonomial(e)
    }

    /// Exponent-wise minimum.
    pub fn gcd(self, other: SymbolMonomial) -> SymbolMonomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a = (*a).min(b);
        }
        SymbolMonomial(e)
    }

    /// `self / other`; panics unless `other` divides `self`.
    pub fn div(self, other: SymbolMonomial) -> SymbolMonomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a = a.checked_sub(b).expect("symbol monomial does not divide");
        }
        SymbolMonomial(e)
    }

    pub fn eval(&self, values: &SymbolValues) -> f64 {
        let v = [values.c_1, values.c_2, values.g_l, values.g_r];
        self.0.iter().zip(v).map(|(&k, x)| x.powi(k as i32)).product()
    }
}

impl fmt::Display for SymbolMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(SYMBOL_NAMES)
            .filter(|(k, _)| **k > 0)
            .map(|(&k, n)| if k == 1 { n.to_string() } else { format!("{n}^{k}") })
            .collect();
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolValues {
    pub c_1: f64,
    pub c_2: f64,
    pub g_l: f64,
    pub g_r: f64,
}

/// Sum of `coefficient · symbols · operator` terms, always normal-ordered.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<(OperatorSignature, SymbolMonomial), Rational64>,
}

fn binomial(n: u8, k: u8) -> i64 {
    (0..k as i64).fold(1, |acc, i| acc * (n as i64 - i) / (i + 1))
}

fn factorial(n: u8) -> i64 {
    (1..=n as i64).product()
}

/// Normal-ordered expansion of (c^{p1} a^{q1})(c^{p2} a^{q2}) for one mode:
/// list of (creation, annihilation, multiplicity).
fn mode_product(q1: u8, p1: u8, q2: u8, p2: u8) -> Vec<(u8, u8, i64)> {
    (0..=q1.min(p2))
        .map(|k| (p1 + p2 - k, q1 + q2 - k, binomial(q1, k) * binomial(p2, k) * factorial(k)))
        .collect()
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn monomial(coeff: Rational64, symbols: SymbolMonomial, op: OperatorSignature) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(op, symbols, coeff);
        p
    }

    pub fn constant(coeff: Rational64, symbols: SymbolMonomial) -> Self {
        Self::monomial(coeff, symbols, OperatorSignature::IDENTITY)
    }

    /// Single ladder operator by index into the signature layout.
    pub fn ladder(index: usize) -> Self {
        let mut powers = [0; 6];
        powers[index] = 1;
        Self::monomial(Rational64::from_integer(1), SymbolMonomial::ONE, OperatorSignature::new(powers))
    }

    /// b + b† for the given mode.
    pub fn position(mode: usize) -> Self {
        Self::ladder(2 * mode) + Self::ladder(2 * mode + 1)
    }

    pub fn add_term(&mut self, op: OperatorSignature, symbols: SymbolMonomial, coeff: Rational64) {
        if coeff == Rational64::from_integer(0) {
            return;
        }
        let entry = self.terms.entry((op, symbols)).or_insert_with(|| Rational64::from_integer(0));
        *entry += coeff;
        if *entry == Rational64::from_integer(0) {
            self.terms.remove(&(op, symbols));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OperatorSignature, &SymbolMonomial, &Rational64)> {
        self.terms.iter().map(|((op, s), c)| (op, s, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, op: &OperatorSignature, symbols: &SymbolMonomial) -> Rational64 {
        self.terms
            .get(&(*op, *symbols))
            .copied()
            .unwrap_or_else(|| Rational64::from_integer(0))
    }

    pub fn scale(&self, factor: Rational64, symbols: SymbolMonomial) -> Self {
        let mut out = Polynomial::zero();
        for (op, s, c) in self.iter() {
            out.add_term(*op, s.mul(symbols), *c * factor);
        }
        out
    }

    /// Hermitian conjugate; all symbols are real.
    pub fn conjugate(&self) -> Self {
        let mut out = Polynomial::zero();
        for (op, s, c) in self.iter() {
            out.add_term(op.conjugate(), *s, *c);
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.conjugate()
    }

    pub fn filter(&self, keep: impl Fn(&OperatorSignature) -> bool) -> Self {
        Polynomial {
            terms: self.terms.iter().filter(|((op, _), _)| keep(op)).map(|(k, v)| (*k, *v)).collect(),
        }
    }

    /// Product treating the ladder operators as commuting variables, i.e.
    /// without the reordering corrections.
    pub fn mul_commuting(&self, other: &Polynomial) -> Self {
        let mut out = Polynomial::zero();
        for (op1, s1, c1) in self.iter() {
            for (op2, s2, c2) in other.iter() {
                let mut powers = op1.powers;
                for (a, b) in powers.iter_mut().zip(op2.powers) {
                    *a += b;
                }
                out.add_term(OperatorSignature::new(powers), s1.mul(*s2), *c1 * *c2);
            }
        }
        out
    }

    /// Numeric coefficients for given symbol values.
    pub fn evaluate(&self, values: &SymbolValues) -> Vec<(OperatorSignature, f64)> {
        let mut acc: BTreeMap<OperatorSignature, f64> = BTreeMap::new();
        for (op, s, c) in self.iter() {
            let v = (*c.numer() as f64 / *c.denom() as f64) * s.eval(values);
            *acc.entry(*op).or_insert(0.0) += v;
        }
        acc.into_iter().collect()
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        for ((op, s), c) in rhs.terms {
            self.add_term(op, s, c);
        }
        self
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(Rational64::from_integer(-1), SymbolMonomial::ONE)
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        self + (-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (op1, s1, c1) in self.iter() {
            for (op2, s2, c2) in rhs.iter() {
                let per_mode: Vec<Vec<(u8, u8, i64)>> = (0..3)
                    .map(|m| {
                        let (q1, p1) = op1.mode(m);
                        let (q2, p2) = op2.mode(m);
                        mode_product(q1, p1, q2, p2)
                    })
                    .collect();
                let sym = s1.mul(*s2);
                for &(pa, qa, ka) in &per_mode[0] {
                    for &(pl, ql, kl) in &per_mode[1] {
                        for &(pr, qr, kr) in &per_mode[2] {
                            let op = OperatorSignature::new([qa, pa, ql, pl, qr, pr]);
                            out.add_term(op, sym, *c1 * *c2 * Rational64::from_integer(ka * kl * kr));
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.iter().map(|(op, s, c)| format!("({c})*{s}*[{}]", op.ascii())).collect();
        f.write_str(&parts.join(" + "))
    }
}
