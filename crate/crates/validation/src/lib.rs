//! Helpers for the acceptance suite: criterion bookkeeping and
//! finite-difference derivatives of two-variable functions.

use std::fmt::Write as _;
use std::time::Duration;

/// Outcome of one clause inside a criterion.
#[derive(Debug, Clone)]
pub struct Clause {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// One numbered acceptance criterion.
#[derive(Debug, Clone, Default)]
pub struct Criterion {
    pub number: u8,
    pub title: String,
    pub clauses: Vec<Clause>,
    pub elapsed: Option<Duration>,
}

impl Criterion {
    pub fn new(number: u8, title: &str) -> Self {
        Criterion {
            number,
            title: title.to_string(),
            ..Default::default()
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> bool {
        self.clauses.push(Clause {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
        passed
    }

    pub fn passed(&self) -> bool {
        !self.clauses.is_empty() && self.clauses.iter().all(|c| c.passed)
    }

    /// `criterion N: PASS|FAIL title`, followed by one indented line per clause.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = write!(s, "criterion {}: {verdict} {}", self.number, self.title);
        if let Some(t) = self.elapsed {
            let _ = write!(s, " ({:.2} s)", t.as_secs_f64());
        }
        s.push('\n');
        for c in &self.clauses {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            let _ = writeln!(s, "    [{mark}] {}: {}", c.name, c.detail);
        }
        s
    }
}

/// Weights of the five-point central stencils, fourth-order accurate.
const FIRST: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
const SECOND: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
const IDENTITY: [f64; 5] = [0.0, 0.0, 1.0, 0.0, 0.0];

fn stencil(order: usize) -> &'static [f64; 5] {
    match order {
        0 => &IDENTITY,
        1 => &FIRST,
        2 => &SECOND,
        _ => panic!("stencils exist for derivative orders 0, 1 and 2"),
    }
}

/// ∂^(nx+ny) f / ∂x^nx ∂y^ny at (x0, y0) from the tensor product of
/// five-point stencils with step h in both directions.
pub fn mixed_derivative(f: &dyn Fn(f64, f64) -> f64, x0: f64, y0: f64, nx: usize, ny: usize, h: f64) -> f64 {
    let (wx, wy) = (stencil(nx), stencil(ny));
    let mut sum = 0.0;
    for (i, a) in wx.iter().enumerate() {
        if *a == 0.0 {
            continue;
        }
        for (j, b) in wy.iter().enumerate() {
            if *b == 0.0 {
                continue;
            }
            let x = x0 + (i as f64 - 2.0) * h;
            let y = y0 + (j as f64 - 2.0) * h;
            sum += a * b * f(x, y);
        }
    }
    sum / h.powi((nx + ny) as i32)
}

/// Richardson-extrapolated [`mixed_derivative`]; the h⁴ error term of the
/// stencils cancels between steps h and 2h.
pub fn extrapolated_derivative(f: &dyn Fn(f64, f64) -> f64, x0: f64, y0: f64, nx: usize, ny: usize, h: f64) -> f64 {
    let fine = mixed_derivative(f, x0, y0, nx, ny, h);
    let coarse = mixed_derivative(f, x0, y0, nx, ny, 2.0 * h);
    (16.0 * fine - coarse) / 15.0
}

pub fn relative_error(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        value.abs()
    } else {
        ((value - reference) / reference).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_are_exact_on_quartics() {
        let f = |x: f64, y: f64| x.powi(4) + 3.0 * x * x * y * y - 2.0 * x * y * y + y;
        let d = |nx, ny| mixed_derivative(&f, 0.5, -0.3, nx, ny, 0.1);
        assert!((d(2, 0) - (12.0 * 0.25 + 6.0 * 0.09)).abs() < 1e-10);
        assert!((d(1, 2) - (12.0 * 0.5 - 4.0)).abs() < 1e-10);
        assert!((d(2, 2) - 12.0).abs() < 1e-9);
    }

    #[test]
    fn extrapolation_beats_plain_stencil() {
        let f = |x: f64, y: f64| x.sin() * y.cos();
        let exact = -(0.3f64.sin()) * -(0.2f64.cos());
        let plain = mixed_derivative(&f, 0.3, 0.2, 2, 2, 0.1);
        let rich = extrapolated_derivative(&f, 0.3, 0.2, 2, 2, 0.1);
        assert!((rich - exact).abs() < (plain - exact).abs() / 10.0);
    }

    #[test]
    fn verdict_requires_every_clause() {
        let mut c = Criterion::new(1, "demo");
        assert!(!c.passed());
        c.check("a", true, "fine");
        assert!(c.passed());
        c.check("b", false, "broken");
        assert!(!c.passed());
        assert!(c.render().starts_with("criterion 1: FAIL demo"));
    }
}
