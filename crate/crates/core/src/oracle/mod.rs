//! Brute-force reference dynamics on a truncated Fock space.
//!
//! States are kets or dense density matrices (column-major). Lossless
//! evolution integrates the Schrödinger equation; lossy evolution integrates
//! the zero-temperature Lindblad equation
//!
//! ```text
//! dρ/dt = −i[H, ρ] + Σ_i κ_i (b_i ρ b_i† − ½{b_i†b_i, ρ})
//! ```
//!
//! or, for small spaces, exponentiates the dense Liouvillian.

pub mod fock;
pub mod liouville;
pub mod probes;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::device::ZeroPoint;
use crate::error::{Error, Result};
use crate::moments::MomentState;
use crate::ode::{Dopri5, Tolerances};
use crate::rwa::{ModeFrequencies, OperatorSignature, Polynomial, SymbolValues};

pub use fock::{annihilation, number, operator_from_terms, FockSpace, ModeMap, SparseOp};
pub use liouville::ReducedLiouvillian;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub const DEFAULT_LEAKAGE_BOUND: f64 = 1e-6;
pub const DEFAULT_MAX_DIM: usize = 10_000;
/// Largest Liouvillian dimension exponentiated densely by default.
pub const DENSE_LIOUVILLIAN_LIMIT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationSpec {
    /// levels kept for the SQUID mode; `None` for the two-mode space
    pub squid_levels: Option<usize>,
    pub resonator_levels: usize,
    pub leakage_bound: f64,
    pub max_dim: usize,
}

impl TruncationSpec {
    pub fn two_mode(levels: usize) -> Self {
        TruncationSpec {
            squid_levels: None,
            resonator_levels: levels,
            leakage_bound: DEFAULT_LEAKAGE_BOUND,
            max_dim: DEFAULT_MAX_DIM,
        }
    }

    pub fn three_mode(squid_levels: usize, resonator_levels: usize) -> Self {
        TruncationSpec {
            squid_levels: Some(squid_levels),
            ..Self::two_mode(resonator_levels)
        }
    }

    pub fn space(&self) -> Result<(FockSpace, ModeMap)> {
        let levels: Vec<usize> = self
            .squid_levels
            .into_iter()
            .chain([self.resonator_levels, self.resonator_levels])
            .collect();
        if levels.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter {
                field: "levels",
                reason: "every mode needs at least 2 levels".to_string(),
            });
        }
        let space = FockSpace::new(&levels);
        if space.dim() > self.max_dim {
            return Err(Error::DimensionOverflow {
                dim: space.dim(),
                limit: self.max_dim,
            });
        }
        let map = if self.squid_levels.is_some() {
            ModeMap::THREE_MODE
        } else {
            ModeMap::TWO_MODE
        };
        Ok((space, map))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateRepr {
    Pure(Vec<Complex64>),
    /// column-major density matrix
    Mixed(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    pub space: FockSpace,
    pub map: ModeMap,
    pub repr: StateRepr,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateChecks {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl StateChecks {
    pub fn ok(&self) -> bool {
        self.trace_error <= 1e-10 && self.hermiticity_error <= 1e-12 && self.min_eigenvalue >= -1e-10
    }
}

fn coherent_amplitudes(beta: Complex64, levels: usize) -> Vec<Complex64> {
    let mut amp = Vec::with_capacity(levels);
    let mut c = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for n in 0..levels {
        amp.push(c);
        c = c * beta / ((n + 1) as f64).sqrt();
    }
    amp
}

impl TruncatedState {
    /// Product of single-mode kets, one per tensor factor.
    fn product(space: FockSpace, map: ModeMap, factors: &[Vec<Complex64>]) -> Self {
        let dim = space.dim();
        let mut psi: Vec<Complex64> = (0..dim)
            .map(|i| {
                factors
                    .iter()
                    .enumerate()
                    .map(|(m, f)| f[space.occupation(i, m)])
                    .product()
            })
            .collect();
        let norm = psi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|v| *v /= norm);
        TruncatedState {
            space,
            map,
            repr: StateRepr::Pure(psi),
        }
    }

    pub fn fock(spec: &TruncationSpec, occupations: &[usize]) -> Result<Self> {
        let (space, map) = spec.space()?;
        if occupations.len() != space.modes() || occupations.iter().zip(space.dims()).any(|(n, d)| n >= d) {
            return Err(Error::InvalidParameter {
                field: "occupations",
                reason: format!("{occupations:?} does not fit truncation {:?}", space.dims()),
            });
        }
        let mut psi = vec![ZERO; space.dim()];
        psi[space.index(occupations)] = ONE;
        Ok(TruncatedState {
            space,
            map,
            repr: StateRepr::Pure(psi),
        })
    }

    pub fn vacuum(spec: &TruncationSpec) -> Result<Self> {
        let (space, _) = spec.space()?;
        Self::fock(spec, &vec![0; space.modes()])
    }

    /// Product coherent state (renormalized after truncation). `beta_squid`
    /// is ignored for the two-mode space.
    pub fn coherent(spec: &TruncationSpec, beta_l: Complex64, beta_r: Complex64, beta_squid: Complex64) -> Result<Self> {
        let (space, map) = spec.space()?;
        let mut factors = Vec::new();
        if let Some(n) = spec.squid_levels {
            factors.push(coherent_amplitudes(beta_squid, n));
        }
        factors.push(coherent_amplitudes(beta_l, spec.resonator_levels));
        factors.push(coherent_amplitudes(beta_r, spec.resonator_levels));
        Ok(Self::product(space, map, &factors))
    }

    /// Diagonal product state with geometric occupation statistics of means
    /// `n_l`, `n_r` (SQUID mode in vacuum), renormalized after truncation.
    pub fn thermal(spec: &TruncationSpec, n_l: f64, n_r: f64) -> Result<Self> {
        let (space, map) = spec.space()?;
        let geometric = |nbar: f64, levels: usize| -> Vec<f64> {
            (0..levels)
                .map(|n| (nbar / (1.0 + nbar)).powi(n as i32) / (1.0 + nbar))
                .collect()
        };
        let pl = geometric(n_l, spec.resonator_levels);
        let pr = geometric(n_r, spec.resonator_levels);
        let dim = space.dim();
        let mut rho = vec![ZERO; dim * dim];
        let mut total = 0.0;
        for i in 0..dim {
            let occ = space.occupations(i);
            if map.squid.is_some_and(|s| occ[s] != 0) {
                continue;
            }
            let p = pl[occ[map.left]] * pr[occ[map.right]];
            rho[i * dim + i] = Complex64::new(p, 0.0);
            total += p;
        }
        rho.iter_mut().for_each(|v| *v /= total);
        Ok(TruncatedState {
            space,
            map,
            repr: StateRepr::Mixed(rho),
        })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, StateRepr::Pure(_))
    }

    pub fn to_mixed(&self) -> TruncatedState {
        match &self.repr {
            StateRepr::Mixed(_) => self.clone(),
            StateRepr::Pure(psi) => {
                let n = psi.len();
                let mut rho = vec![ZERO; n * n];
                for j in 0..n {
                    for i in 0..n {
                        rho[j * n + i] = psi[i] * psi[j].conj();
                    }
                }
                TruncatedState {
                    repr: StateRepr::Mixed(rho),
                    ..self.clone()
                }
            }
        }
    }

    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        match &self.to_mixed().repr {
            StateRepr::Mixed(rho) => DMatrix::from_column_slice(self.dim(), self.dim(), rho),
            StateRepr::Pure(_) => unreachable!(),
        }
    }

    /// Basis-state populations.
    pub fn populations(&self) -> Vec<f64> {
        match &self.repr {
            StateRepr::Pure(psi) => psi.iter().map(|v| v.norm_sqr()).collect(),
            StateRepr::Mixed(rho) => {
                let n = self.dim();
                (0..n).map(|i| rho[i * n + i].re).collect()
            }
        }
    }

    /// Largest population held in the top two levels of any mode.
    pub fn leakage(&self) -> f64 {
        let pops = self.populations();
        (0..self.space.modes())
            .map(|m| {
                let top = self.space.dims()[m];
                pops.iter()
                    .enumerate()
                    .filter(|(i, _)| self.space.occupation(*i, m) + 2 >= top)
                    .map(|(_, p)| p)
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn checks(&self) -> StateChecks {
        match &self.repr {
            StateRepr::Pure(psi) => StateChecks {
                trace_error: (psi.iter().map(|v| v.norm_sqr()).sum::<f64>() - 1.0).abs(),
                hermiticity_error: 0.0,
                min_eigenvalue: 0.0,
            },
            StateRepr::Mixed(rho) => {
                let n = self.dim();
                let trace: Complex64 = (0..n).map(|i| rho[i * n + i]).sum();
                let mut herm: f64 = 0.0;
                for j in 0..n {
                    for i in 0..=j {
                        herm = herm.max((rho[j * n + i] - rho[i * n + j].conj()).norm());
                    }
                }
                let m = DMatrix::from_column_slice(n, n, rho);
                let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
                let min_eig = SymmetricEigen::new(sym).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
                StateChecks {
                    trace_error: (trace - ONE).norm(),
                    hermiticity_error: herm,
                    min_eigenvalue: min_eig,
                }
            }
        }
    }

    pub fn expectation(&self, op: &SparseOp) -> Complex64 {
        match &self.repr {
            StateRepr::Pure(psi) => op.expectation_pure(psi),
            StateRepr::Mixed(rho) => op.expectation_mixed(rho),
        }
    }
}

/// Hamiltonian terms plus loss rates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorSpec {
    pub label: String,
    pub terms: Vec<(OperatorSignature, Complex64)>,
    pub kappa_l: f64,
    pub kappa_r: f64,
}

impl GeneratorSpec {
    pub fn new(label: impl Into<String>, terms: Vec<(OperatorSignature, Complex64)>) -> Self {
        GeneratorSpec {
            label: label.into(),
            terms,
            kappa_l: 0.0,
            kappa_r: 0.0,
        }
    }

    /// G (e^{iφ} b_L b_R + e^{−iφ} b_L† b_R†) with G = |α|η.
    pub fn classical_drive(coupling: f64, phi_drive: f64) -> Self {
        Self::new(
            "V_I",
            vec![
                (OperatorSignature::new([0, 0, 1, 0, 1, 0]), Complex64::from_polar(coupling, phi_drive)),
                (OperatorSignature::new([0, 0, 0, 1, 0, 1]), Complex64::from_polar(coupling, -phi_drive)),
            ],
        )
    }

    /// J (b_R† b_L + b_L† b_R).
    pub fn beam_splitter(coupling: f64) -> Self {
        let j = Complex64::new(coupling, 0.0);
        Self::new(
            "beam splitter",
            vec![
                (OperatorSignature::new([0, 0, 1, 0, 0, 1]), j),
                (OperatorSignature::new([0, 0, 0, 1, 1, 0]), j),
            ],
        )
    }

    pub fn from_polynomial(label: impl Into<String>, poly: &Polynomial, values: &SymbolValues) -> Self {
        let terms = poly
            .evaluate(values)
            .into_iter()
            .filter(|(_, v)| *v != 0.0)
            .map(|(op, v)| (op, Complex64::new(v, 0.0)))
            .collect();
        Self::new(label, terms)
    }

    /// Adds Ω a†a + ω_L b_L†b_L + ω_R b_R†b_R (the SQUID term only when
    /// `with_squid`).
    pub fn with_free(mut self, freqs: &ModeFrequencies, with_squid: bool) -> Self {
        if with_squid {
            self.terms.push((OperatorSignature::new([1, 1, 0, 0, 0, 0]), Complex64::new(freqs.omega, 0.0)));
        }
        self.terms.push((OperatorSignature::new([0, 0, 1, 1, 0, 0]), Complex64::new(freqs.omega_l, 0.0)));
        self.terms.push((OperatorSignature::new([0, 0, 0, 0, 1, 1]), Complex64::new(freqs.omega_r, 0.0)));
        self.label.push_str(" + H_0");
        self
    }

    pub fn with_losses(mut self, kappa_l: f64, kappa_r: f64) -> Self {
        self.kappa_l = kappa_l;
        self.kappa_r = kappa_r;
        self
    }
}

/// Matrix form of a generator on a fixed truncation; immutable once built.
#[derive(Debug, Clone)]
pub struct Generator {
    pub space: FockSpace,
    pub map: ModeMap,
    pub hamiltonian: SparseOp,
    /// H − (i/2) Σ κ_i b_i†b_i
    pub effective: SparseOp,
    pub jumps: Vec<(f64, SparseOp)>,
    pub label: String,
}

pub fn build_generator(spec: &GeneratorSpec, trunc: &TruncationSpec) -> Result<Generator> {
    let (space, map) = trunc.space()?;
    for (field, k) in [("kappa_L", spec.kappa_l), ("kappa_R", spec.kappa_r)] {
        if !(k >= 0.0) {
            return Err(Error::InvalidParameter {
                field,
                reason: format!("loss rate must be non-negative, got {k}"),
            });
        }
    }
    let h = operator_from_terms(&space, map, &spec.terms)?;
    let defect = h.hermiticity_defect();
    if defect > 1e-12 * h.max_abs().max(1.0) {
        return Err(Error::InvalidParameter {
            field: "terms",
            reason: format!("Hamiltonian is not Hermitian (defect {defect:e})"),
        });
    }
    let mut effective = h.clone();
    let mut jumps = Vec::new();
    for (kappa, slot) in [(spec.kappa_l, map.left), (spec.kappa_r, map.right)] {
        if kappa > 0.0 {
            let b = annihilation(&space, slot);
            effective = effective.add(&number(&space, slot).scaled(Complex64::new(0.0, -0.5 * kappa)));
            jumps.push((kappa, b));
        }
    }
    Ok(Generator {
        space,
        map,
        hamiltonian: h,
        effective,
        jumps,
        label: spec.label.clone(),
    })
}

impl Generator {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_lossless(&self) -> bool {
        self.jumps.is_empty()
    }

    /// dψ/dt = −iHψ
    pub fn apply_pure(&self, psi: &[Complex64], out: &mut [Complex64]) {
        self.hamiltonian.apply(psi, out);
        out.iter_mut().for_each(|v| *v *= -Complex64::i());
    }

    /// dρ/dt for the Hermitian part of the column-major ρ. `scratch` holds
    /// two matrices of ρ's size. The anti-Hermitian part is held fixed so
    /// that round-off cannot grow along it.
    pub fn apply_mixed(&self, rho: &[Complex64], out: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = self.dim();
        let (herm, prod) = scratch.split_at_mut(n * n);
        for j in 0..n {
            for i in 0..n {
                herm[j * n + i] = 0.5 * (rho[j * n + i] + rho[i * n + j].conj());
            }
        }
        // A = H_eff ρ ; dρ = −iA + (−iA)† + Σ κ L ρ L†
        self.effective.left_mul_dense(herm, prod);
        for j in 0..n {
            for i in 0..n {
                out[j * n + i] = -Complex64::i() * prod[j * n + i] + Complex64::i() * prod[i * n + j].conj();
            }
        }
        for (kappa, l) in &self.jumps {
            // L ρ L† = L (L ρ)†
            l.left_mul_dense(herm, prod);
            l.add_mul_adjoint_dense(prod, *kappa, out);
        }
    }

    /// Column-stacked Liouvillian: vec(AρB) = (Bᵀ ⊗ A) vec ρ.
    pub fn dense_liouvillian(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let heff = self.effective.to_dense();
        let id = DMatrix::<Complex64>::identity(n, n);
        let mut l = id.kronecker(&heff) * (-Complex64::i()) + heff.conjugate().kronecker(&id) * Complex64::i();
        for (kappa, jump) in &self.jumps {
            let j = jump.to_dense();
            l += j.conjugate().kronecker(&j) * Complex64::new(*kappa, 0.0);
        }
        l
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EvolveMethod {
    /// Dense exponential when the Liouvillian is small, integration otherwise.
    Auto,
    Integrate,
    DenseExponential,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrustReport {
    pub leakage: f64,
    pub leakage_bound: f64,
    pub checks: StateChecks,
    pub trusted: bool,
    pub reasons: Vec<String>,
}

pub fn trust_report(state: &TruncatedState, leakage_bound: f64) -> TrustReport {
    let leakage = state.leakage();
    let checks = state.checks();
    let mut reasons = Vec::new();
    if leakage > leakage_bound {
        reasons.push(format!("leakage {leakage:e} exceeds bound {leakage_bound:e}"));
    }
    if checks.trace_error > 1e-10 {
        reasons.push(format!("trace error {:e}", checks.trace_error));
    }
    if checks.hermiticity_error > 1e-12 {
        reasons.push(format!("hermiticity error {:e}", checks.hermiticity_error));
    }
    if checks.min_eigenvalue < -1e-10 {
        reasons.push(format!("negative eigenvalue {:e}", checks.min_eigenvalue));
    }
    TrustReport {
        leakage,
        leakage_bound,
        checks,
        trusted: reasons.is_empty(),
        reasons,
    }
}

fn oracle_tolerances() -> Tolerances {
    Tolerances {
        rtol: 1e-11,
        atol: 1e-13,
        ..Tolerances::default()
    }
}

fn check_compatible(state: &TruncatedState, gen: &Generator) -> Result<()> {
    if state.space != gen.space || state.map != gen.map {
        return Err(Error::InvalidParameter {
            field: "state",
            reason: "state and generator use different truncations".to_string(),
        });
    }
    Ok(())
}

fn hermitize(rho: &mut [Complex64], n: usize) {
    for j in 0..n {
        for i in 0..j {
            let avg = 0.5 * (rho[j * n + i] + rho[i * n + j].conj());
            rho[j * n + i] = avg;
            rho[i * n + j] = avg.conj();
        }
        rho[j * n + j] = Complex64::new(rho[j * n + j].re, 0.0);
    }
}

/// Evolves `state` for time `t` and reports trust diagnostics. Pure states
/// stay pure under lossless generators unless the dense path is requested.
pub fn evolve(
    state: &TruncatedState,
    gen: &Generator,
    t: f64,
    method: EvolveMethod,
    leakage_bound: f64,
) -> Result<(TruncatedState, TrustReport)> {
    check_compatible(state, gen)?;
    let start = trust_report(state, leakage_bound);
    if start.leakage > leakage_bound {
        return Err(Error::OutOfRegime(format!("initial state untrusted: {}", start.reasons.join("; "))));
    }
    let n = gen.dim();
    let dense = match method {
        EvolveMethod::DenseExponential => true,
        EvolveMethod::Integrate => false,
        EvolveMethod::Auto => n * n <= DENSE_LIOUVILLIAN_LIMIT && !(state.is_pure() && gen.is_lossless()),
    };
    let out = if dense {
        let mixed = state.to_mixed();
        let StateRepr::Mixed(rho) = &mixed.repr else { unreachable!() };
        let prop = (gen.dense_liouvillian() * Complex64::new(t, 0.0)).exp();
        let mut v = (prop * DVector::from_column_slice(rho)).as_slice().to_vec();
        hermitize(&mut v, n);
        TruncatedState {
            repr: StateRepr::Mixed(v),
            ..mixed
        }
    } else if state.is_pure() && gen.is_lossless() {
        let StateRepr::Pure(psi) = &state.repr else { unreachable!() };
        let mut y = psi.clone();
        let mut solver = Dopri5::new(n, oracle_tolerances(), |_t, x: &[Complex64], dx: &mut [Complex64]| {
            gen.apply_pure(x, dx)
        });
        solver.integrate(0.0, t, &mut y)?;
        TruncatedState {
            repr: StateRepr::Pure(y),
            ..state.clone()
        }
    } else {
        let mixed = state.to_mixed();
        let StateRepr::Mixed(rho) = &mixed.repr else { unreachable!() };
        let sup = ReducedLiouvillian::new(gen, rho);
        let mut v = sup.gather(rho);
        let mut solver = Dopri5::new(sup.dim(), oracle_tolerances(), |_t, x: &[Complex64], dx: &mut [Complex64]| {
            sup.apply(x, dx)
        });
        solver.integrate(0.0, t, &mut v)?;
        let mut y = sup.scatter(&v);
        hermitize(&mut y, n);
        TruncatedState {
            repr: StateRepr::Mixed(y),
            ..mixed
        }
    };
    let report = trust_report(&out, leakage_bound);
    Ok((out, report))
}

#[derive(Debug, Clone, Copy)]
pub struct SteadyOptions {
    /// stop when ‖dρ/dt‖ ≤ derivative_tol · (‖ρ‖ + 1)
    pub derivative_tol: f64,
    /// time between convergence checks
    pub check_interval: f64,
    pub max_time: f64,
    pub tol: Tolerances,
    pub leakage_bound: f64,
}

impl SteadyOptions {
    /// Defaults scaled to the loss rates of `gen`.
    pub fn for_generator(gen: &Generator) -> Self {
        let kmin = gen.jumps.iter().map(|(k, _)| *k).fold(f64::INFINITY, f64::min);
        let kmax = gen.jumps.iter().map(|(k, _)| *k).fold(0.0, f64::max);
        SteadyOptions {
            derivative_tol: 1e-9 * kmax,
            check_interval: 2.0 / kmax,
            max_time: 1e4 / kmin,
            tol: Tolerances {
                rtol: 1e-9,
                atol: 1e-12,
                ..Tolerances::default()
            },
            leakage_bound: DEFAULT_LEAKAGE_BOUND,
        }
    }
}

/// Integrates the master equation until ρ stops changing.
pub fn evolve_to_steady(
    state: &TruncatedState,
    gen: &Generator,
    opts: SteadyOptions,
) -> Result<(TruncatedState, f64, TrustReport)> {
    check_compatible(state, gen)?;
    if gen.is_lossless() {
        return Err(Error::InvalidParameter {
            field: "generator",
            reason: "a steady state needs at least one loss channel".to_string(),
        });
    }
    let n = gen.dim();
    let mixed = state.to_mixed();
    let StateRepr::Mixed(rho) = &mixed.repr else { unreachable!() };
    let sup = ReducedLiouvillian::new(gen, rho);
    let mut y = sup.gather(rho);
    let mut solver = Dopri5::new(sup.dim(), opts.tol, |_t, x: &[Complex64], dx: &mut [Complex64]| {
        sup.apply(x, dx)
    });
    let mut t = 0.0;
    loop {
        solver.integrate(t, t + opts.check_interval, &mut y)?;
        t += opts.check_interval;
        let d = solver.last_derivative().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let norm = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if d <= opts.derivative_tol * (norm + 1.0) {
            break;
        }
        if t > opts.max_time {
            return Err(Error::Integration {
                t,
                reason: format!("master equation not stationary (derivative norm {d:e})"),
            });
        }
    }
    let mut y = sup.scatter(&y);
    hermitize(&mut y, n);
    let out = TruncatedState {
        repr: StateRepr::Mixed(y),
        ..mixed
    };
    let report = trust_report(&out, opts.leakage_bound);
    Ok((out, t, report))
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasuredMoments {
    pub moments: MomentState,
    #[serde(rename = "var_XT")]
    pub var_xt: f64,
    #[serde(rename = "n_L")]
    pub n_l: f64,
    #[serde(rename = "n_R")]
    pub n_r: f64,
    /// SQUID occupation, three-mode spaces only
    #[serde(rename = "n_a")]
    pub n_a: Option<f64>,
}

fn op(state: &TruncatedState, powers: [u8; 6]) -> SparseOp {
    operator_from_terms(&state.space, state.map, &[(OperatorSignature::new(powers), ONE)])
        .expect("resonator operator on a valid truncation")
}

/// Resonator moments of `state`, with L2 = 2⟨n_L⟩ + 1 and R2 = 2⟨n_R⟩ + 1.
pub fn measure_moments(state: &TruncatedState, zp: &ZeroPoint) -> MeasuredMoments {
    let e = |p: [u8; 6]| state.expectation(&op(state, p));
    let b_l = e([0, 0, 1, 0, 0, 0]);
    let b_r = e([0, 0, 0, 0, 1, 0]);
    let l1 = e([0, 0, 2, 0, 0, 0]);
    let r1 = e([0, 0, 0, 0, 2, 0]);
    let n_l = e([0, 0, 1, 1, 0, 0]).re;
    let n_r = e([0, 0, 0, 0, 1, 1]).re;
    let lr = e([0, 0, 1, 0, 1, 0]);
    let l_rd = e([0, 0, 1, 0, 0, 1]);
    let moments = MomentState {
        b_l,
        b_r,
        l1,
        l2: Complex64::new(2.0 * n_l + 1.0, 0.0),
        l3: l1.conj(),
        r1,
        r2: Complex64::new(2.0 * n_r + 1.0, 0.0),
        r3: r1.conj(),
        c1: 2.0 * lr,
        c2: 2.0 * l_rd,
        c3: 2.0 * l_rd.conj(),
        c4: 2.0 * lr.conj(),
    };
    let n_a = state.map.squid.map(|_| e([1, 1, 0, 0, 0, 0]).re);
    MeasuredMoments {
        var_xt: moments.collective_position_variance(zp),
        moments,
        n_l,
        n_r,
        n_a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dimension_guard() {
        let mut spec = TruncationSpec::three_mode(30, 30);
        assert!(matches!(spec.space(), Err(Error::DimensionOverflow { .. })));
        spec.max_dim = 30_000;
        assert!(spec.space().is_ok());
        assert!(TruncationSpec::two_mode(1).space().is_err());
    }

    #[test]
    fn vacuum_moments() {
        let spec = TruncationSpec::two_mode(4);
        let s = TruncatedState::vacuum(&spec).unwrap();
        let m = measure_moments(&s, &ZeroPoint { delta_l: 1.5, delta_r: 0.5 });
        assert_eq!(m.moments, MomentState::vacuum());
        assert_relative_eq!(m.var_xt, 2.5);
        assert!(s.checks().ok());
    }

    #[test]
    fn single_excitation_moments() {
        let spec = TruncationSpec::two_mode(4);
        let s = TruncatedState::fock(&spec, &[0, 1]).unwrap();
        let m = measure_moments(&s, &ZeroPoint { delta_l: 2.0, delta_r: 1.0 });
        assert_relative_eq!(m.moments.r2.re, 3.0);
        assert_relative_eq!(m.var_xt, 4.0 + 3.0);
    }

    #[test]
    fn coherent_state_first_moment() {
        let spec = TruncationSpec::two_mode(25);
        let beta = Complex64::new(0.6, -0.8);
        let s = TruncatedState::coherent(&spec, beta, ZERO, ZERO).unwrap();
        let m = measure_moments(&s, &ZeroPoint::UNIT);
        assert!((m.moments.b_l - beta).norm() < 1e-12);
        assert_relative_eq!(m.n_l, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_generator_is_identity() {
        let spec = TruncationSpec::two_mode(4);
        let gen = build_generator(&GeneratorSpec::classical_drive(0.0, 0.3), &spec).unwrap();
        let s = TruncatedState::coherent(&spec, Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.1), ZERO).unwrap();
        let (out, _) = evolve(&s, &gen, 2.0, EvolveMethod::Integrate, 1.0).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn drive_spectrum_on_pair_chain() {
        // |00⟩, |11⟩, |22⟩ chain: off-diagonals G, 2G → eigenvalues 0, ±√5 G
        let spec = TruncationSpec::two_mode(3);
        let g = 0.7;
        let gen = build_generator(&GeneratorSpec::classical_drive(g, 0.0), &spec).unwrap();
        let h = gen.hamiltonian.to_dense();
        let idx: Vec<usize> = (0..3).map(|n| gen.space.index(&[n, n])).collect();
        let chain = DMatrix::from_fn(3, 3, |r, c| h[(idx[r], idx[c])]);
        let mut e: Vec<f64> = SymmetricEigen::new(chain).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        let s5 = 5f64.sqrt() * g;
        for (a, b) in e.iter().zip([-s5, 0.0, s5]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn liouvillian_is_trace_preserving() {
        let spec = TruncationSpec::two_mode(3);
        let gen = build_generator(&GeneratorSpec::classical_drive(0.4, -1.0).with_losses(1.0, 2.0), &spec).unwrap();
        let n = gen.dim();
        // Hermitian, unit trace
        let mut m = DMatrix::<Complex64>::from_fn(n, n, |r, c| Complex64::new((r * 7 + c * 3) as f64 % 5.0, (r as f64 - c as f64) * 0.1));
        m = &m + m.adjoint() + DMatrix::identity(n, n);
        let tr: Complex64 = m.trace();
        m /= tr;
        let mut out = vec![ZERO; n * n];
        let mut scratch = vec![ZERO; 2 * n * n];
        gen.apply_mixed(m.as_slice(), &mut out, &mut scratch);
        let trace: Complex64 = (0..n).map(|i| out[i * n + i]).sum();
        assert!(trace.norm() < 1e-12, "{trace}");
        let dense = gen.dense_liouvillian() * DVector::from_column_slice(m.as_slice());
        assert!(dense.iter().zip(&out).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn dense_and_integrated_paths_agree() {
        let spec = TruncationSpec {
            leakage_bound: 1.0,
            ..TruncationSpec::two_mode(4)
        };
        let gen = build_generator(&GeneratorSpec::classical_drive(-0.2, -std::f64::consts::FRAC_PI_2).with_losses(1.0, 1.5), &spec).unwrap();
        let s = TruncatedState::vacuum(&spec).unwrap();
        let (a, _) = evolve(&s, &gen, 1.3, EvolveMethod::DenseExponential, 1.0).unwrap();
        let (b, _) = evolve(&s, &gen, 1.3, EvolveMethod::Integrate, 1.0).unwrap();
        let (StateRepr::Mixed(x), StateRepr::Mixed(y)) = (&a.repr, &b.repr) else { panic!() };
        let diff = x.iter().zip(y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-8, "{diff:e}");
    }

    #[test]
    fn leakage_flags_untrusted() {
        let spec = TruncationSpec::two_mode(4);
        let s = TruncatedState::fock(&spec, &[3, 0]).unwrap();
        let rep = trust_report(&s, 1e-6);
        assert!(!rep.trusted);
        let gen = build_generator(&GeneratorSpec::classical_drive(0.1, 0.0), &spec).unwrap();
        assert!(evolve(&s, &gen, 1.0, EvolveMethod::Auto, 1e-6).is_err());
    }
}
