//! Report-style experiments run on the truncated space.

use num_complex::Complex64;
use serde::Serialize;

use super::{
    build_generator, evolve, measure_moments, operator_from_terms, trust_report, EvolveMethod, GeneratorSpec,
    SparseOp, StateRepr, TruncatedState, TruncationSpec,
};
use crate::device::ZeroPoint;
use crate::error::{Error, Result};
use crate::ode::{Dopri5, Tolerances};
use crate::rwa::{
    enumerate_with, interaction_expansion, select_resonant, symbolic_rows, three_wave_polynomial, FrequencyCombo,
    ModeFrequencies, OperatorSignature, Polynomial, SymbolValues,
};

#[derive(Debug, Clone, Serialize)]
pub struct IdealOracleReport {
    pub gamma: f64,
    pub phi_drive: f64,
    pub levels: usize,
    /// ⟨ΔX_T²⟩ / δ_X²
    pub var_ratio: f64,
    /// ΔX_T ΔP_T / (δ_X ζ_P)
    pub normalized_product: f64,
    pub leakage: f64,
    pub trusted: bool,
}

/// Two-mode vacuum propagated under the classical-drive Hamiltonian to
/// squeeze parameter `gamma`.
pub fn ideal_squeezing(levels: usize, gamma: f64, phi_drive: f64, zp: &ZeroPoint) -> Result<IdealOracleReport> {
    let spec = TruncationSpec::two_mode(levels);
    let vacuum = TruncatedState::vacuum(&spec)?;
    let gen = build_generator(&GeneratorSpec::classical_drive(gamma, phi_drive), &spec)?;
    let (state, trust) = if gamma == 0.0 {
        let t = trust_report(&vacuum, spec.leakage_bound);
        (vacuum, t)
    } else {
        evolve(&vacuum, &gen, 1.0, EvolveMethod::Integrate, spec.leakage_bound)?
    };
    let m = measure_moments(&state, zp);
    let (zeta_l, zeta_r) = (0.5 / zp.delta_l, 0.5 / zp.delta_r);
    let var_pt = m.moments.collective_momentum_variance(zeta_l, zeta_r);
    let delta_x = zp.collective_vacuum_variance().sqrt();
    Ok(IdealOracleReport {
        gamma,
        phi_drive,
        levels,
        var_ratio: m.var_xt / (delta_x * delta_x),
        normalized_product: (m.var_xt * var_pt).sqrt() / (delta_x * zeta_l.hypot(zeta_r)),
        leakage: trust.leakage,
        trusted: trust.trusted,
    })
}

/// Slope of ln ΔX_T(t) from a least-squares fit of ln var(t) = a + 2 r t.
pub fn squeeze_rate(times: &[f64], variances: &[f64]) -> f64 {
    let n = times.len() as f64;
    let ys: Vec<f64> = variances.iter().map(|v| v.ln()).collect();
    let tm = times.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, y) in times.iter().zip(&ys) {
        sxy += (t - tm) * (y - ym);
        sxx += (t - tm) * (t - tm);
    }
    0.5 * sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct BellOutcome {
    pub hamiltonian: String,
    /// (n_L, n_R, population), largest first
    pub populations: Vec<(usize, usize, f64)>,
    /// population of span{|01⟩, |10⟩}
    pub single_excitation_weight: f64,
    pub leakage: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BellProbeReport {
    pub coupling: f64,
    pub time: f64,
    pub levels: usize,
    pub classical_drive: BellOutcome,
    pub beam_splitter: BellOutcome,
}

fn bell_outcome(spec: &TruncationSpec, gen_spec: GeneratorSpec, t: f64) -> Result<BellOutcome> {
    let start = TruncatedState::fock(spec, &[0, 1])?;
    let gen = build_generator(&gen_spec, spec)?;
    let (state, trust) = evolve(&start, &gen, t, EvolveMethod::Integrate, 1.0)?;
    let pops = state.populations();
    let mut listed: Vec<(usize, usize, f64)> = pops
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 1e-6)
        .map(|(i, p)| (state.space.occupation(i, 0), state.space.occupation(i, 1), *p))
        .collect();
    listed.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    listed.truncate(8);
    let single = pops[state.space.index(&[0, 1])] + pops[state.space.index(&[1, 0])];
    Ok(BellOutcome {
        hamiltonian: gen.label,
        populations: listed,
        single_excitation_weight: single,
        leakage: trust.leakage,
    })
}

/// Evolves |0⟩_L|1⟩_R under the classical-drive Hamiltonian and under a
/// beam-splitter exchange of the same strength, and reports where the
/// population goes.
pub fn bell_probe(levels: usize, coupling: f64, t: f64) -> Result<BellProbeReport> {
    let spec = TruncationSpec::two_mode(levels);
    Ok(BellProbeReport {
        coupling,
        time: t,
        levels,
        classical_drive: bell_outcome(&spec, GeneratorSpec::classical_drive(coupling, -std::f64::consts::FRAC_PI_2), t)?,
        beam_splitter: bell_outcome(&spec, GeneratorSpec::beam_splitter(coupling), t)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FrequencyAuditEntry {
    pub index: usize,
    pub frequency_expr: String,
    pub frequency_value: f64,
    /// ‖[H_0, T] + f T‖ / ‖T‖ for the row operator T
    pub residual: f64,
    /// same for T†, which rotates at −f
    pub conjugate_residual: f64,
}

fn commutator_residual(h0: &SparseOp, t: &SparseOp, f: f64) -> f64 {
    let minus = Complex64::new(-1.0, 0.0);
    let comm = h0.matmul(t).add(&t.matmul(h0).scaled(minus));
    comm.add(&t.scaled(Complex64::new(f, 0.0))).frobenius() / t.frobenius()
}

/// Checks every catalogued row against H_0 on a small three-mode space.
pub fn frequency_audit(levels: usize, freqs: &ModeFrequencies) -> Result<Vec<FrequencyAuditEntry>> {
    let spec = TruncationSpec::three_mode(levels, levels);
    let (space, map) = spec.space()?;
    let h0_terms = GeneratorSpec::new("H_0", vec![]).with_free(freqs, true).terms;
    let h0 = operator_from_terms(&space, map, &h0_terms)?;
    let one = Complex64::new(1.0, 0.0);
    symbolic_rows()
        .into_iter()
        .map(|row| {
            let terms: Vec<(OperatorSignature, Complex64)> = row.components.iter().map(|c| (c.operators, one)).collect();
            let conj: Vec<(OperatorSignature, Complex64)> =
                row.components.iter().map(|c| (c.operators.conjugate(), one)).collect();
            let t = operator_from_terms(&space, map, &terms)?;
            let td = operator_from_terms(&space, map, &conj)?;
            let f = row.frequency.value(freqs.omega, freqs.omega_l, freqs.omega_r);
            Ok(FrequencyAuditEntry {
                index: row.index,
                frequency_expr: row.frequency_expr(),
                frequency_value: f,
                residual: commutator_residual(&h0, &t, f),
                conjugate_residual: commutator_residual(&h0, &td, -f),
            })
        })
        .collect()
}

/// Settings of the rotating-wave comparison on the three-mode space.
#[derive(Debug, Clone, Serialize)]
pub struct RwaProbeConfig {
    pub values: SymbolValues,
    /// lab-frame Ω, ω_L, ω_R
    pub freqs: ModeFrequencies,
    /// real coherent amplitude of the SQUID mode at t = 0
    pub alpha: f64,
    pub squid_levels: usize,
    pub resonator_levels: usize,
    pub t_final: f64,
    pub samples: usize,
    /// rotating-wave selection width
    pub tol: f64,
}

impl RwaProbeConfig {
    /// Small incommensurate toy frequencies with the SQUID tuned to ω_L + ω_R.
    pub fn resonant_toy() -> Self {
        RwaProbeConfig {
            values: SymbolValues {
                c_1: 0.2,
                c_2: 0.02,
                g_l: 0.05,
                g_r: 0.05,
            },
            freqs: ModeFrequencies {
                omega: 1.0 + 3f64.sqrt() * 0.8,
                omega_l: 1.0,
                omega_r: 3f64.sqrt() * 0.8,
            },
            alpha: 1.5,
            squid_levels: 16,
            resonator_levels: 10,
            t_final: 300.0,
            samples: 7,
            tol: 0.02,
        }
    }

    /// Same as [`RwaProbeConfig::resonant_toy`] with Ω moved between the
    /// catalogued resonances.
    pub fn detuned_toy() -> Self {
        let mut c = Self::resonant_toy();
        c.freqs.omega = 1.3 * (c.freqs.omega_l + c.freqs.omega_r);
        c
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbeSample {
    pub t: f64,
    #[serde(rename = "n_L")]
    pub n_l: f64,
    #[serde(rename = "n_R")]
    pub n_r: f64,
    #[serde(rename = "n_a")]
    pub n_a: f64,
    /// |⟨b_L b_R⟩|
    pub pair_amplitude: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeTrajectory {
    pub hamiltonian: String,
    pub samples: Vec<ProbeSample>,
    /// max over observables of max_t |x − x_full| / max_t |x_full|
    pub deviation_from_full: f64,
    pub max_leakage: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RwaProbeReport {
    pub config: RwaProbeConfig,
    pub selected_rows: Vec<usize>,
    pub selection_warnings: Vec<String>,
    pub full: ProbeTrajectory,
    pub resonant_rows: ProbeTrajectory,
    pub three_wave: ProbeTrajectory,
    pub trusted: bool,
}

/// Interaction-picture evolution of a pure state: every term rotates as
/// e^{−i f t} with its table frequency f.
fn rotating_trajectory(
    spec: &TruncationSpec,
    label: &str,
    poly: &Polynomial,
    cfg: &RwaProbeConfig,
    start: &TruncatedState,
) -> Result<(ProbeTrajectory, Vec<[f64; 4]>)> {
    let (space, map) = spec.space()?;
    let mut groups: Vec<(f64, Vec<(OperatorSignature, Complex64)>)> = Vec::new();
    for (op, v) in poly.evaluate(&cfg.values) {
        if v == 0.0 {
            continue;
        }
        let f = FrequencyCombo::of(&op).value(cfg.freqs.omega, cfg.freqs.omega_l, cfg.freqs.omega_r);
        match groups.iter_mut().find(|(g, _)| (g - f).abs() <= 1e-12 * f.abs().max(1.0)) {
            Some((_, terms)) => terms.push((op, Complex64::new(v, 0.0))),
            None => groups.push((f, vec![(op, Complex64::new(v, 0.0))])),
        }
    }
    let ops: Vec<(f64, SparseOp)> = groups
        .iter()
        .map(|(f, terms)| Ok((*f, operator_from_terms(&space, map, terms)?)))
        .collect::<Result<_>>()?;
    let StateRepr::Pure(psi0) = &start.repr else {
        return Err(Error::InvalidParameter {
            field: "state",
            reason: "rotating-frame probe needs a pure state".to_string(),
        });
    };
    let dim = space.dim();
    let mut tmp = vec![Complex64::new(0.0, 0.0); dim];
    let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        dy.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (f, op) in &ops {
            op.apply(y, &mut tmp);
            let phase = Complex64::from_polar(1.0, -f * t) * -Complex64::i();
            for (d, x) in dy.iter_mut().zip(&tmp) {
                *d += phase * x;
            }
        }
    };
    let tol = Tolerances {
        rtol: 1e-9,
        atol: 1e-12,
        ..Tolerances::default()
    };
    let mut solver = Dopri5::new(dim, tol, rhs);
    let mut y = psi0.clone();
    let mut t = 0.0;
    let mut samples = Vec::new();
    let mut raw = Vec::new();
    let mut max_leakage: f64 = 0.0;
    let zp = ZeroPoint::UNIT;
    for k in 0..cfg.samples {
        let target = cfg.t_final * k as f64 / (cfg.samples - 1) as f64;
        solver.integrate(t, target, &mut y)?;
        t = target;
        let state = TruncatedState {
            space: space.clone(),
            map,
            repr: StateRepr::Pure(y.clone()),
        };
        max_leakage = max_leakage.max(state.leakage());
        let m = measure_moments(&state, &zp);
        let s = ProbeSample {
            t,
            n_l: m.n_l,
            n_r: m.n_r,
            n_a: m.n_a.unwrap_or(0.0),
            pair_amplitude: 0.5 * m.moments.c1.norm(),
        };
        raw.push([s.n_l, s.n_r, s.n_a, s.pair_amplitude]);
        samples.push(s);
    }
    Ok((
        ProbeTrajectory {
            hamiltonian: label.to_string(),
            samples,
            deviation_from_full: 0.0,
            max_leakage,
        },
        raw,
    ))
}

fn deviation(reference: &[[f64; 4]], other: &[[f64; 4]]) -> f64 {
    (0..4)
        .map(|k| {
            let scale = reference.iter().map(|r| r[k].abs()).fold(0.0, f64::max);
            let diff = reference.iter().zip(other).map(|(a, b)| (a[k] - b[k]).abs()).fold(0.0, f64::max);
            if scale > 0.0 {
                diff / scale
            } else {
                diff
            }
        })
        .fold(0.0, f64::max)
}

/// Compares the full interaction, the rotating-wave selected rows and the
/// three-wave Hamiltonian η(a†b_Lb_R + h.c.) on the same initial state
/// (resonators in vacuum, SQUID in a coherent state).
pub fn rwa_error_probe(cfg: &RwaProbeConfig) -> Result<RwaProbeReport> {
    if cfg.samples < 2 {
        return Err(Error::InvalidParameter {
            field: "samples",
            reason: "need at least two samples".to_string(),
        });
    }
    let spec = TruncationSpec::three_mode(cfg.squid_levels, cfg.resonator_levels);
    let zero = Complex64::new(0.0, 0.0);
    let start = TruncatedState::coherent(&spec, zero, zero, Complex64::new(cfg.alpha, 0.0))?;

    let terms = enumerate_with(&cfg.values, &cfg.freqs);
    let reduced = select_resonant(&terms, cfg.freqs.omega, cfg.freqs.omega_l, cfg.freqs.omega_r, cfg.tol)?;

    let (mut full, raw_full) = rotating_trajectory(&spec, "full interaction", &interaction_expansion(), cfg, &start)?;
    let (mut rows, raw_rows) = rotating_trajectory(&spec, "resonant rows", &reduced.polynomial(true), cfg, &start)?;
    let (mut wave, raw_wave) = rotating_trajectory(&spec, "three-wave", &three_wave_polynomial(), cfg, &start)?;
    full.deviation_from_full = 0.0;
    rows.deviation_from_full = deviation(&raw_full, &raw_rows);
    wave.deviation_from_full = deviation(&raw_full, &raw_wave);
    let trusted = [&full, &rows, &wave].iter().all(|t| t.max_leakage <= spec.leakage_bound);
    Ok(RwaProbeReport {
        config: cfg.clone(),
        selected_rows: reduced.indices(),
        selection_warnings: reduced.warnings,
        full,
        resonant_rows: rows,
        three_wave: wave,
        trusted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn squeeze_rate_of_exact_exponential() {
        let t = [0.0f64, 1.0, 2.0, 3.0];
        let v: Vec<f64> = t.iter().map(|x| 2.0 * (-0.6 * *x).exp()).collect();
        assert!((squeeze_rate(&t, &v) + 0.3).abs() < 1e-12);
    }

    #[test]
    fn halving_coupling_halves_rate() {
        let spec = TruncationSpec::two_mode(12);
        let vac = TruncatedState::vacuum(&spec).unwrap();
        let times = [0.2, 0.4, 0.6, 0.8];
        let rate = |g: f64| {
            let gen = build_generator(&GeneratorSpec::classical_drive(g, -FRAC_PI_2), &spec).unwrap();
            let vars: Vec<f64> = times
                .iter()
                .map(|&t| {
                    let (s, _) = evolve(&vac, &gen, t, EvolveMethod::Integrate, 1.0).unwrap();
                    measure_moments(&s, &ZeroPoint::UNIT).var_xt
                })
                .collect();
            squeeze_rate(&times, &vars)
        };
        let (r1, r2) = (rate(-0.5), rate(-0.25));
        assert!((r1 / r2 - 2.0).abs() < 1e-3, "{r1} {r2}");
        assert!((r1 + 0.5).abs() < 1e-3);
    }

    #[test]
    fn audit_rows_rotate_at_listed_frequencies() {
        let freqs = ModeFrequencies {
            omega: 2.9,
            omega_l: 1.0,
            omega_r: 1.37,
        };
        for e in frequency_audit(4, &freqs).unwrap() {
            assert!(e.residual <= 1e-10 && e.conjugate_residual <= 1e-10, "{e:?}");
        }
    }

    #[test]
    fn bell_probe_separates_hamiltonians() {
        let rep = bell_probe(8, 0.5, 1.0).unwrap();
        assert!((rep.beam_splitter.single_excitation_weight - 1.0).abs() < 1e-9);
        assert!(rep.classical_drive.single_excitation_weight < 0.9);
        // the drive conserves n_L − n_R, so |10⟩ is never reached
        assert!(rep.classical_drive.populations.iter().all(|&(l, r, _)| r == l + 1));
    }

    #[test]
    fn ideal_oracle_small_gamma() {
        let rep = ideal_squeezing(20, -0.2, -FRAC_PI_2, &ZeroPoint::UNIT).unwrap();
        assert!((rep.var_ratio - (-0.4f64).exp()).abs() < 1e-8);
        assert!((rep.normalized_product - 1.0).abs() < 1e-8);
        assert!(rep.trusted);
    }
}
