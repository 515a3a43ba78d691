use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sqnamr_core::device::{derive, feasibility, potential_scan, DerivedQuantities, PhysicalConfig};
use sqnamr_core::ideal::{collective_variance, BogoliubovMap};
use sqnamr_core::langevin::{
    closed_form_steady_state, relax_to_steady_state, variance_surface, DampingParams, RelaxOptions,
};
use sqnamr_core::moments::MomentState;
use sqnamr_core::oracle::probes::ideal_squeezing;
use sqnamr_core::oracle::{
    build_generator, evolve_to_steady, measure_moments, GeneratorSpec, SteadyOptions, TruncatedState,
    TruncationSpec,
};
use sqnamr_core::rwa::{default_tolerance, enumerate_terms, format_csv, format_table, select_resonant};
use sqnamr_core::Error;

use crate::manifest::{emit, json_with_manifest, sha256_hex, RunManifest};
use crate::{Cli, Command, Comparison, Format};

#[derive(Debug)]
pub enum Outcome {
    Ok,
    /// artifact written, but out of regime or untrusted
    Flagged,
}

impl Outcome {
    pub fn code(&self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Flagged => 1,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRegime(_) | Error::Integration { .. } | Error::DimensionOverflow { .. } => {
                CliError::Runtime(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("write failed: {e}"))
    }
}

type CmdResult = Result<Outcome, CliError>;

struct Context<'a> {
    cli: &'a Cli,
    config: PhysicalConfig,
    config_hash: String,
}

impl Context<'_> {
    fn manifest(&self, subcommand: &str) -> RunManifest {
        RunManifest {
            subcommand: subcommand.to_string(),
            config_path: self.cli.common.config.as_ref().map(|p| p.display().to_string()),
            config_hash: self.config_hash.clone(),
            output_dir: self.cli.common.out.as_ref().map(|p| p.display().to_string()),
            grid: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            seed: self.cli.common.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    fn format(&self, default: Format) -> Format {
        self.cli.common.format.unwrap_or(default)
    }

    fn out_dir(&self) -> Option<&Path> {
        self.cli.common.out.as_deref()
    }

    fn derived(&self) -> Result<DerivedQuantities, CliError> {
        Ok(derive(&self.config)?)
    }
}

fn load_config(cli: &Cli) -> Result<PhysicalConfig, CliError> {
    match &cli.common.config {
        None => Ok(PhysicalConfig::paper_preset()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
            Ok(PhysicalConfig::from_json_str(&text)?)
        }
    }
}

pub fn run(cli: &Cli) -> CmdResult {
    let config = load_config(cli)?;
    let canonical = serde_json::to_string(&config).expect("config serializes");
    let ctx = Context {
        cli,
        config,
        config_hash: sha256_hex(canonical.as_bytes()),
    };
    match &cli.command {
        Command::Params => params(&ctx),
        Command::Potential {
            phi_points,
            flux_points,
            bias_ratio,
        } => potential(&ctx, *phi_points, *flux_points, *bias_ratio),
        Command::Catalog => catalog(&ctx),
        Command::Ideal {
            gamma_min,
            gamma_max,
            t_max,
            points,
        } => ideal(&ctx, *gamma_min, *gamma_max, *t_max, *points),
        Command::Steady { xi, kappa_l, kappa_r } => steady(&ctx, *xi, *kappa_l, *kappa_r),
        Command::Sweep { min, max, points } => sweep(&ctx, *min, *max, *points),
        Command::Oracle {
            compare,
            levels,
            xi,
            kappa_l,
            kappa_r,
            gamma,
        } => oracle(&ctx, *compare, *levels, (*xi, *kappa_l, *kappa_r), *gamma),
    }
}

fn params(ctx: &Context) -> CmdResult {
    let report = feasibility(&ctx.config)?;
    let manifest = ctx.manifest("params");
    let body = match ctx.format(Format::Text) {
        Format::Json => json_with_manifest(&report, &manifest),
        Format::Csv => return Err(CliError::Input("params supports --format text or json".to_string())),
        Format::Text => {
            let d = &report.derived;
            let mut s = String::new();
            let _ = writeln!(s, "q_0            = {:.6} rad", d.q_0);
            let _ = writeln!(s, "E_J'           = {:.6e} rad/s", d.e_j_prime);
            let _ = writeln!(s, "Omega          = {:.6e} rad/s", d.omega_sq);
            let _ = writeln!(s, "Delta_U        = {:.6e} rad/s", d.delta_u);
            let _ = writeln!(s, "g_L, g_R       = {:.6e}, {:.6e}", d.g_l, d.g_r);
            let _ = writeln!(s, "c_1, c_2       = {:.6e}, {:.6e} rad/s", d.c_1, d.c_2);
            let _ = writeln!(s, "eta            = {:.6e} rad/s", d.eta);
            let _ = writeln!(s, "xi             = {:.6e} rad/s", d.xi);
            let _ = writeln!(s, "delta_L, delta_R = {:.6e}, {:.6e} m", d.delta_l, d.delta_r);
            let _ = writeln!(s, "delta_X        = {:.6e} m", d.delta_x);
            let _ = writeln!(s, "zeta_P         = {:.6e} kg m/s", d.zeta_p);
            for c in [&report.declared, &report.alternate] {
                let _ = writeln!(
                    s,
                    "[{}] N_max = {:.1} (within 2x of 150: {}), Phi_X/Phi_0 = {:.3e}",
                    c.convention, c.n_max, c.n_max_within_factor_two_of_150, c.flux_ratio
                );
            }
            let _ = writeln!(
                s,
                "resonance mismatch Omega - (omega_L + omega_R) = {:.6e} rad/s",
                report.resonance_mismatch
            );
            let _ = writeln!(
                s,
                "overdamped regime: left {}, right {}",
                report.regime_ok_left, report.regime_ok_right
            );
            for w in &report.warnings {
                let _ = writeln!(s, "warning: {w}");
            }
            for line in manifest.comment_block().lines() {
                let _ = writeln!(s, "{line}");
            }
            s
        }
    };
    let name = if ctx.format(Format::Text) == Format::Json { "params.json" } else { "params.txt" };
    emit(ctx.out_dir(), name, &body)?;
    Ok(if report.regime_ok() { Outcome::Ok } else { Outcome::Flagged })
}

fn potential(ctx: &Context, phi_points: usize, flux_points: usize, bias_ratio: Option<f64>) -> CmdResult {
    let mut config = ctx.config;
    if let Some(r) = bias_ratio {
        config.i_b = r * config.i_c;
        config.validate()?;
    }
    let samples = potential_scan(&config, phi_points, flux_points);
    let mut manifest = ctx.manifest("potential");
    manifest.grid.insert("phi".into(), format!("[-pi, 3pi] x {phi_points}"));
    manifest.grid.insert("phi_X_over_Phi0".into(), format!("[-0.1, 0.1] x {flux_points}"));
    manifest.grid.insert("I_b_over_I_c".into(), format!("{}", config.i_b / config.i_c));
    let body = match ctx.format(Format::Csv) {
        Format::Json => json_with_manifest(&samples, &manifest),
        _ => {
            let mut s = String::from("phi,phi_X_over_Phi0,U_over_EJ\n");
            for p in &samples {
                let _ = writeln!(s, "{},{},{}", p.phi, p.flux_ratio, p.u_over_ej);
            }
            s + &manifest.comment_block()
        }
    };
    let name = if ctx.format(Format::Csv) == Format::Json { "potential.json" } else { "potential.csv" };
    emit(ctx.out_dir(), name, &body)?;
    Ok(Outcome::Ok)
}

fn catalog(ctx: &Context) -> CmdResult {
    let d = ctx.derived()?;
    let c = &ctx.config;
    let terms = enumerate_terms(&d, c.omega_l, c.omega_r);
    let tol = ctx.cli.common.tol.unwrap_or(default_tolerance(c.kappa_l, c.kappa_r));
    let selection = select_resonant(&terms, d.omega_sq, c.omega_l, c.omega_r, tol)?;
    let mut manifest = ctx.manifest("catalog");
    manifest.tolerances.insert("rwa_width_rad_per_s".into(), tol);
    let (name, body) = match ctx.format(Format::Text) {
        Format::Csv => ("catalog.csv", format_csv(&terms) + &manifest.comment_block()),
        Format::Json => {
            #[derive(Serialize)]
            struct Report<'a> {
                terms: &'a [sqnamr_core::rwa::InteractionTerm],
                selected: Vec<usize>,
                selection_warnings: &'a [String],
            }
            let r = Report {
                terms: &terms,
                selected: selection.indices(),
                selection_warnings: &selection.warnings,
            };
            ("catalog.json", json_with_manifest(&r, &manifest))
        }
        Format::Text => {
            let mut s = format_table(&terms);
            let _ = writeln!(s, "\nkept under the rotating-wave rule: {:?}", selection.indices());
            for w in &selection.warnings {
                let _ = writeln!(s, "warning: {w}");
            }
            s.push_str(&manifest.comment_block());
            ("catalog.txt", s)
        }
    };
    emit(ctx.out_dir(), name, &body)?;
    Ok(Outcome::Ok)
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn ideal(ctx: &Context, gamma_min: Option<f64>, gamma_max: Option<f64>, t_max: Option<f64>, points: usize) -> CmdResult {
    let d = ctx.derived()?;
    let c = &ctx.config;
    let rate = c.alpha_mag * d.eta;
    let mut manifest = ctx.manifest("ideal");
    let rows: Vec<(f64, f64)> = if gamma_min.is_some() || gamma_max.is_some() {
        let (lo, hi) = (gamma_min.unwrap_or(-1.0), gamma_max.unwrap_or(0.0));
        manifest.grid.insert("gamma".into(), format!("[{lo}, {hi}] x {points}"));
        grid(lo, hi, points)
            .into_iter()
            .map(|g| (if rate != 0.0 { g / rate + 0.0 } else { f64::NAN }, g))
            .collect()
    } else {
        let t_end = match t_max {
            Some(t) => t,
            None if d.xi > 0.0 => 1.0 / d.xi,
            None => {
                return Err(CliError::Input(
                    "eta = 0 (no three-mode coupling); give --t-max or a gamma range".to_string(),
                ))
            }
        };
        manifest.grid.insert("t".into(), format!("[0, {t_end}] x {points}"));
        grid(0.0, t_end, points).into_iter().map(|t| (t, rate * t)).collect()
    };
    let mut s = String::from("t,gamma,var_XT_over_deltaX2,uncertainty_product\n");
    let mut warnings = Vec::new();
    for (t, g) in rows {
        let st = collective_variance(&BogoliubovMap::new(g, c.phi_drive), &d);
        warnings.extend(st.warnings.iter().cloned());
        let _ = writeln!(s, "{t},{g},{},{}", st.var_ratio, st.normalized_product);
    }
    warnings.dedup();
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    emit(ctx.out_dir(), "ideal.csv", &(s + &manifest.comment_block()))?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct SteadyReport {
    xi: f64,
    kappa_l: f64,
    kappa_r: f64,
    closed_form: sqnamr_core::langevin::SteadyStateResult,
    var_xt_over_delta_x2: f64,
    /// quarter-prefactor display form normalized the same way
    var_xt_quarter_prefactor_over_delta_x2: f64,
    moment_ode: MomentState,
    moment_ode_relative_gap: f64,
    relaxation_time: f64,
}

fn damping(ctx: &Context, xi: Option<f64>, kappa_l: Option<f64>, kappa_r: Option<f64>) -> Result<DampingParams, CliError> {
    let d = ctx.derived()?;
    Ok(DampingParams::new(
        xi.unwrap_or(d.xi),
        kappa_l.unwrap_or(ctx.config.kappa_l),
        kappa_r.unwrap_or(ctx.config.kappa_r),
    ))
}

fn relative_gap(a: &MomentState, b: &MomentState) -> f64 {
    a.to_array()
        .iter()
        .zip(b.to_array())
        .map(|(x, y)| (x - y).norm() / y.norm().max(1.0))
        .fold(0.0, f64::max)
}

fn steady(ctx: &Context, xi: Option<f64>, kappa_l: Option<f64>, kappa_r: Option<f64>) -> CmdResult {
    let p = damping(ctx, xi, kappa_l, kappa_r)?;
    let zp = ctx.derived()?.fluctuations();
    let cf = closed_form_steady_state(&p, &zp)?;
    // relax in units of the smaller damping rate
    let unit = p.kappa_l.min(p.kappa_r);
    let scaled = DampingParams::new(p.xi / unit, p.kappa_l / unit, p.kappa_r / unit);
    let (ode, t) = relax_to_steady_state(&MomentState::vacuum(), &scaled, RelaxOptions::default())?;
    let vac = zp.collective_vacuum_variance();
    let report = SteadyReport {
        xi: p.xi,
        kappa_l: p.kappa_l,
        kappa_r: p.kappa_r,
        closed_form: cf,
        var_xt_over_delta_x2: cf.var_xt / vac,
        var_xt_quarter_prefactor_over_delta_x2: cf.quarter_prefactor_form / vac,
        moment_ode: ode,
        moment_ode_relative_gap: relative_gap(&ode, &cf.moments),
        relaxation_time: t / unit,
    };
    let mut manifest = ctx.manifest("steady");
    manifest.tolerances.insert("relax_derivative".into(), RelaxOptions::default().derivative_tol);
    let body = match ctx.format(Format::Json) {
        Format::Json => json_with_manifest(&report, &manifest),
        _ => {
            let mut s = String::from("xi,kappa_L,kappa_R,var_ratio,var_XT_over_deltaX2,var_XT_quarter_prefactor_over_deltaX2,Delta_xi,moment_ode_relative_gap\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{:e}",
                p.xi,
                p.kappa_l,
                p.kappa_r,
                cf.var_ratio,
                report.var_xt_over_delta_x2,
                report.var_xt_quarter_prefactor_over_delta_x2,
                cf.delta_xi,
                report.moment_ode_relative_gap
            );
            s + &manifest.comment_block()
        }
    };
    let name = if ctx.format(Format::Json) == Format::Json { "steady.json" } else { "steady.csv" };
    emit(ctx.out_dir(), name, &body)?;
    Ok(Outcome::Ok)
}

fn sweep(ctx: &Context, min: f64, max: f64, points: usize) -> CmdResult {
    if !(min > 0.0 && max >= min) || points == 0 {
        return Err(CliError::Input(format!(
            "sweep needs 0 < min <= max and points > 0, got min = {min}, max = {max}, points = {points}"
        )));
    }
    let zp = ctx.derived()?.fluctuations();
    let axis = grid(min, max, points);
    let surface = variance_surface(&axis, &axis, &zp);
    let mut manifest = ctx.manifest("sweep");
    manifest.grid.insert("kappaL_over_xi".into(), format!("[{min}, {max}] x {points}"));
    manifest.grid.insert("kappaR_over_xi".into(), format!("[{min}, {max}] x {points}"));
    let body = match ctx.format(Format::Csv) {
        Format::Json => json_with_manifest(&surface, &manifest),
        _ => {
            let mut s = String::from("kappaL_over_xi,kappaR_over_xi,var_ratio,var_XT_over_deltaX2,in_regime\n");
            for p in &surface {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    p.kappa_l_over_xi, p.kappa_r_over_xi, p.var_ratio, p.var_xt_over_delta_x2, p.in_regime
                );
            }
            s + &manifest.comment_block()
        }
    };
    let name = if ctx.format(Format::Csv) == Format::Json { "sweep.json" } else { "sweep.csv" };
    emit(ctx.out_dir(), name, &body)?;
    Ok(if surface.iter().all(|p| p.in_regime) { Outcome::Ok } else { Outcome::Flagged })
}

#[derive(Serialize)]
struct OracleReport {
    params: BTreeMap<String, f64>,
    truncation: TruncationSpec,
    leakage: f64,
    trusted: bool,
    trust_reasons: Vec<String>,
    moments: Option<MomentState>,
    #[serde(rename = "var_XT")]
    var_xt: f64,
    comparison_deltas: BTreeMap<String, f64>,
    gate: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn oracle(
    ctx: &Context,
    compare: Comparison,
    levels: Option<usize>,
    overrides: (Option<f64>, Option<f64>, Option<f64>),
    gamma: f64,
) -> CmdResult {
    let d = ctx.derived()?;
    let zp = d.fluctuations();
    let mut manifest = ctx.manifest("oracle");
    let report = match compare {
        Comparison::Steady => {
            // rates in units of the smaller damping rate
            let (kl, kr) = (ctx.config.kappa_l, ctx.config.kappa_r);
            let unit = kl.min(kr);
            let p = DampingParams::new(
                overrides.0.unwrap_or(d.xi / unit),
                overrides.1.unwrap_or(kl / unit),
                overrides.2.unwrap_or(kr / unit),
            );
            let cf = closed_form_steady_state(&p, &zp)?;
            let levels = levels.unwrap_or(15);
            let spec = TruncationSpec::two_mode(levels);
            let gen = build_generator(
                &GeneratorSpec::classical_drive(-p.xi, ctx.config.phi_drive).with_losses(p.kappa_l, p.kappa_r),
                &spec,
            )?;
            let (state, _, trust) = evolve_to_steady(&TruncatedState::vacuum(&spec)?, &gen, SteadyOptions::for_generator(&gen))?;
            let m = measure_moments(&state, &zp);
            let gate = ctx.cli.common.tol.unwrap_or(0.02);
            let mut deltas = BTreeMap::new();
            deltas.insert("var_XT".to_string(), rel(m.var_xt, cf.var_xt));
            deltas.insert("L2".to_string(), rel(m.moments.l2.re, cf.moments.l2.re));
            deltas.insert("R2".to_string(), rel(m.moments.r2.re, cf.moments.r2.re));
            let c = |s: &MomentState| (s.c1 + s.c4).re;
            deltas.insert("C1_plus_C4".to_string(), rel(c(&m.moments), c(&cf.moments)));
            let mut params = BTreeMap::new();
            params.insert("xi".to_string(), p.xi);
            params.insert("kappa_L".to_string(), p.kappa_l);
            params.insert("kappa_R".to_string(), p.kappa_r);
            params.insert("phi_drive".to_string(), ctx.config.phi_drive);
            OracleReport {
                params,
                truncation: spec,
                leakage: trust.leakage,
                trusted: trust.trusted,
                trust_reasons: trust.reasons,
                moments: Some(m.moments),
                var_xt: m.var_xt,
                comparison_deltas: deltas,
                gate,
            }
        }
        Comparison::Ideal => {
            let levels = levels.unwrap_or(40);
            let phi = ctx.config.phi_drive;
            let r = ideal_squeezing(levels, gamma, phi, &zp)?;
            let st = collective_variance(&BogoliubovMap::new(gamma, phi), &d);
            let gate = ctx.cli.common.tol.unwrap_or(1e-4);
            let mut deltas = BTreeMap::new();
            deltas.insert("var_ratio".to_string(), (r.var_ratio - st.var_ratio).abs());
            deltas.insert(
                "normalized_product".to_string(),
                (r.normalized_product - st.normalized_product).abs(),
            );
            let mut params = BTreeMap::new();
            params.insert("gamma".to_string(), gamma);
            params.insert("phi_drive".to_string(), phi);
            OracleReport {
                params,
                truncation: TruncationSpec::two_mode(levels),
                leakage: r.leakage,
                trusted: r.trusted,
                trust_reasons: Vec::new(),
                moments: None,
                var_xt: r.var_ratio * zp.collective_vacuum_variance(),
                comparison_deltas: deltas,
                gate,
            }
        }
    };
    manifest.tolerances.insert("gate".into(), report.gate);
    manifest.tolerances.insert("leakage_bound".into(), report.truncation.leakage_bound);
    let body = json_with_manifest(&report, &manifest);
    emit(ctx.out_dir(), "oracle.json", &body)?;
    let within = report.comparison_deltas.values().all(|v| *v < report.gate);
    Ok(if report.trusted && within { Outcome::Ok } else { Outcome::Flagged })
}
