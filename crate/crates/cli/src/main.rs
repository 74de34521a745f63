//! `robinspec`: command-line front end of the robin-spectra toolkit.
//!
//! Exit codes: 0 success, 1 I/O or failed acceptance checks, 2 invalid
//! input or violated geometric preconditions, 3 numerical non-convergence.

mod config;
mod report;

use std::process::ExitCode;

use clap::Parser;
use rayon::prelude::*;
use robin_spectra::asymptotics::{discreteness_margin, sweep, two_term_prediction};
use robin_spectra::curve::{check_assumptions, CurveSpec, Side};
use robin_spectra::exact_models::{disc_exterior_asymptotic, disc_exterior_eigenvalue};
use robin_spectra::strip::{bracket_eigenvalues, strip_eigenvalues, StripSide};
use robin_spectra::{verify, Curve, Strip};

use config::{Command, Flags, RunConfig, SideName};
use report::{Cell, Report};

#[derive(Parser, Debug)]
#[command(name = "robinspec", version, about = "Discrete spectra of attractive Robin Laplacians on curved planar domains")]
struct Cli {
    /// What to compute; may also come from the config file.
    #[arg(value_enum)]
    command: Option<Command>,
    #[command(flatten)]
    flags: Flags,
}

/// Failure classes, one per exit code.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
    Io(String),
    ChecksFailed(Vec<u8>),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) | Failure::ChecksFailed(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Validation(_) => "validation",
            Failure::Numerical(_) => "numerical",
            Failure::Io(_) => "io",
            Failure::ChecksFailed(_) => "checks_failed",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) | Failure::Io(m) => m.clone(),
            Failure::ChecksFailed(ids) => format!("acceptance checks failed: {ids:?}"),
        }
    }
}

impl From<robin_spectra::Error> for Failure {
    fn from(e: robin_spectra::Error) -> Self {
        use robin_spectra::Error as E;
        if e.is_numerical() || matches!(e, E::NotPositiveDefinite { .. }) {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("ROBIN_WORKERS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|n| *n > 0) {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match RunConfig::resolve(cli.command, &cli.flags).and_then(|cfg| run(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let record = serde_json::json!({ "error": { "kind": f.kind(), "message": f.message(), "exit_code": f.code() } });
            eprintln!("{record}");
            ExitCode::from(f.code())
        }
    }
}

fn run(cfg: &RunConfig) -> Result<(), Failure> {
    let hash = cfg.hash();
    let (report, outcome) = match cfg.command {
        Command::CurveCheck => curve_check(cfg)?,
        Command::Spectrum => (spectrum(cfg)?, Ok(())),
        Command::Bracket => (bracket(cfg)?, Ok(())),
        Command::Sweep => (sweep_report(cfg)?, Ok(())),
        Command::Disc => (disc(cfg)?, Ok(())),
        Command::Waveguide => (waveguide(cfg)?, Ok(())),
        Command::Verify => verify_report(cfg),
    };
    report.emit(cfg.format, &hash, cfg.output.as_deref())?;
    outcome
}

fn curve(cfg: &RunConfig) -> Result<Curve, Failure> {
    Ok(cfg.curve.clone().unwrap_or(CurveSpec::Straight).build()?)
}

fn strip_side(cfg: &RunConfig) -> StripSide<f64> {
    match cfg.side {
        SideName::Interior => StripSide::Interior,
        SideName::Exterior => StripSide::Exterior,
    }
}

fn model(cfg: &RunConfig, curve: &Curve, side: StripSide<f64>, beta: f64) -> Strip {
    let m = Strip::new(curve.clone(), side, beta).with_truncation(cfg.s_trunc).with_ends(cfg.ends()).with_mesh(cfg.mesh).with_seed(cfg.seed);
    match side {
        StripSide::Waveguide { .. } => m,
        _ => m.with_width(cfg.width(beta)),
    }
}

/// Runs `f` over all β in parallel, keeping β order.
fn per_beta<R: Send>(cfg: &RunConfig, f: impl Fn(f64) -> Result<R, Failure> + Sync) -> Result<Vec<(f64, R)>, Failure> {
    cfg.beta.par_iter().map(|&b| f(b).map(|r| (b, r))).collect::<Vec<_>>().into_iter().collect()
}

fn curve_check(cfg: &RunConfig) -> Result<(Report, Result<(), Failure>), Failure> {
    let curve = curve(cfg)?;
    let a = cfg.width(cfg.beta[0]);
    let side = match cfg.side {
        SideName::Interior => Side::Interior,
        SideName::Exterior => Side::Exterior,
    };
    let r = check_assumptions(&curve, side, a, 2000)?;
    let family = serde_json::to_value(curve.family()).ok().and_then(|v| v["family"].as_str().map(String::from)).unwrap_or_default();
    let mut report = Report::new(&["family", "side", "a", "injective", "local_ok", "global_ok", "a1_estimate", "decay_ok", "gamma_star", "gamma_lowstar"]);
    report.push(vec![
        Cell::Text(family),
        Cell::Text(format!("{:?}", cfg.side).to_lowercase()),
        Cell::Float(a),
        Cell::Bool(r.injective),
        Cell::Bool(r.local_ok),
        Cell::Bool(r.global_ok),
        Cell::Float(r.a1_estimate),
        Cell::Bool(r.decay_ok),
        Cell::Float(r.stats.gamma_star),
        Cell::Float(r.stats.gamma_lowstar),
    ]);
    let outcome = if r.injective {
        Ok(())
    } else {
        Err(Failure::Validation(format!("tube map of width {a} is not injective (local {}, global {}, estimated a1 {:.6})", r.local_ok, r.global_ok, r.a1_estimate)))
    };
    Ok((report, outcome))
}

fn spectrum(cfg: &RunConfig) -> Result<Report, Failure> {
    let curve = curve(cfg)?;
    let rows = per_beta(cfg, |beta| {
        let m = model(cfg, &curve, strip_side(cfg), beta);
        let spec = strip_eigenvalues(&m, cfg.k, cfg.tol)?;
        Ok((m.threshold()?, m.width(), spec))
    })?;
    let mut report = Report::new(&["beta", "j", "lambda", "residual", "threshold", "discrete_flag", "mesh_ns", "mesh_nu", "a"]);
    for (beta, (threshold, a, spec)) in rows {
        for (j, (v, r)) in spec.values.iter().zip(&spec.residuals).enumerate() {
            report.push(vec![
                Cell::Float(beta),
                Cell::Int(j as u64 + 1),
                Cell::Float(*v),
                Cell::Float(*r),
                Cell::Float(threshold),
                Cell::Bool(*v < threshold - discreteness_margin(beta)),
                Cell::Int(cfg.mesh.n_s as u64),
                Cell::Int(cfg.mesh.n_u as u64),
                Cell::Float(a),
            ]);
        }
    }
    Ok(report)
}

fn bracket(cfg: &RunConfig) -> Result<Report, Failure> {
    let curve = curve(cfg)?;
    let rows = per_beta(cfg, |beta| {
        let m = model(cfg, &curve, strip_side(cfg), beta);
        Ok((m.width(), bracket_eigenvalues(&m, cfg.k, cfg.tol)?))
    })?;
    let mut report = Report::new(&["beta", "j", "lambda_lower", "lambda_upper", "threshold", "ordered", "discrete_flag", "mesh_ns", "mesh_nu", "a"]);
    for (beta, (a, e)) in rows {
        for j in 0..e.upper.len() {
            report.push(vec![
                Cell::Float(beta),
                Cell::Int(j as u64 + 1),
                Cell::Float(e.lower[j]),
                Cell::Float(e.upper[j]),
                Cell::Float(e.threshold),
                Cell::Bool(e.lower[j] <= e.upper[j]),
                Cell::Bool(e.upper[j] < e.threshold - discreteness_margin(beta)),
                Cell::Int(cfg.mesh.n_s as u64),
                Cell::Int(cfg.mesh.n_u as u64),
                Cell::Float(a),
            ]);
        }
    }
    Ok(report)
}

fn sweep_report(cfg: &RunConfig) -> Result<Report, Failure> {
    let curve = curve(cfg)?;
    let r = sweep(&cfg.beta, cfg.k, cfg.tol, |beta| Ok(model(cfg, &curve, strip_side(cfg), beta)))?;
    let mut report = Report::new(&[
        "beta",
        "j",
        "lambda_computed_lower",
        "lambda_computed_upper",
        "predicted_two_term",
        "refined_lower",
        "residual",
        "discrete_flag",
        "mesh_ns",
        "mesh_nu",
        "a",
    ]);
    for (i, beta) in r.betas.iter().enumerate() {
        for j in 0..r.computed[i].len() {
            report.push(vec![
                Cell::Float(*beta),
                Cell::Int(j as u64 + 1),
                Cell::Float(r.computed_lower[i][j]),
                Cell::Float(r.computed[i][j]),
                Cell::Float(r.predicted_two_term[i][j]),
                Cell::Float(r.refined_lower[i][j]),
                Cell::Float(r.residuals[i][j]),
                Cell::Bool(r.discrete[i][j]),
                Cell::Int(r.mesh.0 as u64),
                Cell::Int(r.mesh.1 as u64),
                Cell::Float(r.widths[i]),
            ]);
        }
    }
    Ok(report)
}

fn disc(cfg: &RunConfig) -> Result<Report, Failure> {
    let mut report = Report::new(&["R", "beta", "m", "u_root", "lambda_exact", "lambda_asymptotic", "residual"]);
    for &beta in &cfg.beta {
        for &m in &cfg.m {
            let d = disc_exterior_eigenvalue(cfg.radius, beta, m)?;
            let asym = disc_exterior_asymptotic(cfg.radius, beta, m);
            report.push(vec![
                Cell::Float(cfg.radius),
                Cell::Float(beta),
                Cell::Int(m as u64),
                Cell::Float(d.u_root),
                Cell::Float(d.lambda),
                Cell::Float(asym),
                Cell::Float(d.lambda - asym),
            ]);
        }
    }
    Ok(report)
}

fn waveguide(cfg: &RunConfig) -> Result<Report, Failure> {
    let curve = curve(cfg)?;
    let side = StripSide::Waveguide { d: cfg.d };
    let rows = per_beta(cfg, |beta| {
        let m = model(cfg, &curve, side, beta);
        Ok((m.threshold()?, two_term_prediction(&m)?, strip_eigenvalues(&m, cfg.k, cfg.tol)?))
    })?;
    let mut report = Report::new(&["beta", "j", "lambda", "threshold", "predicted_two_term", "residual", "discrete_flag", "mesh_ns", "mesh_nu", "d"]);
    for (beta, (threshold, two, spec)) in rows {
        for (j, v) in spec.values.iter().enumerate() {
            report.push(vec![
                Cell::Float(beta),
                Cell::Int(j as u64 + 1),
                Cell::Float(*v),
                Cell::Float(threshold),
                Cell::Float(two),
                Cell::Float(*v - two),
                Cell::Bool(*v < threshold - discreteness_margin(beta)),
                Cell::Int(cfg.mesh.n_s as u64),
                Cell::Int(cfg.mesh.n_u as u64),
                Cell::Float(cfg.d),
            ]);
        }
    }
    Ok(report)
}

fn verify_report(cfg: &RunConfig) -> (Report, Result<(), Failure>) {
    let ids: Vec<u8> = if cfg.checks.is_empty() { verify::CHECKS.iter().map(|c| c.0).collect() } else { cfg.checks.clone() };
    let mut report = Report::new(&["id", "name", "passed", "seconds", "detail"]);
    let mut failed = Vec::new();
    for id in ids {
        let Some(o) = verify::run(id) else {
            return (report, Err(Failure::Validation(format!("unknown check id {id}"))));
        };
        eprintln!("{o}");
        if !o.passed {
            failed.push(id);
        }
        report.push(vec![Cell::Int(o.id as u64), Cell::Text(o.name.into()), Cell::Bool(o.passed), Cell::Float(o.seconds), Cell::Text(o.detail)]);
    }
    let outcome = if failed.is_empty() { Ok(()) } else { Err(Failure::ChecksFailed(failed)) };
    (report, outcome)
}
