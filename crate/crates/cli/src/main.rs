use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use twomat::biorthogonal::{bimoments, biorthogonal_family, KernelKind, KernelSet};
use twomat::equilibrium::vector::default_grids;
use twomat::equilibrium::{solve_one_matrix, solve_vector_equilibrium, Axis, GridMeasure};
use twomat::model::{Polynomial, PotentialPair};
use twomat::rh::{
    airy_kernel, hastings_mcleod, jump_cycle_check, kpii_kernel, pearcey_kernel, psi_system, sine_kernel,
    tacnode_system,
};
use twomat::sampler::{sample_m1, ChainParams, EigenSample};
use twomat::spectral::examples::{solver_curve, CurveExample};
use twomat::spectral::{classify_phase, root_multiplicity, DEFAULT_MULTIPLICITY_TOL, DEFAULT_PHASE_TOL};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] twomat::Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "twomat", version, about = "Two-matrix model numerics")]
struct Cli {
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify (alpha, tau) into a phase case.
    #[command(allow_negative_numbers = true)]
    Phase(PhaseArgs),
    /// Solve a one-matrix or vector equilibrium problem.
    #[command(allow_negative_numbers = true)]
    Equilibrium(EquilibriumArgs),
    /// Sample eigenvalues of M1 by Metropolis plus an exact Gaussian step.
    #[command(allow_negative_numbers = true)]
    Sample(SampleArgs),
    /// Biorthogonal polynomials and their kernels.
    #[command(allow_negative_numbers = true)]
    Biortho(BiorthoArgs),
    /// Root multiplicity on the spectral curve of a preset example.
    #[command(allow_negative_numbers = true)]
    Curve(CurveArgs),
    /// Tabulate a limiting kernel on a square grid.
    #[command(allow_negative_numbers = true)]
    Kernel(KernelArgs),
    /// Cyclic product of the jump matrices of a model RH problem.
    #[command(name = "rhp-check")]
    RhpCheck(RhpArgs),
    /// Run the acceptance criteria.
    Verify(VerifyArgs),
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive and finite, got {s}"))
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be finite, got {s}"))
    }
}

fn coefficients(s: &str) -> Result<Polynomial, String> {
    let cs = s
        .split(',')
        .map(|t| finite(t.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Polynomial::new(cs))
}

#[derive(Debug, Args, Serialize)]
struct PhaseArgs {
    #[arg(long, value_parser = finite)]
    alpha: f64,
    #[arg(long, value_parser = positive)]
    tau: f64,
    /// Distance to a critical curve counted as lying on it.
    #[arg(long, default_value_t = DEFAULT_PHASE_TOL, value_parser = positive)]
    tol: f64,
}

#[derive(Debug, Args, Serialize)]
struct EquilibriumArgs {
    /// Ascending coefficients of V, e.g. `0,0,0.5` for x²/2.
    #[arg(long, default_value = "0,0,0.5", value_parser = coefficients)]
    #[serde(serialize_with = "ser_poly")]
    potential: Polynomial,
    /// Coupling of the quartic W; with --tau selects the vector problem.
    #[arg(long, value_parser = finite, requires = "tau")]
    alpha: Option<f64>,
    #[arg(long, value_parser = positive, requires = "alpha")]
    tau: Option<f64>,
    #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u32).range(8..=4000))]
    cells: u32,
    /// Left end of the one-matrix grid.
    #[arg(long, default_value_t = -6.0, value_parser = finite)]
    left: f64,
    /// Right end of the one-matrix grid.
    #[arg(long, default_value_t = 6.0, value_parser = finite)]
    right: f64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    iters: Option<u32>,
    #[arg(long, value_parser = positive)]
    tol: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct SampleArgs {
    #[arg(long, value_parser = finite)]
    alpha: f64,
    #[arg(long, value_parser = positive)]
    tau: f64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2000))]
    n: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Retained states per chain.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
    steps: u32,
    #[arg(long, default_value_t = 200)]
    burnin: u32,
    /// Independent chains with seeds seed, seed+1, ...; rows keep that order.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=256))]
    jobs: u32,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct BiorthoArgs {
    #[arg(long, value_parser = finite)]
    alpha: f64,
    #[arg(long, value_parser = positive)]
    tau: f64,
    #[arg(long, default_value = "0,0,0.5", value_parser = coefficients)]
    #[serde(serialize_with = "ser_poly")]
    potential: Polynomial,
    /// Scale `n` in the weight `exp(−n(V + W − τxy))`.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// Number of polynomials in each family.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    size: u32,
    /// Kernel sample points, evenly spaced on [--from, --to].
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..=200))]
    points: u32,
    #[arg(long, default_value_t = -1.5, value_parser = finite)]
    from: f64,
    #[arg(long, default_value_t = 1.5, value_parser = finite)]
    to: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct CurveArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
    example: u32,
    /// Defaults to the example's marked point.
    #[arg(long, value_parser = finite, requires = "xi")]
    x: Option<f64>,
    #[arg(long, value_parser = finite, requires = "x")]
    xi: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MULTIPLICITY_TOL, value_parser = positive)]
    tol: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum KernelChoice {
    Sine,
    Airy,
    Pearcey,
    Pii,
}

#[derive(Debug, Args, Serialize)]
struct KernelArgs {
    #[arg(long, value_enum)]
    kind: KernelChoice,
    #[arg(long, default_value_t = -1.0, value_parser = finite)]
    from: f64,
    #[arg(long, default_value_t = 1.0, value_parser = finite)]
    to: f64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..=400))]
    points: u32,
    /// `s` for pearcey, `ν` for pii; ignored otherwise.
    #[arg(long, default_value_t = 0.0, value_parser = finite)]
    param: f64,
    /// Gauss nodes per ray for pearcey.
    #[arg(long, default_value_t = 128, value_parser = clap::value_parser!(u32).range(64..=4096))]
    nodes: u32,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Problem {
    Pii,
    Tacnode,
}

#[derive(Debug, Args, Serialize)]
struct RhpArgs {
    #[arg(long, value_enum)]
    problem: Problem,
    /// First tacnode ray angle.
    #[arg(long, default_value_t = std::f64::consts::PI / 8.0, value_parser = positive)]
    phi1: f64,
    /// Second tacnode ray angle.
    #[arg(long, default_value_t = std::f64::consts::PI / 3.0, value_parser = positive)]
    phi2: f64,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    /// Run a single criterion.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=twomat::verify::CRITERIA as i64))]
    only: Option<u32>,
}

fn ser_poly<S: serde::Serializer>(p: &Polynomial, s: S) -> Result<S::Ok, S::Error> {
    p.coeffs().serialize(s)
}

fn linspace(a: f64, b: f64, n: u32) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn check_range(from: f64, to: f64) -> CliResult<()> {
    if from > to {
        return Err(CliError::Usage(format!("--from {from} exceeds --to {to}")));
    }
    Ok(())
}

/// Writes `body` to `path` and a sibling `<path>.manifest.json`.
fn emit_file<C: Serialize>(path: &Path, command: &str, config: &C, body: &[u8]) -> CliResult<()> {
    File::create(path)?.write_all(body)?;
    let manifest = json!({
        "command": command,
        "config": config,
        "version": VERSION,
        "output": path,
    });
    let mut mpath = path.as_os_str().to_owned();
    mpath.push(".manifest.json");
    let mut f = File::create(PathBuf::from(mpath))?;
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    writeln!(f)?;
    Ok(())
}

/// Either writes to `--output` (with manifest) or to stdout.
fn deliver<C: Serialize>(output: Option<&Path>, command: &str, config: &C, body: Vec<u8>) -> CliResult<()> {
    match output {
        Some(p) => emit_file(p, command, config, &body),
        None => Ok(io::stdout().write_all(&body)?),
    }
}

fn json_bytes<T: Serialize>(v: &T) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

fn cmd_phase(a: &PhaseArgs, as_json: bool) -> CliResult<()> {
    let p = classify_phase(a.alpha, a.tau, a.tol)?;
    if as_json {
        println!("{}", serde_json::to_string(&p)?);
    } else {
        println!("{}", p.case);
    }
    Ok(())
}

fn grid_json(g: &GridMeasure) -> serde_json::Value {
    json!({"left": g.left, "right": g.right, "cells": g.cells, "axis": g.axis, "mass": g.mass})
}

fn cmd_equilibrium(a: &EquilibriumArgs, as_json: bool) -> CliResult<()> {
    let cells = a.cells as usize;
    let (doc, summary) = match (a.alpha, a.tau) {
        (Some(alpha), Some(tau)) => {
            let iters = a.iters.unwrap_or(5000) as usize;
            let tol = a.tol.unwrap_or(5e-3);
            let sol = solve_vector_equilibrium(alpha, tau, &a.potential, default_grids(cells), iters, tol)?;
            let doc = json!({
                "grid": {"mu1": grid_json(&sol.mu1), "mu2": grid_json(&sol.mu2), "mu3": grid_json(&sol.mu3)},
                "density": [sol.mu1.density, sol.mu2.density, sol.mu3.density],
                "endpoints": sol.endpoints,
                "residuals": sol.residuals,
                "sigma2": sol.sigma2,
                "regular": sol.regular,
                "iterations": sol.iterations,
            });
            let e = sol.endpoints;
            let summary = format!(
                "vector equilibrium alpha={alpha} tau={tau}: a={:.6} c1={:.6} c2={:.6} c3={:.6}, residuals {:.2e} {:.2e} {:.2e}, {} iterations",
                e.a, e.c1, e.c2, e.c3, sol.residuals[0], sol.residuals[1], sol.residuals[2], sol.iterations
            );
            (doc, summary)
        }
        _ => {
            check_range(a.left, a.right)?;
            let iters = a.iters.unwrap_or(20_000) as usize;
            let tol = a.tol.unwrap_or(1e-3);
            let template = GridMeasure::template(a.left, a.right, cells, Axis::Real, 1.0)?;
            let sol = solve_one_matrix(&a.potential, &template, iters, tol)?;
            let doc = json!({
                "grid": grid_json(&sol.measure),
                "density": sol.measure.density,
                "endpoints": sol.support_intervals,
                "residuals": [sol.residual],
                "ell": sol.ell,
                "iterations": sol.iterations,
            });
            let ivs: Vec<String> = sol
                .support_intervals
                .iter()
                .map(|[l, r]| format!("[{l:.6}, {r:.6}]"))
                .collect();
            let summary = format!(
                "one-matrix equilibrium: support {}, residual {:.2e}, {} iterations",
                ivs.join(" "),
                sol.residual,
                sol.iterations
            );
            (doc, summary)
        }
    };
    match &a.output {
        Some(p) => {
            emit_file(p, "equilibrium", a, &json_bytes(&doc)?)?;
            if !as_json {
                println!("{summary}");
            }
        }
        None if as_json => io::stdout().write_all(&json_bytes(&doc)?)?,
        None => println!("{summary}"),
    }
    Ok(())
}

fn sample_csv(n: usize, rows: &[EigenSample]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["seed".to_string(), "n".into(), "alpha".into(), "tau".into()];
    header.extend((1..=n).map(|k| format!("lambda_{k}")));
    w.write_record(&header)?;
    for s in rows {
        let mut rec = vec![s.seed.to_string(), s.n.to_string(), s.meta.alpha.to_string(), s.meta.tau.to_string()];
        rec.extend(s.values.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

fn cmd_sample(a: &SampleArgs, as_json: bool) -> CliResult<()> {
    let n = a.n as usize;
    let chain = ChainParams {
        steps: a.steps as usize,
        burnin: a.burnin as usize,
    };
    let seeds: Vec<u64> = (0..a.jobs as u64)
        .map(|i| {
            a.seed
                .checked_add(i)
                .ok_or_else(|| CliError::Usage(format!("--seed {} overflows with --jobs {}", a.seed, a.jobs)))
        })
        .collect::<CliResult<_>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs as usize)
        .build()
        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    let chains: Vec<Vec<EigenSample>> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&s| sample_m1(a.alpha, a.tau, n, s, chain))
            .collect::<Result<_, _>>()
    })?;
    let rows: Vec<EigenSample> = chains.into_iter().flatten().collect();
    if as_json && a.output.is_none() {
        return Ok(io::stdout().write_all(&json_bytes(&rows)?)?);
    }
    deliver(a.output.as_deref(), "sample", a, sample_csv(n, &rows)?)
}

fn cmd_biortho(a: &BiorthoArgs, as_json: bool) -> CliResult<()> {
    check_range(a.from, a.to)?;
    let pp = PotentialPair::quartic(a.potential.clone(), a.alpha, a.tau)?;
    let fam = biorthogonal_family(&bimoments(&pp, a.n as usize, a.size as usize)?)?;
    let zeros = fam.check_zeros();
    let ks = KernelSet::new(fam.clone())?;
    let xs = linspace(a.from, a.to, a.points);
    let mut kernels = serde_json::Map::new();
    for (name, kind) in [
        ("k11", KernelKind::K11),
        ("k12", KernelKind::K12),
        ("k21", KernelKind::K21),
        ("k22", KernelKind::K22),
    ] {
        let m = xs
            .iter()
            .map(|&u| xs.iter().map(|&v| ks.eval(kind, u, v)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        kernels.insert(name.into(), json!(m));
    }
    let doc = json!({
        "family": fam,
        "zeros": zeros,
        "points": xs,
        "kernels": kernels,
    });
    match &a.output {
        Some(p) => {
            emit_file(p, "biortho", a, &json_bytes(&doc)?)?;
            if !as_json {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
        None if as_json => Ok(io::stdout().write_all(&json_bytes(&doc)?)?),
        None => {
            println!("h_k^2: {}", fam.h_sq.iter().map(|h| format!("{h:.6e}")).collect::<Vec<_>>().join(" "));
            println!("biorthogonality residual {:.2e}", fam.residual);
            println!(
                "zeros of p_{}: real {}, simple {}, interlacing {}",
                fam.size - 1,
                zeros.all_real,
                zeros.simple,
                zeros.interlacing
            );
            Ok(())
        }
    }
}

fn cmd_curve(a: &CurveArgs, as_json: bool) -> CliResult<()> {
    let ex = CurveExample::from_index(a.example)?;
    let tau = ex.tau();
    let curve = solver_curve(&ex.w(tau), tau)?;
    let (mx, mxi, _) = ex.marked_point();
    let (x, xi) = (a.x.unwrap_or(mx), a.xi.unwrap_or(mxi));
    let m = root_multiplicity(&curve, x, xi, a.tol)?;
    if as_json {
        let doc = json!({"example": a.example, "tau": tau, "x": x, "xi": xi, "multiplicity": m, "curve": curve.export()});
        println!("{}", serde_json::to_string(&doc)?);
    } else {
        println!("multiplicity {m} at (x, xi) = ({x}, {xi})");
    }
    Ok(())
}

fn cmd_kernel(a: &KernelArgs, as_json: bool) -> CliResult<()> {
    check_range(a.from, a.to)?;
    let xs = linspace(a.from, a.to, a.points);
    let hm = match a.kind {
        KernelChoice::Pii => {
            if !(-4.0..=6.0).contains(&a.param) {
                return Err(CliError::Usage(format!("--param {} outside [-4, 6] for pii", a.param)));
            }
            Some(hastings_mcleod(-10.0, 8.0, 0.05)?)
        }
        _ => None,
    };
    let eval = |x: f64, y: f64| -> twomat::Result<f64> {
        match a.kind {
            KernelChoice::Sine => Ok(sine_kernel(x, y)),
            KernelChoice::Airy => airy_kernel(x, y),
            KernelChoice::Pearcey => pearcey_kernel(x, y, a.param, a.nodes as usize),
            KernelChoice::Pii => kpii_kernel(x, y, a.param, hm.as_ref().expect("solved above")),
        }
    };
    let mut rows = Vec::with_capacity(xs.len() * xs.len());
    for &x in &xs {
        for &y in &xs {
            rows.push((x, y, eval(x, y)?));
        }
    }
    if as_json && a.output.is_none() {
        let doc: Vec<_> = rows
            .iter()
            .map(|&(x, y, v)| json!({"x": x, "y": y, "param": a.param, "value": v}))
            .collect();
        return Ok(io::stdout().write_all(&json_bytes(&doc)?)?);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "param", "value"])?;
    for (x, y, v) in rows {
        w.write_record([x.to_string(), y.to_string(), a.param.to_string(), v.to_string()])?;
    }
    let body = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    deliver(a.output.as_deref(), "kernel", a, body)
}

fn cmd_rhp(a: &RhpArgs, as_json: bool) -> CliResult<()> {
    let js = match a.problem {
        Problem::Pii => psi_system(),
        Problem::Tacnode => tacnode_system(a.phi1, a.phi2)?,
    };
    let residual = jump_cycle_check(&js);
    if as_json {
        let doc = json!({"problem": a.problem, "residual": residual, "system": js});
        println!("{}", serde_json::to_string(&doc)?);
    } else {
        println!("residual {residual}");
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs, as_json: bool) -> CliResult<()> {
    let reports = match a.only {
        Some(id) => vec![twomat::verify::run(id as usize)],
        None => twomat::verify::run_all(),
    };
    if as_json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        for r in &reports {
            println!("{r}");
        }
        let passed = reports.iter().filter(|r| r.passed).count();
        println!("{passed}/{} passed", reports.len());
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Phase(a) => cmd_phase(a, cli.json),
        Command::Equilibrium(a) => cmd_equilibrium(a, cli.json),
        Command::Sample(a) => cmd_sample(a, cli.json),
        Command::Biortho(a) => cmd_biortho(a, cli.json),
        Command::Curve(a) => cmd_curve(a, cli.json),
        Command::Kernel(a) => cmd_kernel(a, cli.json),
        Command::RhpCheck(a) => cmd_rhp(a, cli.json),
        Command::Verify(a) => cmd_verify(a, cli.json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
