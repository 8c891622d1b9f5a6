use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pbcurv::analysis::{analyze_point, AnalysisOptions};
use pbcurv::bench::{run_bench, BenchError};
use pbcurv::config::{load_spec, PreparedSpec, RhoSpec};
use pbcurv::grid::{curvature_records, evaluate_grid, write_csv, write_json};
use pbcurv::invariants::summarize;
use pbcurv::error::GeometryError;
use pbcurv::tensor::{max_m_from_env, TensorError};
use pbcurv::Contraction;

const EXIT_INVARIANT: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_GEOMETRY: u8 = 3;

/// Gauss and mean curvature of surfaces in R^m_nu from Poisson brackets.
#[derive(Parser)]
#[command(name = "pbcurv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate K and H at every grid point.
    Curvature(Common),
    /// Check every identity over the grid and print a pass/fail table.
    Invariants(Common),
    /// Time the naive and reduced epsilon contractions.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Timed passes over the grid; the median is reported.
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
    },
}

#[derive(Args)]
struct Common {
    /// Spec file, or the name of a built-in surface.
    spec: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// unit | sqrtg | expr:<expression>
    #[arg(long, value_parser = parse_rho)]
    rho: Option<RhoSpec>,
    #[arg(long, default_value = "reduced")]
    contraction: Contraction,
    /// Add oracle values and identity residuals to each record.
    #[arg(long)]
    compare: bool,
    /// Override the sample grid, e.g. 16x8.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<[usize; 2]>,
    /// Replace the default residual bounds.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Record degenerate points as skipped instead of failing.
    #[arg(long)]
    skip_degenerate: bool,
    /// Worker threads (default: one per core).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    #[value(alias = "text")]
    Csv,
    Json,
}

fn parse_rho(s: &str) -> Result<RhoSpec, String> {
    match s {
        "unit" | "sqrtg" | "sqrt_abs_g" => Ok(s.parse().unwrap()),
        _ if s.starts_with("expr:") => Ok(s.parse().unwrap()),
        _ => Err("expected unit, sqrtg or expr:<expression>".into()),
    }
}

fn parse_grid(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or("expected NxM")?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
    Ok([n(a)?, n(b)?])
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

fn prepare(common: &Common) -> Result<PreparedSpec, Failure> {
    let loaded = load_spec(&common.spec).map_err(|e| fail(EXIT_CONFIG, e))?;
    if common.rho.is_none() && common.grid.is_none() {
        return Ok(loaded);
    }
    let mut spec = loaded.spec;
    if let Some(rho) = &common.rho {
        spec.rho = rho.clone();
    }
    if let Some(grid) = common.grid {
        spec.grid = grid;
    }
    spec.prepare()
        .map_err(|e| fail(EXIT_CONFIG, format!("--{}: {}", e.field, e.message)))
}

fn options(common: &Common, spec: &PreparedSpec) -> AnalysisOptions {
    AnalysisOptions {
        density: spec.density.clone(),
        contraction: common.contraction,
        cap: max_m_from_env(),
    }
}

/// A dimension beyond the cap is a usage problem, not a property of the surface.
fn geometry_code(e: &GeometryError) -> u8 {
    match e {
        GeometryError::Tensor(TensorError::DimensionCap { .. }) => EXIT_CONFIG,
        _ => EXIT_GEOMETRY,
    }
}

fn write_out(bytes: &[u8]) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| fail(EXIT_CONFIG, format!("writing output: {e}")))
}

fn cmd_curvature(common: &Common) -> Result<(), Failure> {
    let spec = prepare(common)?;
    let opts = options(common, &spec);
    let points = spec.points();
    let records = curvature_records(
        &spec.surface,
        &points,
        &opts,
        common.compare,
        common.skip_degenerate,
        common.threads,
    )
    .map_err(|e| fail(geometry_code(&e.source), e))?;

    let mut buf = Vec::new();
    match common.format {
        Format::Csv => write_csv(&mut buf, &records, spec.spec.m, common.compare).map_err(|e| fail(EXIT_CONFIG, e))?,
        Format::Json => write_json(&mut buf, &records).map_err(|e| fail(EXIT_CONFIG, e))?,
    }
    write_out(&buf)?;

    if common.compare {
        let tol = common.tolerance.unwrap_or(1e-8);
        let bad = records
            .iter()
            .filter_map(|r| Some((r.k_full?, r.k_oracle?)))
            .filter(|(k, ko)| !((k - ko).abs() <= tol * ko.abs().max(1.0)))
            .count();
        if bad > 0 {
            return Err(fail(
                EXIT_INVARIANT,
                format!("{bad} points disagree with the classical oracle beyond {tol:e}"),
            ));
        }
    }
    Ok(())
}

fn cmd_invariants(common: &Common) -> Result<(), Failure> {
    let spec = prepare(common)?;
    let opts = options(common, &spec);
    let points = spec.points();
    let results = evaluate_grid(&points, common.threads, |at| analyze_point::<f64>(&spec.surface, at, &opts));
    let mut analyses = Vec::with_capacity(results.len());
    let mut skipped = 0;
    for (r, at) in results.into_iter().zip(&points) {
        match r {
            Ok(a) => analyses.push(a),
            Err(_) if common.skip_degenerate => skipped += 1,
            Err(e) => return Err(fail(geometry_code(&e), format!("at (u, v) = ({}, {}): {e}", at[0], at[1]))),
        }
    }
    let report = summarize(&analyses, skipped, spec.spec.m - 2, common.tolerance);
    let text = match common.format {
        Format::Csv => format!("surface: {} (m = {}, nu = {})\n\n{report}", spec.spec.name, spec.spec.m, spec.spec.nu),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| fail(EXIT_CONFIG, e))?;
            s.push('\n');
            s
        }
    };
    write_out(text.as_bytes())?;
    if report.passed() {
        Ok(())
    } else {
        Err(fail(EXIT_INVARIANT, "one or more identities failed"))
    }
}

fn cmd_bench(common: &Common, repetitions: usize) -> Result<(), Failure> {
    let spec = prepare(common)?;
    let points = spec.points();
    let report = run_bench(&spec.surface, &points, &spec.density, max_m_from_env(), repetitions).map_err(|e| match e {
        BenchError::Cap(_) => fail(EXIT_CONFIG, e),
        BenchError::Geometry { .. } => fail(EXIT_GEOMETRY, e),
        BenchError::Mismatch { .. } => fail(EXIT_INVARIANT, e),
    })?;
    let text = match common.format {
        Format::Csv => format!(
            "surface: {} (m = {}), {} points, {} repetitions, max disagreement {:.1e}\n\
             {:<10} {:>10} {:>16}\n\
             {:<10} {:>10} {:>16.0}\n\
             {:<10} {:>10} {:>16.0}\n\
             ratio naive/reduced: {:.3}\n",
            spec.spec.name,
            report.m,
            report.points,
            report.repetitions,
            report.max_disagreement,
            "path",
            "work/call",
            "median ns/point",
            "naive",
            report.naive_work,
            report.naive_ns,
            "reduced",
            report.reduced_work,
            report.reduced_ns,
            report.ratio()
        ),
        Format::Json => {
            let v = serde_json::json!({
                "surface": spec.spec.name,
                "m": report.m,
                "points": report.points,
                "repetitions": report.repetitions,
                "max_disagreement": report.max_disagreement,
                "naive": { "work_per_call": report.naive_work, "median_ns_per_point": report.naive_ns },
                "reduced": { "work_per_call": report.reduced_work, "median_ns_per_point": report.reduced_ns },
                "ratio": report.ratio(),
            });
            format!("{}\n", serde_json::to_string_pretty(&v).map_err(|e| fail(EXIT_CONFIG, e))?)
        }
    };
    write_out(text.as_bytes())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Curvature(c) => cmd_curvature(c),
        Command::Invariants(c) => cmd_invariants(c),
        Command::Bench { common, repetitions } => cmd_bench(common, *repetitions),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pbcurv: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
