//! `walker`: curvature reports for Walker metrics from JSON config files.
//!
//! Exit codes: 0 clean, 1 verification failure, 2 usage or parse error,
//! 3 numeric-domain failure.

mod config;
mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use walker_curvature::operators::{ricci, scalar_curvature};
use walker_curvature::properties::{
    analyze_point, implication_violations, merge_max, AnalysisOptions, DEFAULT_SAMPLES,
};
use walker_curvature::suites::{run_suite, PROBES};
use walker_curvature::walker::point_curvature;
use walker_curvature::{Error, Point4};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Parser)]
#[command(name = "walker", version, about = "Curvature of neutral-signature Walker metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Nonzero curvature components, Ricci tensor and operator, scalar curvature at a point
    Curvature {
        #[arg(long)]
        metric: PathBuf,
        /// x1,x2,x3,x4
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        at: [f64; 4],
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Every property at the config points (then probe and seeded random points)
    Report {
        #[arg(long)]
        metric: PathBuf,
        /// Number of points; defaults to the config points, or three probes
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run a verification suite
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Write the walker config of an affine connection's deformed Riemannian extension
    Extend {
        #[arg(long)]
        affine: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_point(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("expected 4 comma-separated coordinates, got {}", parts.len()));
    }
    let mut out = [0.0; 4];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|e| format!("`{p}`: {e}"))?;
    }
    Ok(out)
}

fn point(x: [f64; 4]) -> Result<Point4, CliError> {
    Point4::new(x).map_err(CliError::from)
}

fn curvature(path: &Path, at: [f64; 4], format: Format) -> Result<String, CliError> {
    let loaded = config::load(config::read(path)?)?;
    let pc = point_curvature(&loaded.metric, &point(at)?)?;
    let ric = ricci(&pc);
    let view = render::CurvatureView {
        metric: &loaded.metric,
        point: at,
        tensor: &pc.tensor,
        ricci_tensor: ric.tensor,
        ricci_operator: ric.operator,
        scalar: scalar_curvature(&ric),
    };
    match format {
        Format::Text => Ok(view.text()),
        Format::Json => render::json_string(&view.json()),
    }
}

const MAX_REDRAWS: usize = 1000;

fn report(path: &Path, count: Option<usize>, seed: Option<u64>, format: Format) -> Result<(String, bool), CliError> {
    let loaded = config::load(config::read(path)?)?;
    let seed = seed.or(loaded.config.seed).unwrap_or(0);
    let opts = AnalysisOptions {
        thresholds: loaded.config.thresholds.clone().unwrap_or_default(),
        samples: DEFAULT_SAMPLES,
        seed,
        warp: loaded.warp.clone(),
    };
    let given = &loaded.config.points;
    let count = count.unwrap_or(if given.is_empty() { PROBES.len() } else { given.len() });
    let mut analyses = Vec::with_capacity(count);
    for x in given.iter().chain(PROBES.iter()).take(count) {
        analyses.push(analyze_point(&loaded.metric, &point(*x)?, &opts)?);
    }
    // random points off the domain of a guarded expression are redrawn
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut redraws = 0;
    while analyses.len() < count {
        let x: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.5..=1.5));
        match analyze_point(&loaded.metric, &point(x)?, &opts) {
            Ok(a) => analyses.push(a),
            Err(Error::Domain(_)) if redraws < MAX_REDRAWS => redraws += 1,
            Err(e) => return Err(e.into()),
        }
    }
    let violations: Vec<String> =
        analyses.iter().flat_map(|a| implication_violations(loaded.metric.is_restricted(), a)).collect();
    let summary = merge_max(&analyses);
    let view = render::ReportView {
        metric: &loaded.metric,
        seed,
        points: &analyses,
        summary: &summary,
        violations: &violations,
    };
    let out = match format {
        Format::Text => view.text(),
        Format::Json => render::json_string(&view.json())?,
    };
    Ok((out, violations.is_empty()))
}

fn extend(affine: &Path, out: &Path) -> Result<String, CliError> {
    let loaded = config::load(config::read(affine)?)?;
    let walker = config::extension_config(&loaded)?;
    let text = render::json_string(&walker)?;
    std::fs::write(out, &text).map_err(|e| CliError::Usage(format!("{}: {e}", out.display())))?;
    Ok(format!(
        "wrote {} ({})\n",
        out.display(),
        if loaded.metric.is_restricted() { "restricted" } else { "not restricted" }
    ))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Curvature { metric, at, format } => print!("{}", curvature(&metric, at, format)?),
        Command::Report { metric, points, seed, format } => {
            let (out, consistent) = report(&metric, points, seed, format)?;
            print!("{out}");
            if !consistent {
                return Err(CliError::Verification("implication invariants violated".into()));
            }
        }
        Command::Verify { suite, seed, format } => {
            let r = run_suite(&suite, seed)?;
            match format {
                Format::Text => print!("{}", render::suite_text(&r)),
                Format::Json => print!("{}", render::json_string(&r)?),
            }
            if !r.pass {
                return Err(CliError::Verification(format!("suite {suite} failed")));
            }
        }
        Command::Extend { affine, out } => print!("{}", extend(&affine, &out)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
