//! Command-line front end: point files in, refined CSV, SVG and a JSON
//! report out.
//!
//! ```text
//! conicsub refine --input pts.csv --closed --levels 6 --out out.csv --svg out.svg
//! ```
//!
//! Exit status is 0 on success, 1 for unreadable or invalid input and bad
//! flags, 2 when refinement fails on a degenerate configuration.

pub mod points;
pub mod report;
pub mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use conicsub::{subdivide, Mode, Polyline64, RefinementConfig, Strictness, Topology};
use log::info;
use thiserror::Error;

pub use points::{format_g17, parse_points, points_csv, ParsedPoints};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid input: {0}")]
    Input(conicsub::Error),
    #[error("invalid job: {0}")]
    Job(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("refinement failed: {0}")]
    Refinement(conicsub::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Refinement(_) => 2,
            _ => 1,
        }
    }
}

/// Which artifacts to write, and where.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OutputSelection {
    pub points_csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub comb_svg: Option<PathBuf>,
    pub report_json: Option<PathBuf>,
}

impl OutputSelection {
    fn paths(&self) -> impl Iterator<Item = &PathBuf> {
        [&self.points_csv, &self.svg, &self.comb_svg, &self.report_json].into_iter().flatten()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub input: PathBuf,
    pub config: RefinementConfig,
    pub outputs: OutputSelection,
}

impl JobSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        let paths: Vec<&PathBuf> = self.outputs.paths().collect();
        if paths.is_empty() {
            return Err(CliError::Job("select at least one of --out, --svg, --comb-svg, --report".into()));
        }
        for (i, p) in paths.iter().enumerate() {
            if **p == self.input || paths[..i].contains(p) {
                return Err(CliError::Job(format!("output path {} is used twice", p.display())));
            }
        }
        self.config.validate().map_err(CliError::Input)
    }
}

/// Result of a completed job.
#[derive(Debug, Clone)]
pub struct JobOutput {
    pub input: Polyline64,
    pub refined: Polyline64,
    pub report: conicsub::DiagnosticsReport,
    pub input_bytes: Vec<u8>,
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Writes every selected artifact of `result`.
pub fn write_outputs(result: &JobOutput, spec: &JobSpec) -> Result<(), CliError> {
    let o = &spec.outputs;
    if let Some(path) = &o.points_csv {
        write_file(path, &points_csv(&result.refined))?;
    }
    if let Some(path) = &o.svg {
        write_file(path, &svg::render(&result.input, &result.refined, false))?;
    }
    if let Some(path) = &o.comb_svg {
        write_file(path, &svg::render(&result.input, &result.refined, true))?;
    }
    if let Some(path) = &o.report_json {
        let json = report::report_json(
            &result.report,
            &spec.config,
            &result.input_bytes,
            result.input.len(),
            result.refined.len(),
        );
        write_file(path, &json)?;
    }
    Ok(())
}

/// Reads, refines and writes one job.
pub fn run_job(spec: &JobSpec) -> Result<JobOutput, CliError> {
    spec.validate()?;
    let input_bytes = std::fs::read(&spec.input).map_err(|source| CliError::Io { path: spec.input.clone(), source })?;
    let text = std::str::from_utf8(&input_bytes).map_err(|e| CliError::Job(format!("input is not UTF-8: {e}")))?;
    let parsed = parse_points(text, spec.config.topology)?;
    let (refined, report) = subdivide(&parsed.poly, &spec.config).map_err(CliError::Refinement)?;
    info!("{} input points refined to {} over {} levels", parsed.poly.len(), refined.len(), spec.config.levels);
    let out = JobOutput { input: parsed.poly, refined, report, input_bytes };
    write_outputs(&out, spec)?;
    Ok(out)
}

#[derive(Debug, Parser)]
#[command(name = "conicsub", version, about = "Convexity-preserving conic subdivision of planar polylines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Refine a point file.
    Refine(RefineArgs),
}

#[derive(Debug, Args)]
pub struct RefineArgs {
    /// Input file with one `x,y` pair per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Treat the input as a closed polygon.
    #[arg(long, conflicts_with = "open")]
    pub closed: bool,
    /// Treat the input as an open polyline (default).
    #[arg(long)]
    pub open: bool,
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    /// Only split edges longer than the threshold.
    #[arg(long)]
    pub adaptive: bool,
    /// Adaptive threshold relative to the input bounding-box diagonal.
    #[arg(long, default_value_t = 0.01)]
    pub edge_threshold: f64,
    /// Junction tangent blend weight in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// End-point rule weight in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    /// Fall back to midpoints instead of failing on degenerate data.
    #[arg(long)]
    pub lenient: bool,
    /// Refined points as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// SVG with a curvature comb.
    #[arg(long)]
    pub comb_svg: Option<PathBuf>,
    /// JSON diagnostics report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

impl RefineArgs {
    pub fn job(&self) -> JobSpec {
        let config = RefinementConfig {
            topology: if self.closed { Topology::Closed } else { Topology::Open },
            levels: self.levels,
            mode: if self.adaptive { Mode::Adaptive } else { Mode::Basic },
            edge_threshold: self.edge_threshold,
            lambda: self.lambda,
            rho: self.rho,
            strictness: if self.lenient { Strictness::Lenient } else { Strictness::Strict },
            ..RefinementConfig::default()
        };
        JobSpec {
            input: self.input.clone(),
            config,
            outputs: OutputSelection {
                points_csv: self.out.clone(),
                svg: self.svg.clone(),
                comb_svg: self.comb_svg.clone(),
                report_json: self.report.clone(),
            },
        }
    }
}

/// Parses `args` (program name first), runs the job and returns the exit
/// status. Diagnostics go to standard error.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let Command::Refine(args) = cli.command;
    match run_job(&args.job()) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
