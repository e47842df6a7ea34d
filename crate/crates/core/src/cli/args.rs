use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::CliError;
use crate::verify::DEFAULT_SEED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Transport,
    Holonomy,
    Curvature,
    Verify,
    Section,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ConnectionArg {
    #[value(name = "natural-so3")]
    #[serde(rename = "natural-so3")]
    NaturalSo3,
    #[value(name = "plane-rolling")]
    #[serde(rename = "plane-rolling")]
    PlaneRolling,
    #[value(name = "sphere-outer")]
    #[serde(rename = "sphere-outer")]
    SphereOuter,
    #[value(name = "sphere-inner")]
    #[serde(rename = "sphere-inner")]
    SphereInner,
    #[value(name = "pullback-rhoJ")]
    #[serde(rename = "pullback-rhoJ")]
    PullbackRhoJ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathArg {
    Line,
    Circle,
    Square,
    Polyline,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Euler,
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Json,
    Csv,
}

/// Parallel transport, holonomy and curvature for connections on SO(3)-bundles.
#[derive(Debug, Parser)]
#[command(name = "holonomy", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Transport the identity along a path.
    Transport(Opts),
    /// Holonomy around a closed path.
    Holonomy(Opts),
    /// Small-loop curvature estimate; for sphere connections, the measured factor.
    Curvature(Opts),
    /// Run residual checks.
    Verify(Opts),
    /// Rotation assigned to a point of the unit sphere by rolling from (0,0,1).
    Section(Opts),
}

#[derive(Debug, Args)]
struct Opts {
    #[arg(long, value_enum)]
    connection: Option<ConnectionArg>,
    /// Sphere radius.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, value_enum)]
    path: Option<PathArg>,
    /// Line direction, e.g. "0,0,1.57".
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    /// Start point of lines, corner of squares, center of circles.
    #[arg(long, allow_hyphen_values = true)]
    origin: Option<String>,
    /// Polyline vertices, e.g. "0,0;1,0;1,1".
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// CSV path file with header t,x1,...,xd.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Square side, circle radius, or small-loop scale.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    steps: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Midpoint)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Trajectory sample stride in steps; 0 picks about 100 samples.
    #[arg(long, default_value_t = 0)]
    stride: usize,
    /// Check to run (verify).
    #[arg(long)]
    check: Vec<String>,
    /// Run every check (verify).
    #[arg(long)]
    all: bool,
    /// Target point on the unit sphere (section), e.g. "1,0,0".
    #[arg(long, allow_hyphen_values = true)]
    target: Option<String>,
}

/// A parsed, validated command line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRequest {
    pub command: Command,
    pub connection: Option<ConnectionArg>,
    pub radius: Option<f64>,
    pub path: Option<PathArg>,
    pub xi: Option<Vec<f64>>,
    pub origin: Option<Vec<f64>>,
    pub points: Option<Vec<Vec<f64>>>,
    pub input: Option<PathBuf>,
    pub eps: Option<f64>,
    pub steps: usize,
    pub method: MethodArg,
    pub format: FormatArg,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub stride: usize,
    pub checks: Vec<String>,
    pub all: bool,
    pub target: Option<Vec<f64>>,
}

pub fn parse_vector(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match parts {
        Ok(v) if v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(CliError::Usage(format!("malformed vector literal {s:?}"))),
    }
}

pub fn parse_points(s: &str) -> Result<Vec<Vec<f64>>, CliError> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_vector).collect()
}

/// Parses `argv` (program name first). Help and version requests come back
/// as [`CliError::Help`] carrying the rendered text.
pub fn parse_args<I, T>(argv: I) -> Result<RunRequest, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Help(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })?;
    let (command, o) = match cli.command {
        Sub::Transport(o) => (Command::Transport, o),
        Sub::Holonomy(o) => (Command::Holonomy, o),
        Sub::Curvature(o) => (Command::Curvature, o),
        Sub::Verify(o) => (Command::Verify, o),
        Sub::Section(o) => (Command::Section, o),
    };
    let opt_vec = |s: &Option<String>| s.as_deref().map(parse_vector).transpose();
    let req = RunRequest {
        command,
        connection: o.connection,
        radius: o.radius,
        path: o.path,
        xi: opt_vec(&o.xi)?,
        origin: opt_vec(&o.origin)?,
        points: o.points.as_deref().map(parse_points).transpose()?,
        input: o.input,
        eps: o.eps,
        steps: o.steps as usize,
        method: o.method,
        format: o.format,
        out: o.out,
        seed: o.seed,
        stride: o.stride,
        checks: o.check,
        all: o.all,
        target: opt_vec(&o.target)?,
    };
    validate(&req)?;
    Ok(req)
}

fn validate(req: &RunRequest) -> Result<(), CliError> {
    let missing = |what: &str| Err(CliError::Usage(format!("{:?} needs {what}", req.command).to_lowercase()));
    if let Some(r) = req.radius {
        if !(r > 0.0) || !r.is_finite() {
            return Err(CliError::Usage(format!("radius must be positive, got {r}")));
        }
    }
    if let Some(e) = req.eps {
        if !(e > 0.0) || !e.is_finite() {
            return Err(CliError::Usage(format!("eps must be positive, got {e}")));
        }
    }
    match req.command {
        Command::Transport | Command::Holonomy => {
            if req.connection.is_none() {
                return missing("--connection");
            }
            match req.path {
                None => return missing("--path"),
                Some(PathArg::Line) if req.xi.is_none() => return missing("--xi for --path line"),
                Some(PathArg::Polyline) if req.points.is_none() => return missing("--points for --path polyline"),
                Some(PathArg::File) if req.input.is_none() => return missing("--input for --path file"),
                _ => {}
            }
        }
        Command::Curvature => {
            if req.connection.is_none() {
                return missing("--connection");
            }
        }
        Command::Verify => {
            if !req.all && req.checks.is_empty() {
                return missing("--check NAME or --all");
            }
        }
        Command::Section => {
            match &req.target {
                None => return missing("--target"),
                Some(t) if t.len() != 3 => return Err(CliError::Usage("--target needs three coordinates".into())),
                _ => {}
            }
        }
    }
    Ok(())
}
