//! Command-line front end: builds connections and paths from arguments,
//! runs transport, holonomy, curvature, verification and section requests,
//! and serializes the results as JSON or CSV.
//!
//! Exit codes: 0 success, 1 operational error, 2 a verification check failed.

mod args;
mod io;

use std::ffi::OsString;

use serde::Serialize;
use thiserror::Error;

pub use args::{parse_args, parse_points, parse_vector, Command, ConnectionArg, FormatArg, MethodArg, PathArg, RunRequest};
pub use io::{read_path_csv, read_path_file, read_trajectory_csv, render, write_result};

use crate::connections::{
    curvature_closed_form, natural_form, plane_rolling_form, pullback_form, rho_j_map, surface_rolling_form,
    LocalConnectionForm,
};
use crate::lie::{exp_so3, quat_to_rotation, Rotation, UnitQuat, Vec3};
use crate::paths::{circle, line, parallelogram_loop, polyline, PathSpec};
use crate::surface::{Side, Surface};
use crate::transport::{small_loop_curvature, transport, IntegratorConfig, Method, TransportError};
use crate::verify::{self, CheckOptions, ResidualReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Help(String),
    #[error("{0}")]
    Usage(String),
    #[error("path file: {0}")]
    PathFile(String),
    #[error("{0}")]
    Io(String),
    #[error("connection has base dimension {expected}, path has {got}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Verify(#[from] verify::VerifyError),
    #[error(transparent)]
    Path(#[from] crate::paths::PathError),
    #[error(transparent)]
    Connection(#[from] crate::connections::ConnectionError),
}

/// One rotation in three encodings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationDoc {
    pub matrix: [f64; 9],
    /// `(w, x, y, z)` with `w ≥ 0` (first nonzero component positive when `w = 0`).
    pub quat: [f64; 4],
    pub axis: [f64; 3],
    pub angle: f64,
}

impl RotationDoc {
    pub fn new(r: &Rotation) -> Self {
        let q = UnitQuat::from_rotation(r).canonical();
        let (axis, angle) = q.axis_angle();
        RotationDoc { matrix: r.to_row_major(), quat: q.wxyz(), axis: [axis[0], axis[1], axis[2]], angle }
    }

    /// Largest Frobenius disagreement between the matrix and the rotations
    /// rebuilt from the quaternion and from the axis-angle pair.
    pub fn consistency_residual(&self) -> f64 {
        let m = nalgebra::Matrix3::from_row_slice(&self.matrix);
        let [w, x, y, z] = self.quat;
        let from_quat = quat_to_rotation(&UnitQuat { w, x, y, z });
        let from_axis = exp_so3(&(Vec3::from(self.axis) * self.angle));
        (m - from_quat.matrix()).norm().max((m - from_axis.matrix()).norm())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub quat: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureDoc {
    pub point: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub eps: f64,
    pub estimate: [f64; 3],
    pub closed_form: Option<[f64; 3]>,
    /// For sphere connections, the signed `f` in `Ω(u, v) = f · U × V`.
    pub factor: Option<f64>,
    pub expected_factor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultDocument {
    pub request: RunRequest,
    pub holonomy: Option<RotationDoc>,
    pub trajectory: Vec<TrajectoryPoint>,
    pub reports: Vec<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature: Option<CurvatureDoc>,
}

impl ResultDocument {
    fn new(request: &RunRequest) -> Self {
        ResultDocument { request: request.clone(), holonomy: None, trajectory: Vec::new(), reports: Vec::new(), curvature: None }
    }

    pub fn failed(&self) -> bool {
        self.reports.iter().any(|r| !r.pass)
    }
}

fn sphere_radius(req: &RunRequest) -> f64 {
    req.radius.unwrap_or(1.0)
}

pub fn build_form(req: &RunRequest) -> Result<LocalConnectionForm, CliError> {
    let conn = req.connection.ok_or_else(|| CliError::Usage("missing --connection".into()))?;
    Ok(match conn {
        ConnectionArg::NaturalSo3 => natural_form(),
        ConnectionArg::PlaneRolling => plane_rolling_form(),
        ConnectionArg::SphereOuter => surface_rolling_form(Surface::sphere(sphere_radius(req), Side::Outer)?),
        ConnectionArg::SphereInner => surface_rolling_form(Surface::sphere(sphere_radius(req), Side::Inner)?),
        ConnectionArg::PullbackRhoJ => pullback_form(rho_j_map(), natural_form())?,
    })
}

fn is_sphere(req: &RunRequest) -> bool {
    matches!(req.connection, Some(ConnectionArg::SphereOuter | ConnectionArg::SphereInner))
}

fn origin(req: &RunRequest, d: usize) -> Result<Vec<f64>, CliError> {
    let o = match &req.origin {
        Some(o) => o.clone(),
        // chart coordinates away from the polar caps
        None if is_sphere(req) => vec![1.1, 0.7],
        None => vec![0.0; d],
    };
    check_dim(d, o.len())?;
    Ok(o)
}

fn check_dim(expected: usize, got: usize) -> Result<(), CliError> {
    if expected != got {
        return Err(CliError::Dimension { expected, got });
    }
    Ok(())
}

fn unit(d: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[i] = 1.0;
    e
}

pub fn build_path(req: &RunRequest, d: usize) -> Result<PathSpec, CliError> {
    let kind = req.path.ok_or_else(|| CliError::Usage("missing --path".into()))?;
    let x0 = origin(req, d)?;
    let size = req.eps.unwrap_or(1.0);
    let path = match kind {
        PathArg::Line => {
            let xi = req.xi.as_ref().ok_or_else(|| CliError::Usage("--path line needs --xi".into()))?;
            check_dim(d, xi.len())?;
            line(&x0, xi)?
        }
        PathArg::Circle => circle(&x0, size, &unit(d, 0), &unit(d, 1))?,
        PathArg::Square => parallelogram_loop(&x0, &unit(d, 0), &unit(d, 1), size)?,
        PathArg::Polyline => {
            let pts = req.points.as_ref().ok_or_else(|| CliError::Usage("--path polyline needs --points".into()))?;
            polyline(pts)?
        }
        PathArg::File => {
            let input = req.input.as_ref().ok_or_else(|| CliError::Usage("--path file needs --input".into()))?;
            read_path_file(input)?
        }
    };
    check_dim(d, path.base_dim())?;
    Ok(path)
}

fn config(req: &RunRequest) -> IntegratorConfig {
    let method = match req.method {
        MethodArg::Euler => Method::LieEuler,
        MethodArg::Midpoint => Method::ExpMidpoint,
    };
    let stride = if req.stride == 0 { (req.steps / 100).max(1) } else { req.stride };
    IntegratorConfig::new(method, req.steps).with_stride(stride)
}

fn run_transport(req: &RunRequest, require_closed: bool) -> Result<ResultDocument, CliError> {
    let form = build_form(req)?;
    let c = build_path(req, form.base_dim())?;
    if require_closed && !c.closed() {
        let gap = c.position(0.0).iter().zip(c.position(1.0)).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        return Err(TransportError::NotClosed(gap).into());
    }
    let result = transport(&form, &c, &Rotation::identity(), &config(req))?;
    let mut doc = ResultDocument::new(req);
    doc.holonomy = Some(RotationDoc::new(&result.final_value));
    doc.trajectory = result
        .samples
        .iter()
        .map(|s| TrajectoryPoint { t: s.t, x: s.x.clone(), quat: UnitQuat::from_rotation(&s.g).canonical().wxyz() })
        .collect();
    Ok(doc)
}

fn run_curvature(req: &RunRequest) -> Result<ResultDocument, CliError> {
    let form = build_form(req)?;
    let d = form.base_dim();
    let x = origin(req, d)?;
    let (u, v) = (unit(d, 0), unit(d, 1));
    let sphere = form.surface().filter(|_| is_sphere(req)).cloned();
    let r = sphere_radius(req);
    let eps = req.eps.unwrap_or(if sphere.is_some() { 1e-2 / r } else { 1e-2 });
    let est = small_loop_curvature(&form, &x, &u, &v, eps, &config(req), true)?;
    let closed = curvature_closed_form(&form, &x, &u, &v).ok();
    let (factor, expected_factor) = match &sphere {
        Some(s) => {
            let c = [x[0], x[1]];
            let uv = s.tangent_map(c, [1.0, 0.0])?.cross(&s.tangent_map(c, [0.0, 1.0])?);
            (Some(est.dot(&uv) / uv.norm_squared()), Some(1.0 - 1.0 / (r * r)))
        }
        None => (None, None),
    };
    let mut doc = ResultDocument::new(req);
    doc.curvature = Some(CurvatureDoc {
        point: x,
        u,
        v,
        eps,
        estimate: [est[0], est[1], est[2]],
        closed_form: closed.map(|c| [c[0], c[1], c[2]]),
        factor,
        expected_factor,
    });
    Ok(doc)
}

fn run_verify(req: &RunRequest) -> Result<ResultDocument, CliError> {
    let cfg = config(req);
    let opts = CheckOptions { seed: req.seed, radius: req.radius, cfg: IntegratorConfig { sample_stride: 0, ..cfg }, ..Default::default() };
    let mut reports = if req.all {
        verify::run_all(&opts)?
    } else {
        let mut out = Vec::new();
        for name in &req.checks {
            out.extend(verify::run_check(name, &opts)?);
        }
        out
    };
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    let mut doc = ResultDocument::new(req);
    doc.reports = reports;
    Ok(doc)
}

fn run_section(req: &RunRequest) -> Result<ResultDocument, CliError> {
    let t = req.target.as_ref().ok_or_else(|| CliError::Usage("section needs --target".into()))?;
    let p = Vec3::new(t[0], t[1], t[2]);
    if !(p.norm() > 0.0) {
        return Err(CliError::Usage("--target must be nonzero".into()));
    }
    let cfg = IntegratorConfig { sample_stride: 0, ..config(req) };
    let (chart, paths) = verify::section_paths(&p)?;
    let lifts: Vec<verify::SectionLift> =
        paths.iter().map(|c| verify::unit_sphere_section(&chart, c, &cfg)).collect::<Result<_, _>>()?;
    let lift = lifts[0];
    let mut doc = ResultDocument::new(req);
    doc.holonomy = Some(RotationDoc::new(&lift.rotation));
    let independence = lifts.windows(2).map(|w| w[0].rotation.distance(&w[1].rotation)).fold(0.0, f64::max);
    doc.reports = vec![
        ResidualReport::new("section-angle", lift.angle_residual(), verify::SECTION_TOL, 1),
        ResidualReport::new("section-axis", lift.axis_residual(), verify::SECTION_TOL, 1),
        ResidualReport::new("section-formula", lift.formula_residual(), verify::SECTION_TOL, 1),
        ResidualReport::new("section-path-independence", independence, verify::SECTION_TOL, lifts.len()),
    ];
    Ok(doc)
}

/// Executes a parsed request.
pub fn run(req: &RunRequest) -> Result<ResultDocument, CliError> {
    match req.command {
        Command::Transport => run_transport(req, false),
        Command::Holonomy => run_transport(req, true),
        Command::Curvature => run_curvature(req),
        Command::Verify => run_verify(req),
        Command::Section => run_section(req),
    }
}

/// Parses, runs and writes; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let req = match parse_args(argv) {
        Ok(r) => r,
        Err(CliError::Help(text)) => {
            print!("{text}");
            return EXIT_OK;
        }
        Err(e) => {
            eprintln!("{e}");
            return EXIT_ERROR;
        }
    };
    let doc = match run(&req) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    if let Err(e) = write_result(&doc, req.format, req.out.as_deref()) {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    if doc.failed() {
        for r in doc.reports.iter().filter(|r| !r.pass) {
            eprintln!("check failed: {} residual {:.3e} > {:.1e}", r.name, r.max_residual, r.tolerance);
        }
        return EXIT_CHECK_FAILED;
    }
    EXIT_OK
}
