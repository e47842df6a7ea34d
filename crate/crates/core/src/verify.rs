//! Numerical checks of the structural results: naturality under the
//! quaternion cover, flatness of the outer unit sphere and its section,
//! the inner unit sphere, holonomy spans and the sphere curvature factor.
//!
//! Every check is a pure function of its parameters and a seed.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, Matrix3xX};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::connections::{natural_alpha, natural_form, plane_rolling_form, surface_rolling_form, ConnectionError};
use crate::lie::{
    commutator3, hat, hamilton, lie_hom_derivative, log_so3, quadratic_cover_matrix, quat_to_rotation,
    vee_checked, LieError, Mat3, Rotation, UnitQuat, Vec3,
};
use crate::paths::{self, concat, constant, custom, great_arc, linear_image, polyline, segment, PathError, PathSpec};
use crate::surface::{Side, SphereChart, Surface};
use crate::transport::{holonomy, small_loop_curvature, transport, transport_quat, IntegratorConfig, TransportError};

pub const DEFAULT_SEED: u64 = 0x5eed_2011;

pub const ALPHA_TOL: f64 = 1e-8;
pub const OMEGA_TOL: f64 = 1e-12;
pub const CURVATURE_TOL: f64 = 1e-10;
pub const TRANSPORT_TOL: f64 = 1e-7;
pub const SECTION_TOL: f64 = 1e-6;
pub const INNER_TOL: f64 = 1e-12;
/// Smallest singular value of the normalized holonomy logs that certifies a
/// full span; the report carries `1/σ_min` against its reciprocal.
pub const SPAN_SIGMA_MIN: f64 = 1e-4;
pub const FACTOR_REL_TOL: f64 = 1e-3;
pub const FACTOR_ABS_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("need at least {needed} loops, got {got}")]
    TooFewLoops { needed: usize, got: usize },
    #[error("path must start at the north pole (off by {0:.3e})")]
    NotAtBasepoint(f64),
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(name: impl Into<String>, max_residual: f64, tolerance: f64, samples: usize) -> Self {
        ResidualReport { name: name.into(), max_residual, tolerance, samples, pass: max_residual <= tolerance }
    }
}

fn random_unit_quat(rng: &mut ChaCha8Rng) -> UnitQuat {
    loop {
        let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return UnitQuat::normalized(c[0], c[1], c[2], c[3]).expect("nonzero");
        }
    }
}

fn random_vec(rng: &mut ChaCha8Rng, scale: f64) -> Vec3 {
    Vec3::from_fn(|_, _| rng.random_range(-scale..scale))
}

fn pure(v: &Vec3) -> UnitQuat {
    // imaginary quaternions are only used as factors in products
    UnitQuat { w: 0.0, x: v[0], y: v[1], z: v[2] }
}

/// Derivative of the cover along the quaternion tangent `xi` at `q`. The
/// cover matrix is quadratic in the quaternion, so the central difference is
/// exact up to roundoff.
fn cover_tangent(q: &UnitQuat, xi: &UnitQuat) -> Mat3 {
    let h = 1.0;
    let at = |s: f64| quadratic_cover_matrix(q.w + s * xi.w, q.x + s * xi.x, q.y + s * xi.y, q.z + s * xi.z);
    (at(h) - at(-h)) / (2.0 * h)
}

/// The natural connection form on Im(H) × S³: `q⁻¹ξ - q⁻¹ v q`.
fn natural_alpha_s3(q: &UnitQuat, v: &Vec3, xi: &UnitQuat) -> Vec3 {
    let body = hamilton(&q.conjugate(), xi).imag();
    body - q.conjugate().rotate(v)
}

/// Both sides of the pullback identity for the cover at random
/// `(x, q, v, ξ)`: `α_SO(3)` at `(2x, ϕ(q))` on `(2v, Tϕ ξ)` against `2 α_S³`.
pub fn check_alpha_naturality(samples: usize, seed: u64) -> ResidualReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for k in 0..samples.max(1) {
        let x = random_vec(&mut rng, 2.0);
        let v = random_vec(&mut rng, 2.0);
        let (q, zeta) = if k == 0 {
            (UnitQuat::IDENTITY, Vec3::zeros())
        } else {
            (random_unit_quat(&mut rng), random_vec(&mut rng, 2.0))
        };
        let xi = hamilton(&q, &pure(&zeta));
        let rhs = lie_hom_derivative(&natural_alpha_s3(&q, &v, &xi));
        let g = quat_to_rotation(&q);
        let lhs = natural_alpha(
            &lie_hom_derivative(&x),
            &g,
            &lie_hom_derivative(&v),
            &cover_tangent(&q, &xi),
        );
        let r = match lhs {
            Ok(lhs) => (lhs - rhs).norm(),
            Err(_) => f64::INFINITY,
        };
        worst = worst.max(r);
    }
    ResidualReport::new("alpha-naturality", worst, ALPHA_TOL, samples.max(1))
}

/// `ω_SO(3)(Lϕ v)` against `Lϕ(ω_S³(v))`, both evaluated through the
/// natural form on R³ (the S³ form has the same expression in
/// imaginary-quaternion coordinates).
pub fn check_omega_naturality(samples: usize, seed: u64) -> ResidualReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let form = natural_form();
    let mut worst: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let x = random_vec(&mut rng, 2.0);
        let v = random_vec(&mut rng, 2.0);
        let lhs = form
            .evaluate(lie_hom_derivative(&x).as_slice(), lie_hom_derivative(&v).as_slice())
            .expect("dimension 3");
        let rhs = lie_hom_derivative(&form.evaluate(x.as_slice(), v.as_slice()).expect("dimension 3"));
        worst = worst.max((lhs - rhs).norm());
    }
    ResidualReport::new("omega-naturality", worst, OMEGA_TOL, samples.max(1))
}

/// S³ bracket of imaginary quaternions through 4×4 left multiplication,
/// read off the first column.
fn s3_bracket(xi: &Vec3, eta: &Vec3) -> Vec3 {
    let (a, b) = (pure(xi).left_matrix(), pure(eta).left_matrix());
    let c = a * b - b * a;
    Vec3::new(c[(1, 0)], c[(2, 0)], c[(3, 0)])
}

/// `Lϕ([ξ, η]_S³)` against `[Lϕ ξ, Lϕ η]_so(3)`.
pub fn check_curvature_naturality(samples: usize, seed: u64) -> ResidualReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for k in 0..samples.max(1) {
        let (xi, eta) = match k {
            0 => (Vec3::x(), Vec3::y()),
            _ => (random_vec(&mut rng, 2.0), random_vec(&mut rng, 2.0)),
        };
        let lhs = lie_hom_derivative(&s3_bracket(&xi, &eta));
        let (a, b) = (hat(&lie_hom_derivative(&xi)), hat(&lie_hom_derivative(&eta)));
        let rhs = vee_checked(&commutator3(a.matrix(), b.matrix())).expect("bracket of skew matrices");
        worst = worst.max((lhs - rhs).norm());
    }
    ResidualReport::new("curvature-naturality", worst, CURVATURE_TOL, samples.max(1))
}

/// `ϕ(transport on S³ along c)` against SO(3) transport along `2c`.
pub fn check_transport_naturality(c: &PathSpec, cfg: &IntegratorConfig) -> Result<ResidualReport, VerifyError> {
    let q = transport_quat(c, &UnitQuat::IDENTITY, cfg)?.final_value;
    let doubled = linear_image(c, &DMatrix::identity(3, 3).scale(2.0))?;
    let g = transport(&natural_form(), &doubled, &Rotation::identity(), cfg)?.final_value;
    Ok(ResidualReport::new("transport-naturality", quat_to_rotation(&q).distance(&g), TRANSPORT_TOL, cfg.steps))
}

/// A closed figure-eight polyline in R³ through the origin.
pub fn figure_eight() -> PathSpec {
    let pts = vec![
        vec![0.0, 0.0, 0.0],
        vec![0.6, 0.4, 0.1],
        vec![0.6, -0.4, 0.2],
        vec![0.0, 0.0, 0.0],
        vec![-0.6, 0.4, -0.1],
        vec![-0.6, -0.4, -0.2],
        vec![0.0, 0.0, 0.0],
    ];
    polyline(&pts).expect("fixed figure eight")
}

/// The quaternion `z - iy + xj` assigned to the direction of `p`.
pub fn section_formula(p: &Vec3) -> Result<UnitQuat, LieError> {
    let u = p.try_normalize(0.0).ok_or(LieError::NonFinite)?;
    UnitQuat::normalized(u[2], -u[1], u[0], 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionLift {
    pub point: Vec3,
    pub rotation: Rotation,
    pub computed: UnitQuat,
    pub formula: UnitQuat,
}

impl SectionLift {
    /// Quaternion distance up to sign.
    pub fn formula_residual(&self) -> f64 {
        self.computed.distance_up_to_sign(&self.formula)
    }

    /// `|angle(q) - 2 acos z|`, with the computed quaternion taken in the sign
    /// of the formula so the angle lives in `[0, 2π]`.
    pub fn angle_residual(&self) -> f64 {
        let [w, ..] = self.aligned().wxyz();
        (2.0 * w.clamp(-1.0, 1.0).acos() - 2.0 * self.point[2].clamp(-1.0, 1.0).acos()).abs()
    }

    /// Component of the computed axis off the line through `(-y, x, 0)`.
    pub fn axis_residual(&self) -> f64 {
        let axis = Vec3::new(-self.point[1], self.point[0], 0.0);
        let imag = self.aligned().imag();
        match axis.try_normalize(1e-12) {
            Some(a) => (imag - a * a.dot(&imag)).norm(),
            None => imag.norm().min((imag.norm() - 1.0).abs()),
        }
    }

    fn aligned(&self) -> UnitQuat {
        let dot: f64 = self.computed.wxyz().iter().zip(self.formula.wxyz()).map(|(a, b)| a * b).sum();
        if dot < 0.0 {
            -self.computed
        } else {
            self.computed
        }
    }
}

/// Rolls the ball on the outside of the unit sphere along `basepath` (in
/// the coordinates of `chart`) from the north pole, starting from the
/// identity, and compares the resulting rotation with the section formula at
/// the endpoint.
pub fn unit_sphere_section(
    chart: &SphereChart,
    basepath: &PathSpec,
    cfg: &IntegratorConfig,
) -> Result<SectionLift, VerifyError> {
    let start = basepath.position(0.0);
    let off = (chart.point([start[0], start[1]]) - Vec3::z()).norm();
    if off > 1e-9 {
        return Err(VerifyError::NotAtBasepoint(off));
    }
    let unit = SphereChart::with_frame(1.0, *chart.frame())?;
    let form = surface_rolling_form(Surface::sphere_with_chart(unit, Side::Outer));
    let rotation = transport(&form, basepath, &Rotation::identity(), cfg)?.final_value;
    let end = basepath.position(1.0);
    let point = unit.point([end[0], end[1]]);
    Ok(SectionLift { point, rotation, computed: UnitQuat::from_rotation(&rotation), formula: section_formula(&point)? })
}

/// Two chart paths from the north pole to `p`: the great arc, and a detour
/// that bulges off it.
pub fn section_paths(p: &Vec3) -> Result<(SphereChart, Vec<PathSpec>), VerifyError> {
    let north = Vec3::z();
    let u = p.normalize();
    if (u - north).norm() <= 1e-12 {
        let chart = SphereChart::through(1.0, &north, &Vec3::x())?;
        return Ok((chart, vec![constant(&[FRAC_PI_2, 0.0])]));
    }
    let (chart, arc) = great_arc(1.0, &north, &u)?;
    let angle = arc.position(1.0)[1];
    let bulge = 0.4 * (PI - angle).min(angle).min(1.0);
    let detour = custom(
        2,
        move |t| vec![FRAC_PI_2 + bulge * (PI * t).sin(), angle * t],
        Some(move |t: f64| vec![bulge * PI * (PI * t).cos(), angle]),
    )?;
    Ok((chart, vec![arc, detour]))
}

fn random_sphere_point(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = random_vec(rng, 1.0);
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Path independence, formula agreement, and rotation angle of the section
/// at the two fixed points `(0,0,1)`, `(1,0,0)` and `targets` random points.
pub fn check_section(targets: usize, seed: u64, cfg: &IntegratorConfig) -> Result<Vec<ResidualReport>, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![Vec3::z(), Vec3::x()];
    points.extend((0..targets).map(|_| random_sphere_point(&mut rng)));
    let (mut independence, mut formula, mut angle, mut axis) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in &points {
        let (chart, paths) = section_paths(p)?;
        let lifts: Vec<SectionLift> =
            paths.iter().map(|c| unit_sphere_section(&chart, c, cfg)).collect::<Result<_, _>>()?;
        for pair in lifts.windows(2) {
            independence = independence.max(pair[0].rotation.distance(&pair[1].rotation));
        }
        for lift in &lifts {
            formula = formula.max(lift.formula_residual());
            angle = angle.max(lift.angle_residual());
            axis = axis.max(lift.axis_residual());
        }
    }
    let n = points.len();
    Ok(vec![
        ResidualReport::new("section-path-independence", independence, SECTION_TOL, n),
        ResidualReport::new("section-formula", formula, SECTION_TOL, n),
        ResidualReport::new("section-angle", angle, SECTION_TOL, n),
        ResidualReport::new("section-axis", axis, SECTION_TOL, n),
    ])
}

fn section_rotation(p: &Vec3, cfg: &IntegratorConfig) -> Result<Rotation, VerifyError> {
    let (chart, paths) = section_paths(p)?;
    Ok(unit_sphere_section(&chart, &paths[0], cfg)?.rotation)
}

/// The rotations assigned to `p` and `-p` by rolling along great arcs.
pub fn antipodal_check(p: &Vec3, cfg: &IntegratorConfig) -> Result<ResidualReport, VerifyError> {
    let r = section_rotation(p, cfg)?.distance(&section_rotation(&-p, cfg)?);
    Ok(ResidualReport::new("antipodal", r, SECTION_TOL, 1))
}

/// Antipodal agreement at the poles and at `samples` random points.
pub fn check_antipodal(samples: usize, seed: u64, cfg: &IntegratorConfig) -> Result<ResidualReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![Vec3::z()];
    points.extend((0..samples).map(|_| random_sphere_point(&mut rng)));
    let mut worst: f64 = 0.0;
    for p in &points {
        worst = worst.max(antipodal_check(p, cfg)?.max_residual);
    }
    Ok(ResidualReport::new("antipodal", worst, SECTION_TOL, points.len()))
}

/// Transport for a ball of radius 1 rolling inside the sphere of radius
/// `radius`; on the unit sphere it must be the identity for any path.
pub fn inner_sphere_identity(
    radius: f64,
    chart: &SphereChart,
    path: &PathSpec,
    cfg: &IntegratorConfig,
) -> Result<ResidualReport, VerifyError> {
    let sphere = SphereChart::with_frame(radius, *chart.frame())?;
    let form = surface_rolling_form(Surface::sphere_with_chart(sphere, Side::Inner));
    let g = transport(&form, path, &Rotation::identity(), cfg)?.final_value;
    Ok(ResidualReport::new("inner-sphere", g.distance_to_identity(), INNER_TOL, 1))
}

/// A random closed chart polyline inside the chart domain, with vertices
/// within `spread` of a random center.
pub fn random_chart_loop(rng: &mut ChaCha8Rng, spread: f64) -> PathSpec {
    let center = [rng.random_range(0.8..2.3), rng.random_range(-2.0..2.0)];
    let k = rng.random_range(3..6);
    let mut pts: Vec<Vec<f64>> = (0..k)
        .map(|_| vec![center[0] + rng.random_range(-spread..spread), center[1] + rng.random_range(-spread..spread)])
        .collect();
    pts.push(pts[0].clone());
    polyline(&pts).expect("random vertices are distinct")
}

/// Identity transport for the inner unit sphere along a great-circle loop
/// and random chart polylines.
pub fn check_inner_unit_sphere(
    radius: f64,
    loops: usize,
    seed: u64,
    cfg: &IntegratorConfig,
) -> Result<ResidualReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chart = SphereChart::new(1.0)?;
    let equator = paths::line(&[FRAC_PI_2, 0.0], &[0.0, 2.0 * PI])?;
    let mut worst = inner_sphere_identity(radius, &chart, &equator, cfg)?.max_residual;
    for _ in 0..loops {
        let c = random_chart_loop(&mut rng, 0.6);
        worst = worst.max(inner_sphere_identity(radius, &chart, &c, cfg)?.max_residual);
    }
    Ok(ResidualReport::new("inner-sphere", worst, INNER_TOL, loops + 1))
}

/// Holonomy of the outer unit sphere around random chart loops.
pub fn check_flat_unit_sphere(loops: usize, seed: u64, cfg: &IntegratorConfig) -> Result<ResidualReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let form = surface_rolling_form(Surface::sphere(1.0, Side::Outer)?);
    let mut worst: f64 = 0.0;
    for _ in 0..loops.max(1) {
        let c = random_chart_loop(&mut rng, 0.4);
        worst = worst.max(holonomy(&form, &c, cfg)?.distance_to_identity());
    }
    Ok(ResidualReport::new("flat-unit-sphere", worst, SECTION_TOL, loops.max(1)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanCheck {
    pub logs: Vec<Vec3>,
    pub singular_values: Vec<f64>,
    pub sigma_min: f64,
    pub report: ResidualReport,
}

/// Smallest singular value of the 3×k matrix of normalized holonomy logs;
/// the report carries `1/σ_min` against `1/SPAN_SIGMA_MIN`.
pub fn holonomy_span_check(
    loops: &[PathSpec],
    form: &crate::connections::LocalConnectionForm,
    cfg: &IntegratorConfig,
) -> Result<SpanCheck, VerifyError> {
    if loops.len() < 3 {
        return Err(VerifyError::TooFewLoops { needed: 3, got: loops.len() });
    }
    let logs: Vec<Vec3> = loops
        .iter()
        .map(|c| -> Result<Vec3, VerifyError> { Ok(log_so3(&holonomy(form, c, cfg)?)?) })
        .collect::<Result<_, _>>()?;
    let columns: Vec<Vec3> = logs.iter().map(|l| l.try_normalize(0.0).unwrap_or_else(Vec3::zeros)).collect();
    let m = Matrix3xX::from_columns(&columns);
    let mut singular_values: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let sigma_min = singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    let residual = if sigma_min > 0.0 { 1.0 / sigma_min } else { f64::INFINITY };
    let report = ResidualReport::new("holonomy-span", residual, 1.0 / SPAN_SIGMA_MIN, loops.len());
    Ok(SpanCheck { logs, singular_values, sigma_min, report })
}

/// A lasso from the origin: out to `corner`, once around the unit square
/// there, and back.
pub fn square_lasso(corner: [f64; 2]) -> Result<PathSpec, PathError> {
    let [a, b] = corner;
    let square = polyline(&[vec![a, b], vec![a + 1.0, b], vec![a + 1.0, b + 1.0], vec![a, b + 1.0], vec![a, b]])?;
    if a == 0.0 && b == 0.0 {
        return Ok(square);
    }
    let out = segment(&[0.0, 0.0], &[a, b])?;
    let back = segment(&[a, b], &[0.0, 0.0])?;
    concat(&concat(&out, &square)?, &back)
}

/// The three-square configuration: unit squares at `(0,0)`, `(5,0)`, `(0,5)`
/// reached from the origin.
pub fn three_square_loops() -> Vec<PathSpec> {
    [[0.0, 0.0], [5.0, 0.0], [0.0, 5.0]].into_iter().map(|c| square_lasso(c).expect("fixed squares")).collect()
}

/// Measured `f` in `Ω(u, v) = f · U × V` for the ball rolling outside the
/// sphere of radius `r`, by Richardson small-loop holonomy at a generic
/// chart point. The sign is kept, so `f < 0` when `r < 1`.
pub fn sphere_curvature_factor(r: f64, cfg: &IntegratorConfig) -> Result<f64, VerifyError> {
    let surface = Surface::sphere(r, Side::Outer)?;
    let form = surface_rolling_form(surface.clone());
    let c = [1.1, 0.7];
    let (u, v) = ([1.0, 0.0], [0.0, 1.0]);
    let est = small_loop_curvature(&form, &c, &u, &v, 1e-2 / r, cfg, true)?;
    let uv = surface.tangent_map(c, u)?.cross(&surface.tangent_map(c, v)?);
    Ok(est.dot(&uv) / uv.norm_squared())
}

pub fn sphere_factor_report(r: f64, cfg: &IntegratorConfig) -> Result<ResidualReport, VerifyError> {
    let expected = 1.0 - 1.0 / (r * r);
    let measured = sphere_curvature_factor(r, cfg)?;
    let (residual, tol) = if expected.abs() < FACTOR_ABS_TOL {
        ((measured - expected).abs(), FACTOR_ABS_TOL)
    } else {
        ((measured - expected).abs() / expected.abs(), FACTOR_REL_TOL)
    };
    Ok(ResidualReport::new(format!("sphere-factor-r{r}"), residual, tol, 1))
}

/// Names accepted by [`run_check`].
pub const CHECK_NAMES: &[&str] = &[
    "alpha-naturality",
    "antipodal",
    "curvature-naturality",
    "flat-unit-sphere",
    "holonomy-span",
    "inner-sphere",
    "omega-naturality",
    "section",
    "sphere-factor",
    "transport-naturality",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub seed: u64,
    pub samples: usize,
    /// Sphere radius for `inner-sphere` and `sphere-factor`; `None` uses the
    /// defaults (1 and {0.5, 1, 2, 5}).
    pub radius: Option<f64>,
    pub cfg: IntegratorConfig,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { seed: DEFAULT_SEED, samples: 100, radius: None, cfg: IntegratorConfig::default() }
    }
}

/// Runs one named check; reports come back sorted by name.
pub fn run_check(name: &str, opts: &CheckOptions) -> Result<Vec<ResidualReport>, VerifyError> {
    let cfg = &opts.cfg;
    let seed = opts.seed;
    let mut out = match name {
        "alpha-naturality" => vec![check_alpha_naturality(opts.samples, seed)],
        "omega-naturality" => vec![check_omega_naturality(opts.samples, seed)],
        "curvature-naturality" => vec![check_curvature_naturality(opts.samples, seed)],
        "transport-naturality" => vec![check_transport_naturality(&figure_eight(), cfg)?],
        "section" => check_section(5, seed, cfg)?,
        "antipodal" => vec![check_antipodal(5, seed, cfg)?],
        "flat-unit-sphere" => vec![check_flat_unit_sphere(5, seed, cfg)?],
        "inner-sphere" => vec![check_inner_unit_sphere(opts.radius.unwrap_or(1.0), 5, seed, cfg)?],
        "holonomy-span" => vec![holonomy_span_check(&three_square_loops(), &plane_rolling_form(), cfg)?.report],
        "sphere-factor" => match opts.radius {
            Some(r) => vec![sphere_factor_report(r, cfg)?],
            None => [0.5, 1.0, 2.0, 5.0].iter().map(|&r| sphere_factor_report(r, cfg)).collect::<Result<_, _>>()?,
        },
        other => return Err(VerifyError::UnknownCheck(other.to_string())),
    };
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

/// Every check in [`CHECK_NAMES`], sorted by report name.
pub fn run_all(opts: &CheckOptions) -> Result<Vec<ResidualReport>, VerifyError> {
    let mut out = Vec::new();
    for name in CHECK_NAMES {
        out.extend(run_check(name, opts)?);
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}
