//! Oriented surfaces in R³ on which the unit sphere rolls.
//!
//! Points of a surface are addressed through a two-dimensional chart; tangent
//! vectors are chart vectors pushed forward by the chart's tangent map. The
//! unit normal points to the side the rolling sphere sits on.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::connections::ConnectionError;
use crate::lie::{Rotation, Vec3};

/// Angular radius of the polar caps excluded from spherical charts.
pub const POLAR_CAP: f64 = 1e-3;
/// Central-difference step for numerical chart partials and shape derivatives.
/// Five-point stencil step for chart partials of parametric surfaces.
pub const SURFACE_FD_STEP: f64 = 1e-3;
/// Five-point stencil step for normal derivatives of parametric surfaces.
pub const NORMAL_FD_STEP: f64 = 1e-2;

/// Fourth-order central difference of `f` along the coordinate axis `axis`.
fn five_point<F>(f: F, c: [f64; 2], axis: usize, h: f64) -> Result<Vec3, ConnectionError>
where
    F: Fn([f64; 2]) -> Result<Vec3, ConnectionError>,
{
    let at = |s: f64| {
        let mut p = c;
        p[axis] += s;
        f(p)
    };
    Ok((at(-2.0 * h)? - at(2.0 * h)? + (at(h)? - at(-h)?) * 8.0) / (12.0 * h))
}

/// Which side of a sphere the rolling ball is on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Outer,
    Inner,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Outer => 1.0,
            Side::Inner => -1.0,
        }
    }
}

/// Spherical coordinates `(θ, φ)` on the sphere of radius `r`, taken in a
/// rotated frame: `(θ, φ) ↦ r · F · (sin θ cos φ, sin θ sin φ, cos θ)`.
///
/// θ is restricted to `[POLAR_CAP, π - POLAR_CAP]`; φ is unrestricted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereChart {
    radius: f64,
    frame: Rotation,
}

impl SphereChart {
    pub fn new(radius: f64) -> Result<Self, ConnectionError> {
        Self::with_frame(radius, Rotation::identity())
    }

    pub fn with_frame(radius: f64, frame: Rotation) -> Result<Self, ConnectionError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(ConnectionError::InvalidRadius(radius));
        }
        Ok(SphereChart { radius, frame })
    }

    /// Chart whose equator is the great circle through the directions of `p`
    /// and `q`, with `p` at `(π/2, 0)` and `q` at `(π/2, angle(p, q))`.
    ///
    /// For parallel or antiparallel directions any great circle through `p`
    /// is used.
    pub fn through(radius: f64, p: &Vec3, q: &Vec3) -> Result<Self, ConnectionError> {
        let p_hat = p
            .try_normalize(0.0)
            .ok_or(ConnectionError::DegenerateGeometry("zero point"))?;
        let normal = p_hat.cross(q);
        let pole = if normal.norm() > 1e-12 * q.norm() {
            normal.normalize()
        } else {
            // any unit vector orthogonal to p
            let trial = if p_hat[0].abs() < 0.9 { Vec3::x() } else { Vec3::y() };
            (trial - p_hat * p_hat.dot(&trial)).normalize()
        };
        let second = pole.cross(&p_hat);
        let frame = Rotation::try_from_matrix(Matrix3::from_columns(&[p_hat, second, pole]))
            .map_err(|_| ConnectionError::DegenerateGeometry("chart frame"))?;
        Self::with_frame(radius, frame)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn frame(&self) -> &Rotation {
        &self.frame
    }

    pub fn in_domain(&self, c: [f64; 2]) -> bool {
        c[0] >= POLAR_CAP && c[0] <= PI - POLAR_CAP && c[1].is_finite()
    }

    fn check(&self, c: [f64; 2]) -> Result<(), ConnectionError> {
        if self.in_domain(c) {
            Ok(())
        } else {
            Err(ConnectionError::ChartSingular { theta: c[0], phi: c[1] })
        }
    }

    pub fn point(&self, c: [f64; 2]) -> Vec3 {
        let (st, ct) = c[0].sin_cos();
        let (sp, cp) = c[1].sin_cos();
        self.frame.apply(&(Vec3::new(st * cp, st * sp, ct) * self.radius))
    }

    /// Partial derivatives of the chart with respect to θ and φ.
    pub fn partials(&self, c: [f64; 2]) -> (Vec3, Vec3) {
        let (st, ct) = c[0].sin_cos();
        let (sp, cp) = c[1].sin_cos();
        let d_theta = Vec3::new(ct * cp, ct * sp, -st) * self.radius;
        let d_phi = Vec3::new(-st * sp, st * cp, 0.0) * self.radius;
        (self.frame.apply(&d_theta), self.frame.apply(&d_phi))
    }

    /// Chart coordinates of the direction of `p`, with φ in `(-π, π]`.
    pub fn coordinates(&self, p: &Vec3) -> [f64; 2] {
        let local = self.frame.inverse().apply(p);
        let rho = local.norm();
        let theta = (local[2] / rho).clamp(-1.0, 1.0).acos();
        [theta, local[1].atan2(local[0])]
    }

    /// Pulls an ambient velocity tangent at `c` back to a chart velocity.
    pub fn chart_velocity(&self, c: [f64; 2], velocity: &Vec3) -> [f64; 2] {
        let (d_theta, d_phi) = self.partials(c);
        [
            velocity.dot(&d_theta) / d_theta.norm_squared(),
            velocity.dot(&d_phi) / d_phi.norm_squared(),
        ]
    }
}

type ChartFn = Arc<dyn Fn([f64; 2]) -> Vec3 + Send + Sync>;

/// A surface given by an arbitrary smooth chart, optionally with an analytic
/// unit normal (as a function of chart coordinates).
#[derive(Clone)]
pub struct ParametricSurface {
    chart: ChartFn,
    normal: Option<ChartFn>,
}

impl fmt::Debug for ParametricSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricSurface")
            .field("analytic_normal", &self.normal.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SurfaceKind {
    Plane,
    Sphere { radius: f64, side: Side },
    Parametric,
}

#[derive(Debug, Clone)]
enum Geometry {
    Plane,
    Sphere { chart: SphereChart, side: Side },
    Parametric(ParametricSurface),
}

/// An oriented surface with chart, unit normal and shape derivative.
#[derive(Debug, Clone)]
pub struct Surface {
    geometry: Geometry,
}

impl Surface {
    /// The plane `{(x1, x2, 0)}` with upward normal.
    pub fn plane() -> Self {
        Surface { geometry: Geometry::Plane }
    }

    /// Sphere of radius `r` centred at the origin in the standard spherical
    /// chart. The outer side has normal `x/r`, the inner side `-x/r`.
    pub fn sphere(radius: f64, side: Side) -> Result<Self, ConnectionError> {
        Ok(Self::sphere_with_chart(SphereChart::new(radius)?, side))
    }

    pub fn sphere_with_chart(chart: SphereChart, side: Side) -> Self {
        Surface { geometry: Geometry::Sphere { chart, side } }
    }

    /// Surface from a chart closure. Without an analytic normal, the normal is
    /// the normalized cross product of the chart partials.
    pub fn parametric<F>(chart: F, normal: Option<ChartFn>) -> Self
    where
        F: Fn([f64; 2]) -> Vec3 + Send + Sync + 'static,
    {
        Surface {
            geometry: Geometry::Parametric(ParametricSurface { chart: Arc::new(chart), normal }),
        }
    }

    pub fn kind(&self) -> SurfaceKind {
        match &self.geometry {
            Geometry::Plane => SurfaceKind::Plane,
            Geometry::Sphere { chart, side } => SurfaceKind::Sphere { radius: chart.radius, side: *side },
            Geometry::Parametric(_) => SurfaceKind::Parametric,
        }
    }

    pub fn sphere_chart(&self) -> Option<&SphereChart> {
        match &self.geometry {
            Geometry::Sphere { chart, .. } => Some(chart),
            _ => None,
        }
    }

    pub fn point(&self, c: [f64; 2]) -> Vec3 {
        match &self.geometry {
            Geometry::Plane => Vec3::new(c[0], c[1], 0.0),
            Geometry::Sphere { chart, .. } => chart.point(c),
            Geometry::Parametric(p) => (p.chart)(c),
        }
    }

    fn partials(&self, c: [f64; 2]) -> Result<(Vec3, Vec3), ConnectionError> {
        match &self.geometry {
            Geometry::Plane => Ok((Vec3::x(), Vec3::y())),
            Geometry::Sphere { chart, .. } => {
                chart.check(c)?;
                Ok(chart.partials(c))
            }
            Geometry::Parametric(p) => {
                let chart = |q: [f64; 2]| Ok((p.chart)(q));
                Ok((
                    five_point(chart, c, 0, SURFACE_FD_STEP)?,
                    five_point(chart, c, 1, SURFACE_FD_STEP)?,
                ))
            }
        }
    }

    /// Push-forward of the chart vector `v` at chart point `c`.
    pub fn tangent_map(&self, c: [f64; 2], v: [f64; 2]) -> Result<Vec3, ConnectionError> {
        let (d1, d2) = self.partials(c)?;
        let area = d1.cross(&d2).norm();
        if !(area > 1e-12 * (d1.norm() * d2.norm()).max(f64::MIN_POSITIVE)) {
            return Err(ConnectionError::ChartSingular { theta: c[0], phi: c[1] });
        }
        Ok(d1 * v[0] + d2 * v[1])
    }

    /// Unit normal at chart point `c`.
    pub fn normal(&self, c: [f64; 2]) -> Result<Vec3, ConnectionError> {
        match &self.geometry {
            Geometry::Plane => Ok(Vec3::z()),
            Geometry::Sphere { chart, side } => {
                chart.check(c)?;
                Ok(chart.point(c) * (side.sign() / chart.radius))
            }
            Geometry::Parametric(p) => match &p.normal {
                Some(n) => Ok(n(c)),
                None => {
                    let (d1, d2) = self.partials(c)?;
                    d1.cross(&d2)
                        .try_normalize(1e-300)
                        .ok_or(ConnectionError::ChartSingular { theta: c[0], phi: c[1] })
                }
            },
        }
    }

    /// `Dn(x)(V)` for `x` the point at chart coordinates `c` and `V` the
    /// push-forward of the chart vector `v`.
    pub fn shape_derivative(&self, c: [f64; 2], v: [f64; 2]) -> Result<Vec3, ConnectionError> {
        match &self.geometry {
            Geometry::Plane => Ok(Vec3::zeros()),
            Geometry::Sphere { chart, side } => {
                Ok(self.tangent_map(c, v)? * (side.sign() / chart.radius))
            }
            Geometry::Parametric(_) => {
                let n = |q: [f64; 2]| self.normal(q);
                let d1 = five_point(n, c, 0, NORMAL_FD_STEP)?;
                let d2 = five_point(n, c, 1, NORMAL_FD_STEP)?;
                Ok(d1 * v[0] + d2 * v[1])
            }
        }
    }
}

/// Sphere of radius `r` with the rolling ball on the given side.
pub fn sphere_surface(radius: f64, side: Side) -> Result<Surface, ConnectionError> {
    Surface::sphere(radius, side)
}
