//! Local and total connection forms on trivial SO(3)-bundles.
//!
//! A [`LocalConnectionForm`] `ω` maps a base point `x` and a base tangent `v`
//! to an element of so(3) in axis-vector form. The catalog covers the natural
//! connection on so(3) × SO(3) (`ω_x(v) = -v`), the sphere rolling on a plane,
//! the sphere rolling on an oriented surface, and pullbacks along linear maps.
//!
//! Curvature is `Ω = dω + ½[ω, ω]`, with `½[ω, ω](u, v) = [ω(u), ω(v)]`.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lie::{hat, vee_antisymmetric, LieError, Mat3, Rotation, SquareMatrix, Vec3};
use crate::surface::{Side, Surface, SurfaceKind};

/// Default central-difference step for [`curvature_numeric`].
pub const DEFAULT_CURVATURE_STEP: f64 = 1e-4;
/// Tolerance on the skew part when checking that `ξ` is tangent at `g`.
pub const TANGENCY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConnectionError {
    #[error("expected a base vector of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("chart is singular at ({theta}, {phi})")]
    ChartSingular { theta: f64, phi: f64 },
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),
    #[error("group tangent is not tangent at g (g^-1 xi asymmetry {0:.3e})")]
    NonTangent(f64),
    #[error("no closed-form curvature for {0}")]
    NoClosedForm(FormDescriptor),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// Catalog tag of a connection form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FormDescriptor {
    NaturalSo3,
    PlaneRolling,
    SphereOuter { radius: f64 },
    SphereInner { radius: f64 },
    ParametricSurface,
    Pullback,
}

impl fmt::Display for FormDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormDescriptor::NaturalSo3 => write!(f, "natural-so3"),
            FormDescriptor::PlaneRolling => write!(f, "plane-rolling"),
            FormDescriptor::SphereOuter { radius } => write!(f, "sphere-outer({radius})"),
            FormDescriptor::SphereInner { radius } => write!(f, "sphere-inner({radius})"),
            FormDescriptor::ParametricSurface => write!(f, "parametric-surface"),
            FormDescriptor::Pullback => write!(f, "pullback"),
        }
    }
}

#[derive(Debug, Clone)]
enum FormKind {
    Natural,
    PlaneRolling,
    Surface(Surface),
    Pullback { map: DMatrix<f64>, inner: Box<LocalConnectionForm> },
}

/// so(3)-valued 1-form on the base of a trivial SO(3)-bundle.
#[derive(Debug, Clone)]
pub struct LocalConnectionForm {
    base_dim: usize,
    kind: FormKind,
}

impl LocalConnectionForm {
    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn descriptor(&self) -> FormDescriptor {
        match &self.kind {
            FormKind::Natural => FormDescriptor::NaturalSo3,
            FormKind::PlaneRolling => FormDescriptor::PlaneRolling,
            FormKind::Surface(s) => match s.kind() {
                SurfaceKind::Sphere { radius, side: Side::Outer } => FormDescriptor::SphereOuter { radius },
                SurfaceKind::Sphere { radius, side: Side::Inner } => FormDescriptor::SphereInner { radius },
                SurfaceKind::Plane | SurfaceKind::Parametric => FormDescriptor::ParametricSurface,
            },
            FormKind::Pullback { .. } => FormDescriptor::Pullback,
        }
    }

    /// The surface behind a surface-rolling form.
    pub fn surface(&self) -> Option<&Surface> {
        match &self.kind {
            FormKind::Surface(s) => Some(s),
            _ => None,
        }
    }

    fn check_dim(&self, got: usize) -> Result<(), ConnectionError> {
        if got != self.base_dim {
            return Err(ConnectionError::DimensionMismatch { expected: self.base_dim, got });
        }
        Ok(())
    }

    /// `ω_x(v)` in axis-vector form.
    pub fn evaluate(&self, x: &[f64], v: &[f64]) -> Result<Vec3, ConnectionError> {
        self.check_dim(x.len())?;
        self.check_dim(v.len())?;
        match &self.kind {
            FormKind::Natural => Ok(-Vec3::new(v[0], v[1], v[2])),
            FormKind::PlaneRolling => {
                let j = j_plane([v[0], v[1]]);
                Ok(-Vec3::new(j[0], j[1], 0.0))
            }
            FormKind::Surface(s) => {
                let (c, w) = ([x[0], x[1]], [v[0], v[1]]);
                let tangent = s.tangent_map(c, w)?;
                let rolled = tangent + s.shape_derivative(c, w)?;
                Ok(-s.normal(c)?.cross(&rolled))
            }
            FormKind::Pullback { map, inner } => {
                let fx = map * nalgebra::DVector::from_column_slice(x);
                let fv = map * nalgebra::DVector::from_column_slice(v);
                inner.evaluate(fx.as_slice(), fv.as_slice())
            }
        }
    }
}

/// The natural connection on so(3) × SO(3): `ω_x(v) = -v`.
pub fn natural_form() -> LocalConnectionForm {
    LocalConnectionForm { base_dim: 3, kind: FormKind::Natural }
}

/// Quarter turn of the plane, `J(x1, x2) = (x2, -x1)`.
pub fn j_plane(v: [f64; 2]) -> [f64; 2] {
    [v[1], -v[0]]
}

/// Sphere rolling on the plane `{(x1, x2, 0)}`: `ω_x(v) = -(J(v), 0)`.
pub fn plane_rolling_form() -> LocalConnectionForm {
    LocalConnectionForm { base_dim: 2, kind: FormKind::PlaneRolling }
}

/// Sphere rolling on a surface: `ω_x(v) = -n(x) × (v + Dn(x)(v))`, with base
/// points in chart coordinates.
pub fn surface_rolling_form(surface: Surface) -> LocalConnectionForm {
    LocalConnectionForm { base_dim: 2, kind: FormKind::Surface(surface) }
}

/// Pullback of `inner` (base R³) along the linear map `map: R^d → R³`, given
/// as a 3×d matrix. A linear map is its own derivative, so
/// `(f*ω)_x(v) = ω_{f(x)}(f(v))`.
pub fn pullback_form(
    map: DMatrix<f64>,
    inner: LocalConnectionForm,
) -> Result<LocalConnectionForm, ConnectionError> {
    if inner.base_dim != 3 {
        return Err(ConnectionError::DimensionMismatch { expected: 3, got: inner.base_dim });
    }
    if map.nrows() != 3 {
        return Err(ConnectionError::DimensionMismatch { expected: 3, got: map.nrows() });
    }
    Ok(LocalConnectionForm {
        base_dim: map.ncols(),
        kind: FormKind::Pullback { map, inner: Box::new(inner) },
    })
}

/// The map `x ↦ (J(x), 0)` from R² into so(3) ≅ R³.
pub fn rho_j_map() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 2, &[0.0, 1.0, -1.0, 0.0, 0.0, 0.0])
}

/// The natural connection form on so(3) × SO(3):
/// `α_(x,g)(v, ξ) = vee(g⁻¹ ξ) - vee(g⁻¹ hat(v) g)`, where `ξ` is a tangent
/// vector at `g` in matrix form.
pub fn natural_alpha(_x: &Vec3, g: &Rotation, v: &Vec3, xi: &Mat3) -> Result<Vec3, ConnectionError> {
    let g_inv = g.matrix().transpose();
    let body = g_inv * xi;
    let asym = (body + body.transpose()).amax();
    if !(asym <= TANGENCY_TOL) {
        return Err(ConnectionError::NonTangent(asym));
    }
    let conj = g_inv * hat(v).matrix() * g.matrix();
    Ok(vee_antisymmetric(&body) - vee_antisymmetric(&conj))
}

/// Connection form on the total space `base × SO(3)` induced by a local form:
/// `α_(x,g)(v, ξ) = g⁻¹ξ + Ad_{g⁻¹} ω_x(v)`.
#[derive(Debug, Clone)]
pub struct TotalConnectionForm {
    local: LocalConnectionForm,
}

impl TotalConnectionForm {
    pub fn new(local: LocalConnectionForm) -> Self {
        TotalConnectionForm { local }
    }

    pub fn local(&self) -> &LocalConnectionForm {
        &self.local
    }

    pub fn evaluate(&self, x: &[f64], g: &Rotation, v: &[f64], xi: &Mat3) -> Result<Vec3, ConnectionError> {
        let body = g.matrix().transpose() * xi;
        let asym = (body + body.transpose()).amax();
        if !(asym <= TANGENCY_TOL) {
            return Err(ConnectionError::NonTangent(asym));
        }
        let omega = self.local.evaluate(x, v)?;
        Ok(vee_antisymmetric(&body) + g.inverse().adjoint(&omega))
    }

    /// The horizontal lift of the base tangent `v` at `(x, g)`, as a group
    /// tangent in matrix form: `hat(-ω_x(v)) g`.
    pub fn horizontal_lift(&self, x: &[f64], g: &Rotation, v: &[f64]) -> Result<Mat3, ConnectionError> {
        let omega = self.local.evaluate(x, v)?;
        Ok(hat(&-omega).matrix() * g.matrix())
    }
}

fn embed(v: &[f64]) -> Vec3 {
    match v.len() {
        2 => Vec3::new(v[0], v[1], 0.0),
        _ => Vec3::new(v[0], v[1], v[2]),
    }
}

/// Curvature of a catalog form from its known closed expression.
///
/// Natural: `u × v`. Plane rolling: the cross product of the embedded
/// tangents. Spheres of radius `r` (either side): `(1 - 1/r²) U × V` for the
/// pushed-forward tangents. Pullbacks: the inner curvature at the image.
pub fn curvature_closed_form(
    form: &LocalConnectionForm,
    x: &[f64],
    u: &[f64],
    v: &[f64],
) -> Result<Vec3, ConnectionError> {
    form.check_dim(x.len())?;
    form.check_dim(u.len())?;
    form.check_dim(v.len())?;
    match &form.kind {
        FormKind::Natural | FormKind::PlaneRolling => Ok(embed(u).cross(&embed(v))),
        FormKind::Surface(s) => match s.kind() {
            SurfaceKind::Sphere { radius, .. } => {
                let c = [x[0], x[1]];
                let big_u = s.tangent_map(c, [u[0], u[1]])?;
                let big_v = s.tangent_map(c, [v[0], v[1]])?;
                Ok(big_u.cross(&big_v) * (1.0 - 1.0 / (radius * radius)))
            }
            _ => Err(ConnectionError::NoClosedForm(form.descriptor())),
        },
        FormKind::Pullback { map, inner } => {
            let apply = |w: &[f64]| map * nalgebra::DVector::from_column_slice(w);
            curvature_closed_form(inner, apply(x).as_slice(), apply(u).as_slice(), apply(v).as_slice())
                .map_err(|e| match e {
                    ConnectionError::NoClosedForm(_) => ConnectionError::NoClosedForm(FormDescriptor::Pullback),
                    other => other,
                })
        }
    }
}

fn shifted(x: &[f64], dir: &[f64], s: f64) -> Vec<f64> {
    x.iter().zip(dir).map(|(a, d)| a + s * d).collect()
}

/// `dω(u, v)` for constant coordinate fields `u`, `v`, by central differences
/// of step `h`.
pub fn exterior_derivative_numeric(
    form: &LocalConnectionForm,
    x: &[f64],
    u: &[f64],
    v: &[f64],
    h: f64,
) -> Result<Vec3, ConnectionError> {
    let du_v = (form.evaluate(&shifted(x, u, h), v)? - form.evaluate(&shifted(x, u, -h), v)?) / (2.0 * h);
    let dv_u = (form.evaluate(&shifted(x, v, h), u)? - form.evaluate(&shifted(x, v, -h), u)?) / (2.0 * h);
    Ok(du_v - dv_u)
}

/// `Ω(u, v) = dω(u, v) + ω_x(u) × ω_x(v)` with `dω` by central differences.
pub fn curvature_numeric(
    form: &LocalConnectionForm,
    x: &[f64],
    u: &[f64],
    v: &[f64],
    h: f64,
) -> Result<Vec3, ConnectionError> {
    let d_omega = exterior_derivative_numeric(form, x, u, v, h)?;
    Ok(d_omega + form.evaluate(x, u)?.cross(&form.evaluate(x, v)?))
}

/// Generic-matrix counterpart of `natural_alpha` for an arbitrary matrix Lie
/// algebra: `g⁻¹ξ - g⁻¹ v g`.
pub fn natural_alpha_matrix(
    g: &SquareMatrix,
    v: &SquareMatrix,
    xi: &SquareMatrix,
) -> Result<SquareMatrix, ConnectionError> {
    if g.dim() != v.dim() || g.dim() != xi.dim() {
        return Err(LieError::DimensionMismatch(g.dim(), v.dim().max(xi.dim())).into());
    }
    let g_inv = g
        .matrix()
        .clone()
        .try_inverse()
        .ok_or(ConnectionError::DegenerateGeometry("singular group element"))?;
    let value = &g_inv * xi.matrix() - &g_inv * v.matrix() * g.matrix();
    Ok(SquareMatrix::new(value)?)
}
