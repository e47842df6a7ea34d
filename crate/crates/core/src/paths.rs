//! Parametrized base curves `c: [0, 1] → R^d`.
//!
//! Catalog paths carry analytic velocities. Piecewise paths record their
//! corner parameters so integrators can place nodes there; at a corner the
//! velocity is ambiguous, so [`PathSpec::velocity_on`] takes a second
//! parameter inside the piece whose velocity is wanted.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lie::Vec3;
use crate::surface::SphereChart;

/// `‖c(1) - c(0)‖` below which a path counts as closed.
pub const CLOSURE_TOL: f64 = 1e-9;
/// Central-difference step for custom paths without an analytic velocity.
pub const VELOCITY_FD_STEP: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("degenerate path parameters: {0}")]
    Degenerate(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("paths do not join: gap {0:.3e}")]
    NotJoined(f64),
    #[error("reparametrization must be increasing with φ(0) = 0 and φ(1) = 1")]
    BadReparametrization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathTag {
    Constant,
    Line,
    Segment,
    Circle,
    ParallelogramLoop,
    GreatArc,
    Polyline,
    Custom,
    Concat,
    Reversed,
    Reparametrized,
    LinearImage,
}

type PosFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;
type VelFn = Arc<dyn Fn(f64, f64) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub struct PathSpec {
    base_dim: usize,
    tag: PathTag,
    position: PosFn,
    velocity: VelFn,
    corners: Vec<f64>,
    closed: bool,
}

impl fmt::Debug for PathSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PathSpec")
            .field("base_dim", &self.base_dim)
            .field("tag", &self.tag)
            .field("corners", &self.corners)
            .field("closed", &self.closed)
            .finish()
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

impl PathSpec {
    fn build(base_dim: usize, tag: PathTag, position: PosFn, velocity: VelFn, corners: Vec<f64>) -> Self {
        let closed = dist(&position(0.0), &position(1.0)) <= CLOSURE_TOL;
        PathSpec { base_dim, tag, position, velocity, corners, closed }
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn tag(&self) -> PathTag {
        self.tag
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    /// Interior corner parameters, strictly increasing in `(0, 1)`.
    pub fn corners(&self) -> &[f64] {
        &self.corners
    }

    pub fn position(&self, t: f64) -> Vec<f64> {
        (self.position)(t)
    }

    pub fn velocity(&self, t: f64) -> Vec<f64> {
        (self.velocity)(t, t)
    }

    /// Velocity at `t` of the piece containing `within`.
    pub fn velocity_on(&self, t: f64, within: f64) -> Vec<f64> {
        (self.velocity)(t, within)
    }

    /// `[0, corners.., 1]`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(self.corners.len() + 2);
        b.push(0.0);
        b.extend_from_slice(&self.corners);
        b.push(1.0);
        b
    }

    /// Largest jump between consecutive samples of `n` evenly spaced
    /// parameters; a cheap continuity probe.
    pub fn max_sample_jump(&self, n: usize) -> f64 {
        let n = n.max(1);
        let mut prev = self.position(0.0);
        let mut worst: f64 = 0.0;
        for k in 1..=n {
            let next = self.position(k as f64 / n as f64);
            worst = worst.max(dist(&prev, &next));
            prev = next;
        }
        worst
    }
}

/// The constant path at `x`.
pub fn constant(x: &[f64]) -> PathSpec {
    let p = x.to_vec();
    let d = p.len();
    PathSpec::build(
        d,
        PathTag::Constant,
        Arc::new(move |_| p.clone()),
        Arc::new(move |_, _| vec![0.0; d]),
        Vec::new(),
    )
}

/// `c(t) = x0 + t ξ`.
pub fn line(x0: &[f64], xi: &[f64]) -> Result<PathSpec, PathError> {
    if x0.len() != xi.len() {
        return Err(PathError::DimensionMismatch { expected: x0.len(), got: xi.len() });
    }
    if x0.is_empty() || !finite(x0) || !finite(xi) {
        return Err(PathError::Degenerate("line needs finite, nonempty vectors"));
    }
    let (a, b) = (x0.to_vec(), xi.to_vec());
    let v = xi.to_vec();
    Ok(PathSpec::build(
        a.len(),
        PathTag::Line,
        Arc::new(move |t| a.iter().zip(&b).map(|(p, q)| p + t * q).collect()),
        Arc::new(move |_, _| v.clone()),
        Vec::new(),
    ))
}

/// The straight segment from `p` to `q`.
pub fn segment(p: &[f64], q: &[f64]) -> Result<PathSpec, PathError> {
    if p.len() != q.len() {
        return Err(PathError::DimensionMismatch { expected: p.len(), got: q.len() });
    }
    let xi: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
    let mut path = line(p, &xi)?;
    path.tag = PathTag::Segment;
    Ok(path)
}

/// Piecewise-linear path through `points`, with knots spaced by arclength.
pub fn polyline(points: &[Vec<f64>]) -> Result<PathSpec, PathError> {
    if points.len() < 2 {
        return Err(PathError::Degenerate("polyline needs at least two points"));
    }
    let d = points[0].len();
    if d == 0 {
        return Err(PathError::Degenerate("polyline points are empty"));
    }
    for p in points {
        if p.len() != d {
            return Err(PathError::DimensionMismatch { expected: d, got: p.len() });
        }
        if !finite(p) {
            return Err(PathError::Degenerate("polyline point is not finite"));
        }
    }
    let lengths: Vec<f64> = points.windows(2).map(|w| dist(&w[0], &w[1])).collect();
    if lengths.contains(&0.0) {
        return Err(PathError::Degenerate("consecutive polyline points must be distinct"));
    }
    let total: f64 = lengths.iter().sum();
    let mut knots = vec![0.0];
    let mut acc = 0.0;
    for l in &lengths[..lengths.len() - 1] {
        acc += l;
        knots.push(acc / total);
    }
    knots.push(1.0);
    polyline_with_knots(points, knots)
}

/// Piecewise-linear path visiting `points[k]` at parameter `knots[k]`.
/// Knots must increase strictly from 0 to 1.
pub fn polyline_with_knots(points: &[Vec<f64>], knots: Vec<f64>) -> Result<PathSpec, PathError> {
    let n = points.len();
    if n < 2 || knots.len() != n {
        return Err(PathError::Degenerate("one knot per polyline point"));
    }
    if knots[0] != 0.0 || knots[n - 1] != 1.0 || knots.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(PathError::Degenerate("knots must increase strictly from 0 to 1"));
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d) {
        return Err(PathError::Degenerate("ragged polyline points"));
    }
    let pts: Arc<Vec<Vec<f64>>> = Arc::new(points.to_vec());
    let ks: Arc<Vec<f64>> = Arc::new(knots.clone());
    let piece = {
        let ks = ks.clone();
        move |s: f64| -> usize {
            // last k with knots[k] <= s, kept inside [0, n - 2]
            let idx = ks.partition_point(|&k| k <= s);
            idx.saturating_sub(1).min(ks.len() - 2)
        }
    };
    let piece = Arc::new(piece);
    let position = {
        let (pts, ks, piece) = (pts.clone(), ks.clone(), piece.clone());
        Arc::new(move |t: f64| {
            let k = piece(t);
            let s = (t - ks[k]) / (ks[k + 1] - ks[k]);
            pts[k].iter().zip(&pts[k + 1]).map(|(a, b)| a + s * (b - a)).collect()
        })
    };
    let velocity = {
        let (pts, ks, piece) = (pts.clone(), ks.clone(), piece.clone());
        Arc::new(move |_t: f64, within: f64| {
            let k = piece(within);
            let h = ks[k + 1] - ks[k];
            pts[k].iter().zip(&pts[k + 1]).map(|(a, b)| (b - a) / h).collect()
        })
    };
    Ok(PathSpec::build(d, PathTag::Polyline, position, velocity, knots[1..n - 1].to_vec()))
}

/// The loop `x → x+εu → x+εu+εv → x+εv → x`, one quarter of the parameter
/// interval per side.
pub fn parallelogram_loop(x: &[f64], u: &[f64], v: &[f64], eps: f64) -> Result<PathSpec, PathError> {
    if u.len() != x.len() || v.len() != x.len() {
        return Err(PathError::DimensionMismatch { expected: x.len(), got: u.len().max(v.len()) });
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(PathError::Degenerate("parallelogram side scale must be positive"));
    }
    let at = |a: f64, b: f64| -> Vec<f64> {
        x.iter().zip(u).zip(v).map(|((p, du), dv)| p + a * eps * du + b * eps * dv).collect()
    };
    let points = vec![at(0.0, 0.0), at(1.0, 0.0), at(1.0, 1.0), at(0.0, 1.0), x.to_vec()];
    if points.windows(2).any(|w| dist(&w[0], &w[1]) == 0.0) {
        return Err(PathError::Degenerate("parallelogram sides must be nonzero"));
    }
    let mut path = polyline_with_knots(&points, vec![0.0, 0.25, 0.5, 0.75, 1.0])?;
    path.tag = PathTag::ParallelogramLoop;
    // the last vertex is x itself, so the loop closes exactly
    path.closed = true;
    Ok(path)
}

/// Gram–Schmidt on two spanning vectors.
fn orthonormal_pair(e1: &[f64], e2: &[f64]) -> Result<(Vec<f64>, Vec<f64>), PathError> {
    let a = DVector::from_column_slice(e1);
    let b = DVector::from_column_slice(e2);
    let a = a.clone() / a.norm();
    let b = &b - &a * a.dot(&b);
    let nb = b.norm();
    if !a.iter().all(|x| x.is_finite()) || !(nb > 1e-12) {
        return Err(PathError::Degenerate("circle plane vectors must span a plane"));
    }
    Ok((a.as_slice().to_vec(), (b / nb).as_slice().to_vec()))
}

/// One counterclockwise turn of the circle of the given radius about
/// `center`, in the plane spanned by `e1`, `e2` (orthonormalized, `e1` kept).
pub fn circle(center: &[f64], radius: f64, e1: &[f64], e2: &[f64]) -> Result<PathSpec, PathError> {
    let d = center.len();
    if e1.len() != d || e2.len() != d {
        return Err(PathError::DimensionMismatch { expected: d, got: e1.len().max(e2.len()) });
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(PathError::Degenerate("circle radius must be positive"));
    }
    let (a, b) = orthonormal_pair(e1, e2)?;
    let c = center.to_vec();
    let (a2, b2) = (a.clone(), b.clone());
    let mut path = PathSpec::build(
        d,
        PathTag::Circle,
        Arc::new(move |t| {
            let (s, co) = (TAU * t).sin_cos();
            (0..d).map(|i| c[i] + radius * (co * a[i] + s * b[i])).collect()
        }),
        Arc::new(move |t, _| {
            let (s, co) = (TAU * t).sin_cos();
            (0..d).map(|i| TAU * radius * (-s * a2[i] + co * b2[i])).collect()
        }),
        Vec::new(),
    );
    path.closed = true;
    Ok(path)
}

/// The shorter great-circle arc from the direction of `p` to that of `q` on
/// the sphere of the given radius. Returns the chart in which the arc runs
/// along the equator, `c(t) = (π/2, t·angle)`, together with the chart path.
///
/// For antipodal directions an arbitrary great circle through `p` is used.
pub fn great_arc(radius: f64, p: &Vec3, q: &Vec3) -> Result<(SphereChart, PathSpec), PathError> {
    let (pn, qn) = (p.norm(), q.norm());
    if !(pn > 0.0) || !(qn > 0.0) || !pn.is_finite() || !qn.is_finite() {
        return Err(PathError::Degenerate("great arc endpoints must be nonzero"));
    }
    let angle = (p / pn).dot(&(q / qn)).clamp(-1.0, 1.0).acos();
    if angle == 0.0 {
        return Err(PathError::Degenerate("great arc endpoints must be distinct"));
    }
    let chart = SphereChart::through(radius, p, q).map_err(|_| PathError::Degenerate("great arc chart"))?;
    let mut path = line(&[std::f64::consts::FRAC_PI_2, 0.0], &[0.0, angle])?;
    path.tag = PathTag::GreatArc;
    Ok((chart, path))
}

/// A path from a position function. Without `velocity`, the velocity is the
/// central difference with step [`VELOCITY_FD_STEP`].
pub fn custom<P, V>(base_dim: usize, position: P, velocity: Option<V>) -> Result<PathSpec, PathError>
where
    P: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    V: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
{
    let probe = position(0.0);
    if probe.len() != base_dim {
        return Err(PathError::DimensionMismatch { expected: base_dim, got: probe.len() });
    }
    let position: PosFn = Arc::new(position);
    let velocity: VelFn = match velocity {
        Some(v) => Arc::new(move |t, _| v(t)),
        None => {
            let p = position.clone();
            let h = VELOCITY_FD_STEP;
            Arc::new(move |t, _| {
                let (a, b) = (p(t + h), p(t - h));
                a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect()
            })
        }
    };
    Ok(PathSpec::build(base_dim, PathTag::Custom, position, velocity, Vec::new()))
}

/// `a` on `[0, ½]` followed by `b` on `[½, 1]`.
pub fn concat(a: &PathSpec, b: &PathSpec) -> Result<PathSpec, PathError> {
    if a.base_dim != b.base_dim {
        return Err(PathError::DimensionMismatch { expected: a.base_dim, got: b.base_dim });
    }
    let gap = dist(&a.position(1.0), &b.position(0.0));
    if gap > CLOSURE_TOL {
        return Err(PathError::NotJoined(gap));
    }
    let mut corners: Vec<f64> = a.corners.iter().map(|c| c / 2.0).collect();
    corners.push(0.5);
    corners.extend(b.corners.iter().map(|c| 0.5 + c / 2.0));
    let (pa, pb) = (a.position.clone(), b.position.clone());
    let (va, vb) = (a.velocity.clone(), b.velocity.clone());
    let position: PosFn = Arc::new(move |t| if t < 0.5 { pa(2.0 * t) } else { pb(2.0 * t - 1.0) });
    let velocity: VelFn = Arc::new(move |t, within| {
        let v = if within < 0.5 { va(2.0 * t, 2.0 * within) } else { vb(2.0 * t - 1.0, 2.0 * within - 1.0) };
        v.into_iter().map(|x| 2.0 * x).collect()
    });
    Ok(PathSpec::build(a.base_dim, PathTag::Concat, position, velocity, corners))
}

/// `t ↦ c(1 - t)`.
pub fn reversed(c: &PathSpec) -> PathSpec {
    let (p, v) = (c.position.clone(), c.velocity.clone());
    let corners = c.corners.iter().rev().map(|k| 1.0 - k).collect();
    let mut path = PathSpec::build(
        c.base_dim,
        PathTag::Reversed,
        Arc::new(move |t| p(1.0 - t)),
        Arc::new(move |t, within| v(1.0 - t, 1.0 - within).into_iter().map(|x| -x).collect()),
        corners,
    );
    path.closed = c.closed;
    path
}

/// `t ↦ c(φ(t))` for an increasing `φ` with `φ(0) = 0`, `φ(1) = 1` and
/// derivative `dphi`. Corners are located by bisection.
pub fn reparametrized<F, D>(c: &PathSpec, phi: F, dphi: D) -> Result<PathSpec, PathError>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
    D: Fn(f64) -> f64 + Send + Sync + 'static,
{
    if phi(0.0).abs() > 1e-15 || (phi(1.0) - 1.0).abs() > 1e-15 {
        return Err(PathError::BadReparametrization);
    }
    let probes = 64;
    if (0..probes).any(|k| !(phi((k + 1) as f64 / probes as f64) > phi(k as f64 / probes as f64))) {
        return Err(PathError::BadReparametrization);
    }
    let corners = c
        .corners
        .iter()
        .map(|&target| {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if phi(mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    let phi = Arc::new(phi);
    let (p, v) = (c.position.clone(), c.velocity.clone());
    let phi2 = phi.clone();
    let mut path = PathSpec::build(
        c.base_dim,
        PathTag::Reparametrized,
        Arc::new(move |t| p(phi(t))),
        Arc::new(move |t, within| {
            let s = dphi(t);
            v(phi2(t), phi2(within)).into_iter().map(|x| s * x).collect()
        }),
        corners,
    );
    path.closed = c.closed;
    Ok(path)
}

/// `t ↦ M c(t)` for a linear map `M` given as an `m × d` matrix.
pub fn linear_image(c: &PathSpec, map: &DMatrix<f64>) -> Result<PathSpec, PathError> {
    if map.ncols() != c.base_dim {
        return Err(PathError::DimensionMismatch { expected: c.base_dim, got: map.ncols() });
    }
    let (m1, m2) = (map.clone(), map.clone());
    let (p, v) = (c.position.clone(), c.velocity.clone());
    let apply = |m: &DMatrix<f64>, x: Vec<f64>| (m * DVector::from_vec(x)).as_slice().to_vec();
    let mut path = PathSpec::build(
        map.nrows(),
        PathTag::LinearImage,
        Arc::new(move |t| apply(&m1, p(t))),
        Arc::new(move |t, within| apply(&m2, v(t, within))),
        c.corners.clone(),
    );
    path.closed = path.closed || c.closed;
    Ok(path)
}
