//! Parallel transport by integrating `g' = a(t) g` with
//! `a(t) = -ω_{c(t)}(c'(t))`, holonomy, ordered products of exponentials, and
//! small-loop curvature estimates.
//!
//! Every step multiplies by an exact rotation `exp(Δt a(t*))`, so the result
//! stays on the group up to roundoff without any projection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connections::{ConnectionError, LocalConnectionForm};
use crate::lie::{exp_so3, log_so3, project_rotation, quat_exp, LieError, Mat3, Rotation, UnitQuat, Vec3};
use crate::paths::{parallelogram_loop, PathError, PathSpec, CLOSURE_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransportError {
    #[error("form expects base dimension {expected}, path has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite velocity or integrand at t = {0}")]
    NonFinite(f64),
    #[error("path is not closed (gap {0:.3e})")]
    NotClosed(f64),
    #[error("step count must be at least 1")]
    NoSteps,
    #[error("loop holonomy angle {0:.3} is too large for a small-loop estimate")]
    LoopTooLarge(f64),
    #[error("reference not converged: errors {0:.3e} then {1:.3e}")]
    NotConverged(f64, f64),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    LieEuler,
    ExpMidpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub steps: usize,
    /// Re-project onto the group every this many steps; 0 never does.
    pub renormalize_every: usize,
    /// Record a sample every this many steps; 0 keeps only the endpoints.
    pub sample_stride: usize,
    /// Keep the integrand value of every step.
    pub record_inputs: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::ExpMidpoint,
            steps: 10_000,
            renormalize_every: 0,
            sample_stride: 0,
            record_inputs: false,
        }
    }
}

impl IntegratorConfig {
    pub fn new(method: Method, steps: usize) -> Self {
        IntegratorConfig { method, steps, ..Default::default() }
    }

    pub fn with_stride(self, sample_stride: usize) -> Self {
        IntegratorConfig { sample_stride, ..self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<G> {
    pub t: f64,
    pub x: Vec<f64>,
    pub g: G,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult<G> {
    pub final_value: G,
    pub samples: Vec<Sample<G>>,
    pub inputs: Option<Vec<Vec3>>,
}

/// Integration intervals `(t_k, t_{k+1}, piece_mid)`: every piece of the
/// path gets a share of the steps proportional to its parameter length, at
/// least one, so corners are always nodes.
fn nodes(c: &PathSpec, steps: usize) -> Vec<(f64, f64, f64)> {
    let b = c.breakpoints();
    let mut out = Vec::with_capacity(steps + b.len());
    for w in b.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let n = ((steps as f64 * (hi - lo)).round() as usize).max(1);
        let mid = 0.5 * (lo + hi);
        for k in 0..n {
            let t0 = lo + (hi - lo) * k as f64 / n as f64;
            let t1 = if k + 1 == n { hi } else { lo + (hi - lo) * (k + 1) as f64 / n as f64 };
            out.push((t0, t1, mid));
        }
    }
    out
}

fn integrand(form: &LocalConnectionForm, c: &PathSpec, t: f64, within: f64) -> Result<Vec3, TransportError> {
    let x = c.position(t);
    let v = c.velocity_on(t, within);
    if !v.iter().chain(&x).all(|a| a.is_finite()) {
        return Err(TransportError::NonFinite(t));
    }
    let a = -form.evaluate(&x, &v)?;
    if !a.iter().all(|a| a.is_finite()) {
        return Err(TransportError::NonFinite(t));
    }
    Ok(a)
}

/// Shared stepping loop; `advance(g, Δt·a)` applies one factor.
fn integrate<G: Clone>(
    c: &PathSpec,
    g0: G,
    cfg: &IntegratorConfig,
    mut a_at: impl FnMut(f64, f64) -> Result<Vec3, TransportError>,
    mut advance: impl FnMut(&G, Vec3) -> G,
    mut renormalize: impl FnMut(&G) -> Result<G, TransportError>,
) -> Result<TransportResult<G>, TransportError> {
    if cfg.steps == 0 {
        return Err(TransportError::NoSteps);
    }
    let grid = nodes(c, cfg.steps);
    let mut g = g0;
    let mut samples = vec![Sample { t: 0.0, x: c.position(0.0), g: g.clone() }];
    let mut inputs = cfg.record_inputs.then(|| Vec::with_capacity(grid.len()));
    for (k, &(t0, t1, within)) in grid.iter().enumerate() {
        let dt = t1 - t0;
        let t_star = match cfg.method {
            Method::LieEuler => t0,
            Method::ExpMidpoint => t0 + 0.5 * dt,
        };
        let a = a_at(t_star, within)?;
        if let Some(log) = inputs.as_mut() {
            log.push(a);
        }
        g = advance(&g, a * dt);
        let done = k + 1;
        if cfg.renormalize_every > 0 && done % cfg.renormalize_every == 0 {
            g = renormalize(&g)?;
        }
        let last = done == grid.len();
        if last || (cfg.sample_stride > 0 && done % cfg.sample_stride == 0) {
            samples.push(Sample { t: t1, x: c.position(t1), g: g.clone() });
        }
    }
    Ok(TransportResult { final_value: g, samples, inputs })
}

/// Transport of `g0` along `c` under the local form `form`.
pub fn transport(
    form: &LocalConnectionForm,
    c: &PathSpec,
    g0: &Rotation,
    cfg: &IntegratorConfig,
) -> Result<TransportResult<Rotation>, TransportError> {
    if form.base_dim() != c.base_dim() {
        return Err(TransportError::DimensionMismatch { expected: form.base_dim(), got: c.base_dim() });
    }
    let result = integrate(
        c,
        *g0.matrix(),
        cfg,
        |t, within| integrand(form, c, t, within),
        |g: &Mat3, step| exp_so3(&step).matrix() * g,
        |g: &Mat3| Ok(*project_rotation(g)?.matrix()),
    )?;
    let wrap = Rotation::from_matrix_unchecked;
    Ok(TransportResult {
        final_value: wrap(result.final_value),
        samples: result.samples.into_iter().map(|s| Sample { t: s.t, x: s.x, g: wrap(s.g) }).collect(),
        inputs: result.inputs,
    })
}

/// Transport on S³ for the natural connection on Im(H) × S³, with base
/// points in imaginary-quaternion coordinates.
pub fn transport_quat(
    c: &PathSpec,
    g0: &UnitQuat,
    cfg: &IntegratorConfig,
) -> Result<TransportResult<UnitQuat>, TransportError> {
    if c.base_dim() != 3 {
        return Err(TransportError::DimensionMismatch { expected: 3, got: c.base_dim() });
    }
    integrate(
        c,
        *g0,
        cfg,
        |t, within| {
            let v = c.velocity_on(t, within);
            let a = Vec3::new(v[0], v[1], v[2]);
            if a.iter().all(|x| x.is_finite()) {
                Ok(a)
            } else {
                Err(TransportError::NonFinite(t))
            }
        },
        |q: &UnitQuat, step| quat_exp(&step) * *q,
        |q: &UnitQuat| Ok(q.renormalized()),
    )
}

/// Transport around a closed loop starting from the identity.
pub fn holonomy(form: &LocalConnectionForm, c: &PathSpec, cfg: &IntegratorConfig) -> Result<Rotation, TransportError> {
    if !c.closed() {
        let gap = c.position(0.0).iter().zip(c.position(1.0)).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        return Err(TransportError::NotClosed(gap.max(CLOSURE_TOL)));
    }
    Ok(transport(form, c, &Rotation::identity(), cfg)?.final_value)
}

/// `exp(Δ a_{n-1}) ··· exp(Δ a_0)` with `a_k = a(k/n)` on a uniform grid,
/// later factors on the left.
pub fn time_ordered_product(form: &LocalConnectionForm, c: &PathSpec, n: usize) -> Result<Rotation, TransportError> {
    if n == 0 {
        return Err(TransportError::NoSteps);
    }
    if form.base_dim() != c.base_dim() {
        return Err(TransportError::DimensionMismatch { expected: form.base_dim(), got: c.base_dim() });
    }
    let dt = 1.0 / n as f64;
    let mut g = Mat3::identity();
    for k in 0..n {
        let t = k as f64 * dt;
        let a = integrand(form, c, t, t + 0.5 * dt)?;
        g = exp_so3(&(a * dt)).matrix() * g;
    }
    Ok(Rotation::from_matrix_unchecked(g))
}

fn loop_estimate(
    form: &LocalConnectionForm,
    x: &[f64],
    u: &[f64],
    v: &[f64],
    eps: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec3, TransportError> {
    let c = parallelogram_loop(x, u, v, eps)?;
    let hol = holonomy(form, &c, cfg)?;
    let angle = hol.angle();
    if angle >= std::f64::consts::FRAC_PI_2 {
        return Err(TransportError::LoopTooLarge(angle));
    }
    Ok(-log_so3(&hol)? / (eps * eps))
}

/// Curvature `Ω_x(u, v)` estimated from the holonomy `h` around the
/// parallelogram of side scale `ε`, which is `exp(-ε² Ω) + O(ε³)`; the
/// estimate is `-log(h)/ε²`. With `richardson`, `2E(ε/2) - E(ε)` cancels the
/// first-order term.
pub fn small_loop_curvature(
    form: &LocalConnectionForm,
    x: &[f64],
    u: &[f64],
    v: &[f64],
    eps: f64,
    cfg: &IntegratorConfig,
    richardson: bool,
) -> Result<Vec3, TransportError> {
    let coarse = loop_estimate(form, x, u, v, eps, cfg)?;
    if !richardson {
        return Ok(coarse);
    }
    let fine = loop_estimate(form, x, u, v, eps / 2.0, cfg)?;
    Ok(fine * 2.0 - coarse)
}

fn group_commutator_log(xi: &Vec3, eta: &Vec3, t: f64) -> Result<Vec3, LieError> {
    let a = exp_so3(&(xi * t));
    let b = exp_so3(&(eta * t));
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    // A B A⁻¹ B⁻¹ = I + (AB - BA)(BA)ᵀ, exactly I when the factors commute
    let k = Mat3::identity() + (ab - ba) * ba.transpose();
    log_so3(&Rotation::from_matrix_unchecked(k))
}

/// `[ξ, η]` from the group commutator `exp(tξ)exp(tη)exp(-tξ)exp(-tη)`,
/// whose log is `t²[ξ,η] + O(t³)`. The odd term is removed by averaging the
/// estimates at `t` and `-t`.
pub fn commutator_by_flows(xi: &Vec3, eta: &Vec3, t: f64) -> Result<Vec3, TransportError> {
    let plus = group_commutator_log(xi, eta, t)?;
    let minus = group_commutator_log(xi, eta, -t)?;
    Ok((plus + minus) / (2.0 * t * t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderStudy {
    pub steps: usize,
    pub error_n: f64,
    pub error_2n: f64,
    /// `log2(error_n / error_2n)`; infinite when both errors are at roundoff.
    pub order: f64,
}

/// Below this Frobenius error the integration is exact to roundoff.
pub const ROUNDOFF_ERROR: f64 = 1e-13;

/// Observed order of `method` at `n` and `2n` steps against an exp-midpoint
/// reference at `16n` steps.
pub fn convergence_order(
    form: &LocalConnectionForm,
    c: &PathSpec,
    method: Method,
    n: usize,
) -> Result<OrderStudy, TransportError> {
    let id = Rotation::identity();
    let run = |m: Method, steps: usize| transport(form, c, &id, &IntegratorConfig::new(m, steps));
    let reference = run(Method::ExpMidpoint, 16 * n)?.final_value;
    let error_n = run(method, n)?.final_value.distance(&reference);
    let error_2n = run(method, 2 * n)?.final_value.distance(&reference);
    if error_n <= ROUNDOFF_ERROR && error_2n <= ROUNDOFF_ERROR {
        return Ok(OrderStudy { steps: n, error_n, error_2n, order: f64::INFINITY });
    }
    if !(error_2n < error_n) {
        return Err(TransportError::NotConverged(error_n, error_2n));
    }
    Ok(OrderStudy { steps: n, error_n, error_2n, order: (error_n / error_2n).log2() })
}
