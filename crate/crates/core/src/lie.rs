//! Linear-algebraic kernels for so(3), SO(3), the unit quaternions and
//! general square-matrix algebras.
//!
//! The axis-vector form [`Vec3`] is the canonical representation of an
//! element of so(3); [`SkewMatrix3`] is the matrix view obtained through
//! [`hat`]. Under this identification the cross product is the Lie bracket:
//! `hat(u × v) = [hat(u), hat(v)]`.

use std::fmt;
use std::ops::{Mul, Neg};

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Element of so(3) in axis-vector form, or any vector in R³.
pub type Vec3 = Vector3<f64>;
/// Plain 3×3 real matrix.
pub type Mat3 = Matrix3<f64>;

/// Angles below this use truncated series for the Rodrigues coefficients.
pub const SMALL_ANGLE: f64 = 1e-6;
/// `log_so3` refuses rotations whose angle is within this margin of π.
pub const LOG_PI_MARGIN: f64 = 1e-6;
/// Asymmetry tolerated when reading a matrix as an element of so(3).
pub const SKEW_TOL: f64 = 1e-10;
/// Orthonormality tolerance for validated [`Rotation`] construction.
pub const ROTATION_TOL: f64 = 1e-12;
/// Norm tolerance for validated [`UnitQuat`] construction.
pub const UNIT_QUAT_TOL: f64 = 1e-12;

const EXPM_TERMS: usize = 30;
const EXPM_SCALED_NORM: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("matrix is not skew-symmetric (asymmetry {0:.3e})")]
    NotSkew(f64),
    #[error("matrix is not a rotation (orthonormality defect {defect:.3e}, det {det:.6})")]
    NotRotation { defect: f64, det: f64 },
    #[error("rotation angle {0:.12} is within 1e-6 of pi; the logarithm axis is ill-conditioned")]
    AngleNearPi(f64),
    #[error("dimension mismatch: {0}x{0} against {1}x{1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix must be square with n >= 1, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("quaternion norm {0:.15} is not 1")]
    NotUnit(f64),
    #[error("cannot project a matrix with det {0:.3e} onto SO(3)")]
    ProjectionUndefined(f64),
}

/// A 3×3 matrix that is skew-symmetric by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewMatrix3(Mat3);

impl SkewMatrix3 {
    /// Reads `m` as an element of so(3), rejecting asymmetry above [`SKEW_TOL`].
    ///
    /// The stored matrix is the exact antisymmetric part of `m`.
    pub fn try_from_matrix(m: &Mat3) -> Result<Self, LieError> {
        let defect = (m + m.transpose()).amax();
        if !defect.is_finite() || defect > SKEW_TOL {
            return Err(LieError::NotSkew(defect));
        }
        Ok(SkewMatrix3((m - m.transpose()) * 0.5))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat3 {
        self.0
    }
}

/// The isomorphism (R³, ×) → so(3).
///
/// Rows are `(0, -v3, v2)`, `(v3, 0, -v1)`, `(-v2, v1, 0)`.
pub fn hat(v: &Vec3) -> SkewMatrix3 {
    SkewMatrix3(Mat3::new(
        0.0, -v[2], v[1], //
        v[2], 0.0, -v[0], //
        -v[1], v[0], 0.0,
    ))
}

/// Inverse of [`hat`].
pub fn vee(m: &SkewMatrix3) -> Vec3 {
    let m = &m.0;
    Vec3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// [`vee`] for an unchecked matrix; fails if `m` is not skew.
pub fn vee_checked(m: &Mat3) -> Result<Vec3, LieError> {
    SkewMatrix3::try_from_matrix(m).map(|s| vee(&s))
}

/// Axis vector of the antisymmetric part of `m`, without validation.
pub(crate) fn vee_antisymmetric(m: &Mat3) -> Vec3 {
    Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// `AB - BA` for 3×3 matrices.
pub fn commutator3(a: &Mat3, b: &Mat3) -> Mat3 {
    a * b - b * a
}

/// Square real matrix with finite entries; the carrier for generic matrix
/// Lie groups and algebras.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix(DMatrix<f64>);

impl SquareMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self, LieError> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(LieError::NotSquare(m.nrows(), m.ncols()));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(LieError::NonFinite);
        }
        Ok(SquareMatrix(m))
    }

    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self, LieError> {
        if entries.len() != n * n {
            return Err(LieError::NotSquare(n, entries.len() / n.max(1)));
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn identity(n: usize) -> Self {
        SquareMatrix(DMatrix::identity(n, n))
    }

    pub fn from_mat3(m: &Mat3) -> Self {
        SquareMatrix(DMatrix::from_iterator(3, 3, m.iter().copied()))
    }

    pub fn to_mat3(&self) -> Option<Mat3> {
        (self.dim() == 3).then(|| Mat3::from_iterator(self.0.iter().copied()))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// The matrix Lie bracket `AB - BA`.
pub fn commutator(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix, LieError> {
    if a.dim() != b.dim() {
        return Err(LieError::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(SquareMatrix(&a.0 * &b.0 - &b.0 * &a.0))
}

/// Matrix exponential by scaling and squaring.
///
/// `A` is scaled by `2^-s` with `s` the smallest integer giving a 1-norm of
/// at most 0.5, the exponential of the scaled matrix is summed with a fixed
/// 30-term Taylor series (Horner form), and the result is squared `s` times.
pub fn expm(a: &SquareMatrix) -> SquareMatrix {
    let n = a.dim();
    let norm = a
        .0
        .column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > EXPM_SCALED_NORM {
        scaled_norm *= 0.5;
        squarings += 1;
    }
    let scaled = &a.0 * 0.5f64.powi(squarings as i32);
    let id = DMatrix::<f64>::identity(n, n);
    // I + X/1 (I + X/2 (I + ... (I + X/30)))
    let mut acc = id.clone();
    for k in (1..=EXPM_TERMS).rev() {
        acc = &id + (&scaled * &acc) / k as f64;
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    SquareMatrix(acc)
}

/// Element of SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    /// Validates orthonormality (Frobenius defect of `RᵀR - I` at most
    /// [`ROTATION_TOL`]) and positive determinant.
    pub fn try_from_matrix(m: Mat3) -> Result<Self, LieError> {
        let defect = orthonormality_defect(&m);
        let det = m.determinant();
        if !(defect <= ROTATION_TOL) || det <= 0.0 {
            return Err(LieError::NotRotation { defect, det });
        }
        Ok(Rotation(m))
    }

    /// Wraps a matrix known to be a rotation up to roundoff, such as a product
    /// of rotations.
    pub(crate) fn from_matrix_unchecked(m: Mat3) -> Self {
        Rotation(m)
    }

    /// Row-major entries.
    pub fn from_row_slice(entries: &[f64; 9]) -> Result<Self, LieError> {
        Self::try_from_matrix(Mat3::from_row_slice(entries))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[(0, 0)], m[(0, 1)], m[(0, 2)], //
            m[(1, 0)], m[(1, 1)], m[(1, 2)], //
            m[(2, 0)], m[(2, 1)], m[(2, 2)],
        ]
    }

    pub fn inverse(&self) -> Self {
        Rotation(self.0.transpose())
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Action of `Ad_g` on so(3) in axis-vector form: `g hat(v) g⁻¹ = hat(g v)`.
    pub fn adjoint(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        let s = vee_antisymmetric(&self.0).norm();
        let c = 0.5 * (self.0.trace() - 1.0);
        s.atan2(c)
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &Rotation) -> f64 {
        (self.0 - other.0).norm()
    }

    /// Frobenius norm of `self - I`.
    pub fn distance_to_identity(&self) -> f64 {
        (self.0 - Mat3::identity()).norm()
    }

    pub fn orthonormality_defect(&self) -> f64 {
        orthonormality_defect(&self.0)
    }
}

impl Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Mul<&Rotation> for &Rotation {
    type Output = Rotation;

    fn mul(self, rhs: &Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Frobenius norm of `MᵀM - I`.
pub fn orthonormality_defect(m: &Mat3) -> f64 {
    (m.transpose() * m - Mat3::identity()).norm()
}

/// sin(θ)/θ and (1 - cos θ)/θ² with fourth-order series near zero.
fn rodrigues_coefficients(theta: f64) -> (f64, f64) {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        (
            1.0 - t2 / 6.0 + t2 * t2 / 120.0,
            0.5 - t2 / 24.0 + t2 * t2 / 720.0,
        )
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    }
}

/// Exponential map so(3) → SO(3) (Rodrigues formula).
pub fn exp_so3(v: &Vec3) -> Rotation {
    let theta = v.norm();
    let (a, b) = rodrigues_coefficients(theta);
    let k = hat(v).into_matrix();
    Rotation(Mat3::identity() + k * a + (k * k) * b)
}

/// Principal logarithm SO(3) → so(3) for angles below `π - 1e-6`.
pub fn log_so3(r: &Rotation) -> Result<Vec3, LieError> {
    let axis_sin = vee_antisymmetric(&r.0); // sin(θ) · axis
    let s = axis_sin.norm();
    let c = 0.5 * (r.0.trace() - 1.0);
    let theta = s.atan2(c);
    if theta > std::f64::consts::PI - LOG_PI_MARGIN {
        return Err(LieError::AngleNearPi(theta));
    }
    let factor = if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0
    } else {
        theta / theta.sin()
    };
    Ok(axis_sin * factor)
}

/// Nearest rotation in Frobenius norm (orthogonal polar factor).
///
/// Uses the Newton iteration `X ← (X + X⁻ᵀ)/2`, which converges
/// quadratically to the polar factor of a nonsingular matrix.
pub fn project_rotation(m: &Mat3) -> Result<Rotation, LieError> {
    let det = m.determinant();
    if !det.is_finite() || det <= f64::EPSILON * m.norm().powi(3) {
        return Err(LieError::ProjectionUndefined(det));
    }
    let mut x = *m;
    for _ in 0..100 {
        let inv_t = x
            .try_inverse()
            .ok_or(LieError::ProjectionUndefined(det))?
            .transpose();
        let next = (x + inv_t) * 0.5;
        let step = (next - x).norm();
        x = next;
        if step <= 1e-15 {
            break;
        }
    }
    Ok(Rotation(x))
}

/// Unit quaternion `w + x i + y j + z k`, an element of S³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitQuat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitQuat {
    pub const IDENTITY: UnitQuat = UnitQuat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Validates `w² + x² + y² + z² = 1` within [`UNIT_QUAT_TOL`].
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self, LieError> {
        let n2 = w * w + x * x + y * y + z * z;
        if !((n2 - 1.0).abs() <= UNIT_QUAT_TOL) {
            return Err(LieError::NotUnit(n2.sqrt()));
        }
        Ok(UnitQuat { w, x, y, z })
    }

    /// Normalizes an arbitrary nonzero quaternion.
    pub fn normalized(w: f64, x: f64, y: f64, z: f64) -> Result<Self, LieError> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(LieError::NotUnit(n));
        }
        Ok(UnitQuat { w: w / n, x: x / n, y: y / n, z: z / n })
    }

    pub(crate) fn renormalized(self) -> Self {
        let n = self.norm();
        UnitQuat { w: self.w / n, x: self.x / n, y: self.y / n, z: self.z / n }
    }

    pub fn wxyz(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Imaginary part as a vector.
    pub fn imag(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn conjugate(&self) -> Self {
        UnitQuat { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn inverse(&self) -> Self {
        self.conjugate()
    }

    /// Representative with `w > 0`, or for `w = 0` the first nonzero
    /// component positive.
    pub fn canonical(&self) -> Self {
        let first_nonzero = self
            .wxyz()
            .into_iter()
            .find(|c| *c != 0.0)
            .unwrap_or(1.0);
        if first_nonzero < 0.0 {
            -*self
        } else {
            *self
        }
    }

    /// Rotation `v ↦ Im(q v q⁻¹)`.
    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        let p = UnitQuat { w: 0.0, x: v[0], y: v[1], z: v[2] };
        hamilton(&hamilton(self, &p), &self.conjugate()).imag()
    }

    /// Matrix of left multiplication `p ↦ q p` on H ≅ R⁴ in `(w, x, y, z)`
    /// coordinates.
    pub fn left_matrix(&self) -> Matrix4<f64> {
        left_mult_matrix(self.w, &self.imag())
    }

    /// Distance to `other` up to the sign ambiguity of the double cover.
    pub fn distance_up_to_sign(&self, other: &UnitQuat) -> f64 {
        let a = Vector4::from(self.wxyz());
        let b = Vector4::from(other.wxyz());
        (a - b).norm().min((a + b).norm())
    }

    /// A quaternion covering `r` (Shepperd's method); the sign is arbitrary.
    pub fn from_rotation(r: &Rotation) -> Self {
        let m = r.matrix();
        let tr = m.trace();
        let (w, x, y, z);
        if tr >= m[(0, 0)] && tr >= m[(1, 1)] && tr >= m[(2, 2)] {
            let s = 2.0 * (1.0 + tr).sqrt();
            w = 0.25 * s;
            x = (m[(2, 1)] - m[(1, 2)]) / s;
            y = (m[(0, 2)] - m[(2, 0)]) / s;
            z = (m[(1, 0)] - m[(0, 1)]) / s;
        } else if m[(0, 0)] >= m[(1, 1)] && m[(0, 0)] >= m[(2, 2)] {
            let s = 2.0 * (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt();
            w = (m[(2, 1)] - m[(1, 2)]) / s;
            x = 0.25 * s;
            y = (m[(0, 1)] + m[(1, 0)]) / s;
            z = (m[(0, 2)] + m[(2, 0)]) / s;
        } else if m[(1, 1)] >= m[(2, 2)] {
            let s = 2.0 * (1.0 - m[(0, 0)] + m[(1, 1)] - m[(2, 2)]).sqrt();
            w = (m[(0, 2)] - m[(2, 0)]) / s;
            x = (m[(0, 1)] + m[(1, 0)]) / s;
            y = 0.25 * s;
            z = (m[(1, 2)] + m[(2, 1)]) / s;
        } else {
            let s = 2.0 * (1.0 - m[(0, 0)] - m[(1, 1)] + m[(2, 2)]).sqrt();
            w = (m[(1, 0)] - m[(0, 1)]) / s;
            x = (m[(0, 2)] + m[(2, 0)]) / s;
            y = (m[(1, 2)] + m[(2, 1)]) / s;
            z = 0.25 * s;
        }
        UnitQuat { w, x, y, z }.renormalized()
    }

    /// Unit axis and angle in `[0, π]` of the covered rotation. The axis is
    /// `e1` when the angle is zero.
    pub fn axis_angle(&self) -> (Vec3, f64) {
        let q = self.canonical();
        let s = q.imag().norm();
        if s == 0.0 {
            return (Vec3::x(), 0.0);
        }
        (q.imag() / s, 2.0 * s.atan2(q.w))
    }
}

/// Hamilton product.
pub fn hamilton(a: &UnitQuat, b: &UnitQuat) -> UnitQuat {
    UnitQuat {
        w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    }
}

impl Mul for UnitQuat {
    type Output = UnitQuat;

    fn mul(self, rhs: UnitQuat) -> UnitQuat {
        hamilton(&self, &rhs)
    }
}

impl Neg for UnitQuat {
    type Output = UnitQuat;

    fn neg(self) -> UnitQuat {
        UnitQuat { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
    }
}

/// Left-multiplication matrix of the (not necessarily unit) quaternion
/// `w + u1 i + u2 j + u3 k`.
pub fn left_mult_matrix(w: f64, u: &Vec3) -> Matrix4<f64> {
    let (x, y, z) = (u[0], u[1], u[2]);
    Matrix4::new(
        w, -x, -y, -z, //
        x, w, -z, y, //
        y, z, w, -x, //
        z, -y, x, w,
    )
}

/// Exponential of the pure quaternion `u1 i + u2 j + u3 k`.
pub fn quat_exp(u: &Vec3) -> UnitQuat {
    let theta = u.norm();
    let sinc = if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        theta.sin() / theta
    };
    UnitQuat {
        w: theta.cos(),
        x: u[0] * sinc,
        y: u[1] * sinc,
        z: u[2] * sinc,
    }
}

/// The covering homomorphism S³ → SO(3), `v ↦ Im(q v q⁻¹)`.
pub fn quat_to_rotation(q: &UnitQuat) -> Rotation {
    Rotation(quadratic_cover_matrix(q.w, q.x, q.y, q.z))
}

/// The quadratic form behind [`quat_to_rotation`], valid for any quaternion;
/// equals `|q|²` times the covered rotation.
pub(crate) fn quadratic_cover_matrix(w: f64, x: f64, y: f64, z: f64) -> Mat3 {
    Mat3::new(
        w * w + x * x - y * y - z * z,
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        w * w - x * x + y * y - z * z,
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        w * w - x * x - y * y + z * z,
    )
}

/// Derivative at the identity of the quaternion cover, as a map on
/// axis vectors: `u ↦ 2u`.
pub fn lie_hom_derivative(u: &Vec3) -> Vec3 {
    u * 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// Truncated power series, no scaling; used as an independent oracle.
    fn series_exp3(m: &Mat3, terms: usize) -> Mat3 {
        let mut acc = Mat3::identity();
        let mut term = Mat3::identity();
        for k in 1..terms {
            term = term * m / k as f64;
            acc += term;
        }
        acc
    }

    #[test]
    fn hat_matches_displayed_matrix() {
        assert_eq!(*hat(&Vec3::zeros()).matrix(), Mat3::zeros());
        assert_eq!(
            *hat(&Vec3::new(1.0, 2.0, 3.0)).matrix(),
            Mat3::new(0.0, -3.0, 2.0, 3.0, 0.0, -1.0, -2.0, 1.0, 0.0)
        );
        assert_eq!(
            *hat(&Vec3::x()).matrix(),
            Mat3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0)
        );
    }

    #[test]
    fn vee_inverts_hat_and_rejects_asymmetry() {
        for v in [Vec3::new(1.0, 2.0, 3.0), Vec3::zeros(), Vec3::z()] {
            assert_eq!(vee(&hat(&v)), v);
        }
        let mut m = *hat(&Vec3::new(1.0, 2.0, 3.0)).matrix();
        m[(0, 1)] += 1e-8;
        assert!(matches!(vee_checked(&m), Err(LieError::NotSkew(_))));
        m[(0, 1)] -= 1e-8 - 1e-12;
        assert!(vee_checked(&m).is_ok());
    }

    #[test]
    fn cross_product_examples() {
        assert_eq!(Vec3::x().cross(&Vec3::y()), Vec3::z());
        let u = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(u.cross(&u), Vec3::zeros());
        assert_eq!(u.cross(&Vec3::new(4.0, 5.0, 6.0)), Vec3::new(-3.0, 6.0, -3.0));
    }

    #[test]
    fn commutator_examples() {
        let a = SquareMatrix::from_mat3(hat(&Vec3::x()).matrix());
        let b = SquareMatrix::from_mat3(hat(&Vec3::y()).matrix());
        let c = commutator(&a, &b).unwrap();
        assert_eq!(c.to_mat3().unwrap(), *hat(&Vec3::z()).matrix());
        assert!(commutator(&a, &a).unwrap().matrix().iter().all(|x| *x == 0.0));
        let id = SquareMatrix::identity(3);
        assert!(commutator(&id, &b).unwrap().matrix().iter().all(|x| *x == 0.0));
        assert_eq!(
            commutator(&id, &SquareMatrix::identity(2)),
            Err(LieError::DimensionMismatch(3, 2))
        );
    }

    #[test]
    fn square_matrix_rejects_bad_shapes() {
        assert!(SquareMatrix::new(DMatrix::zeros(2, 3)).is_err());
        assert!(SquareMatrix::new(DMatrix::zeros(0, 0)).is_err());
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = f64::NAN;
        assert_eq!(SquareMatrix::new(m), Err(LieError::NonFinite));
    }

    #[test]
    fn exp_so3_against_series() {
        assert_eq!(*exp_so3(&Vec3::zeros()).matrix(), Mat3::identity());

        let quarter = exp_so3(&Vec3::new(0.0, 0.0, FRAC_PI_2));
        let oracle = series_exp3(hat(&Vec3::new(0.0, 0.0, FRAC_PI_2)).matrix(), 20);
        assert_abs_diff_eq!(*quarter.matrix(), oracle, epsilon = 1e-14);
        assert_abs_diff_eq!(
            *quarter.matrix(),
            Mat3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0),
            epsilon = 1e-15
        );

        let half = exp_so3(&Vec3::new(PI, 0.0, 0.0));
        let oracle = series_exp3(hat(&Vec3::new(PI, 0.0, 0.0)).matrix(), 30);
        assert_abs_diff_eq!(*half.matrix(), oracle, epsilon = 1e-13);
        assert_abs_diff_eq!(
            *half.matrix(),
            Mat3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0)),
            epsilon = 1e-15
        );
    }

    #[test]
    fn exp_so3_small_angle_branch_is_continuous() {
        let axis = Vec3::new(0.3, -0.5, 0.8).normalize();
        let below = exp_so3(&(axis * (SMALL_ANGLE * 0.999)));
        let above = exp_so3(&(axis * (SMALL_ANGLE * 1.001)));
        assert!(below.distance(&above) < 1e-8);
        let tiny = axis * 1e-9;
        let oracle = series_exp3(hat(&tiny).matrix(), 6);
        assert_abs_diff_eq!(*exp_so3(&tiny).matrix(), oracle, epsilon = 1e-16);
    }

    #[test]
    fn log_so3_examples() {
        assert_eq!(log_so3(&Rotation::identity()).unwrap(), Vec3::zeros());
        let v = Vec3::new(0.1, 0.2, 0.3);
        assert_abs_diff_eq!(log_so3(&exp_so3(&v)).unwrap(), v, epsilon = 1e-15);

        let near = PI - 1e-3;
        let r = exp_so3(&Vec3::new(0.0, 0.0, near));
        let l = log_so3(&r).unwrap();
        assert_abs_diff_eq!(l, Vec3::new(0.0, 0.0, near), epsilon = 1e-8);
        assert!(exp_so3(&l).distance(&r) < 1e-10);
    }

    #[test]
    fn log_so3_refuses_angles_near_pi() {
        let r = exp_so3(&Vec3::new(0.0, PI - 1e-7, 0.0));
        assert!(matches!(log_so3(&r), Err(LieError::AngleNearPi(_))));
        let r = exp_so3(&Vec3::new(PI, 0.0, 0.0));
        assert!(matches!(log_so3(&r), Err(LieError::AngleNearPi(_))));
    }

    #[test]
    fn expm_examples() {
        let zero = SquareMatrix::new(DMatrix::zeros(4, 4)).unwrap();
        assert_eq!(expm(&zero), SquareMatrix::identity(4));

        let d = SquareMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            1.5, -2.0,
        ])))
        .unwrap();
        let e = expm(&d);
        assert!((e.matrix()[(0, 0)] - 1.5f64.exp()).abs() <= 1e-12 * 1.5f64.exp());
        assert!((e.matrix()[(1, 1)] - (-2.0f64).exp()).abs() <= 1e-12 * (-2.0f64).exp());
        assert_eq!(e.matrix()[(0, 1)], 0.0);

        let v = Vec3::new(0.0, 0.0, FRAC_PI_2);
        let via_expm = expm(&SquareMatrix::from_mat3(hat(&v).matrix()))
            .to_mat3()
            .unwrap();
        assert_abs_diff_eq!(via_expm, *exp_so3(&v).matrix(), epsilon = 1e-14);
    }

    #[test]
    fn expm_large_argument_relative_accuracy() {
        // exp of a 2x2 rotation generator with large angle and a diagonal shift
        let (a, b): (f64, f64) = (0.7, 9.0);
        let m = SquareMatrix::from_row_slice(2, &[a, -b, b, a]).unwrap();
        let e = expm(&m);
        let exact = [a.exp() * b.cos(), -a.exp() * b.sin(), a.exp() * b.sin(), a.exp() * b.cos()];
        let got = [e.matrix()[(0, 0)], e.matrix()[(0, 1)], e.matrix()[(1, 0)], e.matrix()[(1, 1)]];
        for (g, x) in got.iter().zip(exact) {
            assert!((g - x).abs() <= 1e-12 * a.exp(), "{g} vs {x}");
        }
    }

    #[test]
    fn quat_exp_examples() {
        assert_eq!(quat_exp(&Vec3::zeros()), UnitQuat::IDENTITY);
        let q = quat_exp(&Vec3::new(FRAC_PI_2, 0.0, 0.0));
        assert_abs_diff_eq!(q.w, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(q.x, 1.0, epsilon = 1e-16);

        // 4x4 representation oracle: exp of the left-multiplication matrix of u
        let u = Vec3::new(0.1, 0.2, 0.3);
        let m = left_mult_matrix(0.0, &u);
        let e = expm(&SquareMatrix::new(DMatrix::from_iterator(4, 4, m.iter().copied())).unwrap());
        let q = quat_exp(&u);
        for (i, c) in q.wxyz().into_iter().enumerate() {
            assert_abs_diff_eq!(e.matrix()[(i, 0)], c, epsilon = 1e-15);
        }
    }

    #[test]
    fn quat_to_rotation_examples() {
        assert_eq!(*quat_to_rotation(&UnitQuat::IDENTITY).matrix(), Mat3::identity());
        assert_eq!(*quat_to_rotation(&-UnitQuat::IDENTITY).matrix(), Mat3::identity());

        // conjugating the basis by (cos θ/2, sin θ/2, 0, 0) rotates e2 towards e3
        let theta: f64 = 0.8;
        let q = UnitQuat::new((theta / 2.0).cos(), (theta / 2.0).sin(), 0.0, 0.0).unwrap();
        let expected = Mat3::new(
            1.0, 0.0, 0.0, //
            0.0, theta.cos(), -theta.sin(), //
            0.0, theta.sin(), theta.cos(),
        );
        assert_abs_diff_eq!(*quat_to_rotation(&q).matrix(), expected, epsilon = 1e-15);
        let v = Vec3::new(0.3, -1.2, 0.5);
        assert_abs_diff_eq!(quat_to_rotation(&q).apply(&v), q.rotate(&v), epsilon = 1e-15);
    }

    #[test]
    fn lie_hom_derivative_matches_finite_difference() {
        let h = 1e-5;
        for u in [Vec3::zeros(), Vec3::x(), Vec3::new(0.0, 0.5, 0.0)] {
            let plus = *quat_to_rotation(&quat_exp(&(u * h))).matrix();
            let minus = *quat_to_rotation(&quat_exp(&(u * -h))).matrix();
            let fd = vee_checked(&((plus - minus) / (2.0 * h))).unwrap();
            assert_abs_diff_eq!(lie_hom_derivative(&u), fd, epsilon = 1e-6);
        }
        assert_eq!(lie_hom_derivative(&Vec3::x()), Vec3::new(2.0, 0.0, 0.0));
        assert_eq!(lie_hom_derivative(&Vec3::new(0.0, 0.5, 0.0)), Vec3::y());
    }

    #[test]
    fn project_rotation_examples() {
        let r = exp_so3(&Vec3::new(0.4, -1.1, 2.0));
        assert!(project_rotation(r.matrix()).unwrap().distance(&r) < 1e-14);
        let two = project_rotation(&(Mat3::identity() * 2.0)).unwrap();
        assert!(two.distance_to_identity() < 1e-15);

        let perturbed = Mat3::identity()
            + Mat3::new(1.0, -2.0, 0.5, 0.3, -1.0, 2.0, 1.5, 0.2, -0.7) * 1e-8;
        let p = project_rotation(&perturbed).unwrap();
        // SVD oracle: U Vᵀ
        let svd = perturbed.svd(true, true);
        let oracle = svd.u.unwrap() * svd.v_t.unwrap();
        assert_abs_diff_eq!(*p.matrix(), oracle, epsilon = 1e-14);
        assert!(p.distance_to_identity() < 1e-7);
        assert!(p.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn project_rotation_rejects_reflections() {
        let reflection = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        assert!(project_rotation(&reflection).is_err());
        assert!(project_rotation(&Mat3::zeros()).is_err());
    }

    #[test]
    fn rotation_validation() {
        assert!(Rotation::try_from_matrix(Mat3::identity() * 1.01).is_err());
        assert!(Rotation::try_from_matrix(-Mat3::identity()).is_err());
        let r = exp_so3(&Vec3::new(1.0, 2.0, -0.5));
        assert_eq!(Rotation::from_row_slice(&r.to_row_major()).unwrap(), r);
    }

    #[test]
    fn quaternion_rotation_round_trip() {
        for v in [
            Vec3::new(0.2, -0.4, 0.1),
            Vec3::new(PI - 1e-9, 0.0, 0.0),
            Vec3::new(0.0, 3.0, 0.1),
            Vec3::new(-1.0, 1.0, 1.0) * 1.7,
        ] {
            let r = exp_so3(&v);
            let q = UnitQuat::from_rotation(&r);
            assert!(quat_to_rotation(&q).distance(&r) < 1e-14);
            let (axis, angle) = q.axis_angle();
            assert!(exp_so3(&(axis * angle)).distance(&r) < 1e-13);
        }
    }

    #[test]
    fn canonical_sign_rule() {
        let q = UnitQuat::new(-0.6, 0.0, 0.8, 0.0).unwrap();
        assert_eq!(q.canonical().wxyz(), [0.6, -0.0, -0.8, -0.0]);
        let q = UnitQuat::new(0.0, 0.0, -1.0, 0.0).unwrap();
        assert_eq!(q.canonical().wxyz(), [-0.0, -0.0, 1.0, -0.0]);
    }
}
