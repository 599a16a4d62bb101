//! Upper half-space model: points `(x_1, ..., x_n)` with height `x_n > 0`.

use crate::error::{Error, Result};
use crate::hyperboloid::HyperboloidPoint;
use crate::linalg::Matrix;
use crate::real::DEFAULT_TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct UhsPoint {
    coords: Vec<f64>,
}

impl UhsPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: coords.len() });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invariant("non-finite coordinate".into()));
        }
        let h = coords[coords.len() - 1];
        if h <= 0.0 {
            return Err(Error::Invariant(format!("height {h} is not positive")));
        }
        Ok(UhsPoint { coords })
    }

    pub fn on_axis(n: usize, height: f64) -> Result<Self> {
        let mut coords = vec![0.0; n];
        coords[n - 1] = height;
        Self::new(coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn height(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }

    /// The first n−1 coordinates.
    pub fn horizontal(&self) -> &[f64] {
        &self.coords[..self.coords.len() - 1]
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_dims(x: &UhsPoint, y: &UhsPoint) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    Ok(())
}

/// `arcosh(1 + |x − y|² / (2 x_n y_n))`.
pub fn uhs_distance(x: &UhsPoint, y: &UhsPoint) -> Result<f64> {
    check_dims(x, y)?;
    let sq: f64 = x.coords.iter().zip(&y.coords).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(crate::real::Real::acosh_1p(sq / (2.0 * x.height() * y.height())))
}

/// Distance to the vertical axis over the origin, `arcosh(|x| / x_n)`.
pub fn axis_distance(x: &UhsPoint) -> f64 {
    (norm(x.horizontal()) / x.height()).asinh()
}

/// A loxodromic fixing 0 and ∞: `v ↦ A·e^R v` with `A ∈ SO(n−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoxodromicNormalForm {
    r: f64,
    a: Matrix<f64>,
}

impl LoxodromicNormalForm {
    pub fn new(r: f64, a: Matrix<f64>) -> Result<Self> {
        Self::with_tol(r, a, DEFAULT_TOL)
    }

    pub fn with_tol(r: f64, a: Matrix<f64>, tol: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::OutOfRange { name: "R", value: r, range: "(0, inf)" });
        }
        check_rotation(&a, tol)?;
        Ok(LoxodromicNormalForm { r, a })
    }

    pub fn translation_length(&self) -> f64 {
        self.r
    }

    pub fn rotation(&self) -> &Matrix<f64> {
        &self.a
    }

    /// The hyperbolic dimension n.
    pub fn dim(&self) -> usize {
        self.a.rows() + 1
    }
}

/// Checks `AᵀA = I` and `det A = 1` within `tol`.
pub fn check_rotation(a: &Matrix<f64>, tol: f64) -> Result<()> {
    if !a.is_square() || a.rows() == 0 {
        return Err(Error::Invariant("rotation must be a non-empty square matrix".into()));
    }
    let ortho = a.transpose().mul(a).max_abs_diff(&Matrix::identity(a.rows()));
    let det = a.determinant();
    if ortho > tol || (det - 1.0).abs() > tol {
        return Err(Error::Invariant(format!(
            "not a rotation: orthogonality residual {ortho:e}, det {det}"
        )));
    }
    Ok(())
}

/// `A^k` by repeated squaring.
pub fn matrix_power(a: &Matrix<f64>, mut k: u64) -> Matrix<f64> {
    let mut result = Matrix::identity(a.rows());
    let mut base = a.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = result.mul(&base);
        }
        base = base.mul(&base);
        k >>= 1;
    }
    result
}

/// `φ^k(x) = A^k e^{kR} x`, with `A` acting on the horizontal coordinates.
pub fn loxodromic_apply(phi: &LoxodromicNormalForm, x: &UhsPoint, k: u64) -> Result<UhsPoint> {
    if x.dim() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: phi.dim(), found: x.dim() });
    }
    let scale = (k as f64 * phi.r).exp();
    let ak = matrix_power(&phi.a, k);
    let mut coords: Vec<f64> = ak.mul_vec(x.horizontal()).into_iter().map(|v| v * scale).collect();
    coords.push(x.height() * scale);
    UhsPoint::new(coords)
}

/// The homothety `x ↦ e^d x`, which moves axis points up by `d`.
pub fn vertical_scale(x: &UhsPoint, d: f64) -> Result<UhsPoint> {
    let s = d.exp();
    UhsPoint::new(x.coords.iter().map(|v| v * s).collect())
}

/// `(4 e^D / a)^{n−1}`.
pub fn pigeonhole_k_bound(d: f64, a: f64, n: usize) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::OutOfRange { name: "a", value: a, range: "(0, 1)" });
    }
    if !(d >= 0.0) {
        return Err(Error::OutOfRange { name: "D", value: d, range: "[0, inf)" });
    }
    if n < 3 {
        return Err(Error::OutOfRange { name: "n", value: n as f64, range: "[3, inf)" });
    }
    Ok((4.0 * d.exp() / a).powi(n as i32 - 1))
}

/// The smallest `D >= 0` with `|x| / x_n <= e^D`.
pub fn recurrence_radius(x: &UhsPoint) -> f64 {
    (x.norm() / x.height()).ln().max(0.0)
}

/// Outcome of [`find_recurrent_power`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recurrence {
    pub k: u64,
    pub cap: u64,
    pub distance: f64,
}

/// Smallest `k` in `[1, cap]` with `d(A^k x, x) < a`, where the cap is the
/// pigeonhole bound at `D = ln(|x| / x_n)`.
pub fn find_recurrent_power(a_rot: &Matrix<f64>, x: &UhsPoint, a: f64) -> Result<Recurrence> {
    if a_rot.rows() + 1 != x.dim() || !a_rot.is_square() {
        return Err(Error::DimensionMismatch { expected: x.dim() - 1, found: a_rot.rows() });
    }
    let bound = pigeonhole_k_bound(recurrence_radius(x), a, x.dim())?;
    let cap = bound.ceil().min(u64::MAX as f64) as u64;
    let h = x.height();
    // d(y, x) < a at equal heights iff |y − x|² < 2h²(cosh a − 1).
    let threshold = 2.0 * h * h * (a.cosh() - 1.0);
    let origin = x.horizontal();
    let mut y = origin.to_vec();
    for k in 1..=cap {
        y = a_rot.mul_vec(&y);
        let sq: f64 = y.iter().zip(origin).map(|(p, q)| (p - q) * (p - q)).sum();
        if sq < threshold {
            let distance = crate::real::Real::acosh_1p(sq / (2.0 * h * h));
            return Ok(Recurrence { k, cap, distance });
        }
    }
    Err(Error::RecurrenceNotFound { cap })
}

/// Hyperboloid to upper half-space, normalized so the basepoint goes to
/// `(0, ..., 0, 1)` and the last spacelike axis becomes the vertical one.
pub fn hyperboloid_to_uhs(p: &HyperboloidPoint<f64>) -> Result<UhsPoint> {
    let x = p.coords();
    let n = x.len() - 1;
    let denom = x[n] + x[n - 1];
    if !(denom > 0.0) || !denom.is_finite() {
        return Err(Error::Invariant("point maps to the boundary".into()));
    }
    let mut coords: Vec<f64> = x[..n - 1].iter().map(|v| v / denom).collect();
    coords.push(1.0 / denom);
    UhsPoint::new(coords)
}

pub fn uhs_to_hyperboloid(p: &UhsPoint) -> Result<HyperboloidPoint<f64>> {
    let h = p.height();
    let u2: f64 = p.horizontal().iter().map(|v| v * v).sum();
    let mut coords: Vec<f64> = p.horizontal().iter().map(|v| v / h).collect();
    coords.push((1.0 - h * h - u2) / (2.0 * h));
    coords.push((1.0 + h * h + u2) / (2.0 * h));
    HyperboloidPoint::new(coords)
}
