//! Hyperboloid model of H^n inside Lorentzian (n+1)-space.
//!
//! Coordinates are `x_0..x_n` with `x_n` timelike, so the form is
//! `<x, y> = x_0 y_0 + ... + x_{n-1} y_{n-1} - x_n y_n` and the basepoint
//! is `(0, ..., 0, 1)`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::real::{Real, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct LorentzVector<S> {
    coords: Vec<S>,
}

impl<S: Real> LorentzVector<S> {
    pub fn new(coords: Vec<S>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: coords.len() });
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::Invariant(format!("non-finite coordinate {bad:?}")));
        }
        Ok(LorentzVector { coords })
    }

    /// The hyperbolic dimension n (one less than the length).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn timelike(&self) -> S {
        self.coords[self.coords.len() - 1]
    }
}

/// `Σ_{i<n} x_i y_i − x_n y_n`.
pub fn lorentz_form<S: Real>(x: &[S], y: &[S]) -> Result<S> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    let n = x.len() - 1;
    let mut acc = S::zero();
    for i in 0..n {
        acc += x[i] * y[i];
    }
    Ok(acc - x[n] * y[n])
}

fn quadratic_form<S: Real>(x: &[S]) -> S {
    let n = x.len() - 1;
    let mut acc = S::zero();
    for v in &x[..n] {
        acc += *v * *v;
    }
    acc - x[n] * x[n]
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidPoint<S> {
    vector: LorentzVector<S>,
}

impl<S: Real> HyperboloidPoint<S> {
    pub fn new(coords: Vec<S>) -> Result<Self> {
        Self::with_tol(coords, S::from_f64(DEFAULT_TOL))
    }

    /// Accepts `coords` when `|q(x) + 1| <= tol * x_n^2` and `x_n > 0`.
    pub fn with_tol(coords: Vec<S>, tol: S) -> Result<Self> {
        let vector = LorentzVector::new(coords)?;
        let xn = vector.timelike();
        if xn <= S::zero() {
            return Err(Error::Invariant(format!("timelike coordinate {xn:?} is not positive")));
        }
        let q = quadratic_form(vector.coords());
        let scale = S::one().max(xn * xn);
        if (q + S::one()).abs() > tol * scale {
            return Err(Error::Invariant(format!("q(x) = {:?}, expected -1", q.to_f64())));
        }
        Ok(HyperboloidPoint { vector })
    }

    pub fn basepoint(n: usize) -> Self {
        let mut coords = vec![S::zero(); n + 1];
        coords[n] = S::one();
        HyperboloidPoint { vector: LorentzVector { coords } }
    }

    /// The point at distance `r` from the basepoint in unit direction `dir`
    /// (a vector of length n, normalized here).
    pub fn from_polar(dir: &[S], r: S) -> Result<Self> {
        let norm = dir.iter().fold(S::zero(), |a, v| a + *v * *v).sqrt();
        if !(norm > S::zero()) {
            return Err(Error::Invariant("zero direction".into()));
        }
        let s = r.sinh();
        let mut coords: Vec<S> = dir.iter().map(|v| *v / norm * s).collect();
        coords.push(r.cosh());
        Self::new(coords)
    }

    /// Lifts a point of R^n onto the upper sheet by solving for `x_n`.
    pub fn lift(spatial: &[S]) -> Result<Self> {
        let sq = spatial.iter().fold(S::zero(), |a, v| a + *v * *v);
        let mut coords = spatial.to_vec();
        coords.push((S::one() + sq).sqrt());
        Self::new(coords)
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn coords(&self) -> &[S] {
        self.vector.coords()
    }

    pub fn vector(&self) -> &LorentzVector<S> {
        &self.vector
    }
}

/// `cosh d(x, y) - 1`, evaluated without an arcosh.
pub fn cosh_distance_minus_one<S: Real>(
    x: &HyperboloidPoint<S>,
    y: &HyperboloidPoint<S>,
    tol: S,
) -> Result<S> {
    let arg = -lorentz_form(x.coords(), y.coords())?;
    let mut c = arg - S::one();
    if c < S::from_f64(0.5) {
        // Nearby points: q(x - y) / 2 avoids the cancellation in arg - 1.
        let diff: Vec<S> = x.coords().iter().zip(y.coords()).map(|(a, b)| *a - *b).collect();
        c = quadratic_form(&diff) / S::from_f64(2.0);
    }
    if c < S::zero() {
        let scale = S::one().max(x.vector.timelike() * y.vector.timelike());
        if c < -(tol * scale) {
            return Err(Error::ArcoshDomain { argument: (c + S::one()).to_f64() });
        }
        c = S::zero();
    }
    Ok(c)
}

/// Distance `arcosh(-<x, y>)` together with `C = cosh d - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distance<S> {
    pub distance: S,
    pub cosh_minus_one: S,
}

pub fn hyp_distance_report<S: Real>(
    x: &HyperboloidPoint<S>,
    y: &HyperboloidPoint<S>,
    tol: S,
) -> Result<Distance<S>> {
    let c = cosh_distance_minus_one(x, y, tol)?;
    Ok(Distance { distance: c.acosh_1p(), cosh_minus_one: c })
}

pub fn hyp_distance<S: Real>(x: &HyperboloidPoint<S>, y: &HyperboloidPoint<S>) -> Result<S> {
    Ok(hyp_distance_report(x, y, S::from_f64(DEFAULT_TOL))?.distance)
}

/// `J = diag(1, ..., 1, -1)` of size n+1.
pub fn minkowski_j<S: Real>(n: usize) -> Matrix<S> {
    let mut j = Matrix::identity(n + 1);
    j[(n, n)] = -S::one();
    j
}

/// Residuals from [`is_lorentz_matrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzReport {
    /// Max-norm of `MᵀJM − J`.
    pub form_residual: f64,
    /// `|det M − 1|`.
    pub det_residual: f64,
    /// Entry `(n, n)`, which must be positive.
    pub sheet_entry: f64,
    pub passes: bool,
}

pub fn is_lorentz_matrix<S: Real>(m: &Matrix<S>, tol: f64) -> LorentzReport {
    if !m.is_square() || m.rows() < 3 {
        return LorentzReport {
            form_residual: f64::INFINITY,
            det_residual: f64::INFINITY,
            sheet_entry: f64::NAN,
            passes: false,
        };
    }
    let n = m.rows() - 1;
    let j = minkowski_j::<S>(n);
    let form = m.transpose().mul(&j).mul(m);
    let form_residual = form.max_abs_diff(&j).to_f64();
    let det_residual = (m.determinant() - S::one()).abs().to_f64();
    let sheet_entry = m[(n, n)].to_f64();
    let passes = form_residual <= tol && det_residual <= tol && sheet_entry > 0.0;
    LorentzReport { form_residual, det_residual, sheet_entry, passes }
}

/// An element of SO⁺(n,1), validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzMatrix<S> {
    m: Matrix<S>,
}

impl<S: Real> LorentzMatrix<S> {
    pub fn new(m: Matrix<S>, tol: f64) -> Result<Self> {
        let report = is_lorentz_matrix(&m, tol);
        if !report.passes {
            return Err(Error::Invariant(format!(
                "not in SO+(n,1): form residual {:e}, det residual {:e}, (n,n) entry {}",
                report.form_residual, report.det_residual, report.sheet_entry
            )));
        }
        Ok(LorentzMatrix { m })
    }

    pub fn identity(n: usize) -> Self {
        LorentzMatrix { m: Matrix::identity(n + 1) }
    }

    /// Boost of rapidity `r` in the `(axis, n)` plane.
    pub fn boost(n: usize, axis: usize, r: S) -> Self {
        assert!(axis < n, "boost axis must be spacelike");
        let mut m = Matrix::identity(n + 1);
        let (c, s) = (r.cosh(), r.sinh());
        m[(axis, axis)] = c;
        m[(n, n)] = c;
        m[(axis, n)] = s;
        m[(n, axis)] = s;
        LorentzMatrix { m }
    }

    /// Embeds a rotation of the spacelike coordinates.
    pub fn from_rotation(rot: &Matrix<S>) -> Self {
        let n = rot.rows();
        let mut m = Matrix::identity(n + 1);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = rot[(i, j)];
            }
        }
        LorentzMatrix { m }
    }

    pub fn dim(&self) -> usize {
        self.m.rows() - 1
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.m
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        LorentzMatrix { m: self.m.mul(&rhs.m) }
    }

    pub fn inverse(&self) -> Self {
        LorentzMatrix { m: lorentz_inverse(&self.m) }
    }
}

/// `M⁻¹ = J Mᵀ J` for any M preserving the form.
pub fn lorentz_inverse<S: Real>(m: &Matrix<S>) -> Matrix<S> {
    let n = m.rows() - 1;
    Matrix::from_fn(n + 1, n + 1, |i, j| {
        let v = m[(j, i)];
        if (i == n) != (j == n) {
            -v
        } else {
            v
        }
    })
}

pub fn apply_isometry<S: Real>(m: &LorentzMatrix<S>, x: &HyperboloidPoint<S>) -> Result<HyperboloidPoint<S>> {
    apply_matrix(m.matrix(), x)
}

/// Applies a raw matrix and re-validates the image.
pub fn apply_matrix<S: Real>(m: &Matrix<S>, x: &HyperboloidPoint<S>) -> Result<HyperboloidPoint<S>> {
    if m.cols() != x.coords().len() {
        return Err(Error::DimensionMismatch { expected: m.cols(), found: x.coords().len() });
    }
    HyperboloidPoint::new(m.mul_vec(x.coords()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::DoubleDouble;

    fn unit_boost_point(r: f64) -> HyperboloidPoint<f64> {
        HyperboloidPoint::new(vec![r.sinh(), 0.0, r.cosh()]).unwrap()
    }

    #[test]
    fn form_examples() {
        let b = HyperboloidPoint::<f64>::basepoint(2);
        assert_eq!(lorentz_form(b.coords(), b.coords()).unwrap(), -1.0);
        let e = [1.0, 0.0, 0.0];
        assert_eq!(lorentz_form(&e, &e).unwrap(), 1.0);
        let v = lorentz_form(b.coords(), unit_boost_point(1.0).coords()).unwrap();
        assert!((v + 1.5430806348152437784779).abs() < 1e-15);
        assert!(lorentz_form(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn distance_examples() {
        let b = HyperboloidPoint::<f64>::basepoint(2);
        let r = hyp_distance_report(&b, &b, 1e-9).unwrap();
        assert_eq!((r.distance, r.cosh_minus_one), (0.0, 0.0));
        assert!((hyp_distance(&b, &unit_boost_point(1.0)).unwrap() - 1.0).abs() < 1e-14);
        let r = hyp_distance_report(&b, &unit_boost_point(2.0), 1e-9).unwrap();
        assert!((r.distance - 2.0).abs() < 1e-14);
        assert!((r.cosh_minus_one - 2.7621956910836314595622).abs() < 1e-14);
    }

    #[test]
    fn small_distances_stay_accurate() {
        let b = HyperboloidPoint::<f64>::basepoint(3);
        let p = HyperboloidPoint::from_polar(&[0.3, -0.2, 0.9], 1e-10).unwrap();
        let d = hyp_distance(&b, &p).unwrap();
        assert!((d - 1e-10).abs() < 1e-22, "d = {d:e}");
    }

    #[test]
    fn arcosh_domain_violation_is_reported() {
        let x = HyperboloidPoint::<f64>::basepoint(2);
        // Negating the timelike coordinate leaves the sheet, so bypass `new`.
        let y = HyperboloidPoint { vector: LorentzVector { coords: vec![0.0, 0.0, -1.0] } };
        assert!(matches!(hyp_distance(&x, &y), Err(Error::ArcoshDomain { .. })));
    }

    #[test]
    fn lorentz_membership_examples() {
        assert!(is_lorentz_matrix(&Matrix::<f64>::identity(4), 1e-12).passes);
        let reflection = minkowski_j::<f64>(3);
        for tol in [1e-12, 0.5, 1.9] {
            assert!(!is_lorentz_matrix(&reflection, tol).passes);
        }
        let (c, s) = (1.0f64.cosh(), 1.0f64.sinh());
        let boost = Matrix::from_rows(3, 3, vec![c, 0.0, s, 0.0, 1.0, 0.0, s, 0.0, c]).unwrap();
        let report = is_lorentz_matrix(&boost, 1e-12);
        assert!(report.passes, "{report:?}");
    }

    #[test]
    fn boost_moves_basepoint() {
        let b = HyperboloidPoint::<f64>::basepoint(3);
        let m = LorentzMatrix::boost(3, 0, 1.0);
        let img = apply_isometry(&m, &b).unwrap();
        let expected = [1.0f64.sinh(), 0.0, 0.0, 1.0f64.cosh()];
        for (a, e) in img.coords().iter().zip(expected) {
            assert!((a - e).abs() < 1e-15);
        }
        assert_eq!(apply_isometry(&LorentzMatrix::identity(3), &b).unwrap(), b);
        let inv = m.inverse().compose(&m);
        assert!(inv.matrix().max_abs_diff(&Matrix::identity(4)) < 1e-14);
    }

    #[test]
    fn double_double_distance() {
        let b = HyperboloidPoint::<DoubleDouble>::basepoint(2);
        let two = DoubleDouble::from(2.0);
        let p = HyperboloidPoint::new(vec![Real::sinh(two), DoubleDouble::from(0.0), Real::cosh(two)]).unwrap();
        let r = hyp_distance_report(&b, &p, DoubleDouble::from(1e-25)).unwrap();
        assert!(Real::to_f64(Real::abs(r.distance - two)) < 1e-28);
    }
}
