use num_complex::Complex;
use serde::Serialize;

use super::{eval_path, Cocycle, Sl2cGroup};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::real::{Real, Scalar};
use crate::triangulation::{cusp_generators, BaseTree, Triangulation, VertexId};

/// Default slack for the trace test `|tr² − 4|`, scaled by the matrix size.
pub const PARABOLIC_TOL: f64 = 1e-8;

/// A point of `C ∪ {∞}`, the boundary of H³ in the upper half-space model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPoint {
    Infinity,
    Finite { re: f64, im: f64 },
}

impl BoundaryPoint {
    /// Homogeneous coordinates `(p, q)` with `|p|² + |q|² = 1`, `q` real ≥ 0.
    pub fn homogeneous(&self) -> (Complex<f64>, Complex<f64>) {
        match *self {
            BoundaryPoint::Infinity => (Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)),
            BoundaryPoint::Finite { re, im } => {
                let z = Complex::new(re, im);
                let s = (1.0 + z.norm_sqr()).sqrt();
                (z / s, Complex::new(1.0 / s, 0.0))
            }
        }
    }
}

/// Chordal distance on the Riemann sphere; `∞` is handled exactly.
pub fn chordal_distance(a: &BoundaryPoint, b: &BoundaryPoint) -> f64 {
    match (*a, *b) {
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => 0.0,
        (BoundaryPoint::Infinity, BoundaryPoint::Finite { re, im })
        | (BoundaryPoint::Finite { re, im }, BoundaryPoint::Infinity) => {
            2.0 / (1.0 + re * re + im * im).sqrt()
        }
        (BoundaryPoint::Finite { re: ar, im: ai }, BoundaryPoint::Finite { re: br, im: bi }) => {
            let (z, w) = (Complex::new(ar, ai), Complex::new(br, bi));
            2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sl2Class {
    Identity,
    Parabolic { fixed_point: BoundaryPoint },
    Elliptic,
    Loxodromic,
}

impl Sl2Class {
    pub fn kind(&self) -> &'static str {
        match self {
            Sl2Class::Identity => "identity",
            Sl2Class::Parabolic { .. } => "parabolic",
            Sl2Class::Elliptic => "elliptic",
            Sl2Class::Loxodromic => "loxodromic",
        }
    }
}

fn det2<S: Real>(a: &Matrix<Complex<S>>) -> Complex<S> {
    a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]
}

/// Classifies by the trace. Tolerances are scaled by `max(1, max|a_ij|²)`.
pub fn classify_sl2<S: Real>(a: &Matrix<Complex<S>>, tol: f64) -> Result<Sl2Class> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: a.rows() });
    }
    let norm = a.max_abs().to_f64().max(1.0);
    let scale = norm * norm;
    let det = det2(a);
    let det_f = Complex::new(det.re.to_f64(), det.im.to_f64());
    if (det_f - Complex::new(1.0, 0.0)).norm() > tol * scale {
        return Err(Error::NotUnimodular { det_re: det_f.re, det_im: det_f.im });
    }
    let id = Matrix::<Complex<S>>::identity(2);
    let minus_id = id.map(|z| -*z);
    if a.max_abs_diff(&id).to_f64() <= tol * norm || a.max_abs_diff(&minus_id).to_f64() <= tol * norm {
        return Ok(Sl2Class::Identity);
    }
    let tr = a[(0, 0)] + a[(1, 1)];
    let tr2 = tr * tr;
    let tr2 = Complex::new(tr2.re.to_f64(), tr2.im.to_f64());
    if (tr2 - Complex::new(4.0, 0.0)).norm() <= tol * scale {
        // Double root of c z² + (d − a) z − b = 0.
        let c = a[(1, 0)];
        let fixed_point = if c.modulus().to_f64() <= tol * norm {
            BoundaryPoint::Infinity
        } else {
            let z = (a[(0, 0)] - a[(1, 1)]) / (c + c);
            BoundaryPoint::Finite { re: z.re.to_f64(), im: z.im.to_f64() }
        };
        return Ok(Sl2Class::Parabolic { fixed_point });
    }
    if tr2.im.abs() <= tol * scale && tr2.re >= -tol * scale && tr2.re < 4.0 {
        return Ok(Sl2Class::Elliptic);
    }
    Ok(Sl2Class::Loxodromic)
}

/// Hermitian matrix `X = [[t+z, x−iy], [x+iy, t−z]]` of `(x, y, z, t)`.
fn hermitian<S: Real>(v: &[S]) -> Matrix<Complex<S>> {
    let (x, y, z, t) = (v[0], v[1], v[2], v[3]);
    let zero = S::zero();
    Matrix::from_rows(
        2,
        2,
        vec![Complex::new(t + z, zero), Complex::new(x, -y), Complex::new(x, y), Complex::new(t - z, zero)],
    )
    .expect("2x2")
}

/// `A X A*` for the Hermitian matrix `X` of `v = (x, y, z, t)`.
fn act<S: Real>(a: &Matrix<Complex<S>>, v: &[S]) -> Matrix<Complex<S>> {
    let a_star = Matrix::from_fn(2, 2, |i, j| a[(j, i)].conj());
    a.mul(&hermitian(v)).mul(&a_star)
}

fn coords_of<S: Real>(x: &Matrix<Complex<S>>) -> [S; 4] {
    let half = S::from_f64(0.5);
    [x[(1, 0)].re, x[(1, 0)].im, (x[(0, 0)].re - x[(1, 1)].re) * half, (x[(0, 0)].re + x[(1, 1)].re) * half]
}

/// The Lorentz matrix of `X ↦ A X A*` in coordinates `(x, y, z, t)`.
pub fn embed_sl2_as_lorentz<S: Real>(a: &Matrix<Complex<S>>, tol: f64) -> Result<Matrix<S>> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: a.rows() });
    }
    let det = det2(a);
    let det_f = Complex::new(det.re.to_f64(), det.im.to_f64());
    let norm = a.max_abs().to_f64().max(1.0);
    if (det_f - Complex::new(1.0, 0.0)).norm() > tol * norm * norm {
        return Err(Error::NotUnimodular { det_re: det_f.re, det_im: det_f.im });
    }
    let mut m = Matrix::zeros(4, 4);
    for k in 0..4 {
        let mut e = [S::zero(); 4];
        e[k] = S::one();
        let img = coords_of(&act(a, &e));
        for (i, v) in img.into_iter().enumerate() {
            m[(i, k)] = v;
        }
    }
    Ok(m)
}

/// Entries `(X11, X22, Re X21, Im X21)` of `A A*`, the image of the
/// basepoint in Hermitian coordinates.
pub fn hermitian_image<S: Real>(a: &Matrix<Complex<S>>) -> [S; 4] {
    let x = act(a, &[S::zero(), S::zero(), S::zero(), S::one()]);
    [x[(0, 0)].re, x[(1, 1)].re, x[(1, 0)].re, x[(1, 0)].im]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorReport {
    pub index: usize,
    pub link_edge: (VertexId, VertexId),
    pub loop_length: usize,
    pub kind: String,
    pub trace: [f64; 2],
    pub fixed_point: Option<BoundaryPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspReport {
    pub vertex: VertexId,
    pub tolerance: f64,
    pub generators: Vec<GeneratorReport>,
    pub shared_fixed_point: Option<BoundaryPoint>,
    /// Largest chordal distance between parabolic fixed points.
    pub fixed_point_spread: f64,
    pub failing: Vec<usize>,
    pub passes: bool,
}

/// Every cusp generator must map to a parabolic (or the identity), and all
/// parabolic fixed points must agree within `tol` in chordal distance.
pub fn check_cusp_parabolicity<S: Real>(
    tri: &Triangulation,
    alpha: &Cocycle<Sl2cGroup<S>>,
    v: VertexId,
    base: &BaseTree,
    tol: f64,
) -> Result<CuspReport> {
    let gens = cusp_generators(tri, v, base)?;
    let mut generators = Vec::new();
    let mut failing = Vec::new();
    for (index, l) in gens.loops.iter().enumerate() {
        let m = eval_path(alpha, &l.path)?;
        let tr = m[(0, 0)] + m[(1, 1)];
        let (kind, fixed_point) = match classify_sl2(&m, tol) {
            Ok(Sl2Class::Parabolic { fixed_point }) => ("parabolic".to_string(), Some(fixed_point)),
            Ok(c) => (c.kind().to_string(), None),
            Err(_) => ("non-unimodular".to_string(), None),
        };
        if kind != "parabolic" && kind != "identity" {
            failing.push(index);
        }
        generators.push(GeneratorReport {
            index,
            link_edge: l.link_edge,
            loop_length: l.path.len(),
            kind,
            trace: [tr.re.to_f64(), tr.im.to_f64()],
            fixed_point,
        });
    }
    let points: Vec<BoundaryPoint> = generators.iter().filter_map(|g| g.fixed_point).collect();
    let mut spread = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            spread = spread.max(chordal_distance(p, q));
        }
    }
    let agree = spread <= tol;
    if !agree {
        for g in &generators {
            if g.fixed_point.is_some() && chordal_distance(&g.fixed_point.unwrap(), &points[0]) > tol {
                failing.push(g.index);
            }
        }
        failing.sort_unstable();
        failing.dedup();
    }
    Ok(CuspReport {
        vertex: v,
        tolerance: tol,
        shared_fixed_point: if agree { points.first().copied() } else { None },
        fixed_point_spread: spread,
        passes: failing.is_empty() && agree,
        generators,
        failing,
    })
}
