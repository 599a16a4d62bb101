//! Random generators for tests and Monte-Carlo suites. All take an explicit
//! RNG so runs are reproducible from a seed.

use std::collections::BTreeSet;

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::hyperboloid::{HyperboloidPoint, LorentzMatrix};
use crate::linalg::{orthonormalize_special, Matrix};
use crate::triangulation::{Triangulation, VertexId};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Haar-ish random element of SO(k), by orthonormalizing a Gaussian matrix.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Matrix<f64> {
    if k == 1 {
        return Matrix::identity(1);
    }
    let m = Matrix::from_fn(k, k, |_, _| gaussian(rng));
    orthonormalize_special(&m)
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// `R₁ · boost(r) · R₂` with rotations of the spacelike part and rapidity
/// `r` uniform in `[0, max_rapidity]`.
pub fn random_lorentz<R: Rng + ?Sized>(rng: &mut R, n: usize, max_rapidity: f64) -> Matrix<f64> {
    let r = rng.random_range(0.0..=max_rapidity);
    let a = LorentzMatrix::from_rotation(&random_rotation(rng, n));
    let b = LorentzMatrix::from_rotation(&random_rotation(rng, n));
    a.compose(&LorentzMatrix::boost(n, 0, r)).compose(&b).into_matrix()
}

/// A point at distance at most `max_r` from the basepoint.
pub fn random_hyperboloid_point<R: Rng + ?Sized>(rng: &mut R, n: usize, max_r: f64) -> HyperboloidPoint<f64> {
    let dir = random_unit_vector(rng, n);
    let r = rng.random_range(0.0..=max_r);
    HyperboloidPoint::from_polar(&dir, r).expect("polar point is on the hyperboloid")
}

fn random_complex<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Complex<f64> {
    Complex::new(gaussian(rng) * scale, gaussian(rng) * scale)
}

/// Random element of SL(2, C) with entries of size about `scale`.
pub fn random_sl2c<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Matrix<Complex<f64>> {
    let a = loop {
        let a = random_complex(rng, scale);
        if a.norm() > 0.25 * scale.min(1.0) {
            break a;
        }
    };
    let b = random_complex(rng, scale);
    let c = random_complex(rng, scale);
    let d = (Complex::new(1.0, 0.0) + b * c) / a;
    Matrix::from_rows(2, 2, vec![a, b, c, d]).expect("2x2")
}

/// Closed n-manifold triangulation obtained from the boundary of the
/// (n+1)-simplex by `steps` stellar subdivisions of random top simplices.
pub fn random_closed_triangulation<R: Rng + ?Sized>(rng: &mut R, n: usize, steps: usize) -> Triangulation {
    let mut vertex_count = n + 2;
    let mut simplices: Vec<Vec<VertexId>> = Triangulation::boundary_of_simplex(n).simplices().to_vec();
    for _ in 0..steps {
        let idx = rng.random_range(0..simplices.len());
        let sigma = simplices.swap_remove(idx);
        let w = vertex_count;
        vertex_count += 1;
        for skip in 0..sigma.len() {
            let mut s: Vec<VertexId> = sigma.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            s.push(w);
            simplices.push(s);
        }
    }
    Triangulation::from_parts(n, vertex_count, BTreeSet::new(), simplices).expect("stellar subdivision stays valid")
}
