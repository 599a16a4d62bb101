use std::collections::BTreeMap;

use num_complex::Complex;

use super::build::{default_tree, lift_is_vertex};
use crate::cocycle::{
    check_cusp_parabolicity, eval_path, hermitian_image, BoundaryPoint, Cocycle, LorentzGroup, Sl2cGroup, PARABOLIC_TOL,
};
use crate::error::Result;
use crate::linalg::Matrix;
use crate::real::Real;
use crate::triangulation::{Edge, Triangulation, VertexId};

/// Values by variable name.
pub type Assignment = BTreeMap<String, f64>;

fn lorentz_c<S: Real>(x: &[S], y: &[S]) -> f64 {
    let n = x.len() - 1;
    let mut s = x[n] * y[n];
    for i in 0..n {
        s = s - x[i] * y[i];
    }
    (s - S::one()).to_f64()
}

/// Variables of the Lorentz system (closed, or cusped with `n ≥ 4`)
/// induced by `α`: both orientations of every edge matrix, developed
/// vertex and lift coordinates, and `C` from the form. No verification is
/// done, so a broken cocycle yields a residual-bearing assignment.
pub fn lorentz_assignment<S: Real>(tri: &Triangulation, alpha: &Cocycle<LorentzGroup<S>>) -> Result<Assignment> {
    let tree = default_tree(tri)?;
    let k = alpha.dim() + 1;
    let mut out = Assignment::new();
    for (u, v) in tri.non_ideal_edges() {
        for (o, m) in [alpha.value(Edge::new(u, v))?, alpha.value(Edge::new(v, u))?].iter().enumerate() {
            for r in 0..k {
                for c in 0..k {
                    out.insert(format!("E{u}_{v}o{o}r{r}c{c}"), m[(r, c)].to_f64());
                }
            }
        }
    }
    let column = |m: &Matrix<S>| -> Vec<S> { (0..k).map(|i| m[(i, k - 1)]).collect() };
    let mut holonomy = BTreeMap::new();
    let mut image: BTreeMap<VertexId, Vec<S>> = BTreeMap::new();
    for v in tri.non_ideal_vertices() {
        let a = eval_path(alpha, &tree.path_to(v)?)?;
        let x = column(&a);
        for (i, xi) in x.iter().enumerate() {
            out.insert(format!("V{v}a{i}"), xi.to_f64());
        }
        image.insert(v, x);
        holonomy.insert(v, a);
    }
    for (u, v) in tri.non_ideal_edges() {
        let y = if lift_is_vertex(&tree, u, v) {
            image[&v].clone()
        } else {
            let y = column(&holonomy[&u].mul(&alpha.value(Edge::new(u, v))?));
            for (i, yi) in y.iter().enumerate() {
                out.insert(format!("L{u}_{v}a{i}"), yi.to_f64());
            }
            y
        };
        out.insert(format!("C{u}_{v}"), lorentz_c(&image[&u], &y));
    }
    Ok(out)
}

fn hermitian_c<S: Real>(x: &[S; 4], y: &[S; 4]) -> f64 {
    let half = S::from_f64(0.5);
    ((x[0] * y[1] + x[1] * y[0]) * half - x[2] * y[2] - x[3] * y[3] - S::one()).to_f64()
}

/// Variables of the cusped SL(2, C) system induced by `α`. The fixed point
/// of each cusp is the shared parabolic fixed point when there is one and
/// `∞` otherwise.
pub fn sl2c_assignment<S: Real>(tri: &Triangulation, alpha: &Cocycle<Sl2cGroup<S>>) -> Result<Assignment> {
    let tree = default_tree(tri)?;
    let mut out = Assignment::new();
    for (u, v) in tri.non_ideal_edges() {
        for (o, m) in [alpha.value(Edge::new(u, v))?, alpha.value(Edge::new(v, u))?].iter().enumerate() {
            for r in 0..2 {
                for c in 0..2 {
                    out.insert(format!("E{u}_{v}o{o}r{r}c{c}re"), m[(r, c)].re.to_f64());
                    out.insert(format!("E{u}_{v}o{o}r{r}c{c}im"), m[(r, c)].im.to_f64());
                }
            }
        }
    }
    let mut holonomy = BTreeMap::new();
    let mut image = BTreeMap::new();
    for v in tri.non_ideal_vertices() {
        let a = eval_path(alpha, &tree.path_to(v)?)?;
        let x = hermitian_image(&a);
        for (i, xi) in x.iter().enumerate() {
            out.insert(format!("V{v}a{i}"), xi.to_f64());
        }
        image.insert(v, x);
        holonomy.insert(v, a);
    }
    for (u, v) in tri.non_ideal_edges() {
        let y = if lift_is_vertex(&tree, u, v) {
            image[&v]
        } else {
            let y = hermitian_image(&holonomy[&u].mul(&alpha.value(Edge::new(u, v))?));
            for (i, yi) in y.iter().enumerate() {
                out.insert(format!("L{u}_{v}a{i}"), yi.to_f64());
            }
            y
        };
        out.insert(format!("C{u}_{v}"), hermitian_c(&image[&u], &y));
    }
    for &cusp in tri.ideal_vertices() {
        let report = check_cusp_parabolicity(tri, alpha, cusp, &tree, PARABOLIC_TOL)?;
        let point = report.shared_fixed_point.unwrap_or(BoundaryPoint::Infinity);
        let (p, q): (Complex<f64>, Complex<f64>) = point.homogeneous();
        for (i, x) in [p.re, p.im, q.re, q.im].into_iter().enumerate() {
            out.insert(format!("P{cusp}a{i}"), x);
        }
    }
    Ok(out)
}
