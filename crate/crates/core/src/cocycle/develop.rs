use std::collections::BTreeMap;

use serde::Serialize;

use super::{check_cusp_parabolicity, eval_path, verify_cocycle, BoundaryPoint, Cocycle, LorentzGroup, Sl2cGroup};
use crate::error::{Error, Result};
use crate::hyperboloid::{apply_matrix, hyp_distance_report, Distance, HyperboloidPoint};
use crate::linalg::Matrix;
use crate::real::{Real, DEFAULT_TOL};
use crate::triangulation::{BaseTree, Edge, Triangulation, VertexId};

/// Images of the vertices of the universal cover reached along base-tree
/// paths, with the length of one lift of every non-ideal edge.
#[derive(Debug, Clone, PartialEq)]
pub struct DevelopedComplex<S> {
    pub basepoint: VertexId,
    pub vertex_images: BTreeMap<VertexId, HyperboloidPoint<S>>,
    /// `A_u · o` and `A_u α(u→v) · o` for the lift of `u→v` starting at the
    /// image of `u`, where `A_u` is the value of the tree path to `u`.
    pub edge_lifts: BTreeMap<(VertexId, VertexId), (HyperboloidPoint<S>, HyperboloidPoint<S>)>,
    pub edge_lengths: BTreeMap<(VertexId, VertexId), Distance<S>>,
    pub ideal_images: BTreeMap<VertexId, BoundaryPoint>,
}

fn point_of<S: Real>(m: &Matrix<S>) -> Result<HyperboloidPoint<S>> {
    apply_matrix(m, &HyperboloidPoint::basepoint(m.rows() - 1))
}

pub fn develop<S: Real>(
    tri: &Triangulation,
    alpha: &Cocycle<LorentzGroup<S>>,
    base: &BaseTree,
    tol: f64,
) -> Result<DevelopedComplex<S>> {
    let report = verify_cocycle(tri, alpha, tol)?;
    if !report.passes {
        return Err(Error::CocycleVerification(format!(
            "max face residual {:e}, max inverse residual {:e}, max membership residual {:e}, {} failing faces",
            report.max_face_residual,
            report.max_inverse_residual,
            report.max_membership_residual,
            report.failing_faces.len()
        )));
    }
    let mut holonomy = BTreeMap::new();
    let mut vertex_images = BTreeMap::new();
    for v in tri.non_ideal_vertices() {
        let a = eval_path(alpha, &base.path_to(v)?)?;
        vertex_images.insert(v, point_of(&a)?);
        holonomy.insert(v, a);
    }
    let dtol = S::from_f64(DEFAULT_TOL);
    let mut edge_lifts = BTreeMap::new();
    let mut edge_lengths = BTreeMap::new();
    for (u, v) in tri.non_ideal_edges() {
        let start = vertex_images[&u].clone();
        let end = point_of(&holonomy[&u].mul(&alpha.value(Edge::new(u, v))?))?;
        edge_lengths.insert((u, v), hyp_distance_report(&start, &end, dtol)?);
        edge_lifts.insert((u, v), (start, end));
    }
    Ok(DevelopedComplex {
        basepoint: base.basepoint(),
        vertex_images,
        edge_lifts,
        edge_lengths,
        ideal_images: BTreeMap::new(),
    })
}

/// Develops through the Lorentz embedding and, for every ideal vertex,
/// records the common fixed point of its cusp generators.
pub fn develop_sl2c<S: Real>(
    tri: &Triangulation,
    alpha: &Cocycle<Sl2cGroup<S>>,
    base: &BaseTree,
    tol: f64,
) -> Result<DevelopedComplex<S>> {
    let report = verify_cocycle(tri, alpha, tol)?;
    if !report.passes {
        return Err(Error::CocycleVerification(format!(
            "max face residual {:e}, {} failing faces",
            report.max_face_residual,
            report.failing_faces.len()
        )));
    }
    let mut dev = develop(tri, &alpha.to_lorentz()?, base, tol.max(1e-6))?;
    for &v in tri.ideal_vertices() {
        let cusp = check_cusp_parabolicity(tri, alpha, v, base, tol.max(super::PARABOLIC_TOL))?;
        if let Some(&generator) = cusp.failing.first() {
            return Err(Error::NonParabolic { vertex: v, generator, kind: cusp.generators[generator].kind.clone() });
        }
        if let Some(p) = cusp.shared_fixed_point {
            dev.ideal_images.insert(v, p);
        }
    }
    Ok(dev)
}

/// Edge length of every non-ideal edge recomputed through the first
/// non-ideal 2-simplex containing it, as `d(o, α(u→w)α(w→v)·o)`. Edges on
/// no non-ideal 2-simplex are omitted.
pub fn alternative_edge_lengths<S: Real>(
    tri: &Triangulation,
    alpha: &Cocycle<LorentzGroup<S>>,
) -> Result<BTreeMap<(VertexId, VertexId), S>> {
    let n = alpha.dim();
    let o = HyperboloidPoint::basepoint(n);
    let dtol = S::from_f64(DEFAULT_TOL);
    let mut out = BTreeMap::new();
    for f in tri.non_ideal_faces() {
        for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            let (u, v, w) = (f[i], f[j], f[k]);
            if out.contains_key(&(u, v)) {
                continue;
            }
            let m = alpha.value(Edge::new(u, w))?.mul(&alpha.value(Edge::new(w, v))?);
            let p = apply_matrix(&m, &o)?;
            out.insert((u, v), hyp_distance_report(&o, &p, dtol)?.distance);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeLengthBound {
    pub max_length: f64,
    pub max_cosh_minus_one: f64,
    pub argmax: Option<Edge>,
}

pub fn edge_length_bound<S: Real>(dev: &DevelopedComplex<S>) -> EdgeLengthBound {
    let mut out = EdgeLengthBound { max_length: 0.0, max_cosh_minus_one: 0.0, argmax: None };
    for (&(u, v), d) in &dev.edge_lengths {
        let l = d.distance.to_f64();
        if out.argmax.is_none() || l > out.max_length {
            out.max_length = l;
            out.argmax = Some(Edge::new(u, v));
        }
        out.max_cosh_minus_one = out.max_cosh_minus_one.max(d.cosh_minus_one.to_f64());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::coboundary;
    use crate::hyperboloid::hyp_distance;
    use crate::sampling::{random_lorentz, random_sl2c};
    use crate::triangulation::base_tree;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    #[test]
    fn trivial_cocycle_develops_to_a_point() {
        let tri = Triangulation::boundary_of_simplex(4);
        let alpha = Cocycle::trivial(&tri, LorentzGroup::<f64>::new(4));
        let dev = develop(&tri, &alpha, &base_tree(&tri, 0).unwrap(), 1e-9).unwrap();
        let o = HyperboloidPoint::basepoint(4);
        assert!(dev.vertex_images.values().all(|p| *p == o));
        let b = edge_length_bound(&dev);
        assert_eq!((b.max_length, b.max_cosh_minus_one), (0.0, 0.0));
    }

    #[test]
    fn coboundary_images_and_lengths() {
        let tri = Triangulation::boundary_of_simplex(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut g: BTreeMap<_, _> = (0..5).map(|v| (v, random_lorentz(&mut rng, 3, 1.5))).collect();
        g.insert(0, Matrix::identity(4));
        let alpha = coboundary(&tri, LorentzGroup::new(3), &g).unwrap();
        let dev = develop(&tri, &alpha, &base_tree(&tri, 0).unwrap(), 1e-9).unwrap();
        let o = HyperboloidPoint::basepoint(3);
        let images: BTreeMap<_, _> = g.iter().map(|(&v, m)| (v, apply_matrix(m, &o).unwrap())).collect();
        for (v, p) in &dev.vertex_images {
            let diff = p.coords().iter().zip(images[v].coords()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(diff < 1e-9 * images[v].coords()[3]);
        }
        let mut expected = 0.0f64;
        for &(u, v) in tri.edges() {
            let d = hyp_distance(&images[&u], &images[&v]).unwrap();
            assert!((dev.edge_lengths[&(u, v)].distance - d).abs() < 1e-9);
            expected = expected.max(d);
        }
        assert!((edge_length_bound(&dev).max_length - expected).abs() < 1e-9);

        let alt = alternative_edge_lengths(&tri, &alpha).unwrap();
        assert_eq!(alt.len(), tri.edges().len());
        for (e, l) in alt {
            assert!((dev.edge_lengths[&e].distance - l).abs() < 1e-9);
        }

        // Conjugating by a rotation (which fixes the basepoint) preserves lengths.
        let h = crate::hyperboloid::LorentzMatrix::from_rotation(&crate::sampling::random_rotation(&mut rng, 3)).into_matrix();
        let conj = develop(&tri, &alpha.conjugate(&h), &base_tree(&tri, 0).unwrap(), 1e-9).unwrap();
        let b0 = edge_length_bound(&dev).max_length;
        assert!((edge_length_bound(&conj).max_length - b0).abs() < 1e-9);
    }

    #[test]
    fn broken_cocycle_is_not_developed() {
        let tri = Triangulation::boundary_of_simplex(3);
        let alpha = Cocycle::trivial(&tri, LorentzGroup::<f64>::new(3));
        let boost = crate::hyperboloid::LorentzMatrix::boost(3, 0, 0.3).into_matrix();
        let bad = alpha.with_value(Edge::new(0, 1), boost).unwrap();
        let r = develop(&tri, &bad, &base_tree(&tri, 0).unwrap(), 1e-9);
        assert!(matches!(r, Err(Error::CocycleVerification(_))));
    }

    #[test]
    fn sl2c_development_matches_lorentz_development() {
        // The link of vertex 0 in ∂Δ⁴ (n = 3) is a sphere, so its cusp loops are
        // null-homotopic and map to the identity: no fixed point is recorded.
        let tri = Triangulation::boundary_of_simplex(3).with_ideal(BTreeSet::from([0])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g: BTreeMap<_, _> = (1..5).map(|v| (v, random_sl2c(&mut rng, 0.7))).collect();
        let alpha = coboundary(&tri, Sl2cGroup::<f64>::new(), &g).unwrap();
        let base = base_tree(&tri, 1).unwrap();
        let dev = develop_sl2c(&tri, &alpha, &base, 1e-9).unwrap();
        assert!(dev.ideal_images.is_empty());
        assert_eq!(dev.vertex_images.len(), 4);
        let lor = develop(&tri, &alpha.to_lorentz().unwrap(), &base, 1e-6).unwrap();
        for (e, d) in &dev.edge_lengths {
            assert!((d.distance - lor.edge_lengths[e].distance).abs() < 1e-12);
        }
    }
}
