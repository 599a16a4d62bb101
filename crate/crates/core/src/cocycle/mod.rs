//! Group-valued cocycles on the non-ideal edges of a triangulation.
//!
//! Only the canonical orientation `tail < head` is stored; the reverse is
//! the group inverse, computed on demand.

mod develop;
mod format;
mod sl2;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use std::marker::PhantomData;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperboloid::{is_lorentz_matrix, lorentz_inverse};
use crate::linalg::Matrix;
use crate::real::{Real, Scalar};
use crate::triangulation::{Edge, SimplicialPath, Triangulation, VertexId};

pub use develop::{alternative_edge_lengths, develop, develop_sl2c, edge_length_bound, DevelopedComplex, EdgeLengthBound};
pub use format::{AnyCocycle, COC_FORMAT};
pub use sl2::{
    check_cusp_parabolicity, chordal_distance, classify_sl2, embed_sl2_as_lorentz, hermitian_image, BoundaryPoint,
    CuspReport, GeneratorReport, Sl2Class, PARABOLIC_TOL,
};

/// A matrix group with a cheap exact inverse formula.
pub trait Group: Clone + Debug + Send + Sync {
    type Entry: Scalar;

    fn name(&self) -> &'static str;
    fn size(&self) -> usize;
    fn inverse(&self, m: &Matrix<Self::Entry>) -> Matrix<Self::Entry>;
    /// How far `m` is from the group, as a max-norm style residual.
    fn membership_residual(&self, m: &Matrix<Self::Entry>) -> f64;

    fn identity(&self) -> Matrix<Self::Entry> {
        Matrix::identity(self.size())
    }
}

/// SO⁺(n,1) acting on Lorentzian (n+1)-space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LorentzGroup<S> {
    n: usize,
    _real: PhantomData<S>,
}

impl<S> LorentzGroup<S> {
    pub fn new(n: usize) -> Self {
        LorentzGroup { n, _real: PhantomData }
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

impl<S: Real> Group for LorentzGroup<S> {
    type Entry = S;

    fn name(&self) -> &'static str {
        "lorentz"
    }

    fn size(&self) -> usize {
        self.n + 1
    }

    fn inverse(&self, m: &Matrix<S>) -> Matrix<S> {
        lorentz_inverse(m)
    }

    fn membership_residual(&self, m: &Matrix<S>) -> f64 {
        let r = is_lorentz_matrix(m, 0.0);
        if r.sheet_entry > 0.0 {
            r.form_residual.max(r.det_residual)
        } else {
            f64::INFINITY
        }
    }
}

/// SL(2, C).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sl2cGroup<S> {
    _real: PhantomData<S>,
}

impl<S> Sl2cGroup<S> {
    pub fn new() -> Self {
        Sl2cGroup { _real: PhantomData }
    }
}

impl<S> Default for Sl2cGroup<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Real> Group for Sl2cGroup<S> {
    type Entry = Complex<S>;

    fn name(&self) -> &'static str {
        "sl2c"
    }

    fn size(&self) -> usize {
        2
    }

    fn inverse(&self, m: &Matrix<Complex<S>>) -> Matrix<Complex<S>> {
        Matrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => m[(1, 1)],
            (1, 1) => m[(0, 0)],
            _ => -m[(i, j)],
        })
    }

    fn membership_residual(&self, m: &Matrix<Complex<S>>) -> f64 {
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        (det - Complex::new(S::one(), S::zero())).modulus().to_f64()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle<G: Group> {
    group: G,
    ideal: BTreeSet<VertexId>,
    values: BTreeMap<(VertexId, VertexId), Matrix<G::Entry>>,
}

impl<G: Group> Cocycle<G> {
    /// Values are keyed by canonical edges `(tail, head)` with `tail < head`.
    /// Every key must be a non-ideal edge of `tri`; coverage is checked by
    /// [`verify_cocycle`].
    pub fn new(
        tri: &Triangulation,
        group: G,
        values: BTreeMap<(VertexId, VertexId), Matrix<G::Entry>>,
    ) -> Result<Self> {
        for (&(u, v), m) in &values {
            let edge = Edge::new(u, v);
            if u >= v || !tri.has_edge(u, v) {
                return Err(Error::UnknownEdge(edge));
            }
            if tri.is_ideal(u) || tri.is_ideal(v) {
                return Err(Error::IdealEdge(edge));
            }
            if m.rows() != group.size() || m.cols() != group.size() {
                return Err(Error::DimensionMismatch { expected: group.size(), found: m.rows() });
            }
        }
        Ok(Cocycle { group, ideal: tri.ideal_vertices().clone(), values })
    }

    /// The identity on every non-ideal edge.
    pub fn trivial(tri: &Triangulation, group: G) -> Self {
        let values = tri.non_ideal_edges().map(|e| (e, group.identity())).collect();
        Cocycle { group, ideal: tri.ideal_vertices().clone(), values }
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn values(&self) -> &BTreeMap<(VertexId, VertexId), Matrix<G::Entry>> {
        &self.values
    }

    /// `α(e)`, inverting the stored value for non-canonical orientations.
    pub fn value(&self, e: Edge) -> Result<Matrix<G::Entry>> {
        let c = e.canonical();
        match self.values.get(&(c.tail, c.head)) {
            Some(m) if e.is_canonical() => Ok(m.clone()),
            Some(m) => Ok(self.group.inverse(m)),
            None if self.ideal.contains(&e.tail) || self.ideal.contains(&e.head) => Err(Error::IdealEdge(e)),
            None => Err(Error::MissingEdgeValue(c)),
        }
    }

    /// Replaces one stored value, e.g. to build a perturbed cocycle.
    pub fn with_value(&self, e: Edge, m: Matrix<G::Entry>) -> Result<Self> {
        let c = e.canonical();
        if !self.values.contains_key(&(c.tail, c.head)) {
            return Err(Error::UnknownEdge(c));
        }
        let mut out = self.clone();
        let m = if e.is_canonical() { m } else { self.group.inverse(&m) };
        out.values.insert((c.tail, c.head), m);
        Ok(out)
    }

    /// `g⁻¹ α g`.
    pub fn conjugate(&self, g: &Matrix<G::Entry>) -> Self {
        let gi = self.group.inverse(g);
        let values = self.values.iter().map(|(&k, m)| (k, gi.mul(m).mul(g))).collect();
        Cocycle { group: self.group.clone(), ideal: self.ideal.clone(), values }
    }
}

/// `α(u→v) = g_u⁻¹ g_v` on every non-ideal edge.
pub fn coboundary<G: Group>(
    tri: &Triangulation,
    group: G,
    g: &BTreeMap<VertexId, Matrix<G::Entry>>,
) -> Result<Cocycle<G>> {
    let mut values = BTreeMap::new();
    for (u, v) in tri.non_ideal_edges() {
        let gu = g.get(&u).ok_or(Error::UnknownVertex(u))?;
        let gv = g.get(&v).ok_or(Error::UnknownVertex(v))?;
        values.insert((u, v), group.inverse(gu).mul(gv));
    }
    Cocycle::new(tri, group, values)
}

/// `α(e_1) ⋯ α(e_k)`; the empty path gives the identity.
pub fn eval_path<G: Group>(alpha: &Cocycle<G>, path: &SimplicialPath) -> Result<Matrix<G::Entry>> {
    let mut acc = alpha.group.identity();
    for &e in path.edges() {
        if alpha.ideal.contains(&e.tail) || alpha.ideal.contains(&e.head) {
            return Err(Error::IdealEdge(e));
        }
        acc = acc.mul(&alpha.value(e)?);
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceResidual {
    pub face: [VertexId; 3],
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeResidual {
    pub edge: Edge,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CocycleReport {
    pub group: &'static str,
    pub tolerance: f64,
    /// `‖α(a)α(b) − α(c)‖_max` for `a: v0→v1`, `b: v1→v2`, `c: v0→v2`.
    pub faces: Vec<FaceResidual>,
    /// `‖α(e)α(ē) − I‖_max`.
    pub inverses: Vec<EdgeResidual>,
    pub membership: Vec<EdgeResidual>,
    pub max_face_residual: f64,
    pub max_inverse_residual: f64,
    pub max_membership_residual: f64,
    /// Faces whose residual exceeds the tolerance.
    pub failing_faces: Vec<[VertexId; 3]>,
    pub passes: bool,
}

pub fn verify_cocycle<G: Group>(tri: &Triangulation, alpha: &Cocycle<G>, tol: f64) -> Result<CocycleReport> {
    for (u, v) in tri.non_ideal_edges() {
        if !alpha.values.contains_key(&(u, v)) {
            return Err(Error::MissingEdgeValue(Edge::new(u, v)));
        }
    }
    let id = alpha.group.identity();
    let mut inverses = Vec::new();
    let mut membership = Vec::new();
    for (&(u, v), m) in &alpha.values {
        let edge = Edge::new(u, v);
        let back = alpha.value(edge.reversed())?;
        inverses.push(EdgeResidual { edge, residual: m.mul(&back).max_abs_diff(&id).to_f64() });
        membership.push(EdgeResidual { edge, residual: alpha.group.membership_residual(m) });
    }
    let mut faces = Vec::new();
    for f in tri.non_ideal_faces() {
        let a = alpha.value(Edge::new(f[0], f[1]))?;
        let b = alpha.value(Edge::new(f[1], f[2]))?;
        let c = alpha.value(Edge::new(f[0], f[2]))?;
        faces.push(FaceResidual { face: f, residual: a.mul(&b).max_abs_diff(&c).to_f64() });
    }
    let max = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, |m, x| if x > m || x.is_nan() { x } else { m });
    let max_face_residual = max(&mut faces.iter().map(|f| f.residual));
    let max_inverse_residual = max(&mut inverses.iter().map(|f| f.residual));
    let max_membership_residual = max(&mut membership.iter().map(|f| f.residual));
    let failing_faces: Vec<_> = faces.iter().filter(|f| !(f.residual <= tol)).map(|f| f.face).collect();
    let passes = failing_faces.is_empty() && max_inverse_residual <= tol && max_membership_residual <= tol;
    Ok(CocycleReport {
        group: alpha.group.name(),
        tolerance: tol,
        faces,
        inverses,
        membership,
        max_face_residual,
        max_inverse_residual,
        max_membership_residual,
        failing_faces,
        passes,
    })
}

impl<S: Real> Cocycle<LorentzGroup<S>> {
    pub fn dim(&self) -> usize {
        self.group.n
    }

    /// The same cocycle with entries converted to another real type.
    pub fn to_real<T: Real>(&self) -> Cocycle<LorentzGroup<T>> {
        let values = self.values.iter().map(|(&k, m)| (k, m.map(|x| T::from_f64(x.to_f64())))).collect();
        Cocycle { group: LorentzGroup::new(self.group.n), ideal: self.ideal.clone(), values }
    }
}

impl<S: Real> Cocycle<Sl2cGroup<S>> {
    pub fn to_real<T: Real>(&self) -> Cocycle<Sl2cGroup<T>> {
        let values = self
            .values
            .iter()
            .map(|(&k, m)| (k, m.map(|z| Complex::new(T::from_f64(z.re.to_f64()), T::from_f64(z.im.to_f64())))))
            .collect();
        Cocycle { group: Sl2cGroup::new(), ideal: self.ideal.clone(), values }
    }

    /// The Lorentz cocycle obtained through `X ↦ A X A*`.
    pub fn to_lorentz(&self) -> Result<Cocycle<LorentzGroup<S>>> {
        let mut values = BTreeMap::new();
        for (&k, m) in &self.values {
            values.insert(k, embed_sl2_as_lorentz(m, 1e-6)?);
        }
        Ok(Cocycle { group: LorentzGroup::new(3), ideal: self.ideal.clone(), values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_lorentz, random_sl2c};
    use crate::triangulation::base_tree;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s3() -> Triangulation {
        Triangulation::boundary_of_simplex(3)
    }

    #[test]
    fn trivial_cocycle_passes() {
        let tri = s3();
        let alpha = Cocycle::trivial(&tri, LorentzGroup::<f64>::new(3));
        let r = verify_cocycle(&tri, &alpha, 1e-12).unwrap();
        assert!(r.passes);
        assert_eq!((r.max_face_residual, r.max_inverse_residual, r.max_membership_residual), (0.0, 0.0, 0.0));
    }

    #[test]
    fn coboundaries_pass_and_perturbations_fail() {
        let tri = s3();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g: BTreeMap<_, _> = (0..5).map(|v| (v, random_lorentz(&mut rng, 3, 1.0))).collect();
        let alpha = coboundary(&tri, LorentzGroup::new(3), &g).unwrap();
        assert!(verify_cocycle(&tri, &alpha, 1e-9).unwrap().passes);

        let mut m = alpha.value(Edge::new(1, 3)).unwrap();
        m[(0, 0)] += 1e-3;
        let bad = alpha.with_value(Edge::new(1, 3), m).unwrap();
        let r = verify_cocycle(&tri, &bad, 1e-9).unwrap();
        assert!(!r.passes);
        let expected: Vec<[usize; 3]> = tri.faces().iter().copied().filter(|f| f.contains(&1) && f.contains(&3)).collect();
        assert_eq!(r.failing_faces, expected);
    }

    #[test]
    fn missing_values_are_named() {
        let tri = s3();
        let mut values = Cocycle::trivial(&tri, LorentzGroup::<f64>::new(3)).values().clone();
        values.remove(&(2, 4));
        let alpha = Cocycle::new(&tri, LorentzGroup::new(3), values).unwrap();
        assert!(matches!(verify_cocycle(&tri, &alpha, 1e-9), Err(Error::MissingEdgeValue(e)) if e == Edge::new(2, 4)));
    }

    #[test]
    fn path_evaluation() {
        let tri = s3();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g: BTreeMap<_, _> = (0..5).map(|v| (v, random_sl2c(&mut rng, 1.0))).collect();
        let alpha = coboundary(&tri, Sl2cGroup::<f64>::new(), &g).unwrap();
        let id = Matrix::<Complex<f64>>::identity(2);
        assert_eq!(eval_path(&alpha, &SimplicialPath::default()).unwrap(), id);
        let there_and_back = SimplicialPath::from_vertices(&[1, 4, 1]);
        assert!(eval_path(&alpha, &there_and_back).unwrap().max_abs_diff(&id) < 1e-12);
        // Across a 2-simplex: 0→2 equals 0→1→2.
        let tree = base_tree(&tri, 0).unwrap();
        let direct = eval_path(&alpha, &tree.path_to(2).unwrap()).unwrap();
        let around = eval_path(&alpha, &SimplicialPath::from_vertices(&[0, 1, 2])).unwrap();
        assert!(direct.max_abs_diff(&around) < 1e-12);
    }

    #[test]
    fn ideal_edges_are_rejected_in_paths() {
        let tri = s3().with_ideal(BTreeSet::from([0])).unwrap();
        let alpha = Cocycle::trivial(&tri, LorentzGroup::<f64>::new(3));
        assert_eq!(alpha.values().len(), 6);
        let path = SimplicialPath::from_vertices(&[1, 0]);
        assert!(matches!(eval_path(&alpha, &path), Err(Error::IdealEdge(_))));
    }
}
