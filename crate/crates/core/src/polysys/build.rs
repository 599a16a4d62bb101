use std::collections::BTreeMap;

use super::poly::{dot, ComplexPoly, Polynomial, VarId};
use super::{GroupKind, Part, PolySystem, Relation, Role, SystemCase};
use crate::error::{Error, Result};
use crate::triangulation::{base_tree, cusp_generators, BaseTree, Edge, Triangulation, VertexId};

pub(crate) fn edge_key(e: Edge) -> ((VertexId, VertexId), usize) {
    if e.is_canonical() {
        ((e.tail, e.head), 0)
    } else {
        ((e.head, e.tail), 1)
    }
}

pub(crate) fn default_tree(tri: &Triangulation) -> Result<BaseTree> {
    let bp = tri
        .default_basepoint()
        .ok_or_else(|| Error::Invariant("triangulation has no non-ideal vertex".into()))?;
    base_tree(tri, bp)
}

/// Endpoint of the lift of canonical edge `u→v` that starts at the image of
/// `u`: the image of `v` for tree edges, a separate lift otherwise.
pub(crate) fn lift_is_vertex(tree: &BaseTree, u: VertexId, v: VertexId) -> bool {
    tree.is_tree_edge(u, v)
}

type RealMat = Vec<Polynomial>;

fn mat_mul(a: &[Polynomial], b: &[Polynomial], k: usize) -> Result<RealMat> {
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let row: Vec<Polynomial> = (0..k).map(|l| a[i * k + l].clone()).collect();
            let col: Vec<Polynomial> = (0..k).map(|l| b[l * k + j].clone()).collect();
            out.push(dot(&row, &col)?);
        }
    }
    Ok(out)
}

fn mat_vec(a: &[Polynomial], w: &[Polynomial], k: usize) -> Result<Vec<Polynomial>> {
    (0..k).map(|i| dot(&a[i * k..(i + 1) * k], w)).collect()
}

fn vars_poly(ids: &[VarId]) -> RealMat {
    ids.iter().map(|&v| Polynomial::var(v)).collect()
}

pub fn build_closed_system(tri: &Triangulation, n: usize) -> Result<PolySystem> {
    if tri.dim() != n {
        return Err(Error::DimensionMismatch { expected: tri.dim(), found: n });
    }
    if !tri.is_closed() {
        return Err(Error::HasIdealVertices);
    }
    lorentz_system(tri, SystemCase::Closed)
}

/// `n ≥ 4`: the Lorentz system on non-ideal edges and 2-simplices.
/// `n = 3`: the SL(2, C) system with trace and fixed-point conditions.
pub fn build_cusped_system(tri: &Triangulation, n: usize) -> Result<PolySystem> {
    if tri.dim() != n {
        return Err(Error::DimensionMismatch { expected: tri.dim(), found: n });
    }
    if n < 3 {
        return Err(Error::OutOfRange { name: "n", value: n as f64, range: "n >= 3" });
    }
    if tri.is_closed() {
        return Err(Error::NoIdealVertices);
    }
    if n == 3 {
        sl2c_system(tri)
    } else {
        lorentz_system(tri, SystemCase::Cusped)
    }
}

pub(crate) fn lorentz_system(tri: &Triangulation, case: SystemCase) -> Result<PolySystem> {
    let n = tri.dim();
    let k = n + 1;
    let tree = default_tree(tri)?;
    let mut sys = PolySystem::new(case, GroupKind::Lorentz, n, tri.t());
    let edges: Vec<(VertexId, VertexId)> = tri.non_ideal_edges().collect();

    let mut mats: BTreeMap<(VertexId, VertexId), [RealMat; 2]> = BTreeMap::new();
    for &(u, v) in &edges {
        let mut pair: [RealMat; 2] = Default::default();
        for (o, slot) in pair.iter_mut().enumerate() {
            let mut ids = Vec::with_capacity(k * k);
            for r in 0..k {
                for c in 0..k {
                    let role = Role::EdgeEntry { tail: u, head: v, orientation: o as u8, row: r, col: c, part: None };
                    ids.push(sys.add_variable(format!("E{u}_{v}o{o}r{r}c{c}"), role)?);
                }
            }
            *slot = vars_poly(&ids);
        }
        mats.insert((u, v), pair);
    }
    let mat = |e: Edge| -> &RealMat {
        let (key, o) = edge_key(e);
        &mats[&key][o]
    };

    for f in tri.non_ideal_faces() {
        let prod = mat_mul(mat(Edge::new(f[0], f[1])), mat(Edge::new(f[1], f[2])), k)?;
        let c = mat(Edge::new(f[0], f[2]));
        for i in 0..k {
            for j in 0..k {
                let p = prod[i * k + j].sub(&c[i * k + j])?;
                sys.add_constraint(Relation::Eq, p, format!("face:{}-{}-{}:r{i}c{j}", f[0], f[1], f[2]))?;
            }
        }
    }

    for &(u, v) in &edges {
        let [m0, m1] = &mats[&(u, v)];
        let prod = mat_mul(m0, m1, k)?;
        for i in 0..k {
            for j in 0..k {
                let p = prod[i * k + j].sub(&Polynomial::constant((i == j) as i64))?;
                sys.add_constraint(Relation::Eq, p, format!("inverse:{u}-{v}:r{i}c{j}"))?;
            }
        }
    }

    // MᵀJM − J = 0, upper triangle.
    for &(u, v) in &edges {
        for (o, m) in mats[&(u, v)].iter().enumerate() {
            for i in 0..k {
                for j in i..k {
                    let mut terms = Polynomial::zero();
                    for l in 0..k {
                        let prod = m[l * k + i].mul(&m[l * k + j])?;
                        terms = if l == n { terms.sub(&prod)? } else { terms.add(&prod)? };
                    }
                    let jij = if i != j { 0 } else if i == n { -1 } else { 1 };
                    let p = terms.sub(&Polynomial::constant(jij))?;
                    sys.add_constraint(Relation::Eq, p, format!("member:{u}-{v}:o{o}:r{i}c{j}"))?;
                }
            }
        }
    }

    let basepoint: Vec<Polynomial> =
        (0..k).map(|i| if i == n { Polynomial::constant(1) } else { Polynomial::zero() }).collect();
    let develop_path = |edges: &[Edge]| -> Result<Vec<Polynomial>> {
        let mut w = basepoint.clone();
        for &e in edges.iter().rev() {
            w = mat_vec(mat(e), &w, k)?;
        }
        Ok(w)
    };

    let mut endpoint: BTreeMap<VertexId, Vec<VarId>> = BTreeMap::new();
    for v in tri.non_ideal_vertices() {
        let coords = develop_path(tree.path_to(v)?.edges())?;
        let mut ids = Vec::with_capacity(k);
        for (a, x) in coords.iter().enumerate() {
            let id = sys.add_variable(format!("V{v}a{a}"), Role::VertexCoord { vertex: v, axis: a })?;
            sys.add_constraint(Relation::Eq, Polynomial::var(id).sub(x)?, format!("vertex:{v}:a{a}"))?;
            ids.push(id);
        }
        endpoint.insert(v, ids);
    }

    let mut far: BTreeMap<(VertexId, VertexId), Vec<VarId>> = BTreeMap::new();
    for &(u, v) in &edges {
        if lift_is_vertex(&tree, u, v) {
            far.insert((u, v), endpoint[&v].clone());
            continue;
        }
        let mut path = tree.path_to(u)?.edges().to_vec();
        path.push(Edge::new(u, v));
        let coords = develop_path(&path)?;
        let mut ids = Vec::with_capacity(k);
        for (a, x) in coords.iter().enumerate() {
            let id = sys.add_variable(format!("L{u}_{v}a{a}"), Role::LiftCoord { tail: u, head: v, axis: a })?;
            sys.add_constraint(Relation::Eq, Polynomial::var(id).sub(x)?, format!("lift:{u}-{v}:a{a}"))?;
            ids.push(id);
        }
        far.insert((u, v), ids);
    }

    // C − (x_n y_n − Σ_{i<n} x_i y_i − 1) = 0 and C > 0.
    for &(u, v) in &edges {
        let c = sys.add_variable(format!("C{u}_{v}"), Role::EdgeC { tail: u, head: v })?;
        let (x, y) = (&endpoint[&u], &far[&(u, v)]);
        let mut p = Polynomial::var(c).add(&Polynomial::constant(1))?;
        for i in 0..k {
            let xy = Polynomial::var(x[i]).mul(&Polynomial::var(y[i]))?;
            p = if i == n { p.sub(&xy)? } else { p.add(&xy)? };
        }
        sys.add_constraint(Relation::Eq, p, format!("length:{u}-{v}"))?;
    }
    for &(u, v) in &edges {
        let c = sys.var_id(&format!("C{u}_{v}")).expect("registered");
        sys.add_constraint(Relation::Gt, Polynomial::var(c), format!("positive:{u}-{v}"))?;
    }
    Ok(sys)
}

type CMat = [ComplexPoly; 4];

fn cmat_mul(a: &CMat, b: &CMat) -> Result<CMat> {
    let e = |i: usize, j: usize| -> Result<ComplexPoly> { a[2 * i].mul(&b[j])?.add(&a[2 * i + 1].mul(&b[2 + j])?) };
    Ok([e(0, 0)?, e(0, 1)?, e(1, 0)?, e(1, 1)?])
}

fn cmat_identity() -> CMat {
    [ComplexPoly::real(1), ComplexPoly::default(), ComplexPoly::default(), ComplexPoly::real(1)]
}

/// `(X11, X22, Re X21, Im X21)` of `A A*`.
fn hermitian_coords(a: &CMat) -> Result<[Polynomial; 4]> {
    let x11 = a[0].mul(&a[0].conj())?.add(&a[1].mul(&a[1].conj())?)?;
    let x22 = a[2].mul(&a[2].conj())?.add(&a[3].mul(&a[3].conj())?)?;
    let x21 = a[2].mul(&a[0].conj())?.add(&a[3].mul(&a[1].conj())?)?;
    Ok([x11.re, x22.re, x21.re, x21.im])
}

fn push_complex(sys: &mut PolySystem, z: ComplexPoly, label: &str) -> Result<()> {
    sys.add_constraint(Relation::Eq, z.re, format!("{label}:re"))?;
    sys.add_constraint(Relation::Eq, z.im, format!("{label}:im"))
}

fn sl2c_system(tri: &Triangulation) -> Result<PolySystem> {
    let tree = default_tree(tri)?;
    let mut sys = PolySystem::new(SystemCase::Cusped, GroupKind::Sl2c, 3, tri.t());
    let edges: Vec<(VertexId, VertexId)> = tri.non_ideal_edges().collect();

    let mut mats: BTreeMap<(VertexId, VertexId), [CMat; 2]> = BTreeMap::new();
    for &(u, v) in &edges {
        let mut pair: [CMat; 2] = Default::default();
        for (o, slot) in pair.iter_mut().enumerate() {
            for r in 0..2 {
                for c in 0..2 {
                    let mut part_var = |part: Part, suffix: &str| {
                        let role = Role::EdgeEntry { tail: u, head: v, orientation: o as u8, row: r, col: c, part: Some(part) };
                        sys.add_variable(format!("E{u}_{v}o{o}r{r}c{c}{suffix}"), role)
                    };
                    let re = part_var(Part::Re, "re")?;
                    let im = part_var(Part::Im, "im")?;
                    slot[2 * r + c] = ComplexPoly::new(Polynomial::var(re), Polynomial::var(im));
                }
            }
        }
        mats.insert((u, v), pair);
    }
    let mat = |e: Edge| -> &CMat {
        let (key, o) = edge_key(e);
        &mats[&key][o]
    };

    for &(u, v) in &edges {
        for (o, m) in mats[&(u, v)].iter().enumerate() {
            let det = m[0].mul(&m[3])?.sub(&m[1].mul(&m[2])?)?.sub(&ComplexPoly::real(1))?;
            push_complex(&mut sys, det, &format!("det:{u}-{v}:o{o}"))?;
        }
    }
    for f in tri.non_ideal_faces() {
        let prod = cmat_mul(mat(Edge::new(f[0], f[1])), mat(Edge::new(f[1], f[2])))?;
        let c = mat(Edge::new(f[0], f[2]));
        for i in 0..2 {
            for j in 0..2 {
                let z = prod[2 * i + j].sub(&c[2 * i + j])?;
                push_complex(&mut sys, z, &format!("face:{}-{}-{}:r{i}c{j}", f[0], f[1], f[2]))?;
            }
        }
    }
    for &(u, v) in &edges {
        let [m0, m1] = &mats[&(u, v)];
        let prod = cmat_mul(m0, m1)?;
        for i in 0..2 {
            for j in 0..2 {
                let z = prod[2 * i + j].sub(&ComplexPoly::real((i == j) as i64))?;
                push_complex(&mut sys, z, &format!("inverse:{u}-{v}:r{i}c{j}"))?;
            }
        }
    }

    let path_product = |edges: &[Edge]| -> Result<CMat> {
        let mut acc = cmat_identity();
        for &e in edges {
            acc = cmat_mul(&acc, mat(e))?;
        }
        Ok(acc)
    };

    let mut endpoint: BTreeMap<VertexId, Vec<VarId>> = BTreeMap::new();
    for v in tri.non_ideal_vertices() {
        let coords = hermitian_coords(&path_product(tree.path_to(v)?.edges())?)?;
        let mut ids = Vec::with_capacity(4);
        for (a, x) in coords.iter().enumerate() {
            let id = sys.add_variable(format!("V{v}a{a}"), Role::VertexCoord { vertex: v, axis: a })?;
            sys.add_constraint(Relation::Eq, Polynomial::var(id).sub(x)?, format!("vertex:{v}:a{a}"))?;
            ids.push(id);
        }
        endpoint.insert(v, ids);
    }
    let mut far: BTreeMap<(VertexId, VertexId), Vec<VarId>> = BTreeMap::new();
    for &(u, v) in &edges {
        if lift_is_vertex(&tree, u, v) {
            far.insert((u, v), endpoint[&v].clone());
            continue;
        }
        let mut path = tree.path_to(u)?.edges().to_vec();
        path.push(Edge::new(u, v));
        let coords = hermitian_coords(&path_product(&path)?)?;
        let mut ids = Vec::with_capacity(4);
        for (a, x) in coords.iter().enumerate() {
            let id = sys.add_variable(format!("L{u}_{v}a{a}"), Role::LiftCoord { tail: u, head: v, axis: a })?;
            sys.add_constraint(Relation::Eq, Polynomial::var(id).sub(x)?, format!("lift:{u}-{v}:a{a}"))?;
            ids.push(id);
        }
        far.insert((u, v), ids);
    }
    // u w' + w u' − 2 x x' − 2 y y' − 2C − 2 = 0 for Hermitian coordinates.
    for &(u, v) in &edges {
        let c = sys.add_variable(format!("C{u}_{v}"), Role::EdgeC { tail: u, head: v })?;
        let (x, y) = (&endpoint[&u], &far[&(u, v)]);
        let pv = |id: VarId| Polynomial::var(id);
        let p = pv(x[0])
            .mul(&pv(y[1]))?
            .add(&pv(x[1]).mul(&pv(y[0]))?)?
            .sub(&pv(x[2]).mul(&pv(y[2]))?.scale(2)?)?
            .sub(&pv(x[3]).mul(&pv(y[3]))?.scale(2)?)?
            .sub(&pv(c).scale(2)?)?
            .sub(&Polynomial::constant(2))?;
        sys.add_constraint(Relation::Eq, p, format!("length:{u}-{v}"))?;
    }
    for &(u, v) in &edges {
        let c = sys.var_id(&format!("C{u}_{v}")).expect("registered");
        sys.add_constraint(Relation::Gt, Polynomial::var(c), format!("positive:{u}-{v}"))?;
    }

    for &cusp in tri.ideal_vertices() {
        let gens = cusp_generators(tri, cusp, &tree)?;
        let mut fixed = Vec::with_capacity(4);
        for a in 0..4 {
            fixed.push(sys.add_variable(format!("P{cusp}a{a}"), Role::CuspFixed { vertex: cusp, axis: a })?);
        }
        let norm = fixed.iter().try_fold(Polynomial::constant(-1), |acc, &id| {
            acc.add(&Polynomial::var(id).mul(&Polynomial::var(id))?)
        })?;
        sys.add_constraint(Relation::Eq, norm, format!("fixnorm:{cusp}"))?;
        let p = ComplexPoly::new(Polynomial::var(fixed[0]), Polynomial::var(fixed[1]));
        let q = ComplexPoly::new(Polynomial::var(fixed[2]), Polynomial::var(fixed[3]));
        let (pp, pq, qq) = (p.mul(&p)?, p.mul(&q)?, q.mul(&q)?);
        for (g, l) in gens.loops.iter().enumerate() {
            let m = path_product(l.path.edges())?;
            let tr = m[0].add(&m[3])?;
            let tr2 = tr.mul(&tr)?.sub(&ComplexPoly::real(4))?;
            push_complex(&mut sys, tr2, &format!("trace:{cusp}:g{g}"))?;
            // c p² + (d − a) p q − b q² = 0.
            let fix = m[2].mul(&pp)?.add(&m[3].sub(&m[0])?.mul(&pq)?)?.sub(&m[1].mul(&qq)?)?;
            push_complex(&mut sys, fix, &format!("fixes:{cusp}:g{g}"))?;
        }
    }
    Ok(sys)
}
