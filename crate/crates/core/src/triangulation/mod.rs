//! Simplicial (semi-ideal) triangulations: parsing, validation, census,
//! stars and links. Spanning trees and cusp loops live in [`paths`].

mod paths;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, TriangulationCheck as Check};

pub use paths::{base_tree, cusp_generators, BaseTree, CuspGenerators, CuspLoop, SimplicialPath};

pub type VertexId = usize;

pub const TRI_FORMAT: &str = "tri-v1";

/// An oriented 1-simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
}

impl Edge {
    pub fn new(tail: VertexId, head: VertexId) -> Self {
        Edge { tail, head }
    }

    pub fn reversed(self) -> Self {
        Edge { tail: self.head, head: self.tail }
    }

    /// Whether `tail < head`.
    pub fn is_canonical(self) -> bool {
        self.tail < self.head
    }

    pub fn canonical(self) -> Self {
        if self.is_canonical() {
            self
        } else {
            self.reversed()
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.tail, self.head)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTriangulation {
    format: String,
    dimension: usize,
    vertices: usize,
    #[serde(default)]
    ideal: Vec<VertexId>,
    simplices: Vec<Vec<VertexId>>,
}

/// A validated triangulation. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    n: usize,
    vertex_count: usize,
    ideal: BTreeSet<VertexId>,
    simplices: Vec<Vec<VertexId>>,
    edges: Vec<(VertexId, VertexId)>,
    faces: Vec<[VertexId; 3]>,
    adjacency: Vec<Vec<VertexId>>,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// All `k`-element subsets of a sorted slice, in lexicographic order.
pub(crate) fn subsets(items: &[VertexId], k: usize) -> Vec<Vec<VertexId>> {
    fn go(items: &[VertexId], k: usize, start: usize, cur: &mut Vec<VertexId>, out: &mut Vec<Vec<VertexId>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

impl Triangulation {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawTriangulation = serde_json::from_str(text).map_err(|e| Error::syntax(&e))?;
        if raw.format != TRI_FORMAT {
            return Err(Error::invalid(Check::Format, format!("expected `{TRI_FORMAT}`, found `{}`", raw.format)));
        }
        let mut ideal = BTreeSet::new();
        for &v in &raw.ideal {
            if !ideal.insert(v) {
                return Err(Error::invalid(Check::IdealVertexRange, format!("ideal vertex {v} listed twice")));
            }
        }
        Self::from_parts(raw.dimension, raw.vertices, ideal, raw.simplices)
    }

    /// Builds and validates. Simplices must be strictly increasing; their
    /// order in the list is irrelevant.
    pub fn from_parts(
        n: usize,
        vertex_count: usize,
        ideal: BTreeSet<VertexId>,
        mut simplices: Vec<Vec<VertexId>>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(Check::Dimension, format!("dimension {n} is below 2")));
        }
        if simplices.is_empty() || vertex_count == 0 {
            return Err(Error::invalid(Check::Empty, "no simplices"));
        }
        for s in &simplices {
            if s.len() != n + 1 {
                return Err(Error::invalid(
                    Check::SimplexSize,
                    format!("simplex {s:?} has {} vertices, expected {}", s.len(), n + 1),
                ));
            }
            if let Some(&v) = s.iter().find(|&&v| v >= vertex_count) {
                return Err(Error::invalid(Check::VertexRange, format!("vertex {v} in simplex {s:?} is out of range")));
            }
            for w in s.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::invalid(Check::RepeatedVertex, format!("simplex {s:?} repeats vertex {}", w[0])));
                }
            }
            if s.windows(2).any(|w| w[0] > w[1]) {
                let distinct: BTreeSet<_> = s.iter().collect();
                let check = if distinct.len() < s.len() { Check::RepeatedVertex } else { Check::UnsortedSimplex };
                return Err(Error::invalid(check, format!("simplex {s:?} is not strictly increasing")));
            }
        }
        simplices.sort();
        for w in simplices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::invalid(Check::DuplicateSimplex, format!("simplex {:?} appears twice", w[0])));
            }
        }
        let mut used = vec![false; vertex_count];
        for s in &simplices {
            for &v in s {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::invalid(Check::UnusedVertex, format!("vertex {v} lies in no simplex")));
        }

        let mut ridge_count: BTreeMap<Vec<VertexId>, (usize, usize)> = BTreeMap::new();
        for (idx, s) in simplices.iter().enumerate() {
            for skip in 0..=n {
                let ridge: Vec<VertexId> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                ridge_count.entry(ridge).or_insert((0, idx)).0 += 1;
            }
        }
        if let Some((ridge, (count, idx))) = ridge_count.iter().find(|(_, (c, _))| *c != 2) {
            return Err(Error::invalid(
                Check::FacePairing,
                format!("face {ridge:?} of simplex {:?} lies in {count} top simplices, expected 2", simplices[*idx]),
            ));
        }

        if let Some(&v) = ideal.iter().find(|&&v| v >= vertex_count) {
            return Err(Error::invalid(Check::IdealVertexRange, format!("ideal vertex {v} is out of range")));
        }
        for s in &simplices {
            if s.iter().filter(|v| ideal.contains(v)).count() > 1 {
                return Err(Error::invalid(
                    Check::MultipleIdealVertices,
                    format!("simplex {s:?} has more than one ideal vertex"),
                ));
            }
        }

        let mut edge_set = BTreeSet::new();
        let mut face_set = BTreeSet::new();
        for s in &simplices {
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    edge_set.insert((s[i], s[j]));
                    for k in j + 1..s.len() {
                        face_set.insert([s[i], s[j], s[k]]);
                    }
                }
            }
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v) in &edge_set {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }

        let mut seen = vec![false; vertex_count];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &w in &adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(Check::Connectivity, format!("vertex {v} is not connected to vertex 0")));
        }

        Ok(Triangulation {
            n,
            vertex_count,
            ideal,
            simplices,
            edges: edge_set.into_iter().collect(),
            faces: face_set.into_iter().collect(),
            adjacency,
        })
    }

    /// Canonical single-line JSON, simplices sorted.
    pub fn to_json(&self) -> String {
        let raw = RawTriangulation {
            format: TRI_FORMAT.to_string(),
            dimension: self.n,
            vertices: self.vertex_count,
            ideal: self.ideal.iter().copied().collect(),
            simplices: self.simplices.clone(),
        };
        serde_json::to_string(&raw).expect("triangulation serializes") + "\n"
    }

    /// Boundary of the (n+1)-simplex, a triangulated n-sphere.
    pub fn boundary_of_simplex(n: usize) -> Self {
        let all: Vec<VertexId> = (0..n + 2).collect();
        Self::from_parts(n, n + 2, BTreeSet::new(), subsets(&all, n + 1)).expect("simplex boundary is valid")
    }

    /// The same complex with a different ideal set.
    pub fn with_ideal(&self, ideal: BTreeSet<VertexId>) -> Result<Self> {
        Self::from_parts(self.n, self.vertex_count, ideal, self.simplices.clone())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of top simplices.
    pub fn t(&self) -> usize {
        self.simplices.len()
    }

    pub fn simplices(&self) -> &[Vec<VertexId>] {
        &self.simplices
    }

    pub fn ideal_vertices(&self) -> &BTreeSet<VertexId> {
        &self.ideal
    }

    pub fn is_ideal(&self, v: VertexId) -> bool {
        self.ideal.contains(&v)
    }

    pub fn is_closed(&self) -> bool {
        self.ideal.is_empty()
    }

    /// All edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// All 2-faces, sorted.
    pub fn faces(&self) -> &[[VertexId; 3]] {
        &self.faces
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn non_ideal_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_count).filter(|v| !self.ideal.contains(v))
    }

    pub fn non_ideal_edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied().filter(|(u, v)| !self.is_ideal(*u) && !self.is_ideal(*v))
    }

    pub fn non_ideal_faces(&self) -> impl Iterator<Item = [VertexId; 3]> + '_ {
        self.faces.iter().copied().filter(|f| f.iter().all(|v| !self.is_ideal(*v)))
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        let key = if u < v { (u, v) } else { (v, u) };
        u != v && self.edges.binary_search(&key).is_ok()
    }

    /// Smallest non-ideal vertex.
    pub fn default_basepoint(&self) -> Option<VertexId> {
        self.non_ideal_vertices().next()
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v >= self.vertex_count {
            return Err(Error::UnknownVertex(v));
        }
        Ok(())
    }

    /// Number of k-faces for k = 0..=n.
    pub fn f_vector(&self) -> Vec<usize> {
        face_counts(self.simplices.iter(), self.n)
    }
}

fn face_counts<'a>(tops: impl Iterator<Item = &'a Vec<VertexId>>, n: usize) -> Vec<usize> {
    let mut faces: Vec<BTreeSet<Vec<VertexId>>> = vec![BTreeSet::new(); n + 1];
    for s in tops {
        for k in 1..=s.len() {
            for sub in subsets(s, k) {
                faces[k - 1].insert(sub);
            }
        }
    }
    faces.iter().map(|f| f.len()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub dimension: usize,
    pub vertices: usize,
    pub edges: usize,
    pub faces2: usize,
    pub simplices: usize,
    pub ideal_vertices: usize,
    pub non_ideal_edges: usize,
    pub non_ideal_faces2: usize,
    pub f_vector: Vec<usize>,
    pub euler_characteristic: i64,
    /// `C(n+1, 2)·t`.
    pub edge_bound: usize,
    /// `C(n+1, 3)·t`.
    pub face_bound: usize,
    pub bounds_hold: bool,
}

pub fn census(tri: &Triangulation) -> Census {
    let t = tri.t();
    let edge_bound = binomial(tri.n + 1, 2) * t;
    let face_bound = binomial(tri.n + 1, 3) * t;
    let f_vector = tri.f_vector();
    let euler_characteristic = f_vector.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum();
    Census {
        dimension: tri.n,
        vertices: tri.vertex_count,
        edges: tri.edges.len(),
        faces2: tri.faces.len(),
        simplices: t,
        ideal_vertices: tri.ideal.len(),
        non_ideal_edges: tri.non_ideal_edges().count(),
        non_ideal_faces2: tri.non_ideal_faces().count(),
        f_vector,
        euler_characteristic,
        edge_bound,
        face_bound,
        bounds_hold: tri.edges.len() <= edge_bound && tri.faces.len() <= face_bound,
    }
}

/// A subcomplex stored as the set of all its nonempty simplices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Subcomplex {
    simplices: BTreeSet<Vec<VertexId>>,
}

impl Subcomplex {
    fn closure<'a>(tops: impl Iterator<Item = &'a Vec<VertexId>>) -> Self {
        let mut simplices = BTreeSet::new();
        for s in tops {
            for k in 1..=s.len() {
                simplices.extend(subsets(s, k));
            }
        }
        Subcomplex { simplices }
    }

    pub fn simplices(&self) -> &BTreeSet<Vec<VertexId>> {
        &self.simplices
    }

    pub fn contains(&self, s: &[VertexId]) -> bool {
        self.simplices.contains(s)
    }

    pub fn is_subcomplex_of(&self, other: &Subcomplex) -> bool {
        self.simplices.is_subset(&other.simplices)
    }

    /// Number of simplices of each dimension, starting at 0.
    pub fn f_vector(&self) -> Vec<usize> {
        let top = self.simplices.iter().map(|s| s.len()).max().unwrap_or(0);
        let mut f = vec![0; top];
        for s in &self.simplices {
            f[s.len() - 1] += 1;
        }
        f
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        self.simplices.iter().filter(|s| s.len() == 1).map(|s| s[0]).collect()
    }

    /// 1-simplices as sorted pairs.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.simplices.iter().filter(|s| s.len() == 2).map(|s| (s[0], s[1])).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarLink {
    pub star: Subcomplex,
    pub link: Subcomplex,
}

pub fn star_link(tri: &Triangulation, v: VertexId) -> Result<StarLink> {
    tri.check_vertex(v)?;
    let star = Subcomplex::closure(tri.simplices.iter().filter(|s| s.binary_search(&v).is_ok()));
    let link = Subcomplex {
        simplices: star.simplices.iter().filter(|s| s.binary_search(&v).is_err()).cloned().collect(),
    };
    Ok(StarLink { star, link })
}

#[cfg(test)]
mod tests {
    use super::*;

    const S3: &str = r#"{"format":"tri-v1","dimension":3,"vertices":5,"ideal":[],
        "simplices":[[0,1,2,3],[0,1,2,4],[0,1,3,4],[0,2,3,4],[1,2,3,4]]}"#;

    fn check_of(err: Error) -> Check {
        match err {
            Error::InvalidTriangulation { check, .. } => check,
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn parses_boundary_of_4_simplex() {
        let tri = Triangulation::parse(S3).unwrap();
        assert_eq!(tri, Triangulation::boundary_of_simplex(3));
        assert!(tri.is_closed());
        let c = census(&tri);
        assert_eq!((c.vertices, c.edges, c.faces2, c.simplices), (5, 10, 10, 5));
        assert_eq!((c.edge_bound, c.face_bound), (30, 20));
        assert!(c.bounds_hold);
        assert_eq!(c.euler_characteristic, 0);
    }

    #[test]
    fn semi_ideal_census() {
        let tri = Triangulation::parse(&S3.replace("\"ideal\":[]", "\"ideal\":[0]")).unwrap();
        let c = census(&tri);
        assert_eq!((c.ideal_vertices, c.non_ideal_edges), (1, 6));
    }

    #[test]
    fn rejections() {
        let lone = r#"{"format":"tri-v1","dimension":3,"vertices":4,"simplices":[[0,1,2,3]]}"#;
        assert_eq!(check_of(Triangulation::parse(lone).unwrap_err()), Check::FacePairing);
        let dup = S3.replace("[1,2,3,4]]", "[1,2,3,4],[0,1,2,3]]");
        assert_eq!(check_of(Triangulation::parse(&dup).unwrap_err()), Check::DuplicateSimplex);
        let unsorted = S3.replace("[1,2,3,4]", "[2,1,3,4]");
        assert_eq!(check_of(Triangulation::parse(&unsorted).unwrap_err()), Check::UnsortedSimplex);
        let two_ideal = S3.replace("\"ideal\":[]", "\"ideal\":[0,1]");
        assert_eq!(check_of(Triangulation::parse(&two_ideal).unwrap_err()), Check::MultipleIdealVertices);
        let empty = r#"{"format":"tri-v1","dimension":3,"vertices":0,"simplices":[]}"#;
        assert_eq!(check_of(Triangulation::parse(empty).unwrap_err()), Check::Empty);
        let extra = S3.replace("\"vertices\":5", "\"vertices\":6");
        assert_eq!(check_of(Triangulation::parse(&extra).unwrap_err()), Check::UnusedVertex);
        assert!(matches!(Triangulation::parse("{\"format\": "), Err(Error::Syntax { .. })));
    }

    #[test]
    fn disconnected_complex_is_rejected() {
        let two = r#"{"format":"tri-v1","dimension":2,"vertices":8,"simplices":
            [[0,1,2],[0,1,3],[0,2,3],[1,2,3],[4,5,6],[4,5,7],[4,6,7],[5,6,7]]}"#;
        assert_eq!(check_of(Triangulation::parse(two).unwrap_err()), Check::Connectivity);
    }

    #[test]
    fn canonical_round_trip() {
        let shuffled = S3.replace(
            "[[0,1,2,3],[0,1,2,4],[0,1,3,4],[0,2,3,4],[1,2,3,4]]",
            "[[1,2,3,4],[0,2,3,4],[0,1,2,3],[0,1,3,4],[0,1,2,4]]",
        );
        let tri = Triangulation::parse(&shuffled).unwrap();
        let text = tri.to_json();
        assert_eq!(Triangulation::parse(&text).unwrap().to_json(), text);
        assert!(text.contains("[[0,1,2,3],[0,1,2,4]"));
    }

    #[test]
    fn star_and_link_of_a_vertex() {
        let tri = Triangulation::boundary_of_simplex(3);
        let sl = star_link(&tri, 0).unwrap();
        assert_eq!(sl.star.f_vector(), vec![5, 10, 10, 4]);
        assert_eq!(sl.link.f_vector(), vec![4, 6, 4]);
        assert_eq!(sl.link.euler_characteristic(), 2);
        assert!(sl.link.is_subcomplex_of(&sl.star));
        assert!(sl.link.contains(&[1, 2, 3]));
        assert!(star_link(&tri, 9).is_err());
    }
}
