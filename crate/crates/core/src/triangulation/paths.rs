use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::{star_link, Edge, Triangulation, VertexId};
use crate::error::{Error, Result};

/// A chain of oriented edges, each starting where the previous one ends.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SimplicialPath {
    edges: Vec<Edge>,
}

impl SimplicialPath {
    pub fn new(edges: Vec<Edge>) -> Result<Self> {
        for (i, w) in edges.windows(2).enumerate() {
            if w[0].head != w[1].tail {
                return Err(Error::BrokenPath(i + 1));
            }
        }
        Ok(SimplicialPath { edges })
    }

    pub fn from_vertices(vertices: &[VertexId]) -> Self {
        SimplicialPath { edges: vertices.windows(2).map(|w| Edge::new(w[0], w[1])).collect() }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn start(&self) -> Option<VertexId> {
        self.edges.first().map(|e| e.tail)
    }

    pub fn end(&self) -> Option<VertexId> {
        self.edges.last().map(|e| e.head)
    }

    pub fn is_loop(&self) -> bool {
        self.start() == self.end()
    }

    pub fn inverse(&self) -> Self {
        SimplicialPath { edges: self.edges.iter().rev().map(|e| e.reversed()).collect() }
    }

    pub fn concat(&self, other: &SimplicialPath) -> Result<Self> {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Self::new(edges)
    }
}

/// Breadth-first spanning tree of the non-ideal 1-skeleton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaseTree {
    basepoint: VertexId,
    parent: BTreeMap<VertexId, VertexId>,
    depth: BTreeMap<VertexId, usize>,
}

impl BaseTree {
    pub fn basepoint(&self) -> VertexId {
        self.basepoint
    }

    /// Parent of each non-basepoint vertex.
    pub fn parents(&self) -> &BTreeMap<VertexId, VertexId> {
        &self.parent
    }

    pub fn depth(&self, v: VertexId) -> Option<usize> {
        self.depth.get(&v).copied()
    }

    pub fn spans(&self, v: VertexId) -> bool {
        self.depth.contains_key(&v)
    }

    pub fn is_tree_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.parent.get(&v) == Some(&u) || self.parent.get(&u) == Some(&v)
    }

    /// The tree path from the basepoint to `v`.
    pub fn path_to(&self, v: VertexId) -> Result<SimplicialPath> {
        if !self.spans(v) {
            return Err(Error::UnknownVertex(v));
        }
        let mut rev = Vec::new();
        let mut cur = v;
        while let Some(&p) = self.parent.get(&cur) {
            rev.push(Edge::new(p, cur));
            cur = p;
        }
        rev.reverse();
        Ok(SimplicialPath { edges: rev })
    }

    pub fn max_depth(&self) -> usize {
        self.depth.values().copied().max().unwrap_or(0)
    }
}

/// BFS from `basepoint` over non-ideal edges, lowest vertex id first.
pub fn base_tree(tri: &Triangulation, basepoint: VertexId) -> Result<BaseTree> {
    if basepoint >= tri.vertex_count() {
        return Err(Error::UnknownVertex(basepoint));
    }
    if tri.is_ideal(basepoint) {
        return Err(Error::IdealVertex(basepoint));
    }
    let mut parent = BTreeMap::new();
    let mut depth = BTreeMap::from([(basepoint, 0)]);
    let mut queue = VecDeque::from([basepoint]);
    while let Some(u) = queue.pop_front() {
        for &w in tri.neighbors(u) {
            if tri.is_ideal(w) || depth.contains_key(&w) {
                continue;
            }
            depth.insert(w, depth[&u] + 1);
            parent.insert(w, u);
            queue.push_back(w);
        }
    }
    if let Some(v) = tri.non_ideal_vertices().find(|v| !depth.contains_key(v)) {
        return Err(Error::Disconnected(v));
    }
    Ok(BaseTree { basepoint, parent, depth })
}

/// One generator of the cusp group: the non-tree link edge it comes from
/// and the based loop realizing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CuspLoop {
    pub link_edge: (VertexId, VertexId),
    pub path: SimplicialPath,
}

/// Generators of the fundamental group of the link of an ideal vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CuspGenerators {
    pub vertex: VertexId,
    /// Root of the link spanning tree.
    pub root: VertexId,
    /// Base-tree path from the basepoint to `root`.
    pub connector: SimplicialPath,
    /// The edge from `root` into the ideal vertex.
    pub cusp_edge: Edge,
    pub link_tree_parent: BTreeMap<VertexId, VertexId>,
    pub loops: Vec<CuspLoop>,
    /// `6t`, the length and count allowance in dimension 3.
    pub loop_bound: usize,
    pub within_bound: bool,
}

/// Loops `δ · (link-tree path to a) · (a→b) · (link-tree path back) · δ⁻¹`,
/// one per link edge `{a, b}` outside the link spanning tree.
pub fn cusp_generators(tri: &Triangulation, v: VertexId, base: &BaseTree) -> Result<CuspGenerators> {
    if v >= tri.vertex_count() {
        return Err(Error::UnknownVertex(v));
    }
    if !tri.is_ideal(v) {
        return Err(Error::NotIdeal(v));
    }
    let link = star_link(tri, v)?.link;
    let vertices = link.vertices();
    let edges = link.edges();
    let mut adjacency: BTreeMap<VertexId, BTreeSet<VertexId>> = vertices.iter().map(|&u| (u, BTreeSet::new())).collect();
    for &(a, b) in &edges {
        adjacency.get_mut(&a).expect("link vertex").insert(b);
        adjacency.get_mut(&b).expect("link vertex").insert(a);
    }
    let root = vertices[0];
    let mut parent = BTreeMap::new();
    let mut seen = BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &w in &adjacency[&u] {
            if seen.insert(w) {
                parent.insert(w, u);
                queue.push_back(w);
            }
        }
    }
    if let Some(&u) = vertices.iter().find(|u| !seen.contains(u)) {
        return Err(Error::Invariant(format!("link of ideal vertex {v} is disconnected at vertex {u}")));
    }
    let tree_path = |target: VertexId| -> SimplicialPath {
        let mut rev = Vec::new();
        let mut cur = target;
        while let Some(&p) = parent.get(&cur) {
            rev.push(Edge::new(p, cur));
            cur = p;
        }
        rev.reverse();
        SimplicialPath { edges: rev }
    };
    let connector = base.path_to(root)?;
    let back = connector.inverse();
    let mut loops = Vec::new();
    for &(a, b) in &edges {
        if parent.get(&b) == Some(&a) || parent.get(&a) == Some(&b) {
            continue;
        }
        let path = connector
            .concat(&tree_path(a))?
            .concat(&SimplicialPath { edges: vec![Edge::new(a, b)] })?
            .concat(&tree_path(b).inverse())?
            .concat(&back)?;
        loops.push(CuspLoop { link_edge: (a, b), path });
    }
    let loop_bound = 6 * tri.t();
    let within_bound = loops.len() < loop_bound && loops.iter().all(|l| l.path.len() <= loop_bound);
    Ok(CuspGenerators {
        vertex: v,
        root,
        connector,
        cusp_edge: Edge::new(root, v),
        link_tree_parent: parent,
        loops,
        loop_bound,
        within_bound,
    })
}
