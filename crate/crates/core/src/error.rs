use std::fmt;

use crate::triangulation::{Edge, VertexId};

/// Named structural checks performed when a triangulation is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangulationCheck {
    Format,
    Dimension,
    Empty,
    SimplexSize,
    VertexRange,
    RepeatedVertex,
    UnsortedSimplex,
    DuplicateSimplex,
    UnusedVertex,
    FacePairing,
    Connectivity,
    IdealVertexRange,
    MultipleIdealVertices,
}

impl fmt::Display for TriangulationCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            TriangulationCheck::Format => "format",
            TriangulationCheck::Dimension => "dimension",
            TriangulationCheck::Empty => "non-empty",
            TriangulationCheck::SimplexSize => "simplex-size",
            TriangulationCheck::VertexRange => "vertex-range",
            TriangulationCheck::RepeatedVertex => "repeated-vertex",
            TriangulationCheck::UnsortedSimplex => "sorted-simplex",
            TriangulationCheck::DuplicateSimplex => "duplicate-simplex",
            TriangulationCheck::UnusedVertex => "unused-vertex",
            TriangulationCheck::FacePairing => "face-pairing",
            TriangulationCheck::Connectivity => "connectivity",
            TriangulationCheck::IdealVertexRange => "ideal-vertex-range",
            TriangulationCheck::MultipleIdealVertices => "one-ideal-vertex-per-simplex",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("arcosh argument {argument} is below 1 beyond tolerance")]
    ArcoshDomain { argument: f64 },

    #[error("{name} = {value} is outside its admissible range {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("triangulation check `{check}` failed: {detail}")]
    InvalidTriangulation { check: TriangulationCheck, detail: String },

    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("vertex {0} is not ideal")]
    NotIdeal(VertexId),

    #[error("vertex {0} is ideal")]
    IdealVertex(VertexId),

    #[error("non-ideal 1-skeleton is disconnected: vertex {0} unreachable from the basepoint")]
    Disconnected(VertexId),

    #[error("edge {0} is not an edge of the complex")]
    UnknownEdge(Edge),

    #[error("edge {0} touches an ideal vertex")]
    IdealEdge(Edge),

    #[error("cocycle has no value on edge {0}")]
    MissingEdgeValue(Edge),

    #[error("cocycle format error: {0}")]
    CocycleFormat(String),

    #[error("path is not contiguous at step {0}")]
    BrokenPath(usize),

    #[error("cocycle verification failed: {0}")]
    CocycleVerification(String),

    #[error("cusp generator {generator} of ideal vertex {vertex} is {kind}, expected parabolic")]
    NonParabolic { vertex: VertexId, generator: usize, kind: String },

    #[error("determinant {det_re} + {det_im}i differs from 1 beyond tolerance")]
    NotUnimodular { det_re: f64, det_im: f64 },

    #[error("triangulation has ideal vertices; the closed system needs a closed input")]
    HasIdealVertices,

    #[error("triangulation has no ideal vertices")]
    NoIdealVertices,

    #[error("polynomial expansion for {what} would produce about {terms} terms")]
    ExpansionTooLarge { what: String, terms: f64 },

    #[error("assignment is missing variable {0}")]
    MissingVariable(String),

    #[error("unknown variable {0}")]
    UnknownVariable(String),

    #[error("polynomial system format error at line {line}: {message}")]
    SystemFormat { line: usize, message: String },

    #[error("recurrence not found within cap {cap}")]
    RecurrenceNotFound { cap: u64 },

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("denominator is zero")]
    ZeroDenominator,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(check: TriangulationCheck, detail: impl Into<String>) -> Self {
        Error::InvalidTriangulation { check, detail: detail.into() }
    }

    pub(crate) fn syntax(err: &serde_json::Error) -> Self {
        Error::Syntax { line: err.line(), column: err.column(), message: err.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
