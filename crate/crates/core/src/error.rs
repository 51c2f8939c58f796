use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    // graph construction / validation
    #[error("graph is not bipartite: {0}")]
    NotBipartite(String),
    #[error("graph is not connected")]
    NotConnected,
    #[error("rotation system inconsistent with edge list: {0}")]
    BadRotation(String),
    #[error("embedding fails Euler check: V={v} E={e} F={f} (V-E+F must be 2)")]
    NonPlanarEmbedding { v: usize, e: usize, f: usize },
    #[error("grid needs an even number of vertices, got {0}")]
    OddVertexCount(usize),
    #[error("torus grid side must be even, got {0}")]
    OddTorusSide(usize),
    #[error("operation requires a planar-embedded graph but this one is on the torus")]
    TorusGraph,
    #[error("parse error: {0}")]
    Parse(String),

    // linear algebra
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("Laurent degree bound exceeded: need {need}, bound {bound}")]
    DegreeBoundExceeded { need: i64, bound: i64 },
    #[error("interpolation system is ill conditioned")]
    IllConditioned,

    // dimer statistics
    #[error("graph admits no perfect matching")]
    NoPerfectMatching,
    #[error("edges share a vertex: {0}")]
    SharedVertex(String),
    #[error("positive edge weights required: edge {0} has a non-positive weight")]
    NonPositiveWeight(usize),
    #[error("enumeration cap exceeded: {0}")]
    TooLarge(String),
    #[error("web is not trivalent: {0}")]
    NotTrivalent(String),

    // psi map
    #[error("graph is degenerate (dim of matching polytope < cycle dimension)")]
    DegenerateGraph,
    #[error("target lies outside the open matching polytope: {0}")]
    TargetOutsidePolytope(String),
    #[error("Newton iteration did not converge within {0} iterations")]
    MaxIterations(usize),

    // Z^2 kernel
    #[error("lattice displacement ({x},{y}) must have odd coordinate sum")]
    BadParity { x: i64, y: i64 },
    #[error("loop densities implemented for areas 1..=3, got {0}")]
    UnsupportedArea(usize),

    // multiwebs
    #[error("face {0} cannot act as a hole")]
    BadHoleFace(usize),
    #[error("multiplicity function is not an n-multiweb: {0}")]
    WrongOrder(String),
    #[error("no SL2 pair realizes traces (x,y,z)=({x},{y},{z})")]
    UnrealizableTrace { x: String, y: String, z: String },
    #[error("skein reduction exceeded the step cap of {0}")]
    NonTermination(usize),

    // dimer walks
    #[error("generated permutation group exceeds cap of {0}")]
    GroupTooLarge(usize),
    #[error("label map does not induce a well-defined quotient permutation: {0}")]
    BadQuotient(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
