use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex id {vertex} out of range (mesh has {count} vertices)")]
    VertexOutOfRange { vertex: u32, count: usize },
    #[error("cell {cell} repeats a vertex")]
    DegenerateCell { cell: usize },
    #[error("non-manifold facet {vertices:?}: {cells} incident cells")]
    NonManifoldFacet { vertices: Vec<u32>, cells: usize },
    #[error("non-manifold edge ({0}, {1}): incident facets do not form a single fan")]
    NonManifoldEdge(u32, u32),
    #[error("non-manifold vertex {0}: its cell star is disconnected")]
    NonManifoldVertex(u32),
    #[error("edge {0} is singular, continuation across it is undefined")]
    SingularEdge(u32),
    #[error("parametrization is not seamless: {0}; run the sanitizer first")]
    NotSeamless(String),
    #[error("malformed singularity: {0}")]
    MalformedSingularity(String),
    #[error("complex integrity violated: {0}")]
    Integrity(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("quantization infeasible: {0}")]
    Infeasible(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
