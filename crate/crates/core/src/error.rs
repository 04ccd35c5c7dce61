use std::path::PathBuf;

/// Everything that can go wrong in the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("face {face} is not a triangle ({corners} corners)")]
    NonTriangular { face: usize, corners: usize },

    #[error("face {face} is degenerate (area {area:e})")]
    DegenerateFace { face: usize, area: f64 },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("not an open surface")]
    NotOpenSurface,

    #[error("not single-edge genus-0: {0}")]
    NotDiskTopology(String),

    #[error("mapped face {face} has zero area")]
    DegenerateMappedFace { face: usize },

    #[error("underdetermined: {samples} samples for {unknowns} unknowns")]
    Underdetermined { samples: usize, unknowns: usize },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("degenerate FDEC: {0}")]
    DegenerateFdec(String),

    #[error("self-intersecting projection at vertex {vertex} (1 + sqrt(s_c) h = {factor:e})")]
    SelfIntersecting { vertex: usize, factor: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    InvalidInput,
    Numeric,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidArgument(_) => ErrorKind::Usage,
            Error::Parse { .. }
            | Error::NonTriangular { .. }
            | Error::DegenerateFace { .. }
            | Error::InvalidMesh(_)
            | Error::NotOpenSurface
            | Error::NotDiskTopology(_)
            | Error::Io(_)
            | Error::Json(_) => ErrorKind::InvalidInput,
            _ => ErrorKind::Numeric,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
