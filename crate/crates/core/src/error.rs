use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A mesh failed one of the closed-surface invariants.
    #[error("invalid mesh: {invariant}: {detail}")]
    InvalidMesh {
        invariant: MeshInvariant,
        detail: String,
    },

    #[error("failed to parse {path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// The linear algebra could not produce a trustworthy answer.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub(crate) fn mesh(invariant: MeshInvariant, detail: impl Into<String>) -> Self {
        Error::InvalidMesh {
            invariant,
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// The closed-surface invariant a rejected mesh violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshInvariant {
    Empty,
    VertexIndex,
    DegenerateFace,
    Watertight,
    Orientation,
    OutwardNormals,
}

impl std::fmt::Display for MeshInvariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MeshInvariant::Empty => "empty mesh",
            MeshInvariant::VertexIndex => "vertex index out of range",
            MeshInvariant::DegenerateFace => "degenerate face",
            MeshInvariant::Watertight => "not watertight",
            MeshInvariant::Orientation => "inconsistent orientation",
            MeshInvariant::OutwardNormals => "inward-facing normals",
        };
        f.write_str(s)
    }
}
