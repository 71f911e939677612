//! Mesh files and the JSON run report.

pub mod obj;
pub mod report;
pub mod stl;

use std::path::Path;

use thiserror::Error;

use crate::mesh::{validate_manifold, MeshError, SolidMesh};
use crate::geom::Vec3;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{position}: {message}")]
    Parse {
        path: String,
        /// `line N` for text formats, `byte N` for binary ones.
        position: String,
        message: String,
    },
    #[error("{path}: {source}")]
    Invalid {
        path: String,
        #[source]
        source: MeshError,
    },
    #[error("{path}: unrecognized mesh format (expected .obj or .stl)")]
    UnknownFormat { path: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Obj,
    Stl,
    Auto,
}

/// Raw vertex/triangle lists as read from a file, before validation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Soup {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

pub(crate) fn io_error(path: &Path, source: std::io::Error) -> IoError {
    IoError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Reads and validates a mesh. `Auto` picks the format from the extension.
pub fn read_mesh(path: &Path, format: Format) -> Result<SolidMesh, IoError> {
    let format = match format {
        Format::Auto => match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("obj") => Format::Obj,
            Some("stl") => Format::Stl,
            _ => {
                return Err(IoError::UnknownFormat {
                    path: path.display().to_string(),
                })
            }
        },
        f => f,
    };
    let bytes = std::fs::read(path).map_err(|e| io_error(path, e))?;
    let soup = match format {
        Format::Obj => obj::parse_obj(&String::from_utf8_lossy(&bytes)),
        _ => stl::parse_stl(&bytes),
    }
    .map_err(|(position, message)| IoError::Parse {
        path: path.display().to_string(),
        position,
        message,
    })?;
    validate_manifold(&soup.vertices, &soup.triangles).map_err(|source| IoError::Invalid {
        path: path.display().to_string(),
        source,
    })
}
