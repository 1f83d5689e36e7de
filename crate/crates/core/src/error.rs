//! Error type shared by the whole crate.

use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operating-system level I/O failure (missing file, permissions, short write).
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A header or JSON document did not parse or failed schema checks.
    #[error("malformed {what} in {path}: {detail}")]
    Malformed {
        what: &'static str,
        path: PathBuf,
        detail: String,
    },

    /// Raw payload length disagrees with the header; signals corrupt data.
    #[error("{path}: raw payload is {actual} bytes, header implies {expected}")]
    SizeMismatch {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    /// A volume declared binary contains a value other than 0 or 1.
    #[error("binary volume contains value {value} at flat index {index}")]
    NonBinaryVoxel { index: usize, value: u8 },

    /// A float volume contains a NaN or infinity.
    #[error("float volume contains non-finite value at flat index {index}")]
    NonFiniteVoxel { index: usize },

    /// An operation that requires a probability map saw a value outside [0, 1].
    #[error("value {value} at flat index {index} is outside [0, 1]")]
    NotProbability { index: usize, value: f32 },

    /// Standardize was asked to rescale a constant volume.
    #[error("volume has zero variance; cannot standardize a degenerate image")]
    ZeroVariance,

    /// Two volumes that must share a grid do not.
    #[error("volume dimensions differ: {a:?} vs {b:?}")]
    DimsMismatch { a: [usize; 3], b: [usize; 3] },

    /// Generic structural validation failure (bad dims, bad spacing, graph
    /// invariant violations, bad configuration values).
    #[error("{0}")]
    Invalid(String),

    /// A skeleton edge references a node index that does not exist.
    #[error("edge ({a}, {b}) references a node outside 0..{nodes}")]
    DanglingEdge { a: u32, b: u32, nodes: usize },

    /// A skeleton edge connects a node to itself.
    #[error("self-edge on node {0}")]
    SelfEdge(u32),

    /// Matching or scoring was handed an empty point cloud.
    #[error("{side} feature has no nodes")]
    EmptyFeature { side: &'static str },

    /// All four match counts are zero; no score is defined.
    #[error("all match counts are zero")]
    ZeroCounts,

    /// Requested phantom geometry cannot be placed on the grid.
    #[error("phantom geometry does not fit: {0}")]
    GeometryDoesNotFit(String),

    /// A corruption op cannot be applied to this phantom.
    #[error("corruption impossible: {0}")]
    CorruptionImpossible(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True when the error came from the operating system rather than from
    /// validating content. The CLI maps this to a distinct exit code.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
