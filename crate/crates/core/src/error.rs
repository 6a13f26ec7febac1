use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// The aliasing-reduction window would keep no kernel samples.
    #[error("degenerate propagation plan: band-limit half-width is {kx} x {ky} samples")]
    DegeneratePlan { kx: usize, ky: usize },

    #[error("plan mismatch: {0}")]
    PlanMismatch(String),

    #[error("direct DFT oracle refuses a {rows}x{cols} grid (limit {limit} per axis)")]
    OracleTooLarge {
        rows: usize,
        cols: usize,
        limit: usize,
    },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("image {rows}x{cols} is smaller than the {window}x{window} SSIM window")]
    ImageTooSmall {
        rows: usize,
        cols: usize,
        window: usize,
    },

    #[error("invalid SSIM parameters: {0}")]
    InvalidParams(String),

    #[error("bad magic {0:?}, expected \"CFLD\"")]
    BadMagic([u8; 4]),

    #[error("unsupported CFLD version {0}")]
    UnsupportedVersion(u32),

    #[error("truncated payload: expected {expected} bytes, found {actual}")]
    TruncatedPayload { expected: usize, actual: usize },

    #[error("missing hologram sidecar {0}")]
    MissingSidecar(PathBuf),

    #[error("malformed sidecar: {0}")]
    BadSidecar(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed golden manifest: {0}")]
    BadManifest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the file system rather than by the data or geometry.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io(_) | Error::MissingSidecar(_) | Error::UnsupportedFormat(_)
        )
    }
}
