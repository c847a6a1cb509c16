use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}: PNG decode failed: {message}")]
    PngDecode { path: PathBuf, message: String },

    #[error("{path}: PNG encode failed: {message}")]
    PngEncode { path: PathBuf, message: String },

    #[error("{path}: unsupported bit depth {depth} (only 8-bit samples are supported)")]
    UnsupportedBitDepth { path: PathBuf, depth: u8 },

    #[error("{path}: unsupported color type {color_type}")]
    UnsupportedColorType { path: PathBuf, color_type: String },

    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("expected {expected} channel(s), got {found}")]
    ChannelMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: u32,
        left_height: u32,
        right_width: u32,
        right_height: u32,
    },

    #[error("label {label} at ({x}, {y}) is out of range for {classes} classes")]
    LabelOutOfRange {
        x: u32,
        y: u32,
        label: u32,
        classes: usize,
    },

    #[error(
        "pixel ({x}, {y}) color {color:?} has no palette entry within tolerance {tolerance} \
         (nearest is {distance} away)"
    )]
    NoPaletteMatch {
        x: u32,
        y: u32,
        color: [u8; 3],
        distance: u8,
        tolerance: u8,
    },

    #[error("invalid palette: {0}")]
    InvalidPalette(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("class count mismatch: {0} vs {1}")]
    ClassCountMismatch(usize, usize),

    #[error("no evaluable pixels")]
    NoEvaluablePixels,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
