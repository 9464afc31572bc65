use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no sources")]
    NoSources,

    #[error("vanished region {0}")]
    VanishedRegion(u32),

    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("invalid label map: {0}")]
    InvalidLabels(String),

    #[error("region {region} has {pixels} pixels, need at least {needed} for the mixture fit")]
    RegionTooSmall {
        region: u32,
        pixels: usize,
        needed: usize,
    },

    #[error("Bhattacharyya model is two-phase only")]
    TwoPhaseOnly,

    #[error("front under-covers ground truth")]
    UnderCoverage,

    #[error("overlapping shapes: {0} and {1}")]
    OverlappingShapes(usize, usize),

    #[error("requested {requested} samples from a region of {available} pixels")]
    NotEnoughPixels { requested: usize, available: usize },

    #[error("eroded ground truth is empty")]
    EmptyErodedMask,
}
