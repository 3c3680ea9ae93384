use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

/// Pipeline stage names, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    DetectSpecular,
    BuildInpaintMask,
    RemoveSpecular,
    RgbToLab,
    ExtractFeatures,
    Kmeans,
    SelectCervixCluster,
    ExtractRoi,
    Crop,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::DetectSpecular,
        Stage::BuildInpaintMask,
        Stage::RemoveSpecular,
        Stage::RgbToLab,
        Stage::ExtractFeatures,
        Stage::Kmeans,
        Stage::SelectCervixCluster,
        Stage::ExtractRoi,
        Stage::Crop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::DetectSpecular => "detect_specular",
            Stage::BuildInpaintMask => "build_inpaint_mask",
            Stage::RemoveSpecular => "remove_specular",
            Stage::RgbToLab => "rgb_to_lab",
            Stage::ExtractFeatures => "extract_features",
            Stage::Kmeans => "kmeans",
            Stage::SelectCervixCluster => "select_cervix_cluster",
            Stage::ExtractRoi => "extract_roi",
            Stage::Crop => "crop",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dimensions {width}x{height}: both must be at least 1")]
    InvalidDimensions { width: u32, height: u32 },

    #[error("expected {expected} pixels for the given dimensions, got {actual}")]
    PixelCountMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },

    #[error("value {value} at index {index} is outside [0, 1] or not finite")]
    ValueOutOfRange { index: usize, value: f64 },

    #[error("bounding box ({x0},{y0})-({x1},{y1}) lies outside a {width}x{height} image")]
    BoxOutOfBounds {
        x0: u32,
        y0: u32,
        x1: u32,
        y1: u32,
        width: u32,
        height: u32,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("masked region containing pixel ({x},{y}) has no boundary pixels to take values from")]
    NoDirichletData { x: u32, y: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("need at least {k} feature vectors for k={k}, got {available}")]
    InsufficientData { k: usize, available: usize },

    #[error("cluster {cluster} has no member pixels")]
    EmptyRoi { cluster: usize },

    #[error("ground-truth mask is empty")]
    EmptyGroundTruth,

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn in_stage(self, stage: Stage) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, looking through stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
