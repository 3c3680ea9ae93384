use serde::Serialize;

use crate::error::Stage;
use crate::roi::{DetectionClass, RoiSummary};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: Stage,
    pub millis: f64,
}

/// Per-image JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CervigramReport {
    pub version: u32,
    pub input_path: String,
    pub width: u32,
    pub height: u32,
    /// Raw white pixels before dilation.
    pub raw_specular_pixel_count: usize,
    /// Pixels in the dilated inpainting mask.
    pub specular_pixel_count: usize,
    pub specular_component_count: usize,
    /// Largest SOR sweep count over the three channels.
    pub solver_iterations: usize,
    pub solver_converged: bool,
    pub cluster_iterations: usize,
    pub roi: Option<RoiSummary>,
    pub detection: Option<DetectionClass>,
    /// Stages that ran, in order.
    pub stages: Vec<Stage>,
    pub error: Option<String>,
    /// Wall-clock per stage; only filled when timing is requested since it
    /// makes reports non-reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<StageTiming>>,
}

impl CervigramReport {
    pub(crate) fn new(input_path: String, width: u32, height: u32) -> Self {
        Self {
            version: REPORT_VERSION,
            input_path,
            width,
            height,
            raw_specular_pixel_count: 0,
            specular_pixel_count: 0,
            specular_component_count: 0,
            solver_iterations: 0,
            solver_converged: true,
            cluster_iterations: 0,
            roi: None,
            detection: None,
            stages: Vec::new(),
            error: None,
            timings: None,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }
}
