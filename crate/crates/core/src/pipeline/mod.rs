//! End-to-end processing: glare removal followed by ROI segmentation, plus
//! batch I/O, synthetic data and evaluation.

pub mod batch;
pub mod eval;
mod report;
pub mod synth;

pub use report::{CervigramReport, StageTiming, REPORT_VERSION};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Stage};
use crate::imagecore::{connected_components, crop, rgb_to_lab, BinaryMask, Connectivity, ImageRgb8};
use crate::inpaint::{remove_specular_detailed, HarmonicSolverConfig};
use crate::roi::{
    extract_features, extract_roi_with, segment, select_cervix_cluster, validate_slack, RoiReport, DEFAULT_SLACK,
};
use crate::specular::{build_inpaint_mask, detect_specular, SpecularConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub specular: SpecularConfig,
    pub solver: HarmonicSolverConfig,
    pub k: usize,
    pub seed: u64,
    pub connectivity: Connectivity,
    pub eval_slack: f64,
    pub record_timings: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            specular: SpecularConfig::default(),
            solver: HarmonicSolverConfig::default(),
            k: 2,
            seed: 42,
            connectivity: Connectivity::Eight,
            eval_slack: DEFAULT_SLACK,
            record_timings: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.specular.validate()?;
        self.solver.validate()?;
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        validate_slack(self.eval_slack)
    }
}

/// Everything one image produces.
#[derive(Debug, Clone)]
pub struct ProcessOutput {
    pub inpainted: ImageRgb8,
    pub roi_crop: ImageRgb8,
    /// Dilated glare mask that was inpainted.
    pub glare_mask: BinaryMask,
    pub roi: RoiReport,
    pub report: CervigramReport,
}

struct StageClock<'a> {
    report: &'a mut CervigramReport,
    timings: Option<Vec<StageTiming>>,
}

impl StageClock<'_> {
    fn run<T>(&mut self, stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        self.report.stages.push(stage);
        let out = f().map_err(|e| e.in_stage(stage));
        if let Some(t) = self.timings.as_mut() {
            t.push(StageTiming {
                stage,
                millis: start.elapsed().as_secs_f64() * 1e3,
            });
        }
        out
    }
}

/// Run every stage on one image.
pub fn process_image(img: &ImageRgb8, cfg: &PipelineConfig) -> Result<ProcessOutput> {
    let (report, out) = process_image_reported(img, "", cfg);
    let mut out = out?;
    out.report = report;
    Ok(out)
}

/// Like [`process_image`], but always hands back a report, filled as far
/// as the pipeline got, with `error` set on failure.
pub fn process_image_reported(
    img: &ImageRgb8,
    input_path: &str,
    cfg: &PipelineConfig,
) -> (CervigramReport, Result<ProcessOutput>) {
    let mut report = CervigramReport::new(input_path.to_string(), img.width(), img.height());
    let result = cfg.validate().and_then(|()| {
        let mut clock = StageClock {
            report: &mut report,
            timings: cfg.record_timings.then(Vec::new),
        };
        let out = run_stages(img, cfg, &mut clock);
        let timings = clock.timings.take();
        report.timings = timings;
        out
    });
    match result {
        Ok(mut out) => {
            report.roi = Some(out.roi.summary());
            out.report = report.clone();
            (report, Ok(out))
        }
        Err(e) => {
            report.error = Some(e.to_string());
            (report, Err(e))
        }
    }
}

fn run_stages(img: &ImageRgb8, cfg: &PipelineConfig, clock: &mut StageClock<'_>) -> Result<ProcessOutput> {
    let (w, h) = img.dimensions();

    let raw = clock.run(Stage::DetectSpecular, || Ok(detect_specular(img, &cfg.specular)))?;
    clock.report.raw_specular_pixel_count = raw.count();

    let glare_mask = clock.run(Stage::BuildInpaintMask, || Ok(build_inpaint_mask(&raw, &cfg.specular)))?;
    clock.report.specular_pixel_count = glare_mask.count();
    clock.report.specular_component_count = connected_components(&glare_mask, cfg.connectivity).len();

    let removal = clock.run(Stage::RemoveSpecular, || {
        remove_specular_detailed(img, &glare_mask, &cfg.solver)
    })?;
    clock.report.solver_iterations = removal.max_iterations();
    clock.report.solver_converged = removal.converged();
    if !removal.converged() {
        log::warn!("harmonic fill stopped at the iteration cap before reaching tolerance");
    }
    let inpainted = removal.image;

    let lab = clock.run(Stage::RgbToLab, || Ok(rgb_to_lab(&inpainted)))?;
    let features = clock.run(Stage::ExtractFeatures, || Ok(extract_features(&lab)))?;
    let model = clock.run(Stage::Kmeans, || segment(&features, w, h, cfg.k, cfg.seed))?;
    clock.report.cluster_iterations = model.iterations;

    let chosen = clock.run(Stage::SelectCervixCluster, || Ok(select_cervix_cluster(&model, w, h)))?;
    let roi = clock.run(Stage::ExtractRoi, || {
        extract_roi_with(&model, chosen, w, h, cfg.connectivity)
    })?;
    let roi_crop = clock.run(Stage::Crop, || crop(&inpainted, &roi.bbox))?;

    Ok(ProcessOutput {
        inpainted,
        roi_crop,
        glare_mask,
        roi,
        report: CervigramReport::new(String::new(), w, h),
    })
}
