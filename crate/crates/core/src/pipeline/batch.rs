//! File-level batch processing and the artifacts written per image.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{process_image_reported, CervigramReport, PipelineConfig};
use crate::error::{Error, Result};
use crate::imagecore::io;

/// Caps batch parallelism when set to a positive integer.
pub const THREADS_ENV: &str = "CERVIPRE_THREADS";

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

pub fn thread_cap_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Expand directories into their PNG/JPEG files (sorted); keep files as given.
pub fn collect_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let rd = std::fs::read_dir(p).map_err(|source| Error::Io {
                path: p.clone(),
                source,
            })?;
            let mut files: Vec<PathBuf> = rd
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && is_image(f))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Output file names for one input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactPaths {
    pub inpainted: PathBuf,
    pub roi: PathBuf,
    pub roi_mask: PathBuf,
    pub glare_mask: PathBuf,
    pub report: PathBuf,
}

impl ArtifactPaths {
    pub fn new(out_dir: &Path, input: &Path) -> Self {
        let stem = input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "image".into());
        let at = |suffix: &str| out_dir.join(format!("{stem}.{suffix}"));
        Self {
            inpainted: at("inpainted.png"),
            roi: at("roi.png"),
            roi_mask: at("roimask.png"),
            glare_mask: at("glaremask.png"),
            report: at("report.json"),
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Process one file and write its artifacts. Always writes the report, even
/// when the image fails; the returned report says what happened.
pub fn process_file(input: &Path, out_dir: &Path, cfg: &PipelineConfig) -> CervigramReport {
    let paths = ArtifactPaths::new(out_dir, input);
    let name = input.display().to_string();
    let (mut report, result) = match io::load_rgb(input) {
        Ok(img) => {
            let (report, out) = process_image_reported(&img, &name, cfg);
            (report, out.map(Some))
        }
        Err(e) => {
            let mut report = CervigramReport::new(name, 0, 0);
            report.error = Some(e.to_string());
            (report, Ok(None))
        }
    };
    if let Ok(Some(out)) = result {
        let written = io::save_png(&out.inpainted, &paths.inpainted)
            .and_then(|()| io::save_png(&out.roi_crop, &paths.roi))
            .and_then(|()| io::save_mask_png(&out.roi.roi_mask, &paths.roi_mask))
            .and_then(|()| io::save_mask_png(&out.glare_mask, &paths.glare_mask));
        if let Err(e) = written {
            report.error = Some(e.to_string());
        }
    }
    if let Err(e) = write_text(&paths.report, &report.to_json()) {
        log::error!("{e}");
        if report.error.is_none() {
            report.error = Some(e.to_string());
        }
    }
    report
}

/// Process files in parallel; reports come back in input order.
pub fn process_batch(
    inputs: &[PathBuf],
    out_dir: &Path,
    cfg: &PipelineConfig,
    threads: Option<usize>,
) -> Result<Vec<CervigramReport>> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let run = || inputs.par_iter().map(|p| process_file(p, out_dir, cfg)).collect();
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}
