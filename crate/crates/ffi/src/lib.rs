//! C ABI over `cervipre`.
//!
//! Images and masks cross the boundary as opaque handles owned by the
//! caller and released with `cp_image_free` / `cp_mask_free`. Every
//! fallible call returns a [`CpStatus`]; on anything other than
//! `CP_STATUS_OK` a description is available from `cp_last_error_message`
//! on the same thread. Output pointers are written only on success; the
//! report from `cp_process_image` is the one exception.
//!
//! Pixel buffers are row-major, 3 bytes per pixel (R, G, B). Mask buffers
//! are row-major, one byte per pixel, nonzero meaning set.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use cervipre::imagecore::{io, Connectivity};
use cervipre::inpaint::{radial_fundamental_solution, remove_specular, HarmonicSolverConfig};
use cervipre::pipeline::synth::{generate_synthetic, SyntheticSpec};
use cervipre::pipeline::{process_image_reported, PipelineConfig};
use cervipre::roi::{detection_metrics, validate_slack, DetectionClass};
use cervipre::specular::{build_inpaint_mask, detect_specular, SpecularConfig};
use cervipre::{BinaryMask, Error, ImageRgb8};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// Bad dimensions, buffer length, path encoding or value range.
    InvalidArgument = 2,
    /// A configuration or synthetic spec field is out of range.
    InvalidConfig = 3,
    /// The glare mask leaves no unmasked pixel to fill from.
    NoDirichletData = 4,
    /// Fewer pixels than clusters.
    InsufficientData = 5,
    /// The chosen cluster has no pixels.
    EmptyRoi = 6,
    /// The ground-truth mask is empty.
    EmptyGroundTruth = 7,
    /// A numeric argument is outside the function's domain.
    Domain = 8,
    /// Reading, decoding or writing a file failed.
    Io = 9,
    /// The library panicked; this is a bug.
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpDetectionClass {
    Correct = 0,
    More = 1,
    Less = 2,
}

/// Harmonic solver settings.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpSolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub relaxation_factor: f64,
}

/// Full pipeline settings. Start from `cp_pipeline_config_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpPipelineConfig {
    pub white_threshold: f64,
    pub se_radius: u32,
    pub solver: CpSolverConfig,
    pub k: usize,
    pub seed: u64,
    /// 4 or 8.
    pub connectivity: u32,
}

/// Opaque RGB image.
pub struct CpImage(ImageRgb8);

/// Opaque binary mask.
pub struct CpMask(BinaryMask);

struct Failure {
    status: CpStatus,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.root() {
            Error::InvalidDimensions { .. }
            | Error::PixelCountMismatch { .. }
            | Error::DimensionMismatch { .. }
            | Error::ValueOutOfRange { .. }
            | Error::BoxOutOfBounds { .. } => CpStatus::InvalidArgument,
            Error::InvalidConfig(_) | Error::InvalidSpec(_) => CpStatus::InvalidConfig,
            Error::NoDirichletData { .. } => CpStatus::NoDirichletData,
            Error::InsufficientData { .. } => CpStatus::InsufficientData,
            Error::EmptyRoi { .. } => CpStatus::EmptyRoi,
            Error::EmptyGroundTruth => CpStatus::EmptyGroundTruth,
            Error::Domain(_) => CpStatus::Domain,
            Error::Image { .. } | Error::Io { .. } | Error::Json { .. } => CpStatus::Io,
            Error::Stage { .. } => unreachable!("root() strips stage wrappers"),
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

fn fail(status: CpStatus, message: impl Into<String>) -> Failure {
    Failure {
        status,
        message: message.into(),
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Run `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CpStatus::Ok
        }
        Ok(Err(failure)) => {
            set_last_error(&failure.message);
            failure.status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal panic: {what}"));
            CpStatus::Panic
        }
    }
}

unsafe fn non_null<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(CpStatus::NullPointer, format!("{name} is NULL")))
}

fn check_out<T>(p: *mut T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(fail(CpStatus::NullPointer, format!("{name} is NULL")))
    } else {
        Ok(())
    }
}

unsafe fn bytes<'a>(data: *const u8, len: usize, name: &str) -> Result<&'a [u8], Failure> {
    if data.is_null() {
        return Err(fail(CpStatus::NullPointer, format!("{name} is NULL")));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn utf8<'a>(s: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(fail(CpStatus::NullPointer, format!("{name} is NULL")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(CpStatus::InvalidArgument, format!("{name} is not valid UTF-8")))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

unsafe fn write_opt<T>(out: *mut *mut T, v: T) {
    if !out.is_null() {
        *out = boxed(v);
    }
}

impl From<CpSolverConfig> for HarmonicSolverConfig {
    fn from(c: CpSolverConfig) -> Self {
        HarmonicSolverConfig {
            tolerance: c.tolerance,
            max_iterations: c.max_iterations,
            relaxation_factor: c.relaxation_factor,
        }
    }
}

impl From<HarmonicSolverConfig> for CpSolverConfig {
    fn from(c: HarmonicSolverConfig) -> Self {
        CpSolverConfig {
            tolerance: c.tolerance,
            max_iterations: c.max_iterations,
            relaxation_factor: c.relaxation_factor,
        }
    }
}

impl CpPipelineConfig {
    fn to_config(self) -> Result<PipelineConfig, Failure> {
        let connectivity = Connectivity::from_count(self.connectivity).ok_or_else(|| {
            fail(
                CpStatus::InvalidConfig,
                format!("connectivity must be 4 or 8, got {}", self.connectivity),
            )
        })?;
        let cfg = PipelineConfig {
            specular: SpecularConfig {
                white_threshold: self.white_threshold,
                se_radius: self.se_radius,
            },
            solver: self.solver.into(),
            k: self.k,
            seed: self.seed,
            connectivity,
            ..PipelineConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL if the most
/// recent status-returning call succeeded. The pointer stays valid until
/// the next status-returning call on this thread.
#[no_mangle]
pub extern "C" fn cp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn cp_solver_config_default() -> CpSolverConfig {
    HarmonicSolverConfig::default().into()
}

#[no_mangle]
pub extern "C" fn cp_pipeline_config_default() -> CpPipelineConfig {
    let d = PipelineConfig::default();
    CpPipelineConfig {
        white_threshold: d.specular.white_threshold,
        se_radius: d.specular.se_radius,
        solver: d.solver.into(),
        k: d.k,
        seed: d.seed,
        connectivity: d.connectivity.count(),
    }
}

/// Copy `len = width * height * 3` bytes of RGB data into a new image.
///
/// # Safety
/// `rgb` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cp_image_new(
    width: u32,
    height: u32,
    rgb: *const u8,
    len: usize,
    out: *mut *mut CpImage,
) -> CpStatus {
    guard(|| {
        check_out(out, "out")?;
        let img = ImageRgb8::from_raw(width, height, bytes(rgb, len, "rgb")?)?;
        *out = boxed(CpImage(img));
        Ok(())
    })
}

/// Decode a PNG or JPEG file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cp_image_load(path: *const c_char, out: *mut *mut CpImage) -> CpStatus {
    guard(|| {
        check_out(out, "out")?;
        let img = io::load_rgb(Path::new(utf8(path, "path")?))?;
        *out = boxed(CpImage(img));
        Ok(())
    })
}

/// # Safety
/// `img` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cp_image_save_png(img: *const CpImage, path: *const c_char) -> CpStatus {
    guard(|| {
        let img = non_null(img, "img")?;
        io::save_png(&img.0, Path::new(utf8(path, "path")?))?;
        Ok(())
    })
}

/// Width in pixels, or 0 for NULL.
///
/// # Safety
/// `img` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_image_width(img: *const CpImage) -> u32 {
    img.as_ref().map_or(0, |i| i.0.width())
}

/// Height in pixels, or 0 for NULL.
///
/// # Safety
/// `img` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_image_height(img: *const CpImage) -> u32 {
    img.as_ref().map_or(0, |i| i.0.height())
}

/// Copy the pixels out; `len` must equal `width * height * 3`.
///
/// # Safety
/// `img` must be a live handle; `buf` must have `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cp_image_copy_pixels(img: *const CpImage, buf: *mut u8, len: usize) -> CpStatus {
    guard(|| {
        let img = non_null(img, "img")?;
        check_out(buf, "buf")?;
        let raw = img.0.to_raw();
        if raw.len() != len {
            return Err(fail(
                CpStatus::InvalidArgument,
                format!("buffer holds {len} bytes, image needs {}", raw.len()),
            ));
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(&raw);
        Ok(())
    })
}

/// # Safety
/// `img` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cp_image_free(img: *mut CpImage) {
    if !img.is_null() {
        drop(Box::from_raw(img));
    }
}

/// Build a mask from `len = width * height` bytes; nonzero means set.
///
/// # Safety
/// `bits` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cp_mask_new(
    width: u32,
    height: u32,
    bits: *const u8,
    len: usize,
    out: *mut *mut CpMask,
) -> CpStatus {
    guard(|| {
        check_out(out, "out")?;
        let bits = bytes(bits, len, "bits")?.iter().map(|&b| b != 0).collect();
        *out = boxed(CpMask(BinaryMask::new(width, height, bits)?));
        Ok(())
    })
}

/// # Safety
/// `mask` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_mask_width(mask: *const CpMask) -> u32 {
    mask.as_ref().map_or(0, |m| m.0.width())
}

/// # Safety
/// `mask` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_mask_height(mask: *const CpMask) -> u32 {
    mask.as_ref().map_or(0, |m| m.0.height())
}

/// Number of set pixels, or 0 for NULL.
///
/// # Safety
/// `mask` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_mask_count(mask: *const CpMask) -> usize {
    mask.as_ref().map_or(0, |m| m.0.count())
}

/// Copy the mask out as 0/1 bytes; `len` must equal `width * height`.
///
/// # Safety
/// `mask` must be a live handle; `buf` must have `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cp_mask_copy_bits(mask: *const CpMask, buf: *mut u8, len: usize) -> CpStatus {
    guard(|| {
        let mask = non_null(mask, "mask")?;
        check_out(buf, "buf")?;
        let bits = mask.0.bits();
        if bits.len() != len {
            return Err(fail(
                CpStatus::InvalidArgument,
                format!("buffer holds {len} bytes, mask needs {}", bits.len()),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(buf, len);
        for (d, &b) in dst.iter_mut().zip(bits) {
            *d = b as u8;
        }
        Ok(())
    })
}

/// # Safety
/// `mask` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cp_mask_free(mask: *mut CpMask) {
    if !mask.is_null() {
        drop(Box::from_raw(mask));
    }
}

/// Pixels whose R, G and B all reach `threshold` (in `(0, 1]`).
///
/// # Safety
/// `img` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cp_detect_specular(img: *const CpImage, threshold: f64, out: *mut *mut CpMask) -> CpStatus {
    guard(|| {
        let img = non_null(img, "img")?;
        check_out(out, "out")?;
        let cfg = SpecularConfig {
            white_threshold: threshold,
            ..SpecularConfig::default()
        };
        cfg.validate()?;
        *out = boxed(CpMask(detect_specular(&img.0, &cfg)));
        Ok(())
    })
}

/// Dilate a glare mask by a disk of `radius`.
///
/// # Safety
/// `mask` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cp_build_inpaint_mask(mask: *const CpMask, radius: u32, out: *mut *mut CpMask) -> CpStatus {
    guard(|| {
        let mask = non_null(mask, "mask")?;
        check_out(out, "out")?;
        let cfg = SpecularConfig {
            se_radius: radius,
            ..SpecularConfig::default()
        };
        *out = boxed(CpMask(build_inpaint_mask(&mask.0, &cfg)));
        Ok(())
    })
}

/// Harmonic fill of each channel over `mask`. `cfg` may be NULL for defaults.
///
/// # Safety
/// `img` and `mask` must be live handles; `cfg` NULL or readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cp_remove_specular(
    img: *const CpImage,
    mask: *const CpMask,
    cfg: *const CpSolverConfig,
    out: *mut *mut CpImage,
) -> CpStatus {
    guard(|| {
        let img = non_null(img, "img")?;
        let mask = non_null(mask, "mask")?;
        check_out(out, "out")?;
        let cfg = cfg.as_ref().map_or_else(HarmonicSolverConfig::default, |c| (*c).into());
        *out = boxed(CpImage(remove_specular(&img.0, &mask.0, &cfg)?));
        Ok(())
    })
}

/// Run the whole pipeline. `cfg` may be NULL for defaults. Each output
/// pointer may be NULL to skip that output. `report_json_out`, when given,
/// receives the JSON report even if processing fails; release it with
/// `cp_string_free`.
///
/// # Safety
/// `img` must be a live handle; `cfg` NULL or readable; outputs NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cp_process_image(
    img: *const CpImage,
    cfg: *const CpPipelineConfig,
    inpainted_out: *mut *mut CpImage,
    roi_crop_out: *mut *mut CpImage,
    roi_mask_out: *mut *mut CpMask,
    report_json_out: *mut *mut c_char,
) -> CpStatus {
    guard(|| {
        let img = non_null(img, "img")?;
        let cfg = match cfg.as_ref() {
            Some(c) => c.to_config()?,
            None => PipelineConfig::default(),
        };
        let (report, result) = process_image_reported(&img.0, "", &cfg);
        if !report_json_out.is_null() {
            let json = CString::new(report.to_json()).expect("JSON has no NUL bytes");
            *report_json_out = json.into_raw();
        }
        let out = result?;
        write_opt(inpainted_out, CpImage(out.inpainted));
        write_opt(roi_crop_out, CpImage(out.roi_crop));
        write_opt(roi_mask_out, CpMask(out.roi.roi_mask));
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Generate a synthetic cervigram. `spec_json` is a JSON object overriding
/// any subset of the generator settings, or NULL for all defaults. Each
/// output pointer may be NULL to skip that output.
///
/// # Safety
/// `spec_json` must be NULL or NUL-terminated; outputs NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cp_generate_synthetic(
    seed: u64,
    spec_json: *const c_char,
    image_out: *mut *mut CpImage,
    glare_truth_out: *mut *mut CpMask,
    roi_truth_out: *mut *mut CpMask,
) -> CpStatus {
    guard(|| {
        let spec: SyntheticSpec = if spec_json.is_null() {
            SyntheticSpec::default()
        } else {
            serde_json::from_str(utf8(spec_json, "spec_json")?)
                .map_err(|e| fail(CpStatus::InvalidConfig, format!("spec_json: {e}")))?
        };
        let sample = generate_synthetic(seed, &spec)?;
        write_opt(image_out, CpImage(sample.image));
        write_opt(glare_truth_out, CpMask(sample.glare_truth));
        write_opt(roi_truth_out, CpMask(sample.roi_truth));
        Ok(())
    })
}

/// Grade a predicted ROI against ground truth. `jaccard_out` and
/// `area_ratio_out` may be NULL.
///
/// # Safety
/// `pred` and `truth` must be live handles; `class_out` writable; the
/// other outputs NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cp_classify_detection(
    pred: *const CpMask,
    truth: *const CpMask,
    slack: f64,
    class_out: *mut CpDetectionClass,
    jaccard_out: *mut f64,
    area_ratio_out: *mut f64,
) -> CpStatus {
    guard(|| {
        let pred = non_null(pred, "pred")?;
        let truth = non_null(truth, "truth")?;
        check_out(class_out, "class_out")?;
        validate_slack(slack)?;
        let m = detection_metrics(&pred.0, &truth.0)?;
        *class_out = match m.classify(slack) {
            DetectionClass::Correct => CpDetectionClass::Correct,
            DetectionClass::More => CpDetectionClass::More,
            DetectionClass::Less => CpDetectionClass::Less,
        };
        if !jaccard_out.is_null() {
            *jaccard_out = m.jaccard;
        }
        if !area_ratio_out.is_null() {
            *area_ratio_out = m.area_ratio;
        }
        Ok(())
    })
}

/// Radially symmetric harmonic function of `r > 0` in dimension `n >= 2`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cp_radial_fundamental_solution(r: f64, n: u32, c1: f64, c2: f64, out: *mut f64) -> CpStatus {
    guard(|| {
        check_out(out, "out")?;
        *out = radial_fundamental_solution(r, n, c1, c2)?;
        Ok(())
    })
}
