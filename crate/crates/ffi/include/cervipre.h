/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef CERVIPRE_H
#define CERVIPRE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum CpStatus {
  CP_STATUS_OK = 0,
  // A required pointer argument was NULL.
  CP_STATUS_NULL_POINTER = 1,
  // Bad dimensions, buffer length, path encoding or value range.
  CP_STATUS_INVALID_ARGUMENT = 2,
  // A configuration or synthetic spec field is out of range.
  CP_STATUS_INVALID_CONFIG = 3,
  // The glare mask leaves no unmasked pixel to fill from.
  CP_STATUS_NO_DIRICHLET_DATA = 4,
  // Fewer pixels than clusters.
  CP_STATUS_INSUFFICIENT_DATA = 5,
  // The chosen cluster has no pixels.
  CP_STATUS_EMPTY_ROI = 6,
  // The ground-truth mask is empty.
  CP_STATUS_EMPTY_GROUND_TRUTH = 7,
  // A numeric argument is outside the function's domain.
  CP_STATUS_DOMAIN = 8,
  // Reading, decoding or writing a file failed.
  CP_STATUS_IO = 9,
  // The library panicked; this is a bug.
  CP_STATUS_PANIC = 10,
} CpStatus;

typedef enum CpDetectionClass {
  CP_DETECTION_CLASS_CORRECT = 0,
  CP_DETECTION_CLASS_MORE = 1,
  CP_DETECTION_CLASS_LESS = 2,
} CpDetectionClass;

// Opaque RGB image.
typedef struct CpImage CpImage;

// Opaque binary mask.
typedef struct CpMask CpMask;

// Harmonic solver settings.
typedef struct CpSolverConfig {
  double tolerance;
  size_t max_iterations;
  double relaxation_factor;
} CpSolverConfig;

// Full pipeline settings. Start from `cp_pipeline_config_default`.
typedef struct CpPipelineConfig {
  double white_threshold;
  uint32_t se_radius;
  struct CpSolverConfig solver;
  size_t k;
  uint64_t seed;
  // 4 or 8.
  uint32_t connectivity;
} CpPipelineConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *cp_version(void);

// Message for the last failed call on this thread, or NULL if the most
// recent status-returning call succeeded. The pointer stays valid until
// the next status-returning call on this thread.
const char *cp_last_error_message(void);

struct CpSolverConfig cp_solver_config_default(void);

struct CpPipelineConfig cp_pipeline_config_default(void);

// Copy `len = width * height * 3` bytes of RGB data into a new image.
//
// # Safety
// `rgb` must point to `len` readable bytes; `out` must be writable.
enum CpStatus cp_image_new(uint32_t width,
                           uint32_t height,
                           const uint8_t *rgb,
                           size_t len,
                           struct CpImage **out);

// Decode a PNG or JPEG file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum CpStatus cp_image_load(const char *path, struct CpImage **out);

// # Safety
// `img` must be a live handle; `path` a NUL-terminated string.
enum CpStatus cp_image_save_png(const struct CpImage *img, const char *path);

// Width in pixels, or 0 for NULL.
//
// # Safety
// `img` must be NULL or a live handle.
uint32_t cp_image_width(const struct CpImage *img);

// Height in pixels, or 0 for NULL.
//
// # Safety
// `img` must be NULL or a live handle.
uint32_t cp_image_height(const struct CpImage *img);

// Copy the pixels out; `len` must equal `width * height * 3`.
//
// # Safety
// `img` must be a live handle; `buf` must have `len` writable bytes.
enum CpStatus cp_image_copy_pixels(const struct CpImage *img, uint8_t *buf, size_t len);

// # Safety
// `img` must be NULL or a handle not yet freed.
void cp_image_free(struct CpImage *img);

// Build a mask from `len = width * height` bytes; nonzero means set.
//
// # Safety
// `bits` must point to `len` readable bytes; `out` must be writable.
enum CpStatus cp_mask_new(uint32_t width,
                          uint32_t height,
                          const uint8_t *bits,
                          size_t len,
                          struct CpMask **out);

// # Safety
// `mask` must be NULL or a live handle.
uint32_t cp_mask_width(const struct CpMask *mask);

// # Safety
// `mask` must be NULL or a live handle.
uint32_t cp_mask_height(const struct CpMask *mask);

// Number of set pixels, or 0 for NULL.
//
// # Safety
// `mask` must be NULL or a live handle.
size_t cp_mask_count(const struct CpMask *mask);

// Copy the mask out as 0/1 bytes; `len` must equal `width * height`.
//
// # Safety
// `mask` must be a live handle; `buf` must have `len` writable bytes.
enum CpStatus cp_mask_copy_bits(const struct CpMask *mask, uint8_t *buf, size_t len);

// # Safety
// `mask` must be NULL or a handle not yet freed.
void cp_mask_free(struct CpMask *mask);

// Pixels whose R, G and B all reach `threshold` (in `(0, 1]`).
//
// # Safety
// `img` must be a live handle; `out` must be writable.
enum CpStatus cp_detect_specular(const struct CpImage *img, double threshold, struct CpMask **out);

// Dilate a glare mask by a disk of `radius`.
//
// # Safety
// `mask` must be a live handle; `out` must be writable.
enum CpStatus cp_build_inpaint_mask(const struct CpMask *mask,
                                    uint32_t radius,
                                    struct CpMask **out);

// Harmonic fill of each channel over `mask`. `cfg` may be NULL for defaults.
//
// # Safety
// `img` and `mask` must be live handles; `cfg` NULL or readable; `out` writable.
enum CpStatus cp_remove_specular(const struct CpImage *img,
                                 const struct CpMask *mask,
                                 const struct CpSolverConfig *cfg,
                                 struct CpImage **out);

// Run the whole pipeline. `cfg` may be NULL for defaults. Each output
// pointer may be NULL to skip that output. `report_json_out`, when given,
// receives the JSON report even if processing fails; release it with
// `cp_string_free`.
//
// # Safety
// `img` must be a live handle; `cfg` NULL or readable; outputs NULL or writable.
enum CpStatus cp_process_image(const struct CpImage *img,
                               const struct CpPipelineConfig *cfg,
                               struct CpImage **inpainted_out,
                               struct CpImage **roi_crop_out,
                               struct CpMask **roi_mask_out,
                               char **report_json_out);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void cp_string_free(char *s);

// Generate a synthetic cervigram. `spec_json` is a JSON object overriding
// any subset of the generator settings, or NULL for all defaults. Each
// output pointer may be NULL to skip that output.
//
// # Safety
// `spec_json` must be NULL or NUL-terminated; outputs NULL or writable.
enum CpStatus cp_generate_synthetic(uint64_t seed,
                                    const char *spec_json,
                                    struct CpImage **image_out,
                                    struct CpMask **glare_truth_out,
                                    struct CpMask **roi_truth_out);

// Grade a predicted ROI against ground truth. `jaccard_out` and
// `area_ratio_out` may be NULL.
//
// # Safety
// `pred` and `truth` must be live handles; `class_out` writable; the
// other outputs NULL or writable.
enum CpStatus cp_classify_detection(const struct CpMask *pred,
                                    const struct CpMask *truth,
                                    double slack,
                                    enum CpDetectionClass *class_out,
                                    double *jaccard_out,
                                    double *area_ratio_out);

// Radially symmetric harmonic function of `r > 0` in dimension `n >= 2`.
//
// # Safety
// `out` must be writable.
enum CpStatus cp_radial_fundamental_solution(double r,
                                             uint32_t n,
                                             double c1,
                                             double c2,
                                             double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CERVIPRE_H */
