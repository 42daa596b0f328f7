#ifndef POVM_MERIT_H
#define POVM_MERIT_H

/* Generated by cbindgen from povm-merit-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum PmStatus {
  PmStatus_Ok = 0,
  // A required pointer argument was null.
  PmStatus_NullArgument = 1,
  // A string argument was not valid UTF-8.
  PmStatus_InvalidUtf8 = 2,
  // The file could not be read or parsed.
  PmStatus_ParseError = 3,
  // The POVM violates an invariant.
  PmStatus_ValidationFailed = 4,
  // An argument was out of range for this detector.
  PmStatus_InvalidArgument = 5,
  // The computation is undefined for this input (e.g. zero bandwidth).
  PmStatus_ComputationError = 6,
  // The caller-provided buffer is too small.
  PmStatus_BufferTooSmall = 7,
} PmStatus;

// Opaque detector handle: a validated POVM on its truncated Fock basis.
typedef struct PmDetector PmDetector;

// Resolution search result (see `pm_detector_resolutions`).
typedef struct PmResolution {
  // Frequency bin size δω (rad/s) meeting the entropy target.
  double delta_omega_bin;
  // Time bin size δt (s) meeting the entropy target.
  double delta_t_bin;
  // Achieved average frequency entropy (bits).
  double h_omega_bits;
  // Achieved average time entropy (bits).
  double h_t_bits;
  // Δω = 2^H̄ω · δω (rad/s).
  double delta_omega;
  // Δt = 2^H̄t · δt (s).
  double delta_t;
  // Δω·Δt (≥ eπ ≈ 8.54).
  double product;
} PmResolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread. The
// pointer stays valid until the next failing call on the same thread.
const char *pm_last_error_message(void);

// Loads and validates a POVM file. On success writes a new handle to
// `out`; free it with `pm_detector_free`.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum PmStatus pm_detector_load(const char *path, struct PmDetector **out);

// Frees a handle returned by `pm_detector_load`. A null handle is a
// no-op.
//
// # Safety
// `detector` must have come from `pm_detector_load` and not already be
// freed.
void pm_detector_free(struct PmDetector *detector);

// Fock-space dimension D, or 0 for a null handle.
//
// # Safety
// `detector` must be a live handle or null.
uint64_t pm_detector_dim(const struct PmDetector *detector);

// Number of click outcomes (the derived null element not included).
//
// # Safety
// `detector` must be a live handle or null.
uint64_t pm_detector_outcomes(const struct PmDetector *detector);

// Number of modes M in the basis.
//
// # Safety
// `detector` must be a live handle or null.
uint64_t pm_detector_modes(const struct PmDetector *detector);

// Copies the label of outcome `index` into `buf` (NUL-terminated).
//
// # Safety
// `buf` must point to at least `cap` writable bytes.
enum PmStatus pm_detector_outcome_label(const struct PmDetector *detector,
                                        uint64_t index,
                                        char *buf,
                                        size_t cap);

// Number of clicks N(k) recorded in outcome `index`.
//
// # Safety
// `detector` and `out` must be valid pointers.
enum PmStatus pm_detector_outcome_clicks(const struct PmDetector *detector,
                                         uint64_t index,
                                         uint64_t *out);

// Purity Tr(Π²)/Tr(Π)² of outcome `index`.
//
// # Safety
// `detector` and `out` must be valid pointers.
enum PmStatus pm_detector_purity(const struct PmDetector *detector, uint64_t index, double *out);

// Effective dimension 1/Pur of outcome `index`.
//
// # Safety
// `detector` and `out` must be valid pointers.
enum PmStatus pm_detector_effective_dimension(const struct PmDetector *detector,
                                              uint64_t index,
                                              double *out);

// Single-photon bandwidth Ω_k^(1) of outcome `index`.
//
// # Safety
// `detector` and `out` must be valid pointers.
enum PmStatus pm_detector_bandwidth(const struct PmDetector *detector, uint64_t index, double *out);

// Detector-wide single-photon bandwidth Ω^(1).
//
// # Safety
// `detector` and `out` must be valid pointers.
enum PmStatus pm_detector_total_bandwidth(const struct PmDetector *detector, double *out);

// Dark-count probability d_k = ⟨vac|Π_k|vac⟩ of outcome `index`.
//
// # Safety
// `detector` and `out` must be valid pointers.
enum PmStatus pm_detector_dark_count(const struct PmDetector *detector,
                                     uint64_t index,
                                     double *out);

// Dark-count rate Σ d_k N(k) / T for a duration of `duration_s` seconds.
//
// # Safety
// `detector` and `out` must be valid pointers.
enum PmStatus pm_detector_dark_rate(const struct PmDetector *detector,
                                    double duration_s,
                                    double *out);

// Best single-photon efficiency η_max over all modes.
//
// # Safety
// `detector` and `out` must be valid pointers.
enum PmStatus pm_detector_eta_max(const struct PmDetector *detector, double *out);

// Copies the mode efficiencies (descending) into `buf`; `written`
// receives the count. Fails with `BufferTooSmall` if `cap` < M.
//
// # Safety
// `buf` must point to `cap` writable f64 slots; `written` must be valid.
enum PmStatus pm_detector_efficiency_spectrum(const struct PmDetector *detector,
                                              double *buf,
                                              size_t cap,
                                              size_t *written);

// Photon-number Shannon entropy (bits) of outcome `index` in mode
// `mode`.
//
// # Safety
// `detector` and `out` must be valid pointers.
enum PmStatus pm_detector_number_entropy(const struct PmDetector *detector,
                                         uint64_t index,
                                         uint64_t mode,
                                         double *out);

// Runs the Δω/Δt resolution search. Pass `window_points = 0` to let the
// library derive a time window from the mode spectra.
//
// # Safety
// `detector` and `out` must be valid pointers.
enum PmStatus pm_detector_resolutions(const struct PmDetector *detector,
                                      double target_bits,
                                      double t_min,
                                      double t_max,
                                      size_t window_points,
                                      struct PmResolution *out);

// Renders the full merit report as a JSON string. Free the result with
// `pm_string_free`. Pass `window_points = 0` for an automatic window.
//
// # Safety
// `detector` and `out` must be valid pointers.
enum PmStatus pm_detector_report_json(const struct PmDetector *detector,
                                      double target_bits,
                                      double duration_s,
                                      double t_min,
                                      double t_max,
                                      size_t window_points,
                                      char **out);

// Frees a string returned by this library.
//
// # Safety
// `s` must have been returned by `pm_detector_report_json` and not yet
// freed.
void pm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POVM_MERIT_H */
