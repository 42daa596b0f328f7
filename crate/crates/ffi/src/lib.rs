//! C ABI for the povm-merit library.
//!
//! The surface is handle-based: load a detector file into an opaque
//! `PmDetector`, query figures of merit through accessor functions, free
//! the handle when done. Every fallible call returns a [`PmStatus`];
//! `pm_last_error_message` retrieves a human-readable description of the
//! most recent failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;

use povm_merit::classical::{bandwidth, resolutions, single_photon_block};
use povm_merit::hilbert::TimeWindow;
use povm_merit::io::{self, MeritReport, ReportOptions};
use povm_merit::povm::{effective_dimension, purity, Povm};
use povm_merit::quantum::{
    dark_count_rate, dark_counts, efficiency_spectrum, number_entropy, number_weights,
};
use povm_merit::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The file could not be read or parsed.
    ParseError = 3,
    /// The POVM violates an invariant.
    ValidationFailed = 4,
    /// An argument was out of range for this detector.
    InvalidArgument = 5,
    /// The computation is undefined for this input (e.g. zero bandwidth).
    ComputationError = 6,
    /// The caller-provided buffer is too small.
    BufferTooSmall = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message unavailable").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = sanitized);
}

fn fail(status: PmStatus, message: &str) -> PmStatus {
    set_error(message);
    status
}

fn status_of(error: &Error) -> PmStatus {
    match error {
        Error::ParseError { .. } | Error::Io(_) => PmStatus::ParseError,
        Error::ValidationFailed { .. }
        | Error::NumericalInconsistency(_)
        | Error::DegenerateModeSet { .. } => PmStatus::ValidationFailed,
        Error::InvalidGrid(_)
        | Error::InvalidWindow(_)
        | Error::InvalidParameter(_)
        | Error::DimensionMismatch { .. }
        | Error::DimensionCap { .. }
        | Error::UnsupportedComposition(_)
        | Error::SpectralLeakage(_) => PmStatus::InvalidArgument,
        _ => PmStatus::ComputationError,
    }
}

fn fail_with(error: Error) -> PmStatus {
    let status = status_of(&error);
    set_error(&error.to_string());
    status
}

/// Opaque detector handle: a validated POVM on its truncated Fock basis.
pub struct PmDetector {
    povm: Povm,
}

/// Resolution search result (see `pm_detector_resolutions`).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PmResolution {
    /// Frequency bin size δω (rad/s) meeting the entropy target.
    pub delta_omega_bin: f64,
    /// Time bin size δt (s) meeting the entropy target.
    pub delta_t_bin: f64,
    /// Achieved average frequency entropy (bits).
    pub h_omega_bits: f64,
    /// Achieved average time entropy (bits).
    pub h_t_bits: f64,
    /// Δω = 2^H̄ω · δω (rad/s).
    pub delta_omega: f64,
    /// Δt = 2^H̄t · δt (s).
    pub delta_t: f64,
    /// Δω·Δt (≥ eπ ≈ 8.54).
    pub product: f64,
}

/// Message describing the most recent failure on this thread. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Loads and validates a POVM file. On success writes a new handle to
/// `out`; free it with `pm_detector_free`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_load(
    path: *const c_char,
    out: *mut *mut PmDetector,
) -> PmStatus {
    if path.is_null() || out.is_null() {
        return fail(PmStatus::NullArgument, "path and out must be non-null");
    }
    let Ok(path) = CStr::from_ptr(path).to_str() else {
        return fail(PmStatus::InvalidUtf8, "path is not valid UTF-8");
    };
    match io::load(&PathBuf::from(path)) {
        Ok(povm) => {
            *out = Box::into_raw(Box::new(PmDetector { povm }));
            PmStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Frees a handle returned by `pm_detector_load`. A null handle is a
/// no-op.
///
/// # Safety
/// `detector` must have come from `pm_detector_load` and not already be
/// freed.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_free(detector: *mut PmDetector) {
    if !detector.is_null() {
        drop(Box::from_raw(detector));
    }
}

unsafe fn detector_ref<'a>(detector: *const PmDetector) -> Option<&'a PmDetector> {
    detector.as_ref()
}

/// Fock-space dimension D, or 0 for a null handle.
///
/// # Safety
/// `detector` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_dim(detector: *const PmDetector) -> u64 {
    detector_ref(detector).map_or(0, |d| d.povm.dim() as u64)
}

/// Number of click outcomes (the derived null element not included).
///
/// # Safety
/// `detector` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_outcomes(detector: *const PmDetector) -> u64 {
    detector_ref(detector).map_or(0, |d| d.povm.elements().len() as u64)
}

/// Number of modes M in the basis.
///
/// # Safety
/// `detector` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_modes(detector: *const PmDetector) -> u64 {
    detector_ref(detector).map_or(0, |d| d.povm.basis().modes() as u64)
}

/// Copies the label of outcome `index` into `buf` (NUL-terminated).
///
/// # Safety
/// `buf` must point to at least `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_outcome_label(
    detector: *const PmDetector,
    index: u64,
    buf: *mut c_char,
    cap: usize,
) -> PmStatus {
    let Some(d) = detector_ref(detector) else {
        return fail(PmStatus::NullArgument, "null detector");
    };
    if buf.is_null() {
        return fail(PmStatus::NullArgument, "null buffer");
    }
    let Some(element) = d.povm.elements().get(index as usize) else {
        return fail(PmStatus::InvalidArgument, "outcome index out of range");
    };
    let bytes = element.label().as_bytes();
    if bytes.len() + 1 > cap {
        return fail(PmStatus::BufferTooSmall, "label does not fit in the buffer");
    }
    std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast(), bytes.len());
    *buf.add(bytes.len()) = 0;
    PmStatus::Ok
}

/// Number of clicks N(k) recorded in outcome `index`.
///
/// # Safety
/// `detector` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_outcome_clicks(
    detector: *const PmDetector,
    index: u64,
    out: *mut u64,
) -> PmStatus {
    with_element(detector, index, out, |e| Ok(e.clicks()))
}

unsafe fn with_element<T>(
    detector: *const PmDetector,
    index: u64,
    out: *mut T,
    f: impl FnOnce(&povm_merit::povm::PovmElement) -> povm_merit::Result<T>,
) -> PmStatus {
    let Some(d) = detector_ref(detector) else {
        return fail(PmStatus::NullArgument, "null detector");
    };
    if out.is_null() {
        return fail(PmStatus::NullArgument, "null output pointer");
    }
    let Some(element) = d.povm.elements().get(index as usize) else {
        return fail(PmStatus::InvalidArgument, "outcome index out of range");
    };
    match f(element) {
        Ok(value) => {
            *out = value;
            PmStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Purity Tr(Π²)/Tr(Π)² of outcome `index`.
///
/// # Safety
/// `detector` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_purity(
    detector: *const PmDetector,
    index: u64,
    out: *mut f64,
) -> PmStatus {
    with_element(detector, index, out, purity)
}

/// Effective dimension 1/Pur of outcome `index`.
///
/// # Safety
/// `detector` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_effective_dimension(
    detector: *const PmDetector,
    index: u64,
    out: *mut f64,
) -> PmStatus {
    with_element(detector, index, out, effective_dimension)
}

/// Single-photon bandwidth Ω_k^(1) of outcome `index`.
///
/// # Safety
/// `detector` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_bandwidth(
    detector: *const PmDetector,
    index: u64,
    out: *mut f64,
) -> PmStatus {
    let Some(d) = detector_ref(detector) else {
        return fail(PmStatus::NullArgument, "null detector");
    };
    with_element(detector, index, out, |e| {
        Ok(bandwidth(&single_photon_block(e, d.povm.basis())?))
    })
}

/// Detector-wide single-photon bandwidth Ω^(1).
///
/// # Safety
/// `detector` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_total_bandwidth(
    detector: *const PmDetector,
    out: *mut f64,
) -> PmStatus {
    with_detector(detector, out, |d| {
        povm_merit::classical::total_bandwidth(&d.povm)
    })
}

unsafe fn with_detector<T>(
    detector: *const PmDetector,
    out: *mut T,
    f: impl FnOnce(&PmDetector) -> povm_merit::Result<T>,
) -> PmStatus {
    let Some(d) = detector_ref(detector) else {
        return fail(PmStatus::NullArgument, "null detector");
    };
    if out.is_null() {
        return fail(PmStatus::NullArgument, "null output pointer");
    }
    match f(d) {
        Ok(value) => {
            *out = value;
            PmStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Dark-count probability d_k = ⟨vac|Π_k|vac⟩ of outcome `index`.
///
/// # Safety
/// `detector` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_dark_count(
    detector: *const PmDetector,
    index: u64,
    out: *mut f64,
) -> PmStatus {
    let Some(d) = detector_ref(detector) else {
        return fail(PmStatus::NullArgument, "null detector");
    };
    let darks = dark_counts(&d.povm);
    with_element(detector, index, out, |_| Ok(darks[index as usize]))
}

/// Dark-count rate Σ d_k N(k) / T for a duration of `duration_s` seconds.
///
/// # Safety
/// `detector` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_dark_rate(
    detector: *const PmDetector,
    duration_s: f64,
    out: *mut f64,
) -> PmStatus {
    with_detector(detector, out, |d| dark_count_rate(&d.povm, duration_s))
}

/// Best single-photon efficiency η_max over all modes.
///
/// # Safety
/// `detector` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_eta_max(
    detector: *const PmDetector,
    out: *mut f64,
) -> PmStatus {
    with_detector(detector, out, |d| {
        Ok(efficiency_spectrum(&d.povm)?.eta_max())
    })
}

/// Copies the mode efficiencies (descending) into `buf`; `written`
/// receives the count. Fails with `BufferTooSmall` if `cap` < M.
///
/// # Safety
/// `buf` must point to `cap` writable f64 slots; `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_efficiency_spectrum(
    detector: *const PmDetector,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> PmStatus {
    let Some(d) = detector_ref(detector) else {
        return fail(PmStatus::NullArgument, "null detector");
    };
    if buf.is_null() || written.is_null() {
        return fail(PmStatus::NullArgument, "null output pointer");
    }
    let spectrum = match efficiency_spectrum(&d.povm) {
        Ok(s) => s,
        Err(e) => return fail_with(e),
    };
    let weights = spectrum.weights();
    if weights.len() > cap {
        return fail(PmStatus::BufferTooSmall, "spectrum larger than buffer");
    }
    std::ptr::copy_nonoverlapping(weights.as_ptr(), buf, weights.len());
    *written = weights.len();
    PmStatus::Ok
}

/// Photon-number Shannon entropy (bits) of outcome `index` in mode
/// `mode`.
///
/// # Safety
/// `detector` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_number_entropy(
    detector: *const PmDetector,
    index: u64,
    mode: u64,
    out: *mut f64,
) -> PmStatus {
    let Some(d) = detector_ref(detector) else {
        return fail(PmStatus::NullArgument, "null detector");
    };
    with_element(detector, index, out, |e| {
        number_entropy(&number_weights(e, d.povm.basis(), mode as usize)?)
    })
}

/// Runs the Δω/Δt resolution search. Pass `window_points = 0` to let the
/// library derive a time window from the mode spectra.
///
/// # Safety
/// `detector` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_resolutions(
    detector: *const PmDetector,
    target_bits: f64,
    t_min: f64,
    t_max: f64,
    window_points: usize,
    out: *mut PmResolution,
) -> PmStatus {
    with_detector(detector, out, |d| {
        let window = if window_points == 0 {
            io::default_time_window(d.povm.basis())?
        } else {
            TimeWindow::new(t_min, t_max, window_points)?
        };
        let r = resolutions(&d.povm, target_bits, window)?;
        Ok(PmResolution {
            delta_omega_bin: r.delta_omega_bin,
            delta_t_bin: r.delta_t_bin,
            h_omega_bits: r.h_omega,
            h_t_bits: r.h_t,
            delta_omega: r.delta_omega,
            delta_t: r.delta_t,
            product: r.product,
        })
    })
}

/// Renders the full merit report as a JSON string. Free the result with
/// `pm_string_free`. Pass `window_points = 0` for an automatic window.
///
/// # Safety
/// `detector` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pm_detector_report_json(
    detector: *const PmDetector,
    target_bits: f64,
    duration_s: f64,
    t_min: f64,
    t_max: f64,
    window_points: usize,
    out: *mut *mut c_char,
) -> PmStatus {
    let Some(d) = detector_ref(detector) else {
        return fail(PmStatus::NullArgument, "null detector");
    };
    if out.is_null() {
        return fail(PmStatus::NullArgument, "null output pointer");
    }
    let window = if window_points == 0 {
        None
    } else {
        match TimeWindow::new(t_min, t_max, window_points) {
            Ok(w) => Some(w),
            Err(e) => return fail_with(e),
        }
    };
    let options = ReportOptions {
        modes: None,
        target_bits,
        window,
        duration: duration_s,
    };
    match MeritReport::generate(&d.povm, None, &options) {
        Ok(report) => {
            let json = report.to_json();
            let cstring = CString::new(json.replace('\0', " ")).unwrap_or_default();
            *out = cstring.into_raw();
            PmStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must have been returned by `pm_detector_report_json` and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn pm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
