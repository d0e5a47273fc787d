//! C interface to `cvsim`.
//!
//! States are passed as opaque `CvState` handles created by the `cv_state_*`
//! constructors and released with `cv_state_free`. Every fallible call
//! returns a `CvStatus`; on failure `cv_last_error` describes the cause.
//! Strings returned by the library are released with `cv_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use cvsim::criteria::{analyze_cut, classify_tripartite, Bipartition};
use cvsim::interface::{run_beam, Pass};
use cvsim::nalgebra::{DMatrix, DVector};
use cvsim::{BeamSpec, Disposal, Error, GaussianState, MeasurementRecord, PassGeometry};

/// Opaque Gaussian state.
pub struct CvState(GaussianState);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonPhysical = 3,
    NoConvergence = 4,
    Parse = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvQuadrature {
    X = 0,
    P = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvDisposal {
    Discard = 0,
    MeasureX = 1,
    MeasureP = 2,
    Keep = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c =
        CString::new(msg).unwrap_or_else(|_| CString::new("error message contained NUL").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CvStatus {
    match e {
        Error::NoConvergence { .. } => CvStatus::NoConvergence,
        Error::Json(_) => CvStatus::Parse,
        Error::Io(_) => CvStatus::Io,
        e if e.is_physics_violation() => CvStatus::NonPhysical,
        _ => CvStatus::InvalidArgument,
    }
}

struct Failure(CvStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CvStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure> + UnwindSafe) -> CvStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CvStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CvStatus::Panic
        }
    }
}

unsafe fn state_ref<'a>(p: *const CvState) -> Result<&'a GaussianState, Failure> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null("state"))
}

unsafe fn put_state(out: *mut *mut CvState, s: GaussianState) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(CvState(s)));
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(CvStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn fill(values: &[f64], buf: *mut f64, len: usize) -> Result<(), Failure> {
    if len < values.len() {
        return Err(Failure(
            CvStatus::BufferTooSmall,
            format!("need {} entries, got {len}", values.len()),
        ));
    }
    if buf.is_null() {
        return Err(null("buffer"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn cv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cv_state_vacuum(n_modes: usize, out: *mut *mut CvState) -> CvStatus {
    guard(|| {
        if n_modes == 0 {
            return Err(Failure(
                CvStatus::InvalidArgument,
                "at least one mode is required".into(),
            ));
        }
        put_state(out, GaussianState::vacuum(n_modes))
    })
}

/// # Safety
/// `occupations` must point to `n_modes` doubles and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cv_state_thermal(
    occupations: *const f64,
    n_modes: usize,
    out: *mut *mut CvState,
) -> CvStatus {
    guard(|| {
        let occ = slice(occupations, n_modes, "occupations")?;
        put_state(out, GaussianState::thermal(occ)?)
    })
}

/// Builds a state from a row-major `2n × 2n` covariance matrix and a
/// length-`2n` displacement (null for zero).
///
/// # Safety
/// `cm` must point to `4 n²` doubles, `disp` to `2n` doubles or be null.
#[no_mangle]
pub unsafe extern "C" fn cv_state_new(
    n_modes: usize,
    cm: *const f64,
    disp: *const f64,
    out: *mut *mut CvState,
) -> CvStatus {
    guard(|| {
        let dim = 2 * n_modes;
        let cm = slice(cm, dim * dim, "cm")?;
        let d = if disp.is_null() {
            DVector::zeros(dim)
        } else {
            DVector::from_column_slice(slice(disp, dim, "disp")?)
        };
        put_state(
            out,
            GaussianState::new(DMatrix::from_row_slice(dim, dim, cm), d, None)?,
        )
    })
}

/// # Safety
/// `state` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cv_state_free(state: *mut CvState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn cv_state_clone(state: *const CvState, out: *mut *mut CvState) -> CvStatus {
    guard(|| put_state(out, state_ref(state)?.clone()))
}

/// Number of modes, 0 for a null handle.
///
/// # Safety
/// `state` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn cv_state_n_modes(state: *const CvState) -> usize {
    state.as_ref().map_or(0, |s| s.0.n_modes())
}

/// Copies the covariance matrix row-major into `buf` (`4 n²` entries).
///
/// # Safety
/// `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cv_state_cm(state: *const CvState, buf: *mut f64, len: usize) -> CvStatus {
    guard(|| {
        let s = state_ref(state)?;
        let row_major: Vec<f64> = s.cm().transpose().as_slice().to_vec();
        fill(&row_major, buf, len)
    })
}

/// # Safety
/// `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cv_state_disp(
    state: *const CvState,
    buf: *mut f64,
    len: usize,
) -> CvStatus {
    guard(|| fill(state_ref(state)?.disp().as_slice(), buf, len))
}

/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cv_state_from_json(
    json: *const c_char,
    out: *mut *mut CvState,
) -> CvStatus {
    guard(|| put_state(out, GaussianState::from_json(c_str(json, "json")?)?))
}

/// Writes a newly allocated string to `*out`; release it with
/// `cv_string_free`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cv_state_to_json(
    state: *const CvState,
    out: *mut *mut c_char,
) -> CvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let text = state_ref(state)?.to_json()?;
        *out = CString::new(text)
            .map_err(|e| Failure(CvStatus::Panic, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn cv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Keeps the listed zero-based modes, in the given order.
///
/// # Safety
/// `keep` must point to `n_keep` indices.
#[no_mangle]
pub unsafe extern "C" fn cv_state_partial_trace(
    state: *const CvState,
    keep: *const usize,
    n_keep: usize,
    out: *mut *mut CvState,
) -> CvStatus {
    guard(|| {
        let s = state_ref(state)?;
        put_state(out, s.partial_trace(slice(keep, n_keep, "keep")?)?)
    })
}

/// Conditions on a homodyne outcome and removes the measured mode.
///
/// # Safety
/// `state` must be a valid handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cv_state_homodyne(
    state: *const CvState,
    mode: usize,
    quadrature: CvQuadrature,
    outcome: f64,
    out: *mut *mut CvState,
) -> CvStatus {
    guard(|| {
        let rec = match quadrature {
            CvQuadrature::X => MeasurementRecord::x(mode, outcome),
            CvQuadrature::P => MeasurementRecord::p(mode, outcome),
        };
        put_state(out, state_ref(state)?.condition_on_homodyne(&rec)?)
    })
}

/// Sends one beam through the listed ensembles (zero-based, with angles) at
/// coupling `kappa`. With `CvDisposal::Keep` the beam is appended as the last
/// mode; `outcome` is used only by the measuring disposals.
///
/// # Safety
/// `ensembles` and `angles` must each point to `n_passes` values.
#[no_mangle]
pub unsafe extern "C" fn cv_state_run_beam(
    state: *const CvState,
    ensembles: *const usize,
    angles: *const f64,
    n_passes: usize,
    kappa: f64,
    beam_var_x: f64,
    beam_var_p: f64,
    disposal: CvDisposal,
    outcome: f64,
    out: *mut *mut CvState,
) -> CvStatus {
    guard(|| {
        let s = state_ref(state)?;
        let ens = slice(ensembles, n_passes, "ensembles")?;
        let ang = slice(angles, n_passes, "angles")?;
        let passes = ens
            .iter()
            .zip(ang)
            .map(|(&ensemble, &angle)| Pass {
                ensemble,
                angle,
                kappa,
            })
            .collect();
        let geometry = PassGeometry::new(passes)?;
        let beam = BeamSpec::new(beam_var_x, beam_var_p)?;
        let disposal = match disposal {
            CvDisposal::Discard => Disposal::Discard,
            CvDisposal::MeasureX => Disposal::MeasureX(outcome),
            CvDisposal::MeasureP => Disposal::MeasureP(outcome),
            CvDisposal::Keep => Disposal::Keep,
        };
        put_state(out, run_beam(s, &geometry, &beam, disposal)?)
    })
}

/// Symplectic eigenvalues in descending order (`n` entries).
///
/// # Safety
/// `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cv_state_symplectic_eigenvalues(
    state: *const CvState,
    buf: *mut f64,
    len: usize,
) -> CvStatus {
    guard(|| fill(&state_ref(state)?.symplectic_eigenvalues()?, buf, len))
}

/// PPT test across a cut written like `12|34`. `margin` receives the
/// smallest partially reversed symplectic eigenvalue minus one.
///
/// # Safety
/// `cut` must be NUL-terminated, `is_ppt` and `margin` valid for writes or null.
#[no_mangle]
pub unsafe extern "C" fn cv_ppt(
    state: *const CvState,
    cut: *const c_char,
    is_ppt: *mut bool,
    margin: *mut f64,
) -> CvStatus {
    guard(|| {
        let s = state_ref(state)?;
        let r = analyze_cut(s, &Bipartition::parse(c_str(cut, "cut")?, s.n_modes())?)?;
        if !is_ppt.is_null() {
            *is_ppt = r.ppt;
        }
        if !margin.is_null() {
            *margin = r.margin;
        }
        Ok(())
    })
}

/// # Safety
/// `cut` must be NUL-terminated and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cv_log_negativity(
    state: *const CvState,
    cut: *const c_char,
    out: *mut f64,
) -> CvStatus {
    guard(|| {
        let s = state_ref(state)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out =
            analyze_cut(s, &Bipartition::parse(c_str(cut, "cut")?, s.n_modes())?)?.log_negativity;
        Ok(())
    })
}

/// Tripartite class of a three-mode state: 1 all cuts NPT, 2 one PPT cut,
/// 3 two PPT cuts, 4 PPT but entangled, 5 fully separable, 0 undecided.
///
/// # Safety
/// `class_code` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cv_classify_tripartite(
    state: *const CvState,
    class_code: *mut u8,
) -> CvStatus {
    guard(|| {
        if class_code.is_null() {
            return Err(null("output pointer"));
        }
        *class_code = classify_tripartite(state_ref(state)?)?.class_standard;
        Ok(())
    })
}
