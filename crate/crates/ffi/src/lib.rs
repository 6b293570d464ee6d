//! C ABI for the motional-qec simulator.
//!
//! Every entry point returns an [`MqecStatus`]. Results are written through
//! out-pointers. Objects are opaque handles released with their `_free`
//! function. On failure the message is kept per thread and can be read with
//! [`mqec_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use motional_qec::cli::verify::verify_suite;
use motional_qec::config::Preset;
use motional_qec::encoding::LogicalQubit;
use motional_qec::hilbert::Axis;
use motional_qec::protocol::{Protocol, ProtocolRun};
use motional_qec::Error;
use num_complex::Complex64;

/// Status code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MqecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidParameter = 4,
    Unsupported = 5,
    Numerical = 6,
    OutOfRange = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Motional axis selector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MqecAxis {
    X = 0,
    Y = 1,
}

/// Configuration preset.
pub struct MqecPreset(Preset);

/// Prepared protocol: code, decay model, detector and restoration.
pub struct MqecProtocol(Protocol);

/// Aggregated trajectory ensemble.
pub struct MqecRun(ProtocolRun);

/// Per-cycle ensemble statistics.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MqecCycle {
    pub cycle: usize,
    pub mean_fidelity: f64,
    pub std_error: f64,
    pub failed_fraction: f64,
    pub x_flag_fraction: f64,
    pub y_flag_fraction: f64,
}

/// Per-cycle failure estimate.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MqecFailure {
    pub gamma_tau: f64,
    pub probability: f64,
    pub std_error: f64,
    pub double_jump_exact: f64,
}

/// Exact cycle with one injected jump.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MqecForcedJump {
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    pub flagged_probability: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MqecStatus {
    match e {
        Error::Config(_) | Error::Json(_) | Error::Io(_) => MqecStatus::Config,
        Error::InvalidParameter(_) | Error::ZeroNorm => MqecStatus::InvalidParameter,
        Error::Unsupported(_) => MqecStatus::Unsupported,
        _ => MqecStatus::Numerical,
    }
}

struct Fail(MqecStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MqecStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MqecStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside motional-qec".into());
            MqecStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(MqecStatus::NullPointer, format!("{what} is null")))
}

unsafe fn as_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut()
        .ok_or_else(|| Fail(MqecStatus::NullPointer, format!("{what} is null")))
}

unsafe fn as_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(MqecStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(MqecStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    *as_mut(out, what)? = value;
    Ok(())
}

/// Copies `s` with a terminating nul into `buf` of `len` bytes. `needed`
/// receives the required size including the nul.
unsafe fn copy_out(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), Fail> {
    let n = s.len() + 1;
    if !needed.is_null() {
        *needed = n;
    }
    if buf.is_null() || len < n {
        return Err(Fail(
            MqecStatus::BufferTooSmall,
            format!("buffer of {len} bytes, {n} needed"),
        ));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn mqec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn mqec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a built-in preset by name or a JSON file by path.
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mqec_preset_load(
    name: *const c_char,
    out: *mut *mut MqecPreset,
) -> MqecStatus {
    guard(|| {
        let p = Preset::load(as_str(name, "name")?)?;
        put(out, Box::into_raw(Box::new(MqecPreset(p))), "out")
    })
}

/// Parses a preset from JSON text.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mqec_preset_from_json(
    json: *const c_char,
    out: *mut *mut MqecPreset,
) -> MqecStatus {
    guard(|| {
        let p = Preset::from_json(as_str(json, "json")?)?;
        put(out, Box::into_raw(Box::new(MqecPreset(p))), "out")
    })
}

/// Applies one `key=value` override, e.g. `protocol.gamma=50`. The preset is
/// unchanged on failure.
///
/// # Safety
/// `preset` must come from this library; `assignment` must be nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn mqec_preset_set(
    preset: *mut MqecPreset,
    assignment: *const c_char,
) -> MqecStatus {
    guard(|| {
        let p = as_mut(preset, "preset")?;
        let mut q = p.0.clone();
        q.apply_override(as_str(assignment, "assignment")?)?;
        p.0 = q;
        Ok(())
    })
}

/// Serializes the preset as JSON into `buf`.
///
/// # Safety
/// `preset` must come from this library; `buf` must hold `len` bytes or be
/// null; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn mqec_preset_to_json(
    preset: *const MqecPreset,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> MqecStatus {
    guard(|| copy_out(&as_ref(preset, "preset")?.0.to_json(), buf, len, needed))
}

/// Runs the invariant suite. `failed` receives the number of failed checks.
///
/// # Safety
/// `preset` must come from this library; `failed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mqec_verify(preset: *const MqecPreset, failed: *mut usize) -> MqecStatus {
    guard(|| {
        let checks = verify_suite(&as_ref(preset, "preset")?.0)?;
        put(failed, checks.iter().filter(|c| !c.pass).count(), "failed")
    })
}

/// # Safety
/// `preset` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn mqec_preset_free(preset: *mut MqecPreset) {
    if !preset.is_null() {
        drop(Box::from_raw(preset));
    }
}

/// Builds the protocol for a preset.
///
/// # Safety
/// `preset` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mqec_protocol_new(
    preset: *const MqecPreset,
    out: *mut *mut MqecProtocol,
) -> MqecStatus {
    guard(|| {
        let p = Protocol::new(&as_ref(preset, "preset")?.0)?;
        put(out, Box::into_raw(Box::new(MqecProtocol(p))), "out")
    })
}

/// Runs the seeded trajectory ensemble.
///
/// # Safety
/// `protocol` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mqec_protocol_run(
    protocol: *const MqecProtocol,
    out: *mut *mut MqecRun,
) -> MqecStatus {
    guard(|| {
        let r = as_ref(protocol, "protocol")?.0.run()?;
        put(out, Box::into_raw(Box::new(MqecRun(r))), "out")
    })
}

/// Estimates the per-cycle failure probability from `trajectories` samples.
///
/// # Safety
/// `protocol` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mqec_protocol_cycle_failure(
    protocol: *const MqecProtocol,
    trajectories: usize,
    seed: u64,
    out: *mut MqecFailure,
) -> MqecStatus {
    guard(|| {
        let f = as_ref(protocol, "protocol")?
            .0
            .cycle_failure(trajectories, seed)?;
        put(
            out,
            MqecFailure {
                gamma_tau: f.gamma_tau,
                probability: f.probability,
                std_error: f.std_error,
                double_jump_exact: f.double_jump_exact,
            },
            "out",
        )
    })
}

/// One cycle from `c₊|ψ₊⟩ + c₋|ψ₋⟩` with a jump forced on `axis` at
/// `t_jump` seconds, then detection and restoration.
///
/// # Safety
/// `protocol` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mqec_protocol_forced_jump(
    protocol: *const MqecProtocol,
    c_plus_re: f64,
    c_plus_im: f64,
    c_minus_re: f64,
    c_minus_im: f64,
    axis: MqecAxis,
    t_jump: f64,
    out: *mut MqecForcedJump,
) -> MqecStatus {
    guard(|| {
        let p = &as_ref(protocol, "protocol")?.0;
        let q = LogicalQubit::new(
            Complex64::new(c_plus_re, c_plus_im),
            Complex64::new(c_minus_re, c_minus_im),
        )?
        .with_phases(p.code.phi1, p.code.phi2);
        let axis = match axis {
            MqecAxis::X => Axis::X,
            MqecAxis::Y => Axis::Y,
        };
        let f = p.forced_jump(&q, axis, t_jump)?;
        put(
            out,
            MqecForcedJump {
                mean_fidelity: f.mean_fidelity,
                min_fidelity: f.min_fidelity,
                flagged_probability: f.flagged_probability,
            },
            "out",
        )
    })
}

/// # Safety
/// `protocol` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn mqec_protocol_free(protocol: *mut MqecProtocol) {
    if !protocol.is_null() {
        drop(Box::from_raw(protocol));
    }
}

/// Number of cycles in the run.
///
/// # Safety
/// `run` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mqec_run_cycle_count(run: *const MqecRun, out: *mut usize) -> MqecStatus {
    guard(|| put(out, as_ref(run, "run")?.0.cycles.len(), "out"))
}

/// Statistics of cycle `index` (0-based).
///
/// # Safety
/// `run` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mqec_run_cycle(
    run: *const MqecRun,
    index: usize,
    out: *mut MqecCycle,
) -> MqecStatus {
    guard(|| {
        let cycles = &as_ref(run, "run")?.0.cycles;
        let c = cycles.get(index).ok_or_else(|| {
            Fail(
                MqecStatus::OutOfRange,
                format!("cycle {index} of {}", cycles.len()),
            )
        })?;
        put(
            out,
            MqecCycle {
                cycle: c.cycle,
                mean_fidelity: c.mean_fidelity,
                std_error: c.std_error,
                failed_fraction: c.failed_fraction,
                x_flag_fraction: c.x_flag_fraction,
                y_flag_fraction: c.y_flag_fraction,
            },
            "out",
        )
    })
}

/// Geometric per-cycle failure estimate of the ensemble and its standard
/// error.
///
/// # Safety
/// `run` must come from this library; `probability` and `std_error` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mqec_run_failure(
    run: *const MqecRun,
    probability: *mut f64,
    std_error: *mut f64,
) -> MqecStatus {
    guard(|| {
        let r = &as_ref(run, "run")?.0;
        put(probability, r.failure_per_cycle, "probability")?;
        put(std_error, r.failure_std_error, "std_error")
    })
}

/// Serializes the run summary as JSON into `buf`.
///
/// # Safety
/// `run` must come from this library; `buf` must hold `len` bytes or be
/// null; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn mqec_run_to_json(
    run: *const MqecRun,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> MqecStatus {
    guard(|| {
        let text = serde_json::to_string(&as_ref(run, "run")?.0).map_err(Error::from)?;
        copy_out(&text, buf, len, needed)
    })
}

/// # Safety
/// `run` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn mqec_run_free(run: *mut MqecRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}
