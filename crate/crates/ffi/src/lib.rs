//! C ABI over `dcg_core`.
//!
//! Objects cross the boundary as opaque handles created by `dcg_*_new`-style
//! constructors and released with the matching `*_free`. Every fallible call
//! returns a [`DcgStatus`]; on failure [`dcg_last_error_message`] describes
//! the error for the calling thread. Gate specs use the command-line syntax
//! `kind:qubits[:theta]` with 1-based qubits, e.g. `x:1:pi/4`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use dcg_core::analysis::{verify_first_order_cancellation, ErrorSubspace};
use dcg_core::cli::config::GateConfig;
use dcg_core::drift::{two_qubit_drift_dcg, ChainModel};
use dcg_core::operator::JointSpace;
use dcg_core::schedule::ControlSchedule;
use dcg_core::spinbath::{
    dcg_schedule, edd_schedule, gate_fidelity, run_point, sample_bath_model, ControlErrorModel, DecouplingModel,
    SpinBathModel, SpinBathSimulator, DEFAULT_DIMENSION_CAP,
};
use dcg_core::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Dimension = 4,
    Numerical = 5,
    Group = 6,
    Io = 7,
    Panic = 8,
}

/// Decoupling group selector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcgModel {
    /// ℤ₂⊗ℤ₂ with collective X and Y.
    Linear = 0,
    /// ℤ₂ with collective X.
    Dephasing = 1,
}

fn model_of(raw: u32) -> Result<DecouplingModel, (DcgStatus, String)> {
    match raw {
        x if x == DcgModel::Linear as u32 => Ok(DecouplingModel::Linear),
        x if x == DcgModel::Dephasing as u32 => Ok(DecouplingModel::Dephasing),
        other => Err((DcgStatus::InvalidArgument, format!("unknown model {other}"))),
    }
}

/// Opaque control schedule.
pub struct DcgSchedule(ControlSchedule);

/// Opaque sampled spin-bath model.
pub struct DcgBathModel(SpinBathModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> DcgStatus {
    match err {
        Error::InvalidArgument(_) | Error::InvalidState(_) | Error::NotHermitian { .. } | Error::DividedControl { .. } => {
            DcgStatus::InvalidArgument
        }
        Error::Parse { .. } | Error::Json(_) => DcgStatus::Parse,
        Error::DimensionMismatch(_) | Error::DimensionCap { .. } => DcgStatus::Dimension,
        Error::Numerical(_) | Error::BranchAmbiguity { .. } => DcgStatus::Numerical,
        Error::Group(_) | Error::LayerCommutation(_) => DcgStatus::Group,
        Error::Io(_) => DcgStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard<F>(f: F) -> DcgStatus
where
    F: FnOnce() -> Result<(), (DcgStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DcgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DcgStatus::Panic
        }
    }
}

fn lift(err: Error) -> (DcgStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (DcgStatus, String) {
    (DcgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (DcgStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (DcgStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (DcgStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn schedule_ref<'a>(p: *const DcgSchedule) -> Result<&'a ControlSchedule, (DcgStatus, String)> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null("schedule"))
}

fn boxed_schedule(s: ControlSchedule) -> *mut DcgSchedule {
    Box::into_raw(Box::new(DcgSchedule(s)))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dcg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dcg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// DCG for `gate_spec` over the group `model` (a [`DcgModel`] value) on `n`
/// qubits.
///
/// # Safety
/// `gate_spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcg_schedule_dcg(
    model: u32,
    gate_spec: *const c_char,
    n: usize,
    tau: f64,
    out: *mut *mut DcgSchedule,
) -> DcgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let gate = GateConfig::parse(read_str(gate_spec, "gate_spec")?).and_then(|g| g.to_gate()).map_err(lift)?;
        *out = boxed_schedule(dcg_schedule(model_of(model)?, &gate, n, tau).map_err(lift)?);
        Ok(())
    })
}

/// Plain EDD implementing the identity; `model` is a [`DcgModel`] value.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcg_schedule_edd(model: u32, n: usize, tau: f64, out: *mut *mut DcgSchedule) -> DcgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = boxed_schedule(edd_schedule(model_of(model)?, n, tau).map_err(lift)?);
        Ok(())
    })
}

/// 64τ entangling block for the 1-based pair `(pair, pair+1)` on a Heisenberg
/// chain of `n` qubits with coupling `lambda`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcg_schedule_drift_pair(
    n: usize,
    lambda: f64,
    pair: usize,
    tau: f64,
    out: *mut *mut DcgSchedule,
) -> DcgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if pair == 0 {
            return Err((DcgStatus::InvalidArgument, "pair index is 1-based".into()));
        }
        let chain = ChainModel::new(n, lambda).map_err(lift)?;
        *out = boxed_schedule(two_qubit_drift_dcg(&chain, pair - 1, tau).map_err(lift)?.schedule);
        Ok(())
    })
}

/// Parses the line-oriented schedule text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcg_schedule_from_text(text: *const c_char, out: *mut *mut DcgSchedule) -> DcgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let s = ControlSchedule::from_text(read_str(text, "text")?).map_err(lift)?;
        s.validate().map_err(lift)?;
        *out = boxed_schedule(s);
        Ok(())
    })
}

/// Serializes to the schedule text format; release with [`dcg_string_free`].
///
/// # Safety
/// `schedule` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcg_schedule_to_text(schedule: *const DcgSchedule, out: *mut *mut c_char) -> DcgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let text = schedule_ref(schedule)?.to_text();
        *out = CString::new(text).map_err(|e| (DcgStatus::InvalidArgument, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// Number of segments over all layers.
///
/// # Safety
/// `schedule` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcg_schedule_segment_count(schedule: *const DcgSchedule, out: *mut usize) -> DcgStatus {
    guard(|| {
        *out_ref(out, "out")? = schedule_ref(schedule)?.segments.len();
        Ok(())
    })
}

/// Total duration in units of τ.
///
/// # Safety
/// `schedule` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcg_schedule_duration_multiplier(schedule: *const DcgSchedule, out: *mut f64) -> DcgStatus {
    guard(|| {
        *out_ref(out, "out")? = schedule_ref(schedule)?.total_multiplier();
        Ok(())
    })
}

/// Worst normalized first-order residual `‖mod_b Φ^{[1]}‖/(‖H_e‖T)` over
/// `samples` random members of `subspace` (`linear`, `dephasing` or
/// `nearest_neighbor`) with `bath_qubits` bath qubits.
///
/// # Safety
/// `schedule` must come from this library, `subspace` be a NUL-terminated
/// string and `worst_residual` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcg_schedule_verify(
    schedule: *const DcgSchedule,
    subspace: *const c_char,
    samples: usize,
    seed: u64,
    bath_qubits: usize,
    worst_residual: *mut f64,
) -> DcgStatus {
    guard(|| {
        let out = out_ref(worst_residual, "worst_residual")?;
        let sched = schedule_ref(schedule)?;
        let sub = ErrorSubspace::by_name(read_str(subspace, "subspace")?, sched.n_qubits).map_err(lift)?;
        if bath_qubits >= 16 {
            return Err((DcgStatus::Dimension, format!("{bath_qubits} bath qubits is too many")));
        }
        let space = JointSpace::new(sched.n_qubits, 1 << bath_qubits).map_err(lift)?;
        let report = verify_first_order_cancellation(sched, &sub, space, samples, f64::INFINITY, seed).map_err(lift)?;
        *out = report.worst_residual;
        Ok(())
    })
}

/// Releases a schedule; null is ignored.
///
/// # Safety
/// `schedule` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dcg_schedule_free(schedule: *mut DcgSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}

/// Samples a random dipolar bath of `n_b` spins for `n` qubits.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcg_bath_model_new(
    n: usize,
    n_b: usize,
    gamma: f64,
    a: f64,
    seed: u64,
    out: *mut *mut DcgBathModel,
) -> DcgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let model = sample_bath_model(n, n_b, gamma, a, seed, DEFAULT_DIMENSION_CAP).map_err(lift)?;
        *out = Box::into_raw(Box::new(DcgBathModel(model)));
        Ok(())
    })
}

/// Fidelity of `schedule` evolved through `model` against `gate_spec`, or
/// against the ideal schedule product when `gate_spec` is null.
///
/// # Safety
/// Handles must come from this library; `gate_spec` may be null or a
/// NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcg_bath_model_fidelity(
    model: *const DcgBathModel,
    schedule: *const DcgSchedule,
    gate_spec: *const c_char,
    out: *mut f64,
) -> DcgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let model = &model.as_ref().ok_or_else(|| null("model"))?.0;
        let sched = schedule_ref(schedule)?;
        if sched.n_qubits != model.n {
            return Err((DcgStatus::Dimension, format!("schedule has {} qubits, model {}", sched.n_qubits, model.n)));
        }
        let target = if gate_spec.is_null() {
            sched.gate_unitary().map_err(lift)?
        } else {
            let gate = GateConfig::parse(read_str(gate_spec, "gate_spec")?).and_then(|g| g.to_gate()).map_err(lift)?;
            gate.target_unitary(model.n).map_err(lift)?
        };
        let sim = SpinBathSimulator::new(model).map_err(lift)?;
        let evo = sim.evolve(sched).map_err(lift)?;
        *out = gate_fidelity(&evo.rho_system, &target, sim.input_state()).map_err(lift)?;
        Ok(())
    })
}

/// Primitive and DCG fidelities for `gate_spec` at `tau`, and their
/// improvement ratio `r = (1 − f_prim)/(1 − f_dcg)`.
///
/// # Safety
/// `model` must come from this library, `gate_spec` be a NUL-terminated
/// string and the three outputs valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dcg_improvement_ratio(
    model: *const DcgBathModel,
    gate_spec: *const c_char,
    tau: f64,
    f_prim: *mut f64,
    f_dcg: *mut f64,
    r: *mut f64,
) -> DcgStatus {
    guard(|| {
        let (fp, fd, rr) = (out_ref(f_prim, "f_prim")?, out_ref(f_dcg, "f_dcg")?, out_ref(r, "r")?);
        let model = &model.as_ref().ok_or_else(|| null("model"))?.0;
        let gate = GateConfig::parse(read_str(gate_spec, "gate_spec")?).and_then(|g| g.to_gate()).map_err(lift)?;
        let res = run_point(model, &gate, tau, &ControlErrorModel::None).map_err(lift)?;
        (*fp, *fd, *rr) = (res.f_prim, res.f_dcg, res.r);
        Ok(())
    })
}

/// Releases a bath model; null is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dcg_bath_model_free(model: *mut DcgBathModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dcg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Path of the generated C header inside the crate.
pub fn header_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("dcg_ffi.h")
}
