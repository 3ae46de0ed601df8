//! C ABI over the facdirac library.
//!
//! Every fallible function returns an [`FdStatus`]; on failure a message is
//! kept per thread and can be read with [`fd_last_error`]. Objects are
//! opaque handles released with their `_free` function. Panics never cross
//! the boundary; they surface as `FD_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use facdirac::cli::{run_verify, Scenario, ScenarioConfig};
use facdirac::dirac2::{dirac_spectrum, eigenspinor, DiracOperator, Sign};
use facdirac::grid::{Boundary, Grid};
use facdirac::hierarchy::{eigenfunction, scalar_energy};
use facdirac::models::Model;
use facdirac::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    BufferTooSmall = 4,
    Numeric = 5,
    Config = 6,
    Io = 7,
    Panic = 8,
}

/// Hierarchy model; create with [`fd_model_new`].
pub struct FdModel(Model);

/// Uniform grid; create with [`fd_grid_new`] or [`fd_grid_default`].
pub struct FdGrid(Grid);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdSpectrumEntry {
    pub n: u32,
    pub k: u32,
    /// +1 or -1
    pub sign: i32,
    pub epsilon: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(FdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::IndexOutOfRange { .. } | Error::OutsideSpectrum { .. } | Error::StateAbsent { .. } => FdStatus::OutOfRange,
            Error::EigenSolver(_) | Error::SingularPoint { .. } | Error::NonNormalizable { .. } => FdStatus::Numeric,
            Error::ImaginaryShiftedMass { .. } => FdStatus::Numeric,
            Error::UnknownCheck { .. } | Error::NotApplicable { .. } | Error::Config(_) | Error::Json(_) => FdStatus::Config,
            Error::Io(_) | Error::Csv(_) => FdStatus::Io,
            _ => FdStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: FdStatus, msg: &str) -> Failure {
    Failure(status, msg.to_string())
}

fn set_error(msg: Option<String>) {
    let c = msg.map(|m| CString::new(m.replace('\0', " ")).unwrap_or_default());
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> FdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            FdStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(Some(format!("panic: {msg}")));
            FdStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(FdStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure(FdStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(FdStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(FdStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(FdStatus::NullPointer, "output pointer is null"));
    }
    out.write(value);
    Ok(())
}

fn check_len(have: usize, need: usize) -> Result<(), Failure> {
    if have < need {
        Err(Failure(FdStatus::BufferTooSmall, format!("buffer holds {have} values, need {need}")))
    } else {
        Ok(())
    }
}

/// Message for the last failed call on this thread, or NULL after a
/// success. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn fd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a model from its id ("trig_pt" or "hyp_pt").
///
/// # Safety
/// `id` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_model_new(id: *const c_char, out: *mut *mut FdModel) -> FdStatus {
    guard(|| {
        let m = Model::from_id(read_str(id, "id")?)?;
        write_out(out, Box::into_raw(Box::new(FdModel(m))))
    })
}

/// Creates the massless shifted copy of `model` anchored at `n0`.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_model_shift(model: *const FdModel, n0: u32, out: *mut *mut FdModel) -> FdStatus {
    guard(|| {
        let m = borrow(model, "model")?.0.shifted(n0)?;
        write_out(out, Box::into_raw(Box::new(FdModel(m))))
    })
}

/// # Safety
/// `model` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fd_model_free(model: *mut FdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of bound levels above k = 0 for index n; -1 when unbounded.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_model_k_max(model: *const FdModel, n: u32, out: *mut i64) -> FdStatus {
    guard(|| {
        let m = &borrow(model, "model")?.0;
        m.check_index(n)?;
        write_out(out, m.k_max(n).map_or(-1, i64::from))
    })
}

/// Scalar energy E_n^k.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_scalar_energy(model: *const FdModel, n: u32, k: u32, out: *mut f64) -> FdStatus {
    guard(|| write_out(out, scalar_energy(&borrow(model, "model")?.0, n, k)?))
}

/// Mass term of the Dirac operator h_n.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_dirac_mass(model: *const FdModel, n: u32, out: *mut f64) -> FdStatus {
    guard(|| write_out(out, borrow(model, "model")?.0.mass(n)?))
}

/// `boundary`: 0 Dirichlet, 1 decaying truncation of the line.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_grid_new(x_min: f64, x_max: f64, n_points: usize, boundary: i32, out: *mut *mut FdGrid) -> FdStatus {
    guard(|| {
        let b = match boundary {
            0 => Boundary::Dirichlet,
            1 => Boundary::DecayTruncation,
            _ => return Err(fail(FdStatus::InvalidArgument, "boundary must be 0 or 1")),
        };
        let g = Grid::new(x_min, x_max, n_points, b)?;
        write_out(out, Box::into_raw(Box::new(FdGrid(g))))
    })
}

/// The model's default domain and resolution.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_grid_default(model: *const FdModel, out: *mut *mut FdGrid) -> FdStatus {
    guard(|| {
        let g = borrow(model, "model")?.0.default_grid();
        write_out(out, Box::into_raw(Box::new(FdGrid(g))))
    })
}

/// # Safety
/// `grid` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fd_grid_free(grid: *mut FdGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of nodes; 0 for a NULL handle.
///
/// # Safety
/// `grid` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fd_grid_len(grid: *const FdGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.n_points())
}

/// Writes the node coordinates into `buf` (at least `fd_grid_len` values).
///
/// # Safety
/// `grid` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fd_grid_nodes(grid: *const FdGrid, buf: *mut f64, len: usize) -> FdStatus {
    guard(|| {
        let g = &borrow(grid, "grid")?.0;
        check_len(len, g.n_points())?;
        let out = out_slice(buf, len, "buf")?;
        out[..g.n_points()].copy_from_slice(&g.nodes());
        Ok(())
    })
}

/// Analytic spectrum of h_n up to level k_max, ascending in energy.
///
/// `written` receives the number of entries, or the required capacity when
/// the call fails with `FD_STATUS_BUFFER_TOO_SMALL`.
///
/// # Safety
/// `model` must be a live handle, `buf` must hold `cap` entries and
/// `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_dirac_spectrum(
    model: *const FdModel,
    n: u32,
    k_max: u32,
    buf: *mut FdSpectrumEntry,
    cap: usize,
    written: *mut usize,
) -> FdStatus {
    guard(|| {
        let op = DiracOperator::new(borrow(model, "model")?.0, n)?;
        let spec = dirac_spectrum(&op, k_max)?;
        write_out(written, spec.len())?;
        check_len(cap, spec.len())?;
        let out = out_slice(buf, cap, "buf")?;
        for (slot, e) in out.iter_mut().zip(&spec) {
            *slot = FdSpectrumEntry { n: e.n, k: e.k, sign: e.sign.value() as i32, epsilon: e.epsilon };
        }
        Ok(())
    })
}

/// Normalized closed-form eigenfunction psi_n^k sampled on `grid`.
///
/// # Safety
/// `model` and `grid` must be live handles; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fd_eigenfunction(
    model: *const FdModel,
    grid: *const FdGrid,
    n: u32,
    k: u32,
    buf: *mut f64,
    len: usize,
) -> FdStatus {
    guard(|| {
        let g = &borrow(grid, "grid")?.0;
        check_len(len, g.n_points())?;
        let psi = eigenfunction(&borrow(model, "model")?.0, n, k, g)?;
        let out = out_slice(buf, len, "buf")?;
        for (o, z) in out.iter_mut().zip(psi.values()) {
            *o = z.re;
        }
        Ok(())
    })
}

/// Normalized eigenspinor of h_n at level k and sign (+1 or -1).
///
/// `buf` receives four blocks of `fd_grid_len` values: upper real, upper
/// imaginary, lower real, lower imaginary.
///
/// # Safety
/// `model` and `grid` must be live handles; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fd_eigenspinor(
    model: *const FdModel,
    grid: *const FdGrid,
    n: u32,
    k: u32,
    sign: i32,
    buf: *mut f64,
    len: usize,
) -> FdStatus {
    guard(|| {
        let g = &borrow(grid, "grid")?.0;
        let np = g.n_points();
        check_len(len, 4 * np)?;
        let s = match sign {
            1 => Sign::Plus,
            -1 => Sign::Minus,
            _ => return Err(fail(FdStatus::InvalidArgument, "sign must be +1 or -1")),
        };
        let op = DiracOperator::new(borrow(model, "model")?.0, n)?;
        let st = eigenspinor(&op, k, s, g)?;
        let out = out_slice(buf, len, "buf")?;
        for (b, comp) in [st.spinor.upper(), st.spinor.lower()].into_iter().enumerate() {
            for (i, z) in comp.values().iter().enumerate() {
                out[2 * b * np + i] = z.re;
                out[(2 * b + 1) * np + i] = z.im;
            }
        }
        Ok(())
    })
}

/// Runs the verification suite for a scenario given as JSON text.
///
/// On success `*out_json` is a report to release with [`fd_string_free`]
/// and `*failed` the number of failing checks.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out_json` and `failed`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_verify_json(
    config_json: *const c_char,
    seed: u64,
    out_json: *mut *mut c_char,
    failed: *mut usize,
) -> FdStatus {
    guard(|| {
        if out_json.is_null() || failed.is_null() {
            return Err(fail(FdStatus::NullPointer, "output pointer is null"));
        }
        let s = Scenario::new(ScenarioConfig::from_json(read_str(config_json, "config_json")?)?)?;
        let report = run_verify(&s, seed, false);
        let mut bytes = Vec::new();
        report.write_json(&mut bytes)?;
        let c = CString::new(bytes).map_err(|_| fail(FdStatus::Io, "report contains NUL"))?;
        out_json.write(c.into_raw());
        failed.write(report.summary.failed);
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
