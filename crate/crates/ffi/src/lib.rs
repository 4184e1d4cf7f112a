//! C ABI over the `sata` toolkit.
//!
//! Instances are opaque handles created from JSON and released with
//! [`sata_instance_free`]. Every fallible call returns a [`SataStatus`];
//! on failure a message is available from [`sata_last_error`]. Robot and
//! primitive ids crossing the boundary are one-based, matching the JSON
//! format.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use sata::greedy::greedy_distributed;
use sata::local::{round_solution, solve_local, LocalParams};
use sata::model::parse_instance;
use sata::oracle::{brute_force_bottleneck, brute_force_wta};
use sata::{eval_bottleneck, eval_wta_from_x, Assignment, Error, Instance};

/// Opaque instance handle.
pub struct SataInstance {
    inner: Instance,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SataStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidInstance = 4,
    InvalidArgument = 5,
    BufferTooSmall = 6,
    CapExceeded = 7,
    SolverError = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut e = e.borrow_mut();
        e.clear();
        e.extend(msg.bytes().filter(|&b| b != 0));
    });
}

fn fail(status: SataStatus, msg: impl std::fmt::Display) -> SataStatus {
    set_error(&msg.to_string());
    status
}

fn status_of(err: &Error) -> SataStatus {
    match err {
        Error::Json(_) => SataStatus::ParseError,
        Error::Invalid(_) => SataStatus::InvalidInstance,
        Error::DimensionMismatch(_) | Error::BadOrder(_) | Error::Param(_) => SataStatus::InvalidArgument,
        Error::EnumerationCap { .. } | Error::LpCap { .. } => SataStatus::CapExceeded,
        _ => SataStatus::SolverError,
    }
}

fn guard(f: impl FnOnce() -> Result<(), SataStatus>) -> SataStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SataStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(SataStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: sata::Result<T>) -> Result<T, SataStatus> {
    r.map_err(|e| fail(status_of(&e), &e))
}

unsafe fn instance<'a>(ptr: *const SataInstance) -> Result<&'a Instance, SataStatus> {
    ptr.as_ref().map(|h| &h.inner).ok_or_else(|| fail(SataStatus::NullPointer, "instance handle is null"))
}

unsafe fn out<'a, T>(ptr: *mut T) -> Result<&'a mut T, SataStatus> {
    ptr.as_mut().ok_or_else(|| fail(SataStatus::NullPointer, "output pointer is null"))
}

/// Writes one-based primitive ids into `buf`, which must hold one entry
/// per robot.
unsafe fn write_chosen(chosen: &[usize], buf: *mut u32, len: usize) -> Result<(), SataStatus> {
    if buf.is_null() {
        return Err(fail(SataStatus::NullPointer, "assignment buffer is null"));
    }
    if len < chosen.len() {
        return Err(fail(
            SataStatus::BufferTooSmall,
            format!("assignment buffer holds {len} entries, {} robots", chosen.len()),
        ));
    }
    let buf = std::slice::from_raw_parts_mut(buf, len);
    for (slot, &m) in buf.iter_mut().zip(chosen) {
        *slot = (m + 1) as u32;
    }
    Ok(())
}

unsafe fn read_chosen(inst: &Instance, buf: *const u32, len: usize) -> Result<Vec<usize>, SataStatus> {
    if buf.is_null() {
        return Err(fail(SataStatus::NullPointer, "assignment buffer is null"));
    }
    if len != inst.robot_count() {
        return Err(fail(
            SataStatus::InvalidArgument,
            format!("assignment has {len} entries for {} robots", inst.robot_count()),
        ));
    }
    std::slice::from_raw_parts(buf, len)
        .iter()
        .map(|&m| {
            (m as usize).checked_sub(1).ok_or_else(|| fail(SataStatus::InvalidArgument, "primitive ids start at 1"))
        })
        .collect()
}

/// Copies the last error message of this thread into `buf` as a
/// NUL-terminated string, truncating if needed. Returns the message length
/// without the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sata_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = e.len().min(len - 1);
            std::ptr::copy_nonoverlapping(e.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

/// Parses a JSON instance. On success `*out_handle` owns a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_handle` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sata_instance_from_json(json: *const c_char, out_handle: *mut *mut SataInstance) -> SataStatus {
    guard(|| {
        let slot = out(out_handle)?;
        *slot = std::ptr::null_mut();
        if json.is_null() {
            return Err(fail(SataStatus::NullPointer, "json is null"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| fail(SataStatus::InvalidUtf8, e))?;
        let inner = lift(parse_instance(text))?;
        *slot = Box::into_raw(Box::new(SataInstance { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `handle` must come from [`sata_instance_from_json`] and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn sata_instance_free(handle: *mut SataInstance) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be a live handle and `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sata_instance_robot_count(handle: *const SataInstance, count: *mut usize) -> SataStatus {
    guard(|| {
        *out(count)? = instance(handle)?.robot_count();
        Ok(())
    })
}

/// # Safety
/// `handle` must be a live handle and `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sata_instance_target_count(handle: *const SataInstance, count: *mut usize) -> SataStatus {
    guard(|| {
        *out(count)? = instance(handle)?.target_count();
        Ok(())
    })
}

/// Number of primitives of one-based robot `robot`.
///
/// # Safety
/// `handle` must be a live handle and `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sata_instance_primitive_count(
    handle: *const SataInstance,
    robot: u32,
    count: *mut usize,
) -> SataStatus {
    guard(|| {
        let inst = instance(handle)?;
        let i = (robot as usize).wrapping_sub(1);
        if i >= inst.robot_count() {
            return Err(fail(SataStatus::InvalidArgument, format!("robot {robot} out of range")));
        }
        *out(count)? = inst.primitive_count(i);
        Ok(())
    })
}

/// Distributed greedy for the winner-takes-all objective, robots in
/// ascending id order. Writes the one-based assignment, its value, and the
/// communication rounds used.
///
/// # Safety
/// `handle` must be a live handle, `chosen` must point to `len` writable
/// entries, and `value` and `rounds` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sata_greedy_wta(
    handle: *const SataInstance,
    chosen: *mut u32,
    len: usize,
    value: *mut f64,
    rounds: *mut usize,
) -> SataStatus {
    guard(|| {
        let inst = instance(handle)?;
        let (value, rounds) = (out(value)?, out(rounds)?);
        let dist = lift(greedy_distributed(inst))?;
        write_chosen(&dist.assignment.chosen, chosen, len)?;
        *value = lift(eval_wta_from_x(inst, &dist.assignment.chosen))?.0;
        *rounds = dist.rounds();
        Ok(())
    })
}

/// Local algorithm with horizon `h`. Writes the rounded one-based
/// assignment, the fractional solution's minimum coverage `w`, the rounded
/// assignment's bottleneck value, and the rounds used. Values are `+inf`
/// when the instance has no targets.
///
/// # Safety
/// `handle` must be a live handle, `chosen` must point to `len` writable
/// entries, and the remaining outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sata_solve_local(
    handle: *const SataInstance,
    h: usize,
    epsilon: f64,
    chosen: *mut u32,
    len: usize,
    fractional_w: *mut f64,
    rounded_value: *mut f64,
    rounds: *mut usize,
) -> SataStatus {
    guard(|| {
        let inst = instance(handle)?;
        let (fractional_w, rounded_value, rounds) = (out(fractional_w)?, out(rounded_value)?, out(rounds)?);
        let params = lift(LocalParams::new(h, epsilon))?;
        let sol = lift(solve_local(inst, &params))?;
        let a = lift(round_solution(inst, &sol.fractional))?;
        write_chosen(&a.chosen, chosen, len)?;
        *fractional_w = sol.fractional.w;
        *rounded_value = lift(eval_bottleneck(inst, &a))?.value();
        *rounds = sol.rounds();
        Ok(())
    })
}

/// Exact winner-takes-all optimum by enumeration.
///
/// # Safety
/// As for [`sata_greedy_wta`].
#[no_mangle]
pub unsafe extern "C" fn sata_oracle_wta(
    handle: *const SataInstance,
    chosen: *mut u32,
    len: usize,
    value: *mut f64,
) -> SataStatus {
    guard(|| {
        let inst = instance(handle)?;
        let value = out(value)?;
        let r = lift(brute_force_wta(inst))?;
        write_chosen(&r.best_assignment.chosen, chosen, len)?;
        *value = r.optimum;
        Ok(())
    })
}

/// Exact bottleneck optimum by enumeration (`+inf` without targets).
///
/// # Safety
/// As for [`sata_greedy_wta`].
#[no_mangle]
pub unsafe extern "C" fn sata_oracle_bottleneck(
    handle: *const SataInstance,
    chosen: *mut u32,
    len: usize,
    value: *mut f64,
) -> SataStatus {
    guard(|| {
        let inst = instance(handle)?;
        let value = out(value)?;
        let r = lift(brute_force_bottleneck(inst))?;
        write_chosen(&r.best_assignment.chosen, chosen, len)?;
        *value = r.optimum;
        Ok(())
    })
}

/// Bottleneck value of a one-based assignment (`+inf` without targets).
///
/// # Safety
/// `chosen` must point to `len` readable entries and `value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sata_eval_bottleneck(
    handle: *const SataInstance,
    chosen: *const u32,
    len: usize,
    value: *mut f64,
) -> SataStatus {
    guard(|| {
        let inst = instance(handle)?;
        let value = out(value)?;
        let a = Assignment::new(read_chosen(inst, chosen, len)?);
        *value = lift(eval_bottleneck(inst, &a))?.value();
        Ok(())
    })
}

/// Winner-takes-all value of a one-based assignment, with owners induced
/// by the best covering robot.
///
/// # Safety
/// `chosen` must point to `len` readable entries and `value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sata_eval_wta(
    handle: *const SataInstance,
    chosen: *const u32,
    len: usize,
    value: *mut f64,
) -> SataStatus {
    guard(|| {
        let inst = instance(handle)?;
        let value = out(value)?;
        let c = read_chosen(inst, chosen, len)?;
        *value = lift(eval_wta_from_x(inst, &c))?.0;
        Ok(())
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sata_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
