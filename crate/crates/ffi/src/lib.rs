//! C ABI over the `peisert` library.
//!
//! Functions return a [`PeisertStatus`]; results come back through out
//! pointers. Strings returned by the library are owned by the caller and must
//! be released with [`peisert_string_free`]. After a non-`Ok` status,
//! [`peisert_last_error`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use peisert::compare::{run_suite, Suite};
use peisert::critgrp::{critical_group, p_rank_formula, smith_group_formula, spanning_trees, Method};
use peisert::digits::CarryContext;
use peisert::zlinalg::big_to_string;
use peisert::{Error, FieldTable, GraphKind};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeisertStatus {
    Ok = 0,
    InvalidParameter = 1,
    VerificationFailed = 2,
    NullPointer = 3,
    Internal = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeisertGraph {
    Peisert = 0,
    Paley = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeisertMethod {
    Formula = 0,
    Snf = 1,
    Both = 2,
}

/// Opaque handle to a finite field table.
pub struct PeisertField {
    table: FieldTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PeisertStatus {
    match e {
        Error::PathMismatch(_) | Error::UnresolvedTie(_) | Error::PrecisionAmbiguity { .. } => {
            PeisertStatus::VerificationFailed
        }
        _ => PeisertStatus::InvalidParameter,
    }
}

/// Run `f`, translating errors and panics into a status.
fn guarded(f: impl FnOnce() -> Result<PeisertStatus, Error>) -> PeisertStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            PeisertStatus::Internal
        }
    }
}

/// # Safety
/// `out` must be null or valid for writing one pointer.
unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<PeisertStatus, Error> {
    if out.is_null() {
        set_error("null output pointer");
        return Ok(PeisertStatus::NullPointer);
    }
    let c = CString::new(s).map_err(|e| Error::Io(e.to_string()))?;
    *out = c.into_raw();
    Ok(PeisertStatus::Ok)
}

/// Message for the last failure on this thread, or null. Valid until the next
/// call into the library on the same thread.
#[no_mangle]
pub extern "C" fn peisert_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn peisert_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build `GF(p^n)`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn peisert_field_new(p: u64, n: u32, out: *mut *mut PeisertField) -> PeisertStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return Ok(PeisertStatus::NullPointer);
        }
        let table = FieldTable::new(p, n)?;
        *out = Box::into_raw(Box::new(PeisertField { table }));
        Ok(PeisertStatus::Ok)
    })
}

/// # Safety
/// `f` must be null or a handle from `peisert_field_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn peisert_field_free(f: *mut PeisertField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Field order, or 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn peisert_field_order(f: *const PeisertField) -> u64 {
    f.as_ref().map_or(0, |f| f.table.q())
}

/// Encoding of the primitive element, or 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn peisert_field_primitive(f: *const PeisertField) -> u32 {
    f.as_ref().map_or(0, |f| f.table.beta())
}

/// Critical group report as JSON. `with_blocks` includes the
/// per-class reports. Returns `VerificationFailed` (and still writes the
/// report) when an internal consistency check fails.
///
/// # Safety
/// `f` must be a live handle; `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn peisert_critical_group_json(
    f: *const PeisertField,
    graph: PeisertGraph,
    method: PeisertMethod,
    force: bool,
    with_blocks: bool,
    out: *mut *mut c_char,
) -> PeisertStatus {
    guarded(|| {
        let Some(f) = f.as_ref() else {
            set_error("null field handle");
            return Ok(PeisertStatus::NullPointer);
        };
        let kind = match graph {
            PeisertGraph::Peisert => GraphKind::Peisert,
            PeisertGraph::Paley => GraphKind::Paley,
        };
        let method = match method {
            PeisertMethod::Formula => Method::Formula,
            PeisertMethod::Snf => Method::Snf,
            PeisertMethod::Both => Method::Both,
        };
        let rep = critical_group(&f.table, kind, method, force)?;
        let status = write_string(out, rep.to_json(with_blocks)?.to_string())?;
        if status == PeisertStatus::Ok && !rep.passed() {
            set_error("a consistency check failed; see \"checks\"");
            return Ok(PeisertStatus::VerificationFailed);
        }
        Ok(status)
    })
}

/// Spanning-tree count of the conference graph on `q` vertices, as a decimal
/// string.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn peisert_spanning_trees(q: u64, out: *mut *mut c_char) -> PeisertStatus {
    guarded(|| write_string(out, big_to_string(&spanning_trees(q)?)))
}

/// Closed-form p-rank of the Peisert Laplacian at `q = p^{2t}`.
///
/// # Safety
/// `out` must be valid for writing one `u64`.
#[no_mangle]
pub unsafe extern "C" fn peisert_p_rank(p: u64, t: u32, out: *mut u64) -> PeisertStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return Ok(PeisertStatus::NullPointer);
        }
        *out = p_rank_formula(&CarryContext::from_t(p, t)?);
        Ok(PeisertStatus::Ok)
    })
}

/// Invariant factors of the Smith group at `q = p^{2t}`, space separated.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn peisert_smith_group(p: u64, t: u32, out: *mut *mut c_char) -> PeisertStatus {
    guarded(|| {
        let g = smith_group_formula(&CarryContext::from_t(p, t)?);
        let s: Vec<String> = g.invariant_factors.iter().map(big_to_string).collect();
        write_string(out, s.join(" "))
    })
}

/// Run a named property suite at `q = p^{2t}` and write its JSON report.
/// `precision` 0 selects the default.
///
/// # Safety
/// `suite` must be a nul-terminated string; `out` must be valid for writing
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn peisert_verify_json(
    suite: *const c_char,
    p: u64,
    t: u32,
    precision: u32,
    out: *mut *mut c_char,
) -> PeisertStatus {
    guarded(|| {
        if suite.is_null() {
            set_error("null suite name");
            return Ok(PeisertStatus::NullPointer);
        }
        let name = CStr::from_ptr(suite).to_str().map_err(|e| Error::Parse(e.to_string()))?;
        let suite: Suite = name.parse()?;
        let rep = run_suite(suite, p, t, (precision > 0).then_some(precision))?;
        let status = write_string(out, rep.to_json().to_string())?;
        if status == PeisertStatus::Ok && !rep.passed() {
            let name = rep.first_failure().map(|c| c.name.clone()).unwrap_or_default();
            set_error(format!("check failed: {name}"));
            return Ok(PeisertStatus::VerificationFailed);
        }
        Ok(status)
    })
}
