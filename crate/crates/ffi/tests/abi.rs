use std::ffi::{CStr, CString};
use std::ptr;

use peisert_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { peisert_string_free(s) };
    out
}

fn last_error() -> String {
    let e = peisert_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_str().unwrap().to_owned()
}

#[test]
fn field_handle_lifecycle() {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { peisert_field_new(3, 2, &mut f) }, PeisertStatus::Ok);
    assert_eq!(unsafe { peisert_field_order(f) }, 9);
    assert_ne!(unsafe { peisert_field_primitive(f) }, 0);
    unsafe { peisert_field_free(f) };
    assert_eq!(unsafe { peisert_field_order(ptr::null()) }, 0);
}

#[test]
fn invalid_field_reports_error() {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { peisert_field_new(4, 2, &mut f) }, PeisertStatus::InvalidParameter);
    assert!(f.is_null());
    assert!(last_error().contains("not prime"));
    assert_eq!(unsafe { peisert_field_new(3, 2, ptr::null_mut()) }, PeisertStatus::NullPointer);
}

#[test]
fn critical_group_q9() {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { peisert_field_new(3, 2, &mut f) }, PeisertStatus::Ok);
    let mut out = ptr::null_mut();
    let st = unsafe {
        peisert_critical_group_json(f, PeisertGraph::Peisert, PeisertMethod::Both, false, false, &mut out)
    };
    assert_eq!(st, PeisertStatus::Ok);
    let json = take(out);
    assert!(json.contains("\"spanning_trees\":\"11664\""), "{json}");
    assert!(json.contains("\"invariant_factors\":[\"6\",\"6\",\"18\",\"18\"]"), "{json}");
    assert!(!json.contains("\"blocks\""));

    let mut out = ptr::null_mut();
    let st = unsafe {
        peisert_critical_group_json(f, PeisertGraph::Paley, PeisertMethod::Formula, false, false, &mut out)
    };
    assert_eq!(st, PeisertStatus::InvalidParameter);
    assert!(out.is_null());
    unsafe { peisert_field_free(f) };
}

#[test]
fn scalar_entry_points() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { peisert_spanning_trees(9, &mut s) }, PeisertStatus::Ok);
    assert_eq!(take(s), "11664");
    let mut r = 0u64;
    assert_eq!(unsafe { peisert_p_rank(3, 2, &mut r) }, PeisertStatus::Ok);
    assert_eq!(r, 16);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { peisert_smith_group(3, 1, &mut s) }, PeisertStatus::Ok);
    assert_eq!(take(s), "2 2 2 2 4");
    assert_eq!(unsafe { peisert_p_rank(5, 1, &mut r) }, PeisertStatus::InvalidParameter);
}

#[test]
fn verify_suite() {
    let name = CString::new("stickelberger").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { peisert_verify_json(name.as_ptr(), 3, 1, 0, &mut s) }, PeisertStatus::Ok);
    assert!(take(s).contains("\"passed\":true"));
    let bad = CString::new("nope").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { peisert_verify_json(bad.as_ptr(), 3, 1, 0, &mut s) }, PeisertStatus::InvalidParameter);
    assert!(last_error().contains("unknown suite"));
}

#[test]
fn header_is_current() {
    let header = include_str!("../include/peisert.h");
    for sym in [
        "peisert_field_new",
        "peisert_field_free",
        "peisert_critical_group_json",
        "peisert_verify_json",
        "peisert_string_free",
        "peisert_last_error",
        "PEISERT_STATUS_VERIFICATION_FAILED",
    ] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}
