use std::ffi::{CStr, CString};
use std::ptr;

use permlab_ffi::*;

fn float_matrix(n: usize, entries: &[f64]) -> *mut PlMatrix {
    let mut m = ptr::null_mut();
    let st = unsafe { pl_matrix_from_entries(n, entries.as_ptr(), &mut m) };
    assert_eq!(st, PlStatus::Ok);
    assert!(!m.is_null());
    m
}

fn parsed(text: &str) -> *mut PlMatrix {
    let c = CString::new(text).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { pl_matrix_parse(c.as_ptr(), &mut m) }, PlStatus::Ok);
    m
}

fn last_error() -> String {
    let p = pl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn permanent_of_uniform_by_every_method() {
    let m = float_matrix(4, &[0.25; 16]);
    assert_eq!(unsafe { pl_matrix_order(m) }, 4);
    for method in [PlPermMethod::Naive, PlPermMethod::Ryser, PlPermMethod::Laplace] {
        let mut v = 0.0;
        assert_eq!(unsafe { pl_permanent(m, method, &mut v) }, PlStatus::Ok);
        assert!((v - 3.0 / 32.0).abs() < 1e-15, "{method:?}: {v}");
    }
    unsafe { pl_matrix_free(m) };
}

#[test]
fn exact_permanent_string() {
    let m = parsed("6\n1/6 1/6 1/6 1/6 1/6 1/6\n1/6 1/6 1/6 1/6 1/6 1/6\n1/6 1/6 1/6 1/6 1/6 1/6\n1/6 1/6 1/6 1/6 1/6 1/6\n1/6 1/6 1/6 1/6 1/6 1/6\n1/6 1/6 1/6 1/6 1/6 1/6\n");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { pl_permanent_exact(m, &mut s) }, PlStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(s) }.to_str().unwrap(), "5/324");
    unsafe {
        pl_string_free(s);
        pl_matrix_free(m);
    }
}

#[test]
fn parse_error_sets_status_and_message() {
    let c = CString::new("2\n1 2\n3\n").unwrap();
    let mut m = ptr::null_mut();
    let st = unsafe { pl_matrix_parse(c.as_ptr(), &mut m) };
    assert_eq!(st, PlStatus::Parse);
    assert!(m.is_null());
    assert!(last_error().contains("parse"));
}

#[test]
fn null_pointers_are_rejected() {
    let mut v = 0.0;
    assert_eq!(unsafe { pl_permanent(ptr::null(), PlPermMethod::Ryser, &mut v) }, PlStatus::NullPointer);
    let m = float_matrix(2, &[0.5; 4]);
    assert_eq!(unsafe { pl_permanent(m, PlPermMethod::Ryser, ptr::null_mut()) }, PlStatus::NullPointer);
    assert_eq!(unsafe { pl_matrix_order(ptr::null()) }, 0);
    unsafe {
        pl_matrix_free(m);
        pl_matrix_free(ptr::null_mut());
        pl_string_free(ptr::null_mut());
    }
}

#[test]
fn sigma_and_predicates() {
    let m = float_matrix(3, &[1.0 / 3.0; 9]);
    let mut s2 = 0.0;
    assert_eq!(unsafe { pl_sigma_k(m, 2, &mut s2) }, PlStatus::Ok);
    // 9 minors of order 2, each with permanent 2/9.
    assert!((s2 - 2.0).abs() < 1e-14);
    let (mut ds, mut fi) = (false, false);
    assert_eq!(unsafe { pl_is_doubly_stochastic(m, 1e-12, &mut ds) }, PlStatus::Ok);
    assert_eq!(unsafe { pl_is_fully_indecomposable(m, &mut fi) }, PlStatus::Ok);
    assert!(ds && fi);
    unsafe { pl_matrix_free(m) };

    let id = float_matrix(2, &[1.0, 0.0, 0.0, 1.0]);
    assert_eq!(unsafe { pl_is_fully_indecomposable(id, &mut fi) }, PlStatus::Ok);
    assert!(!fi);
    unsafe { pl_matrix_free(id) };
}

#[test]
fn phi_and_gap() {
    let j4 = parsed("4\n1/4 1/4 1/4 1/4\n1/4 1/4 1/4 1/4\n1/4 1/4 1/4 1/4\n1/4 1/4 1/4 1/4\n");
    let mut v = 0.0;
    assert_eq!(unsafe { pl_phi(j4, &mut v) }, PlStatus::Ok);
    assert!((v - 61.0 / 32.0).abs() < 1e-15);
    assert_eq!(unsafe { pl_gap_direct(j4, 0.5, &mut v) }, PlStatus::Ok);
    assert_eq!(v, 0.0);
    assert_eq!(unsafe { pl_gap_direct(j4, 1.5, &mut v) }, PlStatus::Domain);
    unsafe { pl_matrix_free(j4) };

    // Identity: gap(1/2) = (1/2)(3/32) + 1/2 - per((J+I)/2).
    let id = float_matrix(4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1.]);
    assert_eq!(unsafe { pl_gap_direct(id, 0.5, &mut v) }, PlStatus::Ok);
    assert!(v > 0.0);
    unsafe { pl_matrix_free(id) };

    let not_ds = float_matrix(2, &[1.0, 1.0, 0.0, 0.0]);
    assert_eq!(unsafe { pl_gap_direct(not_ds, 0.5, &mut v) }, PlStatus::Domain);
    assert!(last_error().contains("domain"));
    // It is in K_2, so phi is defined: 2*0 + 1*1 - 0.
    assert_eq!(unsafe { pl_phi(not_ds, &mut v) }, PlStatus::Ok);
    assert!((v - 1.0).abs() < 1e-15);
    unsafe { pl_matrix_free(not_ds) };
}

#[test]
fn root_isolation() {
    let cubic = [-153.0, 465.0, -418.0, 106.0];
    let (mut found, mut lo, mut hi) = (false, 0.0, 0.0);
    let st = unsafe { pl_roots_in_open_unit(cubic.as_ptr(), cubic.len(), 1e-13, &mut found, &mut lo, &mut hi) };
    assert_eq!(st, PlStatus::Ok);
    assert!(found);
    let root = (312.0 - (312.0f64 * 312.0 - 4.0 * 106.0 * 153.0).sqrt()) / 212.0;
    assert!(lo <= root + 1e-15 && root <= hi + 1e-15, "{lo} {hi} {root}");

    // t(1 - t) has no root strictly inside.
    let p = [0.0, 1.0, -1.0];
    let st = unsafe { pl_roots_in_open_unit(p.as_ptr(), p.len(), 1e-12, &mut found, &mut lo, &mut hi) };
    assert_eq!(st, PlStatus::Ok);
    assert!(!found);
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/permlab.h")).unwrap();
    for name in [
        "pl_matrix_from_entries",
        "pl_matrix_parse",
        "pl_matrix_free",
        "pl_matrix_order",
        "pl_permanent",
        "pl_permanent_exact",
        "pl_string_free",
        "pl_sigma_k",
        "pl_is_doubly_stochastic",
        "pl_is_fully_indecomposable",
        "pl_phi",
        "pl_gap_direct",
        "pl_roots_in_open_unit",
        "pl_last_error_message",
        "typedef struct PlMatrix PlMatrix",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
