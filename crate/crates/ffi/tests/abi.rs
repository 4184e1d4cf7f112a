use std::ffi::{c_char, CStr, CString};
use std::ptr;

use sata_ffi::*;

const FIXTURE: &str = include_str!("../../../fixtures/appendix_c.json");

fn load(json: &str) -> *mut SataInstance {
    let text = CString::new(json).unwrap();
    let mut handle = ptr::null_mut();
    assert_eq!(unsafe { sata_instance_from_json(text.as_ptr(), &mut handle) }, SataStatus::Ok);
    assert!(!handle.is_null());
    handle
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe { sata_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn counts() {
    let h = load(FIXTURE);
    let (mut robots, mut targets, mut prims) = (0, 0, 0);
    unsafe {
        assert_eq!(sata_instance_robot_count(h, &mut robots), SataStatus::Ok);
        assert_eq!(sata_instance_target_count(h, &mut targets), SataStatus::Ok);
        assert_eq!(sata_instance_primitive_count(h, 2, &mut prims), SataStatus::Ok);
        assert_eq!(sata_instance_primitive_count(h, 0, &mut prims), SataStatus::InvalidArgument);
        assert_eq!(sata_instance_primitive_count(h, 3, &mut prims), SataStatus::InvalidArgument);
        sata_instance_free(h);
    }
    assert_eq!((robots, targets, prims), (2, 2, 2));
}

#[test]
fn counterexample_through_the_abi() {
    let h = load(FIXTURE);
    let mut chosen = [0u32; 2];
    let (mut value, mut rounds) = (0.0, 0);
    unsafe {
        assert_eq!(sata_greedy_wta(h, chosen.as_mut_ptr(), 2, &mut value, &mut rounds), SataStatus::Ok);
        assert_eq!((chosen, value, rounds), ([1, 2], 2.0, 1));

        assert_eq!(sata_oracle_bottleneck(h, chosen.as_mut_ptr(), 2, &mut value), SataStatus::Ok);
        assert_eq!(value, 1.0);
        assert_eq!(sata_oracle_wta(h, chosen.as_mut_ptr(), 2, &mut value), SataStatus::Ok);
        assert_eq!(value, 2.0);

        let bad = [1u32, 1];
        assert_eq!(sata_eval_bottleneck(h, bad.as_ptr(), 2, &mut value), SataStatus::Ok);
        assert_eq!(value, 0.0);
        assert_eq!(sata_eval_wta(h, bad.as_ptr(), 2, &mut value), SataStatus::Ok);
        assert_eq!(value, 1.0);

        let (mut w, mut rounded) = (0.0, 0.0);
        assert_eq!(
            sata_solve_local(h, 2, 0.1, chosen.as_mut_ptr(), 2, &mut w, &mut rounded, &mut rounds),
            SataStatus::Ok
        );
        assert_eq!((w, rounded, rounds), (1.0, 1.0, 2));
        sata_instance_free(h);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut handle = ptr::null_mut();
    let bad = CString::new("{\"robots\": [").unwrap();
    assert_eq!(unsafe { sata_instance_from_json(bad.as_ptr(), &mut handle) }, SataStatus::ParseError);
    assert!(handle.is_null());
    assert!(!last_error().is_empty());

    let negative = CString::new(FIXTURE.replacen("\"weight\": 1.0", "\"weight\": -1.0", 1)).unwrap();
    assert_eq!(unsafe { sata_instance_from_json(negative.as_ptr(), &mut handle) }, SataStatus::InvalidInstance);
    assert!(last_error().contains("negative weight"), "{}", last_error());

    assert_eq!(unsafe { sata_instance_from_json(ptr::null(), &mut handle) }, SataStatus::NullPointer);

    let h = load(FIXTURE);
    let mut small = [0u32; 1];
    let (mut value, mut rounds) = (0.0, 0);
    unsafe {
        assert_eq!(sata_greedy_wta(h, small.as_mut_ptr(), 1, &mut value, &mut rounds), SataStatus::BufferTooSmall);
        assert_eq!(sata_greedy_wta(h, ptr::null_mut(), 2, &mut value, &mut rounds), SataStatus::NullPointer);
        assert_eq!(sata_greedy_wta(ptr::null(), small.as_mut_ptr(), 1, &mut value, &mut rounds), SataStatus::NullPointer);
        let zero = [0u32, 1];
        assert_eq!(sata_eval_wta(h, zero.as_ptr(), 2, &mut value), SataStatus::InvalidArgument);
        let out_of_range = [3u32, 1];
        assert_eq!(sata_eval_wta(h, out_of_range.as_ptr(), 2, &mut value), SataStatus::InvalidArgument);
        let mut chosen = [0u32; 2];
        assert_eq!(
            sata_solve_local(h, 1, 0.0, chosen.as_mut_ptr(), 2, &mut value, &mut value.clone(), &mut rounds),
            SataStatus::InvalidArgument
        );
        sata_instance_free(h);
        sata_instance_free(ptr::null_mut());
    }
}

#[test]
fn last_error_truncates() {
    let bad = CString::new("nope").unwrap();
    let mut handle = ptr::null_mut();
    unsafe { sata_instance_from_json(bad.as_ptr(), &mut handle) };
    let full = unsafe { sata_last_error(ptr::null_mut(), 0) };
    let mut buf = [1 as c_char; 4];
    assert_eq!(unsafe { sata_last_error(buf.as_mut_ptr(), buf.len()) }, full);
    assert_eq!(buf[3], 0);
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(sata_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/sata.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["sata_instance_from_json", "sata_greedy_wta", "sata_solve_local", "SATA_STATUS_PANIC"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let dir = tempfile_dir();
    let src = dir.join("use_header.c");
    std::fs::write(&src, format!("#include \"{header}\"\nint main(void) {{ return sata_version() == 0; }}\n")).unwrap();
    match std::process::Command::new(&cc).arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg(&src).status() {
        Ok(status) => assert!(status.success(), "{cc} rejected the header"),
        Err(_) => eprintln!("no C compiler available, header syntax not checked"),
    }
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ffi-header");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
