use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use wlab_ffi::*;

fn section(comp: &str) -> *mut WlabSection {
    let c = CString::new(comp).unwrap();
    let mut h = ptr::null_mut();
    let status = unsafe { wlab_section_new(c.as_ptr(), &mut h) };
    assert_eq!(status, WlabStatus::Ok);
    assert!(!h.is_null());
    h
}

fn coords(h: *const WlabSection, which: WlabSupport) -> Vec<(usize, usize)> {
    let len = unsafe { wlab_section_support_len(h, which) };
    (0..len)
        .map(|i| {
            let mut c = WlabCoord::default();
            assert_eq!(
                unsafe { wlab_section_support_get(h, which, i, &mut c) },
                WlabStatus::Ok
            );
            (c.row, c.col)
        })
        .collect()
}

#[test]
fn supports_through_the_handle() {
    let h = section("1,3,2,1");
    unsafe {
        assert_eq!(wlab_section_size(h), 7);
        assert_eq!(wlab_section_pair_count(h), 1);
    }
    assert_eq!(coords(h, WlabSupport::V), vec![(5, 7)]);
    assert_eq!(
        coords(h, WlabSupport::Excluded),
        vec![(1, 3), (1, 4), (2, 6), (5, 7)]
    );
    let mut c = WlabCoord::default();
    assert_eq!(
        unsafe { wlab_section_support_get(h, WlabSupport::V, 1, &mut c) },
        WlabStatus::OutOfRange
    );
    unsafe { wlab_section_free(h) };
}

#[test]
fn dimensions_and_verdicts() {
    let h = section("3,2,1,1,2,3");
    let (mut dim, mut expected) = (0usize, 0usize);
    assert_eq!(
        unsafe { wlab_section_saturation_dim(h, 4, 1, &mut dim, &mut expected) },
        WlabStatus::Ok
    );
    assert_eq!((dim, expected), (55, 55));
    let mut closure = false;
    assert_eq!(
        unsafe { wlab_section_is_orbital_closure(h, 8, 1, &mut closure) },
        WlabStatus::Ok
    );
    assert!(closure);
    let mut verdict = WlabVerdict::Inconclusive;
    assert_eq!(
        unsafe { wlab_section_verdict(h, 8, 1, &mut verdict) },
        WlabStatus::Ok
    );
    assert_eq!(verdict, WlabVerdict::Regular);
    unsafe { wlab_section_free(h) };
}

#[test]
fn error_codes() {
    let bad = CString::new("0,2").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { wlab_section_new(bad.as_ptr(), &mut h) },
        WlabStatus::InvalidComposition
    );
    assert!(h.is_null());
    assert_eq!(
        unsafe { wlab_section_new(ptr::null(), &mut h) },
        WlabStatus::NullPointer
    );
    let good = CString::new("2,2").unwrap();
    assert_eq!(
        unsafe { wlab_section_new(good.as_ptr(), ptr::null_mut()) },
        WlabStatus::NullPointer
    );
    let msg = unsafe { CStr::from_ptr(wlab_status_message(WlabStatus::InvalidComposition)) };
    assert_eq!(msg.to_str().unwrap(), "invalid composition");
    unsafe {
        assert_eq!(wlab_section_size(ptr::null()), 0);
        wlab_section_free(ptr::null_mut());
        wlab_string_free(ptr::null_mut());
    }
}

#[test]
fn strings_round_trip() {
    let comp = CString::new("2,1,2,1,2").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { wlab_render(comp.as_ptr(), WlabRenderTarget::Matrix, &mut s) },
        WlabStatus::Ok
    );
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { wlab_string_free(s) };
    assert!(text.contains("(*)"));

    let h = section("1,3,2,1");
    let mut json = ptr::null_mut();
    assert_eq!(
        unsafe { wlab_section_report_json(h, 0, &mut json) },
        WlabStatus::Ok
    );
    let v: serde_json::Value =
        serde_json::from_str(unsafe { CStr::from_ptr(json) }.to_str().unwrap()).unwrap();
    unsafe {
        wlab_string_free(json);
        wlab_section_free(h);
    }
    assert_eq!(v["schema"], 1);
    assert_eq!(v["composition"], "1,3,2,1");
}

#[test]
fn header_declares_the_api_and_parses_as_c() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/wlab.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build.rs");
    for f in [
        "wlab_section_new",
        "wlab_section_free",
        "wlab_section_support_get",
        "wlab_section_saturation_dim",
        "wlab_section_verdict",
        "wlab_section_report_json",
        "wlab_render",
        "wlab_string_free",
        "wlab_status_message",
    ] {
        assert!(text.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(text.contains("typedef struct WlabSection WlabSection;"));
    let status = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c11"])
        .arg(&header)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
}
