use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use walklab_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = wl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn group_and_graph_handles() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(wl_group_new(cstr("symmetric(3)").as_ptr(), &mut g), WlStatus::Ok);
        let mut order = 0;
        assert_eq!(wl_group_order(g, &mut order), WlStatus::Ok);
        assert_eq!(order, 6);
        wl_group_free(g);

        let mut x = ptr::null_mut();
        assert_eq!(wl_graph_new(cstr("complete_power(cyclic(2),2)").as_ptr(), &mut x), WlStatus::Ok);
        let (mut n, mut lambda) = (0, 0.0);
        assert_eq!(wl_graph_vertex_count(x, &mut n), WlStatus::Ok);
        assert_eq!(wl_graph_lambda(x, &mut lambda), WlStatus::Ok);
        assert_eq!(n, 4);
        assert!((lambda - 1.0 / 3.0).abs() < 1e-15);
        wl_graph_free(x);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(wl_group_new(cstr("bogus(3)").as_ptr(), &mut g), WlStatus::Config);
        assert!(last_error().contains("bogus"));
        assert!(g.is_null());
        assert_eq!(wl_group_new(ptr::null(), &mut g), WlStatus::NullPointer);
        assert_eq!(wl_group_new(cstr("cyclic(2)").as_ptr(), ptr::null_mut()), WlStatus::NullPointer);
        assert_eq!(wl_group_order(ptr::null(), &mut 0), WlStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(wl_group_new(bad.as_ptr().cast(), &mut g), WlStatus::InvalidUtf8);
        let mut x = ptr::null_mut();
        assert_eq!(wl_graph_new(cstr("complete_power(cyclic(2),40)").as_ptr(), &mut x), WlStatus::TooLarge);
        // Success clears the message.
        assert_eq!(wl_group_new(cstr("cyclic(2)").as_ptr(), &mut g), WlStatus::Ok);
        assert!(wl_last_error_message().is_null());
        wl_group_free(g);
        wl_group_free(ptr::null_mut());
        wl_string_free(ptr::null_mut());
    }
}

#[test]
fn bias_json_round_trip() {
    let cfg = cstr(
        r#"{"group":"cyclic(2)","graph":{"kind":"complete_power","r":2},
            "functions":[{"kind":"constant","value":0.5}],"n":8}"#,
    );
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(wl_bias_json(cfg.as_ptr(), &mut out), WlStatus::Ok);
        let json: serde_json::Value = serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
        wl_string_free(out);
        assert_eq!(json["records"][0]["mode"], "exact");
        assert_eq!(json["records"][0]["bias_re"].as_f64(), Some(0.0));
        let mut out = ptr::null_mut();
        assert_eq!(wl_bias_json(cstr(r#"{"group":"cyclic(2)","x":1}"#).as_ptr(), &mut out), WlStatus::Config);
        assert!(out.is_null());
    }
}

#[test]
fn verify_single_claim() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(wl_verify(cstr("T12").as_ptr(), 0, 1.0, &mut r), WlStatus::Ok);
        let (mut total, mut failed) = (0, 1);
        assert_eq!(wl_report_counts(r, &mut total, ptr::null_mut(), &mut failed, ptr::null_mut()), WlStatus::Ok);
        assert!(total > 0);
        assert_eq!(failed, 0);
        let mut pass = 0;
        assert_eq!(wl_report_all_pass(r, &mut pass), WlStatus::Ok);
        assert_eq!(pass, 1);
        let mut json = ptr::null_mut();
        assert_eq!(wl_report_json(r, &mut json), WlStatus::Ok);
        assert!(CStr::from_ptr(json).to_str().unwrap().contains("\"claim_id\": \"T12\""));
        wl_string_free(json);
        wl_report_free(r);

        assert_eq!(wl_verify(cstr("T99").as_ptr(), 0, 1.0, &mut r), WlStatus::Config);
        assert_eq!(wl_verify(ptr::null(), 0, -1.0, &mut r), WlStatus::Config);
    }
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(wl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> String {
    std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/walklab.h")).unwrap()
}

#[test]
fn header_declares_every_export() {
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let h = header();
    let mut count = 0;
    for line in src.lines() {
        let Some(rest) = line.split("extern \"C\" fn ").nth(1) else { continue };
        let name = rest.split('(').next().unwrap();
        assert!(h.contains(&format!("{name}(")), "{name} missing from header");
        count += 1;
    }
    assert!(count >= 15);
    for ty in ["WlGroup", "WlGraph", "WlReport", "WL_STATUS_OK", "WL_STATUS_PANIC"] {
        assert!(h.contains(ty), "{ty} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else { return };
    if !cc.status.success() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let main = dir.path().join("main.c");
    std::fs::write(
        &main,
        "#include \"walklab.h\"\nint main(void) { WlGroup *g = 0; return wl_group_new(\"cyclic(2)\", &g) == WL_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", concat!(env!("CARGO_MANIFEST_DIR"), "/include")])
        .arg(&main)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
