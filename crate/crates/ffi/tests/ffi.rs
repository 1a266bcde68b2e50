use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use bigaction_ffi::*;

struct Owned(*mut BaSession);

impl Drop for Owned {
    fn drop(&mut self) {
        unsafe { ba_session_free(self.0) }
    }
}

fn open(p: u32, s: u32) -> Owned {
    let mut out = ptr::null_mut();
    let st = unsafe { ba_session_new(p, s, 20, 0, ptr::null(), &mut out) };
    assert_eq!(st, BaStatus::Ok);
    assert!(!out.is_null());
    Owned(out)
}

fn last_error() -> String {
    let p = ba_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { ba_string_free(p) };
    s
}

#[test]
fn rejects_even_characteristic() {
    let mut out = ptr::null_mut();
    let st = unsafe { ba_session_new(2, 1, 10, 0, ptr::null(), &mut out) };
    assert_eq!(st, BaStatus::Usage);
    assert!(out.is_null());
    assert!(last_error().contains("odd"));
}

#[test]
fn null_pointers_are_reported() {
    let st = unsafe { ba_session_new(3, 1, 10, 0, ptr::null(), ptr::null_mut()) };
    assert_eq!(st, BaStatus::NullPointer);
    let mut u = BaUniformizer::default();
    assert_eq!(unsafe { ba_uniformizer(ptr::null_mut(), &mut u) }, BaStatus::NullPointer);
    unsafe {
        ba_session_free(ptr::null_mut());
        ba_string_free(ptr::null_mut());
    }
}

#[test]
fn values_at_3_1() {
    let s = open(3, 1);
    let mut u = BaUniformizer::default();
    assert_eq!(unsafe { ba_uniformizer(s.0, &mut u) }, BaStatus::Ok);
    assert_eq!((u.a1, u.a2, u.b1, u.b2), (207, 233, 126, 152));
    assert_eq!(u.residual_valuation, 3402);
    assert_eq!(u.expected_valuation, 3402);

    for (label, m) in [("y2", 38), ("v1'", 254), ("v2'", 281), ("w", 308), ("y1-over-K", 11), ("ree-line", 12)] {
        let c = CString::new(label).unwrap();
        let mut out = 0u64;
        assert_eq!(unsafe { ba_class_conductor(s.0, c.as_ptr(), &mut out) }, BaStatus::Ok);
        assert_eq!(out, m, "{label}");
    }
    let bad = CString::new("z").unwrap();
    let mut out = 0u64;
    assert_eq!(unsafe { ba_class_conductor(s.0, bad.as_ptr(), &mut out) }, BaStatus::Usage);

    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ba_genus(s.0, &mut g) }, BaStatus::Ok);
    assert_eq!(take_string(g), "143210574");

    let mut big = -1;
    assert_eq!(unsafe { ba_big_action(s.0, &mut big) }, BaStatus::Ok);
    assert_eq!(big, 0);
}

#[test]
fn big_action_at_3_2() {
    let s = open(3, 2);
    let mut big = -1;
    assert_eq!(unsafe { ba_big_action(s.0, &mut big) }, BaStatus::Ok);
    assert_eq!(big, 1);
}

#[test]
fn report_json_carries_audit_status() {
    let s = open(3, 1);
    let cmd = CString::new("audit").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ba_report_json(s.0, cmd.as_ptr(), &mut out) }, BaStatus::AuditMismatch);
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(v["status"]["exit_code"], 3);
    assert!(v["audit"].as_array().unwrap().iter().any(|r| r["item"] == "genus_w" && r["status"] == "MISMATCH"));

    let cmd = CString::new("commutators").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ba_report_json(s.0, cmd.as_ptr(), &mut out) }, BaStatus::Ok);
    take_string(out);

    let cmd = CString::new("launch").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ba_report_json(s.0, cmd.as_ptr(), &mut out) }, BaStatus::Usage);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ba_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/bigaction.h")).unwrap();
    for name in [
        "ba_session_new",
        "ba_session_free",
        "ba_uniformizer",
        "ba_class_conductor",
        "ba_genus",
        "ba_big_action",
        "ba_report_json",
        "ba_string_free",
        "ba_last_error",
        "typedef struct BaSession BaSession",
        "BA_STATUS_AUDIT_MISMATCH = 3",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

fn staticlib() -> Option<PathBuf> {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libbigaction_ffi.a");
    lib.exists().then_some(lib)
}

/// Compiles and runs a C program against the header and the static library,
/// when a C compiler and the archive are available.
#[test]
fn c_smoke_test() {
    let Some(lib) = staticlib() else {
        eprintln!("skipping: static library not built");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = std::env::temp_dir().join(format!("bigaction_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "smoke program exited with {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
