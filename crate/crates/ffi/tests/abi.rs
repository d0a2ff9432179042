use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::Path;
use std::process::Command;
use std::ptr;

use motpave::cli::{Report, ReportBody};
use motpave_ffi::*;

const SPLIT: &str = r#"{"dim": 1, "mu": [{"point": ["0"], "mass": "1"}],
  "nu": [{"point": ["-1"], "mass": "1/2"}, {"point": ["1"], "mass": "1/2"}], "seed": 3}"#;

const GOLDEN: &str = r#"{"dim": 2,
  "mu": [{"point": ["0", "0"], "mass": "1/2"}, {"point": ["1", "0"], "mass": "1/2"}],
  "nu": [{"point": ["0", "0"], "mass": "1/2"}, {"point": ["0", "-1"], "mass": "1/8"},
         {"point": ["0", "1"], "mass": "1/8"}, {"point": ["2", "0"], "mass": "1/4"}],
  "cost": [["0", "0", "0", "inf"], ["0", "0", "0", "0"]]}"#;

fn load(json: &str) -> *mut MotpaveInstance {
    let c = CString::new(json).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { motpave_instance_from_json(c.as_ptr(), &mut h) }, MotpaveStatus::Ok);
    assert!(!h.is_null());
    h
}

fn take(s: *mut c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { motpave_string_free(s) };
    out
}

fn last_error() -> String {
    let p = motpave_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn shape_and_order() {
    let h = load(SPLIT);
    let (mut n, mut m, mut d) = (0, 0, 0);
    assert_eq!(unsafe { motpave_instance_shape(h, &mut n, &mut m, &mut d) }, MotpaveStatus::Ok);
    assert_eq!((n, m, d), (1, 2, 1));
    let mut holds = false;
    assert_eq!(unsafe { motpave_check_order(h, &mut holds) }, MotpaveStatus::Ok);
    assert!(holds);
    unsafe { motpave_instance_free(h) };
}

#[test]
fn reversed_pair_reports_order_failure() {
    let h = load(r#"{"dim": 1, "mu": [{"point": ["-1"], "mass": "1/2"}, {"point": ["1"], "mass": "1/2"}],
        "nu": [{"point": ["0"], "mass": "1"}]}"#);
    let mut holds = true;
    assert_eq!(unsafe { motpave_check_order(h, &mut holds) }, MotpaveStatus::Ok);
    assert!(!holds);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { motpave_paving_json(h, &mut out) }, MotpaveStatus::NotInConvexOrder);
    assert!(out.is_null());
    assert!(last_error().contains("convex order"));
    unsafe { motpave_instance_free(h) };
}

#[test]
fn malformed_input() {
    let bad = CString::new(r#"{"dim": 1, "mu": [{"point": ["0"], "mass": "1/3"}], "nu": []}"#).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { motpave_instance_from_json(bad.as_ptr(), &mut h) }, MotpaveStatus::InvalidInstance);
    assert!(h.is_null());
    let junk = CString::new("not json").unwrap();
    assert_eq!(unsafe { motpave_instance_from_json(junk.as_ptr(), &mut h) }, MotpaveStatus::Parse);
    assert_eq!(unsafe { motpave_instance_from_json(ptr::null(), &mut h) }, MotpaveStatus::NullPointer);
    let mut holds = false;
    assert_eq!(unsafe { motpave_check_order(ptr::null(), &mut holds) }, MotpaveStatus::NullPointer);
}

#[test]
fn polar_pair_and_paving() {
    let h = load(GOLDEN);
    let mut polar = false;
    assert_eq!(unsafe { motpave_pair_is_polar(h, 0, 3, &mut polar) }, MotpaveStatus::Ok);
    assert!(polar);
    assert_eq!(unsafe { motpave_pair_is_polar(h, 1, 0, &mut polar) }, MotpaveStatus::Ok);
    assert!(!polar);
    assert_eq!(unsafe { motpave_pair_is_polar(h, 2, 0, &mut polar) }, MotpaveStatus::OutOfRange);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { motpave_paving_json(h, &mut out) }, MotpaveStatus::Ok);
    let report = Report::from_json(&take(out)).unwrap();
    let ReportBody::Paving(p) = report.result else { panic!("wrong report kind") };
    assert_eq!(p.components.len(), 2);
    unsafe { motpave_instance_free(h) };
}

#[test]
fn dual_values_with_polar_infinite_cost() {
    let h = load(GOLDEN);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { motpave_dual_json(h, ptr::null(), MotpaveDualMode::Both, &mut out) }, MotpaveStatus::Ok);
    let ReportBody::Dual(d) = Report::from_json(&take(out)).unwrap().result else { panic!("wrong report kind") };
    assert_eq!(d.primal.value.unwrap().exact, "0");
    assert!(d.pointwise.unwrap().infinite);
    assert_eq!(d.quasisure.unwrap().value.unwrap().exact, "0");
    unsafe { motpave_instance_free(h) };
}

#[test]
fn vertices_need_a_seed() {
    let h = load(GOLDEN);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { motpave_coupling_json(h, 16, -1, &mut out) }, MotpaveStatus::MissingSeed);
    assert_eq!(unsafe { motpave_coupling_json(h, 16, 5, &mut out) }, MotpaveStatus::Ok);
    let ReportBody::Coupling(c) = Report::from_json(&take(out)).unwrap().result else { panic!("wrong report kind") };
    assert_eq!(c.couplings.len(), 2);
    unsafe { motpave_instance_free(h) };
}

#[test]
fn golden_report_is_deterministic() {
    let run = || {
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { motpave_example_json(&mut out) }, MotpaveStatus::Ok);
        take(out)
    };
    let a = run();
    assert_eq!(a, run());
    assert!(a.contains("\"all_ok\": true"));
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(motpave_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/motpave.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["motpave_instance_from_json", "motpave_last_error", "MOTPAVE_STATUS_OK", "MotpaveInstance"] {
        assert!(text.contains(sym), "header lacks {sym}");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(&src, "#include \"motpave.h\"\nint main(void) { return motpave_version() == 0; }\n").unwrap();
    let Ok(status) = Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
    else {
        eprintln!("no C compiler, skipping syntax check");
        return;
    };
    assert!(status.success());
}
