use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use owpinv_ffi::*;

fn new_perm(family: OwpFamily, n: u32, seed: u64, param: u64) -> *mut OwpPermutation {
    let mut out = ptr::null_mut();
    let status = unsafe { owp_permutation_new(family, n, seed, param, &mut out) };
    assert_eq!(status, OwpStatus::Ok);
    assert!(!out.is_null());
    out
}

#[test]
fn permutation_round_trip() {
    let perm = new_perm(OwpFamily::Random, 6, 9, 0);
    unsafe {
        assert_eq!(owp_permutation_n(perm), 6);
        for v in 0..64u64 {
            let mut fv = 0;
            let mut back = 0;
            assert_eq!(owp_permutation_apply(perm, v, false, &mut fv), OwpStatus::Ok);
            assert_eq!(owp_permutation_apply(perm, fv, true, &mut back), OwpStatus::Ok);
            assert_eq!(back, v);
        }
        let mut out = 0;
        assert_eq!(owp_permutation_apply(perm, 64, false, &mut out), OwpStatus::InvalidArgument);
        assert!(!owp_last_error().is_null());
        owp_permutation_free(perm);
    }
}

#[test]
fn odd_n_is_rejected_with_message() {
    let mut out = ptr::null_mut();
    let status = unsafe { owp_permutation_new(OwpFamily::Identity, 5, 0, 0, &mut out) };
    assert_eq!(status, OwpStatus::InvalidArgument);
    assert!(out.is_null());
    let msg = unsafe { CStr::from_ptr(owp_last_error()) }.to_string_lossy().into_owned();
    assert!(msg.contains('5'), "{msg}");
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        assert_eq!(
            owp_permutation_new(OwpFamily::Identity, 4, 0, 0, ptr::null_mut()),
            OwpStatus::NullPointer
        );
        let mut report = OwpRunReport::default();
        assert_eq!(owp_run_inv(ptr::null(), 0, 1, &mut report), OwpStatus::NullPointer);
        assert_eq!(owp_permutation_n(ptr::null()), 0);
        owp_permutation_free(ptr::null_mut());
        owp_pseudo_identity_free(ptr::null_mut());
    }
}

#[test]
fn exact_and_pseudo_runs() {
    let perm = new_perm(OwpFamily::XorMask, 8, 0, 0x5a);
    let mut ident = ptr::null_mut();
    let mut noisy = ptr::null_mut();
    unsafe {
        assert_eq!(
            owp_pseudo_identity_new(8, 1, 0.0, 0.0, OwpAngleMode::WorstCase, OwpBadMode::FullRotation, 1, &mut ident),
            OwpStatus::Ok
        );
        assert_eq!(
            owp_pseudo_identity_new(8, 1, 0.0, 4.0 / 256.0, OwpAngleMode::WorstCase, OwpBadMode::FullRotation, 1, &mut noisy),
            OwpStatus::Ok
        );
        for x in [0u64, 17, 255] {
            let mut exact = OwpRunReport::default();
            let mut pseudo = OwpRunReport::default();
            assert_eq!(owp_run_inv(perm, x, 1, &mut exact), OwpStatus::Ok);
            assert_eq!(owp_run_av_inv(perm, ident, x, &mut pseudo), OwpStatus::Ok);
            assert_eq!(exact.target, x ^ 0x5a);
            assert!(exact.success_prob >= 1.0 - 1e-9);
            assert_eq!(exact.first_failing_stage, -1);
            assert!((exact.success_prob - pseudo.success_prob).abs() <= 1e-9);
        }
        let mut report = OwpRunReport::default();
        assert_eq!(owp_run_av_inv(perm, noisy, 3, &mut report), OwpStatus::Ok);
        assert!(report.v2_norm > 0.0);

        let small = new_perm(OwpFamily::Identity, 4, 0, 0);
        assert_eq!(owp_run_av_inv(small, noisy, 0, &mut report), OwpStatus::InvalidArgument);
        owp_permutation_free(small);
        owp_pseudo_identity_free(ident);
        owp_pseudo_identity_free(noisy);
        owp_permutation_free(perm);
    }
}

#[test]
fn files_load_through_the_c_surface() {
    let dir = tempfile::tempdir().unwrap();
    let perm_path = dir.path().join("perm.txt");
    std::fs::write(&perm_path, "n=2\n3\n2\n1\n0\n").unwrap();
    let op_path = dir.path().join("j.txt");
    std::fs::write(&op_path, "2 1 0.0 0.25 worst-case 0\n1\n").unwrap();
    let perm_c = CString::new(perm_path.to_str().unwrap()).unwrap();
    let op_c = CString::new(op_path.to_str().unwrap()).unwrap();
    let missing = CString::new(dir.path().join("none.txt").to_str().unwrap()).unwrap();
    unsafe {
        let mut perm = ptr::null_mut();
        let mut op = ptr::null_mut();
        assert_eq!(owp_permutation_from_file(perm_c.as_ptr(), &mut perm), OwpStatus::Ok);
        assert_eq!(owp_pseudo_identity_from_file(op_c.as_ptr(), &mut op), OwpStatus::Ok);
        let mut out = 0;
        assert_eq!(owp_permutation_apply(perm, 1, false, &mut out), OwpStatus::Ok);
        assert_eq!(out, 2);
        let mut report = OwpRunReport::default();
        assert_eq!(owp_run_av_inv(perm, op, 0, &mut report), OwpStatus::Ok);
        assert!(report.success_prob < 1.0);
        let mut again = ptr::null_mut();
        assert_eq!(owp_permutation_from_file(missing.as_ptr(), &mut again), OwpStatus::Io);
        assert_eq!(owp_permutation_from_file(op_c.as_ptr(), &mut again), OwpStatus::Parse);
        owp_pseudo_identity_free(op);
        owp_permutation_free(perm);
    }
}

#[test]
fn params_and_contradiction() {
    let mut p = OwpParams::default();
    assert_eq!(unsafe { owp_params(1.0, 4, &mut p) }, OwpStatus::Ok);
    assert_eq!(p.p, 1024.0);
    assert!((p.q - 2.0).abs() < 1e-12);
    assert!((p.claim31_count - 16.0).abs() < 1e-9);
    assert_eq!(unsafe { owp_params(0.5, 4, &mut p) }, OwpStatus::InvalidArgument);
    assert!(owp_contradiction_check(3.0));
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/owpinv.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["owp_permutation_new", "owp_run_av_inv", "owp_last_error", "OWP_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler; skipped syntax check");
        return;
    };
    assert!(status.success());
}
