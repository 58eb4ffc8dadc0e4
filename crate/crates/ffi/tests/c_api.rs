use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use frit_ffi::*;

fn last_error() -> String {
    let p = frit_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn make(kind: &str, params: &str) -> *mut FritField {
    let kind = CString::new(kind).unwrap();
    let params = CString::new(params).unwrap();
    let mut f = ptr::null_mut();
    let s = unsafe { frit_field_make(2, 16.0, 32, kind.as_ptr(), params.as_ptr(), &mut f) };
    assert_eq!(s, FritStatus::Ok);
    f
}

#[test]
fn field_round_trip() {
    let vals: Vec<f64> = (0..64).map(|i| i as f64 - 20.0).collect();
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(frit_field_new(1, 4.0, 64, vals.as_ptr(), &mut f), FritStatus::Ok);
        assert_eq!(frit_field_len(f), 64);
        assert_eq!(std::slice::from_raw_parts(frit_field_values(f), 64), &vals[..]);
        let mut sup = 0.0;
        assert_eq!(frit_lq_norm(f, f64::INFINITY, &mut sup), FritStatus::Ok);
        assert_eq!(sup, 43.0);
        let mut m = 0.0;
        assert_eq!(frit_distribution_measure(f, 40.5, &mut m), FritStatus::Ok);
        assert!((m - 3.0 * 4.0 / 64.0).abs() < 1e-15);
        frit_field_free(f);
    }
}

#[test]
fn routes_agree_through_the_abi() {
    let f = make("gaussian_bump", "{}");
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(frit_apply_spectral(f, 1, 0.5, 8, &mut a), FritStatus::Ok);
        assert_eq!(frit_apply_direct(f, 1, 0.5, FritPart::Full, &mut b), FritStatus::Ok);
        let n = frit_field_len(a);
        let (x, y) = (
            std::slice::from_raw_parts(frit_field_values(a), n),
            std::slice::from_raw_parts(frit_field_values(b), n),
        );
        let err = x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let scale = x.iter().map(|p| p * p).sum::<f64>().sqrt();
        assert!(err / scale < 0.1, "{}", err / scale);
        frit_field_free(a);
        frit_field_free(b);
        frit_field_free(f);
    }
}

#[test]
fn decomposition_parts_sum_to_field() {
    let f = make("multi_bump", r#"{"count": 3, "seed": 2}"#);
    unsafe {
        let n = frit_field_len(f);
        let vals = std::slice::from_raw_parts(frit_field_values(f), n);
        let t = 0.3 * vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut cz = ptr::null_mut();
        assert_eq!(frit_czd_decompose(f, t, &mut cz), FritStatus::Ok);
        assert!(frit_czd_num_cubes(cz) > 0);
        let (mut g, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(frit_czd_good(cz, &mut g), FritStatus::Ok);
        assert_eq!(frit_czd_bad(cz, &mut b), FritStatus::Ok);
        let gv = std::slice::from_raw_parts(frit_field_values(g), n);
        let bv = std::slice::from_raw_parts(frit_field_values(b), n);
        for i in 0..n {
            assert!((gv[i] + bv[i] - vals[i]).abs() <= 1e-15 * t.max(1.0) * 8.0);
        }
        frit_field_free(g);
        frit_field_free(b);
        frit_czd_free(cz);
        frit_field_free(f);
    }
}

#[test]
fn constants_and_symbol() {
    let mut g = 0.0;
    let mut m = [0.0; 2];
    unsafe {
        assert_eq!(frit_gamma_beta(2, 0.0, &mut g), FritStatus::Ok);
        // pi Gamma(1/2) / Gamma(3/2)
        assert!((g - 2.0 * std::f64::consts::PI).abs() < 1e-13, "{g}");
        let y = [0.3, 0.0];
        assert_eq!(frit_multiplier_symbol(2, 1, 0.0, y.as_ptr(), m.as_mut_ptr()), FritStatus::Ok);
    }
    assert!(m[0].abs() < 1e-15 && (m[1] - g).abs() < 1e-13, "{m:?}");
}

#[test]
fn errors_carry_status_and_message() {
    let mut out = ptr::null_mut();
    let mut x = 0.0;
    unsafe {
        assert_eq!(frit_field_new(4, 1.0, 8, [0.0].as_ptr(), &mut out), FritStatus::InvalidArgument);
        assert!(last_error().contains("dimension"));
        assert_eq!(frit_lq_norm(ptr::null(), 2.0, &mut x), FritStatus::NullPointer);
        assert_eq!(frit_gamma_beta(2, 5.0, &mut x), FritStatus::InvalidArgument);
        let f = make("gaussian_bump", "{}");
        assert_eq!(frit_apply_direct(f, 1, 0.0, FritPart::Near, &mut out), FritStatus::Unsupported);
        assert_eq!(frit_czd_decompose(f, 1e-9, &mut out.cast()), FritStatus::InvalidArgument);
        let bad = CString::new("{not json").unwrap();
        let kind = CString::new("gaussian_bump").unwrap();
        assert_eq!(frit_field_make(2, 1.0, 8, kind.as_ptr(), bad.as_ptr(), &mut out), FritStatus::InvalidArgument);
        frit_field_free(f);
        frit_field_free(ptr::null_mut());
        frit_czd_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_and_links_from_c() {
    let Ok(cc) = which_cc() else { return };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = deps.parent().unwrap().join("libfrit_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(cc)
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .ok_or(())
}
