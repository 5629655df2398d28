use std::ffi::{c_void, CStr, CString};
use std::ptr;

use fixlab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(fx_last_error()) }
        .to_str()
        .unwrap()
        .to_owned()
}

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn unit_space(metric: &str, s: f64) -> *mut FxSpace {
    let mut sp = ptr::null_mut();
    assert_eq!(
        fx_space_new_interval(0.0, 1.0, cstr(metric).as_ptr(), s, &mut sp),
        FxStatus::Ok
    );
    sp
}

fn small() -> FxSampler {
    FxSampler {
        grid_points: 201,
        random_pairs: 5000,
        seed: 0,
    }
}

#[test]
fn certify_builtin_map() {
    unsafe {
        let sp = unit_space("absdiff", 1.0);
        let mut f = ptr::null_mut();
        assert_eq!(
            fx_map_new(cstr("ex31").as_ptr(), ptr::null(), &mut f),
            FxStatus::Ok
        );
        let mut phi = ptr::null_mut();
        assert_eq!(
            fx_phi_new(cstr("linear(0.25)").as_ptr(), &mut phi),
            FxStatus::Ok
        );

        let mut cert = ptr::null_mut();
        let st = fx_certify_m_step(sp, f, phi, 2, small(), fx_tolerance_default(), &mut cert);
        assert_eq!(st, FxStatus::Ok);
        let mut status = FxCertStatus::Refuted;
        assert_eq!(fx_certificate_status(cert, &mut status), FxStatus::Ok);
        assert_eq!(status, FxCertStatus::CertifiedOnSamples);
        assert_eq!(fx_certificate_violations_found(cert), 0);
        assert_eq!(fx_certificate_pairs_tested(cert), 201 * 200 / 2 + 5000);
        fx_certificate_free(cert);

        let mut cert = ptr::null_mut();
        let st = fx_certify_m_step(sp, f, phi, 1, small(), fx_tolerance_default(), &mut cert);
        assert_eq!(st, FxStatus::Ok);
        assert_eq!(fx_certificate_status(cert, &mut status), FxStatus::Ok);
        assert_eq!(status, FxCertStatus::Refuted);
        assert_eq!(fx_certificate_worst_len(cert), 32);
        let mut v = FxViolation {
            x: 0.0,
            y: 0.0,
            lhs: 0.0,
            rhs: 0.0,
            margin: 0.0,
        };
        assert_eq!(fx_certificate_worst(cert, 0, &mut v), FxStatus::Ok);
        assert!(v.x < 0.5 && v.y >= 0.5);
        assert_eq!(v.lhs - v.rhs, v.margin);
        assert_eq!(
            fx_certificate_worst(cert, 32, &mut v),
            FxStatus::InvalidParameter
        );
        assert!(last_error().contains("out of range"));
        fx_certificate_free(cert);

        fx_phi_free(phi);
        fx_map_free(f);
        fx_space_free(sp);
    }
}

#[test]
fn convex_mode_and_phi_helpers() {
    unsafe {
        let mut sp = ptr::null_mut();
        let st = fx_space_new_interval(0.0, 0.5, cstr("absdiff").as_ptr(), 1.0, &mut sp);
        assert_eq!(st, FxStatus::Ok);
        let mut f = ptr::null_mut();
        assert_eq!(fx_map_new(cstr("ex32").as_ptr(), sp, &mut f), FxStatus::Ok);
        let mut cert = ptr::null_mut();
        let grid = FxSampler {
            grid_points: 2001,
            random_pairs: 0,
            seed: 0,
        };
        let st = fx_certify_convex(sp, f, 0.4, 0.5, grid, fx_tolerance_default(), &mut cert);
        assert_eq!(st, FxStatus::Ok);
        let mut status = FxCertStatus::CertifiedOnSamples;
        fx_certificate_status(cert, &mut status);
        assert_eq!(status, FxCertStatus::Refuted);
        fx_certificate_free(cert);

        let st = fx_certify_convex(sp, f, 0.5, 0.5, grid, fx_tolerance_default(), &mut cert);
        assert_eq!(st, FxStatus::InvalidParameter);
        assert!(last_error().contains("a + b < 1"));

        let mut phi = ptr::null_mut();
        assert_eq!(fx_phi_convex(0.3, 0.5, &mut phi), FxStatus::Ok);
        let mut r = 0.0;
        assert_eq!(fx_phi_eval(phi, 1.0, &mut r), FxStatus::Ok);
        assert_eq!(r, 0.8);
        fx_phi_free(phi);
        fx_map_free(f);
        fx_space_free(sp);
    }
}

#[test]
fn picard_and_rate() {
    unsafe {
        let sp = unit_space("absdiff", 1.0);
        let mut f = ptr::null_mut();
        assert_eq!(fx_map_new(cstr("ex31").as_ptr(), sp, &mut f), FxStatus::Ok);
        let mut t = ptr::null_mut();
        assert_eq!(
            fx_picard(sp, f, 1.0, 1e-12, 1_000_000, 1e12, 2, &mut t),
            FxStatus::Ok
        );
        assert!(fx_trace_estimate(t) < 1e-11);
        let mut reason = FxStopReason::Escaped;
        assert_eq!(fx_trace_stop_reason(t, &mut reason), FxStatus::Ok);
        assert_eq!(reason, FxStopReason::StepConverged);
        let mut x1 = 0.0;
        assert_eq!(fx_trace_iterate(t, 1, &mut x1), FxStatus::Ok);
        assert_eq!(x1, 0.2);
        assert!(fx_trace_len(t) > 16);

        let mut rate = FxRate {
            kind: FxRateKind::Inconclusive,
            value: 0.0,
        };
        assert_eq!(fx_estimate_rate(sp, t, 0.0, true, &mut rate), FxStatus::Ok);
        assert_eq!(rate.kind, FxRateKind::Geometric);
        assert!((rate.value - 0.25).abs() < 0.01);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let p = cstr(path.to_str().unwrap());
        assert_eq!(fx_trace_write_csv(t, p.as_ptr()), FxStatus::Ok);
        let csv = std::fs::read_to_string(&path).unwrap();
        assert!(csv.starts_with("n,x,step,residual,window_max\n0,1,0.8,"));
        let bad = cstr(dir.path().join("no/such/dir.csv").to_str().unwrap());
        assert_eq!(fx_trace_write_csv(t, bad.as_ptr()), FxStatus::Io);
        fx_trace_free(t);

        let mut short = ptr::null_mut();
        assert_eq!(
            fx_picard(sp, f, 1.0, 0.0, 3, 1e12, 1, &mut short),
            FxStatus::Ok
        );
        assert_eq!(
            fx_estimate_rate(sp, short, 0.0, false, &mut rate),
            FxStatus::TraceTooShort
        );
        fx_trace_free(short);

        fx_map_free(f);
        fx_space_free(sp);
    }
}

#[test]
fn domain_escape_code() {
    unsafe {
        let sp = unit_space("absdiff", 1.0);
        let mut f = ptr::null_mut();
        assert_eq!(fx_map_new(cstr("x + 1").as_ptr(), sp, &mut f), FxStatus::Ok);
        let mut t = ptr::null_mut();
        assert_eq!(
            fx_picard(sp, f, 0.0, 1e-12, 100, 1e12, 1, &mut t),
            FxStatus::DomainEscape
        );
        assert!(t.is_null());
        assert!(last_error().contains("step 1"));
        fx_map_free(f);
        fx_space_free(sp);
    }
}

#[test]
fn metric_checks() {
    unsafe {
        let s1 = unit_space("powdiff(2)", 1.0);
        let s2 = unit_space("powdiff(2)", 2.0);
        let grid = FxSampler {
            grid_points: 101,
            random_pairs: 0,
            seed: 0,
        };
        let mut passed = true;
        assert_eq!(
            fx_verify_metric(s1, grid, fx_tolerance_default(), &mut passed),
            FxStatus::Ok
        );
        assert!(!passed);
        assert_eq!(
            fx_verify_metric(s2, grid, fx_tolerance_default(), &mut passed),
            FxStatus::Ok
        );
        assert!(passed);
        let mut est = 0.0;
        assert_eq!(fx_min_b_constant(s1, grid, &mut est), FxStatus::Ok);
        assert_eq!(est, 2.0);
        let mut d = 0.0;
        assert_eq!(fx_space_dist(s1, 0.0, 0.5, &mut d), FxStatus::Ok);
        assert_eq!(d, 0.25);
        fx_space_free(s1);
        fx_space_free(s2);

        let pts = [0.0, 1.0, 10.0];
        let mut fin = ptr::null_mut();
        let st = fx_space_new_points(
            pts.as_ptr(),
            pts.len(),
            cstr("absdiff").as_ptr(),
            1.0,
            &mut fin,
        );
        assert_eq!(st, FxStatus::Ok);
        fx_space_free(fin);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut sp = ptr::null_mut();
        let st = fx_space_new_interval(0.0, 1.0, cstr("absdiff").as_ptr(), 0.5, &mut sp);
        assert_eq!(st, FxStatus::InvalidParameter);
        assert!(sp.is_null());
        assert!(!last_error().is_empty());

        let st = fx_space_new_interval(0.0, 1.0, ptr::null(), 1.0, &mut sp);
        assert_eq!(st, FxStatus::NullPointer);

        let bad = [0xffu8, 0];
        let st = fx_space_new_interval(0.0, 1.0, bad.as_ptr().cast(), 1.0, &mut sp);
        assert_eq!(st, FxStatus::InvalidUtf8);

        let mut phi = ptr::null_mut();
        assert_eq!(fx_phi_new(cstr("x +").as_ptr(), &mut phi), FxStatus::Parse);
        assert!(last_error().contains("offset 4"));
        assert_eq!(
            fx_phi_new(cstr("nope").as_ptr(), &mut phi),
            FxStatus::UnknownBuiltin
        );
        assert_eq!(
            fx_phi_new(cstr("linear(1)").as_ptr(), &mut phi),
            FxStatus::InvalidParameter
        );
        assert_eq!(
            fx_phi_new(cstr("linear(0.5)").as_ptr(), ptr::null_mut()),
            FxStatus::NullPointer
        );

        assert_eq!(
            fx_phi_new(cstr("linear(0.5)").as_ptr(), &mut phi),
            FxStatus::Ok
        );
        assert_eq!(last_error(), "");
        let mut r = 0.0;
        assert_eq!(fx_phi_eval(ptr::null(), 1.0, &mut r), FxStatus::NullPointer);
        fx_phi_free(phi);

        let mut cert = ptr::null_mut();
        let st = fx_certify_m_step(
            ptr::null(),
            ptr::null(),
            ptr::null(),
            1,
            fx_sampler_standard(),
            fx_tolerance_default(),
            &mut cert,
        );
        assert_eq!(st, FxStatus::NullPointer);

        fx_space_free(ptr::null_mut());
        fx_map_free(ptr::null_mut());
        fx_trace_free(ptr::null_mut());
        fx_certificate_free(ptr::null_mut());
        assert_eq!(fx_certificate_worst_len(ptr::null()), 0);
        assert!(fx_trace_estimate(ptr::null()).is_nan());
    }
}

extern "C" fn half(user: *mut c_void, x: f64, out: *mut f64) -> i32 {
    let scale = unsafe { *(user as *const f64) };
    if x > 0.9 {
        return 7;
    }
    unsafe { *out = x * scale };
    0
}

#[test]
fn callback_maps() {
    unsafe {
        let sp = unit_space("absdiff", 1.0);
        let mut scale = 0.5f64;
        let user = &mut scale as *mut f64 as *mut c_void;
        let mut f = ptr::null_mut();
        let st = fx_map_from_callback(Some(half), user, 0.0, 1.0, cstr("half").as_ptr(), &mut f);
        assert_eq!(st, FxStatus::Ok);
        let mut v = 0.0;
        assert_eq!(fx_map_eval(f, 0.5, &mut v), FxStatus::Ok);
        assert_eq!(v, 0.25);

        let mut phi = ptr::null_mut();
        fx_phi_new(cstr("linear(0.5)").as_ptr(), &mut phi);
        let mut cert = ptr::null_mut();
        let st = fx_certify_m_step(sp, f, phi, 1, small(), fx_tolerance_default(), &mut cert);
        assert_eq!(st, FxStatus::Eval);
        assert!(
            last_error().contains("callback returned 7"),
            "{}",
            last_error()
        );

        let st = fx_map_from_callback(None, user, 0.0, 1.0, ptr::null(), &mut f);
        assert_eq!(st, FxStatus::NullPointer);
        fx_map_free(f);
        fx_phi_free(phi);
        fx_space_free(sp);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(fx_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
