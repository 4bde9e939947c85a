use std::ffi::{CStr, CString};
use std::mem::MaybeUninit;
use std::ptr;

use toric_extremal_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(te_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn solve(n: usize, a: f64, b: f64) -> (TeStatus, Option<TeCoefficients>) {
    let mut out = MaybeUninit::uninit();
    let status = unsafe { te_solve_coefficients(n, a, b, out.as_mut_ptr()) };
    (
        status,
        (status == TeStatus::Ok).then(|| unsafe { out.assume_init() }),
    )
}

#[test]
fn solve_plane() {
    let (status, c) = solve(2, 0.5, 1.0);
    assert_eq!(status, TeStatus::Ok);
    let c = c.unwrap();
    assert_eq!(c.n, 2);
    assert_eq!(c.p, 24.0);
    assert!((c.slope - 96.0 / 13.0).abs() < 1e-12);
    assert!((c.intercept - 12.0 / 13.0).abs() < 1e-12);
    assert!((c.linear - 1.0 / 13.0).abs() < 1e-12);
    assert!((c.constant - 2.0 / 13.0).abs() < 1e-12);

    let mut closed = MaybeUninit::uninit();
    assert_eq!(
        unsafe { te_closed_form_coefficients(2, 0.5, 1.0, closed.as_mut_ptr()) },
        TeStatus::Ok
    );
    let closed = unsafe { closed.assume_init() };
    assert!((closed.slope - c.slope).abs() < 1e-12);
}

#[test]
fn invalid_input_sets_message() {
    let (status, _) = solve(2, 1.0, 0.5);
    assert_eq!(status, TeStatus::InvalidParameters);
    assert!(last_error().contains("0 < a < b"), "{}", last_error());
    let name = unsafe { CStr::from_ptr(te_status_name(status)) };
    assert_eq!(name.to_str().unwrap(), "invalid-parameters");
}

#[test]
fn null_out_pointers_are_rejected() {
    assert_eq!(
        unsafe { te_solve_coefficients(2, 0.5, 1.0, ptr::null_mut()) },
        TeStatus::NullPointer
    );
    assert_eq!(
        unsafe { te_metric_new(2, 0.5, 1.0, ptr::null_mut()) },
        TeStatus::NullPointer
    );
    let mut v = 0.0;
    assert_eq!(
        unsafe { te_metric_f_second(ptr::null(), 0.7, &mut v) },
        TeStatus::NullPointer
    );
    unsafe { te_metric_free(ptr::null_mut()) };
    unsafe { te_string_free(ptr::null_mut()) };
}

#[test]
fn metric_handle_round_trip() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { te_metric_new(2, 0.5, 1.0, &mut m) }, TeStatus::Ok);
    assert!(!m.is_null());

    let mut c = MaybeUninit::uninit();
    assert_eq!(
        unsafe { te_metric_coefficients(m, c.as_mut_ptr()) },
        TeStatus::Ok
    );
    let c = unsafe { c.assume_init() };

    let mut v = f64::NAN;
    assert_eq!(unsafe { te_metric_h_second(m, 0.75, &mut v) }, TeStatus::Ok);
    assert!((v - (0.5 / 2.375 - 1.0 / 0.75)).abs() < 1e-12);
    assert_eq!(unsafe { te_metric_f_second(m, 0.75, &mut v) }, TeStatus::Ok);
    assert!((v - 6.8771930).abs() < 1e-7);
    assert_eq!(
        unsafe { te_metric_f_second(m, 0.5, &mut v) },
        TeStatus::Pole
    );
    assert_eq!(
        unsafe { te_metric_h_second(m, 0.5, &mut v) },
        TeStatus::DomainViolation
    );

    assert_eq!(
        unsafe { te_metric_radial_curvature(m, 0.6, &mut v) },
        TeStatus::Ok
    );
    assert!((v - (c.slope * 0.6 + c.intercept)).abs() < 1e-9);

    let x = [0.3, 0.35];
    assert_eq!(
        unsafe { te_metric_abreu_curvature(m, x.as_ptr(), 2, 0.0, &mut v) },
        TeStatus::Ok
    );
    assert!((v - (c.slope * 0.65 + c.intercept)).abs() < 1e-5 * v.abs());
    assert_eq!(
        unsafe { te_metric_abreu_curvature(m, x.as_ptr(), 1, 0.0, &mut v) },
        TeStatus::InvalidParameters
    );

    unsafe { te_metric_free(m) };
}

#[test]
fn verify_json_matches_cli() {
    let mut json = ptr::null_mut();
    assert_eq!(
        unsafe { te_verify_json(2, 0.5, 1.0, 20, 7, &mut json) },
        TeStatus::Ok
    );
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { te_string_free(json) };
    let cli = toric_extremal::cli::run_cli(["toric-extremal", "verify", "--points", "20"]);
    assert_eq!(text, cli.stdout);
    assert!(text.contains("\"passed\": true"));

    let mut json = ptr::null_mut();
    assert_eq!(
        unsafe { te_verify_json(2, 0.5, 1.0, 1, 7, &mut json) },
        TeStatus::InvalidParameters
    );
    assert!(json.is_null());
}

#[test]
fn bridge_presets() {
    let (mut rel, mut supported) = (f64::NAN, false);
    for (name, expect) in [("flat", true), ("fubini-study", true), ("extremal", false)] {
        let c = CString::new(name).unwrap();
        assert_eq!(
            unsafe { te_bridge_check(c.as_ptr(), 2, 5, &mut rel, &mut supported) },
            TeStatus::Ok
        );
        assert_eq!(supported, expect);
        if expect {
            assert!(rel <= 1e-5, "{name}: {rel}");
        } else {
            assert!(rel.is_nan());
        }
    }
    let c = CString::new("sphere").unwrap();
    assert_eq!(
        unsafe { te_bridge_check(c.as_ptr(), 2, 5, &mut rel, &mut supported) },
        TeStatus::InvalidParameters
    );
}
