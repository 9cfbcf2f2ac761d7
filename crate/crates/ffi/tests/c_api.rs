use std::ffi::CStr;
use std::ptr;

use hexcover_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(hexcov_last_error()) }.to_string_lossy().into_owned()
}

struct Handles {
    params: *mut HexcovParams,
    env: *mut HexcovEnvironment,
}

impl Handles {
    fn square(side: f64) -> Self {
        let mut params = ptr::null_mut();
        let mut env = ptr::null_mut();
        unsafe {
            assert_eq!(hexcov_params_soil_survey(&mut params), HexcovStatus::Ok);
            assert_eq!(hexcov_environment_rect(side, side, &mut env), HexcovStatus::Ok);
        }
        Handles { params, env }
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            hexcov_params_free(self.params);
            hexcov_environment_free(self.env);
        }
    }
}

#[test]
fn radii_match_closed_forms() {
    let h = Handles::square(10.0);
    let (mut r_max, mut r_min, mut floor) = (0.0, 0.0, 0.0);
    let sigma_sq = 12.87_f64 * 12.87;
    let l = 8.33_f64;
    let noise = 0.0361_f64;
    let delta = 0.2 * sigma_sq;
    unsafe {
        assert_eq!(hexcov_r_max(h.params, &mut r_max), HexcovStatus::Ok);
        assert_eq!(hexcov_r_min(h.params, delta, &mut r_min), HexcovStatus::Ok);
        assert_eq!(hexcov_noise_floor(h.params, &mut floor), HexcovStatus::Ok);
    }
    assert!((r_max - 6f64.sqrt() * l).abs() < 1e-12);
    assert!((floor - sigma_sq * noise / (sigma_sq + noise)).abs() < 1e-12);
    // single-sample error sigma^2 - k(r)^2 / (sigma^2 + noise) equals delta at r_min
    let k = sigma_sq * (-r_min * r_min / (2.0 * l * l)).exp();
    assert!((sigma_sq - k * k / (sigma_sq + noise) - delta).abs() < 1e-8 * sigma_sq);
}

#[test]
fn estimation_error_with_no_samples_is_prior() {
    let h = Handles::square(10.0);
    let mut e = 0.0;
    unsafe {
        assert_eq!(hexcov_estimation_error(h.params, 1.0, 2.0, ptr::null(), 0, &mut e), HexcovStatus::Ok);
    }
    assert!((e - 12.87_f64 * 12.87).abs() < 1e-9);
    let xy = [1.0, 2.0];
    let mut near = 0.0;
    unsafe {
        assert_eq!(hexcov_estimation_error(h.params, 1.0, 2.0, xy.as_ptr(), 1, &mut near), HexcovStatus::Ok);
    }
    assert!(near < 0.04);
}

#[test]
fn hex_cover_tour_plan_is_usable() {
    let h = Handles::square(60.0);
    let delta = 0.2 * 12.87 * 12.87;
    let mut plan = ptr::null_mut();
    unsafe {
        assert_eq!(hexcov_hex_cover_tour(h.env, h.params, delta, &mut plan), HexcovStatus::Ok);
        let n = hexcov_plan_sample_count(plan);
        assert!(n > 1);

        let mut feasible = false;
        let mut worst = f64::NAN;
        assert_eq!(hexcov_plan_feasibility(plan, &mut feasible, &mut worst), HexcovStatus::Ok);
        assert!(feasible);
        assert!(worst <= delta);

        let mut pts = Vec::with_capacity(n);
        for i in 0..n {
            let (mut x, mut y) = (f64::NAN, f64::NAN);
            let mut origin = HexcovOrigin::Repair;
            assert_eq!(hexcov_plan_sample(plan, i, &mut x, &mut y, &mut origin), HexcovStatus::Ok);
            assert!((0.0..=60.0).contains(&x) && (0.0..=60.0).contains(&y));
            pts.push((x, y));
        }
        let (mut x, mut y) = (0.0, 0.0);
        assert_eq!(hexcov_plan_sample(plan, n, &mut x, &mut y, ptr::null_mut()), HexcovStatus::OutOfRange);

        let mut order = vec![usize::MAX; n];
        assert_eq!(hexcov_plan_tour_order(plan, order.as_mut_ptr(), n - 1), HexcovStatus::OutOfRange);
        assert_eq!(hexcov_plan_tour_order(plan, order.as_mut_ptr(), n), HexcovStatus::Ok);
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..n).collect::<Vec<_>>());

        let (mut len, mut raw) = (0.0, 0.0);
        assert_eq!(hexcov_plan_tour_length(plan, &mut len, &mut raw), HexcovStatus::Ok);
        let walked: f64 = (0..n)
            .map(|i| {
                let a = pts[order[i]];
                let b = pts[order[(i + 1) % n]];
                ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
            })
            .sum();
        assert!((walked - len).abs() < 1e-9 * len.max(1.0));
        assert!(len <= raw + 1e-9);
        hexcov_plan_free(plan);
    }
}

#[test]
fn plan_without_tour_reports_no_tour() {
    let h = Handles::square(30.0);
    let mut plan = ptr::null_mut();
    unsafe {
        assert_eq!(hexcov_disk_cover(h.env, h.params, 0.3 * 12.87 * 12.87, &mut plan), HexcovStatus::Ok);
        let mut len = 0.0;
        assert_eq!(hexcov_plan_tour_length(plan, &mut len, ptr::null_mut()), HexcovStatus::NoTour);
        assert!(last_error().contains("tour"));
        hexcov_plan_free(plan);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let h = Handles::square(10.0);
    let mut plan = ptr::null_mut();
    let mut out = 0.0;
    unsafe {
        assert_eq!(hexcov_hex_cover(h.env, h.params, 1e-6, &mut plan), HexcovStatus::InfeasibleTolerance);
        assert!(plan.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(hexcov_r_max(ptr::null(), &mut out), HexcovStatus::NullPointer);
        assert!(last_error().contains("params"));
        assert_eq!(hexcov_r_max(h.params, ptr::null_mut()), HexcovStatus::NullPointer);

        let mut p = ptr::null_mut();
        assert_eq!(hexcov_params_new(-1.0, 1.0, 0.0, &mut p), HexcovStatus::InvalidArgument);
        assert!(p.is_null());

        let mut env = ptr::null_mut();
        assert_eq!(hexcov_environment_rect(0.0, 5.0, &mut env), HexcovStatus::InvalidArgument);
        let concave = [0.0, 0.0, 4.0, 0.0, 1.0, 1.0, 0.0, 4.0];
        assert_eq!(hexcov_environment_polygon(concave.as_ptr(), 4, &mut env), HexcovStatus::InvalidArgument);
        assert!(env.is_null());

        assert_eq!(hexcov_plan_sample_count(ptr::null()), 0);
        hexcov_plan_free(ptr::null_mut());
    }
}

#[test]
fn polygon_area_and_counterexample() {
    let tri = [0.0, 0.0, 0.0, 3.0, 4.0, 0.0];
    let mut env = ptr::null_mut();
    let mut area = 0.0;
    let mut ce = HexcovCounterexample {
        rhs_bound: 0.0,
        r_used: 0.0,
        delta: 0.0,
        error_value: 0.0,
        contradiction: false,
    };
    unsafe {
        assert_eq!(hexcov_environment_polygon(tri.as_ptr(), 3, &mut env), HexcovStatus::Ok);
        assert_eq!(hexcov_environment_area(env, &mut area), HexcovStatus::Ok);
        hexcov_environment_free(env);
        assert_eq!(hexcov_counterexample(&mut ce), HexcovStatus::Ok);
    }
    assert!((area - 6.0).abs() < 1e-12);
    assert!(ce.contradiction);
    assert!(ce.error_value < ce.delta);
    assert!((ce.error_value - 0.443771).abs() < 1e-5);
    assert!((ce.r_used - ce.rhs_bound - 0.1).abs() < 1e-12);
}

#[test]
fn generated_header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hexcover.h")).unwrap();
    assert!(header.starts_with("#ifndef HEXCOVER_H"));
    for name in [
        "hexcov_last_error",
        "hexcov_params_new",
        "hexcov_params_soil_survey",
        "hexcov_params_free",
        "hexcov_r_max",
        "hexcov_r_min",
        "hexcov_noise_floor",
        "hexcov_estimation_error",
        "hexcov_environment_rect",
        "hexcov_environment_polygon",
        "hexcov_environment_free",
        "hexcov_environment_area",
        "hexcov_hex_cover",
        "hexcov_hex_cover_tour",
        "hexcov_disk_cover",
        "hexcov_disk_cover_tour",
        "hexcov_plan_free",
        "hexcov_plan_sample_count",
        "hexcov_plan_sample",
        "hexcov_plan_feasibility",
        "hexcov_plan_tour_length",
        "hexcov_plan_tour_order",
        "hexcov_counterexample",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct HexcovPlan HexcovPlan;"));
    assert!(header.contains("HEXCOV_STATUS_INFEASIBLE_TOLERANCE = 3"));
}

#[test]
fn header_compiles_as_c() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"hexcover.h\"\n\
         int main(void) {\n\
           HexcovParams *p = NULL;\n\
           HexcovStatus s = hexcov_params_soil_survey(&p);\n\
           hexcov_params_free(p);\n\
           return s == HEXCOV_STATUS_OK ? 0 : 1;\n\
         }\n",
    )
    .unwrap();
    let status = std::process::Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
        .expect("C compiler available");
    assert!(status.success());
}
