//! C ABI for the hexcover planning library.
//!
//! Objects are opaque handles created by `hexcov_*_new`-style functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`HexcovStatus`]; on failure a description is available from
//! [`hexcov_last_error`] on the same thread. Points cross the boundary as
//! interleaved `x0, y0, x1, y1, ...` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hexcover::field_model::{compute_r_max, compute_r_min, estimation_error, noise_floor};
use hexcover::planners::{
    disk_cover_tour, disk_cover_with, hex_cover_tour, hex_cover_with, plan_report, PlanOptions, PlanReport,
};
use hexcover::verification::counterexample_check;
use hexcover::{Environment, Error, FieldParams, Kernel, Origin, Point2};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HexcovStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InfeasibleTolerance = 3,
    SingularSystem = 4,
    OutOfRange = 5,
    NoTour = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HexcovOrigin {
    Tiling = 0,
    Projected = 1,
    Repair = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexcovCounterexample {
    pub rhs_bound: f64,
    pub r_used: f64,
    pub delta: f64,
    pub error_value: f64,
    pub contradiction: bool,
}

/// Field hyperparameters.
pub struct HexcovParams(FieldParams);

/// A convex planning region.
pub struct HexcovEnvironment(Environment);

/// A measurement plan with its verification result and optional tour.
pub struct HexcovPlan(PlanReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HexcovStatus {
    match e {
        Error::InfeasibleTolerance { .. } => HexcovStatus::InfeasibleTolerance,
        Error::SingularSystem(_) => HexcovStatus::SingularSystem,
        Error::Domain(_) | Error::InvalidEnvironment(_) | Error::Config(_) | Error::SizeLimit { .. } => {
            HexcovStatus::InvalidArgument
        }
        Error::Verification(_) | Error::Io(_) => HexcovStatus::Internal,
    }
}

/// Runs `f`, turning errors and panics into a status plus a stored message.
fn guard<F: FnOnce() -> Result<(), (HexcovStatus, String)>>(f: F) -> HexcovStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HexcovStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            HexcovStatus::Internal
        }
    }
}

fn lib<T>(r: hexcover::Result<T>) -> Result<T, (HexcovStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (HexcovStatus, String) {
    (HexcovStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (HexcovStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), (HexcovStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn read_points(xy: *const f64, n: usize) -> Result<Vec<Point2>, (HexcovStatus, String)> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if xy.is_null() {
        return Err(null("point array"));
    }
    let flat = std::slice::from_raw_parts(xy, 2 * n);
    Ok(flat.chunks_exact(2).map(|c| Point2::new(c[0], c[1])).collect())
}

/// Message for the last failed call on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hexcov_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_params_new(
    sigma0_sq: f64,
    length_scale: f64,
    noise_var: f64,
    out: *mut *mut HexcovParams,
) -> HexcovStatus {
    guard(|| {
        let p = lib(FieldParams::new(sigma0_sq, length_scale, noise_var))?;
        write_out(out, Box::into_raw(Box::new(HexcovParams(p))), "out")
    })
}

/// Parameters of the soil-survey field: sigma0 = 12.87, L = 8.33 m,
/// noise variance 0.0361.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_params_soil_survey(out: *mut *mut HexcovParams) -> HexcovStatus {
    guard(|| write_out(out, Box::into_raw(Box::new(HexcovParams(FieldParams::soil_survey()))), "out"))
}

/// # Safety
/// `params` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hexcov_params_free(params: *mut HexcovParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// # Safety
/// `params` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_r_max(params: *const HexcovParams, out: *mut f64) -> HexcovStatus {
    guard(|| {
        let p = deref(params, "params")?;
        write_out(out, compute_r_max(&p.0), "out")
    })
}

/// # Safety
/// `params` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_r_min(params: *const HexcovParams, delta: f64, out: *mut f64) -> HexcovStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let r = lib(compute_r_min(&p.0, delta))?;
        write_out(out, r, "out")
    })
}

/// # Safety
/// `params` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_noise_floor(params: *const HexcovParams, out: *mut f64) -> HexcovStatus {
    guard(|| {
        let p = deref(params, "params")?;
        write_out(out, noise_floor(&p.0), "out")
    })
}

/// Kriging estimation error at `(x, y)` from `n` samples, exact kernel.
///
/// # Safety
/// `xy` must hold `2 * n` doubles (may be null when `n == 0`); `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_estimation_error(
    params: *const HexcovParams,
    x: f64,
    y: f64,
    xy: *const f64,
    n: usize,
    out: *mut f64,
) -> HexcovStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let samples = read_points(xy, n)?;
        let e = lib(estimation_error(Point2::new(x, y), &samples, &p.0, Kernel::Exact))?;
        write_out(out, e, "out")
    })
}

/// Axis-aligned `width x height` rectangle with its lower-left corner at the origin.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_environment_rect(
    width: f64,
    height: f64,
    out: *mut *mut HexcovEnvironment,
) -> HexcovStatus {
    guard(|| {
        let env = lib(Environment::rect(width, height))?;
        write_out(out, Box::into_raw(Box::new(HexcovEnvironment(env))), "out")
    })
}

/// Convex polygon from `n` vertices in either orientation.
///
/// # Safety
/// `xy` must hold `2 * n` doubles; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_environment_polygon(
    xy: *const f64,
    n: usize,
    out: *mut *mut HexcovEnvironment,
) -> HexcovStatus {
    guard(|| {
        let v = read_points(xy, n)?;
        let env = lib(Environment::polygon(v))?;
        write_out(out, Box::into_raw(Box::new(HexcovEnvironment(env))), "out")
    })
}

/// # Safety
/// `env` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hexcov_environment_free(env: *mut HexcovEnvironment) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// # Safety
/// `env` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_environment_area(env: *const HexcovEnvironment, out: *mut f64) -> HexcovStatus {
    guard(|| {
        let e = deref(env, "environment")?;
        write_out(out, e.0.area(), "out")
    })
}

#[derive(Clone, Copy)]
enum Planner {
    Hex,
    HexTour,
    Disk,
    DiskTour,
}

unsafe fn plan(
    planner: Planner,
    env: *const HexcovEnvironment,
    params: *const HexcovParams,
    delta: f64,
    out: *mut *mut HexcovPlan,
) -> HexcovStatus {
    guard(|| {
        let e = &deref(env, "environment")?.0;
        let p = &deref(params, "params")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = PlanOptions::default();
        let report = lib(match planner {
            Planner::Hex => hex_cover_with(e, p, delta, &opts).and_then(|s| plan_report(e, p, delta, s, &opts, false)),
            Planner::Disk => {
                disk_cover_with(e, p, delta, &opts).and_then(|s| plan_report(e, p, delta, s, &opts, false))
            }
            Planner::HexTour => hex_cover_tour(e, p, delta),
            Planner::DiskTour => disk_cover_tour(e, p, delta),
        })?;
        write_out(out, Box::into_raw(Box::new(HexcovPlan(report))), "out")
    })
}

/// Hexagonal measurement placement for tolerance `delta`.
///
/// # Safety
/// Handles must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_hex_cover(
    env: *const HexcovEnvironment,
    params: *const HexcovParams,
    delta: f64,
    out: *mut *mut HexcovPlan,
) -> HexcovStatus {
    plan(Planner::Hex, env, params, delta, out)
}

/// Hexagonal placement plus a Christofides tour improved by 2-opt.
///
/// # Safety
/// Handles must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_hex_cover_tour(
    env: *const HexcovEnvironment,
    params: *const HexcovParams,
    delta: f64,
    out: *mut *mut HexcovPlan,
) -> HexcovStatus {
    plan(Planner::HexTour, env, params, delta, out)
}

/// Two-level disk baseline placement.
///
/// # Safety
/// Handles must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_disk_cover(
    env: *const HexcovEnvironment,
    params: *const HexcovParams,
    delta: f64,
    out: *mut *mut HexcovPlan,
) -> HexcovStatus {
    plan(Planner::Disk, env, params, delta, out)
}

/// Disk baseline placement plus a tour.
///
/// # Safety
/// Handles must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_disk_cover_tour(
    env: *const HexcovEnvironment,
    params: *const HexcovParams,
    delta: f64,
    out: *mut *mut HexcovPlan,
) -> HexcovStatus {
    plan(Planner::DiskTour, env, params, delta, out)
}

/// # Safety
/// `plan` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hexcov_plan_free(plan: *mut HexcovPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `plan` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hexcov_plan_sample_count(plan: *const HexcovPlan) -> usize {
    plan.as_ref().map_or(0, |p| p.0.samples.len())
}

/// Coordinates and origin of sample `i`. `origin` may be null.
///
/// # Safety
/// `plan` must be a live handle; `x` and `y` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_plan_sample(
    plan: *const HexcovPlan,
    i: usize,
    x: *mut f64,
    y: *mut f64,
    origin: *mut HexcovOrigin,
) -> HexcovStatus {
    guard(|| {
        let s = &deref(plan, "plan")?.0.samples;
        let p = *s
            .points
            .get(i)
            .ok_or_else(|| (HexcovStatus::OutOfRange, format!("sample {i} of {}", s.len())))?;
        write_out(x, p.x, "x")?;
        write_out(y, p.y, "y")?;
        if !origin.is_null() {
            origin.write(match s.origins[i] {
                Origin::Tiling => HexcovOrigin::Tiling,
                Origin::Projected => HexcovOrigin::Projected,
                Origin::Repair => HexcovOrigin::Repair,
            });
        }
        Ok(())
    })
}

/// Whether the plan passed the grid check, and its worst error bound.
/// `worst_error` may be null.
///
/// # Safety
/// `plan` must be a live handle; `feasible` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_plan_feasibility(
    plan: *const HexcovPlan,
    feasible: *mut bool,
    worst_error: *mut f64,
) -> HexcovStatus {
    guard(|| {
        let f = &deref(plan, "plan")?.0.feasibility;
        write_out(feasible, f.feasible, "feasible")?;
        if !worst_error.is_null() {
            worst_error.write(f.worst_error);
        }
        Ok(())
    })
}

/// Final tour length and the raw Christofides length (`raw` may be null).
///
/// # Safety
/// `plan` must be a live handle; `length` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_plan_tour_length(
    plan: *const HexcovPlan,
    length: *mut f64,
    raw: *mut f64,
) -> HexcovStatus {
    guard(|| {
        let r = &deref(plan, "plan")?.0;
        let t = r
            .tour
            .as_ref()
            .ok_or_else(|| (HexcovStatus::NoTour, "plan has no tour".to_string()))?;
        write_out(length, t.length, "length")?;
        if !raw.is_null() {
            raw.write(r.raw_tour_length.unwrap_or(t.length));
        }
        Ok(())
    })
}

/// Copies the visiting order (sample indices) into `order`, which must
/// hold at least `capacity` entries. `capacity` smaller than the sample
/// count yields `OutOfRange`.
///
/// # Safety
/// `plan` must be a live handle; `order` valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_plan_tour_order(
    plan: *const HexcovPlan,
    order: *mut usize,
    capacity: usize,
) -> HexcovStatus {
    guard(|| {
        let r = &deref(plan, "plan")?.0;
        let t = r
            .tour
            .as_ref()
            .ok_or_else(|| (HexcovStatus::NoTour, "plan has no tour".to_string()))?;
        if capacity < t.order.len() {
            return Err((
                HexcovStatus::OutOfRange,
                format!("capacity {capacity} below tour size {}", t.order.len()),
            ));
        }
        if order.is_null() {
            return Err(null("order"));
        }
        ptr::copy_nonoverlapping(t.order.as_ptr(), order, t.order.len());
        Ok(())
    })
}

/// The four-sample counterexample on the unit field.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hexcov_counterexample(out: *mut HexcovCounterexample) -> HexcovStatus {
    guard(|| {
        let r = counterexample_check();
        write_out(
            out,
            HexcovCounterexample {
                rhs_bound: r.rhs_bound,
                r_used: r.r_used,
                delta: r.delta,
                error_value: r.error_value,
                contradiction: r.contradiction,
            },
            "out",
        )
    })
}
