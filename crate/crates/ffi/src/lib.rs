//! C ABI over `robust_dsn`.
//!
//! Every function returns an [`RdsnStatus`]; results come back through out
//! pointers. Objects are opaque heap handles released with their `_free`
//! function. After a failure, [`rdsn_last_error_message`] describes it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use robust_dsn::geometry::sector_polygon_area;
use robust_dsn::harness::{run_scenario, sweep, to_csv, RunOutput, ScenarioConfig, SweepSpec};
use robust_dsn::rrf::compute_all_rrf;
use robust_dsn::voronoi::build_voronoi;
use robust_dsn::{ConvexPolygon, Deployment, Error, Point2, Region, RrfBounds, Sector};

/// Outcome of an API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdsnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Domain = 3,
    InvalidState = 4,
    Configuration = 5,
    Io = 6,
    Internal = 7,
    Panic = 8,
}

/// Scenario configuration handle.
pub struct RdsnScenario {
    config: ScenarioConfig,
}

/// Result handle of one scenario run.
pub struct RdsnRunResult {
    output: RunOutput,
}

/// Pose of one sensor after a run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RdsnPose {
    pub nominal_x: f64,
    pub nominal_y: f64,
    pub evaluated_x: f64,
    pub evaluated_y: f64,
    pub orientation: f64,
    pub rho: f64,
    pub area: f64,
    /// 1 when the sensor aims at a cell vertex, 0 otherwise.
    pub has_vertex: u8,
    pub vertex_x: f64,
    pub vertex_y: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RdsnStatus {
    match e {
        Error::InvalidInput(_) | Error::DegenerateDirection | Error::Json(_) => RdsnStatus::InvalidInput,
        Error::Domain(_) => RdsnStatus::Domain,
        Error::InvalidState(_) => RdsnStatus::InvalidState,
        Error::Configuration(_) => RdsnStatus::Configuration,
        Error::Io(_) => RdsnStatus::Io,
        Error::Internal(_) => RdsnStatus::Internal,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RdsnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RdsnStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            RdsnStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("panic inside robust_dsn".into());
            RdsnStatus::Panic
        }
    }
}

unsafe fn nonnull<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(Error::InvalidInput(format!("{what} is not valid UTF-8"))))
}

unsafe fn points(xs: *const f64, ys: *const f64, n: usize) -> Result<Vec<Point2>, Failure> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if xs.is_null() || ys.is_null() {
        return Err(Failure::Null("coordinate array"));
    }
    let xs: &[f64] = std::slice::from_raw_parts(xs, n);
    let ys: &[f64] = std::slice::from_raw_parts(ys, n);
    Ok(xs.iter().zip(ys).map(|(&x, &y)| Point2::new(x, y)).collect())
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::Lib(Error::Internal("string contains NUL".into())))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rdsn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rdsn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a scenario from JSON (field names as in the CLI config file,
/// view angle in degrees).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdsn_scenario_from_json(json: *const c_char, out_handle: *mut *mut RdsnScenario) -> RdsnStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        *slot = ptr::null_mut();
        let config = ScenarioConfig::from_json(c_str(json, "json")?)?;
        *slot = Box::into_raw(Box::new(RdsnScenario { config }));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`rdsn_scenario_from_json`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn rdsn_scenario_free(handle: *mut RdsnScenario) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Runs run `run_index` of a scenario.
///
/// # Safety
/// `scenario` must be a live handle; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdsn_scenario_run(
    scenario: *const RdsnScenario,
    run_index: u64,
    out_handle: *mut *mut RdsnRunResult,
) -> RdsnStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        *slot = ptr::null_mut();
        let s = nonnull(scenario, "scenario")?;
        let output = run_scenario(&s.config, run_index)?;
        *slot = Box::into_raw(Box::new(RdsnRunResult { output }));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`rdsn_scenario_run`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn rdsn_run_result_free(handle: *mut RdsnRunResult) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Total coverage of a run.
///
/// # Safety
/// `result` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdsn_run_result_total_coverage(result: *const RdsnRunResult, value: *mut f64) -> RdsnStatus {
    guard(|| {
        let v = out(value, "value")?;
        *v = nonnull(result, "result")?.output.result.total_coverage;
        Ok(())
    })
}

/// Number of sensors in a run.
///
/// # Safety
/// `result` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdsn_run_result_sensor_count(result: *const RdsnRunResult, count: *mut usize) -> RdsnStatus {
    guard(|| {
        let c = out(count, "count")?;
        *c = nonnull(result, "result")?.output.states.len();
        Ok(())
    })
}

/// Pose of sensor `index`.
///
/// # Safety
/// `result` must be a live handle; `pose` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdsn_run_result_sensor_pose(
    result: *const RdsnRunResult,
    index: usize,
    pose: *mut RdsnPose,
) -> RdsnStatus {
    guard(|| {
        let p = out(pose, "pose")?;
        let r = nonnull(result, "result")?;
        let s = r.output.states.get(index).ok_or_else(|| {
            Failure::Lib(Error::InvalidInput(format!(
                "sensor index {index} out of range ({} sensors)",
                r.output.states.len()
            )))
        })?;
        let v = s.chosen_vertex.unwrap_or_default();
        *p = RdsnPose {
            nominal_x: s.nominal.x,
            nominal_y: s.nominal.y,
            evaluated_x: s.evaluated.x,
            evaluated_y: s.evaluated.y,
            orientation: s.orientation,
            rho: s.rho,
            area: s.area,
            has_vertex: u8::from(s.chosen_vertex.is_some()),
            vertex_x: v.x,
            vertex_y: v.y,
        };
        Ok(())
    })
}

/// Metrics of a run as a JSON string; release it with [`rdsn_string_free`].
///
/// # Safety
/// `result` must be a live handle; `json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdsn_run_result_to_json(result: *const RdsnRunResult, json: *mut *mut c_char) -> RdsnStatus {
    guard(|| {
        let slot = out(json, "json")?;
        *slot = ptr::null_mut();
        let r = nonnull(result, "result")?;
        let text = serde_json::to_string(&r.output.result).map_err(Error::from)?;
        *slot = into_c_string(text)?;
        Ok(())
    })
}

/// Runs a sweep described by JSON (`base` scenario plus axis lists) and
/// returns the CSV text; release it with [`rdsn_string_free`].
///
/// # Safety
/// `spec_json` must be a NUL-terminated string; `csv` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdsn_sweep_csv(spec_json: *const c_char, csv: *mut *mut c_char) -> RdsnStatus {
    guard(|| {
        let slot = out(csv, "csv")?;
        *slot = ptr::null_mut();
        let spec: SweepSpec = serde_json::from_str(c_str(spec_json, "spec_json")?).map_err(Error::from)?;
        *slot = into_c_string(to_csv(&sweep(&spec)?))?;
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn rdsn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// RRF of every sensor of an explicit deployment in `[0, width] × [0, height]`.
/// `rho_raw` and `rho` receive `n` values each.
///
/// # Safety
/// `xs`, `ys` must hold `n` values; `rho_raw`, `rho` must have room for `n`.
#[no_mangle]
pub unsafe extern "C" fn rdsn_compute_rrf(
    xs: *const f64,
    ys: *const f64,
    n: usize,
    width: f64,
    height: f64,
    r_min: f64,
    r_max: f64,
    tol: f64,
    rho_raw: *mut f64,
    rho: *mut f64,
) -> RdsnStatus {
    guard(|| {
        let pts = points(xs, ys, n)?;
        if n > 0 && (rho_raw.is_null() || rho.is_null()) {
            return Err(Failure::Null("output array"));
        }
        let deployment = Deployment::new(Region::new(width, height)?, pts)?;
        let diagram = build_voronoi(&deployment)?;
        let bounds = RrfBounds::new(r_min, r_max, tol)?;
        let results = compute_all_rrf(&diagram, &deployment, &bounds)?;
        let raw_out = std::slice::from_raw_parts_mut(rho_raw, n);
        let rho_out = std::slice::from_raw_parts_mut(rho, n);
        for (k, r) in results.iter().enumerate() {
            raw_out[k] = r.rho_raw;
            rho_out[k] = r.rho;
        }
        Ok(())
    })
}

/// Exact area of a sector intersected with the convex polygon given by `n`
/// vertices.
///
/// # Safety
/// `xs`, `ys` must hold `n` values; `area` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdsn_sector_polygon_area(
    apex_x: f64,
    apex_y: f64,
    orientation: f64,
    view_angle: f64,
    radius: f64,
    xs: *const f64,
    ys: *const f64,
    n: usize,
    area: *mut f64,
) -> RdsnStatus {
    guard(|| {
        let a = out(area, "area")?;
        let sector = Sector::new(Point2::new(apex_x, apex_y), orientation, view_angle, radius)?;
        let poly = ConvexPolygon::new(points(xs, ys, n)?)?;
        *a = sector_polygon_area(&sector, &poly);
        Ok(())
    })
}
