use std::ffi::{CStr, CString};
use std::ptr;

use robust_dsn_ffi::*;

fn last_error() -> String {
    let p = rdsn_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

const SCENARIO: &str = r#"{"region":{"width":200,"height":200},"m":8,"r_s":30,"theta_s":90,
    "rho_min":5,"rho_max":15,"strategy":"proposed","mode":"nominal","seed":4,"union_samples":0}"#;

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(rdsn_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn scenario_lifecycle() {
    let json = CString::new(SCENARIO).unwrap();
    let mut scenario = ptr::null_mut();
    assert_eq!(unsafe { rdsn_scenario_from_json(json.as_ptr(), &mut scenario) }, RdsnStatus::Ok);
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { rdsn_scenario_run(scenario, 0, &mut run) }, RdsnStatus::Ok);

    let mut total = 0.0;
    let mut count = 0usize;
    unsafe {
        assert_eq!(rdsn_run_result_total_coverage(run, &mut total), RdsnStatus::Ok);
        assert_eq!(rdsn_run_result_sensor_count(run, &mut count), RdsnStatus::Ok);
    }
    assert_eq!(count, 8);
    let mut sum = 0.0;
    for i in 0..count {
        let mut pose = RdsnPose::default();
        assert_eq!(unsafe { rdsn_run_result_sensor_pose(run, i, &mut pose) }, RdsnStatus::Ok);
        assert_eq!(pose.has_vertex, 1);
        assert!((5.0..=15.0).contains(&pose.rho));
        sum += pose.area;
    }
    assert!((sum - total).abs() <= 1e-9 * total.max(1.0));

    let mut pose = RdsnPose::default();
    assert_eq!(unsafe { rdsn_run_result_sensor_pose(run, 99, &mut pose) }, RdsnStatus::InvalidInput);
    assert!(last_error().contains("out of range"));

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { rdsn_run_result_to_json(run, &mut text) }, RdsnStatus::Ok);
    let parsed: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(text) }.to_str().unwrap()).unwrap();
    assert_eq!(parsed["total_coverage"].as_f64().unwrap(), total);
    unsafe {
        rdsn_string_free(text);
        rdsn_run_result_free(run);
        rdsn_scenario_free(scenario);
        rdsn_run_result_free(ptr::null_mut());
        rdsn_scenario_free(ptr::null_mut());
    }
}

#[test]
fn error_codes() {
    let mut scenario = ptr::null_mut();
    assert_eq!(unsafe { rdsn_scenario_from_json(ptr::null(), &mut scenario) }, RdsnStatus::NullPointer);
    assert!(scenario.is_null());
    let bad = CString::new(r#"{"m": 3}"#).unwrap();
    assert_eq!(unsafe { rdsn_scenario_from_json(bad.as_ptr(), &mut scenario) }, RdsnStatus::InvalidInput);
    let zero = CString::new(SCENARIO.replace("\"m\":8", "\"m\":0")).unwrap();
    assert_eq!(unsafe { rdsn_scenario_from_json(zero.as_ptr(), &mut scenario) }, RdsnStatus::InvalidInput);
    assert!(last_error().contains("m must be at least 1"));
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { rdsn_scenario_run(ptr::null(), 0, &mut run) }, RdsnStatus::NullPointer);
}

#[test]
fn rrf_of_symmetric_pair() {
    let xs = [0.0, 10.0];
    let ys = [0.0, 0.0];
    let mut raw = [0.0; 2];
    let mut rho = [0.0; 2];
    let s = unsafe { rdsn_compute_rrf(xs.as_ptr(), ys.as_ptr(), 2, 10.0, 10.0, 0.0, 10.0, 1e-3, raw.as_mut_ptr(), rho.as_mut_ptr()) };
    assert_eq!(s, RdsnStatus::Ok);
    assert!((raw[0] - 5.0).abs() < 1e-3, "{raw:?}");
    assert_eq!(rho, raw);

    let dup = [1.0, 1.0];
    let s = unsafe { rdsn_compute_rrf(dup.as_ptr(), dup.as_ptr(), 2, 10.0, 10.0, 0.0, 10.0, 1e-3, raw.as_mut_ptr(), rho.as_mut_ptr()) };
    assert_eq!(s, RdsnStatus::InvalidInput);
}

#[test]
fn sector_clip_area() {
    let xs = [0.0, 5.0, 5.0, 0.0];
    let ys = [-20.0, -20.0, 20.0, 20.0];
    let mut area = 0.0;
    let s = unsafe {
        rdsn_sector_polygon_area(0.0, 0.0, 0.0, std::f64::consts::FRAC_PI_2, 10.0, xs.as_ptr(), ys.as_ptr(), 4, &mut area)
    };
    assert_eq!(s, RdsnStatus::Ok);
    assert!((area - 25.0).abs() < 1e-9);
    let s = unsafe { rdsn_sector_polygon_area(0.0, 0.0, 0.0, 0.0, 10.0, xs.as_ptr(), ys.as_ptr(), 4, &mut area) };
    assert_eq!(s, RdsnStatus::InvalidInput);
}

#[test]
fn sweep_returns_csv() {
    let spec = format!(
        r#"{{"base":{SCENARIO},"theta_deg":[90,360],"r_s":[30],"m":[8],"rho_bounds":[[5,15]],
            "strategies":["random","proposed"],"modes":["nominal"]}}"#
    )
    .replace("\"seed\":4", "\"seed\":4,\"runs\":2");
    let spec = CString::new(spec).unwrap();
    let mut csv = ptr::null_mut();
    assert_eq!(unsafe { rdsn_sweep_csv(spec.as_ptr(), &mut csv) }, RdsnStatus::Ok);
    let text = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_owned();
    unsafe { rdsn_string_free(csv) };
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta_deg,r_s,m,rho_min,rho_max,strategy,case,runs,mean_coverage,std_coverage");
    assert_eq!(lines.len(), 5);
    // full circle: strategy does not matter
    assert_eq!(lines[3].split(',').nth(8), lines[4].split(',').nth(8));
}
