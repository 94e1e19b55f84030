use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "robust_dsn.h"

int main(void) {
    double xs[4] = {0.0, 5.0, 5.0, 0.0};
    double ys[4] = {-20.0, -20.0, 20.0, 20.0};
    double area = 0.0;
    RdsnStatus s = rdsn_sector_polygon_area(0.0, 0.0, 0.0, 1.5707963267948966, 10.0, xs, ys, 4, &area);
    if (s != RDSN_STATUS_OK) return 1;
    if (area < 24.999999 || area > 25.000001) return 2;
    RdsnScenario *scenario = NULL;
    if (rdsn_scenario_from_json("{", &scenario) != RDSN_STATUS_INVALID_INPUT) return 3;
    if (rdsn_last_error_message() == NULL) return 4;
    printf("%s\n", rdsn_version());
    return 0;
}
"#;

fn cc() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok().map(|_| cc)
}

/// The generated header compiles and links against the static library.
#[test]
fn c_program_links_against_staticlib() {
    let Some(cc) = cc() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    assert!(include.join("robust_dsn.h").exists());
    // the test binary lives in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("librobust_dsn_ffi.a");
    if !lib.exists() {
        eprintln!("static library not built at {}; skipping link step", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let bin = dir.path().join("main");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), env!("CARGO_PKG_VERSION"));
}
