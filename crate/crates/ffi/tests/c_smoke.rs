//! Compiles and runs a small C program against the generated header and the
//! cdylib, proving the surface is usable from C, not just from Rust.

use std::path::PathBuf;
use std::process::Command;

const C_SOURCE: &str = r#"
#include "axmots.h"
#include <stdio.h>
#include <math.h>

int main(void) {
    AxmotsNariaiPoint pt;
    if (axmots_nariai_point(0.25, 1.0, 0, &pt) != AXMOTS_OK) return 1;
    if (fabs(pt.area - 3.2949) > 1e-3) return 2;
    if (fabs(pt.bound - 3.3273) > 1e-3) return 3;
    if (axmots_nariai_point(0.9, 1.0, 0, &pt) != AXMOTS_ERR_DOMAIN) return 4;

    AxmotsProblem *p = NULL;
    if (axmots_problem_round(1.0, 96, 2, &p) != AXMOTS_OK) return 5;
    AxmotsEigSummary s;
    if (axmots_problem_solve(p, &s) != AXMOTS_OK) return 6;
    if (fabs(s.lambda1) > 1e-6) return 7;
    double theta[96], u[96];
    if (axmots_problem_eigenfunction(p, theta, u, 96) != AXMOTS_OK) return 8;
    for (int i = 0; i < 96; i++) if (u[i] <= 0.0) return 9;
    axmots_problem_free(p);
    printf("c smoke ok\n");
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include_dir = manifest.join("include");
    // target/debug from the test binary location target/debug/deps/...
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    let so = lib_dir.join("libaxmots_ffi.so");
    if !so.exists() {
        // test binaries link the rlib; produce the cdylib explicitly
        let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
        let status = Command::new(cargo)
            .args(["build", "-p", "axmots-ffi"])
            .current_dir(manifest.parent().unwrap().parent().unwrap())
            .status()
            .expect("cargo build");
        assert!(status.success(), "building the cdylib failed");
    }
    assert!(so.exists(), "cdylib not found at {}", so.display());

    let work = tempdir();
    let src = work.join("smoke.c");
    let bin = work.join("smoke");
    std::fs::write(&src, C_SOURCE).unwrap();

    let compile = Command::new("cc")
        .arg(&src)
        .arg("-o")
        .arg(&bin)
        .arg(format!("-I{}", include_dir.display()))
        .arg(format!("-L{}", lib_dir.display()))
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .arg("-laxmots_ffi")
        .arg("-lm")
        .output()
        .expect("cc invocation");
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&bin).output().expect("run smoke");
    assert!(
        run.status.success(),
        "smoke exited {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    assert!(String::from_utf8_lossy(&run.stdout).contains("c smoke ok"));
    std::fs::remove_dir_all(&work).ok();
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("axmots-c-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
