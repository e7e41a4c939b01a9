//! Compiles and runs a C program against the generated header and the
//! static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "wopn.h"

int main(void) {
    size_t us[] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    size_t vs[] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 0};
    uint64_t ws[] = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
    WopnNetwork *net = NULL;
    WopnDistance *dist = NULL;
    WopnDiagram *diag = NULL;
    if (wopn_network_from_edges(12, us, vs, ws, 12, &net) != WOPN_STATUS_OK) return 1;
    if (wopn_distance_compute(net, WOPN_METHOD_SUPD, 0, false, &dist) != WOPN_STATUS_OK) return 2;
    if (wopn_diagram_compute(dist, &diag) != WOPN_STATUS_OK) return 3;
    double life = 0.0;
    if (wopn_diagram_max_lifetime(diag, 1, &life) != WOPN_STATUS_OK) return 4;
    /* A 12-cycle's loop is born at 1 and dies at 4. */
    if (fabs(life - 3.0) > 1e-12) return 5;
    if (wopn_signal_simulate("nope", WOPN_STATE_PERIODIC, NULL) != WOPN_STATUS_NULL_POINTER) return 6;
    WopnSignal *sig = NULL;
    if (wopn_signal_simulate("nope", WOPN_STATE_PERIODIC, &sig) != WOPN_STATUS_NOT_FOUND) return 7;
    printf("%s %s\n", wopn_version(), wopn_last_error());
    wopn_diagram_free(diag);
    wopn_distance_free(dist);
    wopn_network_free(net);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests live in <target>/<profile>/deps/
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = target_dir().join("libwopn_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(env!("CARGO_PKG_VERSION")));
    assert!(text.contains("unknown system `nope`"));
}
