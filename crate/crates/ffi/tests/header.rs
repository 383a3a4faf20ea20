use std::path::{Path, PathBuf};
use std::process::Command;

fn lib_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

const SMOKE: &str = r#"
#include <stdio.h>
#include <string.h>
#include "magnus_sim.h"

int main(void) {
    MsHamiltonian *h = NULL;
    if (ms_hamiltonian_pauli_cosine(&h) != MS_STATUS_OK) return 1;
    double re[4], im[4];
    if (ms_evolve_magnus2(h, 1.0, 4, 4, re, im, 4) != MS_STATUS_OK) return 2;
    ms_hamiltonian_free(h);
    MsCostQuery q = {1.0, 10.0, 0.5, 0.01, 2.0, 1.0, 2};
    MsResourceEstimate e;
    if (ms_plan_resources(&q, &e) != MS_STATUS_OK || e.n_steps != 5.0) return 3;
    q.epsilon = 3.0;
    if (ms_plan_resources(&q, &e) != MS_STATUS_INVALID_ARGUMENT) return 4;
    char msg[256];
    if (ms_last_error_message(msg, sizeof msg, NULL) != MS_STATUS_OK) return 5;
    printf("%s|%s\n", ms_version(), msg);
    return 0;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    let ffi = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = ffi.join("include").join("magnus_sim.h");
    assert!(header.exists(), "header not generated");
    let lib = lib_dir();
    if !lib.join("libmagnus_sim_ffi.so").exists() {
        panic!("shared library missing from {}", lib.display());
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, SMOKE).unwrap();
    let exe = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg(format!("-I{}", header.parent().unwrap().display()))
        .arg(format!("-L{}", lib.display()))
        .arg(format!("-Wl,-rpath,{}", lib.display()))
        .arg("-lmagnus_sim_ffi")
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    let text = String::from_utf8(out.stdout).unwrap();
    let (version, message) = text.trim().split_once('|').unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
    assert!(message.contains("epsilon"));
}
