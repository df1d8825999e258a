//! The `lightcone` binary: artifacts, overrides and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lightcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lightcone"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn propagate_writes_artifacts_and_compare_gates_on_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small run\nc = 10\ndt = 0.1\nW = 16\ninitial = box -1 1\n").unwrap();
    let o = lightcone(&[
        "propagate",
        "--config",
        path(&cfg),
        "--out",
        path(&out),
        "--steps",
        "4",
        "--set",
        "stride=2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "snapshot_00000.csv",
        "snapshot_00002.csv",
        "norms.csv",
        "support.csv",
        "fronts.csv",
        "manifest.txt",
    ] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let resolved = fs::read_to_string(out.join("config.resolved")).unwrap();
    assert!(
        resolved.contains("steps = 4") && resolved.contains("stride = 2"),
        "{resolved}"
    );
    let snap = fs::read_to_string(out.join("snapshot_00001.csv")).unwrap();
    assert!(snap.starts_with("# xi=") && snap.contains("W=16"), "{}", &snap[..80]);

    let a = out.join("snapshot_00000.csv");
    let b = out.join("snapshot_00002.csv");
    assert_eq!(
        lightcone(&["compare", path(&a), path(&a), "--tol", "0"]).status.code(),
        Some(0)
    );
    assert_eq!(
        lightcone(&["compare", path(&a), path(&b), "--tol", "1e-12"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    assert_eq!(
        lightcone(&["propagate", "--out", path(&out), "--set", "c=-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        lightcone(&["propagate", "--out", path(&out), "--set", "nonsense"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        lightcone(&["coeff", "--out", path(&out), "--xi-min", "5", "--xi-max", "1"])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("nope.cfg");
    assert_eq!(
        lightcone(&["bench", "--config", path(&missing), "--out", path(&out)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(lightcone(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn coefficient_window_passes_and_bench_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = lightcone(&["coeff", "--out", path(&out), "--samples", "41"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("ok   Im C near 1/2"));
    let csv = fs::read_to_string(out.join("coefficients.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "xi,re_I0,im_I0,re_I2,im_I2,re_C,im_C");

    let b = dir.path().join("b");
    let o = lightcone(&[
        "bench",
        "--out",
        path(&b),
        "--sizes",
        "512",
        "--widths",
        "16",
        "--seed",
        "11",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let manifest = fs::read_to_string(b.join("manifest.txt")).unwrap();
    assert!(
        manifest.contains("seed") && manifest.contains("11") && manifest.contains("ChaCha8"),
        "{manifest}"
    );
}
