//! Raw propagation runs and snapshot comparison.

use std::fs;
use std::path::Path;

use super::{finish, Report};
use crate::diagnostics::{front_track, l2_error};
use crate::error::{Error, Result};
use crate::io::{read_snapshot, write_csv, write_snapshot, CsvMeta, ExperimentConfig};
use crate::kernel::Lagrangian;
use crate::propagator::{run, Propagator, RunOptions};

/// Keys: physical parameters, `initial`, `W`, `steps`, `stride`, `backend`,
/// `trim` (0 disables), `front_threshold`.
pub fn cmd_propagate(cfg: &mut ExperimentConfig, out: &Path) -> Result<Report> {
    let p = cfg.physical_params()?;
    let data = cfg.initial_data("gaussian 1 0 8.5")?;
    let w: usize = cfg.get_or("W", 64)?;
    let steps: usize = cfg.get_or("steps", 10)?;
    let stride: usize = cfg.get_or("stride", 1)?;
    let backend = cfg.backend()?;
    let trim: f64 = cfg.get_or("trim", 0.0)?;
    let threshold: f64 = cfg.get_or("front_threshold", 1e-6)?;
    let dx = p.cone_step() / w as f64;
    let prop = Propagator::new(&Lagrangian::Relativistic, p, dx)?;
    let psi0 = data.sample(dx)?;
    let opts = RunOptions {
        backend,
        stride,
        trim: (trim > 0.0).then_some(trim),
        blowup: 10.0,
    };
    let traj = run(&prop, &psi0, &data.support(), steps, opts, None)?;

    fs::create_dir_all(out)?;
    let meta = CsvMeta {
        xi: Some(p.xi()),
        eps: (p.omega > 0.0).then(|| p.eps()),
        w: Some(w),
    };
    for (i, s) in traj.snapshots.iter().enumerate() {
        write_snapshot(&out.join(format!("snapshot_{i:05}.csv")), &meta, s)?;
    }
    let norms: Vec<Vec<f64>> = traj
        .norm_history
        .iter()
        .enumerate()
        .map(|(k, n)| vec![k as f64, k as f64 * p.dt, *n])
        .collect();
    write_csv(&out.join("norms.csv"), &meta, &["step", "t", "norm"], &norms)?;
    let mut support_rows = Vec::new();
    for (k, s) in traj.support_history.iter().enumerate() {
        for (j, iv) in s.intervals().iter().enumerate() {
            support_rows.push(vec![k as f64, k as f64 * p.dt, j as f64, iv.lo, iv.hi]);
        }
    }
    write_csv(
        &out.join("support.csv"),
        &meta,
        &["step", "t", "index", "lo", "hi"],
        &support_rows,
    )?;
    let fronts = front_track(&traj, threshold)?;
    let f_rows: Vec<Vec<f64>> = fronts.iter().map(|f| vec![f.t, f.left, f.right]).collect();
    write_csv(&out.join("fronts.csv"), &meta, &["t", "left", "right"], &f_rows)?;

    let mut report = Report::new("propagate");
    let n0 = traj.norm_history[0];
    let n1 = *traj.norm_history.last().expect("non-empty");
    report.line(format!(
        "xi = {:.4}, W = {w}, dx = {dx:e}, {steps} steps on the {backend} backend",
        p.xi()
    ));
    report.line(format!("norm {n0:.12} -> {n1:.12} (drift {:.2e})", n1 / n0 - 1.0));
    report.line(format!("{} snapshots written", traj.snapshots.len()));
    finish(
        out,
        cfg,
        &report,
        &[
            ("xi".into(), p.xi().to_string()),
            ("W".into(), w.to_string()),
            ("norm_initial".into(), n0.to_string()),
            ("norm_final".into(), n1.to_string()),
        ],
    )?;
    Ok(report)
}

/// Relative `L²` difference of snapshot `b` against snapshot `a`, with an
/// optional acceptance threshold.
pub fn cmd_compare(a: &Path, b: &Path, tol: Option<f64>) -> Result<Report> {
    let wa = read_snapshot(a)?;
    let wb = read_snapshot(b)?;
    let e = l2_error(&wb, &wa, None).map_err(|e| match e {
        Error::Comparison(m) => Error::Comparison(format!("{} vs {}: {m}", a.display(), b.display())),
        other => other,
    })?;
    let mut report = Report::new("compare");
    report.line(format!("relative L2 difference = {e:.6e}"));
    if let Some(t) = tol {
        report.check("difference within tolerance", e <= t, format!("{e:.3e} <= {t:e}"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn propagate_then_compare() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::parse("c = 10\ndt = 0.1\nW = 16\nsteps = 3\nstride = 3\n").unwrap();
        let r = cmd_propagate(&mut cfg, dir.path()).unwrap();
        assert!(r.passed());
        let s0 = dir.path().join("snapshot_00000.csv");
        let s1 = dir.path().join("snapshot_00001.csv");
        assert!(s1.exists() && !dir.path().join("snapshot_00002.csv").exists());
        let same = cmd_compare(&s1, &s1, Some(0.0)).unwrap();
        assert!(same.passed());
        let diff = cmd_compare(&s0, &s1, Some(1e-12)).unwrap();
        assert!(!diff.passed());
        let resolved = fs::read_to_string(dir.path().join("config.resolved")).unwrap();
        assert!(resolved.contains("backend = fft"));
    }

    #[test]
    fn same_config_gives_identical_bytes() {
        let run = || {
            let dir = tempfile::tempdir().unwrap();
            let mut cfg = ExperimentConfig::parse("c = 10\ndt = 0.1\nW = 16\nsteps = 2\n").unwrap();
            cmd_propagate(&mut cfg, dir.path()).unwrap();
            fs::read(dir.path().join("snapshot_00002.csv")).unwrap()
        };
        assert_eq!(run(), run());
    }
}
