//! Coefficient curves `C(ξ)` and their large-`ξ` window statistics.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use super::{finish, Report};
use crate::error::{Error, Result};
use crate::io::{svg_line_plot, write_csv, CsvMeta, Series};
use crate::kernel::{coefficient_curve, CoefficientSample, Lagrangian};

/// `n` equally spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Means of `C` over a window and the oscillation envelope
/// `max |C − i/2|` in each quarter of it.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowStats {
    pub mean_re: f64,
    pub mean_im: f64,
    pub envelope: [f64; 4],
}

pub fn coefficient_window(samples: &[CoefficientSample]) -> Result<WindowStats> {
    let ok: Vec<&CoefficientSample> = samples.iter().filter(|s| !s.singular).collect();
    if ok.len() < 4 {
        return Err(Error::Data("need at least four regular samples".into()));
    }
    let n = ok.len() as f64;
    let mean_re = ok.iter().map(|s| s.c.re).sum::<f64>() / n;
    let mean_im = ok.iter().map(|s| s.c.im).sum::<f64>() / n;
    let mut envelope = [0.0; 4];
    let q = ok.len().div_ceil(4);
    for (i, s) in ok.iter().enumerate() {
        let d = (s.c - Complex64::new(0.0, 0.5)).norm();
        let e = &mut envelope[(i / q).min(3)];
        *e = f64::max(*e, d);
    }
    Ok(WindowStats {
        mean_re,
        mean_im,
        envelope,
    })
}

/// Lower window edge from which [`cmd_coeff`] checks the `i/2` limit.
pub const LIMIT_REGIME: f64 = 100.0;

/// Table `xi, re_I0, im_I0, re_I2, im_I2, re_C, im_C`, a plot of `C`, and
/// the window statistics.
pub fn cmd_coeff(xi_min: f64, xi_max: f64, samples: usize, out: &Path) -> Result<Report> {
    if !(xi_min >= 0.0 && xi_min < xi_max && samples >= 2) {
        return Err(Error::Parameter(format!(
            "need 0 <= xi_min < xi_max and samples >= 2, got ({xi_min}, {xi_max}, {samples})"
        )));
    }
    let curve = coefficient_curve(&Lagrangian::Relativistic, &linspace(xi_min, xi_max, samples))?;
    fs::create_dir_all(out)?;
    let rows: Vec<Vec<f64>> = curve
        .iter()
        .map(|s| vec![s.xi, s.i0.re, s.i0.im, s.i2.re, s.i2.im, s.c.re, s.c.im])
        .collect();
    write_csv(
        &out.join("coefficients.csv"),
        &CsvMeta::none(),
        &["xi", "re_I0", "im_I0", "re_I2", "im_I2", "re_C", "im_C"],
        &rows,
    )?;
    let re = curve.iter().map(|s| (s.xi, s.c.re)).collect();
    let im = curve.iter().map(|s| (s.xi, s.c.im)).collect();
    fs::write(
        out.join("coefficients.svg"),
        svg_line_plot(
            "coefficient of (hbar/m) psi_xx",
            "xi",
            "C(xi)",
            &[Series::new("Re C", re), Series::new("Im C", im)],
        ),
    )?;
    let mut report = Report::new("coeff");
    report.line(format!("{samples} samples on [{xi_min}, {xi_max}]"));
    let singular = curve.iter().filter(|s| s.singular).count();
    if singular > 0 {
        report.line(format!("{singular} samples with vanishing I0 (C undefined)"));
    }
    if let Ok(w) = coefficient_window(&curve) {
        report.line(format!("mean Re C = {:.5}, mean Im C = {:.5}", w.mean_re, w.mean_im));
        report.line(format!(
            "max |C - i/2| per quarter: {:.4} {:.4} {:.4} {:.4}",
            w.envelope[0], w.envelope[1], w.envelope[2], w.envelope[3]
        ));
        // the limit i/2 is only approached once the phase is large
        if xi_min >= LIMIT_REGIME {
            report.check(
                "Im C near 1/2",
                (0.48..=0.52).contains(&w.mean_im),
                format!("{:.5}", w.mean_im),
            );
            report.check("Re C near 0", w.mean_re.abs() <= 0.02, format!("{:.5}", w.mean_re));
            report.check(
                "envelope decreasing",
                w.envelope.windows(2).all(|e| e[1] < e[0]),
                format!("{:?}", w.envelope),
            );
        }
    }
    let mut cfg = crate::io::ExperimentConfig::new();
    cfg.set("xi_min", xi_min);
    cfg.set("xi_max", xi_max);
    cfg.set("samples", samples);
    finish(out, &cfg, &report, &[])?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
    }

    #[test]
    fn small_xi_curve_is_near_linear() {
        let dir = tempfile::tempdir().unwrap();
        cmd_coeff(0.0, 0.5, 11, dir.path()).unwrap();
        let (_, rows) = crate::io::read_csv(&dir.path().join("coefficients.csv")).unwrap();
        assert_eq!(rows.len(), 11);
        for r in &rows[1..] {
            assert!((r[5] - r[0] / 6.0).abs() < 0.05 * r[0], "{r:?}");
        }
        assert!(dir.path().join("manifest.txt").exists());
        assert!(cmd_coeff(1.0, 1.0, 10, dir.path()).is_err());
    }
}
