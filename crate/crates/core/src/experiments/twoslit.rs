//! Two slits: nothing reaches the point between them before the two light
//! cones meet there.

use std::fs;
use std::path::Path;

use super::{finish, Report};
use crate::error::{Error, Result};
use crate::geometry::LightConeGeometry;
use crate::io::{svg_line_plot, write_csv, CsvMeta, ExperimentConfig, Series};
use crate::kernel::Lagrangian;
use crate::params::PhysicalParams;
use crate::propagator::{run_with, Backend, Propagator, RunOptions};
use crate::schrodinger::ConeSolver;
use crate::wave::InitialData;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoSlitResult {
    pub apex_x: f64,
    pub apex_t: f64,
    pub xi: f64,
    pub w: usize,
    /// `(t, |ψ(apex_x, t)|)` from the path integral, one per slice.
    pub path: Vec<(f64, f64)>,
    /// Same from the piecemeal cone solver, one per substep.
    pub cone: Vec<(f64, f64)>,
    /// Times at which the cone solver merged intervals.
    pub merges: Vec<f64>,
    /// `(t, x, |ψ|²)` of the path integral on a coarse space-time lattice.
    pub field: Vec<[f64; 3]>,
}

impl TwoSlitResult {
    /// Largest `|ψ(apex_x, t)|` strictly before the apex time.
    pub fn max_before_apex(series: &[(f64, f64)], apex_t: f64) -> f64 {
        series
            .iter()
            .filter(|(t, _)| *t < apex_t * (1.0 - 1e-12))
            .map(|p| p.1)
            .fold(0.0, f64::max)
    }

    /// Largest `|ψ(apex_x, t)|` for `t ≤ t_by`.
    pub fn max_until(series: &[(f64, f64)], t_by: f64) -> f64 {
        series
            .iter()
            .filter(|(t, _)| *t <= t_by * (1.0 + 1e-12))
            .map(|p| p.1)
            .fold(0.0, f64::max)
    }
}

/// Run both solvers on box data over `slits` to `t_end`. The path integral
/// uses `W` cells per slice; the cone solver uses `cone_dx` with one
/// substep per node of growth.
pub fn two_slit(p: &PhysicalParams, slits: &[(f64, f64)], w: usize, cone_dx: f64, t_end: f64) -> Result<TwoSlitResult> {
    let data = InitialData::Box(slits.to_vec());
    let geo = LightConeGeometry::new(data.support(), p.c)?;
    let tri = *geo
        .triangles
        .first()
        .ok_or_else(|| Error::Parameter("two-slit run needs at least two separated intervals".into()))?;
    let mid = tri.apex_x();

    let dx = p.cone_step() / w as f64;
    let prop = Propagator::new(&Lagrangian::Relativistic, *p, dx)?;
    let psi0 = data.sample(dx)?;
    let n = (t_end / p.dt).round() as usize;
    let mut path = vec![(0.0, psi0.sample(mid).norm())];
    let mut field = Vec::new();
    let every = (n / 40).max(1);
    let (lo, hi) = (geo.hull.lo - p.c * t_end, geo.hull.hi + p.c * t_end);
    let opts = RunOptions {
        backend: Backend::Fft,
        stride: n.max(1),
        trim: None,
        blowup: 10.0,
    };
    run_with(&prop, &psi0, &data.support(), n, opts, None, |step, psi| {
        let k = psi.node_of(mid).expect("midpoint lies on the aligned grid");
        path.push((psi.t, psi.at(k).norm()));
        if step % every == 0 {
            for j in 0..=200 {
                let x = lo + (hi - lo) * j as f64 / 200.0;
                field.push([psi.t, x, psi.sample(x).norm_sqr()]);
            }
        }
    })?;

    let cone_psi0 = data.sample(cone_dx)?;
    let mut solver = ConeSolver::new(&cone_psi0, &data.support(), p, cone_dx / p.c, None)?;
    let k_mid = (mid / cone_dx).round() as i64;
    let mut cone = vec![(0.0, solver.value_at_node(k_mid).norm())];
    while solver.t() + 0.5 * solver.dt_pde() < t_end {
        solver.cone_step()?;
        cone.push((solver.t(), solver.value_at_node(k_mid).norm()));
    }
    Ok(TwoSlitResult {
        apex_x: mid,
        apex_t: tri.apex_t,
        xi: p.xi(),
        w,
        path,
        cone,
        merges: solver.merge_times().to_vec(),
        field,
    })
}

/// Keys: `initial` (slits), `c`, `hbar`, `m`, `dt`, `W`, `cone_dx`, `T`,
/// `zero_tol`, `onset_time`, `onset_level`.
pub fn cmd_twoslit(cfg: &mut ExperimentConfig, out: &Path) -> Result<Report> {
    if cfg.raw("hbar").is_none() {
        cfg.set("hbar", 0.005);
    }
    if cfg.raw("dt").is_none() {
        cfg.set("dt", 0.1);
    }
    let p = cfg.physical_params()?;
    let data = cfg.initial_data("slits -1 0 2 3")?;
    let slits: Vec<(f64, f64)> = match data {
        InitialData::Box(ref v) => v.clone(),
        _ => return Err(Error::Config("two-slit data must be 'slits a b c d'".into())),
    };
    let w: usize = cfg.get_or("W", 64)?;
    // the discrete Laplacian caps group velocities at ħ/(m·dx); a quarter
    // Compton length keeps that cap at 4c
    let cone_dx: f64 = cfg.get_or("cone_dx", p.hbar / (4.0 * p.m * p.c))?;
    let t_end: f64 = cfg.get_or("T", 1.3)?;
    let zero_tol: f64 = cfg.get_or("zero_tol", 1e-13)?;
    let onset_time: f64 = cfg.get_or("onset_time", 1.3)?;
    let onset_level: f64 = cfg.get_or("onset_level", 1e-8)?;

    let mut report = Report::new("twoslit");
    let geo = LightConeGeometry::new(data.support(), p.c)?;
    if geo.triangles.is_empty() {
        report.line("single connected support: no exclusion zone");
        finish(out, cfg, &report, &[])?;
        return Ok(report);
    }
    let r = two_slit(&p, &slits, w, cone_dx, t_end)?;
    report.line(format!(
        "apex at x = {}, t = {}  (xi = {:.3}, W = {w})",
        r.apex_x, r.apex_t, r.xi
    ));
    report.line(format!("cone solver merge times: {:?}", r.merges));
    for (name, series) in [("path integral", &r.path), ("cone solver", &r.cone)] {
        let before = TwoSlitResult::max_before_apex(series, r.apex_t);
        let after = TwoSlitResult::max_until(series, onset_time);
        report.check(
            &format!("{name} zero before apex"),
            before <= zero_tol,
            format!("max |psi| = {before:.3e}"),
        );
        report.check(
            &format!("{name} onset by t={onset_time}"),
            after > onset_level,
            format!("max |psi| = {after:.3e}"),
        );
    }

    fs::create_dir_all(out)?;
    let meta = CsvMeta {
        xi: Some(r.xi),
        eps: None,
        w: Some(w),
    };
    let rows = |s: &[(f64, f64)]| s.iter().map(|&(t, v)| vec![t, v]).collect::<Vec<_>>();
    write_csv(&out.join("midpoint_path.csv"), &meta, &["t", "abs_psi"], &rows(&r.path))?;
    write_csv(&out.join("midpoint_cone.csv"), &meta, &["t", "abs_psi"], &rows(&r.cone))?;
    let field: Vec<Vec<f64>> = r.field.iter().map(|v| v.to_vec()).collect();
    write_csv(&out.join("field.csv"), &meta, &["t", "x", "abs2"], &field)?;
    let log = |s: &[(f64, f64)]| s.iter().map(|&(t, v)| (t, v.max(1e-300).log10())).collect();
    fs::write(
        out.join("midpoint.svg"),
        svg_line_plot(
            "|psi| at the gap midpoint",
            "t",
            "log10 |psi|",
            &[
                Series::new("path integral", log(&r.path)),
                Series::new("cone solver", log(&r.cone)),
            ],
        ),
    )?;
    finish(out, cfg, &report, &[("apex_t".into(), r.apex_t.to_string())])?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apex_scales_with_the_cone_speed() {
        let p = PhysicalParams {
            hbar: 0.008,
            ..PhysicalParams::natural(2.0, 0.05)
        };
        let r = two_slit(&p, &[(-1.0, 0.0), (2.0, 3.0)], 16, 0.02, 0.6).unwrap();
        assert_eq!((r.apex_x, r.apex_t), (1.0, 0.5));
        assert_eq!(TwoSlitResult::max_before_apex(&r.path, r.apex_t), 0.0);
        assert_eq!(TwoSlitResult::max_before_apex(&r.cone, r.apex_t), 0.0);
        assert!(r.merges.iter().all(|&t| (t - 0.5).abs() < 1e-9));
    }

    #[test]
    fn single_slit_has_no_exclusion_zone() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::parse("initial = slits -1 1").unwrap();
        let r = cmd_twoslit(&mut cfg, dir.path()).unwrap();
        assert!(r.checks.is_empty());
        assert!(r.lines[0].contains("no exclusion zone"));
    }
}
