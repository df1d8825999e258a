//! The two limits of the time-sliced path integral: `Δt → 0` at fixed `c`
//! (the integral collapses onto the initial data) and `cΔt → 0` with
//! `ξ → ∞` (it approaches the cone-bounded Schrödinger equation).

use std::path::Path;

use super::{finish, Report};
use crate::diagnostics::l2_error;
use crate::error::{Error, Result};
use crate::geometry::{LightConeGeometry, SupportRegion};
use crate::io::{write_csv, CsvMeta, ExperimentConfig};
use crate::kernel::Lagrangian;
use crate::params::{check_regime_with, PhysicalParams, RegimeMargins};
use crate::propagator::{run, Backend, Propagator, RunOptions};
use crate::schrodinger::solve_piecemeal;
use crate::wave::{InitialData, WaveFunction};

/// One rung of either ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderPoint {
    /// `ξ` actually used (after rounding the step count).
    pub xi: f64,
    pub c_dt: f64,
    pub dt: f64,
    pub c: f64,
    pub n_steps: usize,
    pub w: usize,
    pub error: f64,
}

fn gaussian(sigma: f64, cutoff: f64) -> InitialData {
    InitialData::Gaussian {
        sigma,
        center: 0.0,
        cutoff,
    }
}

fn path_integral(p: PhysicalParams, w: usize, data: &InitialData, n: usize, trim: Option<f64>) -> Result<WaveFunction> {
    let dx = p.cone_step() / w as f64;
    let prop = Propagator::new(&Lagrangian::Relativistic, p, dx)?;
    let psi0 = data.sample(dx)?;
    let opts = RunOptions {
        backend: Backend::Fft,
        stride: n.max(1),
        trim,
        blowup: 10.0,
    };
    Ok(run(&prop, &psi0, &data.support(), n, opts, None)?.last().clone())
}

/// `‖ψ(T) − ψ₀‖/‖ψ₀‖` for a Gaussian with `c` fixed and `T = n·Δt`.
pub fn degenerate_point(sigma: f64, c: f64, t_end: f64, dt: f64, w: usize) -> Result<LadderPoint> {
    let n = (t_end / dt).round() as usize;
    if n == 0 {
        return Err(Error::Parameter(format!(
            "time step {dt} exceeds the run length {t_end}"
        )));
    }
    let p = PhysicalParams::natural(c, t_end / n as f64);
    let data = gaussian(sigma, 10.0 * sigma);
    let psi_t = path_integral(p, w, &data, n, Some(1e-15))?;
    let psi0 = data.sample(psi_t.dx)?;
    let lo = psi0.origin.min(psi_t.origin);
    let hi = psi0.x_end().max(psi_t.x_end());
    let error = l2_error(&psi_t, &psi0, Some(&SupportRegion::interval(lo, hi)?))?;
    Ok(LadderPoint {
        xi: p.xi(),
        c_dt: p.cone_step(),
        dt: p.dt,
        c,
        n_steps: n,
        w,
        error,
    })
}

/// Relative `L²` error of the path integral against the cone solver for a
/// Gaussian at `T`, with `ħ = m = 1`. The step count is `round(Tξ/(cΔt)²)`
/// and `Δt = T/n`, so the realised `ξ` differs slightly from the target.
#[allow(clippy::too_many_arguments)]
pub fn distinguished_point(
    sigma: f64,
    cutoff: f64,
    t_end: f64,
    xi: f64,
    c_dt: f64,
    w: usize,
    ref_dx: f64,
    ref_dt: f64,
) -> Result<LadderPoint> {
    let n = (t_end * xi / (c_dt * c_dt)).round().max(1.0) as usize;
    let dt = t_end / n as f64;
    let c = c_dt / dt;
    let p = PhysicalParams::natural(c, dt);
    let data = gaussian(sigma, cutoff);
    let psi_t = path_integral(p, w, &data, n, Some(1e-15))?;
    let geo = LightConeGeometry::new(data.support(), c)?;
    let reference = solve_piecemeal(&data.sample(ref_dx)?, &geo, &p, ref_dt, t_end, None, usize::MAX)?;
    let error = l2_error(&psi_t, reference.last(), None)?;
    Ok(LadderPoint {
        xi: p.xi(),
        c_dt,
        dt,
        c,
        n_steps: n,
        w,
        error,
    })
}

fn ladder_rows(pts: &[LadderPoint]) -> Vec<Vec<f64>> {
    pts.iter()
        .map(|q| vec![q.xi, q.c_dt, q.dt, q.c, q.n_steps as f64, q.w as f64, q.error])
        .collect()
}

const LADDER_HEADER: [&str; 7] = ["xi", "c_dt", "dt", "c", "steps", "W", "error"];

fn strictly_decreasing(pts: &[LadderPoint]) -> bool {
    pts.windows(2).all(|w| w[1].error < w[0].error)
}

/// Both ladders; keys `sigma`, `T`, `W`, `c`, `dt_list`, `xi_list`,
/// `cdt_list`, `ref_dx`, `ref_dt`, `deg_sigma`, `deg_W`, `max_error`,
/// `regime_low`, `regime_high`.
pub fn cmd_limits(cfg: &mut ExperimentConfig, out: &Path) -> Result<Report> {
    let t_end: f64 = cfg.get_or("T", 0.1)?;
    let c: f64 = cfg.get_or("c", 1.0)?;
    let deg_sigma: f64 = cfg.get_or("deg_sigma", 0.1)?;
    let deg_w: usize = cfg.get_or("deg_W", 16)?;
    let dts = cfg.list_or("dt_list", &[1e-2, 1e-3, 1e-4])?;
    let sigma: f64 = cfg.get_or("sigma", 1.0)?;
    let cutoff: f64 = cfg.get_or("cutoff", 8.5)?;
    let w: usize = cfg.get_or("W", 64)?;
    let xis = cfg.list_or("xi_list", &[25.0, 100.0, 400.0])?;
    let cdts = cfg.list_or("cdt_list", &[0.2, 0.1, 0.05])?;
    let ref_dx: f64 = cfg.get_or("ref_dx", 0.005)?;
    let ref_dt: f64 = cfg.get_or("ref_dt", 1e-3)?;
    let max_error: f64 = cfg.get_or("max_error", 0.05)?;
    let margins = RegimeMargins {
        low: cfg.get_or("regime_low", RegimeMargins::default().low)?,
        high: cfg.get_or("regime_high", RegimeMargins::default().high)?,
    };
    if xis.len() != cdts.len() {
        return Err(Error::Config("xi_list and cdt_list must have the same length".into()));
    }
    let mut report = Report::new("limits");

    let deg: Vec<LadderPoint> = dts
        .iter()
        .map(|&dt| degenerate_point(deg_sigma, c, t_end, dt, deg_w))
        .collect::<Result<_>>()?;
    for q in &deg {
        let regime = check_regime_with(&PhysicalParams::natural(c, q.dt), deg_sigma, margins);
        report.line(format!(
            "degenerate  dt={:<8e} xi={:<10.3e} |psi(T)-psi0|/|psi0| = {:.3e}{}",
            q.dt,
            q.xi,
            q.error,
            if regime.ok() {
                ""
            } else {
                "  (outside the distinguished regime)"
            }
        ));
    }
    report.check(
        "degenerate ladder decreasing",
        strictly_decreasing(&deg),
        format!("{:?}", deg.iter().map(|q| q.error).collect::<Vec<_>>()),
    );

    let dist: Vec<LadderPoint> = xis
        .iter()
        .zip(&cdts)
        .map(|(&xi, &cdt)| distinguished_point(sigma, cutoff, t_end, xi, cdt, w, ref_dx, ref_dt))
        .collect::<Result<_>>()?;
    for q in &dist {
        report.line(format!(
            "distinguished xi={:<8.2} c_dt={:<5} steps={:<6} relative L2 error vs cone solver = {:.3e}",
            q.xi, q.c_dt, q.n_steps, q.error
        ));
    }
    report.check(
        "distinguished ladder decreasing",
        strictly_decreasing(&dist),
        format!("{:?}", dist.iter().map(|q| q.error).collect::<Vec<_>>()),
    );
    if let Some(last) = dist.last() {
        report.check(
            "distinguished final error",
            last.error <= max_error,
            format!("{:.3e} <= {max_error}", last.error),
        );
    }

    std::fs::create_dir_all(out)?;
    let meta = |pts: &[LadderPoint]| CsvMeta {
        xi: pts.last().map(|q| q.xi),
        eps: None,
        w: pts.last().map(|q| q.w),
    };
    write_csv(
        &out.join("degenerate.csv"),
        &meta(&deg),
        &LADDER_HEADER,
        &ladder_rows(&deg),
    )?;
    write_csv(
        &out.join("distinguished.csv"),
        &meta(&dist),
        &LADDER_HEADER,
        &ladder_rows(&dist),
    )?;
    finish(out, cfg, &report, &[])?;
    Ok(report)
}
