//! Harmonic oscillator in the cone: energy recovery and the order of the
//! boundary-layer expansion. Units `ħ = m = ω = 1`, so `y = x`, `τ = t`
//! and `c = 1/ε`.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use super::{finish, Report};
use crate::error::{Error, Result};
use crate::io::{svg_line_plot, write_csv, CsvMeta, ExperimentConfig, Series};
use crate::oscillator::{
    energy_series, expand_initial, hermite_functions, MehlerOuter, ModeExpansion, UniformExpansion,
};
use crate::params::PhysicalParams;
use crate::schrodinger::{ConeSolver, SharedPotential};
use crate::wave::{InitialData, WaveFunction};

fn oscillator_params(eps: f64, x0: f64) -> PhysicalParams {
    PhysicalParams::natural(1.0 / eps, 1.0).with_omega(1.0).with_x0(x0)
}

fn harmonic() -> SharedPotential {
    Arc::new(|x: f64| 0.5 * x * x)
}

/// Energy at one time from the overlap series and from the cone solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCheck {
    pub t: f64,
    /// Cone half-width minus `x₀`, i.e. `c·t`.
    pub ct: f64,
    pub series: Complex64,
    /// `Re⟨ψ|Ĥ|ψ⟩` of the Crank–Nicolson state.
    pub discrete: f64,
    pub limit: f64,
}

/// Data `Σ a_n ψ_n` restricted to `|x| < x₀`, evolved in the cone with
/// `ε`, checked at `times`. Returns the checks and the mode expansion of
/// the restricted data.
pub fn oscillator_energy(
    modes: &[(usize, f64)],
    x0: f64,
    eps: f64,
    dx: f64,
    dt: f64,
    times: &[f64],
) -> Result<(Vec<EnergyCheck>, ModeExpansion)> {
    let top = modes
        .iter()
        .map(|m| m.0)
        .max()
        .ok_or_else(|| Error::Parameter("no modes given".into()))?;
    let phi0 = WaveFunction::on_interval(-x0, x0, dx, |x| {
        if x.abs() >= x0 {
            return Complex64::new(0.0, 0.0);
        }
        let h = hermite_functions(top, x);
        Complex64::new(modes.iter().map(|&(n, a)| a * h[n]).sum(), 0.0)
    });
    let (me, _) = expand_initial(&phi0, 64.max(top + 8), x0, eps)?;
    let p = oscillator_params(eps, x0);
    let support = crate::geometry::SupportRegion::interval(-x0, x0)?;
    let mut solver = ConeSolver::new(&phi0, &support, &p, dt, Some(harmonic()))?;
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(sorted.len());
    for t in sorted {
        solver.advance_to(t)?;
        let e = energy_series(&me, &p, t)?;
        out.push(EnergyCheck {
            t,
            ct: p.c * t,
            series: e.value,
            discrete: solver.energy(),
            limit: e.limit,
        });
    }
    Ok((out, me))
}

/// Sup-norm distance between the cone solver and the uniform expansion at
/// one `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerPoint {
    pub eps: f64,
    pub sup_error: f64,
    /// Where the sup is attained.
    pub at_y: f64,
    /// `|V⁰|` at the cone edge, the size of the layer correction.
    pub edge_outer: f64,
}

/// For each `ε`: evolve `data` (supported in `|y| ≤ y₀`) in the cone to
/// `τ` with Crank–Nicolson (`dx`, target step `dt`), and compare with the
/// uniform expansion built on the exact outer field, every `sample_every`
/// nodes.
pub fn boundary_layer_ladder(
    data: &InitialData,
    eps_list: &[f64],
    tau: f64,
    dx: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Vec<LayerPoint>> {
    let hull = data
        .support()
        .hull()
        .ok_or_else(|| Error::Parameter("empty initial data".into()))?;
    let y0 = hull.hi.max(-hull.lo);
    let outer = MehlerOuter::new(data.clone(), 1.0);
    eps_list
        .iter()
        .map(|&eps| {
            let p = oscillator_params(eps, y0);
            let psi0 = data.sample(dx)?;
            let mut solver = ConeSolver::new(&psi0, &data.support(), &p, dt, Some(harmonic()))?;
            solver.advance_to(tau)?;
            let u = UniformExpansion::new(&outer, y0, eps);
            let state = solver.state();
            let mut best = (0.0, 0.0);
            for i in (0..state.len()).step_by(sample_every.max(1)) {
                let y = state.x(i);
                let d = (state.values[i] - u.eval(y, tau)).norm();
                if d.is_nan() {
                    return Err(Error::Numerical(format!("outer field failed at y = {y}")));
                }
                if d > best.0 {
                    best = (d, y);
                }
            }
            let edge = u.cone_edge(tau);
            Ok(LayerPoint {
                eps,
                sup_error: best.0,
                at_y: best.1,
                edge_outer: crate::oscillator::OuterField::outer(&outer, edge, tau).norm(),
            })
        })
        .collect()
}

/// Keys: `x0`, `eps`, `dx`, `dt_pde`, `T_factor` (runs to `c·t = T_factor·x0`),
/// `layer_data`, `eps_list`, `tau`, `layer_dx`, `layer_dt`, `energy_tol`,
/// `ratio_lo`, `ratio_hi`, `modes` (pairs `n weight`).
pub fn cmd_oscillator(cfg: &mut ExperimentConfig, out: &Path) -> Result<Report> {
    let x0: f64 = cfg.get_or("x0", 8.0)?;
    let eps: f64 = cfg.get_or("eps", 0.1)?;
    let dx: f64 = cfg.get_or("dx", 0.02)?;
    let dt: f64 = cfg.get_or("dt_pde", 2e-3)?;
    let factor: f64 = cfg.get_or("T_factor", 8.0)?;
    let tol: f64 = cfg.get_or("energy_tol", 1e-3)?;
    let mode_list = cfg.list_or("modes", &[0.0, 1.0, 1.0, 1.0])?;
    if mode_list.len() % 2 != 0 || mode_list.is_empty() {
        return Err(Error::Config("modes must be pairs 'n weight'".into()));
    }
    let norm = mode_list.chunks(2).map(|c| c[1] * c[1]).sum::<f64>().sqrt();
    let modes: Vec<(usize, f64)> = mode_list.chunks(2).map(|c| (c[0] as usize, c[1] / norm)).collect();
    let layer_data = cfg.initial_data("kink 1")?;
    let eps_list = cfg.list_or("eps_list", &[0.2, 0.1, 0.05])?;
    let tau: f64 = cfg.get_or("tau", 2.0)?;
    let layer_dx: f64 = cfg.get_or("layer_dx", 0.002)?;
    let layer_dt: f64 = cfg.get_or("layer_dt", 5e-4)?;
    let (ratio_lo, ratio_hi): (f64, f64) = (cfg.get_or("ratio_lo", 0.3)?, cfg.get_or("ratio_hi", 0.7)?);
    if !(eps > 0.0) {
        return Err(Error::Parameter("eps must be > 0 (omega > 0)".into()));
    }

    let mut report = Report::new("oscillator");
    let t_check = factor * x0 * eps;
    let times: Vec<f64> = (0..=20)
        .map(|k| t_check * k as f64 / 20.0)
        .chain([1.1 * t_check, 1.25 * t_check])
        .collect();
    let (checks, me) = oscillator_energy(&modes, x0, eps, dx, dt, &times)?;
    report.line(format!(
        "modes {modes:?}, x0 = {x0}, eps = {eps}; sum |a_n|^2 = {:.8}",
        me.mass()
    ));
    let mut worst = 0.0f64;
    for e in checks.iter().filter(|e| e.ct >= factor * x0 * (1.0 - 1e-12)) {
        let rel_series = (e.series.re - e.limit).abs() / e.limit;
        let rel_disc = (e.discrete - e.limit).abs() / e.limit;
        let agree = (e.series.re - e.discrete).abs() / e.limit;
        worst = worst.max(rel_series).max(rel_disc).max(agree);
        report.line(format!(
            "ct = {:>7.2}: E_series = {:.6} (Im {:+.1e}), E_cone = {:.6}, limit = {:.6}",
            e.ct, e.series.re, e.series.im, e.discrete, e.limit
        ));
    }
    report.check(
        "energy recovery",
        worst <= tol,
        format!("worst relative deviation {worst:.2e} <= {tol:e}"),
    );

    let ladder = boundary_layer_ladder(&layer_data, &eps_list, tau, layer_dx, layer_dt, 1)?;
    for q in &ladder {
        report.line(format!(
            "eps = {:<5}: sup |U_cone - U_uniform| = {:.4e} at y = {:.3} (|V0| at the edge {:.1e})",
            q.eps, q.sup_error, q.at_y, q.edge_outer
        ));
    }
    let ratios: Vec<f64> = ladder.windows(2).map(|w| w[1].sup_error / w[0].sup_error).collect();
    let in_band = ratios.iter().all(|r| (ratio_lo..=ratio_hi).contains(r));
    report.check(
        "boundary-layer order",
        in_band,
        format!("ratios {ratios:?} within [{ratio_lo}, {ratio_hi}]"),
    );

    fs::create_dir_all(out)?;
    let meta = CsvMeta {
        xi: None,
        eps: Some(eps),
        w: None,
    };
    let coeff_rows: Vec<Vec<f64>> = me
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| vec![n as f64, a.re, a.im])
        .collect();
    write_csv(
        &out.join("coefficients.csv"),
        &meta,
        &["n", "re_a", "im_a"],
        &coeff_rows,
    )?;
    let e_rows: Vec<Vec<f64>> = checks
        .iter()
        .map(|e| vec![e.t, e.ct, e.series.re, e.series.im, e.discrete, e.limit])
        .collect();
    write_csv(
        &out.join("energy.csv"),
        &meta,
        &["t", "ct", "re_E_series", "im_E_series", "E_cone", "E_limit"],
        &e_rows,
    )?;
    let l_rows: Vec<Vec<f64>> = ladder
        .iter()
        .map(|q| vec![q.eps, q.sup_error, q.at_y, q.edge_outer])
        .collect();
    write_csv(
        &out.join("layer_order.csv"),
        &CsvMeta::none(),
        &["eps", "sup_error", "at_y", "edge_outer"],
        &l_rows,
    )?;
    fs::write(
        out.join("energy.svg"),
        svg_line_plot(
            "energy in the cone",
            "c t",
            "E",
            &[
                Series::new("overlap series", checks.iter().map(|e| (e.ct, e.series.re)).collect()),
                Series::new("cone solver", checks.iter().map(|e| (e.ct, e.discrete)).collect()),
                Series::new("limit", checks.iter().map(|e| (e.ct, e.limit)).collect()),
            ],
        ),
    )?;
    finish(out, cfg, &report, &[])?;
    Ok(report)
}
