//! Free evolution of box data: `|x|⁻¹` tails and divergent moments, against
//! the cone-bounded evolution whose moments stay finite.

use num_complex::Complex64;

use crate::diagnostics::{fit_tail_decay, fresnel_box, moment_growth, norm_moment, DecayFit};
use crate::error::Result;
use crate::geometry::LightConeGeometry;
use crate::params::PhysicalParams;
use crate::schrodinger::{solve_piecemeal, SpectralSolver};
use crate::wave::{InitialData, WaveFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct TailResult {
    pub fit: DecayFit,
    /// `max |ψ_spectral − ψ_Fresnel|` over `|x| ≤ match_radius`.
    pub fresnel_error: f64,
    /// `(R, ∫_{|x|≤R} x²|ψ|²)` of the free solution.
    pub moments: Vec<(f64, f64)>,
    pub growth: f64,
    /// Second moment of the cone-bounded solution and its bound
    /// `(x₀ + cT)²·‖ψ‖²`.
    pub cone_moment: f64,
    pub cone_bound: f64,
    /// Mass fraction in the outer sixteenths of the periodic grid.
    pub edge_mass: f64,
}

/// Indicator of `[−1, 1]` on `n` nodes centred on 0, with half values at `±1`
/// so the sampled jump sits on the midpoint of its cell.
pub fn box_samples(dx: f64, n: usize) -> WaveFunction {
    let origin = -((n / 2) as f64) * dx;
    WaveFunction::from_fn(origin, dx, n, |x| {
        let a = x.abs();
        let v = if (a - 1.0).abs() < 1e-9 * dx {
            0.5
        } else if a < 1.0 {
            1.0
        } else {
            0.0
        };
        Complex64::new(v, 0.0)
    })
}

/// Box data with `ħ = m = 1` evolved to `t` on a periodic grid of `n` nodes.
/// Spectral content travels at most `π·t/dx`, so the grid half-length should
/// exceed that; the mass that does reach the outer bands is the physical
/// `|x|⁻²` density, not wrap-around, and is reported rather than rejected.
#[allow(clippy::too_many_arguments)]
pub fn tail_pathology(
    dx: f64,
    n: usize,
    t: f64,
    fit_range: (f64, f64),
    bins: usize,
    windows: &[f64],
    match_radius: f64,
    cone_c: f64,
    cone_dx: f64,
) -> Result<TailResult> {
    let p = PhysicalParams::natural(1.0, t);
    let psi0 = box_samples(dx, n);
    let free = SpectralSolver::new(&p).with_wrap_tol(1.0).step(&psi0, t, None)?;
    let edge_mass = SpectralSolver::edge_mass_fraction(&free);
    let fit = fit_tail_decay(&free, fit_range.0, fit_range.1, bins)?;
    let k = (match_radius / dx).floor() as i64;
    let centre = free.node_of(0.0).expect("grid contains the origin");
    let mut fresnel_error = 0.0f64;
    for j in -k..=k {
        let x = j as f64 * dx;
        let d = (free.at(centre + j) - fresnel_box(x, t, &p)?).norm();
        fresnel_error = fresnel_error.max(d);
    }
    let (moments, growth) = moment_growth(&free, 2, windows)?;

    let data = InitialData::Box(vec![(-1.0, 1.0)]);
    let geo = LightConeGeometry::new(data.support(), cone_c)?;
    let pc = PhysicalParams::natural(cone_c, t);
    let cone = solve_piecemeal(&data.sample(cone_dx)?, &geo, &pc, cone_dx / cone_c, t, None, usize::MAX)?;
    let last = cone.last();
    let cone_moment = norm_moment(last, 2);
    let cone_bound = (1.0 + cone_c * t).powi(2) * last.norm_sqr();
    Ok(TailResult {
        fit,
        fresnel_error,
        moments,
        growth,
        cone_moment,
        cone_bound,
        edge_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tail_run() {
        let r = tail_pathology(
            1.0 / 64.0,
            1 << 16,
            1.0,
            (5.0, 100.0),
            16,
            &[20.0, 40.0, 80.0],
            4.0,
            5.0,
            0.01,
        )
        .unwrap();
        assert!((r.fit.slope + 1.0).abs() < 0.15, "{:?}", r.fit.slope);
        assert!(r.fresnel_error < 1e-3, "{}", r.fresnel_error);
        assert!(r.growth > 0.8, "{}", r.growth);
        assert!(r.cone_moment <= r.cone_bound);
        let b = box_samples(0.5, 8);
        assert_eq!(
            b.values.iter().map(|v| v.re).collect::<Vec<_>>(),
            vec![0.0, 0.0, 0.5, 1.0, 1.0, 1.0, 0.5, 0.0]
        );
    }
}
