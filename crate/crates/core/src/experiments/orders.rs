//! Convergence orders of the reference solvers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::LightConeGeometry;
use crate::params::PhysicalParams;
use crate::schrodinger::{solve_piecemeal, SpectralSolver};
use crate::wave::{InitialData, WaveFunction};

/// Freely spreading normalized Gaussian of initial width `σ` centred at 0.
pub fn spreading_gaussian(x: f64, t: f64, sigma: f64, p: &PhysicalParams) -> Complex64 {
    let s = Complex64::new(1.0, p.hbar * t / (p.m * sigma * sigma));
    let pre = (std::f64::consts::PI * sigma * sigma).powf(-0.25);
    pre / s.sqrt() * (-(x * x) / (2.0 * sigma * sigma * s)).exp()
}

/// Max-norm error of the spectral solver against [`spreading_gaussian`].
pub fn spectral_gaussian_error(sigma: f64, t: f64, half_length: f64, dx: f64, steps: usize) -> Result<f64> {
    let p = PhysicalParams::natural(1.0, t);
    let n = (2.0 * half_length / dx).round() as usize;
    let psi0 = WaveFunction::from_fn(-half_length, dx, n, |x| spreading_gaussian(x, 0.0, sigma, &p));
    let out = SpectralSolver::new(&p).evolve(&psi0, t, steps, None)?;
    Ok(out
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| (v - spreading_gaussian(out.x(i), t, sigma, &p)).norm())
        .fold(0.0, f64::max))
}

/// Discrete `L²` error of the cone solver at each `dx` against a run at
/// `ref_dx`, sampled on the coarse nodes. Every substep is `dx/c`, so time
/// and space are refined together. Each `dx` must be an integer multiple of
/// `ref_dx`.
pub fn cone_convergence(data: &InitialData, c: f64, t_end: f64, dxs: &[f64], ref_dx: f64) -> Result<Vec<(f64, f64)>> {
    let p = PhysicalParams::natural(c, t_end);
    let geo = LightConeGeometry::new(data.support(), c)?;
    let solve = |dx: f64| -> Result<WaveFunction> {
        let traj = solve_piecemeal(&data.sample(dx)?, &geo, &p, dx / c, t_end, None, usize::MAX)?;
        Ok(traj.last().clone())
    };
    let reference = solve(ref_dx)?;
    dxs.iter()
        .map(|&dx| {
            let ratio = dx / ref_dx;
            if (ratio - ratio.round()).abs() > 1e-9 {
                return Err(Error::Configuration(format!("dx = {dx} is not a multiple of {ref_dx}")));
            }
            let r = ratio.round() as i64;
            let coarse = solve(dx)?;
            let k0 = reference
                .node_of(coarse.origin)
                .ok_or_else(|| Error::Configuration("grids are not nested".into()))?;
            let err = coarse
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| (v - reference.at(k0 + r * i as i64)).norm_sqr())
                .sum::<f64>()
                * dx;
            Ok((dx, err.sqrt()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_oracle_is_normalized_and_spreads() {
        let p = PhysicalParams::natural(1.0, 1.0);
        let w = WaveFunction::from_fn(-30.0, 0.01, 6001, |x| spreading_gaussian(x, 2.0, 1.0, &p));
        assert!((w.norm_sqr() - 1.0).abs() < 1e-10);
        assert!(w.max_abs() < spreading_gaussian(0.0, 0.0, 1.0, &p).norm());
    }

    #[test]
    fn spectral_solver_matches_closed_form() {
        assert!(spectral_gaussian_error(1.0, 1.0, 40.0, 0.05, 1).unwrap() < 1e-12);
    }

    #[test]
    fn cone_solver_is_second_order_with_a_quiet_front() {
        let data = InitialData::Gaussian {
            sigma: 1.0,
            center: 0.0,
            cutoff: 8.5,
        };
        let e = cone_convergence(&data, 1.0, 0.2, &[0.04, 0.02], 0.005).unwrap();
        let ratio = e[0].1 / e[1].1;
        assert!((3.5..4.5).contains(&ratio), "{e:?}");
        assert!(cone_convergence(&data, 1.0, 0.2, &[0.03], 0.02).is_err());
    }

    // The node-aligned staircase boundary displaces the Dirichlet condition
    // by up to dx/2; when the solution is not small at the front, that
    // radiates O(dx) waves and the scheme drops to first order.
    #[test]
    fn front_loaded_data_converges_at_first_order() {
        let data = InitialData::Bump {
            center: 0.0,
            half_width: 1.0,
        };
        let e = cone_convergence(&data, 1.0, 0.2, &[0.04, 0.02], 0.005).unwrap();
        let ratio = e[0].1 / e[1].1;
        assert!((1.3..3.0).contains(&ratio), "{e:?}");
    }
}
