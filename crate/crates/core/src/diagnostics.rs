//! Moments, tail fits, front tracking, `L²` comparisons and the closed-form
//! free evolution of a box.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::SupportRegion;
use crate::params::PhysicalParams;
use crate::propagator::Trajectory;
use crate::special::fresnel;
use crate::wave::WaveFunction;

/// `∫|ψ|² xᵏ dx` by the rectangle rule on the stored nodes.
pub fn norm_moment(psi: &WaveFunction, k: i32) -> f64 {
    psi.values
        .iter()
        .enumerate()
        .map(|(i, v)| v.norm_sqr() * psi.x(i).powi(k))
        .sum::<f64>()
        * psi.dx
}

/// `∫_{|x|≤r} |ψ|² xᵏ dx`.
pub fn windowed_moment(psi: &WaveFunction, k: i32, r: f64) -> f64 {
    psi.values
        .iter()
        .enumerate()
        .filter(|&(i, _)| psi.x(i).abs() <= r)
        .map(|(i, v)| v.norm_sqr() * psi.x(i).powi(k))
        .sum::<f64>()
        * psi.dx
}

/// Free evolution of the indicator of `[−1, 1]`:
/// `(1/√(2i))·[F(u₂) − F(u₁)]`, `F = C + iS`, `u = (±1 − x)/√(πħt/m)`.
pub fn fresnel_box(x: f64, t: f64, p: &PhysicalParams) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("fresnel_box needs t > 0, got {t}")));
    }
    let s = (std::f64::consts::PI * p.hbar * t / p.m).sqrt();
    let f = |u: f64| fresnel(u).map(|(c, s)| Complex64::new(c, s));
    let pre = Complex64::new(0.0, 2.0).sqrt().inv();
    Ok(pre * (f((1.0 - x) / s)? - f((-1.0 - x) / s)?))
}

/// Ordinary least squares `y ≈ slope·x + intercept`, with `r²`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return Err(Error::Data(format!("need at least two paired points, got {n}")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Data("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok((slope, my - slope * mx, r2))
}

/// Power-law fit `|ψ| ∝ |x|^slope` over a range of `|x|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub x_lo: f64,
    pub x_hi: f64,
    pub slope: f64,
    pub r2: f64,
    /// `(bin centre, rms |ψ|)` pairs entering the fit.
    pub bins: Vec<(f64, f64)>,
}

/// Fit `log rms|ψ|` against `log|x|` with `bins` log-spaced bins over
/// `x_lo ≤ |x| ≤ x_hi`, both sides pooled. The RMS per bin averages out the
/// oscillation of the tail. The range must span at least a decade.
pub fn fit_tail_decay(psi: &WaveFunction, x_lo: f64, x_hi: f64, bins: usize) -> Result<DecayFit> {
    if !(x_lo > 0.0 && x_hi >= 10.0 * x_lo) {
        return Err(Error::Parameter(format!(
            "tail fit needs a decade or more, got [{x_lo}, {x_hi}]"
        )));
    }
    if bins < 2 {
        return Err(Error::Parameter("tail fit needs at least two bins".into()));
    }
    let (l0, l1) = (x_lo.ln(), x_hi.ln());
    let width = (l1 - l0) / bins as f64;
    let mut sum = vec![0.0; bins];
    let mut count = vec![0usize; bins];
    for (i, v) in psi.values.iter().enumerate() {
        let a = psi.x(i).abs();
        if a < x_lo || a > x_hi {
            continue;
        }
        let b = (((a.ln() - l0) / width) as usize).min(bins - 1);
        sum[b] += v.norm_sqr();
        count[b] += 1;
    }
    let mut pts = Vec::new();
    for b in 0..bins {
        if count[b] > 0 && sum[b] > 0.0 {
            let centre = (l0 + (b as f64 + 0.5) * width).exp();
            pts.push((centre, (sum[b] / count[b] as f64).sqrt()));
        }
    }
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (slope, _, r2) = least_squares(&lx, &ly)?;
    Ok(DecayFit {
        x_lo,
        x_hi,
        slope,
        r2,
        bins: pts,
    })
}

/// Moments `M(R) = ∫_{|x|≤R} x^k |ψ|²` over a window ladder and the fitted
/// exponent of `M ∝ R^γ`.
pub fn moment_growth(psi: &WaveFunction, k: i32, windows: &[f64]) -> Result<(Vec<(f64, f64)>, f64)> {
    let m: Vec<(f64, f64)> = windows.iter().map(|&r| (r, windowed_moment(psi, k, r))).collect();
    let lx: Vec<f64> = m.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = m.iter().map(|p| p.1.ln()).collect();
    let (gamma, _, _) = least_squares(&lx, &ly)?;
    Ok((m, gamma))
}

/// Outermost positions with `|ψ| > threshold·max|ψ|` at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Front {
    pub t: f64,
    pub left: f64,
    pub right: f64,
}

pub fn fronts_of(psi: &WaveFunction, threshold: f64) -> Option<Front> {
    let cut = threshold * psi.max_abs();
    let above = |v: &Complex64| v.norm() > cut;
    let l = psi.values.iter().position(above)?;
    let r = psi.values.iter().rposition(above)?;
    Some(Front {
        t: psi.t,
        left: psi.x(l),
        right: psi.x(r),
    })
}

pub fn front_track(traj: &Trajectory, threshold: f64) -> Result<Vec<Front>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Parameter(format!(
            "front threshold must lie in (0, 1), got {threshold}"
        )));
    }
    if traj.snapshots.is_empty() {
        return Err(Error::Data("empty trajectory".into()));
    }
    Ok(traj.snapshots.iter().filter_map(|s| fronts_of(s, threshold)).collect())
}

/// Least-squares speed of the right front.
pub fn front_slope(fronts: &[Front]) -> Result<f64> {
    let t: Vec<f64> = fronts.iter().map(|f| f.t).collect();
    let x: Vec<f64> = fronts.iter().map(|f| f.right).collect();
    least_squares(&t, &x).map(|(s, _, _)| s)
}

/// Cubic (four-point Lagrange) interpolation; linear in the end cells,
/// zero off the grid.
pub fn sample_cubic(psi: &WaveFunction, x: f64) -> Complex64 {
    let n = psi.len();
    let r = (x - psi.origin) / psi.dx;
    if n < 4 || r < 0.0 || r > (n - 1) as f64 {
        return psi.sample(x);
    }
    let k = r.round();
    if (r - k).abs() < 1e-9 {
        return psi.values[k as usize];
    }
    let j = r.floor() as usize;
    if j == 0 || j + 2 >= n {
        return psi.sample(x);
    }
    let f = r - j as f64;
    let w = [
        -f * (f - 1.0) * (f - 2.0) / 6.0,
        (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
        -(f + 1.0) * f * (f - 2.0) / 2.0,
        (f + 1.0) * f * (f - 1.0) / 6.0,
    ];
    (0..4).map(|q| psi.values[j - 1 + q] * w[q]).sum()
}

/// Relative `L²` difference `‖a − b‖/‖b‖` on the finer of the two grids,
/// over `region` (default: the overlap of the two stored ranges).
pub fn l2_error(a: &WaveFunction, b: &WaveFunction, region: Option<&SupportRegion>) -> Result<f64> {
    let fine = if a.dx <= b.dx { a } else { b };
    let default;
    let region = match region {
        Some(r) => r,
        None => {
            let lo = a.origin.max(b.origin);
            let hi = a.x_end().min(b.x_end());
            if lo > hi {
                return Err(Error::Comparison("grids do not overlap".into()));
            }
            default = SupportRegion::interval(lo, hi)?;
            &default
        }
    };
    let (mut num, mut den) = (0.0, 0.0);
    for iv in region.intervals() {
        let k0 = ((iv.lo - fine.origin) / fine.dx - 1e-9).ceil() as i64;
        let k1 = ((iv.hi - fine.origin) / fine.dx + 1e-9).floor() as i64;
        for k in k0..=k1 {
            let x = fine.origin + k as f64 * fine.dx;
            let (va, vb) = (sample_cubic(a, x), sample_cubic(b, x));
            num += (va - vb).norm_sqr();
            den += vb.norm_sqr();
        }
    }
    if den == 0.0 {
        return Err(Error::Comparison("reference vanishes on the comparison region".into()));
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schrodinger::SpectralSolver;
    use crate::wave::InitialData;

    fn gaussian(dx: f64) -> WaveFunction {
        InitialData::Gaussian {
            sigma: 1.0,
            center: 0.0,
            cutoff: 12.0,
        }
        .sample(dx)
        .unwrap()
    }

    #[test]
    fn gaussian_moments() {
        let g = gaussian(0.01);
        assert!((norm_moment(&g, 0) - 1.0).abs() < 1e-12);
        assert!(norm_moment(&g, 1).abs() < 1e-12);
        assert!((norm_moment(&g, 2) - 0.5).abs() < 1e-12);
        assert!((norm_moment(&g, 4) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn fresnel_box_limits_and_symmetry() {
        let p = PhysicalParams::natural(1.0, 1.0);
        assert!((fresnel_box(0.3, 1e-8, &p).unwrap() - 1.0).norm() < 1e-3);
        assert!(fresnel_box(3.0, 1e-8, &p).unwrap().norm() < 1e-3);
        for &x in &[0.2, 1.7, 40.0] {
            assert!((fresnel_box(x, 0.7, &p).unwrap() - fresnel_box(-x, 0.7, &p).unwrap()).norm() < 1e-14);
        }
        // unitary: the box has norm² 2
        let w = WaveFunction::from_fn(-400.0, 0.01, 80_001, |x| fresnel_box(x, 1.0, &p).unwrap());
        assert!((w.norm_sqr() - 2.0).abs() < 5e-3);
    }

    #[test]
    fn fresnel_box_tail_decays_like_inverse_distance() {
        let p = PhysicalParams::natural(1.0, 1.0);
        let w = WaveFunction::from_fn(-2000.0, 0.05, 80_001, |x| fresnel_box(x, 1.0, &p).unwrap());
        let fit = fit_tail_decay(&w, 10.0, 1000.0, 24).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.1, "{fit:?}");
        assert!(fit_tail_decay(&w, 10.0, 50.0, 24).is_err());
        let (_, gamma) = moment_growth(&w, 2, &[100.0, 200.0, 400.0, 800.0]).unwrap();
        assert!(gamma > 0.9, "{gamma}");
    }

    #[test]
    fn fresnel_box_matches_the_spectral_solver() {
        let p = PhysicalParams::natural(1.0, 1.0);
        // sampling the jump costs O(k²dx²) relative error at wavenumber k = x/t
        let dx = 1.0 / 256.0;
        let n = 1 << 18;
        let origin = -(n as f64 / 2.0) * dx;
        let psi = WaveFunction::from_fn(origin, dx, n, |x| {
            let a = x.abs();
            Complex64::new(
                if a < 1.0 {
                    1.0
                } else if a == 1.0 {
                    0.5
                } else {
                    0.0
                },
                0.0,
            )
        });
        let solver = SpectralSolver::new(&p).with_wrap_tol(1.0);
        let out = solver.step(&psi, 0.5, None).unwrap();
        for &x in &[0.0, 0.5, 2.0, 5.0] {
            let k = out.node_of(x).unwrap() as usize;
            let d = (out.values[k] - fresnel_box(x, 0.5, &p).unwrap()).norm();
            assert!(d < 2e-5, "x={x}: {d:e}");
        }
    }

    #[test]
    fn l2_error_examples() {
        let a = gaussian(0.01);
        assert_eq!(l2_error(&a, &a, None).unwrap(), 0.0);
        let b = a.clone().scaled(Complex64::new(-1.0, 0.0));
        assert!((l2_error(&a, &b, None).unwrap() - 2.0).abs() < 1e-14);
        let z = a.clone().scaled(Complex64::new(0.0, 0.0));
        assert!(matches!(l2_error(&a, &z, None), Err(Error::Comparison(_))));
        // resampling a coarse copy onto finer grids barely changes the answer
        let shifted = |dx: f64| {
            let mut w = gaussian(dx);
            w.values
                .iter_mut()
                .enumerate()
                .for_each(|(i, v)| *v *= 1.0 + 1e-3 * (0.1 * (w.origin + i as f64 * dx)).sin());
            w
        };
        let coarse = gaussian(0.04);
        let e1 = l2_error(&shifted(0.01), &coarse, None).unwrap();
        let e2 = l2_error(&shifted(0.005), &coarse, None).unwrap();
        assert!((e1 - e2).abs() < 1e-6, "{e1} {e2}");
    }

    #[test]
    fn cubic_sampling_is_exact_on_cubics() {
        let w = WaveFunction::from_fn(-1.0, 0.1, 21, |x| Complex64::new(x * x * x - x, 2.0 * x * x));
        for &x in &[-0.55, 0.03, 0.77] {
            let want = Complex64::new(x * x * x - x, 2.0 * x * x);
            assert!((sample_cubic(&w, x) - want).norm() < 1e-13);
        }
    }

    #[test]
    fn fronts_follow_the_grid() {
        let mut w = WaveFunction::from_fn(-5.0, 0.5, 21, |x| {
            Complex64::new(if x.abs() <= 2.0 { 1.0 } else { 0.0 }, 0.0)
        });
        w.t = 0.25;
        let f = fronts_of(&w, 1e-6).unwrap();
        assert_eq!((f.t, f.left, f.right), (0.25, -2.0, 2.0));
        let empty = Trajectory {
            snapshots: vec![],
            support_history: vec![],
            norm_history: vec![],
        };
        assert!(matches!(front_track(&empty, 1e-6), Err(Error::Data(_))));
        let fr = [0.0, 1.0, 2.0].map(|t| Front {
            t,
            left: -t,
            right: 3.0 * t + 1.0,
        });
        assert!((front_slope(&fr).unwrap() - 3.0).abs() < 1e-14);
    }
}
