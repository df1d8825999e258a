//! The windowed short-time kernel `e^{iξL((x−y)/cΔt)}` on `|x−y| ≤ cΔt`:
//! Lagrangians, moment integrals, the normalization `N`, the coefficient
//! curve `C(ξ) = ξI₂/(2I₀)` and per-offset grid weights.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::quad::OscillatoryQuad;
use crate::special::{bessel_j1, struve_h1};

/// Above this `ξ` the quadrature tolerance is loosened from `1e-10` to `1e-8`.
pub const LOOSE_TOL_XI: f64 = 1e4;

/// Smallest admissible number of grid cells per light-cone step.
pub const MIN_WINDOW: usize = 16;

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Free-particle Lagrangian in the scaled velocity `z = v/c`, normalised so
/// that `L(0) = L'(0) = 0` and `L''(0) = 1`.
#[derive(Clone)]
pub enum Lagrangian {
    /// `L(z) = 1 − √(1 − z²)`.
    Relativistic,
    Custom {
        name: String,
        eval: Evaluator,
    },
}

impl fmt::Debug for Lagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lagrangian::Relativistic => write!(f, "Relativistic"),
            Lagrangian::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Lagrangian {
    /// Wrap an analytic function on `|z| < 1`, checking the normalisation
    /// `L(0) = 0, L'(0) = 0, L''(0) = 1` by centred differences.
    pub fn custom<F>(name: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let name = name.into();
        let h = 1e-4;
        let l0 = f(0.0);
        let d1 = (f(h) - f(-h)) / (2.0 * h);
        let d2 = (f(h) - 2.0 * l0 + f(-h)) / (h * h);
        let tol = 1e-6;
        if !(l0.abs() <= tol && d1.abs() <= tol && (d2 - 1.0).abs() <= tol) {
            return Err(Error::Parameter(format!(
                "Lagrangian '{name}' violates L(0)=0, L'(0)=0, L''(0)=1: got {l0:e}, {d1:e}, {d2}"
            )));
        }
        Ok(Lagrangian::Custom {
            name,
            eval: Arc::new(f),
        })
    }

    pub fn name(&self) -> &str {
        match self {
            Lagrangian::Relativistic => "relativistic",
            Lagrangian::Custom { name, .. } => name,
        }
    }

    fn raw(&self, z: f64) -> f64 {
        match self {
            Lagrangian::Relativistic => 1.0 - (1.0 - z * z).sqrt(),
            Lagrangian::Custom { eval, .. } => eval(z),
        }
    }
}

/// `L(z)` for `|z| < 1`.
pub fn eval_lagrangian(l: &Lagrangian, z: f64) -> Result<f64> {
    if !(z.abs() < 1.0) {
        return Err(Error::Domain(format!("Lagrangian evaluated at |z| = {} >= 1", z.abs())));
    }
    Ok(l.raw(z))
}

fn quad_for(xi: f64) -> OscillatoryQuad {
    OscillatoryQuad::with_tol(if xi > LOOSE_TOL_XI { 1e-8 } else { 1e-10 })
}

fn check_xi(xi: f64) -> Result<()> {
    if xi.is_finite() && xi >= 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("xi must be finite and >= 0, got {xi}")))
    }
}

/// `(I₀, I₂, I₄)` in one adaptive pass.
pub fn moments(l: &Lagrangian, xi: f64) -> Result<[Complex64; 3]> {
    check_xi(xi)?;
    let q = quad_for(xi);
    let est = match l {
        // z = sin θ keeps the integrand smooth up to |z| = 1
        Lagrangian::Relativistic => q.integrate(
            |t: f64| {
                let (s, c) = t.sin_cos();
                let s2 = s * s;
                [c, s2 * c, s2 * s2 * c]
            },
            |t: f64| xi * (1.0 - t.cos()),
            -FRAC_PI_2,
            FRAC_PI_2,
        )?,
        Lagrangian::Custom { eval, .. } => q.integrate(
            |z: f64| {
                let z2 = z * z;
                [1.0, z2, z2 * z2]
            },
            |z: f64| xi * eval(z),
            -1.0,
            1.0,
        )?,
    };
    Ok(est.values)
}

/// `I_k(ξ) = ∫_{-1}^{1} z^k e^{iξL(z)} dz` for `k ∈ {0, 2, 4}`.
pub fn moment_integral(l: &Lagrangian, k: u32, xi: f64) -> Result<Complex64> {
    let idx = match k {
        0 => 0,
        2 => 1,
        4 => 2,
        _ => return Err(Error::Parameter(format!("moment order must be 0, 2 or 4, got {k}"))),
    };
    Ok(moments(l, xi)?[idx])
}

/// `N = cΔt · I₀(ξ)`.
pub fn normalization(l: &Lagrangian, p: &PhysicalParams) -> Result<Complex64> {
    p.validate()?;
    Ok(p.cone_step() * moment_integral(l, 0, p.xi())?)
}

/// `I₀(ξ) = e^{iξ}[2 − πH₁(ξ) − iπJ₁(ξ)]` for the relativistic Lagrangian.
///
/// Follows from `z = sin θ` and `∫₀^{π/2} cos θ e^{−iξcos θ} dθ = 1 − (π/2)[H₁(ξ) + iJ₁(ξ)]`.
pub fn closed_form_check(xi: f64) -> Result<Complex64> {
    check_xi(xi)?;
    if xi == 0.0 {
        return Ok(Complex64::new(2.0, 0.0));
    }
    let pi = std::f64::consts::PI;
    let inner = Complex64::new(2.0 - pi * struve_h1(xi)?, -pi * bessel_j1(xi)?);
    Ok(Complex64::from_polar(1.0, xi) * inner)
}

/// One point of the coefficient curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSample {
    pub xi: f64,
    pub i0: Complex64,
    pub i2: Complex64,
    /// `ξ I₂ / (2 I₀)`; NaN when `singular`.
    pub c: Complex64,
    /// `I₀` vanished to within the quadrature tolerance.
    pub singular: bool,
}

/// Coefficient of `(ħ/m)ψ_xx` in the short-time expansion, for each `ξ`.
pub fn coefficient_curve(l: &Lagrangian, xi_grid: &[f64]) -> Result<Vec<CoefficientSample>> {
    xi_grid
        .iter()
        .map(|&xi| {
            let [i0, i2, _] = moments(l, xi)?;
            let singular = i0.norm() <= 1e2 * quad_for(xi).tol;
            let c = if singular {
                Complex64::new(f64::NAN, f64::NAN)
            } else {
                xi * i2 / (2.0 * i0)
            };
            Ok(CoefficientSample {
                xi,
                i0,
                i2,
                c,
                singular,
            })
        })
        .collect()
}

/// Quadrature weights of the windowed kernel on a grid aligned with the cone.
///
/// `weights[j + W]` belongs to offset `j·dx`, `j = −W..=W`, with `W·dx = cΔt`.
/// Each weight integrates the kernel against the linear-interpolation hat of
/// its node; the hat of the cone-edge node is folded onto its neighbour so the
/// edge weight is exactly zero. `norm` is the sum of the weights, so
/// constants are reproduced to rounding.
#[derive(Debug, Clone)]
pub struct KernelWeights {
    pub half_width: usize,
    pub dx: f64,
    pub weights: Vec<Complex64>,
    pub norm: Complex64,
    pub xi: f64,
}

impl KernelWeights {
    /// Weight of offset `j·dx`, zero outside the window.
    pub fn weight(&self, j: i64) -> Complex64 {
        let w = self.half_width as i64;
        if j.abs() > w {
            Complex64::new(0.0, 0.0)
        } else {
            self.weights[(j + w) as usize]
        }
    }

    /// `weights / norm`, the row actually applied per step.
    pub fn normalized(&self) -> Vec<Complex64> {
        let inv = 1.0 / self.norm;
        self.weights.iter().map(|w| w * inv).collect()
    }

    pub fn window_points(&self) -> usize {
        self.half_width + 1
    }
}

/// Number of grid cells per light-cone step, `cΔt/dx`, required to be an integer ≥ 16.
pub fn window_cells(p: &PhysicalParams, dx: f64) -> Result<usize> {
    if !(dx.is_finite() && dx > 0.0) {
        return Err(Error::Parameter(format!("dx must be > 0, got {dx}")));
    }
    let ratio = p.cone_step() / dx;
    let w = ratio.round();
    if (ratio - w).abs() > 1e-9 * ratio.max(1.0) || w < 1.0 {
        return Err(Error::Configuration(format!(
            "grid not aligned with the light cone: c*dt/dx = {ratio} is not an integer"
        )));
    }
    let w = w as usize;
    if w < MIN_WINDOW {
        return Err(Error::Resolution(format!(
            "c*dt/dx = {w} cells per cone step, at least {MIN_WINDOW} needed"
        )));
    }
    Ok(w)
}

/// Build the kernel weights for time slice `p.dt` on spacing `dx`.
pub fn kernel_weights(l: &Lagrangian, p: &PhysicalParams, dx: f64) -> Result<KernelWeights> {
    p.validate()?;
    let w = window_cells(p, dx)?;
    let xi = p.xi();
    let c_dt = p.cone_step();
    let h = 1.0 / w as f64;
    let q = OscillatoryQuad::with_tol(quad_for(xi).tol / (2 * w) as f64);
    // half[j] for j = 0..=W, accumulated from cells [j h, (j+1) h] in z
    let mut half = vec![Complex64::new(0.0, 0.0); w + 1];
    for cell in 0..w {
        let za = cell as f64 * h;
        let zb = if cell + 1 == w { 1.0 } else { (cell + 1) as f64 * h };
        let est = match l {
            Lagrangian::Relativistic => {
                let (ta, tb) = (za.asin(), zb.asin());
                q.integrate(
                    |t: f64| {
                        let (s, c) = t.sin_cos();
                        [c * (zb - s) / h, c * (s - za) / h]
                    },
                    |t: f64| xi * (1.0 - t.cos()),
                    ta,
                    tb,
                )?
            }
            Lagrangian::Custom { eval, .. } => {
                q.integrate(|z: f64| [(zb - z) / h, (z - za) / h], |z: f64| xi * eval(z), za, zb)?
            }
        };
        let [left, right] = est.values;
        half[cell] += left;
        if cell + 1 == w {
            // the edge node carries no weight: its hat folds onto the neighbour
            half[cell] += right;
        } else {
            half[cell + 1] += right;
        }
    }
    let mut weights = vec![Complex64::new(0.0, 0.0); 2 * w + 1];
    for j in 0..=w {
        // the centre node collects both half-cells
        let v = c_dt * half[j] * if j == 0 { 2.0 } else { 1.0 };
        weights[w + j] = v;
        weights[w - j] = v;
    }
    // pairwise from the outside in so the sum is symmetric and reproducible
    let mut norm = weights[w];
    for j in 1..=w {
        norm += weights[w + j] + weights[w - j];
    }
    Ok(KernelWeights {
        half_width: w,
        dx,
        weights,
        norm,
        xi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel() -> Lagrangian {
        Lagrangian::Relativistic
    }

    #[test]
    fn lagrangian_values() {
        assert_eq!(eval_lagrangian(&rel(), 0.0).unwrap(), 0.0);
        assert!((eval_lagrangian(&rel(), 0.6).unwrap() - 0.2).abs() < 1e-15);
        assert!((eval_lagrangian(&rel(), 1.0 - 1e-15).unwrap() - 1.0).abs() < 1e-7);
        assert!(matches!(eval_lagrangian(&rel(), 1.0), Err(Error::Domain(_))));
        assert!(matches!(eval_lagrangian(&rel(), -1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn custom_lagrangian_is_checked() {
        assert!(Lagrangian::custom("quadratic", |z| 0.5 * z * z).is_ok());
        assert!(Lagrangian::custom("cosh", |z: f64| z.cosh() - 1.0).is_ok());
        assert!(Lagrangian::custom("shifted", |z| 0.5 * z * z + 0.1).is_err());
        assert!(Lagrangian::custom("steep", |z| z * z).is_err());
        assert!(Lagrangian::custom("tilted", |z| 0.5 * z * z + 0.01 * z).is_err());
    }

    #[test]
    fn moments_at_zero_xi() {
        let m = moments(&rel(), 0.0).unwrap();
        assert!((m[0] - 2.0).norm() < 1e-12);
        assert!((m[1] - 2.0 / 3.0).norm() < 1e-12);
        assert!((m[2] - 0.4).norm() < 1e-12);
        assert!(moment_integral(&rel(), 3, 1.0).is_err());
        assert!(moment_integral(&rel(), 0, -1.0).is_err());
    }

    /// Midpoint sum in z with n nodes; the integrand is continuous, with a
    /// square-root derivative singularity at the ends.
    fn brute_i0(xi: f64, n: usize) -> Complex64 {
        let h = 2.0 / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let z = -1.0 + (k as f64 + 0.5) * h;
            acc += Complex64::from_polar(1.0, xi * (1.0 - (1.0 - z * z).sqrt()));
        }
        acc * h
    }

    #[test]
    fn i0_matches_brute_force_riemann_sum() {
        let v = moment_integral(&rel(), 0, 50.0).unwrap();
        let b = brute_i0(50.0, 10_000_000);
        assert!((v - b).norm() < 1e-8, "{v} vs {b}");
    }

    #[test]
    fn closed_form_agrees_with_quadrature() {
        assert_eq!(closed_form_check(0.0).unwrap(), Complex64::new(2.0, 0.0));
        for &xi in &[0.5, 10.0, 24.0, 26.0, 100.0, 500.0, 1000.0] {
            let a = closed_form_check(xi).unwrap();
            let b = moment_integral(&rel(), 0, xi).unwrap();
            assert!((a - b).norm() < 1e-8, "xi={xi}: {a} vs {b}");
        }
    }

    #[test]
    fn stationary_phase_bound() {
        let lead = |xi: f64| {
            (2.0 * std::f64::consts::PI / xi).sqrt() * Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)
        };
        for &xi in &[200.0, 350.0, 1000.0, 5000.0] {
            let v = moment_integral(&rel(), 0, xi).unwrap();
            assert!((v - lead(xi)).norm() <= 2.0 / xi, "xi={xi}");
        }
        // reference value from an independent evaluation
        let v = moment_integral(&rel(), 0, 100.0).unwrap();
        assert!((v - Complex64::new(0.17774, 0.17668)).norm() < 1e-4);
    }

    #[test]
    fn normalization_examples() {
        let p = PhysicalParams::natural(1.0, 1e-12);
        assert!((normalization(&rel(), &p).unwrap() - 2.0 * p.cone_step()).norm() < 1e-22);
        let p = PhysicalParams::from_xi_and_cone_step(100.0, 0.1);
        let n = normalization(&rel(), &p).unwrap();
        let expect = 0.1 * closed_form_check(100.0).unwrap();
        assert!((n - expect).norm() < 1e-9);
        assert!(n.norm() <= 2.0 * p.cone_step());
    }

    #[test]
    fn coefficient_small_and_large_xi() {
        let s = coefficient_curve(&rel(), &[0.0, 0.1]).unwrap();
        assert_eq!(s[0].c, Complex64::new(0.0, 0.0));
        assert!((s[1].c - 0.1 / 6.0).norm() < 0.05 * 0.1 / 6.0);
        assert!((s[1].c - Complex64::new(0.016663, 0.000327)).norm() < 1e-5);
        let s = coefficient_curve(&rel(), &[25.0, 100.0, 400.0, 1000.0]).unwrap();
        let want = [0.0671, 0.0387, 0.0218, 0.0119];
        for (sample, w) in s.iter().zip(want) {
            let d = (sample.c - Complex64::new(0.0, 0.5)).norm();
            assert!((d - w).abs() < 1e-3, "xi={} |C-i/2|={d}", sample.xi);
            assert!((sample.c - sample.xi * sample.i2 / (2.0 * sample.i0)).norm() < 1e-15);
        }
    }

    #[test]
    fn custom_quadratic_matches_fresnel_moment() {
        // L = z²/2 in z-space: I₀ = ∫ e^{iξz²/2} dz over (-1,1) = 2√(π/ξ)(C+iS)(√(ξ/π))
        let l = Lagrangian::custom("quadratic", |z| 0.5 * z * z).unwrap();
        let xi = 30.0;
        let u = (xi / std::f64::consts::PI).sqrt();
        let (c, s) = crate::special::fresnel(u).unwrap();
        let expect = 2.0 / u * Complex64::new(c, s);
        assert!((moment_integral(&l, 0, xi).unwrap() - expect).norm() < 1e-10);
    }

    #[test]
    fn window_rules() {
        let p = PhysicalParams::natural(1.0, 1.0);
        assert!(matches!(
            kernel_weights(&rel(), &p, 1.0 / 64.5),
            Err(Error::Configuration(_))
        ));
        assert!(matches!(
            kernel_weights(&rel(), &p, 1.0 / 8.0),
            Err(Error::Resolution(_))
        ));
        assert_eq!(window_cells(&p, 1.0 / 16.0).unwrap(), 16);
    }

    #[test]
    fn weights_at_zero_xi_sum_to_window_length() {
        let p = PhysicalParams::natural(1.0, 1e-12);
        let kw = kernel_weights(&rel(), &p, p.cone_step() / 32.0).unwrap();
        assert!((kw.norm - 2.0 * p.cone_step()).norm() < 1e-12 * p.cone_step());
    }

    #[test]
    fn weights_sum_to_normalization_and_are_even() {
        let p = PhysicalParams::from_xi_and_cone_step(100.0, 0.5);
        let kw = kernel_weights(&rel(), &p, 0.5 / 64.0).unwrap();
        let n = normalization(&rel(), &p).unwrap();
        assert!((kw.norm - n).norm() < 1e-9);
        let total: Complex64 = kw.normalized().iter().sum();
        assert!((total - 1.0).norm() < 1e-12);
        for j in 0..=64 {
            assert_eq!(kw.weight(j), kw.weight(-j));
        }
        assert_eq!(kw.weight(64), Complex64::new(0.0, 0.0));
        assert_eq!(kw.weight(65), Complex64::new(0.0, 0.0));
        assert_eq!(kw.window_points(), 65);
    }

    /// z-space midpoint oracle for the folded hat weight of node `j ≥ 0`.
    fn brute_weight(xi: f64, w: usize, j: usize, n: usize) -> Complex64 {
        let h = 1.0 / w as f64;
        let kernel = |z: f64| Complex64::from_polar(1.0, xi * (1.0 - (1.0 - z * z).sqrt()));
        let mut acc = Complex64::new(0.0, 0.0);
        let hat_integral = |lo: f64, node: f64| {
            let dz = h / n as f64;
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let z = lo + (k as f64 + 0.5) * dz;
                s += kernel(z) * (1.0 - (z - node).abs() / h);
            }
            s * dz
        };
        let node = j as f64 * h;
        if j > 0 {
            acc += hat_integral(node - h, node);
        }
        if j < w {
            let right = hat_integral(node, node);
            acc += if j == 0 { 2.0 * right } else { right };
        }
        if j + 1 == w {
            acc += hat_integral(node, 1.0);
        }
        acc
    }

    #[test]
    fn weights_match_brute_force_cell_sums() {
        let c_dt = 1.0;
        let p = PhysicalParams::from_xi_and_cone_step(100.0, c_dt);
        let kw = kernel_weights(&rel(), &p, c_dt / 64.0).unwrap();
        for j in [0usize, 1, 17, 40, 62, 63] {
            let b = c_dt * brute_weight(100.0, 64, j, 1_000_000);
            let v = kw.weight(j as i64);
            assert!((v - b).norm() < 1e-9, "j={j}: {v} vs {b}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn moments_bounded_by_interval(xi in 0.0f64..2000.0) {
            let m = moments(&rel(), xi).unwrap();
            prop_assert!(m[0].norm() <= 2.0 + 1e-10);
            prop_assert!(m[1].norm() <= 2.0 / 3.0 + 1e-10);
            prop_assert!(m[2].norm() <= 0.4 + 1e-10);
        }
    }
}
