//! Harmonic oscillator inside the light cone, in the scaled variables
//! `y = x/ℓ`, `τ = ωt`, `ℓ = √(ħ/mω)`, where the equation reads
//! `2iU_τ = −U_yy + y²U` on `|y| < y₀ + τ/ε`.
//!
//! The outer field `V⁰` is the whole-line oscillator evolution of the initial
//! data; `W⁰` corrects it in a layer of width `ε` at each cone edge.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::quad::{GaussLegendre, OscillatoryQuad};
use crate::wave::{InitialData, WaveFunction};

/// Largest mode index supported by the recurrence.
pub const MAX_MODES: usize = 200;

const RESCALE: f64 = 1e150;

/// Hermite functions `ψ_0(y) … ψ_n(y)`, orthonormal on the line.
///
/// Uses `ψ_k = √(2/k)·y·ψ_{k−1} − √((k−1)/k)·ψ_{k−2}` on values with the
/// Gaussian factor split off and a running exponent, so neither large `|y|`
/// nor large `n` under- or overflows.
pub fn hermite_functions(n_max: usize, y: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut log_scale = -0.5 * y * y;
    let mut p0 = PI.powf(-0.25);
    let mut scales = Vec::with_capacity(n_max + 1);
    out.push(p0);
    scales.push(log_scale);
    if n_max >= 1 {
        let mut p1 = 2f64.sqrt() * y * p0;
        out.push(p1);
        scales.push(log_scale);
        for k in 2..=n_max {
            let kf = k as f64;
            let p2 = (2.0 / kf).sqrt() * y * p1 - ((kf - 1.0) / kf).sqrt() * p0;
            p0 = p1;
            p1 = p2;
            if p1.abs() > RESCALE {
                p0 /= RESCALE;
                p1 /= RESCALE;
                log_scale += RESCALE.ln();
            }
            out.push(p1);
            scales.push(log_scale);
        }
    }
    out.iter().zip(scales).map(|(v, s)| v * s.exp()).collect()
}

fn trapezoid(y: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..y.len()).map(|i| 0.5 * (f(i) + f(i - 1)) * (y[i] - y[i - 1])).sum()
}

/// `modes[n][i] = ψ_n(y_i)` for `n ≤ n_max`.
pub fn modes(n_max: usize, y_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    if n_max > MAX_MODES {
        return Err(Error::Parameter(format!(
            "at most {MAX_MODES} modes supported, got {n_max}"
        )));
    }
    let mut table = vec![Vec::with_capacity(y_grid.len()); n_max + 1];
    for &y in y_grid {
        for (n, v) in hermite_functions(n_max, y).into_iter().enumerate() {
            table[n].push(v);
        }
    }
    let top = &table[n_max];
    let mass = trapezoid(y_grid, |i| top[i] * top[i]);
    if (1.0 - mass).abs() > 1e-6 {
        return Err(Error::Domain(format!(
            "y-grid too narrow or coarse for mode {n_max}: captured mass {mass}"
        )));
    }
    Ok(table)
}

/// Outer solution `V⁰(y, τ)` on the whole line.
pub trait OuterField {
    fn outer(&self, y: f64, tau: f64) -> Complex64;
}

/// Oscillator coefficients of the initial data plus the cone scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeExpansion {
    pub coeffs: Vec<Complex64>,
    /// Scaled half-width of the initial support.
    pub y0: f64,
    pub eps: f64,
}

impl ModeExpansion {
    /// Scaled energies `n + 1/2`.
    pub fn energies(&self) -> Vec<f64> {
        (0..self.coeffs.len()).map(|n| n as f64 + 0.5).collect()
    }

    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Cone half-width `y₀ + τ/ε` in scaled units.
    pub fn cone_edge(&self, tau: f64) -> f64 {
        self.y0 + tau / self.eps
    }
}

impl OuterField for ModeExpansion {
    fn outer(&self, y: f64, tau: f64) -> Complex64 {
        let n = self.coeffs.len();
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        hermite_functions(n - 1, y)
            .into_iter()
            .zip(&self.coeffs)
            .enumerate()
            .map(|(k, (psi, a))| a * Complex64::from_polar(psi, -(k as f64 + 0.5) * tau))
            .sum()
    }
}

/// Coefficients `a_n = ⟨ψ_n, φ⟩` of data given on a `y`-grid, with the
/// `L²` residual of the truncated expansion on that grid.
pub fn expand_initial(phi0: &WaveFunction, n_max: usize, y0: f64, eps: f64) -> Result<(ModeExpansion, f64)> {
    if n_max > MAX_MODES {
        return Err(Error::Parameter(format!(
            "at most {MAX_MODES} modes supported, got {n_max}"
        )));
    }
    phi0.check_finite()?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let mut tables = Vec::with_capacity(phi0.len());
    for (i, v) in phi0.values.iter().enumerate() {
        let h = hermite_functions(n_max, phi0.x(i));
        for (a, psi) in coeffs.iter_mut().zip(&h) {
            *a += v * psi * phi0.dx;
        }
        tables.push(h);
    }
    let residual = phi0
        .values
        .iter()
        .zip(&tables)
        .map(|(v, h)| {
            let approx: Complex64 = coeffs.iter().zip(h).map(|(a, p)| a * p).sum();
            (v - approx).norm_sqr()
        })
        .sum::<f64>();
    let residual = (residual * phi0.dx).sqrt();
    Ok((ModeExpansion { coeffs, y0, eps }, residual))
}

/// `V⁰(y, τ) = Σ a_n e^{−i(n+½)τ} ψ_n(y)`.
pub fn outer_solution(me: &ModeExpansion, y: f64, tau: f64) -> Complex64 {
    me.outer(y, tau)
}

/// Exact whole-line evolution of compactly supported data through the
/// Mehler kernel `(2πi sin τ)^{−1/2} exp{i[(y²+y'²)cos τ − 2yy']/(2 sin τ)}`.
#[derive(Debug, Clone)]
pub struct MehlerOuter {
    pub data: InitialData,
    /// Scale from scaled to physical position for `data`.
    pub length: f64,
    pub quad: OscillatoryQuad,
}

impl MehlerOuter {
    pub fn new(data: InitialData, length: f64) -> Self {
        MehlerOuter {
            data,
            length,
            quad: OscillatoryQuad::with_tol(1e-11),
        }
    }

    fn initial(&self, y: f64) -> Complex64 {
        self.data.eval(y * self.length)
    }

    pub fn try_outer(&self, y: f64, tau: f64) -> Result<Complex64> {
        let (s, c) = tau.sin_cos();
        let half_periods = tau / PI;
        if (half_periods - half_periods.round()).abs() < 1e-12 {
            // V⁰(y, kπ) = e^{−ikπ/2} φ((−1)^k y)
            let k = half_periods.round() as i64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            return Ok(Complex64::from_polar(1.0, -0.5 * PI * k as f64) * self.initial(sign * y));
        }
        let hull = self
            .data
            .support()
            .hull()
            .ok_or_else(|| Error::Parameter("outer field needs compactly supported data".into()))?;
        let (lo, hi) = (hull.lo / self.length, hull.hi / self.length);
        let pre = (Complex64::new(0.0, 2.0 * PI * s)).sqrt().inv();
        let phase0 = y * y * c / (2.0 * s);
        let est = self.quad.integrate(
            |u: f64| {
                let v = self.initial(u);
                [v.re, v.im]
            },
            |u: f64| (u * u * c - 2.0 * y * u) / (2.0 * s),
            lo,
            hi,
        )?;
        let [re, im] = est.values;
        Ok(pre * Complex64::from_polar(1.0, phase0) * (re + Complex64::i() * im))
    }
}

impl OuterField for MehlerOuter {
    fn outer(&self, y: f64, tau: f64) -> Complex64 {
        self.try_outer(y, tau)
            .unwrap_or_else(|_| Complex64::new(f64::NAN, f64::NAN))
    }
}

/// `√(τ² − 1)` on the principal branch (`+i√(1−τ²)` for `τ < 1`).
fn layer_root(tau: f64) -> Complex64 {
    Complex64::new(tau * tau - 1.0, 0.0).sqrt()
}

/// Outer field plus edge corrections on a cone of half-width `y₀ + τ/ε`.
#[derive(Debug, Clone, Copy)]
pub struct UniformExpansion<'a, F: OuterField> {
    pub outer: &'a F,
    pub y0: f64,
    pub eps: f64,
}

impl<'a, F: OuterField> UniformExpansion<'a, F> {
    pub fn new(outer: &'a F, y0: f64, eps: f64) -> Self {
        UniformExpansion { outer, y0, eps }
    }

    pub fn cone_edge(&self, tau: f64) -> f64 {
        self.y0 + tau / self.eps
    }

    /// Right-edge layer `W⁰(η, τ) = −V⁰(y₀+τ/ε, τ)·e^{−η[i + √(τ²−1)]}`.
    pub fn boundary_layer(&self, eta: f64, tau: f64) -> Complex64 {
        let edge = self.outer.outer(self.cone_edge(tau), tau);
        -edge * (-(Complex64::i() + layer_root(tau)) * eta).exp()
    }

    fn left_layer(&self, eta: f64, tau: f64) -> Complex64 {
        let edge = self.outer.outer(-self.cone_edge(tau), tau);
        -edge * (-(Complex64::i() + layer_root(tau)) * eta).exp()
    }

    /// `V⁰` plus both layers inside the cone, zero on and outside it.
    pub fn eval(&self, y: f64, tau: f64) -> Complex64 {
        let edge = self.cone_edge(tau);
        if !(y.abs() < edge) {
            return Complex64::new(0.0, 0.0);
        }
        let eta_r = (edge - y) / self.eps;
        let eta_l = (edge + y) / self.eps;
        self.outer.outer(y, tau) + self.boundary_layer(eta_r, tau) + self.left_layer(eta_l, tau)
    }
}

/// Right-edge boundary layer for a mode expansion.
pub fn boundary_layer(me: &ModeExpansion, eta: f64, tau: f64) -> Complex64 {
    UniformExpansion::new(me, me.y0, me.eps).boundary_layer(eta, tau)
}

/// Uniform expansion for a mode expansion.
pub fn uniform_expansion(me: &ModeExpansion, y: f64, tau: f64) -> Complex64 {
    UniformExpansion::new(me, me.y0, me.eps).eval(y, tau)
}

/// Value of the energy double sum at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySeries {
    /// `Σ a_m ā_n E_m e^{i(E_n−E_m)t/ħ} O_mn(t)`; complex while the overlaps
    /// differ from the identity.
    pub value: Complex64,
    /// Large-cone limit `Σ|a_m|² E_m`.
    pub limit: f64,
    /// Largest `|a_m|` among dropped coefficients (`|a| < 1e-14`).
    pub dropped: f64,
}

/// Energy over the cone `|x| < x₀ + ct`, physical units.
pub fn energy_series(me: &ModeExpansion, p: &PhysicalParams, t: f64) -> Result<EnergySeries> {
    if !(p.omega > 0.0) {
        return Err(Error::Parameter("energy series needs omega > 0".into()));
    }
    let tau = p.omega * t;
    let edge = me.cone_edge(tau);
    let e_unit = p.hbar * p.omega;
    let kept: Vec<usize> = (0..me.coeffs.len()).filter(|&n| me.coeffs[n].norm() >= 1e-14).collect();
    let dropped = me
        .coeffs
        .iter()
        .filter(|a| a.norm() < 1e-14)
        .map(|a| a.norm())
        .fold(0.0, f64::max);
    let n_top = kept.last().copied().unwrap_or(0);
    // O_mn over (−edge, edge): composite Gauss–Legendre, panels of width ≤ 1/2
    let gl = GaussLegendre::new(20);
    let panels = ((2.0 * edge) / 0.5).ceil().max(1.0) as usize;
    let width = 2.0 * edge / panels as f64;
    let mut overlaps = vec![vec![0.0; kept.len()]; kept.len()];
    for k in 0..panels {
        let a = -edge + k as f64 * width;
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            let y = a + 0.5 * width * (x + 1.0);
            let h = hermite_functions(n_top, y);
            let ww = 0.5 * width * w;
            for (i, &m) in kept.iter().enumerate() {
                for (j, &n) in kept.iter().enumerate() {
                    overlaps[i][j] += ww * h[m] * h[n];
                }
            }
        }
    }
    let mut value = Complex64::new(0.0, 0.0);
    for (i, &m) in kept.iter().enumerate() {
        let em = m as f64 + 0.5;
        for (j, &n) in kept.iter().enumerate() {
            let en = n as f64 + 0.5;
            value += me.coeffs[m] * me.coeffs[n].conj() * em * Complex64::from_polar(overlaps[i][j], (en - em) * tau);
        }
    }
    let limit = kept
        .iter()
        .map(|&m| me.coeffs[m].norm_sqr() * (m as f64 + 0.5))
        .sum::<f64>();
    Ok(EnergySeries {
        value: value * e_unit,
        limit: limit * e_unit,
        dropped,
    })
}
