//! Time-slice propagation `ψ'(x) = N⁻¹ Σ_j w_j e^{−iΦ(y)Δt/ħ} ψ(y)`,
//! `y = x − j·dx`, by direct windowed summation or zero-padded FFT
//! convolution.
//!
//! Each step extends the grid by `W = cΔt/dx` nodes on both sides. Nodes at
//! or beyond the dilated support receive no non-zero contribution and are
//! exactly zero with either backend.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::geometry::SupportRegion;
use crate::kernel::{kernel_weights, KernelWeights, Lagrangian};
use crate::params::PhysicalParams;
use crate::wave::WaveFunction;

/// Optional external potential `Φ(x)`.
pub type Potential<'a> = Option<&'a dyn Fn(f64) -> f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Direct,
    Fft,
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Backend::Direct),
            "fft" => Ok(Backend::Fft),
            _ => Err(Error::Config(format!("unknown backend '{s}' (direct|fft)"))),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Direct => "direct",
            Backend::Fft => "fft",
        })
    }
}

/// Kernel row for one time slice plus the FFT state reused across steps.
pub struct Propagator {
    pub kernel: KernelWeights,
    pub params: PhysicalParams,
    row: Vec<Complex64>,
    planner: Mutex<FftPlanner<f64>>,
    spectra: Mutex<HashMap<usize, Arc<Vec<Complex64>>>>,
}

impl fmt::Debug for Propagator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Propagator")
            .field("params", &self.params)
            .field("half_width", &self.kernel.half_width)
            .field("xi", &self.kernel.xi)
            .finish()
    }
}

impl Propagator {
    pub fn new(l: &Lagrangian, params: PhysicalParams, dx: f64) -> Result<Self> {
        Ok(Propagator::from_weights(kernel_weights(l, &params, dx)?, params))
    }

    pub fn from_weights(kernel: KernelWeights, params: PhysicalParams) -> Self {
        let row = kernel.normalized();
        Propagator {
            kernel,
            params,
            row,
            planner: Mutex::new(FftPlanner::new()),
            spectra: Mutex::new(HashMap::new()),
        }
    }

    pub fn half_width(&self) -> usize {
        self.kernel.half_width
    }

    /// The normalized row `w_j / N`, `j = −W..=W`.
    pub fn row(&self) -> &[Complex64] {
        &self.row
    }

    fn check_grid(&self, psi: &WaveFunction) -> Result<()> {
        if ((psi.dx - self.kernel.dx) / self.kernel.dx).abs() > 1e-12 {
            return Err(Error::Configuration(format!(
                "grid spacing {} does not match the kernel spacing {}",
                psi.dx, self.kernel.dx
            )));
        }
        psi.check_finite()
    }

    fn source(&self, psi: &WaveFunction, phi: Potential) -> Vec<Complex64> {
        match phi {
            None => psi.values.clone(),
            Some(f) => {
                let s = -self.params.dt / self.params.hbar;
                psi.values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        if *v == Complex64::new(0.0, 0.0) {
                            *v
                        } else {
                            v * Complex64::from_polar(1.0, s * f(psi.x(k)))
                        }
                    })
                    .collect()
            }
        }
    }

    fn extended(&self, psi: &WaveFunction, values: Vec<Complex64>) -> WaveFunction {
        let w = self.half_width();
        WaveFunction {
            origin: psi.origin - w as f64 * psi.dx,
            dx: psi.dx,
            values,
            t: psi.t + self.params.dt,
        }
    }

    /// One slice by direct summation in a fixed order.
    pub fn step_direct(&self, psi: &WaveFunction, phi: Potential) -> Result<WaveFunction> {
        self.check_grid(psi)?;
        let src = self.source(psi, phi);
        let n = src.len();
        let w2 = 2 * self.half_width();
        let mut out = vec![Complex64::new(0.0, 0.0); n + w2];
        if n == 0 {
            return Ok(self.extended(psi, out));
        }
        // the edge entries of the row are exactly zero and are skipped
        for (i, o) in out.iter_mut().enumerate() {
            let q_lo = i.saturating_sub(n - 1).max(1);
            let q_hi = i.min(w2 - 1);
            let mut acc = Complex64::new(0.0, 0.0);
            for q in q_lo..=q_hi {
                acc += self.row[q] * src[i - q];
            }
            *o = acc;
        }
        Ok(self.extended(psi, out))
    }

    fn spectrum(&self, size: usize) -> Arc<Vec<Complex64>> {
        let mut cache = self.spectra.lock().expect("spectrum cache poisoned");
        cache
            .entry(size)
            .or_insert_with(|| {
                let mut buf = vec![Complex64::new(0.0, 0.0); size];
                buf[..self.row.len()].copy_from_slice(&self.row);
                let fft = self.planner.lock().expect("planner poisoned").plan_fft_forward(size);
                fft.process(&mut buf);
                Arc::new(buf)
            })
            .clone()
    }

    /// One slice by zero-padded FFT convolution, masked to the nodes the
    /// direct sum can reach.
    pub fn step_fft(&self, psi: &WaveFunction, phi: Potential) -> Result<WaveFunction> {
        self.check_grid(psi)?;
        let src = self.source(psi, phi);
        let n = src.len();
        let w2 = 2 * self.half_width();
        let len = n + w2;
        if n == 0 {
            return Ok(self.extended(psi, vec![Complex64::new(0.0, 0.0); len]));
        }
        let size = len.next_power_of_two();
        let spec = self.spectrum(size);
        let mut buf = vec![Complex64::new(0.0, 0.0); size];
        buf[..n].copy_from_slice(&src);
        let (fwd, inv) = {
            let mut p = self.planner.lock().expect("planner poisoned");
            (p.plan_fft_forward(size), p.plan_fft_inverse(size))
        };
        fwd.process(&mut buf);
        buf.iter_mut().zip(spec.iter()).for_each(|(b, s)| *b *= s);
        inv.process(&mut buf);
        let scale = 1.0 / size as f64;
        // prefix counts of non-zero sources; output i sees sources i-q, 0 < q < 2W
        let mut nz = vec![0u32; n + 1];
        for k in 0..n {
            nz[k + 1] = nz[k] + u32::from(src[k] != Complex64::new(0.0, 0.0));
        }
        let out = (0..len)
            .map(|i| {
                let hi = i.min(n); // exclusive: k <= i-1
                let lo = (i + 1).saturating_sub(w2).min(hi); // k >= i-2W+1
                if nz[hi] > nz[lo] {
                    buf[i] * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok(self.extended(psi, out))
    }

    pub fn step(&self, psi: &WaveFunction, backend: Backend, phi: Potential) -> Result<WaveFunction> {
        match backend {
            Backend::Direct => self.step_direct(psi, phi),
            Backend::Fft => self.step_fft(psi, phi),
        }
    }
}

/// Drop stored nodes below `tol·max|ψ|`, keeping a margin of `margin` nodes.
pub fn trim(psi: &WaveFunction, tol: f64, margin: usize) -> WaveFunction {
    let thr = tol * psi.max_abs();
    let first = psi.values.iter().position(|v| v.norm() > thr);
    let last = psi.values.iter().rposition(|v| v.norm() > thr);
    match (first, last) {
        (Some(a), Some(b)) => psi.slice(a.saturating_sub(margin), (b + margin + 1).min(psi.len())),
        _ => psi.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub backend: Backend,
    /// Keep every `stride`-th state (the final state is always kept).
    pub stride: usize,
    /// Optional relative threshold for trimming the stored window.
    pub trim: Option<f64>,
    /// Abort when the norm exceeds this multiple of the initial norm.
    pub blowup: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            backend: Backend::Fft,
            stride: 1,
            trim: None,
            blowup: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<WaveFunction>,
    /// Support before the first step and after each step.
    pub support_history: Vec<SupportRegion>,
    /// L² norm before the first step and after each step.
    pub norm_history: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &WaveFunction {
        self.snapshots
            .last()
            .expect("trajectory holds at least the initial state")
    }

    pub fn final_support(&self) -> &SupportRegion {
        self.support_history.last().expect("non-empty history")
    }
}

/// March `n_steps` slices from `psi0`, whose support is `support0`.
pub fn run(
    prop: &Propagator,
    psi0: &WaveFunction,
    support0: &SupportRegion,
    n_steps: usize,
    opts: RunOptions,
    phi: Potential,
) -> Result<Trajectory> {
    run_with(prop, psi0, support0, n_steps, opts, phi, |_, _| {})
}

/// As [`run`], calling `observe(step, state)` after every step.
pub fn run_with<F: FnMut(usize, &WaveFunction)>(
    prop: &Propagator,
    psi0: &WaveFunction,
    support0: &SupportRegion,
    n_steps: usize,
    opts: RunOptions,
    phi: Potential,
    mut observe: F,
) -> Result<Trajectory> {
    let stride = opts.stride.max(1);
    let r = prop.params.cone_step();
    let n0 = psi0.norm();
    let limit = opts.blowup * n0;
    let mut traj = Trajectory {
        snapshots: vec![psi0.clone()],
        support_history: vec![support0.clone()],
        norm_history: vec![n0],
    };
    let mut psi = psi0.clone();
    let mut support = support0.clone();
    for step in 1..=n_steps {
        psi = prop.step(&psi, opts.backend, phi)?;
        if let Some(tol) = opts.trim {
            psi = trim(&psi, tol, prop.half_width());
        }
        // anchor the time stamp to avoid accumulating rounding
        psi.t = psi0.t + step as f64 * prop.params.dt;
        support = support.dilate(r);
        let norm = psi.norm();
        if !(norm <= limit) {
            return Err(Error::Stability { step, norm, limit });
        }
        observe(step, &psi);
        traj.norm_history.push(norm);
        traj.support_history.push(support.clone());
        if step % stride == 0 || step == n_steps {
            traj.snapshots.push(psi.clone());
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::InitialData;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn prop(xi: f64, c_dt: f64, w: usize) -> Propagator {
        let p = PhysicalParams::from_xi_and_cone_step(xi, c_dt);
        Propagator::new(&Lagrangian::Relativistic, p, c_dt / w as f64).unwrap()
    }

    fn random_wave(n: usize, dx: f64, seed: u64) -> WaveFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        WaveFunction::from_fn(0.0, dx, n, |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn constant_interior_is_preserved() {
        let pr = prop(100.0, 0.5, 32);
        let psi = WaveFunction::from_fn(-5.0, pr.kernel.dx, 641, |_| Complex64::new(1.0, 0.0));
        let out = pr.step_direct(&psi, None).unwrap();
        let w = pr.half_width();
        // nodes whose whole window lies inside the data
        for i in 2 * w..out.len() - 2 * w {
            assert!((out.values[i] - 1.0).norm() < 1e-12);
        }
        assert_eq!(out.len(), psi.len() + 2 * w);
        assert!((out.origin - (psi.origin - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn impulse_reproduces_the_row() {
        let pr = prop(100.0, 1.0, 64);
        let psi = WaveFunction::from_fn(0.0, pr.kernel.dx, 1, |_| Complex64::new(1.0, 0.0));
        for backend in [Backend::Direct, Backend::Fft] {
            let out = pr.step(&psi, backend, None).unwrap();
            assert_eq!(out.len(), 129);
            for (a, b) in out.values.iter().zip(pr.row()) {
                assert!((a - b).norm() < 1e-10);
            }
            assert_eq!(out.values[0], Complex64::new(0.0, 0.0));
            assert_eq!(out.values[128], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn boundary_node_is_exactly_zero() {
        let pr = prop(100.0, 1.0, 64);
        let psi = InitialData::Box(vec![(-1.0, 1.0)]).sample(pr.kernel.dx).unwrap();
        for backend in [Backend::Direct, Backend::Fft] {
            let out = pr.step(&psi, backend, None).unwrap();
            let edge = out.node_of(2.0).unwrap() as usize;
            assert_eq!(out.values[edge], Complex64::new(0.0, 0.0));
            assert_eq!(out.values[0], Complex64::new(0.0, 0.0));
            assert_ne!(out.values[edge - 1], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn backends_agree_on_random_data() {
        let pr = prop(100.0, 1.0, 64);
        let psi = random_wave(4096, pr.kernel.dx, 7);
        let a = pr.step_direct(&psi, None).unwrap();
        let b = pr.step_fft(&psi, None).unwrap();
        assert!(rel_l2(&b.values, &a.values) < 1e-10);
        assert!((a.norm() - b.norm()).abs() < 1e-12 * a.norm());
    }

    #[test]
    fn potential_is_applied_at_the_source_point() {
        let pr = prop(100.0, 1.0, 16);
        let phi = |x: f64| 3.0 * x;
        let psi = WaveFunction::from_fn(0.25, pr.kernel.dx, 1, |_| Complex64::new(1.0, 0.0));
        let out = pr.step_direct(&psi, Some(&phi)).unwrap();
        let phase = Complex64::from_polar(1.0, -pr.params.dt * 0.75);
        for (a, b) in out.values.iter().zip(pr.row()) {
            assert!((a - b * phase).norm() < 1e-14);
        }
        let fft = pr.step_fft(&psi, Some(&phi)).unwrap();
        assert!(rel_l2(&fft.values, &out.values) < 1e-10);
    }

    #[test]
    fn misaligned_and_bad_input_rejected() {
        let pr = prop(100.0, 1.0, 16);
        let psi = WaveFunction::from_fn(0.0, 0.01, 4, |_| Complex64::new(1.0, 0.0));
        assert!(matches!(pr.step_direct(&psi, None), Err(Error::Configuration(_))));
        let psi = WaveFunction::from_fn(0.0, pr.kernel.dx, 4, |_| Complex64::new(f64::NAN, 0.0));
        assert!(matches!(pr.step_fft(&psi, None), Err(Error::Data(_))));
    }

    #[test]
    fn parity_is_preserved() {
        let pr = prop(50.0, 0.5, 16);
        let psi = InitialData::Gaussian {
            sigma: 0.7,
            center: 0.0,
            cutoff: 3.0,
        }
        .sample(pr.kernel.dx)
        .unwrap();
        let phi = |x: f64| x * x;
        let traj = run(
            &pr,
            &psi,
            &psi.nonzero_support(),
            5,
            RunOptions {
                backend: Backend::Direct,
                ..Default::default()
            },
            Some(&phi),
        )
        .unwrap();
        let last = traj.last();
        let n = last.len();
        for i in 0..n / 2 {
            assert!((last.values[i] - last.values[n - 1 - i]).norm() < 1e-14);
        }
    }

    #[test]
    fn run_tracks_support_and_records_norms() {
        let pr = prop(100.0, 1.0, 16);
        let psi = InitialData::Box(vec![(-1.0, 1.0)]).sample(pr.kernel.dx).unwrap();
        let s0 = psi.nonzero_support();
        let traj = run(&pr, &psi, &s0, 0, RunOptions::default(), None).unwrap();
        assert_eq!(traj.snapshots.len(), 1);
        let traj = run(
            &pr,
            &psi,
            &s0,
            7,
            RunOptions {
                stride: 3,
                ..Default::default()
            },
            None,
        )
        .unwrap();
        assert_eq!(traj.snapshots.len(), 4); // 0, 3, 6, 7
        assert_eq!(traj.norm_history.len(), 8);
        for k in 0..7 {
            assert_eq!(traj.support_history[k + 1], traj.support_history[k].dilate(1.0));
        }
        assert!((traj.last().t - 7.0 * pr.params.dt).abs() < 1e-15);
    }

    #[test]
    fn blowup_is_reported() {
        let pr = prop(100.0, 1.0, 16);
        let psi = InitialData::Box(vec![(-1.0, 1.0)]).sample(pr.kernel.dx).unwrap();
        let opts = RunOptions {
            blowup: 0.5,
            ..Default::default()
        };
        let err = run(&pr, &psi, &psi.nonzero_support(), 3, opts, None).unwrap_err();
        assert!(matches!(err, Error::Stability { step: 1, .. }));
    }

    #[test]
    fn trimming_keeps_the_bulk() {
        let psi = WaveFunction::from_fn(-10.0, 0.1, 201, |x| Complex64::new((-x * x).exp(), 0.0));
        let t = trim(&psi, 1e-8, 3);
        assert!(t.len() < psi.len());
        assert!((t.norm() - psi.norm()).abs() < 1e-8);
        assert_eq!(t.sample(0.0), psi.sample(0.0));
    }
}
