//! Reference solvers for `iħψ_t = −(ħ²/2m)ψ_xx + Φψ`: exact spectral free
//! evolution on a periodic grid, and Crank–Nicolson on the expanding light
//! cone with zero Dirichlet values on and outside it.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::geometry::{LightConeGeometry, SupportRegion};
use crate::params::PhysicalParams;
use crate::propagator::{Potential, Trajectory};
use crate::wave::WaveFunction;

/// Mass fraction allowed in the outer bands of a periodic grid.
pub const DEFAULT_WRAP_TOL: f64 = 1e-12;

/// Exact free evolution in Fourier space, with Strang splitting when a
/// potential is present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSolver {
    pub m: f64,
    pub hbar: f64,
    /// Largest mass fraction tolerated in the outer sixteenth of the grid on
    /// either side after a step.
    pub wrap_tol: f64,
}

impl SpectralSolver {
    pub fn new(p: &PhysicalParams) -> Self {
        SpectralSolver {
            m: p.m,
            hbar: p.hbar,
            wrap_tol: DEFAULT_WRAP_TOL,
        }
    }

    pub fn with_wrap_tol(mut self, tol: f64) -> Self {
        self.wrap_tol = tol;
        self
    }

    fn wavenumbers(n: usize, dx: f64) -> Vec<f64> {
        let base = 2.0 * std::f64::consts::PI / (n as f64 * dx);
        (0..n)
            .map(|j| {
                let s = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                s * base
            })
            .collect()
    }

    /// Multiply by `e^{−iħk²t/2m}` in Fourier space; the grid is one period.
    pub fn kinetic(&self, psi: &mut WaveFunction, t: f64) {
        let n = psi.len();
        if n == 0 {
            return;
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(n).process(&mut psi.values);
        let scale = 1.0 / n as f64;
        let a = -self.hbar * t / (2.0 * self.m);
        for (v, k) in psi.values.iter_mut().zip(Self::wavenumbers(n, psi.dx)) {
            *v *= Complex64::from_polar(scale, a * k * k);
        }
        planner.plan_fft_inverse(n).process(&mut psi.values);
        psi.t += t;
    }

    fn potential_phase(&self, psi: &mut WaveFunction, phi: &dyn Fn(f64) -> f64, t: f64) {
        let s = -t / self.hbar;
        for i in 0..psi.len() {
            let x = psi.x(i);
            psi.values[i] *= Complex64::from_polar(1.0, s * phi(x));
        }
    }

    /// Fraction of `|ψ|²` in the outer sixteenth of the grid on each side.
    pub fn edge_mass_fraction(psi: &WaveFunction) -> f64 {
        let n = psi.len();
        let band = (n / 16).max(1);
        let total: f64 = psi.values.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let edge: f64 = psi.values[..band]
            .iter()
            .chain(&psi.values[n - band..])
            .map(|v| v.norm_sqr())
            .sum();
        edge / total
    }

    fn check_wrap(&self, psi: &WaveFunction) -> Result<()> {
        let f = Self::edge_mass_fraction(psi);
        if f > self.wrap_tol {
            return Err(Error::Domain(format!(
                "periodic grid too small: edge mass fraction {f:e} exceeds {:e}",
                self.wrap_tol
            )));
        }
        Ok(())
    }

    /// Advance by `dt`: exact kinetic phase, or half-potential / kinetic /
    /// half-potential when `phi` is given.
    pub fn step(&self, psi: &WaveFunction, dt: f64, phi: Potential) -> Result<WaveFunction> {
        psi.check_finite()?;
        let mut out = psi.clone();
        match phi {
            None => self.kinetic(&mut out, dt),
            Some(f) => {
                self.potential_phase(&mut out, f, 0.5 * dt);
                self.kinetic(&mut out, dt);
                self.potential_phase(&mut out, f, 0.5 * dt);
            }
        }
        self.check_wrap(&out)?;
        Ok(out)
    }

    /// `n` equal steps spanning `t`.
    pub fn evolve(&self, psi: &WaveFunction, t: f64, n: usize, phi: Potential) -> Result<WaveFunction> {
        let mut out = psi.clone();
        let h = t / n.max(1) as f64;
        for _ in 0..n.max(1) {
            out = self.step(&out, h, phi)?;
        }
        Ok(out)
    }
}

/// One free-space step of length `p.dt` with the default wrap tolerance.
pub fn free_step(psi: &WaveFunction, p: &PhysicalParams, phi: Potential) -> Result<WaveFunction> {
    SpectralSolver::new(p).step(psi, p.dt, phi)
}

/// Thread-safe potential `Φ(x)` owned by a solver.
pub type SharedPotential = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Crank–Nicolson on the union of active node intervals.
///
/// Nodes sit at `k·dx`. Each active interval is a pair of boundary node
/// indices holding zero; interior nodes evolve. Once per block of `q`
/// substeps, at the block's midpoint, each interval grows by `p` nodes per
/// side, so after `s` substeps the boundary sits at the cone position
/// `c·s·dt_pde` whenever `q` divides `s`. Intervals that overlap are merged
/// and solved as one from then on.
pub struct ConeSolver {
    m: f64,
    hbar: f64,
    c: f64,
    dx: f64,
    /// Node index of `values[0]`.
    k_lo: i64,
    values: Vec<Complex64>,
    active: Vec<(i64, i64)>,
    grow_nodes: i64,
    grow_every: u64,
    dt_pde: f64,
    substeps: u64,
    t: f64,
    phi: Option<SharedPotential>,
    merges: Vec<f64>,
}

impl std::fmt::Debug for ConeSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConeSolver")
            .field("c", &self.c)
            .field("dx", &self.dx)
            .field("dt_pde", &self.dt_pde)
            .field("active", &self.active)
            .field("t", &self.t)
            .finish()
    }
}

/// Growth schedule `(nodes, every)` and substep length for a target step.
pub fn growth_schedule(c: f64, dx: f64, dt_target: f64) -> (i64, u64, f64) {
    if c == 0.0 {
        return (0, 1, dt_target);
    }
    let r = c * dt_target / dx;
    if r >= 1.0 {
        let p = r.floor() as i64;
        (p, 1, p as f64 * dx / c)
    } else {
        let q = (1.0 / r).ceil() as u64;
        (1, q, dx / (q as f64 * c))
    }
}

impl ConeSolver {
    /// `psi0` must live on the lattice `k·dx`; `support` endpoints are rounded
    /// outward to nodes and become the first Dirichlet nodes.
    pub fn new(
        psi0: &WaveFunction,
        support: &SupportRegion,
        p: &PhysicalParams,
        dt_target: f64,
        phi: Option<SharedPotential>,
    ) -> Result<Self> {
        if !(p.m > 0.0 && p.hbar > 0.0 && p.c >= 0.0 && p.c.is_finite()) {
            return Err(Error::Parameter("cone solver needs m, hbar > 0 and c >= 0".into()));
        }
        if !(dt_target > 0.0) {
            return Err(Error::Parameter(format!("dt_pde must be > 0, got {dt_target}")));
        }
        psi0.check_finite()?;
        let dx = psi0.dx;
        let k0 = psi0.origin / dx;
        if (k0 - k0.round()).abs() > 1e-6 {
            return Err(Error::Configuration(format!(
                "initial grid origin {} is not a multiple of dx = {dx}",
                psi0.origin
            )));
        }
        let k0 = k0.round() as i64;
        let mut active: Vec<(i64, i64)> = Vec::new();
        for iv in support.intervals() {
            let a = (iv.lo / dx + 1e-9).floor() as i64;
            let b = (iv.hi / dx - 1e-9).ceil() as i64;
            match active.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => active.push((a, b.max(a))),
            }
        }
        if active.is_empty() {
            return Err(Error::Parameter("cone solver needs a non-empty support".into()));
        }
        let lo = active[0].0.min(k0);
        let hi = active.last().unwrap().1.max(k0 + psi0.len() as i64 - 1);
        let mut values = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (i, v) in psi0.values.iter().enumerate() {
            let k = k0 + i as i64;
            if active.iter().any(|&(a, b)| a < k && k < b) {
                values[(k - lo) as usize] = *v;
            }
        }
        let (grow_nodes, grow_every, dt_pde) = growth_schedule(p.c, dx, dt_target);
        Ok(ConeSolver {
            m: p.m,
            hbar: p.hbar,
            c: p.c,
            dx,
            k_lo: lo,
            values,
            active,
            grow_nodes,
            grow_every,
            dt_pde,
            substeps: 0,
            t: psi0.t,
            phi,
            merges: Vec::new(),
        })
    }

    pub fn dt_pde(&self) -> f64 {
        self.dt_pde
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Times at which intervals merged.
    pub fn merge_times(&self) -> &[f64] {
        &self.merges
    }

    /// Boundary node indices of the active intervals.
    pub fn active_nodes(&self) -> &[(i64, i64)] {
        &self.active
    }

    pub fn active_region(&self) -> SupportRegion {
        SupportRegion::new(
            self.active
                .iter()
                .map(|&(a, b)| (a as f64 * self.dx, b as f64 * self.dx)),
        )
        .unwrap_or_default()
    }

    pub fn state(&self) -> WaveFunction {
        WaveFunction {
            origin: self.k_lo as f64 * self.dx,
            dx: self.dx,
            values: self.values.clone(),
            t: self.t,
        }
    }

    pub fn value_at_node(&self, k: i64) -> Complex64 {
        let i = k - self.k_lo;
        if i < 0 || i as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[i as usize]
        }
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx).sqrt()
    }

    fn potential_at(&self, k: i64) -> f64 {
        self.phi.as_ref().map_or(0.0, |f| f(k as f64 * self.dx))
    }

    /// `⟨ψ|Ĥ|ψ⟩` with the three-point Laplacian; zero values outside the
    /// active region make the sum over the stored window exact.
    pub fn energy(&self) -> f64 {
        let kin = self.hbar * self.hbar / (2.0 * self.m * self.dx * self.dx);
        let n = self.values.len();
        let mut e = Complex64::new(0.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let v = self.values[i];
            if v == zero {
                continue;
            }
            let l = if i > 0 { self.values[i - 1] } else { zero };
            let r = if i + 1 < n { self.values[i + 1] } else { zero };
            let hv = kin * (2.0 * v - l - r) + self.potential_at(self.k_lo + i as i64) * v;
            e += v.conj() * hv;
        }
        e.re * self.dx
    }

    fn ensure_storage(&mut self) {
        let lo = self.active[0].0;
        let hi = self.active.last().unwrap().1;
        let cur_hi = self.k_lo + self.values.len() as i64 - 1;
        if lo >= self.k_lo && hi <= cur_hi {
            return;
        }
        let pad = (self.values.len() as i64 / 4).max(64);
        let new_lo = if lo < self.k_lo { lo - pad } else { self.k_lo };
        let new_hi = if hi > cur_hi { hi + pad } else { cur_hi };
        let mut v = vec![Complex64::new(0.0, 0.0); (new_hi - new_lo + 1) as usize];
        let off = (self.k_lo - new_lo) as usize;
        v[off..off + self.values.len()].copy_from_slice(&self.values);
        self.values = v;
        self.k_lo = new_lo;
    }

    fn solve_interval(
        &mut self,
        a: i64,
        b: i64,
        h: f64,
        scratch: &mut Vec<Complex64>,
        rhs: &mut Vec<Complex64>,
    ) -> Result<()> {
        // interior nodes a+1..b-1
        let n = (b - a - 1).max(0) as usize;
        if n == 0 {
            return Ok(());
        }
        let i0 = (a + 1 - self.k_lo) as usize;
        let kin = self.hbar / (2.0 * self.m * self.dx * self.dx);
        let half = Complex64::new(0.0, 0.5 * h);
        let off = -half * kin;
        rhs.clear();
        scratch.clear();
        let zero = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let idx = i0 + j;
            let v = self.values[idx];
            let l = if j > 0 { self.values[idx - 1] } else { zero };
            let r = if j + 1 < n { self.values[idx + 1] } else { zero };
            let pot = self.potential_at(a + 1 + j as i64) / self.hbar;
            let hv = kin * (2.0 * v - l - r) + pot * v;
            rhs.push(v - half * hv);
        }
        // forward sweep of the complex Thomas algorithm, diagonal 1 + (ih/2)(2 kin + V)
        let mut prev_c = zero;
        for j in 0..n {
            let pot = self.potential_at(a + 1 + j as i64) / self.hbar;
            let diag = 1.0 + half * (2.0 * kin + pot);
            let denom = diag - off * prev_c;
            if denom.norm() < 1e-300 {
                return Err(Error::Numerical("singular Crank-Nicolson system".into()));
            }
            let cj = off / denom;
            let prev_d = if j > 0 { rhs[j - 1] } else { zero };
            rhs[j] = (rhs[j] - off * prev_d) / denom;
            scratch.push(cj);
            prev_c = cj;
        }
        for j in (0..n.saturating_sub(1)).rev() {
            let next = rhs[j + 1];
            rhs[j] -= scratch[j] * next;
        }
        self.values[i0..i0 + n].copy_from_slice(rhs);
        Ok(())
    }

    fn solve_all(&mut self, h: f64) -> Result<()> {
        let mut scratch = Vec::new();
        let mut rhs = Vec::new();
        let intervals = self.active.clone();
        for (a, b) in intervals {
            self.solve_interval(a, b, h, &mut scratch, &mut rhs)?;
        }
        self.t += h;
        Ok(())
    }

    /// Move every boundary out by `grow_nodes` and merge intervals that now
    /// overlap. Intervals that only share a boundary node stay apart: that
    /// node is still pinned to zero.
    fn grow(&mut self) {
        let p = self.grow_nodes;
        let before = self.active.clone();
        for iv in &mut self.active {
            iv.0 -= p;
            iv.1 += p;
        }
        let mut merged: Vec<(i64, i64)> = Vec::with_capacity(self.active.len());
        for (i, &(a, b)) in self.active.iter().enumerate() {
            match merged.last_mut() {
                Some(last) if a < last.1 => {
                    // fronts sit half a growth past the old boundaries now;
                    // the remaining true gap closes at speed 2c
                    let gap = (before[i].0 - before[i - 1].1 - p) as f64 * self.dx;
                    self.merges.push(self.t + gap / (2.0 * self.c));
                    last.1 = last.1.max(b);
                }
                _ => merged.push((a, b)),
            }
        }
        self.active = merged;
        self.ensure_storage();
    }

    /// Advance by `h`. With `grow`, this is one scheduled substep: growth
    /// happens at the middle of each block of `grow_every` substeps, so the
    /// boundary is the node nearest the true cone front throughout.
    fn step_by(&mut self, h: f64, grow: bool) -> Result<()> {
        if !grow || self.grow_nodes == 0 {
            self.solve_all(h)?;
            if grow {
                self.substeps += 1;
            }
            return Ok(());
        }
        let q = self.grow_every;
        let r = self.substeps % q;
        if q % 2 == 1 && r == (q - 1) / 2 {
            self.solve_all(0.5 * h)?;
            self.grow();
            self.solve_all(0.5 * h)?;
        } else {
            self.solve_all(h)?;
            if q.is_multiple_of(2) && r == q / 2 - 1 {
                self.grow();
            }
        }
        self.substeps += 1;
        Ok(())
    }

    /// One scheduled substep, including any growth due within it.
    pub fn cone_step(&mut self) -> Result<()> {
        self.step_by(self.dt_pde, true)
    }

    /// Advance to time `t_end`; a final partial substep (without growth)
    /// lands exactly on it.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        let eps = 1e-9 * self.dt_pde;
        while self.t + self.dt_pde <= t_end + eps {
            self.cone_step()?;
        }
        let rest = t_end - self.t;
        if rest > eps {
            self.step_by(rest, false)?;
        }
        Ok(())
    }
}

/// Integrate the cone problem to `t_end`, merging intervals at the apexes of
/// the exclusion triangles; snapshots every `stride` substeps and at `t_end`.
#[allow(clippy::too_many_arguments)]
pub fn solve_piecemeal(
    psi0: &WaveFunction,
    geometry: &LightConeGeometry,
    p: &PhysicalParams,
    dt_target: f64,
    t_end: f64,
    phi: Option<SharedPotential>,
    stride: usize,
) -> Result<Trajectory> {
    if !(t_end > 0.0) {
        return Err(Error::Parameter(format!("end time must be > 0, got {t_end}")));
    }
    let params = PhysicalParams { c: geometry.c, ..*p };
    let mut solver = ConeSolver::new(psi0, &geometry.initial, &params, dt_target, phi)?;
    let mut traj = Trajectory {
        snapshots: vec![solver.state()],
        support_history: vec![solver.active_region()],
        norm_history: vec![solver.norm()],
    };
    let stride = stride.max(1);
    let mut s = 0usize;
    let eps = 1e-9 * solver.dt_pde();
    while solver.t() + solver.dt_pde() <= t_end + eps {
        solver.cone_step()?;
        s += 1;
        traj.support_history.push(solver.active_region());
        traj.norm_history.push(solver.norm());
        if s.is_multiple_of(stride) {
            traj.snapshots.push(solver.state());
        }
    }
    if t_end - solver.t() > eps {
        solver.advance_to(t_end)?;
        traj.norm_history.push(solver.norm());
        traj.support_history.push(solver.active_region());
    }
    if traj.snapshots.last().map(|w| w.t) != Some(solver.t()) {
        traj.snapshots.push(solver.state());
    }
    Ok(traj)
}
