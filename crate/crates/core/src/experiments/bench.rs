//! Direct versus FFT convolution: timing and equivalence.

use std::fs;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{finish, Report};
use crate::error::{Error, Result};
use crate::io::{write_csv, CsvMeta, ExperimentConfig};
use crate::kernel::Lagrangian;
use crate::params::PhysicalParams;
use crate::propagator::Propagator;
use crate::wave::WaveFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub w: usize,
    pub direct_s: f64,
    pub fft_s: f64,
    /// `‖fft − direct‖/‖direct‖`.
    pub rel_diff: f64,
}

impl BenchRow {
    pub fn speedup(&self) -> f64 {
        self.direct_s / self.fft_s
    }

    /// Output nodes per second of the FFT backend.
    pub fn fft_throughput(&self) -> f64 {
        (self.n + 2 * self.w) as f64 / self.fft_s
    }

    pub fn direct_throughput(&self) -> f64 {
        (self.n + 2 * self.w) as f64 / self.direct_s
    }
}

/// Random complex samples in the unit square from a seeded generator.
pub fn random_wave(n: usize, dx: f64, seed: u64) -> WaveFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    WaveFunction::from_fn(0.0, dx, n, |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn rel_diff(a: &WaveFunction, b: &WaveFunction) -> f64 {
    let num: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.values.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// One step per backend (best of `reps`) for every `(n, W)`, with
/// `ξ = 100`, `cΔt = 1`.
pub fn bench(sizes: &[usize], widths: &[usize], reps: usize, seed: u64) -> Result<Vec<BenchRow>> {
    let p = PhysicalParams::from_xi_and_cone_step(100.0, 1.0);
    let mut rows = Vec::new();
    for &w in widths {
        let prop = Propagator::new(&Lagrangian::Relativistic, p, 1.0 / w as f64)?;
        for &n in sizes {
            let psi = random_wave(n, 1.0 / w as f64, seed ^ ((n as u64) << 20) ^ w as u64);
            let time = |f: &dyn Fn() -> Result<WaveFunction>| -> Result<(f64, WaveFunction)> {
                let mut best = f64::INFINITY;
                let mut out = None;
                for _ in 0..reps.max(1) {
                    let t0 = Instant::now();
                    let r = f()?;
                    best = best.min(t0.elapsed().as_secs_f64());
                    out = Some(r);
                }
                Ok((best, out.expect("at least one repetition")))
            };
            // warm the FFT plan and kernel spectrum before timing
            prop.step_fft(&psi, None)?;
            let (direct_s, d) = time(&|| prop.step_direct(&psi, None))?;
            let (fft_s, f) = time(&|| prop.step_fft(&psi, None))?;
            rows.push(BenchRow {
                n,
                w,
                direct_s,
                fft_s,
                rel_diff: rel_diff(&f, &d),
            });
        }
    }
    Ok(rows)
}

/// Keys: `sizes`, `widths`, `reps`, `seed`, `equiv_tol`.
pub fn cmd_bench(cfg: &mut ExperimentConfig, out: &Path) -> Result<Report> {
    let sizes: Vec<usize> = cfg
        .list_or("sizes", &[256.0, 4096.0, 16384.0])?
        .iter()
        .map(|&v| v as usize)
        .collect();
    let widths: Vec<usize> = cfg
        .list_or("widths", &[16.0, 64.0, 256.0])?
        .iter()
        .map(|&v| v as usize)
        .collect();
    let reps: usize = cfg.get_or("reps", 3)?;
    let seed: u64 = cfg.get_or("seed", 20_240_601)?;
    let tol: f64 = cfg.get_or("equiv_tol", 1e-10)?;
    let rows = bench(&sizes, &widths, reps, seed)?;
    let mut report = Report::new("bench");
    for r in &rows {
        report.line(format!(
            "N={:<6} W={:<4} direct {:>9.3} ms  fft {:>9.3} ms  speedup {:>6.2}  fft {:.2e} nodes/s  diff {:.1e}",
            r.n,
            r.w,
            1e3 * r.direct_s,
            1e3 * r.fft_s,
            r.speedup(),
            r.fft_throughput(),
            r.rel_diff
        ));
    }
    let worst = rows.iter().map(|r| r.rel_diff).fold(0.0, f64::max);
    fs::create_dir_all(out)?;
    let csv_rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n as f64,
                r.w as f64,
                r.direct_s,
                r.fft_s,
                r.speedup(),
                r.direct_throughput(),
                r.fft_throughput(),
                r.rel_diff,
            ]
        })
        .collect();
    write_csv(
        &out.join("bench.csv"),
        &CsvMeta {
            xi: Some(100.0),
            eps: None,
            w: widths.last().copied(),
        },
        &[
            "N",
            "W",
            "direct_s",
            "fft_s",
            "speedup",
            "direct_nodes_per_s",
            "fft_nodes_per_s",
            "rel_diff",
        ],
        &csv_rows,
    )?;
    report.check(
        "backend equivalence",
        worst <= tol,
        format!("max relative difference {worst:.2e} <= {tol:e}"),
    );
    finish(
        out,
        cfg,
        &report,
        &[
            ("seed".into(), seed.to_string()),
            ("generator".into(), "ChaCha8".into()),
        ],
    )?;
    if worst > tol {
        return Err(Error::Numerical(format!("backends disagree: {worst:e} > {tol:e}")));
    }
    Ok(report)
}
