//! Quadrature rules: Gauss–Legendre of arbitrary order and an adaptive
//! Gauss–Kronrod integrator for integrals of the form `∫ a(s) e^{iφ(s)} ds`.
//!
//! The oscillatory integrator bisects panels until the phase changes by no
//! more than `max_phase` radians across each panel and the Kronrod/Gauss
//! difference on the panel is within its share of the absolute tolerance.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Build an `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_and_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate a real function over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }

    /// Composite rule with `panels` equal panels.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + k as f64 * h;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

// QUADPACK 7/15 Gauss–Kronrod abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive oscillatory integration.
#[derive(Debug, Clone)]
pub struct QuadEstimate<const K: usize> {
    pub values: [Complex64; K],
    /// Sum over accepted panels of the Kronrod/Gauss difference (max over components).
    pub error: f64,
    pub panels: usize,
}

/// Adaptive integrator for `∫_a^b amp_k(s) exp(i phase(s)) ds`, `k = 0..K`,
/// sharing the phase evaluations between the `K` amplitudes.
#[derive(Debug, Clone, Copy)]
pub struct OscillatoryQuad {
    /// Absolute tolerance on the whole interval.
    pub tol: f64,
    /// Largest phase change (radians) admitted on one panel.
    pub max_phase: f64,
    /// Largest panel count before giving up.
    pub max_panels: usize,
    /// Smallest panel width relative to the interval.
    pub min_width: f64,
}

impl Default for OscillatoryQuad {
    fn default() -> Self {
        OscillatoryQuad {
            tol: 1e-10,
            max_phase: std::f64::consts::FRAC_PI_4,
            max_panels: 4_000_000,
            min_width: 1e-14,
        }
    }
}

struct Panel<const K: usize> {
    a: f64,
    b: f64,
    kronrod: [Complex64; K],
    diff: f64,
    phase_var: f64,
}

impl OscillatoryQuad {
    pub fn with_tol(tol: f64) -> Self {
        OscillatoryQuad {
            tol,
            ..Default::default()
        }
    }

    fn panel<const K: usize, A, P>(&self, amp: &A, phase: &P, a: f64, b: f64) -> Panel<K>
    where
        A: Fn(f64) -> [f64; K],
        P: Fn(f64) -> f64,
    {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut kron = [Complex64::new(0.0, 0.0); K];
        let mut gauss = [Complex64::new(0.0, 0.0); K];
        // nodes in increasing order: -XGK[0..7], 0, XGK[6..0]
        let mut prev_phase = phase(a);
        let mut var = 0.0;
        let mut visit = |x: f64, wk: f64, wg: f64, kron: &mut [Complex64; K], gauss: &mut [Complex64; K]| {
            let s = c + h * x;
            let ph = phase(s);
            var += (ph - prev_phase).abs();
            prev_phase = ph;
            let e = Complex64::from_polar(1.0, ph);
            let am = amp(s);
            for k in 0..K {
                let v = e * am[k];
                kron[k] += v * wk;
                gauss[k] += v * wg;
            }
        };
        for j in 0..7 {
            let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
            visit(-XGK[j], WGK[j], wg, &mut kron, &mut gauss);
        }
        visit(0.0, WGK[7], WG[3], &mut kron, &mut gauss);
        for j in (0..7).rev() {
            let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
            visit(XGK[j], WGK[j], wg, &mut kron, &mut gauss);
        }
        let end_phase = phase(b);
        var += (end_phase - prev_phase).abs();
        let mut diff: f64 = 0.0;
        for k in 0..K {
            kron[k] *= h;
            gauss[k] *= h;
            diff = diff.max((kron[k] - gauss[k]).norm());
        }
        Panel {
            a,
            b,
            kronrod: kron,
            diff,
            phase_var: var,
        }
    }

    /// Integrate `K` amplitudes against a common phase over `[a, b]`.
    pub fn integrate<const K: usize, A, P>(&self, amp: A, phase: P, a: f64, b: f64) -> Result<QuadEstimate<K>>
    where
        A: Fn(f64) -> [f64; K],
        P: Fn(f64) -> f64,
    {
        let mut values = [Complex64::new(0.0, 0.0); K];
        if a == b {
            return Ok(QuadEstimate {
                values,
                error: 0.0,
                panels: 0,
            });
        }
        let total = (b - a).abs();
        let mut stack = vec![self.panel(&amp, &phase, a, b)];
        let mut error = 0.0;
        let mut panels = 0usize;
        let mut failed = false;
        while let Some(p) = stack.pop() {
            let width = (p.b - p.a).abs();
            let share = self.tol * width / total;
            let fine_enough = p.phase_var <= self.max_phase && p.diff <= share;
            let too_small = width <= self.min_width * total;
            if fine_enough || too_small {
                if too_small && !fine_enough {
                    failed = true;
                }
                for (v, k) in values.iter_mut().zip(&p.kronrod) {
                    *v += k;
                }
                error += p.diff;
                panels += 1;
                continue;
            }
            if panels + stack.len() > self.max_panels {
                return Err(Error::Accuracy {
                    tol: self.tol,
                    achieved: error + p.diff,
                });
            }
            let mid = 0.5 * (p.a + p.b);
            // push right first so panels are accumulated left to right
            stack.push(self.panel(&amp, &phase, mid, p.b));
            stack.push(self.panel(&amp, &phase, p.a, mid));
        }
        if failed && error > self.tol {
            return Err(Error::Accuracy {
                tol: self.tol,
                achieved: error,
            });
        }
        Ok(QuadEstimate { values, error, panels })
    }

    /// Single-amplitude convenience wrapper.
    pub fn integrate_one<A, P>(&self, amp: A, phase: P, a: f64, b: f64) -> Result<Complex64>
    where
        A: Fn(f64) -> f64,
        P: Fn(f64) -> f64,
    {
        self.integrate(|s| [amp(s)], phase, a, b).map(|q| q.values[0])
    }
}
