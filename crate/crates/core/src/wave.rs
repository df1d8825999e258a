//! Complex amplitudes on a uniform grid, and initial-data descriptors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::SupportRegion;

/// `ψ(origin + i·dx)` for `i = 0..len`, at time `t`. Values off the stored
/// range are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub origin: f64,
    pub dx: f64,
    pub values: Vec<Complex64>,
    pub t: f64,
}

impl WaveFunction {
    pub fn new(origin: f64, dx: f64, values: Vec<Complex64>, t: f64) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0 && origin.is_finite()) {
            return Err(Error::Parameter(format!("bad grid: origin {origin}, dx {dx}")));
        }
        Ok(WaveFunction { origin, dx, values, t })
    }

    /// Sample `f` on the nodes `origin + i·dx`, `i = 0..n`.
    pub fn from_fn<F: FnMut(f64) -> Complex64>(origin: f64, dx: f64, n: usize, mut f: F) -> Self {
        let values = (0..n).map(|i| f(origin + i as f64 * dx)).collect();
        WaveFunction {
            origin,
            dx,
            values,
            t: 0.0,
        }
    }

    /// Nodes `k·dx` covering `[lo, hi]` (rounded outward), sampling `f`.
    pub fn on_interval<F: Fn(f64) -> Complex64>(lo: f64, hi: f64, dx: f64, f: F) -> Self {
        let k0 = (lo / dx + 1e-9).floor() as i64;
        let k1 = (hi / dx - 1e-9).ceil() as i64;
        let n = (k1 - k0 + 1) as usize;
        let origin = k0 as f64 * dx;
        let values = (0..n).map(|i| f((k0 + i as i64) as f64 * dx)).collect();
        WaveFunction {
            origin,
            dx,
            values,
            t: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.dx
    }

    /// Right-most node position.
    pub fn x_end(&self) -> f64 {
        self.x(self.len().saturating_sub(1))
    }

    /// Signed node index of position `x` relative to the origin, if `x` is a node.
    pub fn node_of(&self, x: f64) -> Option<i64> {
        let r = (x - self.origin) / self.dx;
        let k = r.round();
        ((r - k).abs() < 1e-6).then_some(k as i64)
    }

    /// Value at signed index `k`, zero outside the stored range.
    pub fn at(&self, k: i64) -> Complex64 {
        if k < 0 || k as usize >= self.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[k as usize]
        }
    }

    /// `ψ(x)` by linear interpolation, zero outside the grid.
    pub fn sample(&self, x: f64) -> Complex64 {
        let r = (x - self.origin) / self.dx;
        if r < 0.0 || r > (self.len() as f64 - 1.0) {
            return Complex64::new(0.0, 0.0);
        }
        let k = (r.floor() as usize).min(self.len().saturating_sub(2));
        let f = r - k as f64;
        if self.len() == 1 {
            return self.values[0];
        }
        self.values[k] * (1.0 - f) + self.values[k + 1] * f
    }

    /// `Σ|ψ|²·dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            Some(i) => Err(Error::Data(format!("non-finite value at node {i} (x = {})", self.x(i)))),
            None => Ok(()),
        }
    }

    /// Closed intervals spanned by runs of non-zero nodes.
    pub fn nonzero_support(&self) -> SupportRegion {
        let mut pieces = Vec::new();
        let mut start: Option<usize> = None;
        for (i, v) in self.values.iter().enumerate() {
            let nz = *v != Complex64::new(0.0, 0.0);
            match (nz, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    pieces.push((self.x(s), self.x(i - 1)));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            pieces.push((self.x(s), self.x_end()));
        }
        SupportRegion::new(pieces).unwrap_or_default()
    }

    /// Multiply by a scalar.
    pub fn scaled(mut self, s: Complex64) -> Self {
        self.values.iter_mut().for_each(|v| *v *= s);
        self
    }

    /// Copy with the stored range restricted to `[i0, i1)`.
    pub fn slice(&self, i0: usize, i1: usize) -> WaveFunction {
        WaveFunction {
            origin: self.x(i0),
            dx: self.dx,
            values: self.values[i0..i1].to_vec(),
            t: self.t,
        }
    }
}

/// Initial data accepted by the experiment drivers.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// `π^{-1/4} σ^{-1/2} e^{−(x−center)²/(2σ²)}` restricted to `|x − center| ≤ cutoff`.
    Gaussian { sigma: f64, center: f64, cutoff: f64 },
    /// Indicator of the union of the intervals.
    Box(Vec<(f64, f64)>),
    /// `exp(−1/(1−u²))` with `u = (x−center)/half_width`, compactly supported and smooth.
    Bump { center: f64, half_width: f64 },
    /// `cos(πx/(2·half_width))` on `|x| ≤ half_width`: continuous with a kink at the edges.
    Kink { half_width: f64 },
}

impl InitialData {
    pub fn eval(&self, x: f64) -> Complex64 {
        let re = match *self {
            InitialData::Gaussian { sigma, center, cutoff } => {
                let u = x - center;
                if u.abs() > cutoff {
                    0.0
                } else {
                    (-(u * u) / (2.0 * sigma * sigma)).exp() / (std::f64::consts::PI.sqrt() * sigma).sqrt()
                }
            }
            InitialData::Box(ref ivs) => {
                if ivs.iter().any(|&(a, b)| a <= x && x <= b) {
                    1.0
                } else {
                    0.0
                }
            }
            InitialData::Bump { center, half_width } => {
                let u = (x - center) / half_width;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (1.0 - u * u)).exp()
                }
            }
            InitialData::Kink { half_width } => {
                if x.abs() >= half_width {
                    0.0
                } else {
                    (std::f64::consts::FRAC_PI_2 * x / half_width).cos()
                }
            }
        };
        Complex64::new(re, 0.0)
    }

    /// Closed support.
    pub fn support(&self) -> SupportRegion {
        let pieces = match *self {
            InitialData::Gaussian { center, cutoff, .. } => vec![(center - cutoff, center + cutoff)],
            InitialData::Box(ref ivs) => ivs.clone(),
            InitialData::Bump { center, half_width } => vec![(center - half_width, center + half_width)],
            InitialData::Kink { half_width } => vec![(-half_width, half_width)],
        };
        SupportRegion::new(pieces).unwrap_or_default()
    }

    /// Sample on nodes `k·dx` spanning the support hull.
    pub fn sample(&self, dx: f64) -> Result<WaveFunction> {
        let hull = self
            .support()
            .hull()
            .ok_or_else(|| Error::Parameter("initial data has empty support".into()))?;
        Ok(WaveFunction::on_interval(hull.lo, hull.hi, dx, |x| self.eval(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_is_normalized() {
        let g = InitialData::Gaussian {
            sigma: 1.0,
            center: 0.0,
            cutoff: 10.0,
        };
        let w = g.sample(0.01).unwrap();
        assert!((w.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(w.node_of(0.0), Some(1000));
    }

    #[test]
    fn support_of_two_slit_data() {
        let d = InitialData::Box(vec![(-1.0, 0.0), (2.0, 3.0)]);
        let w = d.sample(0.25).unwrap();
        assert_eq!(w.len(), 17);
        let s = w.nonzero_support();
        assert_eq!(s.intervals().len(), 2);
        assert_eq!(s, d.support());
    }

    #[test]
    fn interpolation_and_lookup() {
        let w = WaveFunction::from_fn(0.0, 0.5, 5, |x| Complex64::new(x, -x));
        assert_eq!(w.sample(0.75), Complex64::new(0.75, -0.75));
        assert_eq!(w.sample(-0.1), Complex64::new(0.0, 0.0));
        assert_eq!(w.sample(2.0), Complex64::new(2.0, -2.0));
        assert_eq!(w.at(-1), Complex64::new(0.0, 0.0));
        assert!(w.check_finite().is_ok());
        let bad = WaveFunction::from_fn(0.0, 1.0, 3, |_| Complex64::new(f64::NAN, 0.0));
        assert!(matches!(bad.check_finite(), Err(Error::Data(_))));
    }
}
