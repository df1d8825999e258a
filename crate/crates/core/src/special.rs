//! Bessel `J₁`, Struve `H₁` and the Fresnel integrals.
//!
//! Order-one functions come from integral representations for moderate
//! arguments and, beyond `x = 25`, from the Hankel expansion of `J₁, Y₁`
//! together with the Laplace-integral form of `H₁ − Y₁`, which is smooth.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;

/// Below this argument the order-one functions come from integral
/// representations; above it from the asymptotic expansions.
const ASYMPTOTIC_FROM: f64 = 25.0;

/// Bessel function of the first kind, order one.
pub fn bessel_j1(x: f64) -> Result<f64> {
    if x < 0.0 {
        return bessel_j1(-x).map(|v| -v);
    }
    if x > ASYMPTOTIC_FROM {
        return Ok(hankel_order_one(x)?.0);
    }
    // J₁(x) = (1/2π)∫_0^{2π} cos(θ − x sin θ) dθ; the integrand is periodic,
    // so the trapezoid rule converges geometrically once n exceeds x.
    let n = 64 + 2 * x.ceil() as usize;
    let h = 2.0 * PI / n as f64;
    let s: f64 = (0..n)
        .map(|k| {
            let t = k as f64 * h;
            (t - x * t.sin()).cos()
        })
        .sum();
    Ok(s / n as f64)
}

/// Hankel asymptotic expansion of `(J₁(x), Y₁(x))` for large `x`.
fn hankel_order_one(x: f64) -> Result<(f64, f64)> {
    let mu = 4.0;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k(ν) / x^k
    let mut last = f64::INFINITY;
    let mut converged = false;
    for k in 0..200usize {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        }
        if a.abs() > last {
            // asymptotic series started to diverge
            converged = last < 1e-15;
            break;
        }
        last = a.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if a.abs() < 1e-17 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Accuracy {
            tol: 1e-15,
            achieved: last,
        });
    }
    let chi = x - 0.75 * PI;
    let amp = (2.0 / (PI * x)).sqrt();
    let (s, c) = chi.sin_cos();
    Ok((amp * (p * c - q * s), amp * (p * s + q * c)))
}

fn gl32() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(32))
}

/// Struve function `H₁`.
pub fn struve_h1(x: f64) -> Result<f64> {
    if x < 0.0 {
        return struve_h1(-x);
    }
    if x > ASYMPTOTIC_FROM {
        // H₁ − Y₁ = (2/π) ∫_0^∞ e^{-u} √(1 + (u/x)²) du
        let tail = gl32().integrate_composite(0.0, 60.0, 30, |u| (-u).exp() * (1.0 + (u / x).powi(2)).sqrt());
        return Ok(hankel_order_one(x)?.1 + 2.0 / PI * tail);
    }
    // H₁(x) = (2x/π) ∫_0^{π/2} sin(x cos θ) sin²θ dθ
    let v = gl32().integrate_composite(0.0, FRAC_PI_2, 8, |t| (x * t.cos()).sin() * t.sin().powi(2));
    Ok(2.0 * x / PI * v)
}

/// Fresnel integrals `(C(x), S(x))` with `C(x) = ∫_0^x cos(πt²/2) dt`.
pub fn fresnel(x: f64) -> Result<(f64, f64)> {
    let ax = x.abs();
    let eps = 1e-16;
    let (c, s) = if ax < 1e-150 {
        (ax, 0.0)
    } else if ax <= 1.5 {
        let fact = FRAC_PI_2 * ax * ax;
        let mut sum;
        let mut sums = 0.0;
        let mut sumc = ax;
        let mut sign = 1.0;
        let mut odd = true;
        let mut term = ax;
        let mut n = 3.0;
        let mut ok = false;
        sum = 0.0;
        for k in 1..200 {
            term *= fact / k as f64;
            sum += sign * term / n;
            let test = sum.abs() * eps;
            if odd {
                sign = -sign;
                sums = sum;
                sum = sumc;
            } else {
                sumc = sum;
                sum = sums;
            }
            if term < test {
                ok = true;
                break;
            }
            odd = !odd;
            n += 2.0;
        }
        if !ok {
            return Err(Error::Accuracy {
                tol: eps,
                achieved: term,
            });
        }
        (sumc, sums)
    } else {
        // modified Lentz continued fraction for the complementary function
        let pix2 = PI * ax * ax;
        let one = Complex64::new(1.0, 0.0);
        let mut b = Complex64::new(1.0, -pix2);
        let mut cc = Complex64::new(1e300, 0.0);
        let mut d = one / b;
        let mut h = d;
        let mut n = -1.0;
        let mut ok = false;
        for _ in 2..400 {
            n += 2.0;
            let a = -n * (n + 1.0);
            b += 4.0;
            d = one / (a * d + b);
            cc = b + a / cc;
            let del = cc * d;
            h *= del;
            if (del.re - 1.0).abs() + del.im.abs() < eps {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::Accuracy {
                tol: eps,
                achieved: f64::NAN,
            });
        }
        h *= Complex64::new(ax, -ax);
        let cs = Complex64::new(0.5, 0.5) * (one - Complex64::from_polar(1.0, 0.5 * pix2) * h);
        (cs.re, cs.im)
    };
    if x < 0.0 {
        Ok((-c, -s))
    } else {
        Ok((c, s))
    }
}
