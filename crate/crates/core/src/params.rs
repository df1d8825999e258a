//! Physical parameters and the dimensionless groups derived from them.
//!
//! Simulation units default to `ħ = m = 1`; the speed of light and the time
//! slice stay free, so `ξ = c²Δt` in those units.

use crate::error::{Error, Result};

/// Mass, speed of light, reduced Planck constant, time slice and the optional
/// oscillator frequency, all in simulation units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub m: f64,
    pub c: f64,
    pub hbar: f64,
    pub dt: f64,
    /// Oscillator frequency; zero for a free particle.
    pub omega: f64,
    /// Half-width of the initial support.
    pub x0: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            m: 1.0,
            c: 1.0,
            hbar: 1.0,
            dt: 1.0,
            omega: 0.0,
            x0: 1.0,
        }
    }
}

impl PhysicalParams {
    /// Simulation units `ħ = m = 1` with the given speed of light and time slice.
    pub fn natural(c: f64, dt: f64) -> Self {
        PhysicalParams {
            c,
            dt,
            ..Default::default()
        }
    }

    /// Parameters realising a target `ξ` with the light-cone step `c·Δt` fixed
    /// (`ħ = m = 1`): `Δt = (cΔt)²/ξ`, `c = ξ/(cΔt)`.
    pub fn from_xi_and_cone_step(xi: f64, c_dt: f64) -> Self {
        let dt = c_dt * c_dt / xi;
        PhysicalParams::natural(c_dt / dt, dt)
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_x0(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("m", self.m), ("c", self.c), ("hbar", self.hbar), ("dt", self.dt)];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !(self.omega.is_finite() && self.omega >= 0.0) {
            return Err(Error::Parameter(format!("omega must be >= 0, got {}", self.omega)));
        }
        if !(self.x0.is_finite() && self.x0 >= 0.0) {
            return Err(Error::Parameter(format!("x0 must be >= 0, got {}", self.x0)));
        }
        Ok(())
    }

    /// `c·Δt`, the light-cone advance per slice.
    pub fn cone_step(&self) -> f64 {
        self.c * self.dt
    }

    pub fn xi(&self) -> f64 {
        self.m * self.c * self.c * self.dt / self.hbar
    }

    /// `ε = √(ωħ/m)/c`, zero for a free particle.
    pub fn eps(&self) -> f64 {
        if self.omega == 0.0 {
            0.0
        } else {
            (self.omega * self.hbar / self.m).sqrt() / self.c
        }
    }

    /// Oscillator length `√(ħ/(mω))`.
    pub fn oscillator_length(&self) -> f64 {
        (self.hbar / (self.m * self.omega)).sqrt()
    }
}

/// Returns `(ξ, ε)` for the parameters.
pub fn derive_groups(p: &PhysicalParams) -> Result<(f64, f64)> {
    p.validate()?;
    let xi = p.xi();
    let eps = p.eps();
    if !xi.is_finite() || xi <= 0.0 {
        return Err(Error::Parameter(format!("xi = {xi} is not finite and positive")));
    }
    if !eps.is_finite() {
        return Err(Error::Parameter(format!("eps = {eps} is not finite")));
    }
    Ok((xi, eps))
}

/// Margins used to decide when `ħ/(mc²) ≪ Δt ≪ L²m/ħ` holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeMargins {
    /// `ξ` must be at least this large.
    pub low: f64,
    /// `Δt·ħ/(mL²)` must be at most this small.
    pub high: f64,
}

impl Default for RegimeMargins {
    fn default() -> Self {
        RegimeMargins { low: 10.0, high: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub xi: f64,
    pub c_dt: f64,
    pub l_char: f64,
    /// `Δt·ħ/(m L²)`.
    pub upper_ratio: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl RegimeReport {
    pub fn ok(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

pub fn check_regime(p: &PhysicalParams, l_char: f64) -> RegimeReport {
    check_regime_with(p, l_char, RegimeMargins::default())
}

pub fn check_regime_with(p: &PhysicalParams, l_char: f64, margins: RegimeMargins) -> RegimeReport {
    let xi = p.xi();
    let upper_ratio = p.dt * p.hbar / (p.m * l_char * l_char);
    RegimeReport {
        xi,
        c_dt: p.cone_step(),
        l_char,
        upper_ratio,
        lower_ok: xi >= margins.low,
        upper_ok: upper_ratio <= margins.high,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn xi_examples() {
        let (xi, eps) = derive_groups(&PhysicalParams::natural(1.0, 1.0)).unwrap();
        assert_eq!(xi, 1.0);
        assert_eq!(eps, 0.0);
        let (xi, _) = derive_groups(&PhysicalParams::natural(20.0, 0.01)).unwrap();
        assert!((xi - 4.0).abs() < 1e-12);
    }

    #[test]
    fn electron_compton_time_gives_unit_xi() {
        // SI: ħ/(m c²) for the electron is 1.288e-21 s; the often-quoted
        // 6.2e-22 s is ħ/(2mc²) to within rounding.
        let p = PhysicalParams {
            m: 9.109_383_7e-31,
            c: 2.997_924_58e8,
            hbar: 1.054_571_817e-34,
            dt: 1.0,
            omega: 0.0,
            x0: 0.0,
        };
        let compton = p.hbar / (p.m * p.c * p.c);
        assert!((compton - 1.288e-21).abs() < 0.001e-21, "{compton}");
        let q = PhysicalParams { dt: compton, ..p };
        assert!((q.xi() - 1.0).abs() < 1e-12);
        let quoted = PhysicalParams { dt: 6.2e-22, ..p };
        assert!((quoted.xi() - 0.5).abs() < 0.05);
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(derive_groups(&PhysicalParams::natural(0.0, 1.0)).is_err());
        assert!(derive_groups(&PhysicalParams::natural(1.0, f64::NAN)).is_err());
        assert!(derive_groups(&PhysicalParams::natural(1.0, 1.0).with_omega(-1.0)).is_err());
    }

    #[test]
    fn eps_definition() {
        let p = PhysicalParams::natural(10.0, 0.1).with_omega(4.0);
        assert!((p.eps() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn regime_examples() {
        // xi = 100 and Δt ħ/(m L²) = 1e-3
        let p = PhysicalParams::natural(1e4, 1e-6);
        let r = check_regime(&p, (1e-6f64 / 1e-3).sqrt());
        assert!(r.lower_ok && r.upper_ok);

        let p = PhysicalParams::natural(1.0, 0.5);
        assert!(!check_regime(&p, 100.0).lower_ok);

        let l = 2.0;
        let p = PhysicalParams::natural(100.0, l * l);
        assert!(!check_regime(&p, l).upper_ok);
    }

    proptest! {
        #[test]
        fn groups_invariant_under_common_rescaling(
            m in 0.1f64..10.0, hbar in 0.1f64..10.0, c in 0.5f64..50.0,
            dt in 1e-3f64..1.0, omega in 0.0f64..5.0, s in 0.01f64..100.0,
        ) {
            let p = PhysicalParams { m, c, hbar, dt, omega, x0: 1.0 };
            let q = PhysicalParams { m: m * s, hbar: hbar * s, ..p };
            let (a, b) = derive_groups(&p).unwrap();
            let (a2, b2) = derive_groups(&q).unwrap();
            prop_assert!((a - a2).abs() <= 1e-12 * a.abs());
            prop_assert!((b - b2).abs() <= 1e-12 * b.abs().max(1e-300));
        }

        #[test]
        fn lower_flag_monotone_in_dt(dt1 in 1e-4f64..1.0, f in 1.0f64..100.0, c in 1.0f64..100.0) {
            let r1 = check_regime(&PhysicalParams::natural(c, dt1), 1.0);
            let r2 = check_regime(&PhysicalParams::natural(c, dt1 * f), 1.0);
            prop_assert!(!r1.lower_ok || r2.lower_ok);
        }
    }
}
