//! The two limits of the time-sliced path integral.
//!
//! Shrinking `Δt` at fixed `c` (so `ξ → 0`) freezes the wave function; the
//! joint limit `cΔt → 0`, `ξ → ∞` converges to the Schrödinger equation
//! bounded by the light cone.
//!
//! The full distinguished ladder takes a few minutes; pass `--quick` for two
//! coarse rungs.

use lightcone::error::Result;
use lightcone::experiments::{degenerate_point, distinguished_point};

fn main() -> Result<()> {
    let quick = std::env::args().any(|a| a == "--quick");

    println!("degenerate: c = 1, T = 0.1, Gaussian sigma = 0.1");
    for dt in [1e-2, 1e-3, 1e-4] {
        let q = degenerate_point(0.1, 1.0, 0.1, dt, 16)?;
        println!(
            "  dt = {dt:<7} xi = {:<8.1e} |psi(T) - psi0|/|psi0| = {:.3e}",
            q.xi, q.error
        );
    }

    println!("distinguished: Gaussian sigma = 1, T = 0.1, against the cone solver");
    let rungs: &[(f64, f64)] = if quick {
        &[(25.0, 0.2), (100.0, 0.1)]
    } else {
        &[(25.0, 0.2), (100.0, 0.1), (400.0, 0.05)]
    };
    for &(xi, cdt) in rungs {
        let q = distinguished_point(1.0, 8.5, 0.1, xi, cdt, 64, 0.005, 1e-3)?;
        println!(
            "  xi = {:<7.2} c dt = {cdt:<5} c = {:<8.1} {} slices  relative L2 error {:.3e}",
            q.xi, q.c, q.n_steps, q.error
        );
    }
    Ok(())
}
