//! Convergence of the reference Schrödinger solvers: the spectral solver is
//! exact for a free Gaussian, and the Crank–Nicolson cone solver is second
//! order while the wave is small at the cone front.

use lightcone::error::Result;
use lightcone::experiments::{cone_convergence, spectral_gaussian_error};
use lightcone::wave::InitialData;

fn main() -> Result<()> {
    println!(
        "spectral vs closed form: {:.2e}",
        spectral_gaussian_error(1.0, 1.0, 40.0, 0.05, 1)?
    );

    let gaussian = InitialData::Gaussian {
        sigma: 1.0,
        center: 0.0,
        cutoff: 8.5,
    };
    let bump = InitialData::Bump {
        center: 0.0,
        half_width: 1.0,
    };
    for (name, data) in [("gaussian", gaussian), ("bump", bump)] {
        let e = cone_convergence(&data, 1.0, 0.5, &[0.04, 0.02, 0.01], 0.0025)?;
        println!("{name}:");
        for w in e.windows(2) {
            println!(
                "  dx {} -> {}: {:.3e} -> {:.3e}, ratio {:.2}",
                w[0].0,
                w[1].0,
                w[0].1,
                w[1].1,
                w[0].1 / w[1].1
            );
        }
    }
    Ok(())
}
