//! Harmonic oscillator inside the light cone.
//!
//! The energy of a superposition relaxes to `Σ|a_n|²E_n` once the cone is
//! wide compared with the data, and near the cone edge the cone-bounded
//! solution follows the outer field corrected by a boundary layer.

use lightcone::error::Result;
use lightcone::experiments::{boundary_layer_ladder, oscillator_energy};
use lightcone::oscillator::{hermite_functions, MehlerOuter, UniformExpansion};
use lightcone::wave::InitialData;

fn main() -> Result<()> {
    let h = hermite_functions(4, 0.7);
    println!("psi_0..psi_4 at y = 0.7: {:.6?}", h);

    let (x0, eps) = (8.0, 0.1);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let times: Vec<f64> = [0.0, 2.0, 4.0, 6.4, 8.0].to_vec();
    let (checks, me) = oscillator_energy(&[(0, s), (1, s)], x0, eps, 0.02, 2e-3, &times)?;
    println!(
        "\n(psi_0 + psi_1)/sqrt 2 restricted to |x| < {x0}, eps = {eps}, mass {:.8}",
        me.mass()
    );
    for e in &checks {
        println!(
            "  ct = {:>5.1}  E series {:.6} (Im {:+.1e})  E cone {:.6}  limit {:.6}",
            e.ct, e.series.re, e.series.im, e.discrete, e.limit
        );
    }

    let data = InitialData::Kink { half_width: 1.0 };
    let outer = MehlerOuter::new(data.clone(), 1.0);
    let u = UniformExpansion::new(&outer, 1.0, 0.2);
    println!(
        "\nuniform expansion at tau = 2, eps = 0.2 (cone edge at {}):",
        u.cone_edge(2.0)
    );
    for y in [0.0, 5.0, 10.0, 10.9, 11.0] {
        println!("  y = {y:<5} U = {:.6}", u.eval(y, 2.0));
    }
    for q in boundary_layer_ladder(&data, &[0.4, 0.2], 2.0, 0.005, 1e-3, 2)? {
        println!(
            "  eps = {}: sup |U_cone - U_uniform| = {:.3e} at y = {:.2}",
            q.eps, q.sup_error, q.at_y
        );
    }
    Ok(())
}
