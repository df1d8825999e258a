//! The kinetic coefficient `C(ξ)` of the relativistic short-time kernel.
//!
//! For small `ξ` it grows like `ξ/6`; for large `ξ` it oscillates around the
//! Schrödinger value `i/2` with a slowly shrinking envelope.
//!
//! ```sh
//! cargo run --release --example coefficient_curve
//! ```

use lightcone::error::Result;
use lightcone::experiments::{coefficient_window, linspace};
use lightcone::kernel::{closed_form_check, coefficient_curve, Lagrangian};

fn main() -> Result<()> {
    let l = Lagrangian::Relativistic;

    println!("{:>8} {:>12} {:>12} {:>10}", "xi", "Re C", "Im C", "xi/6");
    for s in coefficient_curve(&l, &[0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 20.0, 100.0])? {
        println!("{:>8} {:>12.6} {:>12.6} {:>10.5}", s.xi, s.c.re, s.c.im, s.xi / 6.0);
    }

    // I₀ also has a closed form in Bessel and Struve functions
    let xi = 7.5;
    let [i0, _, _] = lightcone::kernel::moments(&l, xi)?;
    println!(
        "\nI0({xi}) quadrature {i0:.10}, closed form {:.10}",
        closed_form_check(xi)?
    );

    let window = coefficient_curve(&l, &linspace(1000.0, 1200.0, 201))?;
    let w = coefficient_window(&window)?;
    println!(
        "\nxi in [1000, 1200]: mean C = {:.5} + {:.5}i, envelope per quarter {:.4?}",
        w.mean_re, w.mean_im, w.envelope
    );
    Ok(())
}
