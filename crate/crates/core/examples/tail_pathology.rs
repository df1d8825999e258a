//! Box data under free Schrödinger evolution develops `|x|⁻¹` tails, so its
//! second moment diverges with the integration window; inside the light cone
//! the same moment is bounded.

use lightcone::error::Result;
use lightcone::experiments::tail_pathology;

fn main() -> Result<()> {
    let r = tail_pathology(
        1.0 / 128.0,
        1 << 18,
        1.0,
        (5.0, 200.0),
        16,
        &[25.0, 50.0, 100.0, 200.0],
        4.0,
        5.0,
        0.01,
    )?;
    println!(
        "log-log tail slope on [5, 200]: {:.3} (r^2 = {:.4})",
        r.fit.slope, r.fit.r2
    );
    println!(
        "max deviation from the Fresnel closed form on |x| <= 4: {:.2e}",
        r.fresnel_error
    );
    for (radius, m) in &r.moments {
        println!("  int_{{|x|<{radius}}} x^2 |psi|^2 = {m:.3}");
    }
    println!("window growth exponent {:.3}", r.growth);
    println!("cone-bounded second moment {:.3} <= {:.3}", r.cone_moment, r.cone_bound);
    Ok(())
}
