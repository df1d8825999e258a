//! Two slits with a gap: the wave at the gap midpoint is exactly zero until
//! the two cones meet, in both the path integral and the cone-bounded
//! Schrödinger solver.

use lightcone::error::Result;
use lightcone::experiments::{two_slit, TwoSlitResult};
use lightcone::params::PhysicalParams;

fn main() -> Result<()> {
    let p = PhysicalParams {
        hbar: 0.005,
        ..PhysicalParams::natural(1.0, 0.1)
    };
    let r = two_slit(&p, &[(-1.0, 0.0), (2.0, 3.0)], 64, p.hbar / 4.0, 1.3)?;
    println!(
        "apex ({}, {}), xi = {}, cone solver merged at {:?}",
        r.apex_x, r.apex_t, r.xi, r.merges
    );
    println!("{:>6} {:>14}", "t", "|psi(1,t)|");
    for (t, v) in r.path.iter().filter(|(t, _)| *t > 0.75) {
        println!("{t:>6.2} {v:>14.3e}");
    }
    for (name, s) in [("path integral", &r.path), ("cone solver", &r.cone)] {
        println!(
            "{name}: max before apex {:.1e}, max by t = 1.3 {:.2e}",
            TwoSlitResult::max_before_apex(s, r.apex_t),
            TwoSlitResult::max_until(s, 1.3)
        );
    }
    Ok(())
}
