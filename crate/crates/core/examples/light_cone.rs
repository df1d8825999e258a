//! Light-cone geometry of a two-slit support: the region the wave can reach,
//! the exclusion triangle over the gap and the regime check for a time step.

use lightcone::error::Result;
use lightcone::geometry::{LightConeGeometry, SupportRegion};
use lightcone::params::{check_regime, derive_groups, PhysicalParams};

fn main() -> Result<()> {
    let slits = SupportRegion::new([(-1.0, 0.0), (2.0, 3.0)])?;
    let geo = LightConeGeometry::new(slits, 1.0)?;
    for tri in &geo.triangles {
        println!(
            "gap ({}, {}) closes at x = {}, t = {}",
            tri.a,
            tri.b,
            tri.apex_x(),
            tri.apex_t
        );
    }
    for t in [0.0, 0.5, 0.99, 1.0, 2.0] {
        let region = geo.active_region(t);
        let ivs: Vec<_> = region.intervals().iter().map(|iv| (iv.lo, iv.hi)).collect();
        println!("t = {t:<4}  reachable {ivs:?}  (measure {:.2})", region.measure());
    }
    let inside = geo.triangles[0].contains(1.0, 0.9, geo.c);
    println!("(x=1, t=0.9) inside the exclusion triangle: {inside}");

    println!();
    for (hbar, dt) in [(1.0, 1.0), (0.005, 0.1), (0.005, 0.001)] {
        let p = PhysicalParams {
            hbar,
            ..PhysicalParams::natural(1.0, dt)
        };
        let (xi, _) = derive_groups(&p)?;
        let r = check_regime(&p, 1.0);
        println!(
            "hbar = {hbar:<6} dt = {dt:<6} xi = {xi:<8} in the stationary-phase regime: {}",
            r.ok()
        );
    }

    let mut csv = Vec::new();
    geo.write_snapshots(&[0.0, 0.5, 1.0], &mut csv)?;
    print!("\n{}", String::from_utf8_lossy(&csv));
    Ok(())
}
