//! Time-sliced path integral on box data. The support grows by exactly `cΔt`
//! per slice and everything outside stays exactly zero. The visible front
//! lags well behind the cone: the kernel damps the fast components that
//! would carry amplitude out to it.

use lightcone::diagnostics::{front_slope, front_track};
use lightcone::error::Result;
use lightcone::kernel::Lagrangian;
use lightcone::params::PhysicalParams;
use lightcone::propagator::{run, Backend, Propagator, RunOptions};
use lightcone::wave::InitialData;

fn main() -> Result<()> {
    let p = PhysicalParams {
        hbar: 5e-4,
        ..PhysicalParams::natural(1.0, 0.05)
    };
    let w = 64;
    let dx = p.cone_step() / w as f64;
    let data = InitialData::Box(vec![(-1.0, 1.0)]);
    let prop = Propagator::new(&Lagrangian::Relativistic, p, dx)?;
    let psi0 = data.sample(dx)?;
    let opts = RunOptions {
        backend: Backend::Fft,
        stride: 20,
        ..RunOptions::default()
    };
    let traj = run(&prop, &psi0, &data.support(), 100, opts, None)?;

    println!("xi = {}, c dt = {}, W = {w}", p.xi(), p.cone_step());
    for s in &traj.snapshots {
        let edge = s.values[0].norm().max(s.values[s.len() - 1].norm());
        println!(
            "t = {:.2}  grid [{:+.3}, {:+.3}]  |psi| at the cone edge = {edge:e}  norm {:.6}",
            s.t,
            s.origin,
            s.x_end(),
            s.norm()
        );
    }
    let fronts = front_track(&traj, 1e-8)?;
    println!(
        "speed of the 1e-8 front: {:.4} (cone speed c = {})",
        front_slope(&fronts)?,
        p.c
    );
    Ok(())
}
