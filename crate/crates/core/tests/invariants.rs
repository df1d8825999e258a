//! Structural invariants of the propagator and the cone solver on random
//! inputs.

use num_complex::Complex64;
use proptest::prelude::*;

use lightcone::geometry::SupportRegion;
use lightcone::kernel::Lagrangian;
use lightcone::params::PhysicalParams;
use lightcone::propagator::{Backend, Propagator};
use lightcone::schrodinger::ConeSolver;
use lightcone::wave::WaveFunction;

/// Random values on `n` nodes starting at node `k0`.
fn wave(k0: i64, dx: f64, vals: &[(f64, f64)]) -> WaveFunction {
    let v = vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
    WaveFunction::new(k0 as f64 * dx, dx, v, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn nothing_leaves_the_dilated_support(
        xi in 5.0f64..500.0,
        w in 16usize..64,
        k0 in -50i64..50,
        vals in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..120),
    ) {
        let p = PhysicalParams::from_xi_and_cone_step(xi, 1.0);
        let dx = 1.0 / w as f64;
        let psi = wave(k0, dx, &vals);
        let prop = Propagator::new(&Lagrangian::Relativistic, p, dx).unwrap();
        let d = prop.step(&psi, Backend::Direct, None).unwrap();
        let f = prop.step(&psi, Backend::Fft, None).unwrap();
        prop_assert_eq!(d.len(), psi.len() + 2 * w);
        prop_assert_eq!(d.values[0], Complex64::new(0.0, 0.0));
        prop_assert_eq!(f.values[f.len() - 1], Complex64::new(0.0, 0.0));
        let scale = d.max_abs().max(1e-300);
        for (a, b) in d.values.iter().zip(&f.values) {
            prop_assert!((a - b).norm() <= 1e-11 * scale);
        }
    }

    #[test]
    fn cone_solver_conserves_norm_and_keeps_dirichlet_nodes(
        c in 0.5f64..4.0,
        dx_inv in 20usize..60,
        gap in 0.3f64..1.5,
        seed_vals in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
    ) {
        let dx = 1.0 / dx_inv as f64;
        let support = SupportRegion::new([(-1.0, 0.0), (gap, gap + 1.0)]).unwrap();
        let hull = support.hull().unwrap();
        // a smooth random trigonometric profile vanishing at the interval ends
        let psi0 = WaveFunction::on_interval(hull.lo, hull.hi, dx, |x| {
            if !support.contains_interior(x) {
                return Complex64::new(0.0, 0.0);
            }
            let u = x - x.floor();
            let s = (std::f64::consts::PI * u).sin();
            seed_vals.iter().enumerate().map(|(n, &(a, b))| Complex64::new(a, b) * (n as f64 * 2.0 * x).cos() * s).sum()
        });
        let p = PhysicalParams::natural(c, 1.0);
        let mut solver = ConeSolver::new(&psi0, &support, &p, dx / c, None).unwrap();
        let mut prev = solver.norm();
        for _ in 0..40 {
            solver.cone_step().unwrap();
            let now = solver.norm();
            prop_assert!((now - prev).abs() <= 1e-8 * prev.max(1e-300), "{} -> {}", prev, now);
            prev = now;
            for &(a, b) in solver.active_nodes() {
                prop_assert_eq!(solver.value_at_node(a), Complex64::new(0.0, 0.0));
                prop_assert_eq!(solver.value_at_node(b), Complex64::new(0.0, 0.0));
            }
            let t = solver.t();
            let state = solver.state();
            let region = support.dilate(c * t + dx);
            for i in 0..state.len() {
                if !region.contains(state.x(i)) {
                    prop_assert_eq!(state.values[i], Complex64::new(0.0, 0.0));
                }
            }
        }
    }
}
