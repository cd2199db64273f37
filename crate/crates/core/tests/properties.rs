use proptest::prelude::*;

use kinetic_lift::cr::cr_weights;
use kinetic_lift::io::{read_snapshot, write_snapshot};
use kinetic_lift::kinetic::{DistributionField, SpatialGrid, VelocityGrid};
use kinetic_lift::projection::{ConservedProjector, MomentBasis};
use kinetic_lift::scenario::Scenario;

fn desk() -> Scenario {
    let path = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios/helium_desk.cfg");
    Scenario::from_path(path).unwrap()
}

proptest! {
    #[test]
    fn weights_reproduce_polynomials(m in 0usize..=8) {
        // sum_j w_j p(j) = p(0) for every polynomial of degree <= m
        let w = cr_weights(m).unwrap();
        for deg in 0..=m as i32 {
            let s: f64 = w.iter().enumerate().map(|(i, w)| w * ((i + 1) as f64).powi(deg)).sum();
            let expected = if deg == 0 { 1.0 } else { 0.0 };
            prop_assert!((s - expected).abs() < 1e-6 * 2f64.powi(m as i32 + 1), "deg {deg}: {s}");
        }
    }

    #[test]
    fn reset_is_idempotent_and_keeps_moments(
        q in 4usize..40,
        k in 1usize..=3,
        seed in prop::collection::vec(0.0f64..1.0, 80),
    ) {
        let vgrid = VelocityGrid::symmetric(1.0e4, q).unwrap();
        let basis = MomentBasis::monomial(vgrid.velocities(), k).unwrap();
        let f0 = &seed[..q];
        let pre: Vec<f64> = seed[q..2 * q].iter().map(|x| 2.0 * x - 0.5).collect();
        let mut once = vec![0.0; q];
        basis.reset(&pre, f0, &mut once);
        let mut twice = vec![0.0; q];
        basis.reset(&once, f0, &mut twice);
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
        let m_out = basis.conserved_moments(&once);
        let m_in = basis.conserved_moments(f0);
        for p in 0..k {
            let v = vgrid.velocities();
            let scale: f64 = f0.iter().zip(v).map(|(f, x)| (f * x.powi(p as i32)).abs()).sum();
            prop_assert!((m_out[p] - m_in[p]).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn scenario_round_trip(
        n in 1usize..5000,
        nv in 4usize..80,
        lambda in 1.0f64..1e5,
        cfl in 0.01f64..1.0,
        order in 0usize..=8,
        newton in any::<bool>(),
        centered in any::<bool>(),
        p_ratio in 0.01f64..10.0,
    ) {
        let mut s = desk();
        s.n_cells = n;
        s.n_velocities = nv;
        s.lambda_multiple = lambda;
        s.cfl = cfl;
        s.cr_order = order;
        s.surface_p_ratio = p_ratio;
        s.cr_solver = if newton { "newton".parse().unwrap() } else { "picard".parse().unwrap() };
        s.flux = if centered { "centered".parse().unwrap() } else { "upwind".parse().unwrap() };
        let back = Scenario::parse(&s.serialize()).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.config_hash(), s.config_hash());
    }

    #[test]
    fn snapshot_round_trip(
        values in prop::collection::vec(-1e300f64..1e300, 12),
        time in 0.0f64..1.0,
    ) {
        let f = DistributionField::new(
            SpatialGrid::new(0.3, 3).unwrap(),
            VelocityGrid::new(-2.5, 7.0, 4).unwrap(),
            values,
            time,
            1.0,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.klift");
        write_snapshot(&path, &f).unwrap();
        let g = read_snapshot(&path).unwrap();
        prop_assert_eq!(g.values, f.values);
        prop_assert_eq!(g.grid, f.grid);
        prop_assert_eq!(g.vgrid, f.vgrid);
        prop_assert_eq!(g.time.to_bits(), f.time.to_bits());
    }
}
