use facdirac::cli::{run_verify, Scenario, ScenarioConfig};
use facdirac::dirac2::{
    anti_intertwine_residual, apply_intertwiner, dirac_apply, dirac_spectrum, dirac_square_residual, eigenspinor,
    intertwine_residual, neighbor_index, DiracOperator, IntertwinerKind, Sign,
};
use facdirac::dirac4::{massive_apply, mixing_coefficient, MassiveOperator};
use facdirac::geometry::{reduce_scalar, reduce_spinor, reduced_square_residual, Surface};
use facdirac::grid::{relative_residual, Grid, Spinor2, Spinor4};
use facdirac::hierarchy::{factorization_residual, scalar_intertwine_residual, shape_invariance_residual};
use facdirac::models::{Family, Model};
use facdirac::testfn::{random_bump, random_spinor, rng};
use proptest::prelude::*;

fn grid(m: &Model) -> Grid {
    m.default_grid()
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::TrigPt), Just(Family::HypPt)]
}

/// (family, n) with an intertwining partner on both sides.
fn indexed() -> impl Strategy<Value = (Family, u32)> {
    family().prop_flat_map(|f| {
        let lo = match f {
            Family::TrigPt => 0,
            Family::HypPt => 2,
        };
        (Just(f), lo..6u32)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scalar_identities_hold_on_random_bumps((f, n) in indexed(), seed in any::<u64>()) {
        let m = Model::new(f);
        let g = grid(&m);
        let psi = random_bump(&g, &mut rng(seed));
        prop_assert!(factorization_residual(&m, n, &psi).unwrap() < 1e-5);
        prop_assert!(shape_invariance_residual(&m, n, &psi).unwrap() < 1e-5);
        prop_assert!(scalar_intertwine_residual(&m, n, &psi).unwrap() < 1e-5);
    }

    #[test]
    fn dirac_identities_hold_on_random_spinors((f, n) in indexed(), seed in any::<u64>()) {
        let m = Model::new(f);
        let g = grid(&m);
        let psi: Spinor2 = random_spinor(&g, &mut rng(seed));
        let op = DiracOperator::new(m, n).unwrap();
        prop_assert!(dirac_square_residual(&op, &psi).unwrap() < 1e-5);
        prop_assert!(intertwine_residual(&m, n, &psi).unwrap() < 1e-5);
        prop_assert!(anti_intertwine_residual(&m, n, &psi).unwrap() < 1e-5);
    }

    #[test]
    fn spectrum_is_symmetric_with_one_unpaired_state((f, n) in indexed(), k in 0u32..4) {
        let m = Model::new(f);
        let k_max = m.k_max(n).map_or(k, |top| k.min(top));
        let op = DiracOperator::new(m, n).unwrap();
        let spec = dirac_spectrum(&op, k_max).unwrap();
        prop_assert_eq!(spec.len() as u32, 2 * k_max + 1);
        prop_assert!(spec.windows(2).all(|w| w[0].epsilon <= w[1].epsilon));
        let zero_level: Vec<_> = spec.iter().filter(|e| e.k == 0).collect();
        prop_assert_eq!(zero_level.len(), 1);
        for e in spec.iter().filter(|e| e.k > 0) {
            prop_assert!(spec.iter().any(|o| o.k == e.k && o.sign == e.sign.flip() && (o.epsilon + e.epsilon).abs() < 1e-12));
        }
    }

    /// R- carries an eigenspinor to the partner operator at the same energy,
    /// T- to the opposite energy.
    #[test]
    fn intertwiners_move_eigenspinors_between_operators((f, n) in indexed(), k in 1u32..4, plus in any::<bool>()) {
        let m = Model::new(f);
        let top = m.k_max(n).unwrap_or(k);
        prop_assume!(k <= top);
        let g = grid(&m);
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let op = DiracOperator::new(m, n).unwrap();
        let st = eigenspinor(&op, k, sign, &g).unwrap();
        let partner = DiracOperator::new(m, neighbor_index(&m, n).unwrap()).unwrap();
        for (kind, e) in [(IntertwinerKind::RMinus, st.entry.epsilon), (IntertwinerKind::TMinus, -st.entry.epsilon)] {
            let out = apply_intertwiner(&m, n, kind, &st.spinor).unwrap();
            if relative_residual(&out, &st.spinor) > 1e-3 {
                let h = dirac_apply(&partner, &out).unwrap();
                prop_assert!(relative_residual(&(&h - &(&out * e)), &out) < 1e-4);
            }
        }
    }

    #[test]
    fn massive_operator_squares_to_shifted_massless(n in 0u32..4, m0 in 0.0f64..3.0, seed in any::<u64>()) {
        let m = Model::new(Family::TrigPt);
        let g = grid(&m);
        let xi: Spinor4 = random_spinor(&g, &mut rng(seed));
        let base = DiracOperator::new(m, n).unwrap();
        let mo = MassiveOperator::new(base, m0).unwrap();
        let hh = massive_apply(&mo, &massive_apply(&mo, &xi).unwrap()).unwrap();
        let sq = |b: Spinor2| dirac_apply(&base, &dirac_apply(&base, &b).unwrap()).unwrap();
        let expect = Spinor4::from_blocks(sq(xi.upper_block()), sq(xi.lower_block())).unwrap();
        let diff = &(&hh - &expect) - &(&xi * (m0 * m0));
        prop_assert!(relative_residual(&diff, &xi) < 1e-4);
    }

    #[test]
    fn mixing_coefficient_is_bounded(eps in -20.0f64..20.0, m0 in 0.0f64..5.0) {
        let c = mixing_coefficient(eps, m0);
        prop_assert!(c.abs() <= 1.0);
        prop_assert_eq!(c.signum() * eps.signum() >= 0.0, true);
        if m0 == 0.0 && eps != 0.0 {
            prop_assert!((c.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn surfaces_reduce_to_the_hierarchy(sphere in any::<bool>(), p in 0u32..5, seed in any::<u64>()) {
        let sf = if sphere { Surface::Sphere } else { Surface::Hyperboloid };
        let m = sf.mode_for_index(p + sf.family().min_index().max(1));
        let n = sf.index_for_mode(m).unwrap();
        prop_assert_eq!(sf.mode_for_index(n), m);
        let g = grid(&sf.model());
        let mut r = rng(seed);
        let f = random_bump(&g, &mut r);
        let psi: Spinor2 = random_spinor(&g, &mut r);
        prop_assert!(reduce_scalar(sf, n, &f).unwrap() < 1e-5);
        prop_assert!(reduce_spinor(sf, m, &psi).unwrap() < 1e-5);
        prop_assert!(reduced_square_residual(sf, m, &psi).unwrap() < 1e-5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn verification_reports_depend_only_on_the_seed(seed in any::<u64>()) {
        let cfg = ScenarioConfig::from_json(
            r#"{"model_id":"trig_pt","n":1,"k_max":2,"grid":{"n_points":401},"checks":["intertwining","factorization","square_relation"]}"#,
        ).unwrap();
        let s = Scenario::new(cfg).unwrap();
        let a = run_verify(&s, seed, false);
        let b = run_verify(&s, seed, false);
        let (mut ja, mut jb) = (Vec::new(), Vec::new());
        a.write_json(&mut ja).unwrap();
        b.write_json(&mut jb).unwrap();
        prop_assert_eq!(ja, jb);
    }
}
