use num_traits::Zero;
use occwalk::basis::initial_state;
use occwalk::classical::{chung_feller, enumerate_paths, exact_distribution};
use occwalk::cmv::gauge_state;
use occwalk::coin::catalog;
use occwalk::engine::{default_half_width, occupation, DensityLedger};
use occwalk::{BasisIndex, Engine, Execution, ModelSpec, C64};
use proptest::prelude::*;

fn model_strategy() -> impl Strategy<Value = ModelSpec> {
    prop_oneof![
        Just(ModelSpec::Hadamard),
        (-0.95f64..0.95).prop_map(|alpha| ModelSpec::Constant { alpha }),
        Just(ModelSpec::PolynomialCoin),
        (0.0f64..0.6, 2u32..6).prop_map(|(a, depth)| ModelSpec::Riesz {
            alpha_minus_one: C64::new(a, 0.0),
            depth
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauge_leaves_distributions_unchanged(
        model in model_strategy(),
        n in 1usize..9,
        seed in prop::collection::vec(0.0f64..std::f64::consts::TAU, 64),
    ) {
        let l = default_half_width(n);
        let u = catalog(&model, l).unwrap().unitary(l).unwrap();
        let psi = initial_state(l).unwrap();
        let phase = |f: i64| C64::from_polar(1.0, seed[f.rem_euclid(64) as usize] * (1.0 + f as f64 * 0.01));
        let ug = u.gauge_transform(phase).unwrap();
        let psig = gauge_state(&psi, phase);
        for engine in [Engine::Brute, Engine::Density, Engine::Transform] {
            let a = engine.run(&u, &psi, n, Execution::default()).unwrap();
            let b = engine.run(&ug, &psig, n, Execution::default()).unwrap();
            for (x, y) in a.probs.iter().zip(&b.probs) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn ledger_conserves_trace_and_stays_in_light_cone(model in model_strategy(), n in 1usize..16) {
        let l = default_half_width(n);
        let u = catalog(&model, l).unwrap().unitary(l).unwrap();
        let psi = initial_state(l).unwrap();
        let mut ledger = DensityLedger::new(&u, &psi, Execution::default()).unwrap();
        for k in 1..=n {
            ledger.step().unwrap();
            let total: f64 = ledger.traces().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for b in ledger.blocks() {
                for site in (k as i64 + 2)..=(l as i64) {
                    for spin in [occwalk::Spin::Up, occwalk::Spin::Down] {
                        for s in [site, -site] {
                            let f = BasisIndex::new(s, spin).flat();
                            prop_assert!(b.get(f, f).is_zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn distributions_are_probability_vectors(model in model_strategy(), n in 0usize..24) {
        let d = occupation(&model, n, Engine::Transform, Execution::default()).unwrap();
        prop_assert_eq!(d.probs.len(), n + 1);
        prop_assert!(d.probs.iter().all(|p| (0.0..=1.0).contains(p)));
        prop_assert!((d.sum() - 1.0).abs() < 1e-12);
        let cdf = d.cdf();
        prop_assert!(cdf.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn classical_closed_forms_agree_with_enumeration() {
    for n in 1..=16usize {
        let exact = exact_distribution(n as u64);
        assert_eq!(exact, enumerate_paths(n).unwrap(), "n={n}");
        if n % 2 == 0 {
            for r in 0..=n / 2 {
                assert_eq!(exact[2 * r], chung_feller(n as u64 / 2, r as u64).unwrap());
            }
        }
    }
}
