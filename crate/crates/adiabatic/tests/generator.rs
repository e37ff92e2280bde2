use hfine_adiabatic::{relaxation_generator, Transition};
use proptest::prelude::*;

fn transitions(n: usize) -> impl Strategy<Value = Vec<Transition>> {
    prop::collection::vec((0..n, 0..n, 0.0f64..5.0), 1..(3 * n))
        .prop_map(|v| v.into_iter().map(|(from, to, rate)| Transition { from, to, rate }).collect())
}

fn ring(n: usize) -> Vec<Transition> {
    (0..n).map(|i| Transition { from: i, to: (i + 1) % n, rate: 0.3 }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn columns_sum_to_zero_and_offdiagonals_nonnegative(extra in transitions(6)) {
        let g = relaxation_generator(6, &extra).unwrap().to_dense();
        for j in 0..6 {
            let s: f64 = g.column(j).iter().sum();
            prop_assert!(s.abs() <= 1e-12);
            for i in 0..6 {
                if i != j {
                    prop_assert!(g[(i, j)] >= 0.0);
                }
            }
        }
    }

    #[test]
    fn stationary_is_a_normalized_null_vector(extra in transitions(5)) {
        let mut all = ring(5);
        all.extend(extra);
        let g = relaxation_generator(5, &all).unwrap();
        let p = g.stationary().unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        let scale = g.out_rates().iter().fold(0.0f64, |a, &b| a.max(b));
        prop_assert!(g.apply(&p).iter().all(|r| r.abs() <= 1e-10 * scale));
    }

    #[test]
    fn propagation_conserves_probability(extra in transitions(4), t in 0.0f64..3.0) {
        let g = relaxation_generator(4, &extra).unwrap();
        let p = g.propagate(&[0.25, 0.25, 0.5, 0.0], t).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(p.iter().all(|&x| x >= -1e-12));
    }
}
