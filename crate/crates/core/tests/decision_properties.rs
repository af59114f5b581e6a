//! Criterion invariants over random matrices. Payoffs are small integers
//! and lambda a multiple of 1/16, so every score is computed exactly and
//! the comparisons below need no tolerance.

use comply_core::decision::*;
use proptest::prelude::*;

fn grid() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(a, s)| {
        prop::collection::vec(prop::collection::vec((-50i32..=50).prop_map(f64::from), s), a)
    })
}

fn matrix(values: Vec<Vec<f64>>) -> PayoffMatrix {
    PayoffMatrix::from_values(values).unwrap()
}

fn lambda() -> impl Strategy<Value = f64> {
    (0u32..=16).prop_map(|k| k as f64 / 16.0)
}

fn all(m: &PayoffMatrix, l: f64) -> [StrategyChoice; 3] {
    [wald(m), hurwicz(m, l).unwrap(), savage(m)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hurwicz_at_zero_is_wald(v in grid()) {
        let m = matrix(v);
        let w = wald(&m);
        let h = hurwicz(&m, 0.0).unwrap();
        prop_assert_eq!(h.chosen_action_index, w.chosen_action_index);
        prop_assert_eq!(h.criterion_value, w.criterion_value);
        prop_assert_eq!(h.per_action_scores, w.per_action_scores);
    }

    #[test]
    fn constant_shift(v in grid(), c in -50i32..=50, l in lambda()) {
        let c = f64::from(c);
        let shifted: Vec<Vec<f64>> = v.iter().map(|r| r.iter().map(|x| x + c).collect()).collect();
        let (m, ms) = (matrix(v), matrix(shifted));
        let (a, b) = (all(&m, l), all(&ms, l));
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.chosen_action_index, y.chosen_action_index);
        }
        prop_assert_eq!(a[0].criterion_value + c, b[0].criterion_value);
        prop_assert_eq!(a[1].criterion_value + c, b[1].criterion_value);
        prop_assert_eq!(&a[2].regret_matrix, &b[2].regret_matrix);
    }

    #[test]
    fn positive_scaling(v in grid(), k in 1i32..=8, l in lambda()) {
        let k = f64::from(k);
        let scaled: Vec<Vec<f64>> = v.iter().map(|r| r.iter().map(|x| x * k).collect()).collect();
        let (a, b) = (all(&matrix(v), l), all(&matrix(scaled), l));
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.chosen_action_index, y.chosen_action_index);
        }
    }

    #[test]
    fn savage_ignores_column_shift(v in grid(), col in 0usize..6, c in -50i32..=50) {
        let col = col % v[0].len();
        let mut shifted = v.clone();
        for row in &mut shifted {
            row[col] += f64::from(c);
        }
        let (a, b) = (savage(&matrix(v)), savage(&matrix(shifted)));
        prop_assert_eq!(a.regret_matrix, b.regret_matrix);
        prop_assert_eq!(a.chosen_action_index, b.chosen_action_index);
    }

    #[test]
    fn dominance_never_penalized(
        v in grid(),
        pick in (0usize..6, 0usize..6),
        bumps in prop::collection::vec(0i32..=5, 6),
        l in lambda(),
    ) {
        prop_assume!(v.len() >= 2);
        let (weak, strong) = (pick.0 % v.len(), pick.1 % v.len());
        prop_assume!(weak != strong);
        let mut v = v;
        let mut dominant: Vec<f64> = v[weak]
            .iter()
            .zip(&bumps)
            .map(|(x, b)| x + f64::from(*b))
            .collect();
        dominant[0] += 1.0;
        v[strong] = dominant;
        let m = matrix(v);
        let [w, h, s] = all(&m, l);
        prop_assert!(w.per_action_scores[strong] >= w.per_action_scores[weak]);
        prop_assert!(h.per_action_scores[strong] >= h.per_action_scores[weak]);
        prop_assert!(s.per_action_scores[strong] <= s.per_action_scores[weak]);
    }

    #[test]
    fn choice_is_first_optimum(v in grid(), l in lambda()) {
        let m = matrix(v);
        for c in all(&m, l) {
            let scores = &c.per_action_scores;
            let best = if c.criterion == Criterion::Savage {
                scores.iter().cloned().fold(f64::INFINITY, f64::min)
            } else {
                scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            };
            let first = scores.iter().position(|&x| x == best).unwrap();
            prop_assert_eq!(c.chosen_action_index, first);
            prop_assert_eq!(c.criterion_value, best);
        }
    }
}

#[test]
fn scenario_two_labels() {
    let m = PayoffMatrix::new(
        vec!["Strictly comply".into(), "Reasonably comply".into(), "Somehow comply".into()],
        vec!["High cost".into(), "Medium cost".into(), "Low cost".into()],
        vec![vec![1.0, 1.0, 1.0], vec![-1.0, 1.0, 1.0], vec![-1.0, -1.0, 1.0]],
    )
    .unwrap();
    for criterion in [Criterion::Wald, Criterion::Hurwicz, Criterion::Savage] {
        let c = decide(&DecisionSpec::new(m.clone(), criterion)).unwrap();
        assert_eq!(c.chosen_action_label, "Strictly comply", "{criterion}");
    }
    let one = PayoffMatrix::from_values(vec![vec![3.0]]).unwrap();
    assert_eq!(decide(&DecisionSpec::new(one, Criterion::Savage)).unwrap().chosen_action_index, 0);
}
