mod common;

use common::*;
use eviohmm::crisp::deterministic_test;
use eviohmm::effectiveness::{run_forward, sliding_effectiveness_with};
use eviohmm::forward::{predict, predict_state};
use eviohmm::possibility::{ConstraintVector, PossibilityDistribution as D};
use eviohmm::transition::singleton_transition_bbas;
use eviohmm::{
    build_transition_rows, combine_disjunctive, sliding_effectiveness, EvIohmmModel, Frame,
    MassFunction, Observation, PredictionPath,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

/// Random possibilistic model: arcs and emissions are trapezoids on `u` and
/// `y`, some arcs forbidden.
fn random_fuzzy_model<R: Rng>(rng: &mut R, n: usize) -> EvIohmmModel {
    let trap = |rng: &mut R| {
        let mut v: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..10.0)).collect();
        v.sort_by(f64::total_cmp);
        D::trapezoid(v[0], v[1], v[2], v[3]).unwrap()
    };
    let transitions = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.gen_bool(0.1) {
                        ConstraintVector::forbidden()
                    } else {
                        ConstraintVector::single("u", trap(rng))
                    }
                })
                .collect()
        })
        .collect();
    let emissions = (0..n)
        .map(|_| ConstraintVector::single("y", trap(rng)))
        .collect();
    EvIohmmModel::new(frame(n), transitions, emissions).unwrap()
}

fn input(u: f64) -> Observation {
    [("u".to_string(), u)].into()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prediction_paths_agree(seed in any::<u64>(), n in 1usize..=5, u in 0.0..10.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_fuzzy_model(&mut rng, n);
        let prior = random_bba(&mut rng, n, false);
        let a = predict_state(&model, &prior, &input(u), PredictionPath::Commonality).unwrap();
        let b = predict_state(&model, &prior, &input(u), PredictionPath::Plausibility).unwrap();
        prop_assert!(max_abs_diff(a.masses(), b.masses()) < TOL);
    }

    #[test]
    fn vacuous_prior_predicts_the_full_row(seed in any::<u64>(), n in 1usize..=5, u in 0.0..10.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_fuzzy_model(&mut rng, n);
        let rows = build_transition_rows(&model, &input(u)).unwrap();
        let vac = MassFunction::vacuous(model.frame().clone());
        let predicted = predict(&vac, &rows).unwrap();
        prop_assert!(max_abs_diff(predicted.masses(), rows.row(model.frame().full_set()).masses()) < 1e-12);
    }

    #[test]
    fn rows_are_disjunctions_of_singleton_rows(seed in any::<u64>(), n in 1usize..=4, u in 0.0..10.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_fuzzy_model(&mut rng, n);
        let singles = singleton_transition_bbas(&model, &input(u)).unwrap();
        let rows = build_transition_rows(&model, &input(u)).unwrap();
        prop_assert_eq!(rows.row(0), &MassFunction::empty_categorical(model.frame().clone()));
        for subset in 1..rows.len() {
            let mut members = (0..n).filter(|i| subset & (1 << i) != 0);
            let first = singles[members.next().unwrap()].clone();
            let expected = members.fold(first, |acc, i| combine_disjunctive(&acc, &singles[i]).unwrap());
            prop_assert!(max_abs_diff(rows.row(subset).masses(), expected.masses()) < TOL);
        }
    }

    #[test]
    fn widening_a_zone_never_lowers_step_effectiveness(
        seed in any::<u64>(),
        n in 1usize..=4,
        u in 0.0..10.0f64,
        y in 0.0..10.0f64,
        widen in 0.0..3.0f64,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = frame(n);
        let mut params: Vec<[f64; 4]> = (0..n * n + n)
            .map(|_| {
                let mut v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.0..10.0));
                v.sort_by(f64::total_cmp);
                v
            })
            .collect();
        let build = |params: &[[f64; 4]]| {
            let cv = |var: &str, p: &[f64; 4]| ConstraintVector::single(var, D::trapezoid(p[0], p[1], p[2], p[3]).unwrap());
            let transitions = (0..n).map(|i| (0..n).map(|j| cv("u", &params[i * n + j])).collect()).collect();
            let emissions = (0..n).map(|i| cv("y", &params[n * n + i])).collect();
            EvIohmmModel::new(frame.clone(), transitions, emissions).unwrap()
        };
        let prior = random_bba(&mut rng, n, false);
        let step_value = |model: &EvIohmmModel| {
            let predicted = predict_state(model, &prior, &input(u), PredictionPath::Plausibility).unwrap();
            let emission = eviohmm::forward::emission_bba(model, &[("y".to_string(), y)].into()).unwrap();
            1.0 - eviohmm::conflict_mass(&predicted, &emission).unwrap()
        };
        let before = step_value(&build(&params));
        let target = rng.gen_range(0..params.len());
        let p = &mut params[target];
        *p = [p[0] - widen, p[1] - widen / 2.0, p[2] + widen / 2.0, p[3] + widen];
        let after = step_value(&build(&params));
        prop_assert!(after >= before - TOL, "{before} -> {after}");
    }

    #[test]
    fn effectiveness_is_a_probability_and_windows_are_products(seed in any::<u64>(), n in 1usize..=4, len in 1usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_fuzzy_model(&mut rng, n);
        let trace = random_crisp_trace(&mut rng, len);
        let window = rng.gen_range(1..=len);
        let stride = rng.gen_range(1..=3);
        let report = sliding_effectiveness(&trace, &model, window, stride).unwrap();
        prop_assert_eq!(report.steps.len(), len);
        for s in &report.steps {
            prop_assert!((0.0..=1.0).contains(&s.conflict));
        }
        prop_assert!((0.0..=1.0).contains(&report.overall()));
        let expected_windows = (len - window) / stride + 1;
        prop_assert_eq!(report.windows.len(), expected_windows);
        for w in &report.windows {
            prop_assert_eq!(w.len(), window);
            let product: f64 = w.conflicts.iter().map(|c| 1.0 - c).product();
            prop_assert!((w.effectiveness - product).abs() < 1e-12);
            let fresh = run_forward(&model, &trace[w.start..=w.end], PredictionPath::Commonality).unwrap();
            prop_assert!((fresh.effectiveness() - w.effectiveness).abs() < TOL);
        }
        let other = sliding_effectiveness_with(&trace, &model, window, stride, PredictionPath::Commonality).unwrap();
        for (a, b) in report.steps.iter().zip(&other.steps) {
            prop_assert!((a.conflict - b.conflict).abs() < TOL);
        }
    }
}

#[test]
fn bayesian_models_reduce_to_the_probabilistic_forward() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let n = rng.gen_range(1..=3);
        let len = rng.gen_range(1..=5);
        let case = BayesianCase::random(&mut rng, n, len);
        let run = run_forward(&case.model, &case.trace, PredictionPath::Plausibility).unwrap();
        let oracle = case.brute_force_likelihood();
        let got = run.effectiveness();
        assert!(
            (got - oracle).abs() <= 1e-9 * oracle.abs().max(1e-300),
            "{got} vs {oracle}"
        );
    }
}

#[test]
fn crisp_models_reduce_to_the_deterministic_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut ones, mut zeros) = (0, 0);
    for _ in 0..60 {
        let n = rng.gen_range(1..=3);
        let len = rng.gen_range(1..=6);
        let model = random_crisp_model(&mut rng, n);
        let trace = random_crisp_trace(&mut rng, len);
        let run = run_forward(&model, &trace, PredictionPath::Plausibility).unwrap();
        for m in run.current().masses() {
            assert!(*m == 0.0 || *m == 1.0);
        }
        let mut best = false;
        for_each_sequence(n, len, |seq| {
            best |= deterministic_test(&model, seq, &trace).unwrap();
        });
        let e = run.effectiveness();
        assert_eq!(e, if best { 1.0 } else { 0.0 });
        if best {
            ones += 1
        } else {
            zeros += 1
        }
    }
    assert!(ones > 0 && zeros > 0);
}

#[test]
fn comfort_and_breach_on_a_two_state_model() {
    let frame = Frame::new(["x1", "x2"]).unwrap();
    let low = ConstraintVector::single("pres", D::ramp_down(3.0, 5.0).unwrap());
    let high = ConstraintVector::single("pres", D::ramp_up(15.0, 20.0).unwrap());
    let model = EvIohmmModel::new(
        frame,
        vec![vec![low.clone(), high.clone()], vec![low, high]],
        vec![
            ConstraintVector::single("lum", D::ramp_down(5.0, 10.0).unwrap()),
            ConstraintVector::single("lum", D::ramp_up(23.0, 25.0).unwrap()),
        ],
    )
    .unwrap();
    // Presence at t-1 makes the room bright at t.
    let presence = [1.0, 25.0, 25.0, 1.0, 25.0, 1.0, 1.0, 25.0];
    let comfort: Vec<_> = (0..presence.len())
        .map(|t| {
            let bright = t > 0 && presence[t - 1] > 10.0;
            let lum = if bright { 30.0 } else { 3.0 };
            record(t as f64, &[("pres", presence[t])], &[("lum", lum)])
        })
        .collect();
    let report = sliding_effectiveness(&comfort, &model, 3, 1).unwrap();
    assert!(report.steps.iter().all(|s| s.conflict == 0.0));
    assert!(report.windows.iter().all(|w| w.effectiveness == 1.0));

    let mut breach = comfort.clone();
    breach[5].outputs.insert("lum".into(), 17.0);
    let report = sliding_effectiveness(&breach, &model, 3, 1).unwrap();
    assert_eq!(report.steps[5].conflict, 1.0);
    assert!(report.steps[5].reset);
    for w in &report.windows {
        let covers = (w.start..=w.end).contains(&5);
        assert_eq!(
            w.effectiveness == 0.0,
            covers,
            "window {}..={}",
            w.start,
            w.end
        );
    }
}
