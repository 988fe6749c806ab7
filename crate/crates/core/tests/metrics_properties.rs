mod common;

use overlap_bound::metrics::{aupr, auroc, auroc_trapezoid, tpr_at_in_rate, LabeledScores};
use overlap_bound::synth::rng_from_seed;
use rand::Rng;

#[test]
fn metrics_match_brute_force() {
    let mut rng = rng_from_seed(31);
    for _ in 0..200 {
        let (scores, labels) = common::random_labeled(&mut rng);
        let ls = LabeledScores::new(scores.clone(), labels.clone()).unwrap();
        let expected = common::brute_auroc(&scores, &labels);
        assert!((auroc(&ls).unwrap() - expected).abs() <= 1e-12);
        assert!((auroc_trapezoid(&ls).unwrap() - expected).abs() <= 1e-12);
        assert!((aupr(&ls).unwrap() - common::brute_aupr(&scores, &labels)).abs() <= 1e-12);
        for rate in [0.5, 0.8, 0.95] {
            let got = tpr_at_in_rate(&ls, rate).unwrap();
            assert!((got - common::brute_tpr(&scores, &labels, rate)).abs() <= 1e-12);
        }
    }
}

#[test]
fn interleaved_hundred_and_hundred() {
    let pos: Vec<f64> = (0..100).map(|i| (2 * i + 1) as f64).collect();
    let neg: Vec<f64> = (0..100).map(|i| (2 * i) as f64 + 10.0).collect();
    let ls = LabeledScores::from_groups(&pos, &neg).unwrap();
    let expected = common::brute_tpr(ls.scores(), ls.labels(), 0.95);
    assert_eq!(tpr_at_in_rate(&ls, 0.95).unwrap(), expected);
}

#[test]
fn auroc_invariant_under_increasing_transform() {
    let mut rng = rng_from_seed(32);
    for _ in 0..100 {
        let (scores, labels) = common::random_labeled(&mut rng);
        let a = auroc(&LabeledScores::new(scores.clone(), labels.clone()).unwrap()).unwrap();
        let transformed: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() - 7.0).collect();
        let b = auroc(&LabeledScores::new(transformed, labels).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn flipping_labels_complements_auroc_without_ties() {
    let mut rng = rng_from_seed(33);
    for _ in 0..100 {
        let n = rng.random_range(4..50);
        let scores: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let mut labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        labels[0] = true;
        labels[1] = false;
        let flipped: Vec<bool> = labels.iter().map(|l| !l).collect();
        let a = auroc(&LabeledScores::new(scores.clone(), labels).unwrap()).unwrap();
        let b = auroc(&LabeledScores::new(scores, flipped).unwrap()).unwrap();
        assert!((a + b - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn tpr_is_nonincreasing_in_rate() {
    let mut rng = rng_from_seed(34);
    for _ in 0..100 {
        let (scores, labels) = common::random_labeled(&mut rng);
        let ls = LabeledScores::new(scores, labels).unwrap();
        let rates = [0.05, 0.2, 0.5, 0.8, 0.9, 0.95, 0.99];
        let values: Vec<f64> = rates
            .iter()
            .map(|&r| tpr_at_in_rate(&ls, r).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[0] >= w[1]), "{values:?}");
    }
}

#[test]
fn uninformative_scores_give_prevalence_aupr() {
    let mut rng = rng_from_seed(35);
    let n = 200_000;
    let labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.3)).collect();
    let scores: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let ls = LabeledScores::new(scores, labels).unwrap();
    let prevalence = ls.n_pos() as f64 / n as f64;
    assert!((aupr(&ls).unwrap() - prevalence).abs() < 0.01);
    assert!((auroc(&ls).unwrap() - 0.5).abs() < 0.01);
}
