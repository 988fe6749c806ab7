#![allow(dead_code)]

use overlap_bound::oracle::DiscreteDistribution;
use overlap_bound::Vector;
use rand::seq::index::sample;
use rand::Rng;

/// Random pair of discrete distributions whose supports are drawn from a
/// shared grid so they overlap partially. At most `max_support` points each.
pub fn random_pair<R: Rng>(
    rng: &mut R,
    max_support: usize,
    dim: usize,
) -> (DiscreteDistribution, DiscreteDistribution) {
    // Pool of distinct grid points with half-integer coordinates in [-2, 2].
    let pool_size = 2 * max_support;
    let mut pool: Vec<Vec<f64>> = Vec::with_capacity(pool_size);
    while pool.len() < pool_size {
        let p: Vec<f64> = (0..dim)
            .map(|_| rng.random_range(-4i32..=4) as f64 / 2.0)
            .collect();
        if !pool.contains(&p) {
            pool.push(p);
        }
        if pool.len() >= 9usize.pow(dim as u32) {
            break;
        }
    }
    let draw = |rng: &mut R| {
        let m = rng.random_range(1..=max_support.min(pool.len()));
        let idx = sample(rng, pool.len(), m);
        let weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let masses = weights.iter().map(|w| w / total).collect();
        let support = idx
            .iter()
            .map(|i| Vector::new(pool[i].clone()).unwrap())
            .collect();
        DiscreteDistribution::new(support, masses).unwrap()
    };
    let p = draw(rng);
    let q = draw(rng);
    (p, q)
}

/// AUROC by enumerating every positive/negative pair.
pub fn brute_auroc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (s, _) in scores.iter().zip(labels).filter(|(_, &l)| l) {
        for (t, _) in scores.iter().zip(labels).filter(|(_, &l)| !l) {
            pairs += 1.0;
            if s > t {
                wins += 1.0;
            } else if s == t {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

fn distinct_desc(scores: &[f64]) -> Vec<f64> {
    let mut t = scores.to_vec();
    t.sort_by(|a, b| b.partial_cmp(a).unwrap());
    t.dedup();
    t
}

/// Step-wise average precision by enumerating every distinct threshold.
pub fn brute_aupr(scores: &[f64], labels: &[bool]) -> f64 {
    let n_pos = labels.iter().filter(|&&l| l).count() as f64;
    let mut area = 0.0;
    let mut prev_recall = 0.0;
    for t in distinct_desc(scores) {
        let tp = scores
            .iter()
            .zip(labels)
            .filter(|(s, &l)| l && **s >= t)
            .count() as f64;
        let fp = scores
            .iter()
            .zip(labels)
            .filter(|(s, &l)| !l && **s >= t)
            .count() as f64;
        let recall = tp / n_pos;
        if tp > 0.0 {
            area += (recall - prev_recall) * tp / (tp + fp);
        }
        prev_recall = recall;
    }
    area
}

/// Rejected-negative rate at the largest threshold keeping >= `rate` positives.
pub fn brute_tpr(scores: &[f64], labels: &[bool], rate: f64) -> f64 {
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    let t = distinct_desc(scores)
        .into_iter()
        .find(|&t| {
            let kept = scores
                .iter()
                .zip(labels)
                .filter(|(s, &l)| l && **s >= t)
                .count();
            kept as f64 / n_pos as f64 >= rate
        })
        .expect("the smallest score keeps every positive");
    let rejected = scores
        .iter()
        .zip(labels)
        .filter(|(s, &l)| !l && **s < t)
        .count();
    rejected as f64 / n_neg as f64
}

/// Random labeled scores on a coarse grid so ties are common.
pub fn random_labeled<R: Rng>(rng: &mut R) -> (Vec<f64>, Vec<bool>) {
    loop {
        let n = rng.random_range(2..60);
        let levels = rng.random_range(2..12);
        let labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
            continue;
        }
        let scores = labels
            .iter()
            .map(|&l| {
                let shift = if l { 2 } else { 0 };
                (rng.random_range(0..levels) + shift) as f64 / levels as f64
            })
            .collect();
        return (scores, labels);
    }
}
