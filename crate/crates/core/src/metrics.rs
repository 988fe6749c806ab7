//! Threshold-free ranking metrics for confidence scores.
//!
//! Positives are in-class samples, which should score high.
//!
//! Conventions: AUROC counts ties as one half. AUPR is step-wise average
//! precision with tied scores forming one threshold. TPR at an in-class rate
//! uses the largest threshold that keeps at least that fraction of positives,
//! with scores equal to the threshold counted as in-class.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScores {
    scores: Vec<f64>,
    labels: Vec<bool>,
}

impl LabeledScores {
    /// `labels[i]` is `true` for a positive (in-class) sample.
    pub fn new(scores: Vec<f64>, labels: Vec<bool>) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::input(format!(
                "{} scores but {} labels",
                scores.len(),
                labels.len()
            )));
        }
        if let Some(s) = scores.iter().find(|s| !s.is_finite()) {
            return Err(Error::input(format!("non-finite score {s}")));
        }
        Ok(Self { scores, labels })
    }

    pub fn from_groups(positives: &[f64], negatives: &[f64]) -> Result<Self> {
        let scores = positives.iter().chain(negatives).copied().collect();
        let labels = std::iter::repeat_n(true, positives.len())
            .chain(std::iter::repeat_n(false, negatives.len()))
            .collect();
        Self::new(scores, labels)
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn n_pos(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn n_neg(&self) -> usize {
        self.labels.len() - self.n_pos()
    }

    fn require_both(&self) -> Result<(usize, usize)> {
        let (p, n) = (self.n_pos(), self.n_neg());
        if p == 0 || n == 0 {
            return Err(Error::MetricUndefined(format!(
                "need both classes, got {p} positives and {n} negatives"
            )));
        }
        Ok((p, n))
    }

    /// Indices sorted by descending score.
    fn descending(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]));
        idx
    }

    /// Cumulative (tp, fp) after each group of tied scores, highest first.
    fn threshold_groups(&self) -> Vec<(usize, usize)> {
        let idx = self.descending();
        let mut out = Vec::new();
        let (mut tp, mut fp) = (0usize, 0usize);
        for (pos, &i) in idx.iter().enumerate() {
            if self.labels[i] {
                tp += 1;
            } else {
                fp += 1;
            }
            let last_of_group = idx
                .get(pos + 1)
                .is_none_or(|&next| self.scores[next] != self.scores[i]);
            if last_of_group {
                out.push((tp, fp));
            }
        }
        out
    }
}

/// Probability that a random positive outscores a random negative, from the
/// Mann-Whitney rank sum.
pub fn auroc(ls: &LabeledScores) -> Result<f64> {
    let (n_pos, n_neg) = ls.require_both()?;
    let mut idx: Vec<usize> = (0..ls.scores.len()).collect();
    idx.sort_by(|&a, &b| ls.scores[a].total_cmp(&ls.scores[b]));
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && ls.scores[idx[end]] == ls.scores[idx[start]] {
            end += 1;
        }
        // Ranks start..end (1-based start+1..=end) share their midpoint.
        let mid = (start + 1 + end) as f64 / 2.0;
        let pos_in_group = idx[start..end].iter().filter(|&&i| ls.labels[i]).count();
        rank_sum += mid * pos_in_group as f64;
        start = end;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Trapezoidal area under the ROC curve traced over descending thresholds.
pub fn auroc_trapezoid(ls: &LabeledScores) -> Result<f64> {
    let (n_pos, n_neg) = ls.require_both()?;
    let mut area2 = 0.0;
    let (mut prev_tp, mut prev_fp) = (0usize, 0usize);
    for (tp, fp) in ls.threshold_groups() {
        area2 += ((fp - prev_fp) * (tp + prev_tp)) as f64;
        prev_tp = tp;
        prev_fp = fp;
    }
    Ok(area2 / 2.0 / (n_pos as f64 * n_neg as f64))
}

/// Step-wise area under the precision-recall curve (average precision).
pub fn aupr(ls: &LabeledScores) -> Result<f64> {
    let n_pos = ls.n_pos();
    if n_pos == 0 {
        return Err(Error::MetricUndefined("no positive samples".into()));
    }
    let mut area = 0.0;
    let mut prev_tp = 0usize;
    for (tp, fp) in ls.threshold_groups() {
        if tp > prev_tp {
            let precision = tp as f64 / (tp + fp) as f64;
            area += (tp - prev_tp) as f64 / n_pos as f64 * precision;
        }
        prev_tp = tp;
    }
    Ok(area)
}

/// Fraction of negatives rejected at the largest threshold `T` that keeps at
/// least `in_rate` of the positives (`score >= T`).
pub fn tpr_at_in_rate(ls: &LabeledScores, in_rate: f64) -> Result<f64> {
    let (n_pos, n_neg) = ls.require_both()?;
    if !(in_rate > 0.0 && in_rate < 1.0) {
        return Err(Error::input(format!(
            "in-class rate must lie in (0, 1), got {in_rate}"
        )));
    }
    let mut pos: Vec<f64> = ls
        .scores
        .iter()
        .zip(&ls.labels)
        .filter(|(_, &l)| l)
        .map(|(s, _)| *s)
        .collect();
    pos.sort_by(|a, b| b.total_cmp(a));
    // Smallest count c with c / n_pos >= in_rate.
    let frac = |c: usize| c as f64 / n_pos as f64;
    let mut c = ((in_rate * n_pos as f64).ceil() as usize).clamp(1, n_pos);
    while c > 1 && frac(c - 1) >= in_rate {
        c -= 1;
    }
    while c < n_pos && frac(c) < in_rate {
        c += 1;
    }
    let threshold = pos[c - 1];
    let rejected = ls
        .scores
        .iter()
        .zip(&ls.labels)
        .filter(|(s, &l)| !l && s.partial_cmp(&&threshold) == Some(Ordering::Less))
        .count();
    Ok(rejected as f64 / n_neg as f64)
}

/// The three summary metrics, as emitted by the `eval` command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricReport {
    pub auroc: f64,
    pub aupr: f64,
    pub tpr95: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

pub fn evaluate(ls: &LabeledScores) -> Result<MetricReport> {
    Ok(MetricReport {
        auroc: auroc(ls)?,
        aupr: aupr(ls)?,
        tpr95: tpr_at_in_rate(ls, 0.95)?,
        n_pos: ls.n_pos(),
        n_neg: ls.n_neg(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(scores: &[f64], labels: &[bool]) -> LabeledScores {
        LabeledScores::new(scores.to_vec(), labels.to_vec()).unwrap()
    }

    const NNPP: [bool; 4] = [false, false, true, true];

    #[test]
    fn auroc_examples() {
        assert_eq!(auroc(&ls(&[0.1, 0.2, 0.8, 0.9], &NNPP)).unwrap(), 1.0);
        assert_eq!(auroc(&ls(&[0.9, 0.2, 0.8, 0.1], &NNPP)).unwrap(), 0.25);
        assert_eq!(auroc(&ls(&[0.3; 4], &NNPP)).unwrap(), 0.5);
        assert_eq!(
            auroc_trapezoid(&ls(&[0.9, 0.2, 0.8, 0.1], &NNPP)).unwrap(),
            0.25
        );
        assert_eq!(auroc_trapezoid(&ls(&[0.3; 4], &NNPP)).unwrap(), 0.5);
    }

    #[test]
    fn aupr_examples() {
        assert_eq!(aupr(&ls(&[0.1, 0.2, 0.8, 0.9], &NNPP)).unwrap(), 1.0);
        // Descending: 0.9(-) 0.8(+) 0.2(-) 0.1(+): AP = 0.5 * 1/2 + 0.5 * 2/4.
        assert_eq!(aupr(&ls(&[0.9, 0.2, 0.8, 0.1], &NNPP)).unwrap(), 0.5);
        let imbalanced = ls(
            &[0.9, 0.1, 0.2, 0.3, 0.0],
            &[true, false, false, false, false],
        );
        assert_eq!(aupr(&imbalanced).unwrap(), 1.0);
    }

    #[test]
    fn tpr_examples() {
        assert_eq!(
            tpr_at_in_rate(&ls(&[0.1, 0.2, 0.8, 0.9], &NNPP), 0.95).unwrap(),
            1.0
        );
        assert_eq!(
            tpr_at_in_rate(&ls(&[0.8, 0.9, 0.1, 0.2], &NNPP), 0.95).unwrap(),
            0.0
        );
        // 20 positives 1..=20: keeping 19 puts the threshold at 2.
        let pos: Vec<f64> = (1..=20).map(f64::from).collect();
        let set = LabeledScores::from_groups(&pos, &[0.5, 1.5, 2.0, 2.5]).unwrap();
        assert_eq!(tpr_at_in_rate(&set, 0.95).unwrap(), 0.5);
    }

    #[test]
    fn single_class_is_undefined() {
        let only_pos = ls(&[0.1, 0.2], &[true, true]);
        assert!(matches!(auroc(&only_pos), Err(Error::MetricUndefined(_))));
        assert!(matches!(
            tpr_at_in_rate(&only_pos, 0.95),
            Err(Error::MetricUndefined(_))
        ));
        assert!(aupr(&only_pos).is_ok());
        let only_neg = ls(&[0.1, 0.2], &[false, false]);
        assert!(matches!(aupr(&only_neg), Err(Error::MetricUndefined(_))));
        assert!(LabeledScores::new(vec![0.1], vec![]).is_err());
        assert!(tpr_at_in_rate(&ls(&[0.1, 0.2, 0.8, 0.9], &NNPP), 1.0).is_err());
    }
}
