//! One-class confidence scoring.
//!
//! The score of a query `x` is ComputeBound of the singleton `{x}` against the
//! in-class samples, using the radius family `r_j = (j / k) r_fit`. Everything
//! the bound needs from the in-class side is cached at fit time: the mean, the
//! largest norm, and for every radius the acceptance rate and the largest
//! in-ball norm. A query then costs one norm, one distance, and `k` predicate
//! terms, and the model size does not depend on the number of samples.

use std::borrow::Cow;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bound::compute_bound;
use crate::condition::RadiusFamily;
use crate::error::{Error, Result};
use crate::sample::SampleSet;
use crate::vector::{check_dim, NormKind, Vector};

/// Current model file version.
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    InClass,
    OutClass,
}

impl Verdict {
    /// `in-class` iff `score >= threshold`.
    pub fn from_score(score: f64, threshold: f64) -> Self {
        if score >= threshold {
            Verdict::InClass
        } else {
            Verdict::OutClass
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::InClass => "in-class",
            Verdict::OutClass => "out-class",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScoreRecord {
    pub score: f64,
    pub clamped_score: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

impl ScoreRecord {
    fn new(score: f64, threshold: Option<f64>) -> Self {
        Self {
            score,
            clamped_score: score.clamp(0.0, 1.0),
            verdict: threshold.map(|t| Verdict::from_score(score, t)),
        }
    }
}

/// Cached in-class statistics for a fixed list of radii.
#[derive(Debug, Clone, PartialEq)]
struct BallStats {
    norm: NormKind,
    mean: Vec<f64>,
    r_fit: f64,
    radii: Vec<f64>,
    g_means: Vec<f64>,
    g_max_norms: Vec<f64>,
}

impl BallStats {
    /// One pass over the samples; `radii` must be nondecreasing.
    fn fit(set: &SampleSet, radii: Vec<f64>) -> Self {
        let k = radii.len();
        let mut counts = vec![0usize; k];
        let mut maxima = vec![0.0f64; k];
        for &n in set.norms() {
            // First radius whose ball contains the sample; all later ones do too.
            let j = radii.partition_point(|&r| r < n);
            if j < k {
                counts[j] += 1;
                maxima[j] = maxima[j].max(n);
            }
        }
        let total = set.len() as f64;
        let mut running = 0usize;
        let mut running_max = 0.0f64;
        let mut g_means = Vec::with_capacity(k);
        let mut g_max_norms = Vec::with_capacity(k);
        for (c, m) in counts.iter().zip(&maxima) {
            running += c;
            running_max = running_max.max(*m);
            g_means.push(running as f64 / total);
            g_max_norms.push(running_max);
        }
        Self {
            norm: set.norm_kind(),
            mean: set.mean().to_vec(),
            r_fit: set.max_norm(),
            radii,
            g_means,
            g_max_norms,
        }
    }

    #[inline]
    fn raw_score(&self, x: &[f64]) -> f64 {
        let nx = self.norm.of(x);
        let r_b = self.r_fit.max(nx);
        if r_b == 0.0 {
            return 1.0;
        }
        let gap = self.norm.distance(x, &self.mean);
        let mut best = f64::NEG_INFINITY;
        for ((&r, &rate), &in_max) in self.radii.iter().zip(&self.g_means).zip(&self.g_max_norms) {
            let inside = nx <= r;
            let (query_rate, r_a) = if inside {
                (1.0, in_max.max(nx))
            } else {
                (0.0, in_max)
            };
            let s = (1.0 - r_a / r_b) * (query_rate - rate).abs();
            if s > best {
                best = s;
            }
        }
        1.0 - gap / (2.0 * r_b) - 0.5 * best
    }
}

/// A fitted one-class scorer.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedScorer {
    k: usize,
    stats: BallStats,
}

impl FittedScorer {
    /// Fits on `in_class` measured under `norm`, with radii `(j / k) r_fit`.
    pub fn fit(in_class: &SampleSet, k: usize, norm: NormKind) -> Result<Self> {
        let set = if in_class.norm_kind() == norm {
            Cow::Borrowed(in_class)
        } else {
            Cow::Owned(in_class.with_norm(norm))
        };
        let family = RadiusFamily::new(k, set.max_norm())?;
        Ok(Self {
            k,
            stats: BallStats::fit(&set, family.radii().to_vec()),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn norm(&self) -> NormKind {
        self.stats.norm
    }

    pub fn dimension(&self) -> usize {
        self.stats.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.stats.mean
    }

    pub fn r_fit(&self) -> f64 {
        self.stats.r_fit
    }

    pub fn radii(&self) -> &[f64] {
        &self.stats.radii
    }

    pub fn g_means(&self) -> &[f64] {
        &self.stats.g_means
    }

    pub fn g_max_norms(&self) -> &[f64] {
        &self.stats.g_max_norms
    }

    /// All in-class samples were at the origin.
    pub fn is_degenerate(&self) -> bool {
        self.stats.r_fit == 0.0
    }

    /// The radius family as condition functions.
    pub fn indicators(&self) -> Vec<crate::condition::ConditionFunction> {
        RadiusFamily::new(self.k, self.stats.r_fit)
            .expect("validated at fit time")
            .indicators(self.stats.norm)
    }

    /// Unclamped score of raw coordinates. Dimensions are not checked.
    #[inline]
    pub fn raw_score(&self, x: &[f64]) -> f64 {
        self.stats.raw_score(x)
    }

    pub fn score(&self, x: &Vector) -> Result<ScoreRecord> {
        check_dim(self.dimension(), x.dim())?;
        Ok(ScoreRecord::new(self.raw_score(x.coords()), None))
    }

    /// Scores `x` and attaches a verdict against `threshold`.
    pub fn score_with_threshold(&self, x: &Vector, threshold: f64) -> Result<ScoreRecord> {
        check_threshold(threshold)?;
        check_dim(self.dimension(), x.dim())?;
        Ok(ScoreRecord::new(
            self.raw_score(x.coords()),
            Some(threshold),
        ))
    }

    pub fn classify(&self, x: &Vector, threshold: f64) -> Result<Verdict> {
        Ok(self
            .score_with_threshold(x, threshold)?
            .verdict
            .expect("threshold supplied"))
    }

    /// Raw scores of every row, in order.
    pub fn score_batch(&self, queries: &SampleSet) -> Result<Vec<f64>> {
        check_dim(self.dimension(), queries.dim())?;
        Ok(queries.rows().map(|r| self.raw_score(r)).collect())
    }

    /// Model file text. Every number is written at a fixed width, so the
    /// file size depends only on the dimension and `k`.
    pub fn to_model_json(&self) -> String {
        let mut out = String::new();
        let s = &self.stats;
        out.push_str("{\n");
        let _ = writeln!(out, "  \"version\": {MODEL_VERSION},");
        let _ = writeln!(out, "  \"norm\": {:>6},", format!("\"{}\"", s.norm));
        let _ = writeln!(out, "  \"k\": {},", self.k);
        let _ = writeln!(out, "  \"dimension\": {},", self.dimension());
        let _ = writeln!(out, "  \"mean\": {},", fixed_width_array(&s.mean));
        let _ = writeln!(out, "  \"rFit\": {},", fixed_width(s.r_fit));
        let _ = writeln!(out, "  \"gMeans\": {},", fixed_width_array(&s.g_means));
        let _ = writeln!(
            out,
            "  \"gMaxNorms\": {},",
            fixed_width_array(&s.g_max_norms)
        );
        let _ = writeln!(out, "  \"degenerate\": {:>5}", self.is_degenerate());
        out.push_str("}\n");
        out
    }

    pub fn from_model_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::ModelFormat {
            version: MODEL_VERSION,
            message: e.to_string(),
        })?;
        file.into_scorer()
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::input(format!("threshold must be finite, got {t}")))
    }
}

/// 17 significant digits in a 24-character JSON number, padded with a leading
/// space for nonnegative values.
pub(crate) fn fixed_width(v: f64) -> String {
    let e = format!("{:.16e}", v.abs());
    let (mantissa, exp) = e.split_once('e').expect("LowerExp always has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if v.is_sign_negative() && v != 0.0 {
        '-'
    } else {
        ' '
    };
    let exp_sign = if exp < 0 { '-' } else { '+' };
    format!("{sign}{mantissa}e{exp_sign}{:03}", exp.abs())
}

fn fixed_width_array(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|&v| fixed_width(v)).collect();
    format!("[{}]", items.join(","))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct ModelFile {
    version: Option<u32>,
    norm: Option<NormKind>,
    k: Option<usize>,
    dimension: Option<usize>,
    mean: Option<Vec<f64>>,
    r_fit: Option<f64>,
    g_means: Option<Vec<f64>>,
    g_max_norms: Option<Vec<f64>>,
    degenerate: Option<bool>,
}

fn required<T>(field: Option<T>, name: &str) -> Result<T> {
    field.ok_or_else(|| Error::ModelFormat {
        version: MODEL_VERSION,
        message: format!("missing field `{name}`"),
    })
}

impl ModelFile {
    fn into_scorer(self) -> Result<FittedScorer> {
        let version = required(self.version, "version")?;
        let bad = |message: String| Error::ModelFormat {
            version: MODEL_VERSION,
            message,
        };
        if version != MODEL_VERSION {
            return Err(bad(format!("unsupported model version {version}")));
        }
        let norm = required(self.norm, "norm")?;
        let k = required(self.k, "k")?;
        let dimension = required(self.dimension, "dimension")?;
        let mean = required(self.mean, "mean")?;
        let r_fit = required(self.r_fit, "rFit")?;
        let g_means = required(self.g_means, "gMeans")?;
        let g_max_norms = required(self.g_max_norms, "gMaxNorms")?;
        let degenerate = required(self.degenerate, "degenerate")?;

        if dimension == 0 || mean.len() != dimension {
            return Err(bad(format!(
                "mean has {} entries for dimension {dimension}",
                mean.len()
            )));
        }
        if g_means.len() != k || g_max_norms.len() != k {
            return Err(bad(format!(
                "expected {k} acceptance rates and in-ball norms, got {} and {}",
                g_means.len(),
                g_max_norms.len()
            )));
        }
        let family = RadiusFamily::new(k, r_fit).map_err(|e| bad(e.to_string()))?;
        if degenerate != (r_fit == 0.0) {
            return Err(bad("`degenerate` disagrees with `rFit`".into()));
        }
        let all_finite = mean
            .iter()
            .chain(&g_means)
            .chain(&g_max_norms)
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(bad("non-finite statistic".into()));
        }
        Ok(FittedScorer {
            k,
            stats: BallStats {
                norm,
                mean,
                r_fit,
                radii: family.radii().to_vec(),
                g_means,
                g_max_norms,
            },
        })
    }
}

/// Second-pass scoring in the space of clamped first-pass scores, with
/// predicates `1{ s <= j / k2 }`.
///
/// Caches the in-class score statistics so each query costs one first-pass
/// score plus `k2` terms.
#[derive(Debug, Clone)]
pub struct IterativeScorer {
    first: FittedScorer,
    second: BallStats,
}

impl IterativeScorer {
    pub fn new(first: FittedScorer, in_class: &SampleSet, k2: usize) -> Result<Self> {
        let scores = first_pass_scores(&first, in_class)?;
        let family = RadiusFamily::new(k2, 1.0)?;
        let second = BallStats::fit(&scores, family.radii().to_vec());
        Ok(Self { first, second })
    }

    pub fn first_pass(&self) -> &FittedScorer {
        &self.first
    }

    pub fn score(&self, x: &Vector) -> Result<ScoreRecord> {
        check_dim(self.first.dimension(), x.dim())?;
        let s = self.first.raw_score(x.coords()).clamp(0.0, 1.0);
        Ok(ScoreRecord::new(self.second.raw_score(&[s]), None))
    }
}

fn first_pass_scores(first: &FittedScorer, in_class: &SampleSet) -> Result<SampleSet> {
    check_dim(first.dimension(), in_class.dim())?;
    let scores: Vec<f64> = in_class
        .rows()
        .map(|r| first.raw_score(r).clamp(0.0, 1.0))
        .collect();
    SampleSet::from_scalars(&scores, NormKind::L1)
}

/// Iterative score computed directly with ComputeBound on the score sets.
pub fn iterative_score(
    scorer: &FittedScorer,
    in_class: &SampleSet,
    x: &Vector,
    k2: usize,
) -> Result<ScoreRecord> {
    check_dim(scorer.dimension(), x.dim())?;
    let in_scores = first_pass_scores(scorer, in_class)?;
    let query = SampleSet::from_scalars(
        &[scorer.raw_score(x.coords()).clamp(0.0, 1.0)],
        NormKind::L1,
    )?;
    let gs = RadiusFamily::new(k2, 1.0)?.indicators(NormKind::L1);
    let report = compute_bound(&query, &in_scores, &gs)?;
    Ok(ScoreRecord::new(report.raw_bound, None))
}
