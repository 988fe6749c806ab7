//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bound::compute_bound;
use crate::classifier::{FittedScorer, IterativeScorer, Verdict};
use crate::condition::{ConditionFunction, RadiusFamily};
use crate::error::{Error, Result};
use crate::io;
use crate::metrics::{self, LabeledScores};
use crate::oracle::{self, JointSupport, RadiusForm, SubsetSpec};
use crate::sample::SampleSet;
use crate::shift::{self, MixtureSpec, RateRule};
use crate::synth;
use crate::vector::NormKind;

#[derive(Debug, Parser)]
#[command(
    name = "overlap-bound",
    version,
    about = "Distribution-free overlap bounds, one-class scoring, and shift ceilings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Norm for radii, mean gaps, and domain size: l1, l2, linf.
    #[arg(long, default_value = "l2", value_parser = parse_norm)]
    pub norm: NormKind,
    /// Number of radius predicates r_j = (j/k) r_max.
    #[arg(long, default_value_t = RadiusFamily::DEFAULT_K, value_parser = parse_k)]
    pub k: usize,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct ScoreArgs {
    /// Model file written by `fit`.
    pub model: PathBuf,
    /// Query samples (CSV or OVLB binary).
    pub queries: PathBuf,
    /// Decision threshold; scores >= threshold are in-class.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Add the second-pass score computed in score space.
    #[arg(long, requires = "train")]
    pub iterative: bool,
    /// In-class samples the model was fitted on (needed by --iterative).
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Number of score-space predicates for --iterative; defaults to the model's k.
    #[arg(long, value_parser = parse_k)]
    pub k2: Option<usize>,
    /// Write the scores CSV here; the summary JSON then goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SampleFormat {
    Csv,
    Bin,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upper bound on the overlap index between two sample files.
    Bound {
        /// Positive-side samples (CSV or OVLB binary).
        pos: PathBuf,
        /// Negative-side samples.
        neg: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Fit a one-class scorer on in-class samples and write the model JSON.
    Fit {
        /// In-class samples (CSV or OVLB binary).
        samples: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Score query samples against a fitted model.
    Score(ScoreArgs),
    /// Score and classify query samples; requires --threshold.
    Classify(ScoreArgs),
    /// Accuracy ceilings over a sweep of purity ratios.
    Shift {
        /// Clean samples; also the reference distribution.
        clean: PathBuf,
        /// Poisoned samples mixed in at rate 1 - sigma.
        poisoned: PathBuf,
        /// Model accuracy on clean data.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Model accuracy on poisoned data.
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        /// Comma-separated purity ratios.
        #[arg(long, value_delimiter = ',', default_values_t = shift::default_sigmas())]
        sigma: Vec<f64>,
        /// Also report the accuracy of a rule with exactly these rates on each composed mixture.
        #[arg(long)]
        simulate: bool,
        #[command(flatten)]
        common: Common,
    },
    /// AUROC, AUPR, and TPR95 of labeled scores.
    Eval {
        /// CSV of `score,label`, or single-column scores when LABELS is given.
        scores: PathBuf,
        /// Single-column labels (1/0, in/out, ...), one per score.
        labels: Option<PathBuf>,
        /// In-class retention rate for the TPR metric.
        #[arg(long, default_value_t = 0.95)]
        in_rate: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact overlap quantities for two discrete distribution files.
    Oracle {
        /// JSON file with `dimension`, `points`, and `masses`.
        p: PathBuf,
        q: PathBuf,
        /// Radius of the region A = {x : ||x|| <= r}; defaults to half the domain radius.
        #[arg(long)]
        radius: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Generate Gaussian samples for demos and benchmarks.
    Synth {
        /// Number of samples.
        #[arg(long)]
        n: usize,
        /// Dimension of each sample.
        #[arg(long)]
        dim: usize,
        /// Offset of the center along the first axis.
        #[arg(long, default_value_t = 0.0)]
        offset: f64,
        #[arg(long, default_value_t = 1.0)]
        std_dev: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: SampleFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_norm(s: &str) -> std::result::Result<NormKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_k(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, contents: &[u8]) -> Result<()> {
    match out {
        Some(path) => io::write_file(path, contents),
        None => stdout.write_all(contents).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn emit_json(out: Option<&Path>, stdout: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, stdout, text.as_bytes())
}

fn read_pair(a: &Path, b: &Path, norm: NormKind) -> Result<(SampleSet, SampleSet)> {
    let sa = io::read_samples(a, norm)?;
    let sb = io::read_samples(b, norm)?;
    if sa.dim() != sb.dim() {
        return Err(Error::Contract(format!(
            "{} has dimension {} but {} has dimension {}",
            a.display(),
            sa.dim(),
            b.display(),
            sb.dim()
        )));
    }
    Ok((sa, sb))
}

/// Radius predicates scaled to the pooled maximum norm of both sets.
fn pooled_family(a: &SampleSet, b: &SampleSet, k: usize) -> Result<Vec<ConditionFunction>> {
    let r_b = a.max_norm().max(b.max_norm());
    Ok(RadiusFamily::new(k, r_b)?.indicators(a.norm_kind()))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ScoreSummary {
    n: usize,
    norm: NormKind,
    k: usize,
    mean_score: f64,
    min_score: f64,
    max_score: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_in_class: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_out_class: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k2: Option<usize>,
}

fn run_score(args: &ScoreArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let text = std::fs::read_to_string(&args.model).map_err(|source| Error::Io {
        path: args.model.clone(),
        source,
    })?;
    let scorer = FittedScorer::from_model_json(&text)?;
    let queries = io::read_samples(&args.queries, scorer.norm())?;
    if queries.dim() != scorer.dimension() {
        return Err(Error::Contract(format!(
            "model {} has dimension {} but {} has dimension {}",
            args.model.display(),
            scorer.dimension(),
            args.queries.display(),
            queries.dim()
        )));
    }
    if let Some(t) = args.threshold {
        if !t.is_finite() {
            return Err(Error::input(format!("threshold must be finite, got {t}")));
        }
    }
    let k2 = args.k2.unwrap_or(scorer.k());
    let iterative = match (&args.iterative, &args.train) {
        (true, Some(train)) => {
            let in_class = io::read_samples(train, scorer.norm())?;
            Some(IterativeScorer::new(scorer.clone(), &in_class, k2)?)
        }
        _ => None,
    };

    let scores = scorer.score_batch(&queries)?;
    let mut csv = String::from("row_index,score,clamped");
    if args.threshold.is_some() {
        csv.push_str(",verdict");
    }
    if iterative.is_some() {
        csv.push_str(",iterative");
    }
    csv.push('\n');
    let mut n_in = 0;
    for (i, (&s, v)) in scores.iter().zip(queries.vectors()).enumerate() {
        csv.push_str(&format!("{i},{s},{}", s.clamp(0.0, 1.0)));
        if let Some(t) = args.threshold {
            let verdict = Verdict::from_score(s, t);
            n_in += usize::from(verdict == Verdict::InClass);
            csv.push(',');
            csv.push_str(verdict.as_str());
        }
        if let Some(it) = &iterative {
            csv.push_str(&format!(",{}", it.score(&v)?.score));
        }
        csv.push('\n');
    }

    let summary = ScoreSummary {
        n: scores.len(),
        norm: scorer.norm(),
        k: scorer.k(),
        mean_score: crate::numeric::compensated_sum(scores.iter().copied()) / scores.len() as f64,
        min_score: scores.iter().copied().fold(f64::INFINITY, f64::min),
        max_score: scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        threshold: args.threshold,
        n_in_class: args.threshold.map(|_| n_in),
        n_out_class: args.threshold.map(|_| scores.len() - n_in),
        k2: iterative.as_ref().map(|_| k2),
    };
    match &args.out {
        Some(path) => {
            io::write_file(path, csv)?;
            emit_json(None, stdout, &summary)
        }
        None => {
            emit(None, stdout, csv.as_bytes())?;
            emit_json(None, stderr, &summary)
        }
    }
}

/// Runs one command, writing primary output to `stdout` (or `--out`).
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Bound { pos, neg, common } => {
            let (p, n) = read_pair(pos, neg, common.norm)?;
            let gs = pooled_family(&p, &n, common.k)?;
            let report = compute_bound(&p, &n, &gs)?;
            emit_json(common.out.as_deref(), stdout, &report)
        }
        Command::Fit { samples, common } => {
            let set = io::read_samples(samples, common.norm)?;
            let scorer = FittedScorer::fit(&set, common.k, common.norm)?;
            if scorer.is_degenerate() {
                writeln!(
                    stderr,
                    "warning: every in-class sample is at the origin; the model is degenerate"
                )
                .ok();
            }
            emit(
                common.out.as_deref(),
                stdout,
                scorer.to_model_json().as_bytes(),
            )
        }
        Command::Score(args) => run_score(args, stdout, stderr),
        Command::Classify(args) => {
            if args.threshold.is_none() {
                return Err(Error::input("classify requires --threshold"));
            }
            run_score(args, stdout, stderr)
        }
        Command::Shift {
            clean,
            poisoned,
            p,
            q,
            sigma,
            simulate,
            common,
        } => {
            let (c, d) = read_pair(clean, poisoned, common.norm)?;
            let gs = pooled_family(&c, &d, common.k)?;
            let raw = compute_bound(&c, &d, &gs)?.raw_bound;
            let points = shift::sweep_sigma(&c, &d, *p, *q, sigma, &gs)?;
            let mut doc = json!({
                "sigma": points.iter().map(|pt| pt.sigma).collect::<Vec<_>>(),
                "ceiling": points.iter().map(|pt| pt.ceiling).collect::<Vec<_>>(),
                "norm": common.norm,
                "k": common.k,
                "p": p,
                "q": q,
                "rawBound": raw,
            });
            if *simulate {
                let rule = RateRule {
                    clean_accuracy: *p,
                    poisoned_accuracy: *q,
                };
                let measured = points
                    .iter()
                    .map(|pt| {
                        let mix = MixtureSpec::new(c.clone(), d.clone(), pt.sigma)?;
                        shift::simulate_accuracy(&mix, mix.max_size(), &rule)
                    })
                    .collect::<Result<Vec<_>>>()?;
                doc["measured"] = json!(measured);
            }
            emit_json(common.out.as_deref(), stdout, &doc)
        }
        Command::Eval {
            scores,
            labels,
            in_rate,
            out,
        } => {
            let ls: LabeledScores = match labels {
                Some(l) => io::read_scores_and_labels(scores, l)?,
                None => io::read_labeled_scores(scores)?,
            };
            let report = metrics::MetricReport {
                auroc: metrics::auroc(&ls)?,
                aupr: metrics::aupr(&ls)?,
                tpr95: metrics::tpr_at_in_rate(&ls, *in_rate)?,
                n_pos: ls.n_pos(),
                n_neg: ls.n_neg(),
            };
            emit_json(out.as_deref(), stdout, &report)
        }
        Command::Oracle {
            p,
            q,
            radius,
            common,
        } => {
            let dp = io::read_distribution(p)?;
            let dq = io::read_distribution(q)?;
            if dp.dim() != dq.dim() {
                return Err(Error::Contract(format!(
                    "{} has dimension {} but {} has dimension {}",
                    p.display(),
                    dp.dim(),
                    q.display(),
                    dq.dim()
                )));
            }
            let joint = JointSupport::new(&dp, &dq)?;
            let r_b = joint
                .points
                .iter()
                .map(|x| x.norm(common.norm))
                .fold(0.0, f64::max);
            let r = radius.unwrap_or(r_b / 2.0);
            let region = SubsetSpec::Condition(ConditionFunction::radius(r, common.norm)?);
            let gs = RadiusFamily::new(common.k, r_b)?.indicators(common.norm);
            let or_null = |v: Result<f64>| match v {
                Ok(x) => Ok(Some(x)),
                Err(Error::DegenerateDomain(_)) => Ok(None),
                Err(e) => Err(e),
            };
            let doc = json!({
                "eta": oracle::exact_overlap(&dp, &dq)?,
                "delta": oracle::exact_tv(&dp, &dq)?,
                "deltaA": oracle::exact_delta_a(&dp, &dq, &region)?,
                "radius": r,
                "rB": r_b,
                "theoremRhsComplement": or_null(oracle::theorem_rhs(&dp, &dq, &region, RadiusForm::Complement, common.norm))?,
                "theoremRhsDomain": or_null(oracle::theorem_rhs(&dp, &dq, &region, RadiusForm::Domain, common.norm))?,
                "corollaryRhsExact": or_null(oracle::corollary_rhs_exact(&dp, &dq, &gs, common.norm))?,
                "norm": common.norm,
                "k": common.k,
            });
            emit_json(common.out.as_deref(), stdout, &doc)
        }
        Command::Synth {
            n,
            dim,
            offset,
            std_dev,
            seed,
            format,
            out,
        } => {
            if *n == 0 || *dim == 0 {
                return Err(Error::input("--n and --dim must be positive"));
            }
            let mut center = vec![0.0; *dim];
            center[0] = *offset;
            let mut rng = synth::rng_from_seed(*seed);
            let set = synth::gaussian_samples(&mut rng, *n, &center, *std_dev, NormKind::L2)?;
            let bytes = match format {
                SampleFormat::Csv => io::encode_csv(&set).into_bytes(),
                SampleFormat::Bin => io::encode_binary(&set),
            };
            emit(out.as_deref(), stdout, &bytes)
        }
    }
}
