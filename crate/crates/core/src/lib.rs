//! Distribution-free upper bounds on the overlap index between two
//! distributions, computed from finite samples.
//!
//! The crate provides:
//!
//! * [`bound::compute_bound`], the sample-based bound with a per-predicate
//!   breakdown;
//! * [`classifier::FittedScorer`], a one-class confidence score built on the
//!   bound, with constant-size cached statistics;
//! * [`shift`], accuracy ceilings for models evaluated under domain shift;
//! * [`oracle`], exact overlap and total variation on discrete distributions,
//!   used as ground truth;
//! * [`metrics`], AUROC, AUPR, and TPR at a fixed in-class rate.

pub mod bound;
pub mod classifier;
pub mod cli;
pub mod condition;
pub mod error;
pub mod io;
pub mod metrics;
pub mod numeric;
pub mod oracle;
pub mod sample;
pub mod shift;
pub mod synth;
pub mod vector;

pub use bound::{compute_bound, delta_a_lower_bound, BoundReport, PredicateTerm};
pub use classifier::{iterative_score, FittedScorer, IterativeScorer, ScoreRecord, Verdict};
pub use condition::{ConditionFunction, RadiusFamily};
pub use error::{Error, Result};
pub use oracle::{DiscreteDistribution, SubsetSpec};
pub use sample::SampleSet;
pub use vector::{NormKind, Vector};
