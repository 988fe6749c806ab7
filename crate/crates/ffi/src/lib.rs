//! C ABI over the `overlap-bound` library.
//!
//! Every function returns an [`OvlStatus`] and writes results through out
//! pointers. On failure the message is available from
//! [`ovl_last_error_message`] on the same thread. Handles are opaque and must
//! be released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use overlap_bound::metrics::{auroc, LabeledScores};
use overlap_bound::shift::{backdoor_ceiling, MixtureSpec};
use overlap_bound::{
    compute_bound, Error, FittedScorer, NormKind, RadiusFamily, SampleSet, Vector,
};

/// Result code shared by every exported function. The numeric values of the
/// input, contract and metric codes match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OvlStatus {
    Ok = 0,
    InvalidInput = 2,
    Contract = 3,
    MetricUndefined = 4,
    NullPointer = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OvlNorm {
    L1 = 0,
    L2 = 1,
    Linf = 2,
}

impl From<OvlNorm> for NormKind {
    fn from(n: OvlNorm) -> Self {
        match n {
            OvlNorm::L1 => NormKind::L1,
            OvlNorm::L2 => NormKind::L2,
            OvlNorm::Linf => NormKind::LInf,
        }
    }
}

/// Opaque set of equal-dimension samples.
pub struct OvlSamples(SampleSet);

/// Opaque fitted one-class scorer.
pub struct OvlScorer(FittedScorer);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: OvlStatus,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.exit_code() {
            3 => OvlStatus::Contract,
            4 => OvlStatus::MetricUndefined,
            _ => OvlStatus::InvalidInput,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

fn null(what: &str) -> Failure {
    Failure {
        status: OvlStatus::NullPointer,
        message: format!("{what} is null"),
    }
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> OvlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            OvlStatus::Ok
        }
        Ok(Err(f)) => {
            set_last_error(f.message);
            f.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            OvlStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or null if the last call
/// succeeded. The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn ovl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a sample set from `n * dim` row-major values.
///
/// # Safety
/// `data` must point to `n * dim` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ovl_samples_new(
    data: *const f64,
    n: usize,
    dim: usize,
    norm: OvlNorm,
    out: *mut *mut OvlSamples,
) -> OvlStatus {
    guard(|| {
        let len = n
            .checked_mul(dim)
            .ok_or_else(|| Failure::from(Error::Input("n * dim overflows".into())))?;
        let values = slice(data, len, "data")?;
        let set = SampleSet::from_flat(values.to_vec(), dim, norm.into())?;
        write(out, Box::into_raw(Box::new(OvlSamples(set))), "out")
    })
}

/// Releases a sample set. Null is ignored.
///
/// # Safety
/// `samples` must come from [`ovl_samples_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ovl_samples_free(samples: *mut OvlSamples) {
    if !samples.is_null() {
        drop(Box::from_raw(samples));
    }
}

/// Number of rows in a sample set, or 0 for null.
///
/// # Safety
/// `samples` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ovl_samples_len(samples: *const OvlSamples) -> usize {
    samples.as_ref().map_or(0, |s| s.0.len())
}

/// Dimension of a sample set, or 0 for null.
///
/// # Safety
/// `samples` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ovl_samples_dim(samples: *const OvlSamples) -> usize {
    samples.as_ref().map_or(0, |s| s.0.dim())
}

/// Overlap bound between two sample sets over `k` radius predicates scaled to
/// the pooled maximum norm.
///
/// # Safety
/// Handles must be live; `raw` and `clamped` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ovl_compute_bound(
    pos: *const OvlSamples,
    neg: *const OvlSamples,
    k: usize,
    raw: *mut f64,
    clamped: *mut f64,
) -> OvlStatus {
    guard(|| {
        let pos = &as_ref(pos, "pos")?.0;
        let neg = &as_ref(neg, "neg")?.0;
        let r_b = pos.max_norm().max(neg.max_norm());
        let gs = RadiusFamily::new(k, r_b)?.indicators(pos.norm_kind());
        let report = compute_bound(pos, neg, &gs)?;
        write(raw, report.raw_bound, "raw")?;
        write(clamped, report.clamped_bound, "clamped")
    })
}

/// Fits a scorer on in-class samples with `k` radius predicates.
///
/// # Safety
/// `in_class` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ovl_scorer_fit(
    in_class: *const OvlSamples,
    k: usize,
    out: *mut *mut OvlScorer,
) -> OvlStatus {
    guard(|| {
        let set = &as_ref(in_class, "in_class")?.0;
        let scorer = FittedScorer::fit(set, k, set.norm_kind())?;
        write(out, Box::into_raw(Box::new(OvlScorer(scorer))), "out")
    })
}

/// Releases a scorer. Null is ignored.
///
/// # Safety
/// `scorer` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ovl_scorer_free(scorer: *mut OvlScorer) {
    if !scorer.is_null() {
        drop(Box::from_raw(scorer));
    }
}

/// Confidence score of one query of length `dim`.
///
/// # Safety
/// `x` must point to `dim` readable doubles and `score` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ovl_scorer_score(
    scorer: *const OvlScorer,
    x: *const f64,
    dim: usize,
    score: *mut f64,
) -> OvlStatus {
    guard(|| {
        let scorer = &as_ref(scorer, "scorer")?.0;
        let v = Vector::new(slice(x, dim, "x")?.to_vec())?;
        write(score, scorer.score(&v)?.score, "score")
    })
}

/// Scores every row of `queries` into `out`, which holds `out_len` doubles.
///
/// # Safety
/// Handles must be live and `out` must have room for `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ovl_scorer_score_batch(
    scorer: *const OvlScorer,
    queries: *const OvlSamples,
    out: *mut f64,
    out_len: usize,
) -> OvlStatus {
    guard(|| {
        let scorer = &as_ref(scorer, "scorer")?.0;
        let queries = &as_ref(queries, "queries")?.0;
        if out_len < queries.len() {
            return Err(Error::Input(format!(
                "output buffer holds {out_len} scores, need {}",
                queries.len()
            ))
            .into());
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let scores = scorer.score_batch(queries)?;
        std::slice::from_raw_parts_mut(out, scores.len()).copy_from_slice(&scores);
        Ok(())
    })
}

/// Serializes a scorer to its model JSON. Free the string with
/// [`ovl_string_free`].
///
/// # Safety
/// `scorer` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ovl_scorer_to_json(
    scorer: *const OvlScorer,
    out: *mut *mut c_char,
) -> OvlStatus {
    guard(|| {
        let json = as_ref(scorer, "scorer")?.0.to_model_json();
        let c = CString::new(json).map_err(|e| Failure::from(Error::Input(e.to_string())))?;
        write(out, c.into_raw(), "out")
    })
}

/// Loads a scorer from model JSON.
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ovl_scorer_from_json(
    json: *const c_char,
    out: *mut *mut OvlScorer,
) -> OvlStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure::from(Error::Input(format!("model is not UTF-8: {e}"))))?;
        let scorer = FittedScorer::from_model_json(text)?;
        write(out, Box::into_raw(Box::new(OvlScorer(scorer))), "out")
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ovl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// AUROC of `n` scores where a nonzero label marks an in-class sample.
///
/// # Safety
/// `scores` and `labels` must each point to `n` readable elements.
#[no_mangle]
pub unsafe extern "C" fn ovl_auroc(
    scores: *const f64,
    labels: *const u8,
    n: usize,
    out: *mut f64,
) -> OvlStatus {
    guard(|| {
        let scores = slice(scores, n, "scores")?.to_vec();
        let labels = slice(labels, n, "labels")?
            .iter()
            .map(|&l| l != 0)
            .collect();
        let value = auroc(&LabeledScores::new(scores, labels)?)?;
        write(out, value, "out")
    })
}

/// Accuracy ceiling on a clean/poisoned mixture with purity `sigma` for a
/// model with clean accuracy `p`, using `k` radius predicates.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ovl_backdoor_ceiling(
    clean: *const OvlSamples,
    poisoned: *const OvlSamples,
    sigma: f64,
    p: f64,
    k: usize,
    out: *mut f64,
) -> OvlStatus {
    guard(|| {
        let clean = &as_ref(clean, "clean")?.0;
        let poisoned = &as_ref(poisoned, "poisoned")?.0;
        let r_b = clean.max_norm().max(poisoned.max_norm());
        let gs = RadiusFamily::new(k, r_b)?.indicators(clean.norm_kind());
        let mix = MixtureSpec::new(clean.clone(), poisoned.clone(), sigma)?;
        write(out, backdoor_ceiling(&mix, p, &gs)?, "out")
    })
}
