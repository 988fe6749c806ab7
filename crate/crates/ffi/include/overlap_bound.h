#ifndef OVERLAP_BOUND_H
#define OVERLAP_BOUND_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code shared by every exported function. The numeric values of the
// input, contract and metric codes match the CLI exit codes.
typedef enum OvlStatus {
  OVL_STATUS_OK = 0,
  OVL_STATUS_INVALID_INPUT = 2,
  OVL_STATUS_CONTRACT = 3,
  OVL_STATUS_METRIC_UNDEFINED = 4,
  OVL_STATUS_NULL_POINTER = 5,
  OVL_STATUS_PANIC = 6,
} OvlStatus;

typedef enum OvlNorm {
  OVL_NORM_L1 = 0,
  OVL_NORM_L2 = 1,
  OVL_NORM_LINF = 2,
} OvlNorm;

// Opaque set of equal-dimension samples.
typedef struct OvlSamples OvlSamples;

// Opaque fitted one-class scorer.
typedef struct OvlScorer OvlScorer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if the last call
// succeeded. The pointer stays valid until the next call on this thread.
const char *ovl_last_error_message(void);

// Builds a sample set from `n * dim` row-major values.
//
// # Safety
// `data` must point to `n * dim` readable doubles and `out` must be writable.
enum OvlStatus ovl_samples_new(const double *data,
                               size_t n,
                               size_t dim,
                               enum OvlNorm norm,
                               struct OvlSamples **out);

// Releases a sample set. Null is ignored.
//
// # Safety
// `samples` must come from [`ovl_samples_new`] and not be used afterwards.
void ovl_samples_free(struct OvlSamples *samples);

// Number of rows in a sample set, or 0 for null.
//
// # Safety
// `samples` must be null or a live handle.
size_t ovl_samples_len(const struct OvlSamples *samples);

// Dimension of a sample set, or 0 for null.
//
// # Safety
// `samples` must be null or a live handle.
size_t ovl_samples_dim(const struct OvlSamples *samples);

// Overlap bound between two sample sets over `k` radius predicates scaled to
// the pooled maximum norm.
//
// # Safety
// Handles must be live; `raw` and `clamped` must be writable.
enum OvlStatus ovl_compute_bound(const struct OvlSamples *pos,
                                 const struct OvlSamples *neg,
                                 size_t k,
                                 double *raw,
                                 double *clamped);

// Fits a scorer on in-class samples with `k` radius predicates.
//
// # Safety
// `in_class` must be live and `out` writable.
enum OvlStatus ovl_scorer_fit(const struct OvlSamples *in_class, size_t k, struct OvlScorer **out);

// Releases a scorer. Null is ignored.
//
// # Safety
// `scorer` must come from this library and not be used afterwards.
void ovl_scorer_free(struct OvlScorer *scorer);

// Confidence score of one query of length `dim`.
//
// # Safety
// `x` must point to `dim` readable doubles and `score` must be writable.
enum OvlStatus ovl_scorer_score(const struct OvlScorer *scorer,
                                const double *x,
                                size_t dim,
                                double *score);

// Scores every row of `queries` into `out`, which holds `out_len` doubles.
//
// # Safety
// Handles must be live and `out` must have room for `out_len` doubles.
enum OvlStatus ovl_scorer_score_batch(const struct OvlScorer *scorer,
                                      const struct OvlSamples *queries,
                                      double *out,
                                      size_t out_len);

// Serializes a scorer to its model JSON. Free the string with
// [`ovl_string_free`].
//
// # Safety
// `scorer` must be live and `out` writable.
enum OvlStatus ovl_scorer_to_json(const struct OvlScorer *scorer, char **out);

// Loads a scorer from model JSON.
//
// # Safety
// `json` must be a NUL-terminated UTF-8 string and `out` writable.
enum OvlStatus ovl_scorer_from_json(const char *json, struct OvlScorer **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void ovl_string_free(char *s);

// AUROC of `n` scores where a nonzero label marks an in-class sample.
//
// # Safety
// `scores` and `labels` must each point to `n` readable elements.
enum OvlStatus ovl_auroc(const double *scores, const uint8_t *labels, size_t n, double *out);

// Accuracy ceiling on a clean/poisoned mixture with purity `sigma` for a
// model with clean accuracy `p`, using `k` radius predicates.
//
// # Safety
// Handles must be live and `out` writable.
enum OvlStatus ovl_backdoor_ceiling(const struct OvlSamples *clean,
                                    const struct OvlSamples *poisoned,
                                    double sigma,
                                    double p,
                                    size_t k,
                                    double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OVERLAP_BOUND_H */
