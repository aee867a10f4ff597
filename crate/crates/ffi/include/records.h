#ifndef RECORDS_H
#define RECORDS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Record kinds.
 */
typedef enum rec_kind {
  REC_KIND_STRONG_UPPER = 0,
  REC_KIND_WEAK_UPPER = 1,
  REC_KIND_STRONG_LOWER = 2,
  REC_KIND_WEAK_LOWER = 3,
} rec_kind;

/**
 * Status codes of every `rec_` function.
 */
typedef enum rec_status {
  REC_STATUS_OK = 0,
  REC_STATUS_NULL_POINTER = 1,
  REC_STATUS_INVALID_ARGUMENT = 2,
  REC_STATUS_PARSE_ERROR = 3,
  REC_STATUS_DOMAIN_ERROR = 4,
  REC_STATUS_UNSUPPORTED = 5,
  REC_STATUS_PANIC = 6,
} rec_status;

/**
 * Opaque distribution handle.
 */
typedef struct rec_dist rec_dist;

/**
 * Opaque streaming extractor over real numbers.
 */
typedef struct rec_extractor rec_extractor;

/**
 * A record: its ordinal `n`, time `t` and value.
 */
typedef struct rec_event {
  uint64_t n;
  uint64_t t;
  double value;
} rec_event;

/**
 * Monte-Carlo estimate.
 */
typedef struct rec_mc_report {
  double estimate;
  double std_error;
  uint64_t trials_used;
  double truncation_mass;
  uint64_t seed;
} rec_mc_report;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; valid until the next call
 * that fails on the same thread. Never null.
 */
const char *rec_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rec_version(void);

/**
 * Parses a distribution from JSON or shorthand (`exp:1`, `unif:0,1`, ...).
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum rec_status rec_dist_new(const char *spec, struct rec_dist **out);

/**
 * Releases a distribution; null is ignored.
 *
 * # Safety
 * `d` must come from [`rec_dist_new`] and not be used afterwards.
 */
void rec_dist_free(struct rec_dist *d);

/**
 * Whether the law is discrete (1) or continuous (0).
 *
 * # Safety
 * `d` must be a live handle and `out` a valid pointer.
 */
enum rec_status rec_dist_is_discrete(const struct rec_dist *d, int32_t *out);

/**
 * `F(x)`.
 *
 * # Safety
 * `d` must be a live handle and `out` a valid pointer.
 */
enum rec_status rec_dist_cdf(const struct rec_dist *d, double x, double *out);

/**
 * Generalized inverse of `F` at `u` in (0, 1).
 *
 * # Safety
 * `d` must be a live handle and `out` a valid pointer.
 */
enum rec_status rec_dist_quantile(const struct rec_dist *d, double u, double *out);

/**
 * Hazard `f(x) / P(X > x)`.
 *
 * # Safety
 * `d` must be a live handle and `out` a valid pointer.
 */
enum rec_status rec_dist_hazard(const struct rec_dist *d, double x, double *out);

/**
 * Cumulative hazard `-ln(1 - F(x))`.
 *
 * # Safety
 * `d` must be a live handle and `out` a valid pointer.
 */
enum rec_status rec_dist_cum_hazard(const struct rec_dist *d, double x, double *out);

/**
 * Creates a streaming extractor over real numbers.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum rec_status rec_extractor_new(enum rec_kind kind, struct rec_extractor **out);

/**
 * Releases an extractor; null is ignored.
 *
 * # Safety
 * `e` must come from [`rec_extractor_new`] and not be used afterwards.
 */
void rec_extractor_free(struct rec_extractor *e);

/**
 * Feeds one observation. `*is_record` is set to 1 and `*event` filled when it
 * is a record, otherwise `*is_record` is 0. `event` may be null. A NaN is
 * rejected and leaves the extractor unchanged.
 *
 * # Safety
 * `e` must be a live handle, `is_record` valid and `event` null or valid.
 */
enum rec_status rec_extractor_feed(struct rec_extractor *e,
                                   double x,
                                   int32_t *is_record,
                                   struct rec_event *event);

/**
 * Observations consumed and records seen so far.
 *
 * # Safety
 * `e` must be a live handle; `clock` and `records` valid pointers.
 */
enum rec_status rec_extractor_counts(const struct rec_extractor *e,
                                     uint64_t *clock,
                                     uint64_t *records);

/**
 * Extracts all records of `xs[0..len]` into `events`, which has room for
 * `capacity` entries. `*count` receives the number of records, which may
 * exceed `capacity`; only the first `capacity` are written.
 *
 * # Safety
 * `xs` must hold `len` values, `events` `capacity` entries, `count` valid.
 */
enum rec_status rec_extract(const double *xs,
                            size_t len,
                            enum rec_kind kind,
                            struct rec_event *events,
                            size_t capacity,
                            size_t *count);

/**
 * `P(D2 = k2, ..., Dn = kn)` for gaps `gaps[0..len]`.
 *
 * # Safety
 * `gaps` must hold `len` values and `out` be valid.
 */
enum rec_status rec_interrecord_pmf(const uint64_t *gaps, size_t len, double *out);

/**
 * `P(U(2) = l2, ..., U(n) = ln)` for times `times[0..len]`.
 *
 * # Safety
 * `times` must hold `len` values and `out` be valid.
 */
enum rec_status rec_record_times_pmf(const uint64_t *times, size_t len, double *out);

/**
 * `P(U(n+1) = j | U(n) = k)`.
 *
 * # Safety
 * `out` must be valid.
 */
enum rec_status rec_record_time_transition_pmf(uint64_t k, uint64_t j, double *out);

/**
 * `int prod_j F(x_j)^(k_j - 1) dF` over the ordered simplex.
 *
 * # Safety
 * `exponents` must hold `len` values and `out` be valid.
 */
enum rec_status rec_gamma_integral(const uint64_t *exponents, size_t len, double *out);

/**
 * Density of the `n`-th record value of a continuous law at `x`.
 *
 * # Safety
 * `d` must be a live handle and `out` valid.
 */
enum rec_status rec_record_value_pdf(const struct rec_dist *d, size_t n, double x, double *out);

/**
 * Joint density of the first `len` record values of a continuous law.
 *
 * # Safety
 * `d` must be a live handle, `ys` hold `len` values and `out` be valid.
 */
enum rec_status rec_record_value_joint_pdf(const struct rec_dist *d,
                                           const double *ys,
                                           size_t len,
                                           double *out);

/**
 * `P(X(n) = y)` for a discrete law.
 *
 * # Safety
 * `d` must be a live handle and `out` valid.
 */
enum rec_status rec_discrete_record_pmf(const struct rec_dist *d, size_t n, double y, double *out);

/**
 * Joint pmf of the first `len` record values of a discrete law.
 *
 * # Safety
 * `d` must be a live handle, `ys` hold `len` values and `out` be valid.
 */
enum rec_status rec_discrete_record_joint_pmf(const struct rec_dist *d,
                                              const double *ys,
                                              size_t len,
                                              double *out);

/**
 * Probability that no record follows the first observation.
 *
 * # Safety
 * `d` must be a live handle and `out` valid.
 */
enum rec_status rec_no_further_record(const struct rec_dist *d, double *out);

/**
 * Monte-Carlo estimate of the probability of no further record.
 *
 * # Safety
 * `d` must be a live handle and `out` valid.
 */
enum rec_status rec_estimate_no_further_record(const struct rec_dist *d,
                                               uint64_t trials,
                                               uint64_t horizon,
                                               uint64_t seed,
                                               struct rec_mc_report *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RECORDS_H */
