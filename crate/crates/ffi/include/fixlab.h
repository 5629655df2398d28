/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef FIXLAB_H
#define FIXLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  FX_CERT_STATUS_CERTIFIED_ON_SAMPLES = 0,
  FX_CERT_STATUS_CERTIFIED_EXHAUSTIVE = 1,
  FX_CERT_STATUS_REFUTED = 2,
} FxCertStatus;

typedef enum {
  FX_RATE_KIND_GEOMETRIC = 0,
  FX_RATE_KIND_SUBLINEAR = 1,
  FX_RATE_KIND_CONVERGED_EXACT = 2,
  FX_RATE_KIND_INCONCLUSIVE = 3,
} FxRateKind;

typedef enum {
  FX_STATUS_OK = 0,
  FX_STATUS_NULL_POINTER = 1,
  FX_STATUS_INVALID_UTF8 = 2,
  FX_STATUS_PARSE = 3,
  FX_STATUS_EVAL = 4,
  FX_STATUS_DOMAIN_ESCAPE = 5,
  FX_STATUS_INVALID_PARAMETER = 6,
  FX_STATUS_UNKNOWN_BUILTIN = 7,
  FX_STATUS_IO = 8,
  FX_STATUS_TRACE_TOO_SHORT = 9,
  FX_STATUS_PANIC = 10,
} FxStatus;

typedef enum {
  FX_STOP_REASON_STEP_CONVERGED = 0,
  FX_STOP_REASON_MAX_ITERS = 1,
  FX_STOP_REASON_ESCAPED = 2,
  FX_STOP_REASON_EXACT_FIXED_POINT = 3,
} FxStopReason;

typedef struct FxCertificate FxCertificate;

/*
 A self-map with its domain.
 */
typedef struct FxMap FxMap;

/*
 A comparison function.
 */
typedef struct FxPhi FxPhi;

/*
 A b-metric space: domain, distance and relaxation constant.
 */
typedef struct FxSpace FxSpace;

typedef struct FxTrace FxTrace;

typedef struct {
  size_t grid_points;
  size_t random_pairs;
  uint64_t seed;
} FxSampler;

typedef struct {
  double abs;
  double rel;
} FxTolerance;

typedef struct {
  double x;
  double y;
  double lhs;
  double rhs;
  double margin;
} FxViolation;

/*
 Rate classification. `value` is the ratio for `Geometric`, the settled
 `n * residual` product for `Sublinear`, and 0 otherwise.
 */
typedef struct {
  FxRateKind kind;
  double value;
} FxRate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread; empty after a success.
 Valid until the next `fx_*` call on the same thread.
 */
const char *fx_last_error(void);

const char *fx_version(void);

/*
 2001 grid points per axis, 100000 random pairs, seed 0.
 */
FxSampler fx_sampler_standard(void);

/*
 `abs = 1e-12`, `rel = 1e-9`.
 */
FxTolerance fx_tolerance_default(void);

/*
 Space on `[lo, hi]`. `metric` is `absdiff`, `powdiff(p)` or an
 expression in `x` and `y`.
 */
FxStatus fx_space_new_interval(double lo, double hi, const char *metric, double s, FxSpace **out);

/*
 Space on the finite set `points[0..len]`.
 */
FxStatus fx_space_new_points(const double *points,
                             size_t len,
                             const char *metric,
                             double s,
                             FxSpace **out);

void fx_space_free(FxSpace *space);

FxStatus fx_space_dist(const FxSpace *space, double x, double y, double *out);

/*
 Map from a builtin name or an expression in `x`. The map's domain is the
 space's domain; `space` may be null for builtins, which carry their own.
 */
FxStatus fx_map_new(const char *spec, const FxSpace *space, FxMap **out);

/*
 Map backed by a C callback on `[lo, hi]`. `user` is passed through
 unchanged and must stay valid for the life of the map.
 */
FxStatus fx_map_from_callback(int32_t (*callback)(void *user, double x, double *out),
                              void *user,
                              double lo,
                              double hi,
                              const char *label,
                              FxMap **out);

FxStatus fx_map_eval(const FxMap *map, double x, double *out);

void fx_map_free(FxMap *map);

/*
 Comparison function from `linear(c)`, `ex32phi`, or an expression in `x`.
 */
FxStatus fx_phi_new(const char *spec, FxPhi **out);

/*
 `r -> (a + b) r`, for `a, b` in `(0, 1)` with `a + b < 1`.
 */
FxStatus fx_phi_convex(double a, double b, FxPhi **out);

FxStatus fx_phi_eval(const FxPhi *phi, double r, double *out);

void fx_phi_free(FxPhi *phi);

FxStatus fx_certify_m_step(const FxSpace *space,
                           const FxMap *map,
                           const FxPhi *phi,
                           size_t m,
                           FxSampler sampling,
                           FxTolerance tol,
                           FxCertificate **out);

FxStatus fx_certify_convex(const FxSpace *space,
                           const FxMap *map,
                           double a,
                           double b,
                           FxSampler sampling,
                           FxTolerance tol,
                           FxCertificate **out);

FxStatus fx_certificate_status(const FxCertificate *cert, FxCertStatus *out);

/*
 Returns 0 for a null certificate.
 */
uint64_t fx_certificate_pairs_tested(const FxCertificate *cert);

/*
 Returns 0 for a null certificate.
 */
uint64_t fx_certificate_violations_found(const FxCertificate *cert);

/*
 Number of retained worst violations (at most 32).
 */
size_t fx_certificate_worst_len(const FxCertificate *cert);

/*
 The `index`-th worst violation, largest margin first.
 */
FxStatus fx_certificate_worst(const FxCertificate *cert, size_t index, FxViolation *out);

void fx_certificate_free(FxCertificate *cert);

/*
 Picard iteration from `x0`; `m` is the window for the recorded maxima.
 */
FxStatus fx_picard(const FxSpace *space,
                   const FxMap *map,
                   double x0,
                   double step_tol,
                   size_t max_iters,
                   double escape_bound,
                   size_t m,
                   FxTrace **out);

/*
 Number of iterates, including `x0`. Returns 0 for a null trace.
 */
size_t fx_trace_len(const FxTrace *trace);

FxStatus fx_trace_iterate(const FxTrace *trace, size_t index, double *out);

/*
 The final iterate. Returns NaN for a null trace.
 */
double fx_trace_estimate(const FxTrace *trace);

FxStatus fx_trace_stop_reason(const FxTrace *trace, FxStopReason *out);

/*
 Writes the trace as CSV (`n,x,step,residual,window_max`).
 */
FxStatus fx_trace_write_csv(const FxTrace *trace, const char *path);

void fx_trace_free(FxTrace *trace);

/*
 Classifies the tail of `trace`. The limit used is `alpha_hat` when
 `use_alpha_hat` is true, else the final iterate.
 */
FxStatus fx_estimate_rate(const FxSpace *space,
                          const FxTrace *trace,
                          double alpha_hat,
                          bool use_alpha_hat,
                          FxRate *out);

/*
 Checks the b-metric axioms on the sampler's points; `*passed` receives
 the verdict.
 */
FxStatus fx_verify_metric(const FxSpace *space, FxSampler sampling, FxTolerance tol, bool *passed);

/*
 Largest sampled `d(x, y) / (d(x, z) + d(z, y))`, at least 1. The
 space's own `s` is ignored.
 */
FxStatus fx_min_b_constant(const FxSpace *space, FxSampler sampling, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FIXLAB_H */
