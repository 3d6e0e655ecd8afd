#ifndef HYPERCOVER_H
#define HYPERCOVER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Status codes.
 */
typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_INVALID_ARGUMENT = 1,
  HC_STATUS_DOMAIN = 2,
  HC_STATUS_UNSUPPORTED = 3,
  HC_STATUS_NUMERIC = 4,
  HC_STATUS_OVERFLOW = 5,
  HC_STATUS_NULL_POINTER = 6,
  HC_STATUS_PANIC = 7,
} HcStatus;

/*
 Single-ball approximation variants.
 */
typedef enum HcLocalMethod {
  HC_LOCAL_METHOD_NORMAL = 0,
  HC_LOCAL_METHOD_PETROV = 1,
  HC_LOCAL_METHOD_ADJUSTED = 2,
} HcLocalMethod;

/*
 A generated or user-supplied design.
 */
typedef struct HcDesign HcDesign;

/*
 Point-placement scheme. `id` is 1..=7; `alpha` is used by scheme 4 only
 and ignored otherwise.
 */
typedef struct HcScheme {
  uint32_t id;
  double delta;
  double alpha;
} HcScheme;

/*
 Monte Carlo budget: test points per design, designs averaged for random
 schemes, and the seed.
 */
typedef struct HcBudget {
  uint64_t test_points;
  uint32_t replications;
  uint64_t seed;
} HcBudget;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Description of the last failure on this thread (empty after success).
 */
const char *hc_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *hc_version(void);

/*
 Volume of the unit ball in dimension `d` (0 for `d = 0`).
 */
double hc_unit_ball_volume(uint32_t d);

/*
 Radius of the ball of unit volume in dimension `d` (0 for `d = 0`).
 */
double hc_unit_volume_radius(uint32_t d);

/*
 Volume of the cap cut from the ball of radius `r` at distance `h` from
 the centre.

 # Safety
 `out` must be null or valid for writes.
 */
enum HcStatus hc_cap_volume(uint32_t d, double r, double h, double *out);

/*
 Approximate fraction of `[-1, 1]^d` covered by a ball of radius `r`
 whose centre has squared norm `z_norm_sq`. `typical` selects the
 correction for typical rather than diagonal centres (adjusted method).

 # Safety
 `out` must be null or valid for writes.
 */
enum HcStatus hc_local_cover(uint32_t d,
                             double z_norm_sq,
                             double r,
                             enum HcLocalMethod method,
                             bool typical,
                             double *out);

/*
 Generates a design of `n` points in dimension `d`.

 # Safety
 `scheme` must be null or point to a valid `HcScheme`; `out` must be null
 or valid for writes. The handle must be released with `hc_design_free`.
 */
enum HcStatus hc_design_generate(const struct HcScheme *scheme,
                                 uintptr_t d,
                                 uintptr_t n,
                                 uint64_t seed,
                                 struct HcDesign **out);

/*
 Wraps `n` user points (row-major, `n * d` values) as a design.

 # Safety
 `points` must be null or valid for `n * d` reads; `out` must be null or
 valid for writes.
 */
enum HcStatus hc_design_from_points(const double *points,
                                    uintptr_t d,
                                    uintptr_t n,
                                    struct HcDesign **out);

/*
 Releases a design handle. Null is ignored.

 # Safety
 `design` must be null or a handle from `hc_design_*` not yet freed.
 */
void hc_design_free(struct HcDesign *design);

/*
 Dimension of a design (0 for null).

 # Safety
 `design` must be null or a live handle.
 */
uintptr_t hc_design_dim(const struct HcDesign *design);

/*
 Number of points of a design (0 for null).

 # Safety
 `design` must be null or a live handle.
 */
uintptr_t hc_design_len(const struct HcDesign *design);

/*
 Copies the points (row-major) into `buf`, which holds `capacity` values;
 fails unless `capacity >= n * d`.

 # Safety
 `design` must be null or a live handle; `buf` must be null or valid for
 `capacity` writes.
 */
enum HcStatus hc_design_points(const struct HcDesign *design, double *buf, uintptr_t capacity);

/*
 Monte Carlo coverage of `[-1, 1]^d` by balls of radius `r` around a
 fixed design.

 # Safety
 `design` must be null or a live handle; `value` and `std_err` must be
 null or valid for writes.
 */
enum HcStatus hc_coverage_mc(const struct HcDesign *design,
                             double r,
                             uint64_t test_points,
                             uint64_t seed,
                             double *value,
                             double *std_err);

/*
 Coverage averaged over independent designs of a scheme.

 # Safety
 Pointers must be null or valid (`scheme`, `budget` for reads; `value`,
 `std_err` for writes).
 */
enum HcStatus hc_coverage_averaged(const struct HcScheme *scheme,
                                   uintptr_t d,
                                   uintptr_t n,
                                   double r,
                                   const struct HcBudget *budget_in,
                                   double *value,
                                   double *std_err);

/*
 Analytic coverage for `n` uniform centres in `[-delta, delta]^d`;
 `corrected` selects the Edgeworth-corrected version.

 # Safety
 `out` must be null or valid for writes.
 */
enum HcStatus hc_coverage_approx(uintptr_t d,
                                 uintptr_t n,
                                 double r,
                                 double delta,
                                 bool corrected,
                                 double *out);

/*
 Smallest radius reaching coverage `target`, by Monte Carlo with frozen
 designs and test points.

 # Safety
 Pointers must be null or valid.
 */
enum HcStatus hc_radius_for_target(const struct HcScheme *scheme,
                                   uintptr_t d,
                                   uintptr_t n,
                                   double target,
                                   const struct HcBudget *budget_in,
                                   double *out);

/*
 Exact expected coverage of `[-1, 1]^d` by `n` cubes of half-side `r`
 around uniform centres in `[-delta, delta]^d`.

 # Safety
 `out` must be null or valid for writes.
 */
enum HcStatus hc_cube_cover_closed_form(uintptr_t d,
                                        uintptr_t n,
                                        double r,
                                        double delta,
                                        double *out);

/*
 Monte Carlo quantization error `E min_j ||X - Z_j||^2` of a design.

 # Safety
 `design` must be null or a live handle; `value`, `std_err` must be null
 or valid for writes.
 */
enum HcStatus hc_quantization_mc(const struct HcDesign *design,
                                 uint64_t test_points,
                                 uint64_t seed,
                                 double *value,
                                 double *std_err);

/*
 Approximate quantization error for uniform centres in
 `[-delta, delta]^d`; `corrected` uses coefficient 8/5 instead of 2.

 # Safety
 `out` must be null or valid for writes.
 */
enum HcStatus hc_quantization_approx(uintptr_t d,
                                     uintptr_t n,
                                     double delta,
                                     bool corrected,
                                     double *out);

/*
 `n^{2/d} e_theta`.

 # Safety
 `out` must be null or valid for writes.
 */
enum HcStatus hc_normalized_error(uintptr_t d, uintptr_t n, double e_theta, double *out);

/*
 Minimizes the Monte Carlo normalized quantization error over `delta`
 (the scheme's own `delta` is ignored).

 # Safety
 Pointers must be null or valid.
 */
enum HcStatus hc_minimize_quantization(const struct HcScheme *scheme,
                                       uintptr_t d,
                                       uintptr_t n,
                                       const struct HcBudget *budget_in,
                                       double *delta_star,
                                       double *min_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERCOVER_H */
