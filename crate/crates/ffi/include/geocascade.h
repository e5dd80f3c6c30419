#ifndef GEOCASCADE_H
#define GEOCASCADE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GcSchedule {
  GC_SCHEDULE_SYNCHRONOUS = 0,
  GC_SCHEDULE_ASYNCHRONOUS = 1,
} GcSchedule;

typedef enum GcSeedKind {
  GC_SEED_KIND_SINGLE_NODE = 0,
  GC_SEED_KIND_CONNECTED_TRIPLE = 1,
} GcSeedKind;

/**
 * Result code of every fallible call.
 */
typedef enum GcStatus {
  GC_STATUS_OK = 0,
  GC_STATUS_NULL_POINTER = 1,
  GC_STATUS_INVALID_PARAMETER = 2,
  GC_STATUS_PARSE = 3,
  GC_STATUS_INFEASIBLE = 4,
  GC_STATUS_IO = 5,
  GC_STATUS_PANIC = 6,
} GcStatus;

typedef enum GcBoundary {
  GC_BOUNDARY_TORUS = 0,
  GC_BOUNDARY_PLANAR = 1,
} GcBoundary;

typedef enum GcLinkKind {
  GC_LINK_KIND_UNIFORM = 0,
  /**
   * `param` is the exponent `delta`.
   */
  GC_LINK_KIND_POWER_LAW = 1,
  /**
   * `param` is the cutoff distance `d_c`.
   */
  GC_LINK_KIND_CUTOFF = 2,
} GcLinkKind;

/**
 * Opaque network handle.
 */
typedef struct GcNetwork GcNetwork;

/**
 * Cascade settings. `max_steps == 0` selects the default budget.
 */
typedef struct GcCascadeParams {
  double phi;
  enum GcSchedule schedule;
  enum GcSeedKind seed;
  double cutoff_fraction;
  size_t max_steps;
} GcCascadeParams;

/**
 * Outcome and energy of one cascade. `time_to_cutoff` is -1 when the
 * cutoff fraction was never reached.
 */
typedef struct GcCascadeResult {
  double final_fraction;
  size_t active_count;
  size_t time;
  int64_t time_to_cutoff;
  bool is_global;
  bool stalled;
  double e_local;
  double e_long;
  double e_total;
  double e_predicted;
} GcCascadeResult;

/**
 * Replicate aggregates. Means over successful cascades are NaN when
 * there were none.
 */
typedef struct GcExperimentStats {
  size_t n_runs;
  size_t n_success;
  size_t n_infeasible;
  double p_global;
  double p_global_se;
  double mean_time;
  double mean_time_se;
  double mean_energy;
  double mean_energy_se;
  double mean_predicted_energy;
} GcExperimentStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call on this thread.
 */
const char *gc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gc_version(void);

/**
 * Cascade settings with the library defaults for threshold `phi`.
 */
struct GcCascadeParams gc_cascade_params_default(double phi);

/**
 * Samples `n` uniform points in the `side` square and connects pairs
 * within `range`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum GcStatus gc_network_new(size_t n,
                             double side,
                             double range,
                             enum GcBoundary boundary,
                             uint64_t seed,
                             struct GcNetwork **out);

/**
 * Returns a new handle holding a copy of `net` plus `round(p_r * N)`
 * long-range links. `param` is ignored for uniform links.
 *
 * # Safety
 * `net` must be a live handle and `out` valid for one handle write.
 */
enum GcStatus gc_network_add_links(const struct GcNetwork *net,
                                   enum GcLinkKind kind,
                                   double p_r,
                                   double param,
                                   uint64_t seed,
                                   struct GcNetwork **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `net` must be null or a handle not yet freed.
 */
void gc_network_free(struct GcNetwork *net);

/**
 * Node count, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t gc_network_node_count(const struct GcNetwork *net);

/**
 * Number of local (geometric) edges, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t gc_network_local_edge_count(const struct GcNetwork *net);

/**
 * Number of long-range links, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t gc_network_long_link_count(const struct GcNetwork *net);

/**
 * Mean local degree, NaN for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
double gc_network_mean_degree(const struct GcNetwork *net);

/**
 * Fraction of nodes in the largest connected component.
 *
 * # Safety
 * `net` must be a live handle and `out` valid for one write.
 */
enum GcStatus gc_network_giant_fraction(const struct GcNetwork *net, double *out);

/**
 * Runs one cascade with energy coefficient `energy_c`. When `active_out`
 * is non-null it receives `active_len` final node states (1 active, 0
 * idle); `active_len` must then equal the node count.
 *
 * # Safety
 * `net` must be a live handle, `params` and `out` valid pointers, and
 * `active_out` null or valid for `active_len` writes.
 */
enum GcStatus gc_run_cascade(const struct GcNetwork *net,
                             const struct GcCascadeParams *params,
                             double energy_c,
                             uint64_t seed,
                             struct GcCascadeResult *out,
                             uint8_t *active_out,
                             size_t active_len);

/**
 * Runs all replicates of the experiment described by a TOML document
 * (a `[sweep]` table is not accepted here).
 *
 * # Safety
 * `config_toml` must be a NUL-terminated string and `out` valid for one
 * write.
 */
enum GcStatus gc_run_experiment(const char *config_toml, struct GcExperimentStats *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEOCASCADE_H */
