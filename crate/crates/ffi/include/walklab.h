#ifndef WALKLAB_H
#define WALKLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; regenerate rather than edit. */

#include <stddef.h>
#include <stdint.h>

// Status codes returned by every fallible function.
typedef enum WlStatus {
  WL_STATUS_OK = 0,
  WL_STATUS_NULL_POINTER = 1,
  WL_STATUS_INVALID_UTF8 = 2,
  // Malformed spec, config or argument.
  WL_STATUS_CONFIG = 3,
  // Requested object exceeds a size limit.
  WL_STATUS_TOO_LARGE = 4,
  // Structural precondition failed (biased labeling, not pseudo-Cayley, etc.).
  WL_STATUS_PRECONDITION = 5,
  WL_STATUS_NUMERICAL = 6,
  WL_STATUS_IO = 7,
  // A Rust panic was caught at the boundary.
  WL_STATUS_PANIC = 8,
} WlStatus;

// A labeled expander graph.
typedef struct WlGraph WlGraph;

// A finite group.
typedef struct WlGroup WlGroup;

// A verification report.
typedef struct WlReport WlReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null. The pointer
// stays valid until the next walklab call on the same thread.
const char *wl_last_error_message(void);

// Library version as a static nul-terminated string.
const char *wl_version(void);

// Releases a string returned by this library. Null is ignored.
void wl_string_free(char *s);

// Builds a group from a spec such as `symmetric(3)`.
enum WlStatus wl_group_new(const char *spec, struct WlGroup **out);

enum WlStatus wl_group_order(const struct WlGroup *g, uintptr_t *out);

// Releases a group. Null is ignored.
void wl_group_free(struct WlGroup *g);

// Builds a graph from a spec such as `complete_power(cyclic(2),2)` or
// `cayley(symmetric(3);213,231,312)^2`.
enum WlStatus wl_graph_new(const char *spec, struct WlGraph **out);

enum WlStatus wl_graph_vertex_count(const struct WlGraph *x, uintptr_t *out);

// Largest non-trivial eigenvalue magnitude.
enum WlStatus wl_graph_lambda(const struct WlGraph *x, double *out);

// Releases a graph. Null is ignored.
void wl_graph_free(struct WlGraph *x);

// Runs the bias computation for a JSON experiment config and returns the
// results document as JSON in `*out_json`.
enum WlStatus wl_bias_json(const char *config_json, char **out_json);

// Runs the verification suite. `claims` is a comma-separated list such as
// `"T1,T8"`, or null for every claim. `lambda_scale` multiplies every λ used
// in bounds (1.0 for a faithful run).
enum WlStatus wl_verify(const char *claims,
                        uint64_t seed,
                        double lambda_scale,
                        struct WlReport **out);

// Check counts of a report; any output pointer may be null.
enum WlStatus wl_report_counts(const struct WlReport *r,
                               uintptr_t *total,
                               uintptr_t *passed,
                               uintptr_t *failed,
                               uintptr_t *skipped);

// Writes 1 to `*out` when no non-skipped check failed, else 0.
enum WlStatus wl_report_all_pass(const struct WlReport *r, int32_t *out);

// The report as JSON, in the same form as `report.json`.
enum WlStatus wl_report_json(const struct WlReport *r, char **out_json);

// Releases a report. Null is ignored.
void wl_report_free(struct WlReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WALKLAB_H */
