#ifndef PREDCUT_H
#define PREDCUT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum PcStatus {
  PC_STATUS_OK = 0,
  PC_STATUS_NULL_POINTER = 1,
  PC_STATUS_INVALID_ARGUMENT = 2,
  PC_STATUS_INVALID_GRAPH = 3,
  PC_STATUS_DISCONNECTED = 4,
  PC_STATUS_TOO_LARGE = 5,
  PC_STATUS_IO = 6,
  PC_STATUS_PARSE = 7,
  PC_STATUS_INVALID_PREDICTION = 8,
  PC_STATUS_PANIC = 9,
} PcStatus;

/**
 * Algorithms accepted by `pc_trials_until`.
 */
typedef enum PcAlgorithm {
  PC_ALGORITHM_KARGER = 0,
  PC_ALGORITHM_BOOSTED_KARGER = 1,
  PC_ALGORITHM_FPZ = 2,
  PC_ALGORITHM_BOOSTED_FPZ = 3,
} PcAlgorithm;

/**
 * Opaque cut: a vertex side and its weight.
 */
typedef struct PcCut PcCut;

/**
 * Opaque weighted graph.
 */
typedef struct PcGraph PcGraph;

/**
 * Opaque edge prediction.
 */
typedef struct PcPrediction PcPrediction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next `pc_*` call on the same thread.
 */
const char *pc_last_error(void);

/**
 * Builds a graph on `n` vertices from `m` edges `(us[i], vs[i], ws[i])`.
 *
 * # Safety
 * `us`, `vs` and `ws` must each point to `m` readable elements (they may
 * be NULL when `m == 0`); `out` must be writable.
 */
enum PcStatus pc_graph_new(size_t n,
                           const size_t *us,
                           const size_t *vs,
                           const double *ws,
                           size_t m,
                           struct PcGraph **out);

/**
 * Reads a graph file (`n m` header, then `u v w` lines).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum PcStatus pc_graph_read(const char *path, struct PcGraph **out);

/**
 * # Safety
 * `g` must be NULL or a handle from this library, not yet freed.
 */
void pc_graph_free(struct PcGraph *g);

/**
 * Vertex count, or 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or a live graph handle.
 */
size_t pc_graph_n(const struct PcGraph *g);

/**
 * Edge count, or 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or a live graph handle.
 */
size_t pc_graph_m(const struct PcGraph *g);

/**
 * Empty prediction (every pair reads 0).
 */
struct PcPrediction *pc_prediction_new(void);

/**
 * Sets `p` for pair `{u, v}`.
 *
 * # Safety
 * `pred` must be a live prediction handle.
 */
enum PcStatus pc_prediction_set(struct PcPrediction *pred, size_t u, size_t v, double p);

/**
 * Reads a prediction file (`u v p` lines) for a graph on `n` vertices.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum PcStatus pc_prediction_read(const char *path, size_t n, struct PcPrediction **out);

/**
 * # Safety
 * `pred` must be NULL or a live prediction handle.
 */
void pc_prediction_free(struct PcPrediction *pred);

/**
 * Measures a prediction against the Stoer–Wagner cut of `g`.
 *
 * # Safety
 * Handles must be live; `eta` and `rho_raw` must be writable.
 */
enum PcStatus pc_measure(const struct PcGraph *g,
                         const struct PcPrediction *pred,
                         double *eta,
                         double *rho_raw);

/**
 * Exact minimum cut by Stoer–Wagner.
 *
 * # Safety
 * `g` must be live; `out` writable. Free the result with `pc_cut_free`.
 */
enum PcStatus pc_stoer_wagner(const struct PcGraph *g, struct PcCut **out);

/**
 * Exact minimum cut by enumeration (n <= 20).
 *
 * # Safety
 * As `pc_stoer_wagner`.
 */
enum PcStatus pc_brute_force(const struct PcGraph *g, struct PcCut **out);

/**
 * One Karger trial on stream `seed`.
 *
 * # Safety
 * As `pc_stoer_wagner`.
 */
enum PcStatus pc_karger_trial(const struct PcGraph *g, uint64_t seed, struct PcCut **out);

/**
 * One FPZ trial on stream `seed`.
 *
 * # Safety
 * As `pc_stoer_wagner`.
 */
enum PcStatus pc_fpz_trial(const struct PcGraph *g, uint64_t seed, struct PcCut **out);

/**
 * One Boosted Karger trial.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
enum PcStatus pc_boosted_karger_trial(const struct PcGraph *g,
                                      const struct PcPrediction *pred,
                                      double boost,
                                      size_t threshold,
                                      uint64_t seed,
                                      struct PcCut **out);

/**
 * One Boosted FPZ trial with schedule parameters `(boost, eta, rho,
 * threshold)`.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
enum PcStatus pc_boosted_fpz_trial(const struct PcGraph *g,
                                   const struct PcPrediction *pred,
                                   double boost,
                                   double eta,
                                   double rho,
                                   size_t threshold,
                                   uint64_t seed,
                                   struct PcCut **out);

/**
 * Runs trials (trial `i` on stream `(seed, i)`) until one returns weight
 * at most `target` or `max_trials` have run. Writes the 1-based index of
 * the first hit to `trials`, or 0 if none hit. `pred` may be NULL for
 * unboosted algorithms; `eta` and `rho` are used by Boosted FPZ only.
 *
 * # Safety
 * `g` must be live, `pred` NULL or live, `trials` writable.
 */
enum PcStatus pc_trials_until(const struct PcGraph *g,
                              const struct PcPrediction *pred,
                              enum PcAlgorithm algorithm,
                              double boost,
                              double eta,
                              double rho,
                              size_t threshold,
                              double target,
                              uint64_t max_trials,
                              uint64_t seed,
                              uint64_t *trials);

/**
 * Cut weight, or NaN for NULL.
 *
 * # Safety
 * `cut` must be NULL or a live cut handle.
 */
double pc_cut_weight(const struct PcCut *cut);

/**
 * Number of vertices on the cut's side (the side containing vertex 0).
 *
 * # Safety
 * `cut` must be NULL or a live cut handle.
 */
size_t pc_cut_side_len(const struct PcCut *cut);

/**
 * Copies the sorted side into `buf`, which must hold `len` entries;
 * `len` below `pc_cut_side_len` is an error.
 *
 * # Safety
 * `cut` must be live and `buf` writable for `len` elements.
 */
enum PcStatus pc_cut_side(const struct PcCut *cut, size_t *buf, size_t len);

/**
 * # Safety
 * `cut` must be NULL or a live cut handle.
 */
void pc_cut_free(struct PcCut *cut);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PREDCUT_H */
