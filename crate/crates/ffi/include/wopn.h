/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef WOPN_H
#define WOPN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WopnMethod {
  WOPN_METHOD_SUPD = 0,
  WOPN_METHOD_SWPD = 1,
  WOPN_METHOD_WSPD = 2,
  WOPN_METHOD_DD = 3,
} WopnMethod;

typedef enum WopnState {
  WOPN_STATE_PERIODIC = 0,
  WOPN_STATE_CHAOTIC = 1,
} WopnState;

typedef enum WopnStatus {
  WOPN_STATUS_OK = 0,
  WOPN_STATUS_NULL_POINTER = 1,
  WOPN_STATUS_INVALID_INPUT = 2,
  WOPN_STATUS_LENGTH = 3,
  WOPN_STATUS_DEGENERATE = 4,
  WOPN_STATUS_DISCONNECTED = 5,
  WOPN_STATUS_NOT_FOUND = 6,
  WOPN_STATUS_DIVERGENCE = 7,
  WOPN_STATUS_BUFFER_TOO_SMALL = 8,
  WOPN_STATUS_PANIC = 9,
} WopnStatus;

// H0/H1 persistence diagram.
typedef struct WopnDiagram WopnDiagram;

// Symmetric vertex distance matrix.
typedef struct WopnDistance WopnDistance;

// Weighted transition graph, from a signal or an explicit edge list.
typedef struct WopnNetwork WopnNetwork;

// Sampled scalar signal.
typedef struct WopnSignal WopnSignal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next `wopn_*` call on the same thread.
const char *wopn_last_error(void);

// Library version as a static NUL-terminated string.
const char *wopn_version(void);

// Copy `len` samples taken at `fs` Hz into a new signal.
//
// # Safety
// `samples` must point to `len` readable doubles; `out` must be writable.
enum WopnStatus wopn_signal_new(const double *samples,
                                size_t len,
                                double fs,
                                struct WopnSignal **out);

// Simulate a registry system with its default protocol.
//
// # Safety
// `system` must be a NUL-terminated string; `out` must be writable.
enum WopnStatus wopn_signal_simulate(const char *system,
                                     enum WopnState state,
                                     struct WopnSignal **out);

// Standardize and add truncated Gaussian noise; `snr_db` may be +inf.
//
// # Safety
// `signal` must be a live handle; `out` must be writable.
enum WopnStatus wopn_signal_add_noise(const struct WopnSignal *signal,
                                      double snr_db,
                                      uint64_t seed,
                                      struct WopnSignal **out);

// Number of samples, 0 for a null handle.
//
// # Safety
// `signal` must be null or a live handle.
size_t wopn_signal_len(const struct WopnSignal *signal);

// Copy the samples into `buf`, which must hold at least `wopn_signal_len`.
//
// # Safety
// `buf` must point to `cap` writable doubles.
enum WopnStatus wopn_signal_copy(const struct WopnSignal *signal, double *buf, size_t cap);

// # Safety
// `signal` must be null or a handle not yet freed.
void wopn_signal_free(struct WopnSignal *signal);

// Ordinal partition network of `signal` with dimension `n` and delay `tau`.
//
// # Safety
// `signal` must be a live handle; `out` must be writable.
enum WopnStatus wopn_network_from_signal(const struct WopnSignal *signal,
                                         size_t n,
                                         size_t tau,
                                         struct WopnNetwork **out);

// Graph on `vertices` vertices from parallel arrays of endpoints and
// positive weights. Repeated edges accumulate.
//
// # Safety
// `us`, `vs` and `ws` must each point to `edges` readable values.
enum WopnStatus wopn_network_from_edges(size_t vertices,
                                        const size_t *us,
                                        const size_t *vs,
                                        const uint64_t *ws,
                                        size_t edges,
                                        struct WopnNetwork **out);

// # Safety
// `network` must be null or a live handle.
size_t wopn_network_vertex_count(const struct WopnNetwork *network);

// # Safety
// `network` must be null or a live handle.
size_t wopn_network_edge_count(const struct WopnNetwork *network);

// # Safety
// `network` must be null or a handle not yet freed.
void wopn_network_free(struct WopnNetwork *network);

// Vertex distances of `network`. For DD, `t_steps == 0` selects twice the
// graph diameter.
//
// # Safety
// `network` must be a live handle; `out` must be writable.
enum WopnStatus wopn_distance_compute(const struct WopnNetwork *network,
                                      enum WopnMethod method,
                                      size_t t_steps,
                                      bool normalized,
                                      struct WopnDistance **out);

// Wrap a row-major `size × size` matrix, which must be symmetric, finite
// and zero on the diagonal.
//
// # Safety
// `values` must point to `size * size` readable doubles.
enum WopnStatus wopn_distance_from_matrix(const double *values,
                                          size_t size,
                                          struct WopnDistance **out);

// Matrix side length, 0 for a null handle.
//
// # Safety
// `distance` must be null or a live handle.
size_t wopn_distance_size(const struct WopnDistance *distance);

// Copy the matrix row-major into `buf` (`size * size` values).
//
// # Safety
// `buf` must point to `cap` writable doubles.
enum WopnStatus wopn_distance_copy(const struct WopnDistance *distance, double *buf, size_t cap);

// # Safety
// `distance` must be null or a handle not yet freed.
void wopn_distance_free(struct WopnDistance *distance);

// Rips persistence in dimensions 0 and 1.
//
// # Safety
// `distance` must be a live handle; `out` must be writable.
enum WopnStatus wopn_diagram_compute(const struct WopnDistance *distance, struct WopnDiagram **out);

// Number of pairs in dimension `dim`, including essential ones.
//
// # Safety
// `diagram` must be null or a live handle.
size_t wopn_diagram_len(const struct WopnDiagram *diagram, size_t dim);

// Copy the `dim` pairs into parallel birth/death arrays. Essential pairs
// have death `+inf`.
//
// # Safety
// `births` and `deaths` must each point to `cap` writable doubles.
enum WopnStatus wopn_diagram_copy(const struct WopnDiagram *diagram,
                                  size_t dim,
                                  double *births,
                                  double *deaths,
                                  size_t cap);

// Largest finite lifetime in dimension `dim` (0 when there is none).
//
// # Safety
// `diagram` must be a live handle; `out` must be writable.
enum WopnStatus wopn_diagram_max_lifetime(const struct WopnDiagram *diagram,
                                          size_t dim,
                                          double *out);

// # Safety
// `diagram` must be null or a handle not yet freed.
void wopn_diagram_free(struct WopnDiagram *diagram);

// Bottleneck distance between the finite `dim` pairs of two diagrams.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum WopnStatus wopn_bottleneck(const struct WopnDiagram *a,
                                const struct WopnDiagram *b,
                                size_t dim,
                                double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WOPN_H */
