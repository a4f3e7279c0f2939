#ifndef FANBW_H
#define FANBW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FanbwStatus {
  FANBW_STATUS_OK = 0,
  FANBW_STATUS_VERIFICATION_FAILED = 1,
  FANBW_STATUS_INPUT_ERROR = 2,
  FANBW_STATUS_NULL_POINTER = 3,
  FANBW_STATUS_PANIC = 4,
} FanbwStatus;

typedef struct FanbwCertificate FanbwCertificate;

// A plain graph or a graph placed in a strong product.
typedef struct FanbwGraph FanbwGraph;

// Pipeline parameters; `k = 0` and `dims_cap = 0` mean "default" and
// "full dimension".
typedef struct FanbwOptions {
  double d;
  uint32_t k;
  double a;
  uint64_t seed;
  uint32_t restarts;
  uint32_t dims_cap;
} FanbwOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after success.
// Valid until the next call on the same thread.
const char *fanbw_last_error(void);

struct FanbwOptions fanbw_options_default(double d);

// Graph on `n` vertices with `m` edges given as `2m` endpoints.
//
// # Safety
// `edges` must point to `2 * m` readable values (or be null when `m = 0`);
// `out` must be writable.
enum FanbwStatus fanbw_graph_new(size_t n, const size_t *edges, size_t m, struct FanbwGraph **out);

// Parses the plain graph text format.
//
// # Safety
// `text` must be a nul-terminated string; `out` must be writable.
enum FanbwStatus fanbw_graph_parse(const char *text, struct FanbwGraph **out);

// Parses a product document.
//
// # Safety
// As [`fanbw_graph_parse`].
enum FanbwStatus fanbw_product_parse(const char *text, struct FanbwGraph **out);

// # Safety
// `g` must come from this library and not be freed twice; null is ignored.
void fanbw_graph_free(struct FanbwGraph *g);

// # Safety
// `g` must be a live handle; `out` writable.
enum FanbwStatus fanbw_graph_vertex_count(const struct FanbwGraph *g, size_t *out);

// Exact bandwidth, at most 12 vertices.
//
// # Safety
// `g` must be a live handle; `out` writable.
enum FanbwStatus fanbw_exact_bandwidth(const struct FanbwGraph *g, size_t *out);

// Exact local density as a reduced fraction.
//
// # Safety
// `g` must be a live handle; `num` and `den` writable.
enum FanbwStatus fanbw_local_density(const struct FanbwGraph *g, uint64_t *num, uint64_t *den);

// Runs the pipeline matching the handle (layered for plain graphs,
// product otherwise) and builds a certificate with the default `b`.
//
// # Safety
// `g` must be a live handle; `opts` readable; `out` writable.
enum FanbwStatus fanbw_certify(const struct FanbwGraph *g,
                               const struct FanbwOptions *opts,
                               struct FanbwCertificate **out);

// # Safety
// `text` nul-terminated; `out` writable.
enum FanbwStatus fanbw_certificate_parse(const char *text, struct FanbwCertificate **out);

// Serialized certificate; release with [`fanbw_string_free`].
//
// # Safety
// `c` must be a live handle; `out` writable.
enum FanbwStatus fanbw_certificate_to_text(const struct FanbwCertificate *c, char **out);

// `b` and the measured bandwidth of a certificate.
//
// # Safety
// `c` must be a live handle; outputs writable.
enum FanbwStatus fanbw_certificate_summary(const struct FanbwCertificate *c,
                                           size_t *b,
                                           size_t *bandwidth,
                                           size_t *x_size);

// Sets vertex `v`'s `(node, slot)`; meant for building test cases.
//
// # Safety
// `c` must be a live handle.
enum FanbwStatus fanbw_certificate_set_mapping(struct FanbwCertificate *c,
                                               size_t v,
                                               size_t node,
                                               size_t slot);

// `FANBW_STATUS_OK` when valid, `FANBW_STATUS_VERIFICATION_FAILED` with
// the first violation in [`fanbw_last_error`] otherwise.
//
// # Safety
// Both handles must be live.
enum FanbwStatus fanbw_verify(const struct FanbwGraph *g, const struct FanbwCertificate *c);

// # Safety
// `c` must come from this library; null is ignored.
void fanbw_certificate_free(struct FanbwCertificate *c);

// # Safety
// `s` must come from [`fanbw_certificate_to_text`]; null is ignored.
void fanbw_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FANBW_H */
