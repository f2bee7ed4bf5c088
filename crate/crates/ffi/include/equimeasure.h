#ifndef EQUIMEASURE_H
#define EQUIMEASURE_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum EqmStatus {
  EQM_STATUS_OK = 0,
  EQM_STATUS_NULL_POINTER = 1,
  EQM_STATUS_INVALID_UTF8 = 2,
  EQM_STATUS_PARSE = 3,
  EQM_STATUS_INVALID_INPUT = 4,
  EQM_STATUS_BUDGET = 5,
  EQM_STATUS_NUMERICAL = 6,
  EQM_STATUS_IO = 7,
  EQM_STATUS_PANIC = 8,
} EqmStatus;

// Verdict of the sampled measure comparison.
typedef enum EqmVerdict {
  EQM_VERDICT_SAME = 0,
  EQM_VERDICT_DIFFERENT = 1,
  EQM_VERDICT_INCONCLUSIVE = 2,
} EqmVerdict;

// A rational self-map of the sphere with exact coefficients.
typedef struct EqmMap EqmMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next library call on the same thread.
const char *eqm_last_error(void);

// Parses a map from JSON or shorthand such as `"(z^2+1)/z"`. `field` is
// `"Q"`, `"Q(w)"`, `"Q(i)"` or comma-separated minimal polynomial
// coefficients; null means `"Q"`.
//
// # Safety
// `text` and a non-null `field` must be NUL-terminated strings; `out` must
// be writable.
enum EqmStatus eqm_map_parse(const char *text, const char *field, struct EqmMap **out);

// Releases a map. Null is ignored.
//
// # Safety
// `map` must come from this library and not be used afterwards.
void eqm_map_free(struct EqmMap *map);

// # Safety
// `map` must be a live handle and `out` writable.
enum EqmStatus eqm_map_degree(const struct EqmMap *map, size_t *out);

// `f ∘ g`, refused when the degree exceeds `degree_budget`.
//
// # Safety
// `f`, `g` must be live handles and `out` writable.
enum EqmStatus eqm_map_compose(const struct EqmMap *f,
                               const struct EqmMap *g,
                               uint64_t degree_budget,
                               struct EqmMap **out);

// The `n`-th iterate of `f`.
//
// # Safety
// `f` must be a live handle and `out` writable.
enum EqmStatus eqm_map_iterate(const struct EqmMap *f,
                               uint32_t n,
                               uint64_t degree_budget,
                               struct EqmMap **out);

// Exact equality of normalized coefficients; fields must agree.
//
// # Safety
// `a`, `b` must be live handles and `out` writable.
enum EqmStatus eqm_map_equal(const struct EqmMap *a, const struct EqmMap *b, bool *out);

// # Safety
// `map` must be a live handle and `out` writable. Free the result with
// `eqm_string_free`.
enum EqmStatus eqm_map_to_json(const struct EqmMap *map, char **out);

// Human-readable form of a map.
//
// # Safety
// As for `eqm_map_to_json`.
enum EqmStatus eqm_map_to_string(const struct EqmMap *map, char **out);

// # Safety
// `s` must come from this library or be null.
void eqm_string_free(char *s);

// Irreducible components of the graph curve of `g`, as a JSON report.
//
// # Safety
// `g` must be a live handle and `out` writable.
enum EqmStatus eqm_analyze_graph(const struct EqmMap *g, uint64_t seed, char **out);

// Certifies the counterexample claims for `(R, S, T)`. `all_pass` is set
// to whether every claim passed; `out` receives the claims as JSON.
//
// # Safety
// The maps must be live handles; `all_pass` and `out` writable.
enum EqmStatus eqm_certify_triple(const struct EqmMap *r,
                                  const struct EqmMap *s,
                                  const struct EqmMap *t,
                                  uint64_t seed,
                                  bool *all_pass,
                                  char **out);

// Sampled comparison of the equilibrium measures of `f` and `g`. `report`
// may be null when only the verdict is wanted.
//
// # Safety
// `f`, `g` must be live handles; `verdict` writable.
enum EqmStatus eqm_same_measure(const struct EqmMap *f,
                                const struct EqmMap *g,
                                size_t count,
                                size_t depth,
                                uint64_t seed,
                                enum EqmVerdict *verdict,
                                char **report);

// Whether `z^df` and `z^dg` have the same periodic points.
//
// # Safety
// `out` must be writable.
enum EqmStatus eqm_powermap_same_periodic_points(uint64_t df, uint64_t dg, bool *out);

// Runs the command-line interface with `argc` arguments (excluding the
// program name). Returns the CLI exit code; output is written to `out` as
// the report text and, if non-null, diagnostics to `err`.
//
// # Safety
// `argv` must hold `argc` NUL-terminated strings; `out` must be writable.
int eqm_cli_run(int argc, const char *const *argv, char **out, char **err);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EQUIMEASURE_H */
