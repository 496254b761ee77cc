#ifndef URYSOHN_H
#define URYSOHN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  URY_STATUS_OK = 0,
  URY_STATUS_NULL_ARGUMENT = 1,
  URY_STATUS_INVALID_UTF8 = 2,
  URY_STATUS_USAGE = 3,
  URY_STATUS_PARSE = 4,
  URY_STATUS_PRECONDITION = 5,
  URY_STATUS_IO = 6,
  URY_STATUS_PANIC = 7,
} UryStatus;

/**
 * Opaque parsed formula.
 */
typedef struct UryFormula UryFormula;

/**
 * Opaque prefix of the rational Urysohn space.
 */
typedef struct UryPrefix UryPrefix;

/**
 * Opaque relational signature.
 */
typedef struct UrySignature UrySignature;

/**
 * Opaque finite structure.
 */
typedef struct UryStructure UryStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *ury_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void ury_string_free(char *s);

/**
 * Builds the canonical prefix with `steps` points.
 *
 * # Safety
 * `out` must be valid for writes.
 */
UryStatus ury_prefix_build(uintptr_t steps, UryPrefix **out);

/**
 * # Safety
 * `text` must be a NUL-terminated string, `out` valid for writes.
 */
UryStatus ury_prefix_read(const char *text, UryPrefix **out);

/**
 * # Safety
 * `p` must be a live prefix handle, `out` valid for writes.
 */
UryStatus ury_prefix_to_string(const UryPrefix *p, char **out);

/**
 * # Safety
 * `p` must be a live prefix handle, `out` valid for writes.
 */
UryStatus ury_prefix_len(const UryPrefix *p, uintptr_t *out);

/**
 * Writes the distance between points `a` and `b` as `"n/d"`.
 *
 * # Safety
 * `p` must be a live prefix handle, `out` valid for writes.
 */
UryStatus ury_prefix_dist(const UryPrefix *p, uintptr_t a, uintptr_t b, char **out);

/**
 * # Safety
 * `p` must be null or a handle from this library, not used afterwards.
 */
void ury_prefix_free(UryPrefix *p);

/**
 * # Safety
 * `text` must be a NUL-terminated string, `out` valid for writes.
 */
UryStatus ury_signature_read(const char *text, UrySignature **out);

/**
 * # Safety
 * `s` must be null or a handle from this library, not used afterwards.
 */
void ury_signature_free(UrySignature *s);

/**
 * # Safety
 * `text` must be a NUL-terminated string, `out` valid for writes.
 */
UryStatus ury_structure_read(const char *text, UryStructure **out);

/**
 * # Safety
 * `m` must be null or a handle from this library, not used afterwards.
 */
void ury_structure_free(UryStructure *m);

/**
 * # Safety
 * `text` must be a NUL-terminated string, `sig` a live handle, `out` valid
 * for writes.
 */
UryStatus ury_formula_parse(const char *text, const UrySignature *sig, UryFormula **out);

/**
 * Normal form of a formula.
 *
 * # Safety
 * `f` must be a live handle, `out` valid for writes.
 */
UryStatus ury_formula_to_string(const UryFormula *f, char **out);

/**
 * Uniform continuity modulus of a formula, as `"n/d"`.
 *
 * # Safety
 * `f` and `sig` must be live handles, `out` valid for writes.
 */
UryStatus ury_formula_modulus(const UryFormula *f, const UrySignature *sig, char **out);

/**
 * # Safety
 * `f` must be null or a handle from this library, not used afterwards.
 */
void ury_formula_free(UryFormula *f);

/**
 * Evaluates `f` in `m`. `assign` lists bindings as `"x=0,y=3"`; null or
 * empty binds nothing. The value is written as `"n/d"`.
 *
 * # Safety
 * `m` and `f` must be live handles, `assign` null or NUL-terminated, `out`
 * valid for writes.
 */
UryStatus ury_eval(const UryStructure *m, const UryFormula *f, const char *assign, char **out);

/**
 * Decides whether a constraint file admits a metric. Writes 1 or 0.
 *
 * # Safety
 * `text` must be NUL-terminated, `out` valid for writes.
 */
UryStatus ury_feasible(const char *text, int32_t *out);

/**
 * Decides inclusion of the grey cones given by two `gcone` lines, over the
 * prefix `p`. Writes 1 or 0.
 *
 * # Safety
 * `p` must be a live handle, `c1` and `c2` NUL-terminated, `out` valid for
 * writes.
 */
UryStatus ury_cone_subset(const UryPrefix *p, const char *c1, const char *c2, int32_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* URYSOHN_H */
