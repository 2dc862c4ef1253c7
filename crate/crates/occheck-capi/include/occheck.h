#ifndef OCCHECK_H
#define OCCHECK_H

/* Generated by cbindgen from the occheck-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define OCCHECK_OK 0

// A required pointer argument was NULL.
#define OCCHECK_ERR_NULL_ARGUMENT 1

// An input string was not valid UTF-8.
#define OCCHECK_ERR_INVALID_UTF8 2

// The input did not parse; the output string holds the diagnostic.
#define OCCHECK_ERR_PARSE 3

// An argument was structurally valid but unusable (unknown rule name,
// missing query, missing moding).
#define OCCHECK_ERR_UNSUPPORTED 4

// The state budget was exhausted before a verdict was reached.
#define OCCHECK_ERR_BUDGET 5

// An internal invariant failed.
#define OCCHECK_ERR_INTERNAL 6

// An opaque parsed program file: clauses, queries, and mode declarations.
typedef struct OccheckSource OccheckSource;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a program file into a new handle.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be a valid pointer.
// On success `*out` owns the handle; release it with
// [`occheck_source_free`]. On failure `*out` is NULL and, when `error`
// is non-NULL, `*error` holds a JSON diagnostic to release with
// [`occheck_string_free`].
int occheck_source_parse(const char *text, OccheckSource **out, char **error);

// Releases a handle returned by [`occheck_source_parse`].
//
// # Safety
// `src` must be NULL or a handle not yet freed.
void occheck_source_free(OccheckSource *src);

// Releases a string returned by any function of this library.
//
// # Safety
// `s` must be NULL or a string obtained from this library, not yet freed.
void occheck_string_free(char *s);

// The library version as a static string; do not free it.
const char *occheck_version(void);

// Reports which occur-check safety routes accept the program, as JSON:
// `{"routes": [...], "applied": [...], "established": bool}`.
//
// # Safety
// `src` must be a live handle; `out` must be a valid pointer. Release
// `*out` with [`occheck_string_free`].
int occheck_analyze(const OccheckSource *src, char **out);

// Decides the NSTO and WNSTO verdicts of an equation set, as JSON:
// `{"nsto": bool, "wnsto": bool, "states_explored": n}`.
//
// `budget` bounds the number of distinct states explored; 0 means the
// default (100000).
//
// # Safety
// `equations` must be a NUL-terminated string; `out` must be a valid
// pointer. Release `*out` with [`occheck_string_free`].
int occheck_decide(const char *equations, unsigned int budget, char **out);

// Runs unification on an equation set and reports the outcome as JSON:
// `{"algorithm": ..., "outcome": "solved"|"semi-solved"|"clash"|
// "occur-check", "final": ..., "mgu": ..., "residue": ...}`.
//
// `with_occur_check` selects the algorithm: nonzero runs the occur-check
// variant, zero the occur-check-free one. For a semi-solved outcome,
// `residue` holds the result of solving the remaining equations: an mgu,
// or `"occur-check failure"`.
//
// # Safety
// `equations` must be a NUL-terminated string; `out` must be a valid
// pointer. Release `*out` with [`occheck_string_free`].
int occheck_unify(const char *equations, int with_occur_check, char **out);

// Explores the derivation tree for a query and verifies every unification
// it could attempt, as JSON: `{"ocf_up_to_bound": bool,
// "weakly_ocf_up_to_bound": bool, "undecided": n, "success_leaves": n,
// "floundered_leaves": n, "nodes_visited": n, "truncated": bool}`.
//
// `query` may be NULL to use the file's first query. `rule` is
// `"leftmost"`, `"rightmost"`, `"random:SEED"`, or `"moding"`.
// `max_depth`/`max_nodes` of 0 select the defaults (64 and 10000).
//
// # Safety
// `src` must be a live handle; `out` must be a valid pointer; `query` may
// be NULL. Release `*out` with [`occheck_string_free`].
int occheck_verify_tree(const OccheckSource *src,
                        const char *query,
                        const char *rule,
                        unsigned int max_depth,
                        unsigned int max_nodes,
                        char **out);

// Collects the computed answers of a query, as JSON: `{"answers": [...],
// "floundered_leaves": n, "truncated": bool}`.
//
// Arguments follow [`occheck_verify_tree`].
//
// # Safety
// `src` must be a live handle; `out` must be a valid pointer; `query` may
// be NULL. Release `*out` with [`occheck_string_free`].
int occheck_answers(const OccheckSource *src,
                    const char *query,
                    const char *rule,
                    unsigned int max_depth,
                    unsigned int max_nodes,
                    char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OCCHECK_H */
