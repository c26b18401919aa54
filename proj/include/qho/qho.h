/*
 * qho: exact symbolic engine for finite fragments of the order-N cover of
 * the projective line with ladder relations, and the core-formula calculus
 * over it.
 *
 * C interface of the shared library. All structured data crosses the
 * boundary as UTF-8 JSON or DSL text; handles are opaque. Every function
 * returns a status code; on failure qho_last_error() carries a message for
 * the calling thread. Strings returned through char** are owned by the
 * caller and released with qho_string_free().
 *
 * Handle lifetime: a qho_gcf is created against a qho_fragment and must
 * not outlive it.
 */

#ifndef QHO_H
#define QHO_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define QHO_API __declspec(dllexport)
#else
#define QHO_API __attribute__((visibility("default")))
#endif

typedef enum qho_status {
  QHO_OK = 0,
  QHO_ERROR = 1,           /* unclassified failure */
  QHO_ERR_PARSE = 2,       /* malformed scalar / formula / JSON input */
  QHO_ERR_DOMAIN = 3,      /* out of fragment, infinity, fiber mismatch, ... */
  QHO_ERR_GUARD = 4,       /* desk-scale guardrail exceeded */
  QHO_ERR_ODD_N = 5,       /* categoricity obstruction for odd N */
  QHO_ERR_NOT_INVARIANT = 6,
  QHO_ERR_NOT_DESCENDING = 7,
  QHO_ERR_BAD_INDEX = 8,
  QHO_ERR_ZERO_DIVISION = 9
} qho_status;

/* Message for the most recent failure on this thread. */
QHO_API const char* qho_last_error(void);
QHO_API void qho_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Fragments                                                           */

typedef struct qho_fragment qho_fragment;

/* spec_json: {"N": 2, "seeds": ["0"], "depth": 3,
 *             "sqrt_policy": "canonical" | "random:<seed>" | "signs:+1,-1,..."}
 */
QHO_API qho_status qho_fragment_build(const char* spec_json, qho_fragment** out);
/* The serialized fragment schema:
 * {"N": int, "seeds": [scalar], "depth": int,
 *  "witnesses": [{"base": scalar, "b": scalar, "e_index": int,
 *                 "eup_index": int}],
 *  "tower": [scalar]}
 * Round trips are bit-exact.
 */
QHO_API qho_status qho_fragment_parse(const char* json, qho_fragment** out);
QHO_API qho_status qho_fragment_to_json(const qho_fragment* frag, char** json);
QHO_API void qho_fragment_free(qho_fragment* frag);

/* Axioms 3-6 with counterexamples; all_pass is 1 when every check passed. */
QHO_API qho_status qho_check_axioms(const qho_fragment* frag, char** report_json,
                                    int* all_pass);

/* Hamiltonian spectrum over the real part, e.g. "1/2, 3/2, 5/2". */
QHO_API qho_status qho_spectrum(const qho_fragment* frag, char** text);

/* query_json: {"op": "a" | "adag" | "lower", "base": scalar, "index": int,
 *              "scalar": scalar, "steps": int}
 * Result: {"vector": {...}} or {"steps": int, "vector": {...}} for "lower".
 */
QHO_API qho_status qho_ladder(const qho_fragment* frag, const char* query_json,
                              char** result_json);

/* Back-and-forth between two fragments of the same shape; the trace JSON is
 * {"sign_trace": [1, -1, ...], "offsets": [int, ...]}. Fails with
 * QHO_ERR_ODD_N when a -1 sign is required and N is odd.
 */
QHO_API qho_status qho_isomorphism(const qho_fragment* a, const qho_fragment* b,
                                   char** trace_json);
/* Exhaustive verification of a previously produced trace. verdict is 1 on
 * pass; on failure report receives the violated relation. */
QHO_API qho_status qho_verify_isomorphism(const qho_fragment* a, const qho_fragment* b,
                                          const char* trace_json, char** report,
                                          int* verdict);

/* ------------------------------------------------------------------ */
/* Formula DSL                                                         */

/* Parses and reprints a formula in canonical form; n fixes zeta's order. */
QHO_API qho_status qho_formula_normalize(const char* text, unsigned n, char** canonical);

/* ------------------------------------------------------------------ */
/* General core formulas                                               */

typedef struct qho_gcf qho_gcf;

/* gcf JSON:
 * {"class_sizes": [..], "param_sizes": [..],
 *  "sigma": [{"i":1,"j":2,"n":1}], "delta1": [...], "delta2": [...],
 *  "params": [{"base": scalar, "index": int}], "num_a": int,
 *  "R": {"bound": [name], "cells": [{"eqs": [poly], "negs": [[poly]]}]}}
 */
QHO_API qho_status qho_gcf_parse(const char* json, const qho_fragment* frag,
                                 qho_gcf** out);
QHO_API qho_status qho_gcf_to_json(const qho_gcf* gcf, const qho_fragment* frag,
                                   char** json);
/* Display form in the formula DSL. */
QHO_API qho_status qho_gcf_text(const qho_gcf* gcf, const qho_fragment* frag,
                                char** text);
QHO_API void qho_gcf_free(qho_gcf* gcf);

/* delta_csv: comma-separated scalars, one per partition class. */
QHO_API qho_status qho_delta_action(const qho_gcf* gcf, const qho_fragment* frag,
                                    const char* delta_csv, qho_gcf** out);
QHO_API qho_status qho_invariant_closure(const qho_gcf* gcf, const qho_fragment* frag,
                                         qho_gcf** out);
QHO_API qho_status qho_is_invariant(const qho_gcf* gcf, const qho_fragment* frag,
                                    int* out);
QHO_API qho_status qho_align_params(const qho_gcf* to, const qho_gcf* gcf,
                                    const qho_fragment* frag, qho_gcf** out);
QHO_API qho_status qho_merge(const qho_gcf* a, const qho_gcf* b,
                             const qho_fragment* frag, qho_gcf** out);
/* l_csv: comma-separated 1-based member indices of class k. */
QHO_API qho_status qho_project(const qho_gcf* gcf, const qho_fragment* frag, unsigned k,
                               const char* l_csv, int eliminate_pass, qho_gcf** out);
/* subst_json: {"positions": [1], "values": [{"base": scalar, "index": int,
 *              "scalar": scalar}]}
 * Result: {"disjuncts": [gcf-json, ...]}.
 */
QHO_API qho_status qho_substitute_params(const qho_gcf* gcf, const qho_fragment* frag,
                                         const char* subst_json, char** disjunction_json);
/* tuple_json: {"e": [{"base": scalar, "index": int, "scalar": scalar}],
 *              "a": [scalar]} */
QHO_API qho_status qho_oracle_eval(const qho_gcf* gcf, const qho_fragment* frag,
                                   const char* tuple_json, int* result);
/* Dimension of a basic closed set (canonicalized first). */
QHO_API qho_status qho_dim(const qho_gcf* gcf, const qho_fragment* frag, int* out);
/* chain_json: {"chain": [gcf-json, ...]}; report carries per-step bases and
 * the stabilization index. */
QHO_API qho_status qho_chain_check(const char* chain_json, const qho_fragment* frag,
                                   char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* QHO_H */
