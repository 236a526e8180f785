#ifndef UNFOEQ_H
#define UNFOEQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call.
typedef enum UnfoeqStatus {
  UNFOEQ_STATUS_OK = 0,
  // A required pointer argument was null.
  UNFOEQ_STATUS_NULL_POINTER = 1,
  // A string argument was not UTF-8.
  UNFOEQ_STATUS_UTF8 = 2,
  // Syntax, arity, symbol or file-format error in the input text.
  UNFOEQ_STATUS_FORMAT = 3,
  // The formula is outside the unary negation fragment.
  UNFOEQ_STATUS_FRAGMENT = 4,
  // Well-formed input that the operation rejects (for instance a pattern
  // that is not a model).
  UNFOEQ_STATUS_INVALID = 5,
  // A search or size budget ran out.
  UNFOEQ_STATUS_BUDGET = 6,
  // Internal error; the library state is unchanged.
  UNFOEQ_STATUS_PANIC = 7,
} UnfoeqStatus;

// A sentence together with its normal form.
typedef struct UnfoeqFormula UnfoeqFormula;

// Parsed signature.
typedef struct UnfoeqSignature UnfoeqSignature;

// Finite structure.
typedef struct UnfoeqStructure UnfoeqStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next failing call on the thread.
const char *unfoeq_last_error(void);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void unfoeq_string_free(char *s);

// Parses a signature header (`base NAME ARITY` / `eq NAME` per line).
//
// # Safety
// `src` must be a nul-terminated string and `out` writable.
enum UnfoeqStatus unfoeq_signature_parse(const char *src, struct UnfoeqSignature **out_sig);

// # Safety
// `sig` must be null or a live handle from [`unfoeq_signature_parse`].
void unfoeq_signature_free(struct UnfoeqSignature *sig);

// Parses a sentence over `sig`, checks that it is in the unary negation
// fragment and normalizes it.
//
// # Safety
// `src` must be a nul-terminated string, `sig` a live handle, `out` writable.
enum UnfoeqStatus unfoeq_formula_parse(const char *src,
                                       const struct UnfoeqSignature *sig,
                                       struct UnfoeqFormula **out_formula);

// # Safety
// `f` must be null or a live handle from [`unfoeq_formula_parse`].
void unfoeq_formula_free(struct UnfoeqFormula *f);

// The normal form as text.
//
// # Safety
// `f` must be a live handle and `out` writable.
enum UnfoeqStatus unfoeq_formula_normal_form(const struct UnfoeqFormula *f, char **out_text);

// Parses a structure over the formula's normalized signature (fresh symbols
// included). Distinguished relations are closed to equivalences.
//
// # Safety
// `src` must be a nul-terminated string, `f` a live handle, `out` writable.
enum UnfoeqStatus unfoeq_structure_parse(const char *src,
                                         const struct UnfoeqFormula *f,
                                         struct UnfoeqStructure **out_structure);

// # Safety
// `s` must be null or a live structure handle.
void unfoeq_structure_free(struct UnfoeqStructure *s);

// Number of elements.
//
// # Safety
// `s` must be a live handle and `out` writable.
enum UnfoeqStatus unfoeq_structure_size(const struct UnfoeqStructure *s, size_t *out_size);

// The structure in the text format read by [`unfoeq_structure_parse`].
//
// # Safety
// `s` must be a live handle and `out` writable.
enum UnfoeqStatus unfoeq_structure_to_text(const struct UnfoeqStructure *s, char **out_text);

// Whether `s` is a model of the normal form. Structures over the original
// signature (without fresh symbols) are evaluated against the sentence.
//
// # Safety
// Both handles must be live and `out` writable.
enum UnfoeqStatus unfoeq_check_model(const struct UnfoeqFormula *f,
                                     const struct UnfoeqStructure *s,
                                     bool *out_holds);

// Searches for a model with at most `max_size` elements. `node_limit` 0
// means unlimited. `*out_model` is null when there is none.
//
// # Safety
// `f` must be a live handle and `out_model` writable.
enum UnfoeqStatus unfoeq_find_model(const struct UnfoeqFormula *f,
                                    size_t max_size,
                                    uint64_t node_limit,
                                    struct UnfoeqStructure **out_model);

// Two-variable construction from the finite model `pattern` starting at
// `origin`. `*out_conditions_hold` reports the structure-level checks.
//
// # Safety
// Handles must be live and out-parameters writable.
enum UnfoeqStatus unfoeq_construct_2v(const struct UnfoeqFormula *f,
                                      const struct UnfoeqStructure *pattern,
                                      uint32_t origin,
                                      struct UnfoeqStructure **out_model,
                                      bool *out_conditions_hold);

// General construction from the finite model `pattern` with its root at
// `origin`. Gives up with [`UnfoeqStatus::Budget`] when an intermediate
// structure exceeds `max_size` elements (0 means no limit). The result is
// over the normalized signature.
//
// # Safety
// Handles must be live and out-parameters writable.
enum UnfoeqStatus unfoeq_construct_nd(const struct UnfoeqFormula *f,
                                      const struct UnfoeqStructure *pattern,
                                      uint32_t origin,
                                      size_t max_size,
                                      struct UnfoeqStructure **out_model,
                                      bool *out_conditions_hold);

// Decimal value of the two-variable size bound, or [`UnfoeqStatus::Budget`]
// when it has more than `max_bits` bits.
//
// # Safety
// `out_text` must be writable.
enum UnfoeqStatus unfoeq_bound_two_variable(uint32_t live,
                                            uint32_t gtypes,
                                            uint32_t conjuncts,
                                            uint64_t max_bits,
                                            char **out_text);

// Decimal value of the general size bound, or [`UnfoeqStatus::Budget`] when
// it has more than `max_bits` bits.
//
// # Safety
// `out_text` must be writable.
enum UnfoeqStatus unfoeq_bound_general(uint32_t live,
                                       uint32_t formula_len,
                                       uint32_t subtree_types,
                                       uint64_t max_bits,
                                       char **out_text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNFOEQ_H */
