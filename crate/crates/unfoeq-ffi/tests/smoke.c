#include <stdio.h>
#include <string.h>

#include "unfoeq.h"

#define CHECK(cond)                                                          \
  do {                                                                       \
    if (!(cond)) {                                                           \
      const char *e = unfoeq_last_error();                                   \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond, e ? e : "-");   \
      return 1;                                                              \
    }                                                                        \
  } while (0)

int main(void) {
  UnfoeqSignature *sig = NULL;
  UnfoeqFormula *f = NULL;
  UnfoeqStructure *m = NULL, *big = NULL;
  bool holds = false, ok = false;
  size_t n = 0;
  char *text = NULL;

  CHECK(unfoeq_signature_parse("base P 1\nbase R 2\neq E1\n", &sig) == UNFOEQ_STATUS_OK);
  CHECK(unfoeq_formula_parse(
            "(forall x . exists y . E1(x,y) & R(x,y) & (P(x) & ~P(y) | ~P(x) & P(y)))"
            " & ~(exists x y . R(x,y) & P(x) & P(y))",
            sig, &f) == UNFOEQ_STATUS_OK);
  CHECK(unfoeq_find_model(f, 3, 0, &m) == UNFOEQ_STATUS_OK && m != NULL);
  CHECK(unfoeq_check_model(f, m, &holds) == UNFOEQ_STATUS_OK && holds);
  CHECK(unfoeq_construct_2v(f, m, 0, &big, &ok) == UNFOEQ_STATUS_OK && ok);
  CHECK(unfoeq_check_model(f, big, &holds) == UNFOEQ_STATUS_OK && holds);
  CHECK(unfoeq_structure_size(big, &n) == UNFOEQ_STATUS_OK && n >= 2);
  CHECK(unfoeq_structure_to_text(big, &text) == UNFOEQ_STATUS_OK);
  CHECK(strncmp(text, "domain ", 7) == 0);
  unfoeq_string_free(text);

  CHECK(unfoeq_bound_two_variable(2, 2, 3, 64, &text) == UNFOEQ_STATUS_OK);
  CHECK(strcmp(text, "1253826625536") == 0);
  unfoeq_string_free(text);
  CHECK(unfoeq_bound_general(3, 10, 1, 64, &text) == UNFOEQ_STATUS_BUDGET);

  UnfoeqFormula *bad = NULL;
  CHECK(unfoeq_formula_parse("~(x = y)", sig, &bad) == UNFOEQ_STATUS_FRAGMENT && bad == NULL);

  unfoeq_structure_free(big);
  unfoeq_structure_free(m);
  unfoeq_formula_free(f);
  unfoeq_signature_free(sig);
  printf("ok %zu\n", n);
  return 0;
}
