/* Exercises the C API from plain C. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "acclink/acclink.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  EXPECT(strlen(acclink_version()) > 0);

  size_t d = 0;
  EXPECT(acclink_levenshtein("kitten", "sitting", &d) == ACCLINK_OK && d == 3);
  EXPECT(acclink_levenshtein("h\xc3\xa9llo", "hello", &d) == ACCLINK_OK && d == 1);
  EXPECT(acclink_levenshtein(NULL, "x", &d) == ACCLINK_E_USAGE);
  EXPECT(strlen(acclink_last_error()) > 0);

  double a[] = {1, 2, 3}, b[] = {4, 5, 6}, ks = 0, p = 0;
  EXPECT(acclink_ks_two_sample(a, 3, b, 3, &ks, &p) == ACCLINK_OK && ks == 1.0);
  EXPECT(acclink_ks_two_sample(a, 0, b, 3, &ks, &p) == ACCLINK_E_DATA);

  double scores[] = {0.9, 0.8, 0.2, 0.1}, auc = 0;
  int labels[] = {1, 0, 1, 0};
  EXPECT(acclink_roc_auc(scores, labels, 4, &auc) == ACCLINK_OK && fabs(auc - 0.75) < 1e-12);

  acclink_graph* g = NULL;
  EXPECT(acclink_graph_new(&g) == ACCLINK_OK);
  EXPECT(acclink_graph_add_edge(g, "a", "b", 1.0) == ACCLINK_OK);
  EXPECT(acclink_graph_add_edge(g, "b", "a", 1.0) == ACCLINK_OK);
  EXPECT(acclink_graph_add_edge(g, "a", "c", -1.0) == ACCLINK_E_USAGE);
  size_t n = 0;
  EXPECT(acclink_graph_node_count(g, &n) == ACCLINK_OK && n == 2);
  double f[6];
  EXPECT(acclink_graph_features(g, "a", f) == ACCLINK_OK && fabs(f[4] - 0.5) < 1e-9);
  EXPECT(acclink_graph_features(g, "zz", f) == ACCLINK_E_DATA);
  acclink_graph_free(g);

  acclink_config* cfg = NULL;
  EXPECT(acclink_config_new(&cfg) == ACCLINK_OK);
  EXPECT(acclink_config_set(cfg, "eval.folds", "4") == ACCLINK_OK);
  EXPECT(acclink_config_set(cfg, "eval.nope", "4") == ACCLINK_E_USAGE);
  char buf[64];
  size_t need = 0;
  EXPECT(acclink_config_get(cfg, "eval.folds", buf, sizeof buf, &need) == ACCLINK_OK && strcmp(buf, "4") == 0);
  EXPECT(acclink_config_get(cfg, "eval.folds", buf, 1, &need) == ACCLINK_E_USAGE && need == 2);
  char hash[17];
  EXPECT(acclink_config_hash(cfg, hash, sizeof hash) == ACCLINK_OK && strlen(hash) == 16);
  EXPECT(acclink_config_validate(cfg) == ACCLINK_OK);
  EXPECT(acclink_config_set(cfg, "run.out", "/nonexistent-acclink-dir/run") == ACCLINK_OK);
  EXPECT(acclink_run_stage(cfg, "evaluate", 0, NULL, NULL) == ACCLINK_E_PREREQUISITE);
  EXPECT(acclink_run_stage(cfg, "compile", 0, NULL, NULL) == ACCLINK_E_USAGE);
  acclink_config_free(cfg);

  acclink_model* m = NULL;
  EXPECT(acclink_model_load("/nonexistent-acclink-model", &m) == ACCLINK_E_DATA);

  if (failures == 0) printf("capi: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
