/* acclink C API: account-linkage pipeline and its numeric primitives. */
#ifndef ACCLINK_H
#define ACCLINK_H

#include <stddef.h>

#if defined(_WIN32)
#define ACCLINK_API __declspec(dllexport)
#else
#define ACCLINK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum acclink_status {
  ACCLINK_OK = 0,
  ACCLINK_E_USAGE = 1,
  ACCLINK_E_DATA = 2,
  ACCLINK_E_INTERNAL = 3,
  ACCLINK_E_PREREQUISITE = 4
} acclink_status;

typedef struct acclink_config acclink_config;
typedef struct acclink_graph acclink_graph;
typedef struct acclink_model acclink_model;

typedef void (*acclink_log_fn)(const char* line, void* user);

ACCLINK_API const char* acclink_version(void);

/* Message of the last failed call on this thread; "" when none. */
ACCLINK_API const char* acclink_last_error(void);

/* Configuration ---------------------------------------------------------- */

/* Defaults plus ACCLINK_* environment overrides for path keys. */
ACCLINK_API acclink_status acclink_config_new(acclink_config** out);
/* Reads an INI-style file and applies ACCLINK_* environment overrides. */
ACCLINK_API acclink_status acclink_config_load(const char* path, acclink_config** out);
/* key is "section.key", e.g. "groundtruth.users". */
ACCLINK_API acclink_status acclink_config_set(acclink_config* cfg, const char* key, const char* value);
/* Copies the value into buf (NUL-terminated). *needed receives the full size
 * including the terminator; a too-small buffer yields ACCLINK_E_USAGE. */
ACCLINK_API acclink_status acclink_config_get(const acclink_config* cfg, const char* key, char* buf, size_t buflen,
                                              size_t* needed);
/* 16 hex digits plus NUL: buflen >= 17. */
ACCLINK_API acclink_status acclink_config_hash(const acclink_config* cfg, char* buf, size_t buflen);
/* Parses and validates every value. */
ACCLINK_API acclink_status acclink_config_validate(const acclink_config* cfg);
ACCLINK_API void acclink_config_free(acclink_config* cfg);

/* Pipeline --------------------------------------------------------------- */

/* stage: ingest, synth, groundtruth, extract, pair, analyze, train, evaluate,
 * report. Progress lines go to log when it is non-NULL. */
ACCLINK_API acclink_status acclink_run_stage(const acclink_config* cfg, const char* stage, int force,
                                             acclink_log_fn log, void* user);

/* Primitives ------------------------------------------------------------- */

/* Edit distance over Unicode scalar values of two UTF-8 strings. */
ACCLINK_API acclink_status acclink_levenshtein(const char* s, const char* t, size_t* out);
ACCLINK_API acclink_status acclink_ks_two_sample(const double* a, size_t n, const double* b, size_t m, double* d,
                                                 double* p_value);
/* labels are 0/1. */
ACCLINK_API acclink_status acclink_roc_auc(const double* scores, const int* labels, size_t n, double* out);

/* Conversation graph ------------------------------------------------------ */

ACCLINK_API acclink_status acclink_graph_new(acclink_graph** out);
ACCLINK_API acclink_status acclink_graph_add_edge(acclink_graph* g, const char* src, const char* dst, double weight);
ACCLINK_API acclink_status acclink_graph_node_count(const acclink_graph* g, size_t* out);
/* values receives authority, hub, triangles, eigenvector, pagerank, clustering. */
ACCLINK_API acclink_status acclink_graph_features(const acclink_graph* g, const char* account, double values[6]);
ACCLINK_API void acclink_graph_free(acclink_graph* g);

/* Trained models --------------------------------------------------------- */

ACCLINK_API acclink_status acclink_model_load(const char* path, acclink_model** out);
ACCLINK_API acclink_status acclink_model_feature_count(const acclink_model* m, size_t* out);
/* Probability that the pair is linked. n must equal the feature count. */
ACCLINK_API acclink_status acclink_model_predict(const acclink_model* m, const double* x, size_t n, double* p_linked);
ACCLINK_API void acclink_model_free(acclink_model* m);

#ifdef __cplusplus
}
#endif

#endif /* ACCLINK_H */
