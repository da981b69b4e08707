#include "acclink/acclink.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "acclink/config.hpp"
#include "acclink/error.hpp"
#include "acclink/evalharness.hpp"
#include "acclink/learners.hpp"
#include "acclink/netgraph.hpp"
#include "acclink/pairmodel.hpp"
#include "acclink/pipeline.hpp"
#include "acclink/statsel.hpp"

struct acclink_config {
  acclink::pipeline::RunConfig cfg;
};

struct acclink_graph {
  acclink::netgraph::ConversationGraph g;
};

struct acclink_model {
  acclink::learners::Model m;
};

namespace {

thread_local std::string last_error;

acclink_status fail(acclink_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <typename Fn>
acclink_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return ACCLINK_OK;
  } catch (const acclink::Error& e) {
    switch (e.kind()) {
      case acclink::ErrorKind::Usage: return fail(ACCLINK_E_USAGE, e.what());
      case acclink::ErrorKind::Data: return fail(ACCLINK_E_DATA, e.what());
      case acclink::ErrorKind::Prerequisite: return fail(ACCLINK_E_PREREQUISITE, e.what());
      case acclink::ErrorKind::Internal: return fail(ACCLINK_E_INTERNAL, e.what());
    }
    return fail(ACCLINK_E_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ACCLINK_E_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(ACCLINK_E_DATA, e.what());
  } catch (const std::exception& e) {
    return fail(ACCLINK_E_INTERNAL, e.what());
  } catch (...) {
    return fail(ACCLINK_E_INTERNAL, "unknown error");
  }
}

#define REQUIRE_ARG(p)                                                   \
  do {                                                                   \
    if ((p) == nullptr) return fail(ACCLINK_E_USAGE, #p " is NULL");     \
  } while (0)

}  // namespace

extern "C" {

const char* acclink_version(void) { return ACCLINK_VERSION; }

const char* acclink_last_error(void) { return last_error.c_str(); }

acclink_status acclink_config_new(acclink_config** out) {
  REQUIRE_ARG(out);
  return guarded([&] {
    auto cfg = std::make_unique<acclink_config>();
    cfg->cfg.apply_env_overrides();
    *out = cfg.release();
  });
}

acclink_status acclink_config_load(const char* path, acclink_config** out) {
  REQUIRE_ARG(path);
  REQUIRE_ARG(out);
  return guarded([&] {
    auto cfg = acclink::pipeline::RunConfig::load(path);
    cfg.apply_env_overrides();
    *out = new acclink_config{std::move(cfg)};
  });
}

acclink_status acclink_config_set(acclink_config* cfg, const char* key, const char* value) {
  REQUIRE_ARG(cfg);
  REQUIRE_ARG(key);
  REQUIRE_ARG(value);
  return guarded([&] { cfg->cfg.set(key, value); });
}

acclink_status acclink_config_get(const acclink_config* cfg, const char* key, char* buf, size_t buflen,
                                  size_t* needed) {
  REQUIRE_ARG(cfg);
  REQUIRE_ARG(key);
  return guarded([&] {
    const auto& v = cfg->cfg.get(key);
    if (needed) *needed = v.size() + 1;
    if (buf == nullptr || buflen < v.size() + 1) throw acclink::usage_error("buffer too small for the value");
    std::memcpy(buf, v.c_str(), v.size() + 1);
  });
}

acclink_status acclink_config_hash(const acclink_config* cfg, char* buf, size_t buflen) {
  REQUIRE_ARG(cfg);
  REQUIRE_ARG(buf);
  return guarded([&] {
    const auto h = cfg->cfg.hash();
    if (buflen < h.size() + 1) throw acclink::usage_error("hash buffer needs 17 bytes");
    std::memcpy(buf, h.c_str(), h.size() + 1);
  });
}

acclink_status acclink_config_validate(const acclink_config* cfg) {
  REQUIRE_ARG(cfg);
  return guarded([&] { (void)cfg->cfg.resolve(); });
}

void acclink_config_free(acclink_config* cfg) { delete cfg; }

acclink_status acclink_run_stage(const acclink_config* cfg, const char* stage, int force, acclink_log_fn log,
                                 void* user) {
  REQUIRE_ARG(cfg);
  REQUIRE_ARG(stage);
  return guarded([&] {
    acclink::pipeline::RunOptions opt;
    opt.force = force != 0;
    if (log) opt.log = [log, user](const std::string& line) { log(line.c_str(), user); };
    acclink::pipeline::run_stage(acclink::pipeline::parse_stage(stage), cfg->cfg, opt);
  });
}

acclink_status acclink_levenshtein(const char* s, const char* t, size_t* out) {
  REQUIRE_ARG(s);
  REQUIRE_ARG(t);
  REQUIRE_ARG(out);
  return guarded([&] { *out = acclink::pairmodel::levenshtein(std::string_view(s), std::string_view(t)); });
}

acclink_status acclink_ks_two_sample(const double* a, size_t n, const double* b, size_t m, double* d,
                                     double* p_value) {
  REQUIRE_ARG(a);
  REQUIRE_ARG(b);
  REQUIRE_ARG(d);
  REQUIRE_ARG(p_value);
  return guarded([&] {
    const auto r = acclink::statsel::ks_two_sample({a, a + n}, {b, b + m});
    *d = r.d;
    *p_value = r.p_value;
  });
}

acclink_status acclink_roc_auc(const double* scores, const int* labels, size_t n, double* out) {
  REQUIRE_ARG(scores);
  REQUIRE_ARG(labels);
  REQUIRE_ARG(out);
  return guarded([&] { *out = acclink::eval::roc_auc({scores, scores + n}, {labels, labels + n}); });
}

acclink_status acclink_graph_new(acclink_graph** out) {
  REQUIRE_ARG(out);
  return guarded([&] { *out = new acclink_graph{}; });
}

acclink_status acclink_graph_add_edge(acclink_graph* g, const char* src, const char* dst, double weight) {
  REQUIRE_ARG(g);
  REQUIRE_ARG(src);
  REQUIRE_ARG(dst);
  return guarded([&] {
    if (!(weight > 0.0)) throw acclink::usage_error("edge weight must be positive");
    g->g.add_edge(src, dst, weight);
  });
}

acclink_status acclink_graph_node_count(const acclink_graph* g, size_t* out) {
  REQUIRE_ARG(g);
  REQUIRE_ARG(out);
  *out = g->g.node_count();
  return ACCLINK_OK;
}

acclink_status acclink_graph_features(const acclink_graph* g, const char* account, double values[6]) {
  REQUIRE_ARG(g);
  REQUIRE_ARG(account);
  REQUIRE_ARG(values);
  return guarded([&] {
    const auto v = acclink::netgraph::network_features(g->g, account);
    for (std::size_t i = 0; i < 6; ++i) values[i] = v.values[i];
  });
}

void acclink_graph_free(acclink_graph* g) { delete g; }

acclink_status acclink_model_load(const char* path, acclink_model** out) {
  REQUIRE_ARG(path);
  REQUIRE_ARG(out);
  return guarded([&] {
    std::ifstream in(path);
    if (!in) throw acclink::data_error(std::string("cannot open model file ") + path);
    *out = new acclink_model{acclink::learners::Model::load(in, path)};
  });
}

acclink_status acclink_model_feature_count(const acclink_model* m, size_t* out) {
  REQUIRE_ARG(m);
  REQUIRE_ARG(out);
  *out = m->m.feature_names().size();
  return ACCLINK_OK;
}

acclink_status acclink_model_predict(const acclink_model* m, const double* x, size_t n, double* p_linked) {
  REQUIRE_ARG(m);
  REQUIRE_ARG(x);
  REQUIRE_ARG(p_linked);
  return guarded([&] { *p_linked = m->m.predict_proba(std::vector<double>(x, x + n))[1]; });
}

void acclink_model_free(acclink_model* m) { delete m; }

}  // extern "C"
