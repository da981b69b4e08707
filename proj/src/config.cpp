#include "acclink/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "acclink/error.hpp"
#include "acclink/random.hpp"
#include "acclink/utf8.hpp"

#ifndef ACCLINK_DEFAULT_LEXICON_ROOT
#define ACCLINK_DEFAULT_LEXICON_ROOT "data/lexicons"
#endif

namespace acclink::pipeline {

namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"run.language", "en"},
      {"run.out", "out"},
      {"run.seed", "7"},
      {"run.jobs", "1"},
      {"data.corpus", ""},
      {"data.annotations", ""},
      {"data.lexicon_dir", ""},
      {"data.embeddings", ""},
      {"synth.users", "200"},
      {"synth.min_posts", "20"},
      {"synth.max_posts", "60"},
      {"synth.style_seed", "1"},
      {"synth.seed", "2"},
      {"groundtruth.users", "200"},
      {"groundtruth.mode", "random"},
      {"groundtruth.linked_ratio", "0.1"},
      {"groundtruth.nonlinked_multiplier", "1"},
      {"groundtruth.min_posts", "10"},
      {"features.exclude", ""},
      {"features.syntactic", "true"},
      {"features.similarity_metric", "cosine"},
      {"features.edit_mode", "normalized"},
      {"features.edit_sample_cap", "0"},
      {"methods.ids", "all"},
      {"classifiers.ids", "naive_bayes,decision_tree,random_forest"},
      {"classifiers.forest_trees", "100"},
      {"classifiers.forest_features", "0"},
      {"classifiers.forest_min_leaf", "1"},
      {"classifiers.tree_min_leaf", "2"},
      {"classifiers.tree_prune", "false"},
      {"classifiers.tree_confidence", "0.25"},
      {"eval.repeats", "5"},
      {"eval.folds", "10"},
      {"eval.averaging", "per_fold"},
      {"analyze.method", "All_sim+All_abs+edits+sem"},
      {"analyze.alpha", "0.01"},
      {"analyze.bins", "10"},
  };
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  std::string t = s.substr(b, e - b + 1);
  if (t.size() >= 2 && (t.front() == '"' || t.front() == '\'') && t.back() == t.front()) {
    t = t.substr(1, t.size() - 2);
  }
  return t;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  std::size_t used = 0;
  try {
    if (!v.empty() && v.front() == '-') throw std::invalid_argument("negative");
    x = std::stoull(v, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw usage_error(fmt::format("{} must be a non-negative integer, got '{}'", key, v));
  return x;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  std::size_t used = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw usage_error(fmt::format("{} must be a number, got '{}'", key, v));
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto l = utf8::to_lower(v);
  if (l == "true" || l == "yes" || l == "1" || l == "on") return true;
  if (l == "false" || l == "no" || l == "0" || l == "off") return false;
  throw usage_error(fmt::format("{} must be true or false, got '{}'", key, v));
}

}  // namespace

RunConfig::RunConfig() : values_(defaults()) {}

const std::vector<std::string>& RunConfig::path_keys() {
  static const std::vector<std::string> keys = {"run.out", "data.corpus", "data.annotations", "data.lexicon_dir",
                                                "data.embeddings"};
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw usage_error(fmt::format("unknown configuration key '{}'", key));
  it->second = trim(value);
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw usage_error(fmt::format("unknown configuration key '{}'", key));
  return it->second;
}

RunConfig RunConfig::parse(std::istream& in, const std::string& source_name, const std::filesystem::path& base_dir) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw usage_error(fmt::format("{}:{}: {}", source_name, e.line(), e.message()));
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw usage_error(fmt::format("{}: key '{}' must sit inside a [section]", source_name, section));
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!cfg.values_.count(full)) throw usage_error(fmt::format("{}: unknown key '{}'", source_name, full));
      cfg.set(full, value.data());
    }
  }
  if (!base_dir.empty()) {
    for (const auto& k : path_keys()) {
      auto& v = cfg.values_[k];
      if (!v.empty() && std::filesystem::path(v).is_relative()) v = (base_dir / v).lexically_normal().string();
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw usage_error(fmt::format("cannot open configuration file {}", path.string()));
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse(in, path.string(), base);
}

void RunConfig::apply_env_overrides() {
  for (const auto& key : path_keys()) {
    std::string env = "ACCLINK_" + key;
    for (auto& c : env) c = c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(env.c_str())) values_[key] = v;
  }
}

std::string RunConfig::canonical() const {
  std::string s;
  for (const auto& [k, v] : values_) {
    if (k == "run.out" || k == "run.jobs") continue;
    s += k;
    s += '=';
    s += v;
    s += '\n';
  }
  return s;
}

std::string RunConfig::hash() const { return fmt::format("{:016x}", fnv1a64(canonical())); }

Settings RunConfig::resolve() const {
  Settings s;
  auto u = [&](const std::string& k) { return to_u64(k, get(k)); };
  auto sz = [&](const std::string& k) { return static_cast<std::size_t>(to_u64(k, get(k))); };

  s.language = get("run.language");
  if (s.language.empty()) throw usage_error("run.language must not be empty");
  s.out = get("run.out");
  if (s.out.empty()) throw usage_error("run.out must not be empty");
  s.seed = u("run.seed");
  s.jobs = std::max<std::size_t>(1, sz("run.jobs"));

  auto existing = [&](const std::string& k) {
    std::filesystem::path p = get(k);
    if (!p.empty() && !std::filesystem::exists(p)) {
      throw data_error(fmt::format("{} points to a missing path: {}", k, p.string()));
    }
    return p;
  };
  s.corpus = existing("data.corpus");
  s.annotations = existing("data.annotations");
  s.embeddings = existing("data.embeddings");
  s.lexicon_dir = get("data.lexicon_dir");
  if (s.lexicon_dir.empty()) s.lexicon_dir = std::filesystem::path(ACCLINK_DEFAULT_LEXICON_ROOT) / s.language;
  if (!std::filesystem::is_directory(s.lexicon_dir)) {
    throw usage_error(fmt::format("lexicon directory {} does not exist (set data.lexicon_dir)", s.lexicon_dir.string()));
  }

  s.synth.n_users = sz("synth.users");
  s.synth.min_posts = sz("synth.min_posts");
  s.synth.max_posts = sz("synth.max_posts");
  s.synth.style_seed = u("synth.style_seed");
  s.synth.seed = u("synth.seed");
  if (s.synth.min_posts < 1 || s.synth.max_posts < s.synth.min_posts) {
    throw usage_error("synth.min_posts must be >= 1 and <= synth.max_posts");
  }

  s.plan.users = sz("groundtruth.users");
  s.plan.mode = groundtruth::parse_split_mode(get("groundtruth.mode"));
  s.plan.linked_ratio = to_double("groundtruth.linked_ratio", get("groundtruth.linked_ratio"));
  s.plan.nonlinked_multiplier = sz("groundtruth.nonlinked_multiplier");
  s.plan.seed = derive_seed(s.seed, "groundtruth");
  s.plan.validate();
  s.min_posts = sz("groundtruth.min_posts");

  s.assembly.exclude = split_list(get("features.exclude"));
  for (const auto& name : s.assembly.exclude) {
    bool known = false;
    for (auto c : {textfeat::Category::Activity, textfeat::Category::Linguistic, textfeat::Category::Network}) {
      const auto& schema = textfeat::schema(c);
      known = known || std::find(schema.begin(), schema.end(), name) != schema.end();
    }
    if (!known) throw usage_error(fmt::format("features.exclude names unknown feature '{}'", name));
  }
  s.assembly.metric = pairmodel::parse_similarity_metric(get("features.similarity_metric"));
  s.syntactic = to_bool("features.syntactic", get("features.syntactic"));
  s.edit_mode = pairmodel::parse_edit_mode(get("features.edit_mode"));
  s.edit_sample_cap = sz("features.edit_sample_cap");

  const auto method_ids = get("methods.ids");
  if (method_ids == "all") {
    s.methods = pairmodel::all_methods();
  } else {
    // Method names contain no commas, so a plain comma split is safe.
    for (const auto& m : split_list(method_ids)) s.methods.push_back(pairmodel::parse_method(m));
  }
  if (s.methods.empty()) throw usage_error("methods.ids selects no method");

  learners::ClassifierSpec base;
  base.tree.min_leaf = sz("classifiers.tree_min_leaf");
  base.tree.prune = to_bool("classifiers.tree_prune", get("classifiers.tree_prune"));
  base.tree.confidence = to_double("classifiers.tree_confidence", get("classifiers.tree_confidence"));
  if (!(base.tree.confidence > 0.0 && base.tree.confidence <= 0.5)) {
    throw usage_error("classifiers.tree_confidence must lie in (0, 0.5]");
  }
  base.forest.n_trees = sz("classifiers.forest_trees");
  base.forest.features_per_split = sz("classifiers.forest_features");
  base.forest.min_leaf = sz("classifiers.forest_min_leaf");
  base.forest.seed = derive_seed(s.seed, "forest");
  base.forest.jobs = 1;
  if (base.forest.n_trees < 1) throw usage_error("classifiers.forest_trees must be >= 1");
  for (const auto& id : split_list(get("classifiers.ids"))) {
    auto spec = base;
    spec.kind = learners::parse_model_kind(id);
    s.classifiers.push_back(spec);
  }
  if (s.classifiers.empty()) throw usage_error("classifiers.ids selects no classifier");

  s.cv.repeats = sz("eval.repeats");
  s.cv.folds = sz("eval.folds");
  s.cv.seed = s.seed;
  s.cv.averaging = eval::parse_averaging(get("eval.averaging"));
  s.cv.jobs = s.jobs;
  if (s.cv.repeats < 1 || s.cv.folds < 2) throw usage_error("eval.repeats must be >= 1 and eval.folds >= 2");

  s.analyze_method = pairmodel::parse_method(get("analyze.method"));
  s.alpha = to_double("analyze.alpha", get("analyze.alpha"));
  if (!(s.alpha > 0.0 && s.alpha <= 1.0)) throw usage_error("analyze.alpha must lie in (0, 1]");
  s.bins = sz("analyze.bins");
  if (s.bins < 1) throw usage_error("analyze.bins must be >= 1");
  return s;
}

}  // namespace acclink::pipeline
