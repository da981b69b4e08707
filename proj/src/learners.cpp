#include "acclink/learners.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "acclink/csv.hpp"
#include "acclink/error.hpp"
#include "acclink/parallel.hpp"
#include "acclink/random.hpp"

namespace acclink::learners {

void Dataset::validate() const {
  if (labels.size() != rows.size()) {
    throw data_error(fmt::format("{} rows but {} labels", rows.size(), labels.size()));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != names.size()) {
      throw data_error(fmt::format("row {} has {} values, schema has {}", i, rows[i].size(), names.size()));
    }
    if (labels[i] != 0 && labels[i] != 1) throw data_error(fmt::format("row {} has label {}", i, labels[i]));
    for (double v : rows[i]) {
      if (!std::isfinite(v)) throw data_error(fmt::format("row {} has a non-finite value", i));
    }
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.names = names;
  out.rows.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (auto i : indices) {
    out.rows.push_back(rows.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::NaiveBayes: return "naive_bayes";
    case ModelKind::DecisionTree: return "decision_tree";
    case ModelKind::RandomForest: return "random_forest";
  }
  return "?";
}

std::string display_name(ModelKind k) {
  switch (k) {
    case ModelKind::NaiveBayes: return "NaiveBayes";
    case ModelKind::DecisionTree: return "DecisionTree";
    case ModelKind::RandomForest: return "RandomForest";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& name) {
  for (auto k : {ModelKind::NaiveBayes, ModelKind::DecisionTree, ModelKind::RandomForest}) {
    if (name == to_string(k) || name == display_name(k)) return k;
  }
  if (name == "nb") return ModelKind::NaiveBayes;
  if (name == "tree" || name == "j48") return ModelKind::DecisionTree;
  if (name == "rf" || name == "forest") return ModelKind::RandomForest;
  throw usage_error(fmt::format("unknown classifier '{}' (naive_bayes, decision_tree, random_forest)", name));
}

// Trees ---------------------------------------------------------------------

const Distribution& Tree::predict(const std::vector<double>& x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].dist;
}

std::size_t Tree::depth() const {
  std::vector<std::size_t> level(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes[i].feature >= 0) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

namespace {

double entropy2(double c0, double c1) {
  const double n = c0 + c1;
  double h = 0.0;
  for (double c : {c0, c1}) {
    if (c > 0.0) h -= c / n * std::log2(c / n);
  }
  return h;
}

struct SplitCandidate {
  bool valid = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
  double ratio = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, std::size_t min_leaf, std::size_t max_depth, std::size_t features_per_split,
              Rng* rng)
      : data_(data),
        min_leaf_(std::max<std::size_t>(1, min_leaf)),
        max_depth_(max_depth),
        per_split_(features_per_split),
        rng_(rng) {}

  Tree build(std::vector<std::size_t> indices) {
    Tree t;
    t.nodes.emplace_back();
    grow(t, 0, indices, 0);
    return t;
  }

 private:
  void grow(Tree& t, std::size_t node, std::vector<std::size_t>& idx, std::size_t depth) {
    double c1 = 0.0;
    for (auto i : idx) c1 += data_.labels[i];
    const double c0 = static_cast<double>(idx.size()) - c1;
    t.nodes[node].dist = {c0 / static_cast<double>(idx.size()), c1 / static_cast<double>(idx.size())};
    if (c0 == 0.0 || c1 == 0.0) return;
    if (idx.size() < 2 * min_leaf_) return;
    if (max_depth_ > 0 && depth >= max_depth_) return;

    SplitCandidate best = choose(candidates(), idx, c0, c1);
    if (!best.valid && per_split_ > 0) best = choose(remaining_, idx, c0, c1);
    if (!best.valid) return;

    std::vector<std::size_t> left, right;
    for (auto i : idx) (data_.rows[i][best.feature] <= best.threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();

    const auto l = static_cast<std::int32_t>(t.nodes.size());
    t.nodes.emplace_back();
    t.nodes.emplace_back();
    t.nodes[node].feature = static_cast<int>(best.feature);
    t.nodes[node].threshold = best.threshold;
    t.nodes[node].left = l;
    t.nodes[node].right = l + 1;
    grow(t, static_cast<std::size_t>(l), left, depth + 1);
    grow(t, static_cast<std::size_t>(l) + 1, right, depth + 1);
  }

  // Sampled candidate features for one split, sorted; remaining_ keeps the rest
  // as a fallback when no sampled feature can split the node.
  std::vector<std::size_t> candidates() {
    const std::size_t f = data_.features();
    std::vector<std::size_t> all(f);
    std::iota(all.begin(), all.end(), 0);
    remaining_.clear();
    if (per_split_ == 0 || per_split_ >= f || rng_ == nullptr) return all;
    for (std::size_t j = 0; j < per_split_; ++j) std::swap(all[j], all[j + uniform_index(*rng_, f - j)]);
    remaining_.assign(all.begin() + static_cast<std::ptrdiff_t>(per_split_), all.end());
    all.resize(per_split_);
    std::sort(all.begin(), all.end());
    std::sort(remaining_.begin(), remaining_.end());
    return all;
  }

  SplitCandidate best_threshold(std::size_t f, const std::vector<std::size_t>& idx, double c0, double c1) {
    auto& v = scratch_;
    v.clear();
    for (auto i : idx) v.emplace_back(data_.rows[i][f], data_.labels[i]);
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    const double parent = entropy2(c0, c1);
    const double nm = static_cast<double>(m);
    SplitCandidate best;
    double l0 = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      (v[i].second == 1 ? l1 : l0) += 1.0;
      if (v[i].first == v[i + 1].first) continue;
      const std::size_t nl = i + 1;
      if (nl < min_leaf_ || m - nl < min_leaf_) continue;
      const double wl = static_cast<double>(nl) / nm;
      const double gain = parent - wl * entropy2(l0, l1) - (1.0 - wl) * entropy2(c0 - l0, c1 - l1);
      if (!best.valid || gain > best.gain + 1e-12) {
        double thr = v[i].first + (v[i + 1].first - v[i].first) / 2.0;
        if (!(thr < v[i + 1].first)) thr = v[i].first;
        best = {true, f, thr, gain, gain / entropy2(wl, 1.0 - wl)};
      }
    }
    return best;
  }

  SplitCandidate choose(const std::vector<std::size_t>& features, const std::vector<std::size_t>& idx, double c0,
                        double c1) {
    std::vector<SplitCandidate> found;
    for (auto f : features) {
      auto s = best_threshold(f, idx, c0, c1);
      if (s.valid) found.push_back(s);
    }
    if (found.empty()) return {};
    double avg = 0.0;
    for (const auto& s : found) avg += s.gain;
    avg /= static_cast<double>(found.size());
    SplitCandidate best;
    for (const auto& s : found) {
      if (s.gain < avg - 1e-12) continue;
      if (!best.valid || s.ratio > best.ratio + 1e-12) best = s;
    }
    return best;
  }

  const Dataset& data_;
  std::size_t min_leaf_;
  std::size_t max_depth_;
  std::size_t per_split_;
  Rng* rng_;
  std::vector<std::size_t> remaining_;
  std::vector<std::pair<double, int>> scratch_;
};

void require_trainable(const Dataset& data) {
  data.validate();
  if (data.size() == 0) throw data_error("cannot train on an empty dataset");
}

}  // namespace

namespace {

// z with P(Z > z) = cf for a standard normal, by bisection.
double upper_z(double cf) {
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2.0;
    (0.5 * std::erfc(mid / std::numbers::sqrt2) > cf ? lo : hi) = mid;
  }
  return (lo + hi) / 2.0;
}

// Extra errors on top of e observed among n, from the upper confidence limit
// of the binomial error rate (C4.5).
double added_errors(double n, double e, double cf, double z) {
  if (n <= 0.0) return 0.0;
  if (e < 1.0) {
    const double base = n * (1.0 - std::pow(cf, 1.0 / n));
    return e == 0.0 ? base : base + e * (added_errors(n, 1.0, cf, z) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  const double f = (e + 0.5) / n;
  const double r = (f + z * z / (2.0 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) /
                   (1.0 + z * z / n);
  return r * n - e;
}

}  // namespace

void prune_pessimistic(Tree& tree, const Dataset& data, double confidence) {
  if (!(confidence > 0.0 && confidence <= 0.5)) throw usage_error("pruning confidence must lie in (0, 0.5]");
  auto& nodes = tree.nodes;
  std::vector<double> n(nodes.size(), 0.0);
  for (const auto& row : data.rows) {
    std::size_t i = 0;
    while (true) {
      n[i] += 1.0;
      if (nodes[i].feature < 0) break;
      i = static_cast<std::size_t>(row[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                                                         : nodes[i].right);
    }
  }
  const double z = upper_z(confidence);
  auto leaf_errors = [&](std::size_t i) {
    const double e = n[i] * std::min(nodes[i].dist[0], nodes[i].dist[1]);
    return e + added_errors(n[i], e, confidence, z);
  };
  // Children always follow their parent, so a reverse sweep is bottom-up.
  std::vector<double> subtree(nodes.size(), 0.0);
  for (std::size_t i = nodes.size(); i-- > 0;) {
    auto& node = nodes[i];
    if (node.feature < 0) {
      subtree[i] = leaf_errors(i);
      continue;
    }
    const double below = subtree[static_cast<std::size_t>(node.left)] + subtree[static_cast<std::size_t>(node.right)];
    const double as_leaf = leaf_errors(i);
    if (as_leaf <= below + 0.1) {
      node.feature = -1;
      node.threshold = 0.0;
      node.left = node.right = -1;
      subtree[i] = as_leaf;
    } else {
      subtree[i] = below;
    }
  }
  // Compact in preorder so the parent-before-child layout holds.
  std::vector<TreeNode> kept;
  std::vector<std::pair<std::size_t, std::int32_t>> stack = {{0, -1}};
  while (!stack.empty()) {
    const auto [old, parent] = stack.back();
    stack.pop_back();
    const auto idx = static_cast<std::int32_t>(kept.size());
    kept.push_back(nodes[old]);
    if (parent >= 0) {
      auto& p = kept[static_cast<std::size_t>(parent)];
      (p.left == -2 ? p.left : p.right) = idx;
    }
    auto& cur = kept.back();
    if (cur.feature >= 0) {
      const auto l = static_cast<std::size_t>(cur.left), r = static_cast<std::size_t>(cur.right);
      cur.left = cur.right = -2;
      stack.push_back({r, idx});
      stack.push_back({l, idx});
    }
  }
  nodes = std::move(kept);
}

Model train_decision_tree(const Dataset& data, const TreeParams& params) {
  require_trainable(data);
  Model m;
  m.kind_ = ModelKind::DecisionTree;
  m.names_ = data.names;
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  m.trees_.push_back(TreeBuilder(data, params.min_leaf, params.max_depth, 0, nullptr).build(std::move(idx)));
  if (params.prune) prune_pessimistic(m.trees_.back(), data, params.confidence);
  return m;
}

Model train_random_forest(const Dataset& data, const ForestParams& params) {
  require_trainable(data);
  if (params.n_trees < 1) throw usage_error("a forest needs at least one tree");
  const std::size_t n = data.size();
  const std::size_t per_split =
      params.features_per_split > 0
          ? std::min(params.features_per_split, data.features())
          : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(data.features()))));
  Model m;
  m.kind_ = ModelKind::RandomForest;
  m.names_ = data.names;
  m.trees_.resize(params.n_trees);
  std::vector<std::vector<char>> in_bag(params.n_trees);
  parallel_for(params.n_trees, params.jobs, [&](std::size_t t) {
    Rng rng = make_rng(derive_seed(params.seed, t));
    std::vector<std::size_t> idx(n);
    if (params.bootstrap) {
      in_bag[t].assign(n, 0);
      for (auto& i : idx) {
        i = uniform_index(rng, n);
        in_bag[t][i] = 1;
      }
      std::sort(idx.begin(), idx.end());
    } else {
      std::iota(idx.begin(), idx.end(), 0);
    }
    m.trees_[t] = TreeBuilder(data, params.min_leaf, params.max_depth, per_split, &rng).build(std::move(idx));
  });

  if (params.bootstrap) {
    std::size_t scored = 0, correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double p1 = 0.0;
      std::size_t votes = 0;
      for (std::size_t t = 0; t < params.n_trees; ++t) {
        if (in_bag[t][i]) continue;
        p1 += m.trees_[t].predict(data.rows[i])[1];
        ++votes;
      }
      if (votes == 0) continue;
      ++scored;
      if ((p1 / static_cast<double>(votes) > 0.5 ? 1 : 0) == data.labels[i]) ++correct;
    }
    if (scored > 0) m.oob_accuracy_ = static_cast<double>(correct) / static_cast<double>(scored);
  }
  return m;
}

Model train_naive_bayes(const Dataset& data) {
  require_trainable(data);
  const std::size_t f = data.features();
  std::array<std::size_t, 2> count{0, 0};
  for (int l : data.labels) ++count[static_cast<std::size_t>(l)];
  if (count[0] == 0 || count[1] == 0) throw data_error("naive Bayes needs instances of both classes");
  Model m;
  m.kind_ = ModelKind::NaiveBayes;
  m.names_ = data.names;
  for (std::size_t c = 0; c < 2; ++c) {
    auto& g = m.gaussians_[c];
    g.log_prior = std::log(static_cast<double>(count[c]) / static_cast<double>(data.size()));
    g.mean.assign(f, 0.0);
    g.var.assign(f, 0.0);
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto& g = m.gaussians_[static_cast<std::size_t>(data.labels[i])];
    for (std::size_t j = 0; j < f; ++j) g.mean[j] += data.rows[i][j];
  }
  for (std::size_t c = 0; c < 2; ++c) {
    for (auto& v : m.gaussians_[c].mean) v /= static_cast<double>(count[c]);
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto& g = m.gaussians_[static_cast<std::size_t>(data.labels[i])];
    for (std::size_t j = 0; j < f; ++j) {
      const double d = data.rows[i][j] - g.mean[j];
      g.var[j] += d * d;
    }
  }
  for (std::size_t c = 0; c < 2; ++c) {
    for (auto& v : m.gaussians_[c].var) v = std::max(v / static_cast<double>(count[c]), kVarianceFloor);
  }
  return m;
}

Model train(const ClassifierSpec& spec, const Dataset& data) {
  switch (spec.kind) {
    case ModelKind::NaiveBayes: return train_naive_bayes(data);
    case ModelKind::DecisionTree: return train_decision_tree(data, spec.tree);
    case ModelKind::RandomForest: return train_random_forest(data, spec.forest);
  }
  throw Error(ErrorKind::Internal, "unhandled classifier kind");
}

// Prediction ----------------------------------------------------------------

void Model::require_schema(const std::vector<std::string>& names) const {
  if (names == names_) return;
  throw data_error(fmt::format("instance schema ({} features) differs from the model's training schema ({} features)",
                               names.size(), names_.size()));
}

Distribution Model::predict_proba(const std::vector<double>& x) const {
  if (x.size() != names_.size()) {
    throw data_error(fmt::format("instance has {} features, model expects {}", x.size(), names_.size()));
  }
  if (kind_ == ModelKind::NaiveBayes) {
    std::array<double, 2> lp{};
    for (std::size_t c = 0; c < 2; ++c) {
      const auto& g = gaussians_[c];
      double s = g.log_prior;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = x[j] - g.mean[j];
        s += -0.5 * std::log(2.0 * std::numbers::pi * g.var[j]) - d * d / (2.0 * g.var[j]);
      }
      lp[c] = s;
    }
    const double mx = std::max(lp[0], lp[1]);
    const double e0 = std::exp(lp[0] - mx);
    const double e1 = std::exp(lp[1] - mx);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
  }
  double p1 = 0.0;
  for (const auto& t : trees_) p1 += t.predict(x)[1];
  p1 /= static_cast<double>(trees_.size());
  return {1.0 - p1, p1};
}

std::vector<Distribution> Model::predict_proba(const Dataset& data) const {
  require_schema(data.names);
  std::vector<Distribution> out;
  out.reserve(data.size());
  for (const auto& row : data.rows) out.push_back(predict_proba(row));
  return out;
}

// Persistence ---------------------------------------------------------------

namespace {

constexpr int kFormatVersion = 1;

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += csv::format_double(v[i]);
  }
  return s;
}

class Reader {
 public:
  Reader(std::istream& in, const std::string& source) : in_(in), source_(source) {}

  std::istringstream line(const std::string& expect_key) {
    std::string l;
    while (std::getline(in_, l)) {
      ++line_no_;
      if (!l.empty() && l.back() == '\r') l.pop_back();
      if (l.empty() || l.front() == '#') continue;
      std::istringstream ss(l);
      std::string key;
      ss >> key;
      if (key != expect_key) fail(fmt::format("expected '{}', found '{}'", expect_key, key));
      return ss;
    }
    fail(fmt::format("unexpected end of file, expected '{}'", expect_key));
  }

  std::string raw_line() {
    std::string l;
    if (!std::getline(in_, l)) fail("unexpected end of file");
    ++line_no_;
    if (!l.empty() && l.back() == '\r') l.pop_back();
    return l;
  }

  template <typename T>
  T get(std::istringstream& ss) {
    std::string tok;
    if (!(ss >> tok)) fail("missing value");
    if constexpr (std::is_same_v<T, double>) {
      return csv::parse_double(tok, fmt::format("{}:{}", source_, line_no_));
    } else {
      try {
        return static_cast<T>(std::stoll(tok));
      } catch (const std::exception&) {
        fail(fmt::format("bad integer '{}'", tok));
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw data_error(fmt::format("{}:{}: {}", source_, line_no_, what));
  }

 private:
  std::istream& in_;
  const std::string& source_;
  std::size_t line_no_ = 0;
};

}  // namespace

void Model::save(std::ostream& out, const std::string& header_comment) const {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "acclink-model " << kFormatVersion << '\n';
  out << "kind " << to_string(kind_) << '\n';
  out << "classes NonLinked Linked\n";
  out << "features " << names_.size() << '\n';
  for (const auto& n : names_) out << n << '\n';
  out << "oob_accuracy " << csv::format_double(oob_accuracy_) << '\n';
  if (kind_ == ModelKind::NaiveBayes) {
    for (std::size_t c = 0; c < 2; ++c) {
      const auto& g = gaussians_[c];
      out << "class " << c << ' ' << csv::format_double(g.log_prior) << '\n';
      out << "mean " << join_doubles(g.mean) << '\n';
      out << "var " << join_doubles(g.var) << '\n';
    }
    return;
  }
  out << "trees " << trees_.size() << '\n';
  for (const auto& t : trees_) {
    out << "tree " << t.nodes.size() << '\n';
    for (const auto& n : t.nodes) {
      out << "node " << n.feature << ' ' << csv::format_double(n.threshold) << ' ' << n.left << ' ' << n.right
          << ' ' << csv::format_double(n.dist[0]) << ' ' << csv::format_double(n.dist[1]) << '\n';
    }
  }
}

Model Model::load(std::istream& in, const std::string& source_name) {
  Reader r(in, source_name);
  Model m;
  {
    auto ss = r.line("acclink-model");
    const int version = r.get<int>(ss);
    if (version != kFormatVersion) r.fail(fmt::format("unsupported model format version {}", version));
  }
  {
    auto ss = r.line("kind");
    std::string k;
    ss >> k;
    m.kind_ = parse_model_kind(k);
  }
  r.line("classes");
  {
    auto ss = r.line("features");
    const auto f = r.get<std::size_t>(ss);
    for (std::size_t i = 0; i < f; ++i) m.names_.push_back(r.raw_line());
  }
  {
    auto ss = r.line("oob_accuracy");
    m.oob_accuracy_ = r.get<double>(ss);
  }
  const std::size_t f = m.names_.size();
  auto read_vec = [&](const std::string& key) {
    auto ss = r.line(key);
    std::vector<double> v(f);
    for (auto& x : v) x = r.get<double>(ss);
    return v;
  };
  if (m.kind_ == ModelKind::NaiveBayes) {
    for (std::size_t c = 0; c < 2; ++c) {
      auto ss = r.line("class");
      if (r.get<std::size_t>(ss) != c) r.fail("classes out of order");
      m.gaussians_[c].log_prior = r.get<double>(ss);
      m.gaussians_[c].mean = read_vec("mean");
      m.gaussians_[c].var = read_vec("var");
    }
    return m;
  }
  auto ss = r.line("trees");
  const auto n_trees = r.get<std::size_t>(ss);
  if (n_trees == 0) r.fail("model has no trees");
  m.trees_.resize(n_trees);
  for (auto& t : m.trees_) {
    auto ts = r.line("tree");
    const auto n_nodes = r.get<std::size_t>(ts);
    t.nodes.resize(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k) {
      auto& node = t.nodes[k];
      auto ns = r.line("node");
      node.feature = r.get<int>(ns);
      node.threshold = r.get<double>(ns);
      node.left = r.get<std::int32_t>(ns);
      node.right = r.get<std::int32_t>(ns);
      node.dist[0] = r.get<double>(ns);
      node.dist[1] = r.get<double>(ns);
      if (node.feature >= static_cast<int>(f)) r.fail("node feature index out of range");
      if (node.feature >= 0 && (static_cast<std::size_t>(std::min(node.left, node.right)) <= k ||
                                static_cast<std::size_t>(std::max(node.left, node.right)) >= n_nodes)) {
        r.fail("node child index out of range");
      }
    }
    if (n_nodes == 0) r.fail("empty tree");
  }
  return m;
}

}  // namespace acclink::learners
