#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "acclink/error.hpp"
#include "acclink/learners.hpp"

using namespace acclink;
using namespace acclink::learners;

namespace {

Dataset xor_data(int copies) {
  Dataset d;
  d.names = {"a", "b"};
  for (int r = 0; r < copies; ++r)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        d.rows.push_back({double(a), double(b)});
        d.labels.push_back(a ^ b);
      }
  return d;
}

Dataset blobs(std::uint64_t seed, int n, double sep) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Dataset d;
  d.names = {"x", "y", "c"};
  for (int i = 0; i < n; ++i) {
    const int y = i % 3 == 0;
    d.rows.push_back({z(rng) + sep * y, z(rng) - sep * y, 1.0});
    d.labels.push_back(y);
  }
  return d;
}

double accuracy(const Model& m, const Dataset& d) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.size(); ++i) ok += (m.predict_proba(d.rows[i])[1] > 0.5) == (d.labels[i] == 1);
  return static_cast<double>(ok) / static_cast<double>(d.size());
}

double log_normal(double x, double mu, double var) {
  return -0.5 * std::log(2 * std::numbers::pi * var) - (x - mu) * (x - mu) / (2 * var);
}

}  // namespace

TEST_CASE("naive Bayes") {
  const auto d = blobs(1, 600, 5.0);
  const auto m = train_naive_bayes(d);
  CHECK(accuracy(m, d) >= 0.95);

  // Posterior equals Bayes' rule on the fitted Gaussian parameters.
  const auto& g = m.gaussians();
  for (std::size_t i = 0; i < 20; ++i) {
    double l[2];
    for (int c = 0; c < 2; ++c) {
      l[c] = g[c].log_prior;
      for (std::size_t f = 0; f < 3; ++f) l[c] += log_normal(d.rows[i][f], g[c].mean[f], g[c].var[f]);
    }
    const double p1 = 1.0 / (1.0 + std::exp(l[0] - l[1]));
    CHECK(m.predict_proba(d.rows[i])[1] == doctest::Approx(p1).epsilon(1e-9));
  }
  // The constant feature carries the same floored variance in both classes.
  CHECK(g[0].var[2] == kVarianceFloor);
  CHECK(g[1].var[2] == kVarianceFloor);

  Dataset tiny{{"x"}, {{0.0}, {1.0}}, {0, 1}};
  const auto t = train_naive_bayes(tiny);
  const auto p = t.predict_proba({0.5});
  CHECK(p[0] + p[1] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.5));

  Dataset single{{"x"}, {{0.0}, {1.0}}, {0, 0}};
  CHECK_THROWS_AS(train_naive_bayes(single), Error);
}

TEST_CASE("decision tree") {
  Dataset sep{{"x"}, {{1}, {2}, {3}, {4}, {5}, {6}}, {0, 0, 0, 1, 1, 1}};
  const auto s = train_decision_tree(sep);
  CHECK(s.trees().front().depth() == 1);
  CHECK(accuracy(s, sep) == 1.0);

  Dataset pure{{"x"}, {{1}, {2}, {3}}, {1, 1, 1}};
  const auto p = train_decision_tree(pure);
  CHECK(p.trees().front().nodes.size() == 1);
  CHECK(p.predict_proba({7.0}) == Distribution{0.0, 1.0});

  TreeParams leaf1;
  leaf1.min_leaf = 1;
  const auto x = train_decision_tree(xor_data(1), leaf1);
  CHECK(x.trees().front().depth() == 2);
  CHECK(accuracy(x, xor_data(1)) == 1.0);
  CHECK(accuracy(train_decision_tree(xor_data(5)), xor_data(1)) == 1.0);

  TreeParams shallow;
  shallow.max_depth = 1;
  CHECK(train_decision_tree(xor_data(5), shallow).trees().front().depth() <= 1);
}

TEST_CASE("pessimistic pruning") {
  // Noisy labels on one informative feature: the unpruned tree memorises the
  // noise, pruning folds most of it back.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u;
  Dataset d;
  d.names = {"x", "junk"};
  for (int i = 0; i < 400; ++i) {
    const double x = u(rng);
    d.rows.push_back({x, u(rng)});
    d.labels.push_back((x > 0.5) != (u(rng) < 0.15) ? 1 : 0);
  }
  TreeParams full;
  full.min_leaf = 1;
  TreeParams pruned = full;
  pruned.prune = true;
  const auto a = train_decision_tree(d, full);
  const auto b = train_decision_tree(d, pruned);
  CHECK(b.trees().front().nodes.size() < a.trees().front().nodes.size());
  const auto& nodes = b.trees().front().nodes;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].feature < 0) continue;
    CHECK(static_cast<std::size_t>(nodes[i].left) > i);
    CHECK(static_cast<std::size_t>(nodes[i].right) < nodes.size());
  }
  CHECK(nodes.front().feature == 0);
  std::stringstream ss;
  b.save(ss);
  CHECK(Model::load(ss, "mem").predict_proba(d) == b.predict_proba(d));

  // A clean separable split survives pruning.
  Dataset sep{{"x"}, {}, {}};
  for (int i = 0; i < 40; ++i) {
    sep.rows.push_back({double(i)});
    sep.labels.push_back(i >= 20);
  }
  CHECK(train_decision_tree(sep, pruned).trees().front().depth() == 1);
}

TEST_CASE("random forest") {
  const auto train = blobs(2, 400, 1.5), test = blobs(3, 200, 1.5);
  ForestParams fp;
  fp.n_trees = 30;
  fp.seed = 9;
  const auto a = train_random_forest(train, fp);
  const auto b = train_random_forest(train, fp);
  CHECK(a == b);
  CHECK(a.predict_proba(test) == b.predict_proba(test));
  CHECK(a.oob_accuracy() > 0.5);
  fp.jobs = 3;
  CHECK(train_random_forest(train, fp) == a);

  ForestParams single;
  single.n_trees = 1;
  single.features_per_split = train.features();
  single.bootstrap = false;
  single.min_leaf = 2;
  const auto f = train_random_forest(train, single);
  const auto t = train_decision_tree(train, TreeParams{2, 0});
  CHECK(f.trees().front() == t.trees().front());
}

TEST_CASE("distributions are normalised") {
  const auto d = blobs(4, 200, 1.0);
  for (const auto& m : {train_naive_bayes(d), train_decision_tree(d), train_random_forest(d, ForestParams{10})}) {
    for (const auto& p : m.predict_proba(d)) {
      CHECK(p[0] + p[1] == doctest::Approx(1.0));
      CHECK(p[0] >= 0.0);
      CHECK(p[1] >= 0.0);
    }
  }
}

TEST_CASE("model persistence") {
  const auto d = blobs(5, 150, 2.0);
  ForestParams fp;
  fp.n_trees = 5;
  for (const auto& m : {train_naive_bayes(d), train_decision_tree(d), train_random_forest(d, fp)}) {
    std::stringstream ss;
    m.save(ss);
    const auto back = Model::load(ss, "mem");
    CHECK(back.kind() == m.kind());
    CHECK(back.predict_proba(d) == m.predict_proba(d));
  }
  std::istringstream bad("acclink-model 1\nkind decision_tree\n");
  CHECK_THROWS_AS(Model::load(bad, "mem"), Error);
  const auto m = train_naive_bayes(d);
  CHECK_THROWS_AS(m.predict_proba(std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS(m.require_schema({"x", "y", "other"}), Error);
}

TEST_CASE("model kind names") {
  CHECK(parse_model_kind("rf") == ModelKind::RandomForest);
  CHECK(parse_model_kind("j48") == ModelKind::DecisionTree);
  CHECK(parse_model_kind("naive_bayes") == ModelKind::NaiveBayes);
  CHECK_THROWS_AS(parse_model_kind("svm"), Error);
}
