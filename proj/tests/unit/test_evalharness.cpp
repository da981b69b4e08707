#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "acclink/error.hpp"
#include "acclink/evalharness.hpp"

using namespace acclink;
using namespace acclink::eval;

namespace {

std::vector<int> labels_10_90(std::size_t pos, std::size_t neg) {
  std::vector<int> y(pos, 1);
  y.insert(y.end(), neg, 0);
  return y;
}

class Leak : public Predictor {
 public:
  void fit(const learners::Dataset&) override {}
  std::vector<double> score(const learners::Dataset& t) const override {
    std::vector<double> s;
    for (const auto& r : t.rows) s.push_back(r[0]);
    return s;
  }
};

class Majority : public Predictor {
 public:
  void fit(const learners::Dataset&) override {}
  std::vector<double> score(const learners::Dataset& t) const override { return std::vector<double>(t.size(), 0.0); }
};

// Fraction of positive-negative pairs ordered correctly, ties counting half.
double pair_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double good = 0, total = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        total += 1;
        good += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return good / total;
}

learners::Dataset leak_data(std::size_t pos, std::size_t neg) {
  learners::Dataset d;
  d.names = {"y"};
  d.labels = labels_10_90(pos, neg);
  for (int y : d.labels) d.rows.push_back({double(y)});
  return d;
}

}  // namespace

TEST_CASE("stratified folds") {
  const auto y = labels_10_90(200, 1800);
  const auto folds = stratified_folds(y, 10, 1);
  REQUIRE(folds.size() == 10);
  std::vector<int> seen(y.size(), 0);
  for (const auto& f : folds) {
    std::size_t pos = 0;
    for (auto i : f) {
      pos += y[i];
      ++seen[i];
    }
    CHECK(pos == 20);
    CHECK(f.size() - pos == 180);
    CHECK(std::is_sorted(f.begin(), f.end()));
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  CHECK(stratified_folds(y, 10, 1) == folds);
  CHECK(stratified_folds(y, 10, 2) != folds);
  CHECK_THROWS_AS(stratified_folds(labels_10_90(3, 50), 10, 1), Error);
  CHECK_THROWS_AS(stratified_folds(y, 1, 1), Error);
}

TEST_CASE("roc_auc") {
  CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == 1.0);
  CHECK(roc_auc({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}) == 0.5);
  // Positive-negative pairs ranked correctly: (.9,.8) (.9,.1) (.2,.1), not (.2,.8).
  CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {1, 0, 1, 0}) == pair_auc({0.9, 0.8, 0.2, 0.1}, {1, 0, 1, 0}));
  CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {1, 0, 1, 0}) == 0.75);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> coarse(0, 5);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> s(40);
    std::vector<int> y(40);
    for (std::size_t j = 0; j < s.size(); ++j) {
      s[j] = coarse(rng) / 5.0;
      y[j] = j % 4 == 0 ? 1 : 0;
    }
    CHECK(roc_auc(s, y) == doctest::Approx(pair_auc(s, y)).epsilon(1e-12));
  }
  CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {0, 0, 1, 1}) == 0.0);
  CHECK_THROWS_AS(roc_auc({0.1, 0.2}, {1, 1}), Error);
}

TEST_CASE("metrics from a confusion matrix") {
  const auto all_major = metrics_from(confusion(std::vector<double>(100, 0.0), labels_10_90(10, 90)));
  CHECK(all_major.accuracy == doctest::Approx(0.9));
  CHECK(all_major.recall == doctest::Approx(0.9));
  CHECK(all_major.precision == doctest::Approx(0.81));
  Confusion c{5, 5, 85, 5};
  const auto m = metrics_from(c);
  CHECK(m.accuracy == doctest::Approx(0.9));
  // class 1: P = 0.5, R = 0.5, support 10; class 0: P = 85/90, R = 85/90, support 90
  CHECK(m.precision == doctest::Approx(0.1 * 0.5 + 0.9 * 85.0 / 90.0));
}

TEST_CASE("repeated cross validation") {
  const auto d = leak_data(200, 1800);
  CvOptions opt;
  opt.seed = 3;
  const auto leak = repeated_cv(d, [] { return std::make_unique<Leak>(); }, opt);
  CHECK(leak.per_fold.size() == 50);
  for (const auto& m : metric_names()) CHECK(leak.of(m).mean == doctest::Approx(1.0));
  const auto maj = repeated_cv(d, [] { return std::make_unique<Majority>(); }, opt);
  CHECK(maj.of("accuracy").mean == doctest::Approx(0.9).epsilon(1e-3));
  CHECK(maj.of("auc").mean == doctest::Approx(0.5));

  learners::ClassifierSpec spec;
  spec.kind = learners::ModelKind::DecisionTree;
  CvOptions small;
  small.repeats = 2;
  small.folds = 5;
  small.seed = 4;
  const auto a = repeated_cv(d, classifier_factory(spec), small);
  small.jobs = 3;
  const auto b = repeated_cv(d, classifier_factory(spec), small);
  CHECK(a.of("auc").mean == b.of("auc").mean);
  CHECK(a.fold_seeds == b.fold_seeds);

  small.averaging = Averaging::Pooled;
  const auto pooled = repeated_cv(d, [] { return std::make_unique<Leak>(); }, small);
  CHECK(pooled.of("auc").mean == doctest::Approx(1.0));
}

TEST_CASE("report and summary") {
  const auto d = leak_data(20, 180);
  CvOptions opt;
  opt.repeats = 1;
  opt.folds = 5;
  const auto r = repeated_cv(d, [] { return std::make_unique<Majority>(); }, opt);
  auto rows = report_rows("Activity_abs", "NaiveBayes", r, opt);
  CHECK(rows.size() == metric_names().size());
  CHECK(rows[0].mean == doctest::Approx(90.0));

  std::ostringstream out;
  write_report_csv(rows, out);
  std::istringstream in(out.str());
  const auto back = read_report_csv(in, "mem");
  REQUIRE(back.size() == rows.size());
  CHECK(back[0].method_id == "Activity_abs");

  const auto one = summarize(back);
  CHECK(one.methods.size() == 1);

  auto better = rows;
  for (auto& row : better) {
    row.method_id = "All_sim";
    row.mean += 1.0;
  }
  auto both = back;
  both.insert(both.end(), better.begin(), better.end());
  const auto table = summarize(both);
  REQUIRE(table.methods.size() == 2);
  for (std::size_t c = 0; c < table.best[1].size(); ++c) {
    CHECK(table.best[1][c]);
    CHECK_FALSE(table.best[0][c]);
  }
  std::ostringstream s1, s2;
  write_summary_csv(table, s1);
  write_summary_csv(summarize(both), s2);
  CHECK(s1.str() == s2.str());
  CHECK(format_table(table).find('*') != std::string::npos);
}
