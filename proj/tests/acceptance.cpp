// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
// Usage: acclink_acceptance [work_dir]

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "acclink/config.hpp"
#include "acclink/evalharness.hpp"
#include "acclink/groundtruth.hpp"
#include "acclink/learners.hpp"
#include "acclink/netgraph.hpp"
#include "acclink/pairmodel.hpp"
#include "acclink/pipeline.hpp"
#include "acclink/random.hpp"
#include "acclink/statsel.hpp"
#include "acclink/synth.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace acclink;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void run(const std::string& name, double budget_s, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = Clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  const double elapsed = seconds_since(t0);
  if (budget_s > 0 && elapsed > budget_s) c.expect(false, fmt::format("runtime {:.1f}s over budget {:.0f}s", elapsed, budget_s));
  if (!c.ok) ++failures;
  fmt::print("{} {} ({:.2f}s){}{}\n", c.ok ? "PASS" : "FAIL", name, elapsed, c.detail.empty() ? "" : ": ", c.detail);
  std::fflush(stdout);
}

netgraph::ConversationGraph to_graph(const oracle::DenseGraph& d) {
  netgraph::ConversationGraph g;
  for (std::size_t i = 0; i < d.n; ++i) g.add_node("n" + std::to_string(i));
  for (std::size_t u = 0; u < d.n; ++u)
    for (std::size_t v = 0; v < d.n; ++v)
      if (d.w[u][v] > 0) g.add_edge("n" + std::to_string(u), "n" + std::to_string(v), d.w[u][v]);
  return g;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

void levenshtein_oracle(Check& c) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 1000; ++i) {
    const auto s = oracle::random_string(rng, 40);
    const auto t = oracle::random_string(rng, 40);
    const std::size_t want = oracle::levenshtein(s, t);
    c.expect(pairmodel::levenshtein(s, t) == want, fmt::format("pair {} (u32) differs", i));
    c.expect(pairmodel::levenshtein(oracle::to_utf8(s), oracle::to_utf8(t)) == want,
             fmt::format("pair {} (utf-8) differs", i));
  }
}

void graph_oracle(Check& c) {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> size(1, 50);
  std::uniform_real_distribution<double> density(0.02, 0.3);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const auto d = oracle::random_graph(rng, size(rng), density(rng), true);
    const auto g = to_graph(d);

    const auto tri = netgraph::triangles_and_clustering(g);
    c.expect(tri.triangles == oracle::triangles(d), fmt::format("graph {} triangles", i));
    c.expect(max_abs_diff(tri.clustering, oracle::clustering(d)) < 1e-12, fmt::format("graph {} clustering", i));

    const auto pr = netgraph::pagerank(g);
    c.expect(std::fabs(std::accumulate(pr.begin(), pr.end(), 0.0) - 1.0) <= 1e-9, fmt::format("graph {} PageRank sum", i));
    const double e_pr = max_abs_diff(pr, oracle::pagerank(d));
    const double e_ev = max_abs_diff(netgraph::eigenvector_centrality(g), oracle::eigenvector(d));
    const auto h = netgraph::hits(g);
    const auto [hub, auth] = oracle::hits(d);
    const double e_hits = std::max(max_abs_diff(h.hub, hub), max_abs_diff(h.authority, auth));
    c.expect(e_pr <= 1e-6, fmt::format("graph {} PageRank off by {:.2e}", i, e_pr));
    c.expect(e_ev <= 1e-6, fmt::format("graph {} eigenvector off by {:.2e}", i, e_ev));
    c.expect(e_hits <= 1e-6, fmt::format("graph {} HITS off by {:.2e}", i, e_hits));
    worst = std::max({worst, e_pr, e_ev, e_hits});
  }
  // Sparse graphs with dangling and isolated nodes for the metrics that are
  // defined there without a convergence caveat.
  for (int i = 0; i < 50; ++i) {
    const auto d = oracle::random_graph(rng, size(rng), 0.03, false);
    const auto g = to_graph(d);
    c.expect(netgraph::triangles_and_clustering(g).triangles == oracle::triangles(d), fmt::format("sparse {} triangles", i));
    const auto pr = netgraph::pagerank(g);
    c.expect(std::fabs(std::accumulate(pr.begin(), pr.end(), 0.0) - 1.0) <= 1e-9, fmt::format("sparse {} PageRank sum", i));
    const double e = max_abs_diff(pr, oracle::pagerank(d));
    c.expect(e <= 1e-6, fmt::format("sparse {} PageRank off by {:.2e}", i, e));
    worst = std::max(worst, e);
  }
  if (c.ok) c.detail = fmt::format("max deviation {:.2e}", worst);
}

void ks_oracle(Check& c) {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> len(1, 100);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_int_distribution<int> small(0, 6);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> a(len(rng)), b(len(rng));
    const bool ties = i % 2 == 1;  // half the pairs draw from a tiny integer support
    const double shift = (i % 5) * 0.25;
    for (auto& v : a) v = ties ? small(rng) : z(rng);
    for (auto& v : b) v = ties ? small(rng) + (i % 3 == 0 ? 1 : 0) : z(rng) + shift;
    const double d = statsel::ks_two_sample(a, b).d;
    c.expect(std::fabs(d - oracle::ks_d(a, b)) <= 1e-12, fmt::format("pair {} D={} oracle={}", i, d, oracle::ks_d(a, b)));
    auto perm = a;
    std::shuffle(perm.begin(), perm.end(), rng);
    c.expect(statsel::ks_two_sample(a, perm).d == 0.0, fmt::format("pair {} identical multiset D != 0", i));
    std::vector<double> far(b.size());
    const double top = *std::max_element(a.begin(), a.end());
    for (std::size_t j = 0; j < b.size(); ++j) far[j] = top + 1.0 + std::fabs(b[j]);
    c.expect(statsel::ks_two_sample(a, far).d == 1.0, fmt::format("pair {} disjoint supports D != 1", i));
  }
}

std::vector<std::string> names(const std::string& prefix, std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(fmt::format("{}{:03}", prefix, i));
  return v;
}

void groundtruth_counts(Check& c) {
  auto count = [](const std::vector<groundtruth::LabeledPair>& pairs, groundtruth::Label l) {
    return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [&](auto& p) { return p.label == l; }));
  };
  using groundtruth::Label;
  const auto universe = groundtruth::build_pair_universe(names("a", 200), names("b", 200));
  c.expect(count(universe, Label::Linked) == 200, "universe linked count");
  c.expect(count(universe, Label::NonLinked) == 39800, fmt::format("universe has {} non-linked", count(universe, Label::NonLinked)));

  corpus::SynthParams sp;
  sp.n_users = 220;
  const auto corpus = corpus::generate_synthetic_corpus(sp);
  groundtruth::SplitPlan plan;
  plan.users = 200;
  plan.nonlinked_multiplier = 1;
  plan.seed = 5;
  const auto gt = groundtruth::build_ground_truth(corpus, plan);
  c.expect(gt.sources.size() == 200, "sources != 200");
  c.expect(count(gt.pairs, Label::Linked) == 200, fmt::format("k=1 linked {}", count(gt.pairs, Label::Linked)));
  c.expect(count(gt.pairs, Label::NonLinked) == 1800, fmt::format("k=1 non-linked {}", count(gt.pairs, Label::NonLinked)));

  // Cap step: the first k whose request Z = 9*k*200 reaches the universe.
  plan.nonlinked_multiplier = (39800 + 1800 - 1) / 1800;
  const auto capped = groundtruth::sample_dataset(universe, plan);
  c.expect(count(capped, Label::Linked) == 200, "cap step linked count");
  c.expect(count(capped, Label::NonLinked) == 39800, fmt::format("cap step k={} gives {} non-linked", plan.nonlinked_multiplier, count(capped, Label::NonLinked)));
  plan.nonlinked_multiplier += 1;
  bool rejected = false;
  try {
    plan.validate();
  } catch (const Error&) {
    rejected = true;
  }
  c.expect(rejected, "k past the cap step accepted");
}

class LabelLeak : public eval::Predictor {
 public:
  void fit(const learners::Dataset&) override {}
  std::vector<double> score(const learners::Dataset& test) const override {
    std::vector<double> s;
    for (const auto& r : test.rows) s.push_back(r[0]);
    return s;
  }
};

class ConstantMajority : public eval::Predictor {
 public:
  void fit(const learners::Dataset&) override {}
  std::vector<double> score(const learners::Dataset& test) const override { return std::vector<double>(test.size(), 0.0); }
};

learners::Dataset leak_dataset() {
  learners::Dataset d;
  d.names = {"leak", "noise"};
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u;
  for (int i = 0; i < 2000; ++i) {
    const int y = i < 200 ? 1 : 0;
    d.rows.push_back({static_cast<double>(y), u(rng)});
    d.labels.push_back(y);
  }
  return d;
}

void cv_protocol(Check& c) {
  const auto data = leak_dataset();
  eval::CvOptions opt;
  opt.seed = 9;
  c.expect(opt.repeats == 5 && opt.folds == 10, "default protocol is not 5 x 10");
  for (std::size_t r = 0; r < opt.repeats; ++r) {
    const auto folds = eval::stratified_folds(data.labels, opt.folds, derive_seed(opt.seed, r));
    c.expect(folds.size() == 10, "fold count");
    std::vector<int> seen(data.size(), 0);
    for (const auto& f : folds) {
      std::size_t pos = 0;
      for (auto i : f) {
        pos += data.labels[i];
        ++seen[i];
      }
      const double expected = 0.1 * static_cast<double>(f.size());
      c.expect(std::fabs(static_cast<double>(pos) - expected) <= 1.0, fmt::format("fold with {} of {} linked", pos, f.size()));
    }
    c.expect(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }), "folds do not partition the data");
  }

  const auto leak = eval::repeated_cv(data, [] { return std::make_unique<LabelLeak>(); }, opt);
  for (const auto& m : eval::metric_names()) {
    c.expect(std::fabs(leak.of(m).mean - 1.0) < 1e-12, fmt::format("label leak {} = {}", m, leak.of(m).mean));
  }
  const auto major = eval::repeated_cv(data, [] { return std::make_unique<ConstantMajority>(); }, opt);
  c.expect(std::fabs(major.of("accuracy").mean - 0.90) <= 0.001, fmt::format("majority accuracy {}", major.of("accuracy").mean));
  c.expect(std::fabs(major.of("auc").mean - 0.5) <= 0.001, fmt::format("majority AUC {}", major.of("auc").mean));
}

void classifier_sanity(Check& c) {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  learners::Dataset lin;
  lin.names = {"x", "y"};
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng), y = u(rng);
    lin.rows.push_back({x, y});
    lin.labels.push_back(x + y > 1.0 ? 1 : 0);
  }
  std::vector<std::size_t> train_idx(1500), test_idx(500);
  std::iota(train_idx.begin(), train_idx.end(), 0);
  std::iota(test_idx.begin(), test_idx.end(), 1500);
  learners::ForestParams fp;
  fp.n_trees = 100;
  fp.max_depth = 0;
  fp.seed = 11;
  const auto forest = learners::train_random_forest(lin.subset(train_idx), fp);
  const auto test = lin.subset(test_idx);
  std::vector<double> p;
  for (const auto& d : forest.predict_proba(test)) p.push_back(d[1]);
  const double auc = eval::roc_auc(p, test.labels);
  c.expect(auc >= 0.95, fmt::format("forest held-out AUC {:.4f}", auc));

  learners::Dataset x;
  x.names = {"a", "b"};
  for (int rep = 0; rep < 10; ++rep)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        x.rows.push_back({static_cast<double>(a), static_cast<double>(b)});
        x.labels.push_back(a ^ b);
      }
  for (std::size_t min_leaf : {1, 2}) {
    learners::TreeParams tp;
    tp.min_leaf = min_leaf;
    const auto tree = learners::train_decision_tree(x, tp);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto d = tree.predict_proba(x.rows[i]);
      correct += (d[1] > 0.5 ? 1 : 0) == x.labels[i] ? 1 : 0;
    }
    c.expect(correct == x.size(), fmt::format("tree (min_leaf {}) gets {}/{} on XOR", min_leaf, correct, x.size()));
    c.expect(tree.trees().front().depth() == 2, fmt::format("XOR tree depth {}", tree.trees().front().depth()));
  }

  learners::Dataset g;
  g.names = {"x"};
  std::normal_distribution<double> z(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const int y = i % 2;
    g.rows.push_back({(y ? 3.0 : -3.0) + z(rng)});
    g.labels.push_back(y);
  }
  const auto nb = learners::train_naive_bayes(g);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < g.size(); ++i) correct += (nb.predict_proba(g.rows[i])[1] > 0.5 ? 1 : 0) == g.labels[i];
  const double acc = static_cast<double>(correct) / static_cast<double>(g.size());
  c.expect(acc >= 0.95, fmt::format("naive Bayes accuracy {:.3f}", acc));
  if (c.ok) c.detail = fmt::format("forest AUC {:.4f}, NB accuracy {:.3f}", auc, acc);
}

pipeline::RunConfig e2e_config(const fs::path& out) {
  pipeline::RunConfig cfg;
  cfg.set("run.out", out.string());
  cfg.set("run.seed", "7");
  cfg.set("synth.users", "200");
  cfg.set("synth.min_posts", "20");
  cfg.set("synth.max_posts", "60");
  cfg.set("groundtruth.users", "200");
  cfg.set("methods.ids", "Activity_abs,All_abs+edits+sem");
  cfg.set("classifiers.ids", "random_forest");
  cfg.set("classifiers.forest_trees", "100");
  return cfg;
}

void run_pipeline(const pipeline::RunConfig& cfg) {
  using pipeline::Stage;
  for (Stage s : {Stage::Synth, Stage::GroundTruth, Stage::Extract, Stage::Pair, Stage::Evaluate, Stage::Report}) {
    pipeline::run_stage(s, cfg);
  }
}

double report_value(const fs::path& report, const std::string& method, const std::string& metric) {
  std::ifstream in(report);
  for (const auto& r : eval::read_report_csv(in, report.string())) {
    if (r.method_id == method && r.metric == metric) return r.mean;
  }
  throw std::runtime_error("no " + metric + " row for " + method);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void end_to_end(Check& c, const fs::path& out) {
  fs::remove_all(out);
  run_pipeline(e2e_config(out));
  const double full = report_value(out / "report.csv", "All_abs+edits+sem", "auc") / 100.0;
  const double base = report_value(out / "report.csv", "Activity_abs", "auc") / 100.0;
  c.expect(full >= 0.85, fmt::format("All_abs+edits+sem AUC {:.4f}", full));
  c.expect(full > base, fmt::format("All_abs+edits+sem AUC {:.4f} does not beat Activity_abs {:.4f}", full, base));
  if (c.ok) c.detail = fmt::format("All_abs+edits+sem AUC {:.4f} vs Activity_abs {:.4f}", full, base);
}

void determinism(Check& c, const fs::path& first, const fs::path& second) {
  if (!fs::exists(first / "report.csv")) run_pipeline(e2e_config(first));
  fs::remove_all(second);
  run_pipeline(e2e_config(second));
  for (const char* f : {"report.csv", "summary.csv"}) {
    c.expect(slurp(first / f) == slurp(second / f), std::string(f) + " differs between runs");
  }
  c.expect(slurp(first / "pairs" / "All_abs+edits+sem.csv") == slurp(second / "pairs" / "All_abs+edits+sem.csv"),
           "pair table differs between runs");
}

void feature_analysis(Check& c) {
  std::vector<int> labels(1000, 0);
  std::fill(labels.begin(), labels.begin() + 100, 1);
  const std::vector<double> constant(1000, 3.5);
  c.expect(statsel::information_gain(constant, labels, 10) == 0.0, "constant feature IG != 0");
  std::vector<double> perfect(labels.begin(), labels.end());
  const double h = -0.1 * std::log2(0.1) - 0.9 * std::log2(0.9);
  const double ig = statsel::information_gain(perfect, labels, 10);
  c.expect(std::fabs(ig - h) <= 1e-6, fmt::format("perfect feature IG {} vs {}", ig, h));
  c.expect(std::fabs(oracle::entropy(labels) - h) <= 1e-12, "entropy oracle disagrees with closed form");

  const double alpha = statsel::kDefaultAlpha;
  std::mt19937_64 rng(606);
  std::normal_distribution<double> z(0.0, 1.0);
  std::size_t false_keeps = 0, disjoint_drops = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    statsel::ClassSamples s;
    s.names = {"same", "disjoint"};
    s.values.assign(2, {});
    for (int i = 0; i < 200; ++i) {
      const int y = i < 20 ? 1 : 0;
      s.labels.push_back(y);
      s.values[0].push_back(z(rng));
      s.values[1].push_back(y ? 10.0 + std::fabs(z(rng)) : -std::fabs(z(rng)));
    }
    const auto r = statsel::ks_filter(s, alpha);
    false_keeps += r.report[0].kept ? 1 : 0;
    disjoint_drops += r.report[1].kept ? 0 : 1;
    c.expect(r.report[1].result.d == 1.0, "disjoint feature D != 1");
  }
  const double rate = static_cast<double>(false_keeps) / trials;
  c.expect(disjoint_drops == 0, fmt::format("disjoint feature dropped {} times", disjoint_drops));
  c.expect(rate <= 5 * alpha, fmt::format("false-keep rate {:.3f} > {:.3f}", rate, 5 * alpha));
  if (c.ok) c.detail = fmt::format("false-keep rate {:.3f} (limit {:.3f})", rate, 5 * alpha);
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "acclink_acceptance";
  fs::create_directories(work);

  run("oracle-levenshtein: 1000 random Unicode pairs match the DP matrix", 5, levenshtein_oracle);
  run("oracle-graph: triangles exact, PageRank/eigenvector/HITS within 1e-6, PageRank sums to 1", 30, graph_oracle);
  run("oracle-ks: D matches brute-force ECDF gap, identical -> 0, disjoint -> 1", 0, ks_oracle);
  run("groundtruth-counts: X=200 gives 200/1800, universe 39800, cap step 39800", 0, groundtruth_counts);
  run("cv-protocol: 5x10 stratified folds, label leak 1.0, constant majority 0.90/0.5", 0, cv_protocol);
  run("classifier-sanity: forest AUC >= 0.95, tree XOR, naive Bayes >= 95%", 60, classifier_sanity);
  run("end-to-end: All_abs+edits+sem with forest AUC >= 0.85 and above Activity_abs", 600,
      [&](Check& c) { end_to_end(c, work / "run1"); });
  run("determinism: identical config and seeds give byte-identical report CSVs", 0,
      [&](Check& c) { determinism(c, work / "run1", work / "run2"); });
  run("feature-analysis: IG constant 0, IG perfect = H(0.1), KS filter false-keep <= 5 alpha", 0, feature_analysis);

  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
