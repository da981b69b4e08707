#include "acclink/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "acclink/csv.hpp"
#include "acclink/error.hpp"
#include "acclink/parallel.hpp"
#include "acclink/random.hpp"

namespace acclink::eval {

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, std::size_t k,
                                                       std::uint64_t seed) {
  if (k < 2) throw usage_error("cross validation needs k >= 2 folds");
  std::vector<std::vector<std::size_t>> by_class(2);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw data_error(fmt::format("instance {} has label {}", i, labels[i]));
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  for (std::size_t c = 0; c < 2; ++c) {
    if (by_class[c].size() < k) {
      throw data_error(fmt::format("class {} has {} instances, fewer than k={} folds", c, by_class[c].size(), k));
    }
  }
  Rng rng = make_rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t next = 0;
  // Minority class first so its remainder lands on the first folds.
  const std::size_t first = by_class[1].size() <= by_class[0].size() ? 1 : 0;
  for (std::size_t c : {first, 1 - first}) {
    auto& members = by_class[c];
    shuffle(rng, members);
    for (auto i : members) {
      folds[next].push_back(i);
      next = (next + 1) % k;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw data_error("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos = 0.0, neg = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i) + static_cast<double>(j) + 1.0) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) {
        rank_sum += midrank;
        pos += 1.0;
      } else {
        neg += 1.0;
      }
    }
    i = j;
  }
  if (pos == 0.0 || neg == 0.0) throw data_error("AUC needs both classes present");
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

Confusion& Confusion::operator+=(const Confusion& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

Confusion confusion(const std::vector<double>& p1, const std::vector<int>& labels) {
  Confusion c;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    const bool predicted = p1[i] > 0.5;
    if (labels[i] == 1) {
      (predicted ? c.tp : c.fn) += 1;
    } else {
      (predicted ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

Metrics metrics_from(const Confusion& c) {
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  const double n = tp + fp + tn + fn;
  const double w1 = ratio(tp + fn, n), w0 = ratio(tn + fp, n);
  Metrics m;
  m.accuracy = ratio(tp + tn, n);
  m.precision = w1 * ratio(tp, tp + fp) + w0 * ratio(tn, tn + fn);
  m.recall = w1 * ratio(tp, tp + fn) + w0 * ratio(tn, tn + fp);
  return m;
}

namespace {

class ClassifierPredictor : public Predictor {
 public:
  explicit ClassifierPredictor(learners::ClassifierSpec spec) : spec_(std::move(spec)) {}

  void fit(const learners::Dataset& train) override { model_ = learners::train(spec_, train); }

  std::vector<double> score(const learners::Dataset& test) const override {
    std::vector<double> out;
    for (const auto& d : model_.predict_proba(test)) out.push_back(d[1]);
    return out;
  }

 private:
  learners::ClassifierSpec spec_;
  learners::Model model_;
};

Summary summarize_values(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(v.size()));
  return s;
}

double metric_value(const Metrics& m, std::size_t i) {
  switch (i) {
    case 0: return m.accuracy;
    case 1: return m.auc;
    case 2: return m.precision;
    default: return m.recall;
  }
}

}  // namespace

PredictorFactory classifier_factory(const learners::ClassifierSpec& spec) {
  return [spec] { return std::make_unique<ClassifierPredictor>(spec); };
}

Averaging parse_averaging(const std::string& name) {
  if (name == "per_fold" || name == "fold") return Averaging::PerFold;
  if (name == "pooled") return Averaging::Pooled;
  throw usage_error(fmt::format("unknown averaging '{}' (per_fold, pooled)", name));
}

std::string to_string(Averaging a) { return a == Averaging::PerFold ? "per_fold" : "pooled"; }

const Summary& CvResult::of(const std::string& metric) const {
  const auto& names = metric_names();
  const auto it = std::find(names.begin(), names.end(), metric);
  if (it == names.end()) throw usage_error(fmt::format("unknown metric '{}'", metric));
  return summary.at(static_cast<std::size_t>(it - names.begin()));
}

CvResult repeated_cv(const learners::Dataset& data, const PredictorFactory& factory, const CvOptions& options) {
  data.validate();
  if (options.repeats < 1) throw usage_error("cross validation needs at least one repeat");
  CvResult result;
  std::vector<std::vector<std::vector<std::size_t>>> assignments;
  for (std::size_t r = 0; r < options.repeats; ++r) {
    result.fold_seeds.push_back(derive_seed(options.seed, r));
    assignments.push_back(stratified_folds(data.labels, options.folds, result.fold_seeds.back()));
  }
  const std::size_t total = options.repeats * options.folds;
  std::vector<std::vector<double>> fold_scores(total);
  result.per_fold.resize(total);
  result.fold_confusion.resize(total);

  parallel_for(total, options.jobs, [&](std::size_t e) {
    const auto& folds = assignments[e / options.folds];
    const std::size_t held = e % options.folds;
    std::vector<std::size_t> train_idx;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      if (f != held) train_idx.insert(train_idx.end(), folds[f].begin(), folds[f].end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    const auto train = data.subset(train_idx);
    const auto test = data.subset(folds[held]);
    auto predictor = factory();
    predictor->fit(train);
    auto scores = predictor->score(test);
    if (scores.size() != test.size()) throw Error(ErrorKind::Internal, "predictor returned a wrong score count");
    result.fold_confusion[e] = confusion(scores, test.labels);
    result.per_fold[e] = metrics_from(result.fold_confusion[e]);
    result.per_fold[e].auc = roc_auc(scores, test.labels);
    fold_scores[e] = std::move(scores);
  });

  auto pooled_over = [&](std::size_t begin, std::size_t end) {
    std::vector<double> s;
    std::vector<int> l;
    Confusion c;
    for (std::size_t e = begin; e < end; ++e) {
      const auto& fold = assignments[e / options.folds][e % options.folds];
      s.insert(s.end(), fold_scores[e].begin(), fold_scores[e].end());
      for (auto i : fold) l.push_back(data.labels[i]);
      c += result.fold_confusion[e];
    }
    Metrics m = metrics_from(c);
    m.auc = roc_auc(s, l);
    return m;
  };
  result.pooled = pooled_over(0, total);

  std::vector<Metrics> units;
  if (options.averaging == Averaging::PerFold) {
    units = result.per_fold;
  } else {
    for (std::size_t r = 0; r < options.repeats; ++r) {
      units.push_back(pooled_over(r * options.folds, (r + 1) * options.folds));
    }
  }
  for (std::size_t i = 0; i < metric_names().size(); ++i) {
    std::vector<double> v;
    for (const auto& m : units) v.push_back(metric_value(m, i));
    result.summary.push_back(summarize_values(v));
  }
  return result;
}

std::vector<ReportRow> report_rows(const std::string& method_id, const std::string& classifier, const CvResult& r,
                                   const CvOptions& options) {
  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < metric_names().size(); ++i) {
    rows.push_back({method_id, classifier, metric_names()[i], 100.0 * r.summary[i].mean, 100.0 * r.summary[i].std,
                    options.repeats, options.folds, options.seed});
  }
  return rows;
}

namespace {

std::string fixed(double v) { return fmt::format("{:.4f}", v); }

}  // namespace

void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out, const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "method_id,classifier,metric,mean,std,repeats,k,seed\n";
  for (const auto& r : rows) {
    out << csv::join({r.method_id, r.classifier, r.metric, fixed(r.mean), fixed(r.std), std::to_string(r.repeats),
                      std::to_string(r.k), std::to_string(r.seed)})
        << '\n';
  }
}

std::vector<ReportRow> read_report_csv(std::istream& in, const std::string& source_name) {
  const auto t = csv::read_table(in, source_name);
  const auto im = t.column("method_id"), ic = t.column("classifier"), imet = t.column("metric");
  const auto imean = t.column("mean"), istd = t.column("std"), ir = t.column("repeats"), ik = t.column("k"),
             is = t.column("seed");
  std::vector<ReportRow> rows;
  for (const auto& row : t.rows) {
    try {
      rows.push_back({row[im], row[ic], row[imet], csv::parse_double(row[imean], source_name),
                      csv::parse_double(row[istd], source_name), std::stoul(row[ir]), std::stoul(row[ik]),
                      std::stoull(row[is])});
    } catch (const std::logic_error&) {
      throw data_error(fmt::format("{}: malformed report row", source_name));
    }
  }
  return rows;
}

ComparisonTable summarize(const std::vector<ReportRow>& rows) {
  ComparisonTable t;
  auto index_in = [](std::vector<std::string>& list, const std::string& v) {
    auto it = std::find(list.begin(), list.end(), v);
    if (it != list.end()) return static_cast<std::size_t>(it - list.begin());
    list.push_back(v);
    return list.size() - 1;
  };
  for (const auto& r : rows) {
    index_in(t.methods, r.method_id);
    index_in(t.classifiers, r.classifier);
  }
  const std::size_t nm = metric_names().size();
  const std::size_t cols = t.classifiers.size() * nm;
  t.values.assign(t.methods.size(), std::vector<double>(cols, std::numeric_limits<double>::quiet_NaN()));
  t.best.assign(t.methods.size(), std::vector<bool>(cols, false));
  for (const auto& r : rows) {
    const auto mi = index_in(t.methods, r.method_id);
    const auto ci = index_in(t.classifiers, r.classifier);
    const auto& names = metric_names();
    const auto it = std::find(names.begin(), names.end(), r.metric);
    if (it == names.end()) continue;
    t.values[mi][ci * nm + static_cast<std::size_t>(it - names.begin())] = r.mean;
  }
  for (std::size_t c = 0; c < cols; ++c) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& row : t.values) {
      if (!std::isnan(row[c])) best = std::max(best, row[c]);
    }
    for (std::size_t m = 0; m < t.methods.size(); ++m) t.best[m][c] = t.values[m][c] == best;
  }
  return t;
}

void write_summary_csv(const ComparisonTable& t, std::ostream& out, const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  std::vector<std::string> header = {"method_id"};
  for (const auto& c : t.classifiers) {
    for (const auto& m : metric_names()) {
      header.push_back(c + "_" + m);
      header.push_back(c + "_" + m + "_best");
    }
  }
  out << csv::join(header) << '\n';
  for (std::size_t m = 0; m < t.methods.size(); ++m) {
    std::vector<std::string> fields = {t.methods[m]};
    for (std::size_t c = 0; c < t.values[m].size(); ++c) {
      fields.push_back(std::isnan(t.values[m][c]) ? "" : fixed(t.values[m][c]));
      fields.push_back(t.best[m][c] ? "1" : "0");
    }
    out << csv::join(fields) << '\n';
  }
}

std::string format_table(const ComparisonTable& t) {
  static const std::vector<std::string> short_names = {"Acc", "AUC", "Prec", "Rec"};
  std::size_t width = 6;
  for (const auto& m : t.methods) width = std::max(width, m.size());
  std::string s = fmt::format("{:<{}}", "method", width);
  for (const auto& c : t.classifiers) {
    for (const auto& m : short_names) s += fmt::format(" {:>9}", c.substr(0, 4) + ":" + m);
  }
  s += '\n';
  for (std::size_t m = 0; m < t.methods.size(); ++m) {
    s += fmt::format("{:<{}}", t.methods[m], width);
    for (std::size_t c = 0; c < t.values[m].size(); ++c) {
      if (std::isnan(t.values[m][c])) {
        s += fmt::format(" {:>9}", "-");
      } else {
        s += fmt::format(" {:>8.2f}{}", t.values[m][c], t.best[m][c] ? '*' : ' ');
      }
    }
    s += '\n';
  }
  s += "* best value in the column\n";
  return s;
}

}  // namespace acclink::eval
