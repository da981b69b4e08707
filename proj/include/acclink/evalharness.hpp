#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "acclink/learners.hpp"

namespace acclink::eval {

/// k disjoint folds of instance indices; every class is dealt round-robin
/// after a seeded shuffle, so per-fold class counts differ by at most one.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, std::size_t k,
                                                       std::uint64_t seed);

/// Mann-Whitney AUC with midranks for ties. `labels` are 0/1.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  Confusion& operator+=(const Confusion& o);
};

/// Predicts label 1 when P(1) > 0.5.
Confusion confusion(const std::vector<double>& p1, const std::vector<int>& labels);

struct Metrics {
  double accuracy = 0.0;
  double auc = 0.0;
  double precision = 0.0;  // class-support weighted
  double recall = 0.0;     // class-support weighted
};

/// Weighted precision and recall from a confusion matrix. A class with no
/// predictions contributes precision 0.
Metrics metrics_from(const Confusion& c);

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {"accuracy", "auc", "precision", "recall"};
  return names;
}

/// Something that can be fitted and then scores instances with P(label 1).
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual void fit(const learners::Dataset& train) = 0;
  virtual std::vector<double> score(const learners::Dataset& test) const = 0;
};

using PredictorFactory = std::function<std::unique_ptr<Predictor>()>;

/// Wraps an in-repo classifier.
PredictorFactory classifier_factory(const learners::ClassifierSpec& spec);

enum class Averaging { PerFold, Pooled };

Averaging parse_averaging(const std::string& name);
std::string to_string(Averaging a);

struct CvOptions {
  std::size_t repeats = 5;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  Averaging averaging = Averaging::PerFold;
  std::size_t jobs = 1;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

struct CvResult {
  std::vector<Metrics> per_fold;        // repeats * folds, repeat-major
  std::vector<Confusion> fold_confusion;
  std::vector<std::uint64_t> fold_seeds;  // one per repeat
  Metrics pooled;                       // from concatenated predictions of all folds
  std::vector<Summary> summary;         // one per metric_names() entry

  const Summary& of(const std::string& metric) const;
};

/// Repeated stratified k-fold cross validation; repeat r shuffles with
/// derive_seed(seed, r).
CvResult repeated_cv(const learners::Dataset& data, const PredictorFactory& factory, const CvOptions& options);

struct ReportRow {
  std::string method_id;
  std::string classifier;
  std::string metric;
  double mean = 0.0;
  double std = 0.0;
  std::size_t repeats = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
};

/// Rows for one (method, classifier) cell; metrics as percentages.
std::vector<ReportRow> report_rows(const std::string& method_id, const std::string& classifier, const CvResult& r,
                                   const CvOptions& options);

void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out, const std::string& header_comment = "");
std::vector<ReportRow> read_report_csv(std::istream& in, const std::string& source_name);

/// Wide comparison table: one row per method in first-seen order, columns per
/// classifier and metric. The best mean in each column is marked.
struct ComparisonTable {
  std::vector<std::string> methods;
  std::vector<std::string> classifiers;
  // values[method][classifier * 4 + metric]; NaN when the cell is missing
  std::vector<std::vector<double>> values;
  std::vector<std::vector<bool>> best;
};

ComparisonTable summarize(const std::vector<ReportRow>& rows);
void write_summary_csv(const ComparisonTable& t, std::ostream& out, const std::string& header_comment = "");
std::string format_table(const ComparisonTable& t);

}  // namespace acclink::eval
