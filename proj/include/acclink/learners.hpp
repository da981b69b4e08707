#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace acclink::learners {

/// Binary classification data. Label 1 is the positive (linked) class.
struct Dataset {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;

  std::size_t size() const { return rows.size(); }
  std::size_t features() const { return names.size(); }
  /// Checks row widths, labels in {0, 1} and finite values.
  void validate() const;
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

using Distribution = std::array<double, 2>;  // P(label 0), P(label 1)

enum class ModelKind { NaiveBayes, DecisionTree, RandomForest };

std::string to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& name);

struct TreeParams {
  std::size_t min_leaf = 2;
  std::size_t max_depth = 0;  // 0: unbounded
  bool prune = false;         // C4.5 pessimistic subtree replacement
  double confidence = 0.25;   // pruning confidence factor, in (0, 0.5]
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 0;           // 0: unbounded
  std::size_t features_per_split = 0;  // 0: ceil(sqrt(F))
  std::size_t min_leaf = 1;
  bool bootstrap = true;               // false trains every tree on the full data
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  Distribution dist{0.0, 0.0};

  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const Distribution& predict(const std::vector<double>& x) const;
  std::size_t depth() const;
  bool operator==(const Tree&) const = default;
};

/// Replaces subtrees whose pessimistic error estimate on the training rows is
/// no better than a single leaf's. Orphaned nodes are dropped.
void prune_pessimistic(Tree& tree, const Dataset& data, double confidence);

struct GaussianClass {
  double log_prior = 0.0;
  std::vector<double> mean;
  std::vector<double> var;

  bool operator==(const GaussianClass&) const = default;
};

inline constexpr double kVarianceFloor = 1e-9;

/// Immutable trained classifier bound to the feature schema it was trained on.
class Model {
 public:
  ModelKind kind() const { return kind_; }
  const std::vector<std::string>& feature_names() const { return names_; }
  const std::vector<Tree>& trees() const { return trees_; }
  const std::array<GaussianClass, 2>& gaussians() const { return gaussians_; }
  /// Out-of-bag accuracy of a bootstrapped forest; negative when not available.
  double oob_accuracy() const { return oob_accuracy_; }

  /// Throws a data error unless `names` equals the training schema.
  void require_schema(const std::vector<std::string>& names) const;
  Distribution predict_proba(const std::vector<double>& x) const;
  std::vector<Distribution> predict_proba(const Dataset& data) const;

  void save(std::ostream& out, const std::string& header_comment = "") const;
  static Model load(std::istream& in, const std::string& source_name);

  bool operator==(const Model&) const = default;

 private:
  friend Model train_naive_bayes(const Dataset&);
  friend Model train_decision_tree(const Dataset&, const TreeParams&);
  friend Model train_random_forest(const Dataset&, const ForestParams&);

  ModelKind kind_ = ModelKind::NaiveBayes;
  std::vector<std::string> names_;
  std::array<GaussianClass, 2> gaussians_;
  std::vector<Tree> trees_;
  double oob_accuracy_ = -1.0;
};

Model train_naive_bayes(const Dataset& data);
Model train_decision_tree(const Dataset& data, const TreeParams& params = {});
Model train_random_forest(const Dataset& data, const ForestParams& params = {});

struct ClassifierSpec {
  ModelKind kind = ModelKind::RandomForest;
  TreeParams tree;
  ForestParams forest;
};

/// Display name used in reports, e.g. "RandomForest".
std::string display_name(ModelKind k);

Model train(const ClassifierSpec& spec, const Dataset& data);

}  // namespace acclink::learners
