#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "acclink/groundtruth.hpp"
#include "acclink/textfeat.hpp"

namespace acclink::pairmodel {

using textfeat::Category;
using textfeat::FeatureVector;

/// Elementwise |a_i - b_i|. Both vectors must share category and schema.
std::vector<double> abs_diff(const FeatureVector& a, const FeatureVector& b);

/// Per-feature min-max scaling to [0, 1], fitted over all accounts of a dataset.
/// Constant features map to 0.
class MinMaxScaler {
 public:
  static MinMaxScaler fit(const std::vector<FeatureVector>& vectors);

  FeatureVector apply(const FeatureVector& v) const;
  const std::vector<double>& mins() const { return min_; }
  const std::vector<double>& maxs() const { return max_; }

 private:
  Category category_ = Category::Activity;
  std::vector<std::string> names_;
  std::vector<double> min_, max_;
};

enum class SimilarityMetric { Cosine, Euclidean, Manhattan };

SimilarityMetric parse_similarity_metric(const std::string& name);
std::string to_string(SimilarityMetric m);

/// Cosine (0 when either side is all-zero), 1 - euclidean/sqrt(n), or
/// 1 - manhattan/n, over min-max scaled vectors.
double category_similarity(const std::vector<double>& a, const std::vector<double>& b,
                           SimilarityMetric metric);

// Edit distance -------------------------------------------------------------

/// Levenshtein distance over Unicode scalar values.
std::size_t levenshtein(std::string_view s, std::string_view t);
std::size_t levenshtein(const std::u32string& s, const std::u32string& t);

enum class EditMode { Normalized, Raw };

EditMode parse_edit_mode(const std::string& name);
std::string to_string(EditMode m);

struct EditOptions {
  EditMode mode = EditMode::Normalized;
  /// Upper bound on post pairs compared; 0 compares the full cross product.
  std::size_t sample_cap = 0;
  std::uint64_t seed = 0;
};

struct FlaggedScore {
  double value = 0.0;
  bool flagged = false;

  bool operator==(const FlaggedScore&) const = default;
};

/// Mean edit distance over all pairs of posts of two accounts, each distance
/// divided by the longer post's length in Normalized mode. Empty posts are
/// dropped; if a side ends up empty the score is 0 and flagged.
FlaggedScore edit_similarity(const std::vector<std::string>& posts_a,
                             const std::vector<std::string>& posts_b, const EditOptions& options = {});
FlaggedScore edit_similarity(const std::vector<std::u32string>& posts_a,
                             const std::vector<std::u32string>& posts_b, const EditOptions& options = {});

// Embeddings ----------------------------------------------------------------

inline constexpr std::size_t kMinEmbeddingDim = 50;
inline constexpr std::size_t kMaxEmbeddingDim = 300;

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dimension);

  /// Text format: optional "count dimension" header, then "token v1 ... vD"
  /// per line. Leading '#' comment lines are skipped.
  static EmbeddingTable load(const std::filesystem::path& path);
  static EmbeddingTable parse(std::istream& in, const std::string& source_name);

  void add(const std::string& token, std::vector<double> vector);
  const std::vector<double>* find(const std::string& token) const;
  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

  /// Writes the table with a count/dimension header, tokens sorted.
  void write(std::ostream& out, const std::string& header_comment = "") const;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Vocabulary lookups lower-case each token and strip surrounding punctuation.
std::vector<std::string> embedding_tokens(std::string_view normalized_text);

struct SemanticCenter {
  std::vector<double> center;
  bool flagged = false;  // no post had an in-vocabulary token
};

/// Mean over posts of the mean in-vocabulary word vector. Posts without any
/// known token are skipped.
SemanticCenter semantic_center(const std::vector<std::string>& normalized_posts, const EmbeddingTable& emb);

/// Cosine of two centers; 0 when either is the zero vector.
double semantic_similarity(const std::vector<double>& a, const std::vector<double>& b);

// Methods and pair assembly ------------------------------------------------

enum class MethodId {
  ActivityAbs,
  LinguisticAbs,
  NetworkAbs,
  AllAbs,
  ActivityAbsEditsSem,
  LinguisticAbsEditsSem,
  NetworkAbsEditsSem,
  AllAbsEditsSem,
  AllSim,
  AllSimAllAbs,
  AllSimAllAbsEditsSem,
};

/// All eleven methods in their canonical order.
const std::vector<MethodId>& all_methods();
std::string to_string(MethodId m);
MethodId parse_method(const std::string& name);

struct MethodBlocks {
  bool sim = false;
  std::vector<Category> abs;
  bool edits_sem = false;
};

MethodBlocks blocks_of(MethodId m);

/// Per-account evidence for every category, plus min-max scalers fitted over
/// all stored accounts.
class FeatureStore {
 public:
  struct Account {
    FeatureVector activity;
    FeatureVector linguistic;
    FeatureVector network;

    const FeatureVector& get(Category c) const;
  };

  void add(const std::string& account, Account features);
  bool contains(const std::string& account) const { return accounts_.count(account) > 0; }
  const Account& account(const std::string& id) const;
  const std::map<std::string, Account>& accounts() const { return accounts_; }

  /// Fits one scaler per category; call after the last add.
  void fit_scalers();
  const MinMaxScaler& scaler(Category c) const;

 private:
  std::map<std::string, Account> accounts_;
  std::vector<MinMaxScaler> scalers_;
};

struct TextScores {
  FlaggedScore edits;
  FlaggedScore sem;
};

struct AssemblyOptions {
  SimilarityMetric metric = SimilarityMetric::Cosine;
  /// Feature names dropped from every block, e.g. {"triangles", "clustering"}.
  std::vector<std::string> exclude;
};

struct PairInstance {
  groundtruth::LabeledPair pair;
  MethodId method = MethodId::ActivityAbs;
  std::vector<std::string> names;
  std::vector<double> values;

  bool operator==(const PairInstance&) const = default;
};

/// Feature names a method produces, in block order: similarities, absolute
/// differences (activity, linguistic, network), then edits and sem.
std::vector<std::string> method_feature_names(MethodId m, const AssemblyOptions& options);

/// `text` is required for +edits+sem methods.
PairInstance assemble_pair(const groundtruth::LabeledPair& pair, MethodId method, const FeatureStore& store,
                           const TextScores* text, const AssemblyOptions& options);

/// CSV with account_a, account_b, one column per feature, label.
void write_pair_csv(const std::vector<PairInstance>& rows, MethodId method,
                    const std::vector<std::string>& names, std::ostream& out,
                    const std::string& header_comment = "");

struct PairTable {
  std::vector<std::string> comments;
  std::vector<std::string> names;
  std::vector<groundtruth::LabeledPair> pairs;
  std::vector<std::vector<double>> values;
};

PairTable read_pair_csv(std::istream& in, const std::string& source_name);

}  // namespace acclink::pairmodel
