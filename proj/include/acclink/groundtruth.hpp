#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "acclink/corpus.hpp"

namespace acclink::groundtruth {

enum class SplitMode { Random, Interleave };

SplitMode parse_split_mode(const std::string& name);
std::string to_string(SplitMode mode);

struct SplitPlan {
  std::size_t users = 200;  // X: sampled source users
  SplitMode mode = SplitMode::Random;
  double linked_ratio = 0.10;
  std::size_t nonlinked_multiplier = 1;  // k, with Z = k * ratio_step * X
  std::uint64_t seed = 0;

  /// Non-linked pairs per linked pair at k = 1 (9 for a 10% linked ratio).
  std::size_t ratio_step() const;
  /// Number of non-linked pairs requested, capped at X * (X - 1).
  std::size_t nonlinked_target() const;
  /// Throws a usage error for X < 2, k < 1, a ratio outside (0, 1), or k past the
  /// first step that reaches the full pair universe.
  void validate() const;
};

enum class Label { NonLinked = 0, Linked = 1 };

std::string to_string(Label label);

struct LabeledPair {
  std::string account_a;
  std::string account_b;
  Label label = Label::NonLinked;

  bool operator==(const LabeledPair&) const = default;
};

inline constexpr std::size_t kMinPostsDefault = 10;

corpus::Corpus filter_min_posts(const corpus::Corpus& corpus, std::size_t min_posts = kMinPostsDefault);

/// Stratum of an author by post count: 10-14, 15-19, ..., 55-60, then >60.
/// Counts below 10 fall into stratum 0.
std::size_t post_count_stratum(std::size_t n_posts);

/// Largest-remainder proportional allocation of `total` draws over strata.
std::vector<std::size_t> proportional_allocation(const std::vector<std::size_t>& stratum_sizes,
                                                 std::size_t total);

/// Samples exactly X authors, proportionally from each post-count stratum.
std::vector<std::string> stratified_sample(const corpus::Corpus& corpus, std::size_t users,
                                           std::uint64_t seed);

/// Splits one account's posts into halves a and b. The a half gets the extra
/// post when the count is odd. Interleave ties on timestamp break by post_id.
std::pair<std::vector<corpus::Post>, std::vector<corpus::Post>> split_account(
    const std::vector<corpus::Post>& posts, SplitMode mode, std::uint64_t seed);

std::string half_a(const std::string& source_id);
std::string half_b(const std::string& source_id);

/// X linked pairs (a_i, b_i) and X * (X - 1) non-linked pairs (a_i, b_j), i != j.
std::vector<LabeledPair> build_pair_universe(const std::vector<std::string>& a_accounts,
                                             const std::vector<std::string>& b_accounts);

/// Keeps every linked pair and a uniform sample of the non-linked ones.
std::vector<LabeledPair> sample_dataset(const std::vector<LabeledPair>& universe, const SplitPlan& plan);

struct GroundTruth {
  corpus::Corpus split_corpus;          // sampled users replaced by their halves
  std::vector<std::string> sources;     // sampled source users, in sample order
  std::vector<LabeledPair> pairs;
};

/// Full procedure: filter, stratified sample, split, build and sample pairs.
GroundTruth build_ground_truth(const corpus::Corpus& corpus, const SplitPlan& plan,
                               std::size_t min_posts = kMinPostsDefault);

void write_pairs_csv(const std::vector<LabeledPair>& pairs, std::ostream& out,
                     const std::string& header_comment = "");
std::vector<LabeledPair> read_pairs_csv(std::istream& in, const std::string& source_name);

}  // namespace acclink::groundtruth
