#include "acclink/groundtruth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "acclink/csv.hpp"
#include "acclink/error.hpp"
#include "acclink/random.hpp"

namespace acclink::groundtruth {

using corpus::Corpus;
using corpus::Post;

SplitMode parse_split_mode(const std::string& name) {
  if (name == "random" || name == "Random") return SplitMode::Random;
  if (name == "interleave" || name == "Interleave") return SplitMode::Interleave;
  throw usage_error(fmt::format("unknown split mode '{}' (expected random or interleave)", name));
}

std::string to_string(SplitMode mode) { return mode == SplitMode::Random ? "random" : "interleave"; }

std::string to_string(Label label) { return label == Label::Linked ? "Linked" : "NonLinked"; }

std::size_t SplitPlan::ratio_step() const {
  return static_cast<std::size_t>(std::llround((1.0 - linked_ratio) / linked_ratio));
}

std::size_t SplitPlan::nonlinked_target() const {
  return std::min(nonlinked_multiplier * ratio_step() * users, users * (users - 1));
}

void SplitPlan::validate() const {
  if (users < 2) throw usage_error("ground truth needs X >= 2 source users");
  if (!(linked_ratio > 0.0 && linked_ratio < 1.0)) {
    throw usage_error("linked_ratio must lie strictly between 0 and 1");
  }
  if (nonlinked_multiplier < 1) throw usage_error("non-linked multiplier k must be >= 1");
  const std::size_t step = ratio_step() * users;
  const std::size_t universe = users * (users - 1);
  // The last admissible k is the first one whose request reaches the universe.
  const std::size_t k_cap = (universe + step - 1) / step;
  if (nonlinked_multiplier > k_cap) {
    throw usage_error(fmt::format("non-linked multiplier k={} exceeds the cap step k={} for X={}",
                                  nonlinked_multiplier, k_cap, users));
  }
}

Corpus filter_min_posts(const Corpus& corpus, std::size_t min_posts) {
  std::vector<Post> kept;
  for (const auto& [author, posts] : corpus.authors()) {
    if (posts.size() >= min_posts) kept.insert(kept.end(), posts.begin(), posts.end());
  }
  return Corpus::from_posts(std::move(kept), corpus.language(), corpus.provenance());
}

std::size_t post_count_stratum(std::size_t n_posts) {
  if (n_posts < 10) return 0;
  if (n_posts > 60) return 11;
  if (n_posts == 60) return 10;
  return 1 + (n_posts - 10) / 5;
}

std::vector<std::size_t> proportional_allocation(const std::vector<std::size_t>& stratum_sizes,
                                                 std::size_t total) {
  const std::size_t population = std::accumulate(stratum_sizes.begin(), stratum_sizes.end(), std::size_t{0});
  std::vector<std::size_t> alloc(stratum_sizes.size(), 0);
  if (population == 0 || total == 0) return alloc;
  // Integer arithmetic: quota_i = total * size_i / population, remainder kept exact.
  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder, stratum)
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < stratum_sizes.size(); ++i) {
    const std::size_t num = total * stratum_sizes[i];
    alloc[i] = num / population;
    assigned += alloc[i];
    remainders.emplace_back(num % population, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < total; ++r, ++assigned) ++alloc[remainders[r].second];
  return alloc;
}

std::vector<std::string> stratified_sample(const Corpus& corpus, std::size_t users, std::uint64_t seed) {
  if (corpus.author_count() < users) {
    throw data_error(fmt::format("cannot sample {} users from a population of {}", users,
                                 corpus.author_count()));
  }
  std::vector<std::vector<std::string>> strata(12);
  for (const auto& [author, posts] : corpus.authors()) {
    strata[post_count_stratum(posts.size())].push_back(author);
  }
  std::vector<std::size_t> sizes;
  for (const auto& s : strata) sizes.push_back(s.size());
  const auto alloc = proportional_allocation(sizes, users);

  std::vector<std::string> selected;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    auto& group = strata[i];
    Rng rng = make_rng(derive_seed(seed, i));
    // Partial Fisher-Yates: the first alloc[i] slots form a uniform sample.
    for (std::size_t j = 0; j < alloc[i]; ++j) {
      std::swap(group[j], group[j + uniform_index(rng, group.size() - j)]);
      selected.push_back(group[j]);
    }
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

std::pair<std::vector<Post>, std::vector<Post>> split_account(const std::vector<Post>& posts,
                                                              SplitMode mode, std::uint64_t seed) {
  if (posts.size() < 2) {
    throw data_error(fmt::format("cannot split an account with {} post(s)", posts.size()));
  }
  std::vector<std::size_t> order(posts.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Post> a, b;
  if (mode == SplitMode::Random) {
    Rng rng = make_rng(seed);
    shuffle(rng, order);
    const std::size_t n_a = (posts.size() + 1) / 2;
    for (std::size_t i = 0; i < order.size(); ++i) (i < n_a ? a : b).push_back(posts[order[i]]);
  } else {
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (posts[x].timestamp != posts[y].timestamp) return posts[x].timestamp < posts[y].timestamp;
      return posts[x].post_id < posts[y].post_id;
    });
    for (std::size_t i = 0; i < order.size(); ++i) (i % 2 == 0 ? a : b).push_back(posts[order[i]]);
  }
  auto by_time = [](const Post& x, const Post& y) {
    if (x.timestamp != y.timestamp) return x.timestamp < y.timestamp;
    return x.post_id < y.post_id;
  };
  std::sort(a.begin(), a.end(), by_time);
  std::sort(b.begin(), b.end(), by_time);
  return {std::move(a), std::move(b)};
}

std::string half_a(const std::string& source_id) { return source_id + "a"; }
std::string half_b(const std::string& source_id) { return source_id + "b"; }

std::vector<LabeledPair> build_pair_universe(const std::vector<std::string>& a_accounts,
                                             const std::vector<std::string>& b_accounts) {
  if (a_accounts.size() != b_accounts.size()) {
    throw data_error(fmt::format("account halves differ in size ({} vs {})", a_accounts.size(),
                                 b_accounts.size()));
  }
  const std::size_t x = a_accounts.size();
  std::vector<LabeledPair> pairs;
  pairs.reserve(x * x);
  for (std::size_t i = 0; i < x; ++i) {
    for (std::size_t j = 0; j < x; ++j) {
      pairs.push_back({a_accounts[i], b_accounts[j], i == j ? Label::Linked : Label::NonLinked});
    }
  }
  return pairs;
}

std::vector<LabeledPair> sample_dataset(const std::vector<LabeledPair>& universe, const SplitPlan& plan) {
  std::vector<std::size_t> nonlinked;
  std::vector<LabeledPair> out;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    if (universe[i].label == Label::Linked) {
      out.push_back(universe[i]);
    } else {
      nonlinked.push_back(i);
    }
  }
  const std::size_t target = std::min(plan.nonlinked_multiplier * plan.ratio_step() * out.size(),
                                      nonlinked.size());
  Rng rng = make_rng(derive_seed(plan.seed, "nonlinked"));
  for (std::size_t j = 0; j < target; ++j) {
    std::swap(nonlinked[j], nonlinked[j + uniform_index(rng, nonlinked.size() - j)]);
  }
  nonlinked.resize(target);
  std::sort(nonlinked.begin(), nonlinked.end());
  for (std::size_t idx : nonlinked) out.push_back(universe[idx]);
  return out;
}

GroundTruth build_ground_truth(const Corpus& corpus, const SplitPlan& plan, std::size_t min_posts) {
  plan.validate();
  const Corpus eligible = filter_min_posts(corpus, min_posts);
  GroundTruth gt;
  gt.sources = stratified_sample(eligible, plan.users, derive_seed(plan.seed, "stratified"));

  std::vector<Post> posts;
  std::vector<std::string> a_ids, b_ids;
  std::size_t next_source = 0;
  for (const auto& [author, list] : corpus.authors()) {
    if (next_source < gt.sources.size() && gt.sources[next_source] == author) {
      ++next_source;
      auto [a, b] = split_account(list, plan.mode, derive_seed(plan.seed, "split:" + author));
      for (auto& p : a) p.author_id = half_a(author);
      for (auto& p : b) p.author_id = half_b(author);
      posts.insert(posts.end(), std::make_move_iterator(a.begin()), std::make_move_iterator(a.end()));
      posts.insert(posts.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
      a_ids.push_back(half_a(author));
      b_ids.push_back(half_b(author));
    } else {
      posts.insert(posts.end(), list.begin(), list.end());
    }
  }
  gt.split_corpus = Corpus::from_posts(std::move(posts), corpus.language(), corpus.provenance());
  gt.pairs = sample_dataset(build_pair_universe(a_ids, b_ids), plan);
  return gt;
}

void write_pairs_csv(const std::vector<LabeledPair>& pairs, std::ostream& out,
                     const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "account_a,account_b,label\n";
  for (const auto& p : pairs) {
    out << csv::join({p.account_a, p.account_b, to_string(p.label)}) << '\n';
  }
}

std::vector<LabeledPair> read_pairs_csv(std::istream& in, const std::string& source_name) {
  const auto table = csv::read_table(in, source_name);
  if (table.header.empty()) throw data_error(fmt::format("{}: empty pair file", source_name));
  const auto ia = table.column("account_a");
  const auto ib = table.column("account_b");
  const auto il = table.column("label");
  std::vector<LabeledPair> pairs;
  for (const auto& row : table.rows) {
    LabeledPair p{row[ia], row[ib], Label::NonLinked};
    if (row[il] == "Linked") {
      p.label = Label::Linked;
    } else if (row[il] != "NonLinked") {
      throw data_error(fmt::format("{}: unknown label '{}'", source_name, row[il]));
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace acclink::groundtruth
