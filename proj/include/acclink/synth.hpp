#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acclink/corpus.hpp"

namespace acclink::corpus {

struct SynthParams {
  std::size_t n_users = 200;
  std::size_t min_posts = 20;
  std::size_t max_posts = 60;
  std::uint64_t style_seed = 1;  // drives each user's latent style and the vocabulary
  std::uint64_t seed = 2;        // drives the posts drawn from those styles
};

/// Generates a corpus in which every user writes, posts and interacts according
/// to a latent per-user style. Posts carry sentence annotations. The result is a
/// pure function of the two seeds.
Corpus generate_synthetic_corpus(const SynthParams& params);

struct WordVector {
  std::string word;
  std::vector<double> values;
};

/// Embeddings for the synthetic vocabulary: words of the same topic cluster
/// around a shared direction.
std::vector<WordVector> synthetic_embeddings(std::uint64_t style_seed, std::size_t dim = 50);

}  // namespace acclink::corpus
