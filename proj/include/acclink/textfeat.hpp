#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "acclink/corpus.hpp"

namespace acclink::textfeat {

enum class Category { Activity, Linguistic, Network };

std::string to_string(Category c);

/// Named real vector in a fixed schema order.
struct FeatureVector {
  Category category = Category::Activity;
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double at(std::string_view name) const;  // throws on unknown name
  void append(const FeatureVector& other);

  bool operator==(const FeatureVector&) const = default;
};

/// Full published key list for a category.
const std::vector<std::string>& schema(Category c);

// Lexicons ------------------------------------------------------------------

/// One word list. Entries are lower-cased; multi-word entries ("in fact") match
/// as consecutive words.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(const std::vector<std::string>& entries);

  bool contains(std::string_view lower_word) const { return words_.count(std::string(lower_word)) > 0; }
  /// Number of (possibly multi-word) entry occurrences in a lower-cased word sequence.
  std::size_t count_matches(const std::vector<std::string>& lower_words) const;
  std::size_t size() const { return words_.size() + phrases_.size(); }

 private:
  std::set<std::string> words_;
  std::vector<std::vector<std::string>> phrases_;
};

struct LexiconSet {
  Lexicon discourse_markers;
  Lexicon interjections;
  Lexicon abbreviations;
  Lexicon curse_words;
  Lexicon positive_words;
  Lexicon negative_words;
  Lexicon stopwords;
  Lexicon first_person_pronouns;
  Lexicon acronyms;

  /// Loads `<name>.txt` for every list from `dir`: UTF-8, one entry per line,
  /// '#' starts a comment. A missing file is a data error.
  static LexiconSet load(const std::filesystem::path& dir);
};

/// Reads one lexicon file.
Lexicon load_lexicon(const std::filesystem::path& file);

// Word and sentence segmentation ------------------------------------------

/// Word forms of a text: tokens stripped of surrounding punctuation, minus
/// mention, hashtag and URL tokens.
std::vector<std::string> words_of(std::string_view text);

/// Words per sentence. Sentences end at a token whose final character (ignoring
/// closing quotes and brackets) is . ! ? ؟ or ۔. Every text yields at least
/// one sentence.
std::vector<std::size_t> sentence_lengths(std::string_view text);

// Feature operations ------------------------------------------------------

FeatureVector activity_features(const std::vector<corpus::Post>& posts);

FeatureVector char_features(const std::vector<std::string>& texts);
FeatureVector word_features(const std::vector<std::string>& texts, const LexiconSet& lexicons);
FeatureVector sentence_features(const std::vector<std::string>& texts);
FeatureVector dictionary_features(const std::vector<std::string>& texts, const LexiconSet& lexicons);

FeatureVector pos_features(const std::vector<corpus::SentenceAnnotation>& annotations);
FeatureVector dep_features(const std::vector<corpus::SentenceAnnotation>& annotations);

struct TreeMetrics {
  std::size_t depth = 0;  // nodes on the longest root-to-leaf path
  std::size_t width = 0;  // largest number of nodes on one level
  double ramification = 0.0;

  bool operator==(const TreeMetrics&) const = default;
};

TreeMetrics tree_metrics(const corpus::SentenceAnnotation& tree);

/// Tree metrics averaged over all sentences.
FeatureVector tree_features(const std::vector<corpus::SentenceAnnotation>& annotations);

struct LinguisticResult {
  FeatureVector features;
  bool syntactic_zero_filled = false;  // no annotations, or syntactic features disabled
};

/// Full linguistic schema for one account. Syntactic blocks use whatever
/// annotations the posts carry; without any they are zero-filled and flagged.
LinguisticResult linguistic_features(const std::vector<corpus::Post>& posts,
                                     const LexiconSet& lexicons, bool use_syntax = true);

}  // namespace acclink::textfeat
