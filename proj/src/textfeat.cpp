#include "acclink/textfeat.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "acclink/error.hpp"
#include "acclink/utf8.hpp"

namespace acclink::textfeat {

using corpus::Post;
using corpus::SentenceAnnotation;

namespace {

const std::vector<std::string> kCharNames = {
    "char_upper",       "char_period", "char_comma", "char_parenthesis", "char_exclamation",
    "char_colon",       "char_digit",  "char_semicolon", "char_hyphen",   "char_quotation"};
const std::vector<std::string> kWordNames = {
    "word_mean_chars", "word_vocabulary_richness", "word_acronyms",     "word_stopwords",
    "word_first_person", "word_short_2_3",         "word_length_std",   "word_length_range"};
const std::vector<std::string> kSentenceNames = {"sent_mean_words", "sent_std_words",
                                                 "sent_range_words"};
const std::vector<std::string> kDictionaryNames = {
    "dict_discourse_markers", "dict_interjections",   "dict_abbreviations",
    "dict_curse_words",       "dict_positive_words",  "dict_negative_words"};
const std::vector<std::string> kClauseNames = {"passive_ratio", "coordinate_per_sentence",
                                               "subordinate_per_sentence"};
const std::vector<std::string> kTreeNames = {"tree_mean_depth", "tree_mean_width",
                                             "tree_mean_ramification"};

// Adverbial, clausal-complement, open-clausal-complement, adnominal and
// clausal-subject relations.
const std::vector<std::string_view> kSubordinateRelations = {"advcl", "ccomp", "xcomp", "acl",
                                                             "csubj"};

std::vector<std::string> pos_names() {
  std::vector<std::string> out;
  for (auto tag : corpus::kUposTags) out.push_back("pos_" + std::string(tag));
  return out;
}

std::vector<std::string> dep_names() {
  std::vector<std::string> out;
  for (auto rel : corpus::kDeprels) out.push_back("dep_" + std::string(rel));
  return out;
}

FeatureVector make(Category c, const std::vector<std::string>& names) {
  return FeatureVector{c, names, std::vector<double>(names.size(), 0.0)};
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

struct Moments {
  double mean = 0.0;
  double std = 0.0;  // population
  double range = 0.0;
};

template <typename T>
Moments moments(const std::vector<T>& xs) {
  Moments m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (auto x : xs) sum += static_cast<double>(x);
  m.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (auto x : xs) ss += (static_cast<double>(x) - m.mean) * (static_cast<double>(x) - m.mean);
  m.std = std::sqrt(ss / static_cast<double>(xs.size()));
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  m.range = static_cast<double>(*hi) - static_cast<double>(*lo);
  return m;
}

bool is_terminal(char32_t c) { return c == U'.' || c == U'!' || c == U'?' || c == 0x061F || c == 0x06D4; }

bool is_closer(char32_t c) {
  return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == U'}' || c == 0x201D ||
         c == 0x2019 || c == 0xBB;
}

bool is_quotation(char32_t c) {
  return c == U'"' || c == 0x201C || c == 0x201D || c == 0x201E || c == 0x201F || c == 0x2018 ||
         c == 0x2019 || c == 0xAB || c == 0xBB;
}

bool is_acronym_shape(std::string_view word) {
  const auto cps = utf8::decode(word);
  if (cps.size() < 2 || cps.size() > 5) return false;
  return std::all_of(cps.begin(), cps.end(), [](char32_t c) { return utf8::is_upper(c); });
}

std::vector<std::string> lowered(const std::vector<std::string>& words) {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(utf8::to_lower(w));
  return out;
}

void require_annotations(const std::vector<SentenceAnnotation>& annotations, const char* op) {
  if (annotations.empty()) {
    throw data_error(fmt::format(
        "{} needs sentence annotations; attach a parser sidecar with attach_annotations first", op));
  }
}

}  // namespace

std::string to_string(Category c) {
  switch (c) {
    case Category::Activity: return "Activity";
    case Category::Linguistic: return "Linguistic";
    case Category::Network: return "Network";
  }
  return "?";
}

double FeatureVector::at(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return values[i];
  }
  throw data_error(fmt::format("feature '{}' not in {} vector", name, to_string(category)));
}

void FeatureVector::append(const FeatureVector& other) {
  names.insert(names.end(), other.names.begin(), other.names.end());
  values.insert(values.end(), other.values.begin(), other.values.end());
}

const std::vector<std::string>& schema(Category c) {
  static const std::vector<std::string> activity = {"avg_mentions", "avg_hashtags",
                                                    "inter_arrival_time"};
  static const std::vector<std::string> network = {"authority",   "hub",      "triangles",
                                                   "eigenvector", "pagerank", "clustering"};
  static const std::vector<std::string> linguistic = [] {
    std::vector<std::string> all;
    for (const auto* block : {&kCharNames, &kWordNames, &kSentenceNames, &kDictionaryNames}) {
      all.insert(all.end(), block->begin(), block->end());
    }
    for (auto&& n : pos_names()) all.push_back(n);
    for (auto&& n : dep_names()) all.push_back(n);
    all.insert(all.end(), kClauseNames.begin(), kClauseNames.end());
    all.insert(all.end(), kTreeNames.begin(), kTreeNames.end());
    return all;
  }();
  switch (c) {
    case Category::Activity: return activity;
    case Category::Linguistic: return linguistic;
    case Category::Network: return network;
  }
  return activity;
}

// Lexicons ------------------------------------------------------------------

Lexicon::Lexicon(const std::vector<std::string>& entries) {
  for (const auto& e : entries) {
    const auto lower = utf8::to_lower(e);
    std::istringstream ss(lower);
    std::vector<std::string> parts;
    for (std::string w; ss >> w;) parts.push_back(w);
    if (parts.empty()) continue;
    if (parts.size() == 1) {
      words_.insert(parts[0]);
    } else if (std::find(phrases_.begin(), phrases_.end(), parts) == phrases_.end()) {
      phrases_.push_back(std::move(parts));
    }
  }
}

std::size_t Lexicon::count_matches(const std::vector<std::string>& lower_words) const {
  std::size_t n = 0;
  for (const auto& w : lower_words) n += words_.count(w);
  for (const auto& phrase : phrases_) {
    if (phrase.size() > lower_words.size()) continue;
    for (std::size_t i = 0; i + phrase.size() <= lower_words.size(); ++i) {
      if (std::equal(phrase.begin(), phrase.end(), lower_words.begin() + static_cast<long>(i))) ++n;
    }
  }
  return n;
}

Lexicon load_lexicon(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw data_error(fmt::format("missing lexicon file '{}'", file.string()));
  std::vector<std::string> entries;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto end = line.find_last_not_of(" \t");
    entries.push_back(line.substr(start, end - start + 1));
  }
  return Lexicon(entries);
}

LexiconSet LexiconSet::load(const std::filesystem::path& dir) {
  LexiconSet s;
  s.discourse_markers = load_lexicon(dir / "discourse_markers.txt");
  s.interjections = load_lexicon(dir / "interjections.txt");
  s.abbreviations = load_lexicon(dir / "abbreviations.txt");
  s.curse_words = load_lexicon(dir / "curse_words.txt");
  s.positive_words = load_lexicon(dir / "positive_words.txt");
  s.negative_words = load_lexicon(dir / "negative_words.txt");
  s.stopwords = load_lexicon(dir / "stopwords.txt");
  s.first_person_pronouns = load_lexicon(dir / "first_person_pronouns.txt");
  s.acronyms = load_lexicon(dir / "acronyms.txt");
  return s;
}

// Segmentation --------------------------------------------------------------

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> words;
  for (const auto& tok : corpus::tokenize(text)) {
    if (corpus::is_mention_token(tok) || corpus::is_hashtag_token(tok) || corpus::is_url_token(tok)) {
      continue;
    }
    auto w = corpus::strip_punctuation(tok);
    if (!w.empty()) words.push_back(std::move(w));
  }
  return words;
}

std::vector<std::size_t> sentence_lengths(std::string_view text) {
  std::vector<std::size_t> lengths;
  std::size_t current = 0;
  for (const auto& tok : corpus::tokenize(text)) {
    const bool countable = !(corpus::is_mention_token(tok) || corpus::is_hashtag_token(tok) ||
                             corpus::is_url_token(tok)) &&
                           !corpus::strip_punctuation(tok).empty();
    if (countable) ++current;
    if (corpus::is_url_token(tok)) continue;
    auto cps = utf8::decode(tok);
    while (!cps.empty() && is_closer(cps.back())) cps.pop_back();
    if (!cps.empty() && is_terminal(cps.back()) && current > 0) {
      lengths.push_back(current);
      current = 0;
    }
  }
  if (current > 0 || lengths.empty()) lengths.push_back(current);
  return lengths;
}

// Activity ------------------------------------------------------------------

FeatureVector activity_features(const std::vector<Post>& posts) {
  if (posts.empty()) throw data_error("activity features need at least one post");
  std::size_t mentions = 0, hashtags = 0;
  std::vector<std::int64_t> times;
  for (const auto& p : posts) {
    mentions += p.mentions.size();
    hashtags += p.hashtags.size();
    times.push_back(p.timestamp);
  }
  std::sort(times.begin(), times.end());
  const double n = static_cast<double>(posts.size());
  const double inter_arrival =
      posts.size() < 2 ? 0.0 : static_cast<double>(times.back() - times.front()) / (n - 1.0);
  return FeatureVector{Category::Activity, schema(Category::Activity),
                       {static_cast<double>(mentions) / n, static_cast<double>(hashtags) / n,
                        inter_arrival}};
}

// Linguistic sub-blocks -----------------------------------------------------

FeatureVector char_features(const std::vector<std::string>& texts) {
  auto fv = make(Category::Linguistic, kCharNames);
  std::array<std::size_t, 10> counts{};
  std::size_t total = 0;
  for (const auto& t : texts) {
    for (char32_t c : utf8::decode(t)) {
      ++total;
      if (utf8::is_upper(c)) ++counts[0];
      if (c == U'.' || c == 0x06D4) ++counts[1];
      if (c == U',' || c == 0x060C) ++counts[2];
      if (c == U'(' || c == U')') ++counts[3];
      if (c == U'!') ++counts[4];
      if (c == U':') ++counts[5];
      if (utf8::is_digit(c)) ++counts[6];
      if (c == U';' || c == 0x061B) ++counts[7];
      if (c == U'-' || c == 0x2010 || c == 0x2011) ++counts[8];
      if (is_quotation(c)) ++counts[9];
    }
  }
  for (std::size_t i = 0; i < counts.size(); ++i) fv.values[i] = ratio(counts[i], total);
  return fv;
}

FeatureVector word_features(const std::vector<std::string>& texts, const LexiconSet& lex) {
  auto fv = make(Category::Linguistic, kWordNames);
  std::vector<std::size_t> lengths;
  std::set<std::string> distinct;
  std::size_t acronyms = 0, stopwords = 0, first_person = 0, short_words = 0;
  for (const auto& t : texts) {
    for (const auto& w : words_of(t)) {
      const auto lower = utf8::to_lower(w);
      const auto len = utf8::length(w);
      lengths.push_back(len);
      distinct.insert(lower);
      if (lex.acronyms.contains(lower) || is_acronym_shape(w)) ++acronyms;
      if (lex.stopwords.contains(lower)) ++stopwords;
      if (lex.first_person_pronouns.contains(lower)) ++first_person;
      if (len == 2 || len == 3) ++short_words;
    }
  }
  if (lengths.empty()) return fv;
  const auto m = moments(lengths);
  const auto total = lengths.size();
  fv.values = {m.mean,
               ratio(distinct.size(), total),
               ratio(acronyms, total),
               ratio(stopwords, total),
               ratio(first_person, total),
               ratio(short_words, total),
               m.std,
               m.range};
  return fv;
}

FeatureVector sentence_features(const std::vector<std::string>& texts) {
  auto fv = make(Category::Linguistic, kSentenceNames);
  std::vector<std::size_t> lengths;
  for (const auto& t : texts) {
    const auto l = sentence_lengths(t);
    lengths.insert(lengths.end(), l.begin(), l.end());
  }
  if (lengths.empty()) return fv;
  const auto m = moments(lengths);
  fv.values = {m.mean, m.std, m.range};
  return fv;
}

FeatureVector dictionary_features(const std::vector<std::string>& texts, const LexiconSet& lex) {
  auto fv = make(Category::Linguistic, kDictionaryNames);
  std::array<std::size_t, 6> counts{};
  std::size_t total = 0;
  for (const auto& t : texts) {
    const auto words = lowered(words_of(t));
    total += words.size();
    counts[0] += lex.discourse_markers.count_matches(words);
    counts[1] += lex.interjections.count_matches(words);
    counts[2] += lex.abbreviations.count_matches(words);
    counts[3] += lex.curse_words.count_matches(words);
    counts[4] += lex.positive_words.count_matches(words);
    counts[5] += lex.negative_words.count_matches(words);
  }
  for (std::size_t i = 0; i < counts.size(); ++i) fv.values[i] = ratio(counts[i], total);
  return fv;
}

FeatureVector pos_features(const std::vector<SentenceAnnotation>& annotations) {
  require_annotations(annotations, "pos_features");
  auto fv = make(Category::Linguistic, pos_names());
  std::size_t total = 0;
  for (const auto& s : annotations) {
    for (const auto& t : s.tokens) {
      ++total;
      if (auto i = corpus::upos_index(t.upos)) fv.values[*i] += 1.0;
    }
  }
  for (auto& v : fv.values) v = total ? v / static_cast<double>(total) : 0.0;
  return fv;
}

FeatureVector dep_features(const std::vector<SentenceAnnotation>& annotations) {
  require_annotations(annotations, "dep_features");
  auto fv = make(Category::Linguistic, dep_names());
  auto clauses = make(Category::Linguistic, kClauseNames);
  std::size_t passive_sentences = 0, conjuncts = 0, subordinates = 0;
  for (const auto& s : annotations) {
    bool passive = false;
    for (const auto& t : s.tokens) {
      const auto i = corpus::deprel_index(t.deprel);
      if (!i) continue;
      fv.values[*i] += 1.0;
      const auto base = corpus::kDeprels[*i];
      if (base == "conj") ++conjuncts;
      if (std::find(kSubordinateRelations.begin(), kSubordinateRelations.end(), base) !=
          kSubordinateRelations.end()) {
        ++subordinates;
      }
      if (corpus::is_passive_subject(t.deprel)) passive = true;
    }
    if (passive) ++passive_sentences;
  }
  const auto n = annotations.size();
  for (auto& v : fv.values) v /= static_cast<double>(n);
  clauses.values = {ratio(passive_sentences, n), ratio(conjuncts, n), ratio(subordinates, n)};
  fv.append(clauses);
  return fv;
}

TreeMetrics tree_metrics(const SentenceAnnotation& tree) {
  tree.validate();
  const std::size_t n = tree.tokens.size();
  std::vector<std::vector<std::size_t>> children(n + 1);
  for (const auto& t : tree.tokens) children[static_cast<std::size_t>(t.head)].push_back(static_cast<std::size_t>(t.index));
  // Level-order walk from the single root (child of the virtual node 0).
  std::vector<std::size_t> level = children[0];
  TreeMetrics m;
  while (!level.empty()) {
    ++m.depth;
    m.width = std::max(m.width, level.size());
    std::vector<std::size_t> next;
    for (auto node : level) next.insert(next.end(), children[node].begin(), children[node].end());
    level = std::move(next);
  }
  m.ramification = m.depth > 1 ? static_cast<double>(n - 1) / static_cast<double>(m.depth - 1) : 0.0;
  return m;
}

FeatureVector tree_features(const std::vector<SentenceAnnotation>& annotations) {
  require_annotations(annotations, "tree_features");
  auto fv = make(Category::Linguistic, kTreeNames);
  for (const auto& s : annotations) {
    const auto m = tree_metrics(s);
    fv.values[0] += static_cast<double>(m.depth);
    fv.values[1] += static_cast<double>(m.width);
    fv.values[2] += m.ramification;
  }
  for (auto& v : fv.values) v /= static_cast<double>(annotations.size());
  return fv;
}

LinguisticResult linguistic_features(const std::vector<Post>& posts, const LexiconSet& lexicons,
                                     bool use_syntax) {
  std::vector<std::string> texts;
  std::vector<SentenceAnnotation> sentences;
  for (const auto& p : posts) {
    texts.push_back(p.raw_text);
    if (p.annotation) sentences.insert(sentences.end(), p.annotation->begin(), p.annotation->end());
  }
  LinguisticResult r;
  r.features = FeatureVector{Category::Linguistic, {}, {}};
  r.features.append(char_features(texts));
  r.features.append(word_features(texts, lexicons));
  r.features.append(sentence_features(texts));
  r.features.append(dictionary_features(texts, lexicons));
  if (use_syntax && !sentences.empty()) {
    r.features.append(pos_features(sentences));
    r.features.append(dep_features(sentences));
    r.features.append(tree_features(sentences));
  } else {
    r.syntactic_zero_filled = true;
    r.features.append(make(Category::Linguistic, pos_names()));
    r.features.append(make(Category::Linguistic, dep_names()));
    r.features.append(make(Category::Linguistic, kClauseNames));
    r.features.append(make(Category::Linguistic, kTreeNames));
  }
  return r;
}

}  // namespace acclink::textfeat
