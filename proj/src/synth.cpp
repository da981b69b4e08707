#include "acclink/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "acclink/error.hpp"
#include "acclink/random.hpp"

namespace acclink::corpus {

namespace {

constexpr std::size_t kTopics = 24;
constexpr std::size_t kWordsPerTopic = 50;

// Word lists overlap the shipped English lexicons so the dictionary features
// respond to the planted style.
const std::vector<std::string> kDiscourse = {"however", "therefore", "anyway", "actually",
                                             "moreover", "besides", "meanwhile", "well",
                                             "basically", "honestly"};
const std::vector<std::string> kInterjections = {"oh",  "wow", "ouch", "hey", "oops",
                                                 "yay", "ugh", "hmm",  "ah",  "whoa"};
const std::vector<std::string> kAbbreviations = {"btw", "imo", "lol", "omg", "idk",
                                                 "tbh", "smh", "fyi", "brb", "irl"};
const std::vector<std::string> kCurses = {"damn", "hell", "crap", "bloody", "freaking", "screw"};
const std::vector<std::string> kPositive = {"good", "great", "love",      "happy", "awesome",
                                            "nice", "excellent", "wonderful", "best",  "amazing"};
const std::vector<std::string> kNegative = {"bad",   "sad",   "hate", "awful", "terrible",
                                            "worst", "angry", "poor", "wrong", "horrible"};
const std::vector<std::string> kPronouns = {"i", "me", "my", "we", "us", "our", "myself"};
const std::vector<std::string> kAcronyms = {"USA", "NASA", "FBI", "BBC", "NBA",
                                            "EU",  "CEO",  "AI",  "TV",  "UK"};

struct Stopword {
  const char* form;
  const char* upos;
};
const std::vector<Stopword> kStopwords = {
    {"the", "DET"},  {"a", "DET"},    {"an", "DET"},   {"this", "DET"}, {"of", "ADP"},
    {"to", "ADP"},   {"in", "ADP"},   {"for", "ADP"},  {"on", "ADP"},   {"with", "ADP"},
    {"at", "ADP"},   {"by", "ADP"},   {"and", "CCONJ"}, {"but", "CCONJ"}, {"or", "CCONJ"},
    {"is", "AUX"},   {"are", "AUX"},  {"was", "AUX"},  {"be", "AUX"},   {"that", "SCONJ"},
    {"if", "SCONJ"}, {"not", "PART"}, {"it", "PRON"}};

enum class WordKind {
  Stop, Pronoun, Discourse, Interjection, Abbreviation, Curse, Positive, Negative, Acronym,
  Digit, Topic
};
constexpr std::size_t kWordKinds = 11;

const std::array<const char*, 5> kContentTags = {"NOUN", "VERB", "ADJ", "ADV", "PROPN"};
const std::vector<std::string> kNounRelations = {"nsubj", "obj",  "obl",   "nmod",
                                                 "compound", "conj", "appos", "iobj"};
const std::vector<std::string> kVerbRelations = {"advcl", "ccomp", "xcomp",    "acl",
                                                 "conj",  "csubj", "parataxis"};

struct Vocabulary {
  std::vector<std::vector<std::string>> topics;
};

std::string make_word(Rng& rng, std::size_t length) {
  static const std::string consonants = "bcdfghjklmnprstvwz";
  static const std::string vowels = "aeiou";
  std::string w;
  bool vowel = bernoulli(rng, 0.3);
  while (w.size() < length) {
    const auto& pool = vowel ? vowels : consonants;
    w.push_back(pool[uniform_index(rng, pool.size())]);
    vowel = !vowel;
  }
  return w;
}

Vocabulary build_vocabulary(std::uint64_t style_seed) {
  Rng rng = make_rng(derive_seed(style_seed, "vocabulary"));
  std::set<std::string> taken;
  for (const auto* list : {&kDiscourse, &kInterjections, &kAbbreviations, &kCurses, &kPositive,
                           &kNegative, &kPronouns}) {
    taken.insert(list->begin(), list->end());
  }
  for (const auto& s : kStopwords) taken.insert(s.form);
  Vocabulary v;
  v.topics.resize(kTopics);
  for (auto& topic : v.topics) {
    while (topic.size() < kWordsPerTopic) {
      auto w = make_word(rng, 2 + uniform_index(rng, 10));
      if (taken.insert(w).second) topic.push_back(std::move(w));
    }
  }
  return v;
}

struct Style {
  double mention_rate;
  double hashtag_rate;
  double interval_mean;  // seconds
  double url_prob;
  double reply_prob;
  double retweet_prob;
  double capitalize_prob;
  double shout_prob;  // a topic word written in capitals
  double comma_prob;
  double colon_prob;
  double semicolon_prob;
  double hyphen_prob;
  double quote_prob;
  double paren_prob;
  std::vector<double> terminal_weights;  // '.', '!', '?', "..."
  double words_mean;
  double words_sd;
  double extra_sentences;
  double preferred_length;
  double length_sharpness;
  std::vector<double> kind_weights;
  std::vector<std::size_t> topics;
  std::vector<double> topic_weights;
  std::vector<double> content_tag_weights;
  std::vector<double> noun_relation_weights;
  std::vector<double> verb_relation_weights;
  double chain_prob;
  double passive_prob;
  double copula_prob;
  std::vector<std::size_t> neighbors;
  std::vector<double> neighbor_weights;
};

std::vector<double> jittered(Rng& rng, std::size_t n, double spread) {
  std::vector<double> w(n);
  for (auto& x : w) x = std::exp(normal(rng, 0.0, spread));
  return w;
}

Style draw_style(std::uint64_t style_seed, std::size_t user, std::size_t n_users) {
  Rng rng = make_rng(derive_seed(style_seed, user));
  Style s;
  s.mention_rate = uniform(rng, 0.0, 2.0);
  s.hashtag_rate = uniform(rng, 0.0, 1.5);
  s.interval_mean = std::exp(uniform(rng, std::log(600.0), std::log(172800.0)));
  s.url_prob = uniform(rng, 0.0, 0.3);
  s.reply_prob = uniform(rng, 0.0, 0.3);
  s.retweet_prob = uniform(rng, 0.0, 0.2);
  s.capitalize_prob = uniform(rng, 0.1, 1.0);
  s.shout_prob = uniform(rng, 0.0, 0.12);
  s.comma_prob = uniform(rng, 0.0, 0.15);
  s.colon_prob = uniform(rng, 0.0, 0.2);
  s.semicolon_prob = uniform(rng, 0.0, 0.15);
  s.hyphen_prob = uniform(rng, 0.0, 0.2);
  s.quote_prob = uniform(rng, 0.0, 0.2);
  s.paren_prob = uniform(rng, 0.0, 0.15);
  s.terminal_weights = jittered(rng, 4, 1.0);
  s.words_mean = uniform(rng, 4.0, 16.0);
  s.words_sd = uniform(rng, 0.5, 4.0);
  s.extra_sentences = uniform(rng, 0.0, 2.0);
  s.preferred_length = uniform(rng, 3.0, 9.0);
  s.length_sharpness = uniform(rng, 0.0, 0.8);
  s.kind_weights = {uniform(rng, 0.10, 0.45),  // stop
                    uniform(rng, 0.0, 0.12),   // pronoun
                    uniform(rng, 0.0, 0.05),   // discourse
                    uniform(rng, 0.0, 0.05),   // interjection
                    uniform(rng, 0.0, 0.05),   // abbreviation
                    uniform(rng, 0.0, 0.03),   // curse
                    uniform(rng, 0.0, 0.06),   // positive
                    uniform(rng, 0.0, 0.06),   // negative
                    uniform(rng, 0.0, 0.04),   // acronym
                    uniform(rng, 0.0, 0.06),   // digit
                    0.0};
  double rest = 0.0;
  for (double w : s.kind_weights) rest += w;
  s.kind_weights.back() = std::max(0.2, 1.0 - rest);
  std::set<std::size_t> chosen;
  while (chosen.size() < 3) chosen.insert(uniform_index(rng, kTopics));
  s.topics.assign(chosen.begin(), chosen.end());
  s.topic_weights = jittered(rng, s.topics.size(), 0.8);
  s.content_tag_weights = jittered(rng, kContentTags.size(), 0.6);
  s.content_tag_weights[0] *= 2.0;  // nouns dominate content words
  s.noun_relation_weights = jittered(rng, kNounRelations.size(), 0.8);
  s.verb_relation_weights = jittered(rng, kVerbRelations.size(), 0.8);
  s.chain_prob = uniform(rng, 0.05, 0.9);
  s.passive_prob = uniform(rng, 0.0, 0.4);
  s.copula_prob = uniform(rng, 0.0, 0.5);
  const std::size_t n_neighbors = std::min<std::size_t>(n_users - 1, 3 + uniform_index(rng, 6));
  std::set<std::size_t> nb;
  while (nb.size() < n_neighbors) {
    const auto v = uniform_index(rng, n_users);
    if (v != user) nb.insert(v);
  }
  s.neighbors.assign(nb.begin(), nb.end());
  s.neighbor_weights = jittered(rng, s.neighbors.size(), 0.7);
  return s;
}

std::string user_id(std::size_t i) { return fmt::format("u{:04d}", i); }

struct Word {
  std::string form;
  std::string upos;
};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[uniform_index(rng, v.size())];
}

Word draw_word(Rng& rng, const Style& s, const Vocabulary& vocab) {
  switch (static_cast<WordKind>(categorical(rng, s.kind_weights))) {
    case WordKind::Stop: {
      const auto& sw = pick(rng, kStopwords);
      return {sw.form, sw.upos};
    }
    case WordKind::Pronoun: return {pick(rng, kPronouns), "PRON"};
    case WordKind::Discourse: return {pick(rng, kDiscourse), "ADV"};
    case WordKind::Interjection: return {pick(rng, kInterjections), "INTJ"};
    case WordKind::Abbreviation: return {pick(rng, kAbbreviations), "X"};
    case WordKind::Curse: return {pick(rng, kCurses), "ADJ"};
    case WordKind::Positive: return {pick(rng, kPositive), "ADJ"};
    case WordKind::Negative: return {pick(rng, kNegative), "ADJ"};
    case WordKind::Acronym: return {pick(rng, kAcronyms), "PROPN"};
    case WordKind::Digit: return {std::to_string(uniform_index(rng, 2025)), "NUM"};
    case WordKind::Topic: break;
  }
  const auto& topic = vocab.topics[s.topics[categorical(rng, s.topic_weights)]];
  std::vector<double> weights(topic.size());
  for (std::size_t i = 0; i < topic.size(); ++i) {
    weights[i] = std::exp(-s.length_sharpness *
                          std::abs(static_cast<double>(topic[i].size()) - s.preferred_length));
  }
  Word w{topic[categorical(rng, weights)], kContentTags[categorical(rng, s.content_tag_weights)]};
  if (bernoulli(rng, s.shout_prob)) {
    for (char& c : w.form) c = static_cast<char>(c - 'a' + 'A');
  }
  return w;
}

std::string relation_for(Rng& rng, const Style& s, const std::string& upos) {
  if (upos == "DET") return "det";
  if (upos == "ADP") return "case";
  if (upos == "CCONJ") return "cc";
  if (upos == "AUX") return bernoulli(rng, s.copula_prob) ? "cop" : "aux";
  if (upos == "SCONJ") return "mark";
  if (upos == "PART") return "advmod";
  if (upos == "PRON") return bernoulli(rng, 0.6) ? "nsubj" : "obj";
  if (upos == "NUM") return "nummod";
  if (upos == "INTJ") return "discourse";
  if (upos == "X") return "dep";
  if (upos == "ADJ") return bernoulli(rng, 0.8) ? "amod" : "xcomp";
  if (upos == "ADV") return "advmod";
  if (upos == "VERB") return kVerbRelations[categorical(rng, s.verb_relation_weights)];
  if (upos == "PROPN") return bernoulli(rng, 0.5) ? "flat" : "nmod";
  return kNounRelations[categorical(rng, s.noun_relation_weights)];
}

SentenceAnnotation annotate(Rng& rng, const Style& s, const std::vector<Word>& words,
                            const std::vector<std::string>& forms) {
  const std::size_t n = words.size();
  std::size_t root = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (words[i].upos == "VERB") {
      root = i;
      break;
    }
  }
  if (root == n) root = uniform_index(rng, n);

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != root) order.push_back(i);
  }
  shuffle(rng, order);
  std::vector<int> head(n, 0);
  std::vector<std::size_t> attached = {root};
  for (std::size_t i : order) {
    const std::size_t parent =
        bernoulli(rng, s.chain_prob) ? attached.back() : attached[uniform_index(rng, attached.size())];
    head[i] = static_cast<int>(parent) + 1;
    attached.push_back(i);
  }

  SentenceAnnotation sent;
  bool passive = bernoulli(rng, s.passive_prob);
  for (std::size_t i = 0; i < n; ++i) {
    AnnotatedToken t;
    t.index = static_cast<int>(i) + 1;
    t.form = forms[i];
    t.upos = words[i].upos;
    t.head = head[i];
    t.deprel = i == root ? "root" : relation_for(rng, s, t.upos);
    if (passive && i != root && (t.deprel == "nsubj" || t.upos == "NOUN")) {
      t.deprel = "nsubj:pass";
      passive = false;
    }
    sent.tokens.push_back(std::move(t));
  }
  return sent;
}

std::string capitalized(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

}  // namespace

Corpus generate_synthetic_corpus(const SynthParams& params) {
  if (params.n_users < 2) throw usage_error("synthetic corpus needs at least 2 users");
  if (params.min_posts == 0 || params.min_posts > params.max_posts) {
    throw usage_error("synthetic posts_per_user range must satisfy 1 <= min <= max");
  }
  const Vocabulary vocab = build_vocabulary(params.style_seed);
  static const std::array<const char*, 4> terminals = {".", "!", "?", "..."};

  std::vector<Post> posts;
  std::size_t post_counter = 0;
  for (std::size_t u = 0; u < params.n_users; ++u) {
    const Style style = draw_style(params.style_seed, u, params.n_users);
    Rng rng = make_rng(derive_seed(params.seed, u));
    const std::size_t n_posts =
        params.min_posts + uniform_index(rng, params.max_posts - params.min_posts + 1);
    std::int64_t ts = 1'600'000'000 + static_cast<std::int64_t>(uniform_index(rng, 3'000'000));

    auto draw_neighbor = [&]() {
      if (bernoulli(rng, 0.85)) return style.neighbors[categorical(rng, style.neighbor_weights)];
      std::size_t v;
      do {
        v = uniform_index(rng, params.n_users);
      } while (v == u);
      return v;
    };

    for (std::size_t k = 0; k < n_posts; ++k) {
      ts += std::max<std::int64_t>(1, std::llround(exponential(rng, style.interval_mean)));
      std::vector<std::string> text_tokens;
      const int n_mentions = poisson(rng, style.mention_rate);
      for (int m = 0; m < n_mentions; ++m) text_tokens.push_back("@" + user_id(draw_neighbor()));

      std::vector<SentenceAnnotation> sentences;
      const int n_sentences = 1 + poisson(rng, style.extra_sentences);
      for (int si = 0; si < n_sentences; ++si) {
        const auto n_words = static_cast<std::size_t>(
            std::max(1L, std::lround(normal(rng, style.words_mean, style.words_sd))));
        std::vector<Word> words;
        std::vector<std::string> forms;
        for (std::size_t wi = 0; wi < n_words; ++wi) {
          Word w = draw_word(rng, style, vocab);
          std::string form = w.form;
          if (wi == 0 && bernoulli(rng, style.capitalize_prob)) form = capitalized(form);
          if (bernoulli(rng, style.quote_prob / static_cast<double>(n_words))) form = "\"" + form + "\"";
          if (bernoulli(rng, style.paren_prob / static_cast<double>(n_words))) form = "(" + form + ")";
          if (wi + 1 < n_words) {
            if (bernoulli(rng, style.comma_prob)) {
              form += ",";
            } else if (bernoulli(rng, style.colon_prob / static_cast<double>(n_words))) {
              form += ":";
            } else if (bernoulli(rng, style.semicolon_prob / static_cast<double>(n_words))) {
              form += ";";
            } else if (bernoulli(rng, style.hyphen_prob / static_cast<double>(n_words))) {
              form += "-" + vocab.topics[style.topics[0]][uniform_index(rng, kWordsPerTopic)];
            }
          } else {
            form += terminals[categorical(rng, style.terminal_weights)];
          }
          words.push_back(std::move(w));
          forms.push_back(form);
        }
        sentences.push_back(annotate(rng, style, words, forms));
        text_tokens.insert(text_tokens.end(), forms.begin(), forms.end());
      }

      const int n_tags = poisson(rng, style.hashtag_rate);
      for (int h = 0; h < n_tags; ++h) {
        const auto& topic = vocab.topics[style.topics[categorical(rng, style.topic_weights)]];
        text_tokens.push_back("#" + topic[uniform_index(rng, topic.size())]);
      }
      if (bernoulli(rng, style.url_prob)) {
        text_tokens.push_back("https://t.co/" + make_word(rng, 6));
      }

      std::string text;
      for (const auto& t : text_tokens) {
        if (!text.empty()) text.push_back(' ');
        text += t;
      }
      std::optional<std::string> reply_to, retweet_of;
      if (bernoulli(rng, style.reply_prob)) reply_to = user_id(draw_neighbor());
      if (bernoulli(rng, style.retweet_prob)) retweet_of = user_id(draw_neighbor());

      Post p = make_post(fmt::format("p{:07d}", post_counter++), user_id(u), ts, std::move(text),
                         std::move(reply_to), std::move(retweet_of));
      p.annotation = std::move(sentences);
      posts.push_back(std::move(p));
    }
  }
  return Corpus::from_posts(
      std::move(posts), "en",
      fmt::format("synthetic(style_seed={}, seed={})", params.style_seed, params.seed));
}

std::vector<WordVector> synthetic_embeddings(std::uint64_t style_seed, std::size_t dim) {
  const Vocabulary vocab = build_vocabulary(style_seed);
  Rng rng = make_rng(derive_seed(style_seed, "embeddings"));
  std::vector<WordVector> out;
  auto random_direction = [&]() {
    std::vector<double> v(dim);
    for (auto& x : v) x = normal(rng);
    return v;
  };
  for (const auto& topic : vocab.topics) {
    const auto center = random_direction();
    for (const auto& w : topic) {
      auto v = random_direction();
      for (std::size_t i = 0; i < dim; ++i) v[i] = center[i] + 0.6 * v[i];
      out.push_back({w, std::move(v)});
    }
  }
  // Function and lexicon words share one weak common direction.
  const auto common = random_direction();
  std::set<std::string> extra;
  for (const auto* list : {&kDiscourse, &kInterjections, &kAbbreviations, &kCurses, &kPositive,
                           &kNegative, &kPronouns}) {
    extra.insert(list->begin(), list->end());
  }
  for (const auto& s : kStopwords) extra.insert(s.form);
  for (const auto& w : extra) {
    auto v = random_direction();
    for (std::size_t i = 0; i < dim; ++i) v[i] = 0.3 * common[i] + v[i];
    out.push_back({w, std::move(v)});
  }
  return out;
}

}  // namespace acclink::corpus
