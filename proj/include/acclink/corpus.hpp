#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace acclink::corpus {

/// The 17 universal part-of-speech tags.
inline constexpr std::array<std::string_view, 17> kUposTags = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

/// The 37 universal dependency relations (subtypes such as `nsubj:pass` map
/// onto their base relation).
inline constexpr std::array<std::string_view, 37> kDeprels = {
    "acl", "advcl", "advmod", "amod", "appos", "aux", "case", "cc", "ccomp", "clf",
    "compound", "conj", "cop", "csubj", "dep", "det", "discourse", "dislocated", "expl", "fixed",
    "flat", "goeswith", "iobj", "list", "mark", "nmod", "nsubj", "nummod", "obj", "obl",
    "orphan", "parataxis", "punct", "reparandum", "root", "vocative", "xcomp"};

std::optional<std::size_t> upos_index(std::string_view tag);

/// Base relation index for a label, accepting `rel:subtype` and the older
/// pre-v2 names (nsubjpass, dobj, ...).
std::optional<std::size_t> deprel_index(std::string_view label);

/// True for passive-subject labels (nsubj:pass, csubj:pass, nsubjpass, csubjpass).
bool is_passive_subject(std::string_view label);

struct AnnotatedToken {
  int index = 0;  // 1-based position in the sentence
  std::string form;
  std::string upos;
  int head = 0;  // 0 marks the root
  std::string deprel;

  bool operator==(const AnnotatedToken&) const = default;
};

struct SentenceAnnotation {
  std::vector<AnnotatedToken> tokens;

  /// Checks indices, the single root, head ranges, acyclicity and tag sets.
  /// Throws a data error describing the first violation.
  void validate() const;

  bool operator==(const SentenceAnnotation&) const = default;
};

struct Post {
  std::string post_id;
  std::string author_id;
  std::int64_t timestamp = 0;
  std::string raw_text;
  std::vector<std::string> tokens;
  std::vector<std::string> mentions;
  std::vector<std::string> hashtags;
  bool is_retweet = false;
  std::optional<std::string> retweet_of;
  std::optional<std::string> reply_to;
  std::optional<std::vector<SentenceAnnotation>> annotation;

  bool operator==(const Post&) const = default;
};

/// Builds a post and derives tokens, mentions, hashtags and the retweet flag.
Post make_post(std::string post_id, std::string author_id, std::int64_t timestamp,
               std::string raw_text, std::optional<std::string> reply_to = std::nullopt,
               std::optional<std::string> retweet_of = std::nullopt);

/// Immutable collection of posts grouped by author. Within an author, posts are
/// ordered by (timestamp, post_id); authors iterate in id order.
class Corpus {
 public:
  Corpus() = default;

  /// Validates post ids are unique and timestamps non-negative.
  static Corpus from_posts(std::vector<Post> posts, std::string language = "",
                           std::string provenance = "");

  const std::map<std::string, std::vector<Post>>& authors() const { return authors_; }
  const std::vector<Post>& posts_of(const std::string& author_id) const;
  bool has_author(const std::string& author_id) const { return authors_.count(author_id) > 0; }
  std::vector<std::string> author_ids() const;
  std::vector<Post> all_posts() const;

  std::size_t author_count() const { return authors_.size(); }
  std::size_t post_count() const;
  bool empty() const { return authors_.empty(); }

  const std::string& language() const { return language_; }
  const std::string& provenance() const { return provenance_; }

  bool operator==(const Corpus&) const = default;

 private:
  std::map<std::string, std::vector<Post>> authors_;
  std::string language_;
  std::string provenance_;
};

// Tokenization and normalization -------------------------------------------

/// Splits on Unicode whitespace; punctuation stays attached to its token.
std::vector<std::string> tokenize(std::string_view raw_text);

bool is_url_token(std::string_view token);
bool is_mention_token(std::string_view token);
bool is_hashtag_token(std::string_view token);

/// Token with leading and trailing punctuation removed.
std::string strip_punctuation(std::string_view token);

/// Account id referenced by a mention token ("@bob:" -> "bob").
std::string mention_target(std::string_view token);

/// Removes digit runs, @-mention tokens and URL tokens, then collapses
/// whitespace. Idempotent.
std::string normalize_for_similarity(std::string_view raw_text);
std::string normalize_for_similarity(const Post& post);

// Interchange formats ------------------------------------------------------

/// Reads JSON-lines posts (post_id, author_id, timestamp, text, reply_to,
/// retweet_of). A leading `{"acclink": {...}}` metadata line is skipped.
Corpus ingest_posts(const std::filesystem::path& path, std::string language = "");
Corpus parse_posts(std::istream& in, const std::string& source_name, std::string language = "");

/// Writes the JSON-lines form read back by ingest_posts. `meta_line`, when
/// non-empty, is emitted verbatim as the first line.
void write_posts(const Corpus& corpus, std::ostream& out, const std::string& meta_line = "");

/// Attaches CoNLL-U style sentence annotations keyed by `# post_id = <id>`.
/// Accepts both 5-column (index form upos head deprel) and 10-column CoNLL-U.
Corpus attach_annotations(const Corpus& corpus, const std::filesystem::path& path);
Corpus attach_annotations(const Corpus& corpus, std::istream& in, const std::string& source_name);

/// Writes every annotated post in the 5-column sidecar format.
void write_annotations(const Corpus& corpus, std::ostream& out, const std::string& header_comment = "");

}  // namespace acclink::corpus
