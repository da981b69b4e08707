#include "acclink/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "acclink/error.hpp"
#include "acclink/utf8.hpp"

namespace acclink::corpus {

namespace {

const std::unordered_map<std::string_view, std::string_view>& legacy_relations() {
  static const std::unordered_map<std::string_view, std::string_view> table = {
      {"nsubjpass", "nsubj"}, {"csubjpass", "csubj"}, {"dobj", "obj"},   {"auxpass", "aux"},
      {"neg", "advmod"},      {"name", "flat"},       {"mwe", "fixed"}, {"foreign", "flat"}};
  return table;
}

bool post_order(const Post& a, const Post& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  return a.post_id < b.post_id;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string json_identifier(const nlohmann::json& v, const char* field) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw data_error(fmt::format("field '{}' must be a string or integer", field));
}

std::optional<std::string> optional_identifier(const nlohmann::json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  auto id = json_identifier(*it, field);
  if (id.empty()) return std::nullopt;
  return id;
}

}  // namespace

std::optional<std::size_t> upos_index(std::string_view tag) {
  for (std::size_t i = 0; i < kUposTags.size(); ++i) {
    if (kUposTags[i] == tag) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> deprel_index(std::string_view label) {
  std::string_view base = label.substr(0, label.find(':'));
  if (auto it = legacy_relations().find(base); it != legacy_relations().end()) base = it->second;
  for (std::size_t i = 0; i < kDeprels.size(); ++i) {
    if (kDeprels[i] == base) return i;
  }
  return std::nullopt;
}

bool is_passive_subject(std::string_view label) {
  return label == "nsubj:pass" || label == "csubj:pass" || label == "nsubjpass" ||
         label == "csubjpass";
}

void SentenceAnnotation::validate() const {
  const int n = static_cast<int>(tokens.size());
  if (n == 0) throw data_error("empty sentence annotation");
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const auto& t = tokens[static_cast<std::size_t>(i)];
    if (t.index != i + 1) {
      throw data_error(fmt::format("token {} has index {} (expected {})", i + 1, t.index, i + 1));
    }
    if (t.head < 0 || t.head > n) {
      throw data_error(fmt::format("token {} head {} outside [0, {}]", t.index, t.head, n));
    }
    if (t.head == t.index) throw data_error(fmt::format("token {} is its own head", t.index));
    if (t.head == 0) ++roots;
    if (!upos_index(t.upos)) {
      throw data_error(fmt::format("token {} has unknown POS tag '{}'", t.index, t.upos));
    }
    if (!deprel_index(t.deprel)) {
      throw data_error(fmt::format("token {} has unknown relation '{}'", t.index, t.deprel));
    }
  }
  if (roots != 1) throw data_error(fmt::format("sentence has {} roots (expected 1)", roots));
  // Every head chain must reach the root within n steps.
  for (int i = 0; i < n; ++i) {
    int cur = i + 1;
    int steps = 0;
    while (cur != 0) {
      cur = tokens[static_cast<std::size_t>(cur - 1)].head;
      if (++steps > n) {
        throw data_error(fmt::format("cyclic head structure through token {}", i + 1));
      }
    }
  }
}

// Tokens --------------------------------------------------------------------

std::vector<std::string> tokenize(std::string_view raw_text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t c : utf8::decode(raw_text)) {
    if (utf8::is_space(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      utf8::append(current, c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool is_url_token(std::string_view token) {
  if (token.rfind("www.", 0) == 0 || token.rfind("WWW.", 0) == 0) return true;
  const auto pos = token.find("://");
  if (pos == std::string_view::npos || pos == 0) return false;
  // Scheme: a letter followed by letters, digits, '+', '-' or '.'.
  if (!std::isalpha(static_cast<unsigned char>(token[0]))) return false;
  for (std::size_t i = 1; i < pos; ++i) {
    const auto c = static_cast<unsigned char>(token[i]);
    if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return false;
  }
  return true;
}

bool is_mention_token(std::string_view token) { return token.size() > 1 && token[0] == '@'; }

bool is_hashtag_token(std::string_view token) { return token.size() > 1 && token[0] == '#'; }

std::string strip_punctuation(std::string_view token) {
  const auto cps = utf8::decode(token);
  std::size_t b = 0, e = cps.size();
  while (b < e && utf8::is_punct(cps[b])) ++b;
  while (e > b && utf8::is_punct(cps[e - 1])) --e;
  return utf8::encode(std::u32string_view(cps).substr(b, e - b));
}

std::string mention_target(std::string_view token) {
  if (!token.empty() && token[0] == '@') token.remove_prefix(1);
  return strip_punctuation(token);
}

std::string normalize_for_similarity(std::string_view raw_text) {
  // Digits go first: removing them can expose a mention or URL token
  // ("1@bob"), while removing tokens never exposes new digits.
  std::string no_digits;
  no_digits.reserve(raw_text.size());
  for (char32_t c : utf8::decode(raw_text)) {
    if (!utf8::is_digit(c)) utf8::append(no_digits, c);
  }
  std::string out;
  for (const auto& tok : tokenize(no_digits)) {
    if (is_mention_token(tok) || is_url_token(tok)) continue;
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

std::string normalize_for_similarity(const Post& post) {
  return normalize_for_similarity(post.raw_text);
}

Post make_post(std::string post_id, std::string author_id, std::int64_t timestamp,
               std::string raw_text, std::optional<std::string> reply_to,
               std::optional<std::string> retweet_of) {
  Post p;
  p.post_id = std::move(post_id);
  p.author_id = std::move(author_id);
  p.timestamp = timestamp;
  p.raw_text = std::move(raw_text);
  p.tokens = tokenize(p.raw_text);
  for (const auto& tok : p.tokens) {
    if (is_mention_token(tok)) p.mentions.push_back(mention_target(tok));
    if (is_hashtag_token(tok)) p.hashtags.push_back(tok.substr(1));
  }
  p.reply_to = std::move(reply_to);
  p.retweet_of = std::move(retweet_of);
  p.is_retweet = p.retweet_of.has_value();
  return p;
}

// Corpus --------------------------------------------------------------------

Corpus Corpus::from_posts(std::vector<Post> posts, std::string language, std::string provenance) {
  Corpus c;
  c.language_ = std::move(language);
  c.provenance_ = std::move(provenance);
  std::set<std::string> seen;
  for (auto& p : posts) {
    if (p.timestamp < 0) {
      throw data_error(fmt::format("post '{}' has negative timestamp {}", p.post_id, p.timestamp));
    }
    if (!seen.insert(p.post_id).second) {
      throw data_error(fmt::format("duplicate post_id '{}'", p.post_id));
    }
    c.authors_[p.author_id].push_back(std::move(p));
  }
  for (auto& [author, list] : c.authors_) std::sort(list.begin(), list.end(), post_order);
  return c;
}

const std::vector<Post>& Corpus::posts_of(const std::string& author_id) const {
  auto it = authors_.find(author_id);
  if (it == authors_.end()) throw data_error(fmt::format("unknown author '{}'", author_id));
  return it->second;
}

std::vector<std::string> Corpus::author_ids() const {
  std::vector<std::string> ids;
  ids.reserve(authors_.size());
  for (const auto& [id, posts] : authors_) ids.push_back(id);
  return ids;
}

std::vector<Post> Corpus::all_posts() const {
  std::vector<Post> out;
  out.reserve(post_count());
  for (const auto& [id, posts] : authors_) out.insert(out.end(), posts.begin(), posts.end());
  return out;
}

std::size_t Corpus::post_count() const {
  std::size_t n = 0;
  for (const auto& [id, posts] : authors_) n += posts.size();
  return n;
}

// JSON lines ------------------------------------------------------------------

Corpus parse_posts(std::istream& in, const std::string& source_name, std::string language) {
  std::vector<Post> posts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      if (!obj.is_object()) throw data_error("record is not a JSON object");
      if (obj.contains("acclink")) continue;
      if (!obj.contains("post_id")) throw data_error("missing field 'post_id'");
      if (!obj.contains("author_id")) throw data_error("missing field 'author_id'");
      if (!obj.contains("timestamp")) throw data_error("missing field 'timestamp'");
      if (!obj.contains("text")) throw data_error("missing field 'text'");
      const auto& ts = obj["timestamp"];
      if (!ts.is_number_integer()) throw data_error("field 'timestamp' must be an integer");
      const auto timestamp = ts.get<std::int64_t>();
      if (timestamp < 0) throw data_error("field 'timestamp' must be >= 0");
      if (!obj["text"].is_string()) throw data_error("field 'text' must be a string");
      posts.push_back(make_post(json_identifier(obj["post_id"], "post_id"),
                                json_identifier(obj["author_id"], "author_id"), timestamp,
                                obj["text"].get<std::string>(), optional_identifier(obj, "reply_to"),
                                optional_identifier(obj, "retweet_of")));
    } catch (const nlohmann::json::exception& e) {
      throw data_error(fmt::format("{}:{}: malformed JSON: {}", source_name, line_no, e.what()));
    } catch (const Error& e) {
      throw data_error(fmt::format("{}:{}: {}", source_name, line_no, e.what()));
    }
  }
  try {
    return Corpus::from_posts(std::move(posts), std::move(language), source_name);
  } catch (const Error& e) {
    throw data_error(fmt::format("{}: {}", source_name, e.what()));
  }
}

Corpus ingest_posts(const std::filesystem::path& path, std::string language) {
  std::ifstream in(path);
  if (!in) throw data_error(fmt::format("cannot open posts file '{}'", path.string()));
  return parse_posts(in, path.string(), std::move(language));
}

void write_posts(const Corpus& corpus, std::ostream& out, const std::string& meta_line) {
  if (!meta_line.empty()) out << meta_line << '\n';
  for (const auto& [author, posts] : corpus.authors()) {
    for (const auto& p : posts) {
      nlohmann::ordered_json j;
      j["post_id"] = p.post_id;
      j["author_id"] = p.author_id;
      j["timestamp"] = p.timestamp;
      j["text"] = p.raw_text;
      j["reply_to"] = p.reply_to ? nlohmann::ordered_json(*p.reply_to) : nullptr;
      j["retweet_of"] = p.retweet_of ? nlohmann::ordered_json(*p.retweet_of) : nullptr;
      out << j.dump() << '\n';
    }
  }
}

// Annotation sidecar ----------------------------------------------------------

Corpus attach_annotations(const Corpus& corpus, std::istream& in, const std::string& source_name) {
  std::map<std::string, std::vector<SentenceAnnotation>> by_post;
  std::set<std::string> known;
  for (const auto& [author, posts] : corpus.authors()) {
    for (const auto& p : posts) known.insert(p.post_id);
  }

  std::string current_post;
  SentenceAnnotation sentence;
  std::size_t sentence_line = 0;
  auto flush = [&]() {
    if (sentence.tokens.empty()) return;
    if (current_post.empty()) {
      throw data_error(fmt::format("{}:{}: sentence has no '# post_id = ...' comment", source_name,
                                   sentence_line));
    }
    try {
      sentence.validate();
    } catch (const Error& e) {
      throw data_error(fmt::format("{}:{}: post '{}': {}", source_name, sentence_line,
                                   current_post, e.what()));
    }
    by_post[current_post].push_back(std::move(sentence));
    sentence = SentenceAnnotation{};
    current_post.clear();
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      if (body.rfind("post_id", 0) == 0) {
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
          throw data_error(fmt::format("{}:{}: malformed post_id comment", source_name, line_no));
        }
        flush();
        current_post = trim(std::string_view(body).substr(eq + 1));
        if (!known.count(current_post)) {
          throw data_error(
              fmt::format("{}:{}: annotation for unknown post '{}'", source_name, line_no, current_post));
        }
      }
      continue;
    }
    auto cols = split(line, '\t');
    if (cols.size() == 1) {
      std::istringstream ss(line);
      cols.clear();
      for (std::string f; ss >> f;) cols.push_back(f);
    }
    std::size_t i_form = 1, i_upos = 2, i_head = 3, i_rel = 4;
    if (cols.size() >= 10) {
      i_upos = 3;
      i_head = 6;
      i_rel = 7;
    } else if (cols.size() != 5) {
      throw data_error(fmt::format("{}:{}: expected 5 or 10 columns, found {}", source_name,
                                   line_no, cols.size()));
    }
    // Multiword ranges (1-2) and empty nodes (1.1) carry no tree structure.
    if (cols[0].find_first_of("-.") != std::string::npos) continue;
    if (sentence.tokens.empty()) sentence_line = line_no;
    AnnotatedToken tok;
    try {
      tok.index = std::stoi(cols[0]);
      tok.head = std::stoi(cols[i_head]);
    } catch (const std::exception&) {
      throw data_error(fmt::format("{}:{}: non-numeric index or head", source_name, line_no));
    }
    tok.form = cols[i_form];
    tok.upos = cols[i_upos];
    tok.deprel = cols[i_rel];
    sentence.tokens.push_back(std::move(tok));
  }
  flush();

  std::vector<Post> posts = corpus.all_posts();
  for (auto& p : posts) {
    if (auto it = by_post.find(p.post_id); it != by_post.end()) p.annotation = std::move(it->second);
  }
  return Corpus::from_posts(std::move(posts), corpus.language(), corpus.provenance());
}

Corpus attach_annotations(const Corpus& corpus, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error(fmt::format("cannot open annotation file '{}'", path.string()));
  return attach_annotations(corpus, in, path.string());
}

void write_annotations(const Corpus& corpus, std::ostream& out, const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << "\n\n";
  for (const auto& [author, posts] : corpus.authors()) {
    for (const auto& p : posts) {
      if (!p.annotation) continue;
      for (const auto& s : *p.annotation) {
        out << "# post_id = " << p.post_id << '\n';
        for (const auto& t : s.tokens) {
          out << t.index << '\t' << t.form << '\t' << t.upos << '\t' << t.head << '\t' << t.deprel
              << '\n';
        }
        out << '\n';
      }
    }
  }
}

}  // namespace acclink::corpus
