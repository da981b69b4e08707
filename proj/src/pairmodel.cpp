#include "acclink/pairmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "acclink/corpus.hpp"
#include "acclink/csv.hpp"
#include "acclink/error.hpp"
#include "acclink/random.hpp"
#include "acclink/utf8.hpp"

namespace acclink::pairmodel {

namespace {

void require_same_schema(const FeatureVector& a, const FeatureVector& b) {
  if (a.category != b.category || a.names != b.names || a.values.size() != b.values.size()) {
    throw data_error(fmt::format("feature schema mismatch ({} with {} values vs {} with {} values)",
                                 textfeat::to_string(a.category), a.size(),
                                 textfeat::to_string(b.category), b.size()));
  }
}

bool is_excluded(const std::string& name, const std::vector<std::string>& exclude) {
  return std::find(exclude.begin(), exclude.end(), name) != exclude.end();
}

std::string category_key(Category c) { return utf8::to_lower(textfeat::to_string(c)); }

}  // namespace

std::vector<double> abs_diff(const FeatureVector& a, const FeatureVector& b) {
  require_same_schema(a, b);
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(a.values[i] - b.values[i]);
  return d;
}

MinMaxScaler MinMaxScaler::fit(const std::vector<FeatureVector>& vectors) {
  if (vectors.empty()) throw data_error("min-max scaling needs at least one vector");
  MinMaxScaler s;
  s.category_ = vectors.front().category;
  s.names_ = vectors.front().names;
  s.min_ = vectors.front().values;
  s.max_ = vectors.front().values;
  for (const auto& v : vectors) {
    require_same_schema(vectors.front(), v);
    for (std::size_t i = 0; i < v.size(); ++i) {
      s.min_[i] = std::min(s.min_[i], v.values[i]);
      s.max_[i] = std::max(s.max_[i], v.values[i]);
    }
  }
  return s;
}

FeatureVector MinMaxScaler::apply(const FeatureVector& v) const {
  if (v.category != category_ || v.names != names_) {
    throw data_error(fmt::format("scaler fitted on {} features cannot scale {} features",
                                 textfeat::to_string(category_), textfeat::to_string(v.category)));
  }
  FeatureVector out = v;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double range = max_[i] - min_[i];
    out.values[i] = range > 0.0 ? std::clamp((v.values[i] - min_[i]) / range, 0.0, 1.0) : 0.0;
  }
  return out;
}

SimilarityMetric parse_similarity_metric(const std::string& name) {
  const auto n = utf8::to_lower(name);
  if (n == "cosine") return SimilarityMetric::Cosine;
  if (n == "euclidean") return SimilarityMetric::Euclidean;
  if (n == "manhattan") return SimilarityMetric::Manhattan;
  throw usage_error(fmt::format("unknown similarity metric '{}' (cosine, euclidean, manhattan)", name));
}

std::string to_string(SimilarityMetric m) {
  switch (m) {
    case SimilarityMetric::Cosine: return "cosine";
    case SimilarityMetric::Euclidean: return "euclidean";
    case SimilarityMetric::Manhattan: return "manhattan";
  }
  return "?";
}

double category_similarity(const std::vector<double>& a, const std::vector<double>& b,
                           SimilarityMetric metric) {
  if (a.size() != b.size() || a.empty()) {
    throw data_error(fmt::format("similarity needs equal nonempty lengths ({} vs {})", a.size(), b.size()));
  }
  const double n = static_cast<double>(a.size());
  switch (metric) {
    case SimilarityMetric::Cosine: return semantic_similarity(a, b);
    case SimilarityMetric::Euclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
      return std::clamp(1.0 - std::sqrt(s) / std::sqrt(n), 0.0, 1.0);
    }
    case SimilarityMetric::Manhattan: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
      return std::clamp(1.0 - s / n, 0.0, 1.0);
    }
  }
  return 0.0;
}

std::size_t levenshtein(const std::u32string& s, const std::u32string& t) {
  std::size_t lo = 0;
  while (lo < s.size() && lo < t.size() && s[lo] == t[lo]) ++lo;
  std::size_t hs = s.size(), ht = t.size();
  while (hs > lo && ht > lo && s[hs - 1] == t[ht - 1]) {
    --hs;
    --ht;
  }
  const char32_t* a = s.data() + lo;
  const char32_t* b = t.data() + lo;
  std::size_t n = hs - lo, m = ht - lo;
  if (n < m) {
    std::swap(a, b);
    std::swap(n, m);
  }
  if (m == 0) return n;
  std::vector<std::size_t> row(m + 1);
  for (std::size_t j = 0; j <= m; ++j) row[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    const char32_t ca = a[i - 1];
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (ca == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[m];
}

std::size_t levenshtein(std::string_view s, std::string_view t) {
  return levenshtein(utf8::decode(s), utf8::decode(t));
}

EditMode parse_edit_mode(const std::string& name) {
  const auto n = utf8::to_lower(name);
  if (n == "normalized") return EditMode::Normalized;
  if (n == "raw") return EditMode::Raw;
  throw usage_error(fmt::format("unknown edit mode '{}' (normalized, raw)", name));
}

std::string to_string(EditMode m) { return m == EditMode::Normalized ? "normalized" : "raw"; }

FlaggedScore edit_similarity(const std::vector<std::u32string>& posts_a,
                             const std::vector<std::u32string>& posts_b, const EditOptions& options) {
  std::vector<const std::u32string*> a, b;
  for (const auto& p : posts_a) {
    if (!p.empty()) a.push_back(&p);
  }
  for (const auto& p : posts_b) {
    if (!p.empty()) b.push_back(&p);
  }
  if (a.empty() || b.empty()) return {0.0, true};

  auto distance = [&](const std::u32string& p, const std::u32string& q) {
    const double d = static_cast<double>(levenshtein(p, q));
    if (options.mode == EditMode::Raw) return d;
    return d / static_cast<double>(std::max(p.size(), q.size()));
  };
  const std::size_t total = a.size() * b.size();
  double sum = 0.0;
  if (options.sample_cap == 0 || total <= options.sample_cap) {
    for (const auto* p : a) {
      for (const auto* q : b) sum += distance(*p, *q);
    }
    return {sum / static_cast<double>(total), false};
  }
  Rng rng = make_rng(options.seed);
  for (std::size_t k = 0; k < options.sample_cap; ++k) {
    const auto idx = uniform_index(rng, total);
    sum += distance(*a[idx / b.size()], *b[idx % b.size()]);
  }
  return {sum / static_cast<double>(options.sample_cap), false};
}

FlaggedScore edit_similarity(const std::vector<std::string>& posts_a, const std::vector<std::string>& posts_b,
                             const EditOptions& options) {
  std::vector<std::u32string> a, b;
  for (const auto& p : posts_a) a.push_back(utf8::decode(p));
  for (const auto& p : posts_b) b.push_back(utf8::decode(p));
  return edit_similarity(a, b, options);
}

// Embeddings ----------------------------------------------------------------

EmbeddingTable::EmbeddingTable(std::size_t dimension) : dim_(dimension) {
  if (dim_ < kMinEmbeddingDim || dim_ > kMaxEmbeddingDim) {
    throw data_error(fmt::format("embedding dimension {} outside [{}, {}]", dim_, kMinEmbeddingDim,
                                 kMaxEmbeddingDim));
  }
}

void EmbeddingTable::add(const std::string& token, std::vector<double> vector) {
  if (vector.size() != dim_) {
    throw data_error(fmt::format("embedding for '{}' has {} values, expected {}", token, vector.size(), dim_));
  }
  vectors_[token] = std::move(vector);
}

const std::vector<double>* EmbeddingTable::find(const std::string& token) const {
  auto it = vectors_.find(token);
  return it == vectors_.end() ? nullptr : &it->second;
}

EmbeddingTable EmbeddingTable::parse(std::istream& in, const std::string& source_name) {
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (first && line.front() == '#')) continue;
    std::istringstream fields(line);
    std::vector<std::string> parts;
    for (std::string f; fields >> f;) parts.push_back(f);
    if (parts.empty()) continue;
    if (first) {
      first = false;
      if (parts.size() == 2 && parts[0].find_first_not_of("0123456789") == std::string::npos &&
          parts[1].find_first_not_of("0123456789") == std::string::npos) {
        table = EmbeddingTable(std::stoul(parts[1]));
        continue;
      }
      table = EmbeddingTable(parts.size() - 1);
    }
    std::vector<double> v;
    v.reserve(parts.size() - 1);
    for (std::size_t i = 1; i < parts.size(); ++i) {
      v.push_back(csv::parse_double(parts[i], fmt::format("{}:{}", source_name, line_no)));
    }
    if (v.size() != table.dim_) {
      throw data_error(fmt::format("{}:{}: expected {} values, got {}", source_name, line_no, table.dim_,
                                   v.size()));
    }
    table.vectors_[parts[0]] = std::move(v);
  }
  if (first) throw data_error(fmt::format("{}: no embeddings found", source_name));
  return table;
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error(fmt::format("cannot open embeddings file {}", path.string()));
  return parse(in, path.string());
}

void EmbeddingTable::write(std::ostream& out, const std::string& header_comment) const {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  std::vector<const std::string*> keys;
  for (const auto& [k, v] : vectors_) keys.push_back(&k);
  std::sort(keys.begin(), keys.end(), [](const auto* x, const auto* y) { return *x < *y; });
  out << keys.size() << ' ' << dim_ << '\n';
  for (const auto* k : keys) {
    out << *k;
    for (double v : vectors_.at(*k)) out << ' ' << csv::format_double(v);
    out << '\n';
  }
}

std::vector<std::string> embedding_tokens(std::string_view normalized_text) {
  std::vector<std::string> out;
  for (const auto& tok : corpus::tokenize(normalized_text)) {
    auto w = utf8::to_lower(corpus::strip_punctuation(tok));
    if (!w.empty()) out.push_back(std::move(w));
  }
  return out;
}

SemanticCenter semantic_center(const std::vector<std::string>& normalized_posts, const EmbeddingTable& emb) {
  SemanticCenter result;
  result.center.assign(emb.dimension(), 0.0);
  std::size_t included = 0;
  std::vector<double> post_vec(emb.dimension());
  for (const auto& text : normalized_posts) {
    std::fill(post_vec.begin(), post_vec.end(), 0.0);
    std::size_t known = 0;
    for (const auto& tok : embedding_tokens(text)) {
      if (const auto* v = emb.find(tok)) {
        for (std::size_t i = 0; i < v->size(); ++i) post_vec[i] += (*v)[i];
        ++known;
      }
    }
    if (known == 0) continue;
    for (std::size_t i = 0; i < post_vec.size(); ++i) {
      result.center[i] += post_vec[i] / static_cast<double>(known);
    }
    ++included;
  }
  if (included == 0) {
    result.flagged = true;
    return result;
  }
  for (double& x : result.center) x /= static_cast<double>(included);
  return result;
}

double semantic_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw data_error(fmt::format("dimension mismatch ({} vs {})", a.size(), b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

// Methods -------------------------------------------------------------------

const std::vector<MethodId>& all_methods() {
  static const std::vector<MethodId> methods = {
      MethodId::ActivityAbs,         MethodId::LinguisticAbs,         MethodId::NetworkAbs,
      MethodId::AllAbs,              MethodId::ActivityAbsEditsSem,   MethodId::LinguisticAbsEditsSem,
      MethodId::NetworkAbsEditsSem,  MethodId::AllAbsEditsSem,        MethodId::AllSim,
      MethodId::AllSimAllAbs,        MethodId::AllSimAllAbsEditsSem};
  return methods;
}

std::string to_string(MethodId m) {
  switch (m) {
    case MethodId::ActivityAbs: return "Activity_abs";
    case MethodId::LinguisticAbs: return "Linguistic_abs";
    case MethodId::NetworkAbs: return "Network_abs";
    case MethodId::AllAbs: return "All_abs";
    case MethodId::ActivityAbsEditsSem: return "Activity_abs+edits+sem";
    case MethodId::LinguisticAbsEditsSem: return "Linguistic_abs+edits+sem";
    case MethodId::NetworkAbsEditsSem: return "Network_abs+edits+sem";
    case MethodId::AllAbsEditsSem: return "All_abs+edits+sem";
    case MethodId::AllSim: return "All_sim";
    case MethodId::AllSimAllAbs: return "All_sim+All_abs";
    case MethodId::AllSimAllAbsEditsSem: return "All_sim+All_abs+edits+sem";
  }
  return "?";
}

MethodId parse_method(const std::string& name) {
  std::string trimmed;
  for (char c : name) {
    if (c != ' ') trimmed += c;
  }
  for (auto m : all_methods()) {
    if (to_string(m) == trimmed) return m;
  }
  throw usage_error(fmt::format("unknown method '{}'", name));
}

MethodBlocks blocks_of(MethodId m) {
  const std::vector<Category> all = {Category::Activity, Category::Linguistic, Category::Network};
  switch (m) {
    case MethodId::ActivityAbs: return {false, {Category::Activity}, false};
    case MethodId::LinguisticAbs: return {false, {Category::Linguistic}, false};
    case MethodId::NetworkAbs: return {false, {Category::Network}, false};
    case MethodId::AllAbs: return {false, all, false};
    case MethodId::ActivityAbsEditsSem: return {false, {Category::Activity}, true};
    case MethodId::LinguisticAbsEditsSem: return {false, {Category::Linguistic}, true};
    case MethodId::NetworkAbsEditsSem: return {false, {Category::Network}, true};
    case MethodId::AllAbsEditsSem: return {false, all, true};
    case MethodId::AllSim: return {true, {}, false};
    case MethodId::AllSimAllAbs: return {true, all, false};
    case MethodId::AllSimAllAbsEditsSem: return {true, all, true};
  }
  return {};
}

const FeatureVector& FeatureStore::Account::get(Category c) const {
  switch (c) {
    case Category::Activity: return activity;
    case Category::Linguistic: return linguistic;
    case Category::Network: return network;
  }
  return activity;
}

void FeatureStore::add(const std::string& account, Account features) {
  accounts_[account] = std::move(features);
  scalers_.clear();
}

const FeatureStore::Account& FeatureStore::account(const std::string& id) const {
  auto it = accounts_.find(id);
  if (it == accounts_.end()) {
    throw data_error(fmt::format("no extracted features for account '{}' (run extract)", id));
  }
  return it->second;
}

void FeatureStore::fit_scalers() {
  scalers_.clear();
  for (auto c : {Category::Activity, Category::Linguistic, Category::Network}) {
    std::vector<FeatureVector> vs;
    for (const auto& [id, acc] : accounts_) vs.push_back(acc.get(c));
    scalers_.push_back(MinMaxScaler::fit(vs));
  }
}

const MinMaxScaler& FeatureStore::scaler(Category c) const {
  if (scalers_.empty()) throw Error(ErrorKind::Internal, "feature scalers used before fit_scalers()");
  return scalers_[static_cast<std::size_t>(c)];
}

std::vector<std::string> method_feature_names(MethodId m, const AssemblyOptions& options) {
  const auto blocks = blocks_of(m);
  std::vector<std::string> names;
  if (blocks.sim) {
    for (auto c : {Category::Activity, Category::Linguistic, Category::Network}) {
      names.push_back("sim_" + category_key(c));
    }
  }
  for (auto c : blocks.abs) {
    for (const auto& n : textfeat::schema(c)) {
      if (!is_excluded(n, options.exclude)) names.push_back("abs_" + n);
    }
  }
  if (blocks.edits_sem) {
    names.push_back("edits");
    names.push_back("sem");
  }
  return names;
}

PairInstance assemble_pair(const groundtruth::LabeledPair& pair, MethodId method, const FeatureStore& store,
                           const TextScores* text, const AssemblyOptions& options) {
  const auto blocks = blocks_of(method);
  const auto& fa = store.account(pair.account_a);
  const auto& fb = store.account(pair.account_b);
  PairInstance inst{pair, method, method_feature_names(method, options), {}};
  inst.values.reserve(inst.names.size());

  auto kept = [&](const FeatureVector& v) {
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!is_excluded(v.names[i], options.exclude)) out.push_back(v.values[i]);
    }
    return out;
  };

  if (blocks.sim) {
    for (auto c : {Category::Activity, Category::Linguistic, Category::Network}) {
      const auto& scaler = store.scaler(c);
      const auto a = kept(scaler.apply(fa.get(c)));
      const auto b = kept(scaler.apply(fb.get(c)));
      inst.values.push_back(category_similarity(a, b, options.metric));
    }
  }
  for (auto c : blocks.abs) {
    const auto& va = fa.get(c);
    const auto& vb = fb.get(c);
    const auto d = abs_diff(va, vb);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!is_excluded(va.names[i], options.exclude)) inst.values.push_back(d[i]);
    }
  }
  if (blocks.edits_sem) {
    if (text == nullptr) {
      throw data_error(fmt::format("method {} needs edit and semantic scores for ({}, {}) (run pair)",
                                   to_string(method), pair.account_a, pair.account_b));
    }
    inst.values.push_back(text->edits.value);
    inst.values.push_back(text->sem.value);
  }
  for (std::size_t i = 0; i < inst.values.size(); ++i) {
    if (!std::isfinite(inst.values[i])) {
      throw data_error(fmt::format("non-finite feature {} for pair ({}, {})", inst.names[i], pair.account_a,
                                   pair.account_b));
    }
  }
  return inst;
}

void write_pair_csv(const std::vector<PairInstance>& rows, MethodId method,
                    const std::vector<std::string>& names, std::ostream& out,
                    const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "# method=" << to_string(method) << '\n';
  std::vector<std::string> header = {"account_a", "account_b"};
  header.insert(header.end(), names.begin(), names.end());
  header.push_back("label");
  out << csv::join(header) << '\n';
  for (const auto& r : rows) {
    if (r.names != names) throw data_error("pair rows disagree on feature names");
    std::vector<std::string> fields = {r.pair.account_a, r.pair.account_b};
    for (double v : r.values) fields.push_back(csv::format_double(v));
    fields.push_back(groundtruth::to_string(r.pair.label));
    out << csv::join(fields) << '\n';
  }
}

PairTable read_pair_csv(std::istream& in, const std::string& source_name) {
  auto table = csv::read_table(in, source_name);
  if (table.header.size() < 3 || table.header.front() != "account_a" || table.header[1] != "account_b" ||
      table.header.back() != "label") {
    throw data_error(fmt::format("{}: expected account_a,account_b,<features>,label header", source_name));
  }
  PairTable out;
  out.comments = table.comments;
  out.names.assign(table.header.begin() + 2, table.header.end() - 1);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size()) {
      throw data_error(fmt::format("{}: row {} has {} fields, expected {}", source_name, r + 1, row.size(),
                                   table.header.size()));
    }
    groundtruth::LabeledPair p{row[0], row[1], groundtruth::Label::NonLinked};
    if (row.back() == "Linked") {
      p.label = groundtruth::Label::Linked;
    } else if (row.back() != "NonLinked") {
      throw data_error(fmt::format("{}: unknown label '{}'", source_name, row.back()));
    }
    std::vector<double> values;
    values.reserve(out.names.size());
    for (std::size_t i = 2; i + 1 < row.size(); ++i) values.push_back(csv::parse_double(row[i], source_name));
    out.pairs.push_back(std::move(p));
    out.values.push_back(std::move(values));
  }
  return out;
}

}  // namespace acclink::pairmodel
