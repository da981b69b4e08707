#include "acclink/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "acclink/csv.hpp"
#include "acclink/error.hpp"
#include "acclink/netgraph.hpp"
#include "acclink/parallel.hpp"
#include "acclink/random.hpp"
#include "acclink/statsel.hpp"
#include "acclink/utf8.hpp"

namespace acclink::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using pairmodel::MethodId;
using textfeat::Category;

constexpr int kArtifactVersion = 1;

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages = {Stage::Ingest,  Stage::Synth,   Stage::GroundTruth,
                                            Stage::Extract, Stage::Pair,    Stage::Analyze,
                                            Stage::Train,   Stage::Evaluate, Stage::Report};
  return stages;
}

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Synth: return "synth";
    case Stage::GroundTruth: return "groundtruth";
    case Stage::Extract: return "extract";
    case Stage::Pair: return "pair";
    case Stage::Analyze: return "analyze";
    case Stage::Train: return "train";
    case Stage::Evaluate: return "evaluate";
    case Stage::Report: return "report";
  }
  return "?";
}

Stage parse_stage(const std::string& name) {
  for (auto s : all_stages()) {
    if (to_string(s) == name) return s;
  }
  throw usage_error(fmt::format("unknown command '{}'", name));
}

namespace artifacts {

std::string features_file(Category c) { return "features_" + utf8::to_lower(textfeat::to_string(c)) + ".csv"; }
std::string pairs_file(MethodId m) { return "pairs/" + pairmodel::to_string(m) + ".csv"; }
std::string model_file(MethodId m, learners::ModelKind k) {
  return "models/" + pairmodel::to_string(m) + "__" + learners::to_string(k) + ".model";
}

}  // namespace artifacts

std::string stage_hash(const RunConfig& config, Stage s) {
  std::vector<std::string> scope = {"run.language", "data.corpus", "data.annotations", "synth."};
  auto add = [&](std::initializer_list<const char*> more) { scope.insert(scope.end(), more.begin(), more.end()); };
  if (s != Stage::Ingest && s != Stage::Synth) add({"run.seed", "groundtruth."});
  if (s >= Stage::Extract) add({"data.lexicon_dir", "features.syntactic"});
  if (s >= Stage::Pair) add({"data.embeddings", "features.", "methods."});
  if (s == Stage::Analyze) add({"analyze."});
  if (s == Stage::Train || s == Stage::Evaluate || s == Stage::Report) add({"classifiers."});
  if (s == Stage::Evaluate || s == Stage::Report) add({"eval."});
  std::string text = to_string(s == Stage::Synth ? Stage::Ingest : s) + "\n";
  for (const auto& [k, v] : config.values()) {
    const bool in_scope = std::any_of(scope.begin(), scope.end(), [&](const std::string& p) {
      return p.back() == '.' ? k.rfind(p, 0) == 0 : k == p;
    });
    if (in_scope) text += k + "=" + v + "\n";
  }
  return fmt::format("{:016x}", fnv1a64(text));
}

namespace {

std::string header_line(const std::string& artifact, const std::string& hash) {
  return fmt::format("acclink artifact={} version={} config_hash={}", artifact, kArtifactVersion, hash);
}

std::string json_meta_line(const std::string& artifact, const std::string& hash) {
  json j;
  j["acclink"] = {{"artifact", artifact}, {"version", kArtifactVersion}, {"config_hash", hash}};
  return j.dump();
}

// Writes through a temporary file so an interrupted stage never leaves a
// truncated artifact behind.
template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw data_error(fmt::format("cannot write {}", tmp.string()));
    fn(out);
    out.flush();
    if (!out) throw data_error(fmt::format("error while writing {}", tmp.string()));
  }
  fs::rename(tmp, path);
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error(fmt::format("cannot open {}", path.string()));
  return in;
}

/// Config hash recorded in an artifact, if any.
std::optional<std::string> recorded_hash(const fs::path& path) {
  std::ifstream in(path);
  if (path.extension() == ".json") {
    const auto j = json::parse(in, nullptr, false);
    if (j.is_object() && j.contains("acclink")) return j["acclink"].value("config_hash", "");
    return std::nullopt;
  }
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  if (line.rfind('{', 0) == 0) {
    const auto j = json::parse(line, nullptr, false);
    if (j.is_object() && j.contains("acclink")) return j["acclink"].value("config_hash", "");
    return std::nullopt;
  }
  if (line.rfind("# acclink ", 0) != 0) return std::nullopt;
  std::istringstream fields(line);
  for (std::string f; fields >> f;) {
    if (f.rfind("config_hash=", 0) == 0) return f.substr(12);
  }
  return std::nullopt;
}

struct AccountTable {
  std::vector<std::string> accounts;
  std::vector<textfeat::FeatureVector> vectors;
};

void write_feature_csv(const AccountTable& t, Category c, std::ostream& out, const std::string& header) {
  out << "# " << header << '\n';
  std::vector<std::string> cols = {"account"};
  const auto& names = textfeat::schema(c);
  cols.insert(cols.end(), names.begin(), names.end());
  out << csv::join(cols) << '\n';
  for (std::size_t i = 0; i < t.accounts.size(); ++i) {
    std::vector<std::string> fields = {t.accounts[i]};
    for (double v : t.vectors[i].values) fields.push_back(csv::format_double(v));
    out << csv::join(fields) << '\n';
  }
}

AccountTable read_feature_csv(const fs::path& path, Category c) {
  auto in = open_in(path);
  const auto table = csv::read_table(in, path.string());
  const auto& names = textfeat::schema(c);
  if (table.header.size() != names.size() + 1 || table.header.front() != "account" ||
      !std::equal(names.begin(), names.end(), table.header.begin() + 1)) {
    throw data_error(fmt::format("{}: header does not match the {} schema", path.string(), textfeat::to_string(c)));
  }
  AccountTable t;
  for (const auto& row : table.rows) {
    textfeat::FeatureVector v{c, names, {}};
    for (std::size_t i = 1; i < row.size(); ++i) v.values.push_back(csv::parse_double(row[i], path.string()));
    t.accounts.push_back(row[0]);
    t.vectors.push_back(std::move(v));
  }
  return t;
}

class Runner {
 public:
  Runner(const RunConfig& config, const RunOptions& options)
      : cfg_(config), s_(config.resolve()), opt_(options), out_(s_.out) {}

  void run(Stage stage) {
    fs::create_directories(out_);
    switch (stage) {
      case Stage::Ingest: ingest(); break;
      case Stage::Synth: synth(); break;
      case Stage::GroundTruth: groundtruth(); break;
      case Stage::Extract: extract(); break;
      case Stage::Pair: pair(); break;
      case Stage::Analyze: analyze(); break;
      case Stage::Train: train(); break;
      case Stage::Evaluate: evaluate(); break;
      case Stage::Report: report(); break;
    }
  }

 private:
  fs::path path(const std::string& name) const { return out_ / name; }

  void log(const std::string& msg) const {
    if (opt_.log) opt_.log(msg);
  }

  std::string hash(Stage s) const { return stage_hash(cfg_, s); }

  Stage corpus_stage() const { return s_.corpus.empty() ? Stage::Synth : Stage::Ingest; }

  // Prerequisites -----------------------------------------------------------

  std::vector<std::string> stage_outputs(Stage s) const {
    switch (s) {
      case Stage::Ingest:
      case Stage::Synth: return {artifacts::kCorpus};
      case Stage::GroundTruth: return {artifacts::kSplitCorpus, artifacts::kDataset};
      case Stage::Extract:
        return {artifacts::kExtractMeta, artifacts::features_file(Category::Activity),
                artifacts::features_file(Category::Linguistic), artifacts::features_file(Category::Network)};
      case Stage::Pair: return {artifacts::kPairMeta};
      case Stage::Evaluate: return {artifacts::kReport};
      default: return {};
    }
  }

  std::optional<Stage> upstream(Stage s) const {
    switch (s) {
      case Stage::GroundTruth: return corpus_stage();
      case Stage::Extract: return Stage::GroundTruth;
      case Stage::Pair: return Stage::Extract;
      case Stage::Analyze:
      case Stage::Train:
      case Stage::Evaluate: return Stage::Pair;
      case Stage::Report: return Stage::Evaluate;
      default: return std::nullopt;
    }
  }

  void check_file(const std::string& name, Stage producer) const {
    const auto p = path(name);
    if (!fs::exists(p)) {
      throw prerequisite_error(fmt::format("missing {}: run `acclink {}` first", p.string(), to_string(producer)));
    }
    const auto expected = hash(producer);
    const auto found = recorded_hash(p);
    if (found && *found == expected) return;
    const auto msg = fmt::format("{} was produced under a different configuration (hash {} vs {}); rerun `acclink {}`",
                                 p.string(), found.value_or("none"), expected, to_string(producer));
    if (!opt_.force) throw prerequisite_error(msg + " or pass --force");
    log("warning: " + msg);
  }

  // Walks upstream first so the error names the earliest missing command.
  void require(Stage s) const {
    if (auto up = upstream(s)) require(*up);
    for (const auto& f : stage_outputs(s)) check_file(f, s);
  }

  void require_pairs(MethodId m) const {
    require(Stage::Pair);
    const auto f = artifacts::pairs_file(m);
    if (!fs::exists(path(f))) {
      throw prerequisite_error(fmt::format("missing {}: add {} to methods.ids and run `acclink pair`",
                                           path(f).string(), pairmodel::to_string(m)));
    }
    check_file(f, Stage::Pair);
  }

  // Loading -----------------------------------------------------------------

  corpus::Corpus load_corpus(const std::string& name) const {
    auto c = corpus::ingest_posts(path(name), s_.language);
    if (fs::exists(path(artifacts::kAnnotations))) c = corpus::attach_annotations(c, path(artifacts::kAnnotations));
    return c;
  }

  std::vector<groundtruth::LabeledPair> load_dataset() const {
    auto in = open_in(path(artifacts::kDataset));
    return groundtruth::read_pairs_csv(in, path(artifacts::kDataset).string());
  }

  static std::vector<std::string> dataset_accounts(const std::vector<groundtruth::LabeledPair>& pairs) {
    std::set<std::string> ids;
    for (const auto& p : pairs) {
      ids.insert(p.account_a);
      ids.insert(p.account_b);
    }
    return {ids.begin(), ids.end()};
  }

  learners::Dataset load_pairs(MethodId m) const {
    const auto p = path(artifacts::pairs_file(m));
    auto in = open_in(p);
    auto t = pairmodel::read_pair_csv(in, p.string());
    learners::Dataset d;
    d.names = std::move(t.names);
    d.rows = std::move(t.values);
    for (const auto& pr : t.pairs) d.labels.push_back(pr.label == groundtruth::Label::Linked ? 1 : 0);
    return d;
  }

  // Stages ------------------------------------------------------------------

  void write_corpus(const corpus::Corpus& c, Stage producer) {
    const auto h = hash(producer);
    write_file(path(artifacts::kCorpus),
               [&](std::ostream& o) { corpus::write_posts(c, o, json_meta_line("corpus", h)); });
    bool annotated = false;
    for (const auto& [a, posts] : c.authors()) {
      for (const auto& p : posts) annotated = annotated || p.annotation.has_value();
    }
    if (annotated) {
      write_file(path(artifacts::kAnnotations),
                 [&](std::ostream& o) { corpus::write_annotations(c, o, header_line("annotations", h)); });
    } else {
      fs::remove(path(artifacts::kAnnotations));
    }
    log(fmt::format("corpus: {} authors, {} posts{}", c.author_count(), c.post_count(),
                    annotated ? ", with annotations" : ""));
  }

  void ingest() {
    if (s_.corpus.empty()) throw usage_error("ingest needs data.corpus (or use `acclink synth`)");
    auto c = corpus::ingest_posts(s_.corpus, s_.language);
    if (!s_.annotations.empty()) c = corpus::attach_annotations(c, s_.annotations);
    write_corpus(c, Stage::Ingest);
    fs::remove(path(artifacts::kEmbeddings));
  }

  void synth() {
    const auto c = corpus::generate_synthetic_corpus(s_.synth);
    write_corpus(c, Stage::Synth);
    pairmodel::EmbeddingTable emb(pairmodel::kMinEmbeddingDim);
    for (auto& wv : corpus::synthetic_embeddings(s_.synth.style_seed, pairmodel::kMinEmbeddingDim)) {
      if (wv.word.find(' ') == std::string::npos) emb.add(wv.word, std::move(wv.values));
    }
    write_file(path(artifacts::kEmbeddings),
               [&](std::ostream& o) { emb.write(o, header_line("embeddings", hash(Stage::Synth))); });
    log(fmt::format("embeddings: {} words, dimension {}", emb.size(), emb.dimension()));
  }

  void groundtruth() {
    require(corpus_stage());
    const auto c = load_corpus(artifacts::kCorpus);
    const auto gt = groundtruth::build_ground_truth(c, s_.plan, s_.min_posts);
    const auto h = hash(Stage::GroundTruth);
    write_file(path(artifacts::kSplitCorpus),
               [&](std::ostream& o) { corpus::write_posts(gt.split_corpus, o, json_meta_line("split_corpus", h)); });
    write_file(path(artifacts::kDataset),
               [&](std::ostream& o) { groundtruth::write_pairs_csv(gt.pairs, o, header_line("dataset", h)); });
    const auto linked = std::count_if(gt.pairs.begin(), gt.pairs.end(),
                                      [](const auto& p) { return p.label == groundtruth::Label::Linked; });
    log(fmt::format("ground truth: {} sources, {} linked and {} non-linked pairs ({} split)", gt.sources.size(),
                    linked, gt.pairs.size() - static_cast<std::size_t>(linked), groundtruth::to_string(s_.plan.mode)));
  }

  void extract() {
    require(Stage::GroundTruth);
    const auto c = load_corpus(artifacts::kSplitCorpus);
    const auto accounts = dataset_accounts(load_dataset());
    const auto lex = textfeat::LexiconSet::load(s_.lexicon_dir);

    std::vector<textfeat::FeatureVector> act(accounts.size()), ling(accounts.size()), net(accounts.size());
    std::vector<char> zero_filled(accounts.size(), 0);
    parallel_for(accounts.size(), s_.jobs, [&](std::size_t i) {
      if (!c.has_author(accounts[i])) {
        throw data_error(fmt::format("dataset account '{}' has no posts in the split corpus", accounts[i]));
      }
      const auto& posts = c.posts_of(accounts[i]);
      act[i] = textfeat::activity_features(posts);
      auto lr = textfeat::linguistic_features(posts, lex, s_.syntactic);
      ling[i] = std::move(lr.features);
      zero_filled[i] = lr.syntactic_zero_filled ? 1 : 0;
    });

    const auto graph = netgraph::build_graph(c, accounts);
    netgraph::NetworkOptions nopt;
    nopt.accept_last_iterate = true;
    const netgraph::NetworkAnalysis analysis(graph, nopt);
    for (std::size_t i = 0; i < accounts.size(); ++i) net[i] = analysis.features(accounts[i]);

    const auto h = hash(Stage::Extract);
    const std::vector<std::pair<Category, std::vector<textfeat::FeatureVector>*>> blocks = {
        {Category::Activity, &act}, {Category::Linguistic, &ling}, {Category::Network, &net}};
    for (const auto& [cat, vecs] : blocks) {
      AccountTable t{accounts, *vecs};
      write_file(path(artifacts::features_file(cat)), [&](std::ostream& o) {
        write_feature_csv(t, cat, o, header_line(artifacts::features_file(cat), h));
      });
    }
    write_file(path(artifacts::kGraph),
               [&](std::ostream& o) { netgraph::write_edge_list(graph, o, header_line("graph", h)); });

    json meta;
    meta["acclink"] = {{"artifact", "extract_meta"}, {"version", kArtifactVersion}, {"config_hash", h}};
    meta["accounts"] = accounts.size();
    meta["graph_nodes"] = graph.node_count();
    meta["graph_edges"] = graph.edge_count();
    meta["network_flags"] = analysis.flags();
    json zf = json::array();
    for (std::size_t i = 0; i < accounts.size(); ++i) {
      if (zero_filled[i]) zf.push_back(accounts[i]);
    }
    meta["syntactic_zero_filled"] = zf;
    write_file(path(artifacts::kExtractMeta), [&](std::ostream& o) { o << meta.dump(2) << '\n'; });
    log(fmt::format("features: {} accounts, graph {} nodes / {} edges{}", accounts.size(), graph.node_count(),
                    graph.edge_count(), zf.empty() ? "" : fmt::format(", {} without syntax", zf.size())));
  }

  pairmodel::EmbeddingTable load_embeddings() const {
    if (!s_.embeddings.empty()) return pairmodel::EmbeddingTable::load(s_.embeddings);
    if (fs::exists(path(artifacts::kEmbeddings))) {
      check_file(artifacts::kEmbeddings, corpus_stage());
      return pairmodel::EmbeddingTable::load(path(artifacts::kEmbeddings));
    }
    throw prerequisite_error(
        "+edits+sem methods need word embeddings: set data.embeddings or run `acclink synth`");
  }

  void pair() {
    require(Stage::Extract);
    const auto pairs = load_dataset();
    pairmodel::FeatureStore store;
    {
      const auto a = read_feature_csv(path(artifacts::features_file(Category::Activity)), Category::Activity);
      const auto l = read_feature_csv(path(artifacts::features_file(Category::Linguistic)), Category::Linguistic);
      const auto n = read_feature_csv(path(artifacts::features_file(Category::Network)), Category::Network);
      if (a.accounts != l.accounts || a.accounts != n.accounts) {
        throw data_error("feature files list different accounts; rerun `acclink extract`");
      }
      for (std::size_t i = 0; i < a.accounts.size(); ++i) {
        store.add(a.accounts[i], {a.vectors[i], l.vectors[i], n.vectors[i]});
      }
    }
    store.fit_scalers();

    const bool need_text = std::any_of(s_.methods.begin(), s_.methods.end(),
                                       [](MethodId m) { return pairmodel::blocks_of(m).edits_sem; });
    std::vector<pairmodel::TextScores> text(pairs.size());
    std::size_t edit_flags = 0, sem_flags = 0, center_flags = 0;
    if (need_text) {
      const auto emb = load_embeddings();
      const auto c = load_corpus(artifacts::kSplitCorpus);
      const auto accounts = dataset_accounts(pairs);
      std::map<std::string, std::size_t> index;
      std::vector<std::vector<std::u32string>> decoded(accounts.size());
      std::vector<pairmodel::SemanticCenter> centers(accounts.size());
      for (std::size_t i = 0; i < accounts.size(); ++i) index[accounts[i]] = i;
      parallel_for(accounts.size(), s_.jobs, [&](std::size_t i) {
        std::vector<std::string> norm;
        for (const auto& p : c.posts_of(accounts[i])) norm.push_back(corpus::normalize_for_similarity(p));
        for (const auto& t : norm) decoded[i].push_back(utf8::decode(t));
        centers[i] = pairmodel::semantic_center(norm, emb);
      });
      for (const auto& ce : centers) center_flags += ce.flagged ? 1 : 0;
      parallel_for(pairs.size(), s_.jobs, [&](std::size_t k) {
        // Canonical account order keeps sampled edit scores symmetric.
        auto a = pairs[k].account_a, b = pairs[k].account_b;
        if (b < a) std::swap(a, b);
        const auto ia = index.at(a), ib = index.at(b);
        pairmodel::EditOptions eo{s_.edit_mode, s_.edit_sample_cap, derive_seed(s_.seed, "edits:" + a + "|" + b)};
        text[k].edits = pairmodel::edit_similarity(decoded[ia], decoded[ib], eo);
        const bool sem_flag = centers[ia].flagged || centers[ib].flagged;
        text[k].sem = {pairmodel::semantic_similarity(centers[ia].center, centers[ib].center), sem_flag};
      });
      for (const auto& t : text) {
        edit_flags += t.edits.flagged ? 1 : 0;
        sem_flags += t.sem.flagged ? 1 : 0;
      }
    }

    const auto h = hash(Stage::Pair);
    fs::create_directories(path("pairs"));
    for (auto m : s_.methods) {
      const auto names = pairmodel::method_feature_names(m, s_.assembly);
      std::vector<pairmodel::PairInstance> rows(pairs.size());
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        rows[k] = pairmodel::assemble_pair(pairs[k], m, store, need_text ? &text[k] : nullptr, s_.assembly);
      }
      write_file(path(artifacts::pairs_file(m)), [&](std::ostream& o) {
        pairmodel::write_pair_csv(rows, m, names, o, header_line("pairs", h));
      });
      log(fmt::format("pairs {}: {} rows x {} features", pairmodel::to_string(m), rows.size(), names.size()));
    }
    json meta;
    meta["acclink"] = {{"artifact", "pair_meta"}, {"version", kArtifactVersion}, {"config_hash", h}};
    json methods = json::array();
    for (auto m : s_.methods) methods.push_back(pairmodel::to_string(m));
    meta["methods"] = methods;
    meta["pairs"] = pairs.size();
    meta["similarity_metric"] = pairmodel::to_string(s_.assembly.metric);
    meta["edit_mode"] = pairmodel::to_string(s_.edit_mode);
    meta["exclude"] = s_.assembly.exclude;
    meta["edits_flagged_pairs"] = edit_flags;
    meta["sem_flagged_pairs"] = sem_flags;
    meta["accounts_without_semantic_center"] = center_flags;
    write_file(path(artifacts::kPairMeta), [&](std::ostream& o) { o << meta.dump(2) << '\n'; });
  }

  void analyze() {
    require_pairs(s_.analyze_method);
    const auto d = load_pairs(s_.analyze_method);
    statsel::ClassSamples cs;
    cs.names = d.names;
    cs.labels = d.labels;
    cs.values.assign(d.features(), std::vector<double>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t f = 0; f < d.features(); ++f) cs.values[f][i] = d.rows[i][f];
    }
    const auto ks = statsel::ks_filter(cs, s_.alpha, s_.jobs);
    const auto ig = statsel::info_gain_rank(cs, s_.bins);
    const auto h = hash(Stage::Analyze);
    write_file(path(artifacts::kKsReport),
               [&](std::ostream& o) { statsel::write_ks_report(ks.report, s_.alpha, o, header_line("ks_report", h)); });
    write_file(path(artifacts::kEcdf), [&](std::ostream& o) { statsel::write_ecdf_csv(cs, o, header_line("ecdf", h)); });
    write_file(path(artifacts::kIgReport),
               [&](std::ostream& o) { statsel::write_ig_report(ig, o, header_line("ig_report", h)); });
    log(fmt::format("analyze {}: {} of {} features differ at p < {}", pairmodel::to_string(s_.analyze_method),
                    ks.kept.size(), cs.names.size(), s_.alpha));
    for (std::size_t i = 0; i < std::min<std::size_t>(5, ig.size()); ++i) {
      log(fmt::format("  IG #{} {} = {:.4f} bits ({:.1f}%)", i + 1, ig[i].feature, ig[i].ig, ig[i].share));
    }
  }

  void train() {
    for (auto m : s_.methods) require_pairs(m);
    const auto h = hash(Stage::Train);
    for (auto m : s_.methods) {
      const auto d = load_pairs(m);
      for (const auto& spec : s_.classifiers) {
        auto sp = spec;
        sp.forest.jobs = s_.jobs;
        const auto model = learners::train(sp, d);
        write_file(path(artifacts::model_file(m, spec.kind)),
                   [&](std::ostream& o) { model.save(o, header_line("model", h)); });
        log(fmt::format("trained {} on {}", learners::display_name(spec.kind), pairmodel::to_string(m)));
      }
    }
  }

  void evaluate() {
    for (auto m : s_.methods) require_pairs(m);
    std::vector<eval::ReportRow> rows;
    json cells = json::array();
    std::vector<std::uint64_t> fold_seeds;
    for (auto m : s_.methods) {
      const auto d = load_pairs(m);
      for (const auto& spec : s_.classifiers) {
        const auto r = eval::repeated_cv(d, eval::classifier_factory(spec), s_.cv);
        fold_seeds = r.fold_seeds;
        auto part = eval::report_rows(pairmodel::to_string(m), learners::display_name(spec.kind), r, s_.cv);
        rows.insert(rows.end(), part.begin(), part.end());
        log(fmt::format("{:<26} {:<12} AUC {:.2f} +- {:.2f}  Acc {:.2f}", pairmodel::to_string(m),
                        learners::display_name(spec.kind), 100.0 * r.of("auc").mean, 100.0 * r.of("auc").std,
                        100.0 * r.of("accuracy").mean));
        cells.push_back({{"method_id", pairmodel::to_string(m)},
                         {"classifier", learners::display_name(spec.kind)},
                         {"pooled_auc", r.pooled.auc},
                         {"pooled_accuracy", r.pooled.accuracy}});
      }
    }
    const auto h = hash(Stage::Evaluate);
    write_file(path(artifacts::kReport), [&](std::ostream& o) { eval::write_report_csv(rows, o, header_line("report", h)); });

    json meta;
    meta["acclink"] = {{"artifact", "report_meta"}, {"version", kArtifactVersion}, {"config_hash", h}};
    meta["full_config_hash"] = cfg_.hash();
    json snapshot;
    for (const auto& [k, v] : cfg_.values()) {
      if (k != "run.out" && k != "run.jobs") snapshot[k] = v;
    }
    meta["config"] = snapshot;
    meta["repeats"] = s_.cv.repeats;
    meta["folds"] = s_.cv.folds;
    meta["cv_seed"] = s_.cv.seed;
    meta["fold_seeds"] = fold_seeds;
    meta["averaging"] = eval::to_string(s_.cv.averaging);
    meta["metrics_unit"] = "percent";
    meta["cells"] = cells;
    meta["notes"] = json::array(
        {"NaiveBayes is Gaussian naive Bayes, standing in for a Bayesian-network classifier",
         "DecisionTree splits on gain ratio without pruning"});
    write_file(path(artifacts::kReportMeta), [&](std::ostream& o) { o << meta.dump(2) << '\n'; });
  }

  void report() {
    require(Stage::Evaluate);
    auto in = open_in(path(artifacts::kReport));
    const auto rows = eval::read_report_csv(in, path(artifacts::kReport).string());
    if (rows.empty()) throw data_error("report.csv holds no rows; rerun `acclink evaluate`");
    const auto table = eval::summarize(rows);
    write_file(path(artifacts::kSummary), [&](std::ostream& o) {
      eval::write_summary_csv(table, o, header_line("summary", hash(Stage::Report)));
    });
    std::istringstream lines(eval::format_table(table));
    for (std::string l; std::getline(lines, l);) log(l);
  }

  const RunConfig& cfg_;
  Settings s_;
  RunOptions opt_;
  fs::path out_;
};

}  // namespace

void run_stage(Stage stage, const RunConfig& config, const RunOptions& options) {
  Runner(config, options).run(stage);
}

}  // namespace acclink::pipeline
