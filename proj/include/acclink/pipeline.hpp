#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "acclink/config.hpp"

namespace acclink::pipeline {

enum class Stage { Ingest, Synth, GroundTruth, Extract, Pair, Analyze, Train, Evaluate, Report };

const std::vector<Stage>& all_stages();
std::string to_string(Stage s);
Stage parse_stage(const std::string& name);

using LogFn = std::function<void(const std::string&)>;

struct RunOptions {
  bool force = false;  // accept upstream artifacts produced under another config
  LogFn log;
};

/// Artifact file names inside the output directory.
namespace artifacts {
inline constexpr const char* kCorpus = "corpus.jsonl";
inline constexpr const char* kAnnotations = "annotations.conllu";
inline constexpr const char* kEmbeddings = "embeddings.txt";
inline constexpr const char* kSplitCorpus = "split_corpus.jsonl";
inline constexpr const char* kDataset = "dataset.csv";
inline constexpr const char* kGraph = "graph.csv";
inline constexpr const char* kExtractMeta = "extract_meta.json";
inline constexpr const char* kPairMeta = "pair_meta.json";
inline constexpr const char* kKsReport = "ks_report.csv";
inline constexpr const char* kEcdf = "ecdf.csv";
inline constexpr const char* kIgReport = "ig_report.csv";
inline constexpr const char* kReport = "report.csv";
inline constexpr const char* kReportMeta = "report_meta.json";
inline constexpr const char* kSummary = "summary.csv";

std::string features_file(textfeat::Category c);
std::string pairs_file(pairmodel::MethodId m);
std::string model_file(pairmodel::MethodId m, learners::ModelKind k);
}  // namespace artifacts

/// Hash of the configuration keys that can influence the given stage's output.
std::string stage_hash(const RunConfig& config, Stage s);

/// Runs one stage. Missing upstream artifacts raise a prerequisite error that
/// names the command to run first.
void run_stage(Stage stage, const RunConfig& config, const RunOptions& options = {});

}  // namespace acclink::pipeline
