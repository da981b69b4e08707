#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "acclink/corpus.hpp"
#include "acclink/evalharness.hpp"
#include "acclink/groundtruth.hpp"
#include "acclink/learners.hpp"
#include "acclink/pairmodel.hpp"
#include "acclink/synth.hpp"

namespace acclink::pipeline {

/// Typed view of a run configuration.
struct Settings {
  std::string language;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  std::filesystem::path corpus;       // empty: use the synthetic corpus
  std::filesystem::path annotations;  // optional CoNLL-U file
  std::filesystem::path lexicon_dir;
  std::filesystem::path embeddings;   // empty: the run's own embeddings.txt, if any

  corpus::SynthParams synth;
  groundtruth::SplitPlan plan;
  std::size_t min_posts = groundtruth::kMinPostsDefault;

  pairmodel::AssemblyOptions assembly;
  bool syntactic = true;
  pairmodel::EditMode edit_mode = pairmodel::EditMode::Normalized;
  std::size_t edit_sample_cap = 0;

  std::vector<pairmodel::MethodId> methods;
  std::vector<learners::ClassifierSpec> classifiers;

  eval::CvOptions cv;

  pairmodel::MethodId analyze_method = pairmodel::MethodId::AllSimAllAbsEditsSem;
  double alpha = 0.01;
  std::size_t bins = 10;
};

/// Flat "section.key" -> value store with defaults for every known key.
///
/// The file format is INI-like:
///
///   [groundtruth]
///   users = 200
///   mode = random
///
/// Paths in a file resolve against the file's directory. Environment variables
/// ACCLINK_<SECTION>_<KEY> (e.g. ACCLINK_DATA_CORPUS) override path keys.
class RunConfig {
 public:
  RunConfig();

  static RunConfig load(const std::filesystem::path& path);
  static RunConfig parse(std::istream& in, const std::string& source_name,
                         const std::filesystem::path& base_dir = {});

  /// Throws a usage error for unknown keys.
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Applies ACCLINK_* environment overrides for path keys.
  void apply_env_overrides();

  /// Every key except run.out and run.jobs, which do not change results.
  std::string canonical() const;
  /// 16 hex digits of FNV-1a over canonical().
  std::string hash() const;

  /// Parses and checks every value; referenced input paths must exist.
  Settings resolve() const;

  static const std::vector<std::string>& path_keys();

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace acclink::pipeline
