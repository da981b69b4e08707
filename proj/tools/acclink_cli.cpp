// acclink command line: runs one pipeline stage per invocation.

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "acclink/acclink.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

int exit_code(acclink_status s) {
  switch (s) {
    case ACCLINK_OK: return kOk;
    case ACCLINK_E_USAGE: return kUsage;
    case ACCLINK_E_DATA:
    case ACCLINK_E_PREREQUISITE: return kData;
    case ACCLINK_E_INTERNAL: return kInternal;
  }
  return kInternal;
}

int report(acclink_status s) {
  if (s != ACCLINK_OK) std::fprintf(stderr, "acclink: error: %s\n", acclink_last_error());
  return exit_code(s);
}

void print_line(const char* line, void*) {
  std::printf("%s\n", line);
  std::fflush(stdout);
}

struct Options {
  std::string config;
  std::string out;
  std::optional<unsigned long long> seed;
  std::optional<unsigned> jobs;
  bool force = false;
  std::vector<std::string> overrides;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detects accounts that belong to the same person.", "acclink"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(acclink_version()));

  Options opt;
  app.add_option("--config", opt.config, "Run configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out, "Output directory (overrides run.out)");
  app.add_option("--seed", opt.seed, "Master seed (overrides run.seed)");
  app.add_option("--jobs", opt.jobs, "Parallel worker threads (overrides run.jobs)")->check(CLI::PositiveNumber);
  app.add_flag("--force", opt.force, "Accept upstream artifacts made under a different configuration");
  app.add_option("--set", opt.overrides, "Override a key, e.g. --set groundtruth.users=100");

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"ingest", "Read a JSON-lines corpus (and optional CoNLL-U annotations)"},
      {"synth", "Generate a synthetic corpus with planted per-user styles"},
      {"groundtruth", "Sample users, split them and build the labeled pair dataset"},
      {"extract", "Compute activity, linguistic and network features per account"},
      {"pair", "Assemble pair feature tables for every configured method"},
      {"analyze", "KS tests, ECDFs and information-gain ranking"},
      {"train", "Fit every configured classifier on every method"},
      {"evaluate", "Repeated stratified cross validation over methods and classifiers"},
      {"report", "Comparison table from the evaluation report"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  acclink_config* cfg = nullptr;
  acclink_status s = opt.config.empty() ? acclink_config_new(&cfg) : acclink_config_load(opt.config.c_str(), &cfg);
  if (s != ACCLINK_OK) return report(s);

  auto set = [&](const std::string& key, const std::string& value) {
    if (s == ACCLINK_OK) s = acclink_config_set(cfg, key.c_str(), value.c_str());
  };
  for (const auto& kv : opt.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "acclink: error: --set expects key=value, got '%s'\n", kv.c_str());
      acclink_config_free(cfg);
      return kUsage;
    }
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!opt.out.empty()) set("run.out", opt.out);
  if (opt.seed) set("run.seed", std::to_string(*opt.seed));
  if (opt.jobs) set("run.jobs", std::to_string(*opt.jobs));
  if (s == ACCLINK_OK) {
    const std::string stage = app.get_subcommands().front()->get_name();
    s = acclink_run_stage(cfg, stage.c_str(), opt.force ? 1 : 0, print_line, nullptr);
  }
  acclink_config_free(cfg);
  return report(s);
}
