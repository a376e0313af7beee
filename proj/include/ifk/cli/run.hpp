#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "ifk/cli/experiments.hpp"

namespace ifk::cli {

enum ExitCode { kOk = 0, kError = 1, kThresholdFailed = 2 };

struct RunOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> threads;
};

struct RunReport {
    std::string directory;
    std::string csv_path;
    std::string json_path;
    bool pass = true;
};

// Validates the config, runs the experiment and writes
// <out>/<experiment>/<timestamp>/{results.csv, summary.json}.
RunReport run_config(const Config& cfg, const RunOptions& opt, std::ostream& log);
// Same with errors mapped to exit codes and reported on err.
int run_main(const RunOptions& opt, std::ostream& log, std::ostream& err);

std::string csv_text(const Experiment& e, const Outcome& o);
nlohmann::json summary_json(const Experiment& e, const Config& cfg, std::uint64_t seed, const Outcome& o);

// one line per experiment: name, [tag], description
std::string list_text();
nlohmann::json schema_json(const Experiment& e);
// Markdown fragment documenting the CSV columns of every experiment.
std::string schema_markdown();

std::string git_describe();

}  // namespace ifk::cli
