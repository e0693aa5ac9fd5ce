#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "promptllr/evidence.hpp"
#include "promptllr/feature_set.hpp"
#include "promptllr/llr.hpp"

namespace promptllr::cli {

using json = nlohmann::ordered_json;

struct Globals {
  unsigned threads = 0;
};

/// Set by the chosen subcommand's callback and executed after parsing.
using Runner = std::function<void()>;

void register_score(CLI::App& root, const Globals& globals, Runner& run);
void register_rank(CLI::App& root, const Globals& globals, Runner& run);
void register_prompt(CLI::App& root, const Globals& globals, Runner& run);
void register_baseline(CLI::App& root, const Globals& globals, Runner& run);
void register_mix_sweep(CLI::App& root, const Globals& globals, Runner& run);
void register_synth(CLI::App& root, const Globals& globals, Runner& run);
void register_inspect(CLI::App& root, const Globals& globals, Runner& run);

/// Wraps a command result with the tool name, version and the config it ran with.
json envelope(const std::string& command, json config, json result);

/// Writes to `path` atomically, or to stdout when `path` is empty.
void emit(const std::string& path, const std::string& text);
void emit_json(const std::string& path, const json& doc);

void add_output_option(CLI::App* sub, std::string& path);

EvidenceOptions evidence_options(const Globals& globals);
json evidence_options_json(const EvidenceOptions& options);

std::vector<FeatureSet> load_sets(const std::vector<std::string>& paths);
Eigen::MatrixXd load_matrix(const std::string& path);

json report_json(const LlrReport& report);

}  // namespace promptllr::cli
