#include "promptllr/common.hpp"

#include <iostream>

#include "promptllr/io.hpp"
#include "promptllr/llr.hpp"
#include "promptllr/version.hpp"

namespace promptllr::cli {

json envelope(const std::string& command, json config, json result) {
  json doc;
  doc["tool"] = "promptllr";
  doc["version"] = std::string(kVersion);
  doc["command"] = command;
  doc["config"] = std::move(config);
  doc["result"] = std::move(result);
  return doc;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  write_file_atomic(path, text);
}

void emit_json(const std::string& path, const json& doc) { emit(path, doc.dump(2) + "\n"); }

void add_output_option(CLI::App* sub, std::string& path) {
  sub->add_option("-o,--output", path, "Output file (default stdout)");
}

EvidenceOptions evidence_options(const Globals& globals) {
  EvidenceOptions o;
  o.threads = globals.threads;
  return o;
}

json evidence_options_json(const EvidenceOptions& options) {
  return {{"tolerance", options.tolerance},
          {"max_iterations", options.max_iterations},
          {"threads", options.threads}};
}

std::vector<FeatureSet> load_sets(const std::vector<std::string>& paths) {
  std::vector<FeatureSet> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(load_feature_set(p));
  return out;
}

Eigen::MatrixXd load_matrix(const std::string& path) { return load_feature_set(path).features.cast<double>(); }

json report_json(const LlrReport& report) {
  const LlrReport one[] = {report};
  return json::parse(reports_to_json(one)).at(0);
}

}  // namespace promptllr::cli
