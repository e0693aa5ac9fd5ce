#include <algorithm>
#include <map>
#include <sstream>

#include "promptllr/common.hpp"
#include "promptllr/error.hpp"
#include "promptllr/io.hpp"
#include "promptllr/llr.hpp"
#include "promptllr/metrics.hpp"

namespace promptllr::cli {

namespace {

struct RankArgs {
  std::string scores;
  std::string gains;
  std::string format = "json";
  std::string output;
};

using Named = std::vector<std::pair<std::string, double>>;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return cells;
}

Named from_reports(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::invalid_metadata, std::string("not JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("result")) doc = doc["result"];
  if (doc.is_object() && doc.contains("reports")) doc = doc["reports"];
  Named out;
  for (const auto& r : reports_from_json(doc.dump())) out.emplace_back(r.dataset_name, r.llr);
  return out;
}

Named from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split_csv(line);
    break;
  }
  const auto has = [&](const char* name) { return std::find(header.begin(), header.end(), name) != header.end(); };
  Named out;
  if (has("lp_acc") && has("vp_acc")) {
    for (const auto& g : parse_gains_csv(text)) out.emplace_back(g.dataset_name, g.gain);
    return out;
  }
  const auto col = [&](const char* name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  if (!has("dataset") || !(has("score") || has("llr"))) {
    fail(ErrorCode::invalid_metadata, "scores CSV needs a dataset column and a score or llr column");
  }
  const std::size_t name_col = col("dataset");
  const std::size_t value_col = has("score") ? col("score") : col("llr");
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() <= std::max(name_col, value_col)) fail(ErrorCode::invalid_metadata, "short row: " + line);
    try {
      std::size_t used = 0;
      const double v = std::stod(cells[value_col], &used);
      if (used != cells[value_col].size()) throw std::invalid_argument("trailing characters");
      out.emplace_back(cells[name_col], v);
    } catch (const std::exception&) {
      fail(ErrorCode::invalid_metadata, "not a number: '" + cells[value_col] + "'");
    }
  }
  return out;
}

/// Reads dataset -> value pairs from a score report (.json), a score CSV
/// (dataset + score|llr) or a gains CSV (gain = vp_acc - lp_acc).
Named load_named(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  const std::string text(bytes.begin(), bytes.end());
  const auto first = text.find_first_not_of(" \t\r\n");
  Named out = (first != std::string::npos && (text[first] == '[' || text[first] == '{')) ? from_reports(text)
                                                                                          : from_csv(text);
  std::map<std::string, int> seen;
  for (const auto& [name, v] : out) {
    if (++seen[name] > 1) fail(ErrorCode::invalid_metadata, path + ": dataset '" + name + "' appears twice");
  }
  return out;
}

void run_rank(const RankArgs& args) {
  const auto scores = load_named(args.scores);
  const auto gains = load_named(args.gains);
  std::map<std::string, double> score_of(scores.begin(), scores.end());
  std::vector<std::string> missing, extra;
  for (const auto& [name, g] : gains) {
    if (!score_of.count(name)) missing.push_back(name);
  }
  std::map<std::string, double> gain_of(gains.begin(), gains.end());
  for (const auto& [name, s] : scores) {
    if (!gain_of.count(name)) extra.push_back(name);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "dataset names differ between scores and gains;";
    for (const auto& m : missing) msg += " no score for '" + m + "';";
    for (const auto& x : extra) msg += " no gain for '" + x + "';";
    fail(ErrorCode::mismatched_sets, msg);
  }

  std::vector<double> s, g;
  for (const auto& [name, gain] : gains) {
    s.push_back(score_of[name]);
    g.push_back(gain);
  }
  const auto eval = evaluate_ranking(s, g);
  const auto score_rank = average_ranks(s), gain_rank = average_ranks(g);
  const auto correct = [&](std::size_t i) { return (s[i] > 0 && g[i] > 0) || (s[i] < 0 && g[i] < 0); };

  if (args.format == "csv") {
    std::ostringstream out;
    out.precision(17);
    out << "dataset,score,gain,score_rank,gain_rank,correct_quadrant\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << gains[i].first << ',' << s[i] << ',' << g[i] << ',' << score_rank[i] << ',' << gain_rank[i] << ','
          << (correct(i) ? 1 : 0) << '\n';
    }
    emit(args.output, out.str());
    return;
  }

  json rows = json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    rows.push_back({{"dataset", gains[i].first},
                    {"score", s[i]},
                    {"gain", g[i]},
                    {"score_rank", score_rank[i]},
                    {"gain_rank", gain_rank[i]},
                    {"correct_quadrant", correct(i)}});
  }
  json config = {{"scores", args.scores}, {"gains", args.gains}, {"format", args.format}};
  json result = {{"tau", eval.tau}, {"rho", eval.rho}, {"llr_acc", eval.llr_acc}, {"n", eval.n}, {"datasets", rows}};
  emit_json(args.output, envelope("rank", config, result));
}

}  // namespace

void register_rank(CLI::App& root, const Globals&, Runner& run) {
  auto args = std::make_shared<RankArgs>();
  auto* sub = root.add_subcommand("rank", "Kendall tau, Spearman rho and LLR-Acc of scores against accuracy gains");
  sub->add_option("--scores", args->scores, "Score report (.json) or CSV with dataset and score/llr columns")
      ->required();
  sub->add_option("--gains", args->gains, "Gains CSV (dataset,lp_acc,vp_acc) or another score file")->required();
  sub->add_option("--format", args->format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  add_output_option(sub, args->output);
  sub->callback([args, &run] { run = [args] { run_rank(*args); }; });
}

}  // namespace promptllr::cli
