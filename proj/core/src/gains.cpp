#include <charconv>
#include <sstream>

#include "promptllr/error.hpp"
#include "promptllr/feature_set.hpp"
#include "promptllr/io.hpp"

namespace promptllr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_percent(std::string_view cell, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    fail(ErrorCode::invalid_metadata, "line " + std::to_string(line_no) + ": not a number: '" + std::string(cell) + "'");
  }
  return value;
}

}  // namespace

GainRecord GainRecord::make(std::string dataset, double lp_acc, double vp_acc) {
  for (double acc : {lp_acc, vp_acc}) {
    if (!(acc >= 0.0 && acc <= 100.0)) {
      fail(ErrorCode::out_of_range, "accuracy " + std::to_string(acc) + " for " + dataset + " outside [0, 100]");
    }
  }
  return GainRecord{std::move(dataset), lp_acc, vp_acc, vp_acc - lp_acc};
}

std::vector<GainRecord> parse_gains_csv(std::string_view text) {
  std::vector<GainRecord> records;
  std::size_t col_dataset = 0, col_lp = 0, col_vp = 0;
  bool have_header = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const auto cells = split_row(line);
    if (!have_header) {
      bool found[3] = {false, false, false};
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == "dataset") col_dataset = i, found[0] = true;
        if (cells[i] == "lp_acc") col_lp = i, found[1] = true;
        if (cells[i] == "vp_acc") col_vp = i, found[2] = true;
      }
      if (!(found[0] && found[1] && found[2])) {
        fail(ErrorCode::invalid_metadata, "gains CSV header must contain dataset,lp_acc,vp_acc");
      }
      have_header = true;
      continue;
    }
    const auto needed = std::max({col_dataset, col_lp, col_vp});
    if (cells.size() <= needed) fail(ErrorCode::invalid_metadata, "line " + std::to_string(line_no) + ": too few columns");
    records.push_back(GainRecord::make(std::string(cells[col_dataset]), parse_percent(cells[col_lp], line_no),
                                       parse_percent(cells[col_vp], line_no)));
  }
  if (!have_header) fail(ErrorCode::invalid_metadata, "gains CSV is empty");
  return records;
}

std::vector<GainRecord> read_gains_csv(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_gains_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void write_gains_csv(const std::vector<GainRecord>& records, const std::filesystem::path& path) {
  std::ostringstream out;
  out.precision(17);
  out << "dataset,lp_acc,vp_acc\n";
  for (const auto& r : records) out << r.dataset_name << ',' << r.lp_acc << ',' << r.vp_acc << '\n';
  write_file_atomic(path, out.str());
}

}  // namespace promptllr
