#include "promptllr/feature_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "binary_io.hpp"
#include "promptllr/error.hpp"
#include "promptllr/io.hpp"

namespace promptllr {

namespace {

constexpr char kMagic[4] = {'F', 'S', 'T', 'v'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint16_t kFlagHasSeed = 0x1;
constexpr std::size_t kHeaderBytes = 4 + 2 + 2 + 8 + 8 + 4 + 1 + 1 + 8;

void validate_meta(const FeatureMeta& meta) {
  if (meta.class_count < 2) fail(ErrorCode::invalid_metadata, "class_count must be >= 2");
  if (static_cast<unsigned>(meta.feature_kind) > 1) fail(ErrorCode::invalid_metadata, "unknown feature_kind");
  if (static_cast<unsigned>(meta.prompt_tag) > 5) fail(ErrorCode::invalid_metadata, "unknown prompt_tag");
  if (meta.feature_kind == FeatureKind::lp_penultimate && meta.prompt_tag != PromptTag::none) {
    fail(ErrorCode::invalid_metadata, "lp_penultimate features cannot carry a prompt tag");
  }
  if (meta.feature_kind == FeatureKind::vp_classifier && meta.prompt_tag == PromptTag::none) {
    fail(ErrorCode::invalid_metadata, "vp_classifier features require a prompt tag");
  }
}

}  // namespace

std::string_view to_string(FeatureKind kind) noexcept {
  return kind == FeatureKind::lp_penultimate ? "lp_penultimate" : "vp_classifier";
}

std::string_view to_string(PromptTag tag) noexcept {
  switch (tag) {
    case PromptTag::none: return "none";
    case PromptTag::gaussian: return "gaussian";
    case PromptTag::gradient: return "gradient";
    case PromptTag::mini_ft_1: return "mini_ft_1";
    case PromptTag::mini_ft_5: return "mini_ft_5";
    case PromptTag::trained: return "trained";
  }
  return "none";
}

std::optional<FeatureKind> parse_feature_kind(std::string_view text) noexcept {
  if (text == "lp_penultimate" || text == "lp") return FeatureKind::lp_penultimate;
  if (text == "vp_classifier" || text == "vp") return FeatureKind::vp_classifier;
  return std::nullopt;
}

std::optional<PromptTag> parse_prompt_tag(std::string_view text) noexcept {
  for (auto tag : {PromptTag::none, PromptTag::gaussian, PromptTag::gradient, PromptTag::mini_ft_1,
                   PromptTag::mini_ft_5, PromptTag::trained}) {
    if (text == to_string(tag)) return tag;
  }
  return std::nullopt;
}

void FeatureSet::validate() const {
  validate_meta(meta);
  if (features.rows() < 1 || features.cols() < 1) {
    fail(ErrorCode::dimension_mismatch, "feature matrix must be at least 1x1");
  }
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    fail(ErrorCode::dimension_mismatch, "label count " + std::to_string(labels.size()) + " != feature rows " +
                                            std::to_string(features.rows()));
  }
  if (!features.allFinite()) fail(ErrorCode::non_finite_value, "feature matrix contains NaN or Inf");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::uint32_t>(labels[i]) >= meta.class_count) {
      fail(ErrorCode::label_out_of_range,
           "label " + std::to_string(labels[i]) + " at row " + std::to_string(i) + " outside [0, " +
               std::to_string(meta.class_count) + ")");
    }
  }
}

std::vector<std::size_t> FeatureSet::class_histogram() const {
  std::vector<std::size_t> counts(meta.class_count, 0);
  for (auto y : labels) {
    if (y >= 0 && static_cast<std::uint32_t>(y) < meta.class_count) ++counts[static_cast<std::size_t>(y)];
  }
  return counts;
}

void FeatureSet::require_all_classes() const {
  const auto counts = class_histogram();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) fail(ErrorCode::missing_class, "class " + std::to_string(c) + " has no samples");
  }
}

bool operator==(const FeatureSet& a, const FeatureSet& b) {
  return a.meta == b.meta && a.labels == b.labels && a.features.rows() == b.features.rows() &&
         a.features.cols() == b.features.cols() && a.features == b.features;
}

std::vector<std::uint8_t> encode_feature_set(const FeatureSet& fs) {
  fs.validate();
  const auto n = static_cast<std::uint64_t>(fs.features.rows());
  const auto d = static_cast<std::uint64_t>(fs.features.cols());

  nlohmann::json trailer = {{"dataset_name", fs.meta.dataset_name}, {"model_name", fs.meta.model_name}};
  const std::string trailer_text = trailer.dump();

  detail::ByteWriter w(kHeaderBytes + n * d * 4 + n * 4 + 4 + trailer_text.size());
  w.put_chars(std::string_view(kMagic, 4));
  w.put<std::uint16_t>(kVersion);
  w.put<std::uint16_t>(fs.meta.prompt_seed ? kFlagHasSeed : 0);
  w.put<std::uint64_t>(n);
  w.put<std::uint64_t>(d);
  w.put<std::uint32_t>(fs.meta.class_count);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(fs.meta.feature_kind));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(fs.meta.prompt_tag));
  w.put<std::int64_t>(fs.meta.prompt_seed.value_or(0));
  w.put_array<float>(std::span(fs.features.data(), static_cast<std::size_t>(fs.features.size())));
  w.put_array<std::int32_t>(fs.labels);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(trailer_text.size()));
  w.put_chars(trailer_text);
  return std::move(w).take();
}

FeatureSet decode_feature_set(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.begin())) {
    fail(ErrorCode::bad_magic, "missing FSTv header");
  }
  detail::ByteReader r(bytes, ErrorCode::dimension_mismatch);
  r.get_chars(4);
  if (r.remaining() < 2) fail(ErrorCode::version_mismatch, "truncated version field");
  const auto version = r.get<std::uint16_t>();
  if (version != kVersion) fail(ErrorCode::version_mismatch, "unsupported version " + std::to_string(version));
  if (r.remaining() < kHeaderBytes - 6) fail(ErrorCode::dimension_mismatch, "truncated header");

  const auto flags = r.get<std::uint16_t>();
  const auto n = r.get<std::uint64_t>();
  const auto d = r.get<std::uint64_t>();
  const auto c = r.get<std::uint32_t>();
  const auto kind = r.get<std::uint8_t>();
  const auto tag = r.get<std::uint8_t>();
  const auto seed = r.get<std::int64_t>();

  if ((flags & ~kFlagHasSeed) != 0) fail(ErrorCode::invalid_metadata, "unknown flag bits");
  if (!(flags & kFlagHasSeed) && seed != 0) fail(ErrorCode::invalid_metadata, "seed present without flag");
  if (n == 0 || d == 0) fail(ErrorCode::dimension_mismatch, "n and D must be >= 1");
  if (kind > 1 || tag > 5) fail(ErrorCode::invalid_metadata, "unknown feature kind or prompt tag");

  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (d > kMax / n || n * d > kMax / 4 - n) fail(ErrorCode::dimension_mismatch, "n*D overflows");
  const std::uint64_t body = n * d * 4 + n * 4 + 4;
  if (r.remaining() < body) {
    fail(ErrorCode::dimension_mismatch, "payload shorter than declared n*D");
  }

  FeatureSet fs;
  fs.meta.class_count = c;
  fs.meta.feature_kind = static_cast<FeatureKind>(kind);
  fs.meta.prompt_tag = static_cast<PromptTag>(tag);
  if (flags & kFlagHasSeed) fs.meta.prompt_seed = seed;

  fs.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  r.get_array<float>(std::span(fs.features.data(), static_cast<std::size_t>(n * d)));
  fs.labels.resize(static_cast<std::size_t>(n));
  r.get_array<std::int32_t>(fs.labels);

  const auto trailer_len = r.get<std::uint32_t>();
  if (r.remaining() != trailer_len) fail(ErrorCode::dimension_mismatch, "trailer length does not match file size");
  const auto trailer_text = r.get_chars(trailer_len);
  try {
    const auto trailer = nlohmann::json::parse(trailer_text);
    fs.meta.dataset_name = trailer.at("dataset_name").get<std::string>();
    fs.meta.model_name = trailer.at("model_name").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_metadata, std::string("bad JSON trailer: ") + e.what());
  }

  fs.validate();
  return fs;
}

FeatureSet load_feature_set(const std::filesystem::path& path) {
  return decode_feature_set(read_file_bytes(path));
}

void write_feature_set(const FeatureSet& fs, const std::filesystem::path& path) {
  write_file_atomic(path, encode_feature_set(fs));
}

FeatureSet mix_feature_sets(const FeatureSet& a, const FeatureSet& b, std::uint32_t classes_from_b) {
  if (a.dim() != b.dim()) {
    fail(ErrorCode::dimension_mismatch,
         "feature dims differ: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  if (a.meta.feature_kind != b.meta.feature_kind) fail(ErrorCode::kind_mismatch, "feature kinds differ");
  if (classes_from_b < 1 || classes_from_b > b.class_count()) {
    fail(ErrorCode::out_of_range, "k=" + std::to_string(classes_from_b) + " outside [1, " +
                                      std::to_string(b.class_count()) + "]");
  }

  std::vector<Eigen::Index> keep_b;
  for (std::size_t i = 0; i < b.labels.size(); ++i) {
    if (static_cast<std::uint32_t>(b.labels[i]) < classes_from_b) keep_b.push_back(static_cast<Eigen::Index>(i));
  }

  const auto na = a.features.rows();
  const auto total = na + static_cast<Eigen::Index>(keep_b.size());
  FeatureSet out;
  out.meta = a.meta;
  out.meta.dataset_name = a.meta.dataset_name + "+" + b.meta.dataset_name + "[k=" + std::to_string(classes_from_b) + "]";
  out.meta.class_count = a.class_count() + classes_from_b;
  out.features.resize(total, a.features.cols());
  out.features.topRows(na) = a.features;
  out.labels = a.labels;
  out.labels.reserve(static_cast<std::size_t>(total));
  const auto offset = static_cast<std::int32_t>(a.class_count());
  for (std::size_t j = 0; j < keep_b.size(); ++j) {
    out.features.row(na + static_cast<Eigen::Index>(j)) = b.features.row(keep_b[j]);
    out.labels.push_back(b.labels[static_cast<std::size_t>(keep_b[j])] + offset);
  }
  return out;
}

std::vector<std::size_t> subsample_indices(const FeatureSet& fs, std::size_t m, std::uint64_t seed) {
  const std::size_t n = fs.sample_count();
  if (m < 1 || m > n) {
    fail(ErrorCode::out_of_range, "m=" + std::to_string(m) + " outside [1, " + std::to_string(n) + "]");
  }
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (m == n) return all;

  std::vector<std::vector<std::size_t>> by_class(fs.class_count());
  for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(fs.labels[i])].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> present;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (!by_class[c].empty()) present.push_back(c);
  }

  std::vector<std::size_t> quota(by_class.size(), 0);
  if (m < present.size()) {
    // Not enough slots for every class: one sample each from m random classes.
    std::shuffle(present.begin(), present.end(), rng);
    for (std::size_t j = 0; j < m; ++j) quota[present[j]] = 1;
  } else {
    // Floor of one per class, the rest by largest remainder over the leftover capacity.
    const std::size_t extra = m - present.size();
    const std::size_t capacity = n - present.size();
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (auto c : present) {
      const double share = capacity == 0 ? 0.0
                                         : static_cast<double>(extra) * static_cast<double>(by_class[c].size() - 1) /
                                               static_cast<double>(capacity);
      const auto whole = std::min(static_cast<std::size_t>(std::floor(share)), by_class[c].size() - 1);
      quota[c] = 1 + whole;
      assigned += whole;
      remainders.emplace_back(share - static_cast<double>(whole), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    for (std::size_t j = 0; assigned < extra && j < remainders.size(); ++j) {
      const auto c = remainders[j].second;
      if (quota[c] < by_class[c].size()) {
        ++quota[c];
        ++assigned;
      }
    }
  }

  std::vector<std::size_t> chosen;
  chosen.reserve(m);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    for (std::size_t j = 0; j < quota[c]; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, members.size() - 1);
      std::swap(members[j], members[pick(rng)]);
      chosen.push_back(members[j]);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

FeatureSet subsample(const FeatureSet& fs, std::size_t m, std::uint64_t seed) {
  const auto idx = subsample_indices(fs, m, seed);
  FeatureSet out;
  out.meta = fs.meta;
  out.features.resize(static_cast<Eigen::Index>(idx.size()), fs.features.cols());
  out.labels.reserve(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    out.features.row(static_cast<Eigen::Index>(j)) = fs.features.row(static_cast<Eigen::Index>(idx[j]));
    out.labels.push_back(fs.labels[idx[j]]);
  }
  return out;
}

}  // namespace promptllr
