#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace promptllr {

/// Row-major float matrix; matches the on-disk payload layout.
using FeatureMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Where in the network a feature matrix was read out.
enum class FeatureKind : std::uint8_t {
  lp_penultimate = 0,  // backbone output, the input to a linear probe
  vp_classifier = 1,   // pre-trained classifier logits on prompted inputs
};

enum class PromptTag : std::uint8_t {
  none = 0,
  gaussian = 1,
  gradient = 2,
  mini_ft_1 = 3,
  mini_ft_5 = 4,
  trained = 5,
};

std::string_view to_string(FeatureKind kind) noexcept;
std::string_view to_string(PromptTag tag) noexcept;
std::optional<FeatureKind> parse_feature_kind(std::string_view text) noexcept;
std::optional<PromptTag> parse_prompt_tag(std::string_view text) noexcept;

struct FeatureMeta {
  std::string dataset_name;
  std::string model_name;
  FeatureKind feature_kind = FeatureKind::lp_penultimate;
  PromptTag prompt_tag = PromptTag::none;
  std::optional<std::int64_t> prompt_seed;
  std::uint32_t class_count = 2;

  friend bool operator==(const FeatureMeta&, const FeatureMeta&) = default;
};

/// An n x D feature matrix with integer labels in [0, class_count).
struct FeatureSet {
  FeatureMatrix features;
  std::vector<std::int32_t> labels;
  FeatureMeta meta;

  std::size_t sample_count() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features.cols()); }
  std::uint32_t class_count() const noexcept { return meta.class_count; }

  /// Throws Error on any violated invariant (shape, finiteness, label range, metadata).
  void validate() const;

  /// Per-class sample counts, length class_count.
  std::vector<std::size_t> class_histogram() const;

  /// Throws missing_class unless every class has at least one sample.
  void require_all_classes() const;
};

bool operator==(const FeatureSet& a, const FeatureSet& b);

FeatureSet load_feature_set(const std::filesystem::path& path);
void write_feature_set(const FeatureSet& fs, const std::filesystem::path& path);

/// In-memory form of the .fst encoding, byte for byte.
std::vector<std::uint8_t> encode_feature_set(const FeatureSet& fs);
FeatureSet decode_feature_set(const std::vector<std::uint8_t>& bytes);

/// All of `a` plus the samples of `b` with label < classes_from_b; b's labels are
/// shifted by a.class_count().
FeatureSet mix_feature_sets(const FeatureSet& a, const FeatureSet& b, std::uint32_t classes_from_b);

/// Stratified draw of `m` samples, deterministic in `seed`. Each class receives a
/// proportional share with a floor of one when m >= class_count.
FeatureSet subsample(const FeatureSet& fs, std::size_t m, std::uint64_t seed);

/// Indices chosen by subsample(), sorted ascending.
std::vector<std::size_t> subsample_indices(const FeatureSet& fs, std::size_t m, std::uint64_t seed);

struct GainRecord {
  std::string dataset_name;
  double lp_acc = 0.0;
  double vp_acc = 0.0;
  double gain = 0.0;

  static GainRecord make(std::string dataset, double lp_acc, double vp_acc);
};

/// CSV with header `dataset,lp_acc,vp_acc`.
std::vector<GainRecord> read_gains_csv(const std::filesystem::path& path);
std::vector<GainRecord> parse_gains_csv(std::string_view text);
void write_gains_csv(const std::vector<GainRecord>& records, const std::filesystem::path& path);

}  // namespace promptllr
