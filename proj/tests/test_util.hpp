#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>

#include "promptllr/error.hpp"
#include "promptllr/feature_set.hpp"

namespace testutil {

/// Every class appears at least once; features are class means plus unit noise,
/// all multiplied by a random overall scale.
inline promptllr::FeatureSet random_instance(std::mt19937_64& rng, std::size_t n, std::size_t d,
                                             std::uint32_t classes, double mean_spread = 1.5) {
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<std::int32_t> pick(0, static_cast<std::int32_t>(classes) - 1);
  std::uniform_real_distribution<double> scale_dist(0.5, 2.0);
  const double scale = scale_dist(rng);

  Eigen::MatrixXd means(classes, static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < means.size(); ++i) means.data()[i] = mean_spread * normal(rng);

  promptllr::FeatureSet fs;
  fs.meta.class_count = classes;
  fs.meta.dataset_name = "random";
  fs.meta.model_name = "test";
  fs.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t y = i < classes ? static_cast<std::int32_t>(i) : pick(rng);
    fs.labels.push_back(y);
    for (std::size_t j = 0; j < d; ++j) {
      fs.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<float>(scale * (means(y, static_cast<Eigen::Index>(j)) + normal(rng)));
    }
  }
  return fs;
}

inline promptllr::FeatureSet as_vp(promptllr::FeatureSet fs,
                                   promptllr::PromptTag tag = promptllr::PromptTag::gaussian) {
  fs.meta.feature_kind = promptllr::FeatureKind::vp_classifier;
  fs.meta.prompt_tag = tag;
  return fs;
}

/// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("promptllr_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Error code thrown by fn, or nullopt if it returns normally.
template <typename Fn>
std::optional<promptllr::ErrorCode> error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const promptllr::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace testutil
