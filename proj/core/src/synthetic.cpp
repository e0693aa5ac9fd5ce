#include "promptllr/synthetic.hpp"

#include <cmath>
#include <random>

#include "promptllr/error.hpp"

namespace promptllr::synthetic {

namespace {

Eigen::MatrixXd random_means(std::uint32_t classes, std::uint32_t dim, double separation, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd means(classes, dim);
  for (Eigen::Index c = 0; c < means.rows(); ++c) {
    for (Eigen::Index j = 0; j < means.cols(); ++j) means(c, j) = normal(rng);
    means.row(c) *= separation / means.row(c).norm();
  }
  return means;
}

FeatureSet sample_clusters(const Eigen::MatrixXd& means, std::size_t per_class, double noise, std::mt19937_64& rng,
                           FeatureMeta meta) {
  std::normal_distribution<double> normal;
  const auto classes = static_cast<std::size_t>(means.rows());
  FeatureSet fs;
  meta.class_count = static_cast<std::uint32_t>(classes);
  fs.meta = std::move(meta);
  fs.features.resize(static_cast<Eigen::Index>(classes * per_class), means.cols());
  fs.labels.reserve(classes * per_class);
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i, ++row) {
      for (Eigen::Index j = 0; j < means.cols(); ++j) {
        fs.features(row, j) = static_cast<float>(means(static_cast<Eigen::Index>(c), j) + noise * normal(rng));
      }
      fs.labels.push_back(static_cast<std::int32_t>(c));
    }
  }
  return fs;
}

}  // namespace

FeatureSet gaussian_clusters(const ClusterSpec& spec, FeatureMeta meta) {
  if (spec.classes < 2 || spec.per_class < 1 || spec.dim < 1) {
    fail(ErrorCode::out_of_range, "cluster spec needs >= 2 classes, >= 1 sample per class and dim >= 1");
  }
  std::mt19937_64 rng(spec.seed);
  const auto means = random_means(spec.classes, spec.dim, spec.separation, rng);
  return sample_clusters(means, spec.per_class, spec.noise, rng, std::move(meta));
}

Domain make_domain(const DomainSpec& spec) {
  if (spec.classes < 2 || spec.per_class < 1 || spec.lp_dim < 1 || spec.vp_dim < 1 || spec.prompts < 1) {
    fail(ErrorCode::out_of_range, "invalid synthetic domain spec");
  }
  if (spec.prompt_tag == PromptTag::none) fail(ErrorCode::invalid_metadata, "VP features need a prompt tag");
  std::mt19937_64 rng(spec.seed);

  Domain domain;
  FeatureMeta lp_meta;
  lp_meta.dataset_name = spec.name;
  lp_meta.model_name = "synthetic";
  lp_meta.feature_kind = FeatureKind::lp_penultimate;
  lp_meta.prompt_tag = PromptTag::none;
  const auto lp_means = random_means(spec.classes, spec.lp_dim, spec.lp_separation, rng);
  domain.lp = sample_clusters(lp_means, spec.per_class, spec.noise, rng, lp_meta);

  const auto vp_means = random_means(spec.classes, spec.vp_dim, spec.vp_separation, rng);
  std::normal_distribution<double> normal;
  for (std::size_t k = 0; k < spec.prompts; ++k) {
    FeatureMeta vp_meta = lp_meta;
    vp_meta.feature_kind = FeatureKind::vp_classifier;
    vp_meta.prompt_tag = spec.prompt_tag;
    vp_meta.prompt_seed = static_cast<std::int64_t>(k);
    Eigen::MatrixXd jittered = vp_means;
    for (Eigen::Index c = 0; c < jittered.rows(); ++c) {
      for (Eigen::Index j = 0; j < jittered.cols(); ++j) {
        jittered(c, j) += spec.prompt_jitter * spec.vp_separation * normal(rng) / std::sqrt(double(spec.vp_dim));
      }
    }
    domain.vp.push_back(sample_clusters(jittered, spec.per_class, spec.noise, rng, vp_meta));
  }
  return domain;
}

DomainSpec ood_domain_spec(std::uint64_t seed) {
  DomainSpec spec;
  spec.name = "synthetic-ood";
  spec.classes = 10;
  spec.lp_separation = 0.5;
  spec.vp_separation = 4.0;
  spec.seed = seed;
  return spec;
}

DomainSpec id_domain_spec(std::uint64_t seed) {
  DomainSpec spec;
  spec.name = "synthetic-id";
  spec.classes = 40;
  spec.lp_separation = 4.0;
  spec.vp_separation = 1.0;
  spec.seed = seed;
  return spec;
}

}  // namespace promptllr::synthetic
