#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "promptllr/feature_set.hpp"

namespace promptllr::synthetic {

/// Isotropic Gaussian class clusters: class means are random directions scaled
/// to `separation`, samples add N(0, noise^2 I).
struct ClusterSpec {
  std::uint32_t classes = 2;
  std::size_t per_class = 50;
  std::uint32_t dim = 8;
  double separation = 3.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
};

/// Samples are grouped by class (all of class 0 first, then class 1, ...).
FeatureSet gaussian_clusters(const ClusterSpec& spec, FeatureMeta meta = {});

/// A dataset seen through both adaptation routes: LP features plus K
/// prompt-conditioned VP feature sets over the same samples and labels.
struct DomainSpec {
  std::string name = "synthetic";
  std::uint32_t classes = 10;
  std::size_t per_class = 40;
  std::uint32_t lp_dim = 32;
  std::uint32_t vp_dim = 32;
  /// Cluster separation in LP and VP feature space. A domain that is
  /// out-of-distribution for the backbone has small lp_separation and larger
  /// vp_separation; an in-distribution one the reverse.
  double lp_separation = 3.0;
  double vp_separation = 3.0;
  double noise = 1.0;
  /// Per-prompt random offset of the VP class means, relative to vp_separation.
  double prompt_jitter = 0.1;
  std::size_t prompts = 5;
  PromptTag prompt_tag = PromptTag::gaussian;
  std::uint64_t seed = 0;
};

struct Domain {
  FeatureSet lp;
  std::vector<FeatureSet> vp;
};

Domain make_domain(const DomainSpec& spec);

/// OOD-favoring default: features only separate after prompting.
DomainSpec ood_domain_spec(std::uint64_t seed = 1);
/// ID-favoring default: the backbone's own features already separate classes.
DomainSpec id_domain_spec(std::uint64_t seed = 2);

}  // namespace promptllr::synthetic
