#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "promptllr/feature_set.hpp"

namespace promptllr {

enum class BaselineMethod { confidence, odin, mahalanobis };

std::string_view to_string(BaselineMethod method) noexcept;

/// Per-sample OOD baseline scores plus the dataset-level summary used when
/// ranking datasets. `sort_sign` orients the summary so that larger means
/// "more OOD": -1 for the softmax confidences, +1 for Mahalanobis AUROC.
struct BaselineScore {
  BaselineMethod method = BaselineMethod::confidence;
  std::vector<double> per_sample;
  double dataset_score = 0.0;
  int sort_sign = -1;

  double oriented_score() const noexcept { return sort_sign * dataset_score; }
};

/// Maximum softmax probability per row of an n x C logit matrix.
BaselineScore confidence_score(const Eigen::MatrixXd& logits);

inline constexpr double kDefaultOdinTemperature = 1000.0;

/// Temperature-scaled maximum softmax. If `perturbed_logits` is given (logits
/// of inputs nudged along the sign of the input gradient) it replaces `logits`.
BaselineScore odin_score(const Eigen::MatrixXd& logits, double temperature = kDefaultOdinTemperature,
                         const std::optional<Eigen::MatrixXd>& perturbed_logits = std::nullopt);

/// Class means and tied precision matrix fitted on labelled features.
struct MahalanobisFit {
  Eigen::MatrixXd means;      // C x D
  Eigen::MatrixXd precision;  // D x D, symmetric positive definite
  double ridge = 0.0;
};

/// Pooled class-centred covariance plus ridge 1e-6 * trace / D, inverted.
MahalanobisFit mahalanobis_fit(const FeatureSet& train);

/// Squared Mahalanobis distance of each row to its nearest class mean.
std::vector<double> mahalanobis_score(const MahalanobisFit& fit, const Eigen::MatrixXd& feats);

/// AUROC with OOD distances as positives and ID distances as negatives.
double mahalanobis_auroc(const MahalanobisFit& fit, const Eigen::MatrixXd& id_feats, const Eigen::MatrixXd& ood_feats);

/// Mahalanobis as a BaselineScore: per-sample OOD distances, AUROC summary.
BaselineScore mahalanobis_baseline(const MahalanobisFit& fit, const Eigen::MatrixXd& id_feats,
                                   const Eigen::MatrixXd& ood_feats);

}  // namespace promptllr
