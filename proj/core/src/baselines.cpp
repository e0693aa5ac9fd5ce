#include "promptllr/baselines.hpp"

#include <cmath>

#include "promptllr/error.hpp"
#include "promptllr/metrics.hpp"

namespace promptllr {

namespace {

BaselineScore max_softmax(const Eigen::MatrixXd& logits, double temperature, BaselineMethod method) {
  if (logits.cols() < 2) fail(ErrorCode::shape_mismatch, "need at least two classes of logits");
  if (logits.rows() < 1) fail(ErrorCode::empty_input, "no logits");
  if (!logits.allFinite()) fail(ErrorCode::non_finite_value, "logits contain NaN or Inf");

  const double floor = 1.0 / static_cast<double>(logits.cols());
  BaselineScore score;
  score.method = method;
  score.sort_sign = -1;
  score.per_sample.resize(static_cast<std::size_t>(logits.rows()));
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const Eigen::ArrayXd z = logits.row(i).transpose().array() / temperature;
    const double top = z.maxCoeff();
    // max_c softmax(z)_c = exp(top - top) / sum_j exp(z_j - top)
    const double p = std::clamp(1.0 / (z - top).exp().sum(), floor, 1.0);
    score.per_sample[static_cast<std::size_t>(i)] = p;
    total += p;
  }
  score.dataset_score = total / static_cast<double>(logits.rows());
  return score;
}

}  // namespace

std::string_view to_string(BaselineMethod method) noexcept {
  switch (method) {
    case BaselineMethod::confidence: return "confidence";
    case BaselineMethod::odin: return "odin";
    case BaselineMethod::mahalanobis: return "mahalanobis";
  }
  return "confidence";
}

BaselineScore confidence_score(const Eigen::MatrixXd& logits) {
  return max_softmax(logits, 1.0, BaselineMethod::confidence);
}

BaselineScore odin_score(const Eigen::MatrixXd& logits, double temperature,
                         const std::optional<Eigen::MatrixXd>& perturbed_logits) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) fail(ErrorCode::out_of_range, "temperature must be > 0");
  if (perturbed_logits) {
    if (perturbed_logits->rows() != logits.rows() || perturbed_logits->cols() != logits.cols()) {
      fail(ErrorCode::shape_mismatch, "perturbed logits shape differs from logits");
    }
    return max_softmax(*perturbed_logits, temperature, BaselineMethod::odin);
  }
  return max_softmax(logits, temperature, BaselineMethod::odin);
}

MahalanobisFit mahalanobis_fit(const FeatureSet& train) {
  train.validate();
  const auto counts = train.class_histogram();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < 2) fail(ErrorCode::missing_class, "class " + std::to_string(c) + " has fewer than 2 samples");
  }
  const Eigen::MatrixXd f = train.features.cast<double>();
  const auto classes = static_cast<Eigen::Index>(train.class_count());
  const Eigen::Index d = f.cols();

  MahalanobisFit fit;
  fit.means = Eigen::MatrixXd::Zero(classes, d);
  for (Eigen::Index i = 0; i < f.rows(); ++i) fit.means.row(train.labels[static_cast<std::size_t>(i)]) += f.row(i);
  for (Eigen::Index c = 0; c < classes; ++c) fit.means.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

  Eigen::MatrixXd centered = f;
  for (Eigen::Index i = 0; i < f.rows(); ++i) centered.row(i) -= fit.means.row(train.labels[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), 1.0 / static_cast<double>(f.rows()));
  cov = cov.selfadjointView<Eigen::Lower>();

  const double trace = cov.trace();
  if (!(trace > 0.0)) fail(ErrorCode::singular_covariance, "pooled within-class covariance is zero");
  fit.ridge = 1e-6 * trace / static_cast<double>(d);
  cov.diagonal().array() += fit.ridge;

  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) fail(ErrorCode::singular_covariance, "covariance is not positive definite");
  fit.precision = llt.solve(Eigen::MatrixXd::Identity(d, d));
  fit.precision = (0.5 * (fit.precision + fit.precision.transpose())).eval();
  return fit;
}

std::vector<double> mahalanobis_score(const MahalanobisFit& fit, const Eigen::MatrixXd& feats) {
  if (feats.cols() != fit.means.cols()) {
    fail(ErrorCode::dimension_mismatch, "feature dim " + std::to_string(feats.cols()) + " != fitted dim " +
                                            std::to_string(fit.means.cols()));
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(fit.precision);
  if (llt.info() != Eigen::Success) fail(ErrorCode::singular_covariance, "precision is not positive definite");
  // d'Pd = |L'd|^2 with P = LL'
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd w = feats * l;
  const Eigen::MatrixXd mu = fit.means * l;

  std::vector<double> out(static_cast<std::size_t>(feats.rows()));
  for (Eigen::Index i = 0; i < feats.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = (mu.rowwise() - w.row(i)).rowwise().squaredNorm().minCoeff();
  }
  return out;
}

double mahalanobis_auroc(const MahalanobisFit& fit, const Eigen::MatrixXd& id_feats, const Eigen::MatrixXd& ood_feats) {
  const auto id = mahalanobis_score(fit, id_feats);
  const auto ood = mahalanobis_score(fit, ood_feats);
  return auroc(ood, id);
}

BaselineScore mahalanobis_baseline(const MahalanobisFit& fit, const Eigen::MatrixXd& id_feats,
                                   const Eigen::MatrixXd& ood_feats) {
  BaselineScore score;
  score.method = BaselineMethod::mahalanobis;
  score.sort_sign = +1;
  score.per_sample = mahalanobis_score(fit, ood_feats);
  score.dataset_score = auroc(score.per_sample, mahalanobis_score(fit, id_feats));
  return score;
}

}  // namespace promptllr
