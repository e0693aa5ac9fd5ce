#include "promptllr/evidence.hpp"

#include <cmath>
#include <numbers>

#include "promptllr/error.hpp"
#include "promptllr/parallel.hpp"

namespace promptllr {

namespace {

// Fixed-point iterates are clamped to this box; an unbounded optimum (target
// orthogonal to the features, or an exact fit) drifts to the edge and is
// reported as not converged.
constexpr double kPrecisionMin = 1e-15;
constexpr double kPrecisionMax = 1e15;

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

double clamp_precision(double v) {
  if (!(v > kPrecisionMin)) return kPrecisionMin;  // also catches NaN
  return std::min(v, kPrecisionMax);
}

void check_precisions(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    fail(ErrorCode::out_of_range, "alpha and beta must be positive and finite");
  }
}

}  // namespace

std::uint64_t label_digest(std::span<const std::int32_t> labels) noexcept {
  std::uint64_t h = 14695981039346656037ULL;
  for (auto y : labels) {
    auto u = static_cast<std::uint32_t>(y);
    for (int b = 0; b < 4; ++b) {
      h ^= (u >> (8 * b)) & 0xFFu;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

Eigen::VectorXd one_vs_rest_target(const FeatureSet& fs, std::int32_t cls) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(fs.sample_count()));
  for (std::size_t i = 0; i < fs.sample_count(); ++i) y[static_cast<Eigen::Index>(i)] = fs.labels[i] == cls ? 1.0 : 0.0;
  return y;
}

double log_evidence_at(const Eigen::MatrixXd& features, const Eigen::VectorXd& target, double alpha, double beta) {
  check_precisions(alpha, beta);
  if (features.rows() != target.size()) fail(ErrorCode::length_mismatch, "target length != feature rows");
  const auto n = static_cast<double>(features.rows());
  const auto d = static_cast<double>(features.cols());

  Eigen::MatrixXd a = beta * (features.transpose() * features);
  a.diagonal().array() += alpha;
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) fail(ErrorCode::non_finite_result, "A is not positive definite");

  const Eigen::VectorXd m = beta * llt.solve(features.transpose() * target);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double residual = (features * m - target).squaredNorm();

  const double value = 0.5 * d * std::log(alpha) + 0.5 * n * std::log(beta) - 0.5 * n * kLog2Pi -
                       0.5 * alpha * m.squaredNorm() - 0.5 * beta * residual - 0.5 * log_det;
  if (!std::isfinite(value)) fail(ErrorCode::non_finite_result, "log evidence is not finite");
  return value;
}

double log_evidence_at(const FeatureSet& fs, const Eigen::VectorXd& target, double alpha, double beta) {
  return log_evidence_at(fs.features.cast<double>().eval(), target, alpha, beta);
}

EvidenceSpectrum::EvidenceSpectrum(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets)
    : n_(static_cast<std::size_t>(features.rows())), d_(static_cast<std::size_t>(features.cols())) {
  if (features.rows() != targets.rows()) fail(ErrorCode::length_mismatch, "target rows != feature rows");
  if (features.size() == 0) fail(ErrorCode::degenerate_features, "empty feature matrix");
  primal_ = n_ >= d_;

  // Eigendecomposition of the smaller Gram matrix gives the SVD of F:
  // F'F = V S^2 V' (primal) or FF' = U S^2 U' (dual).
  const Eigen::Index g = primal_ ? features.cols() : features.rows();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(g, g);
  if (primal_) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(features.transpose());
  } else {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(features);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) fail(ErrorCode::non_finite_result, "eigendecomposition failed");

  const Eigen::VectorXd& values = eig.eigenvalues();
  const double top = values.size() > 0 ? values[values.size() - 1] : 0.0;
  if (!(top > 0.0)) fail(ErrorCode::degenerate_features, "feature matrix has rank 0");
  const double cutoff = top * static_cast<double>(std::max(n_, d_)) * std::numeric_limits<double>::epsilon();

  Eigen::Index first = 0;
  while (first < values.size() && values[first] <= cutoff) ++first;
  const Eigen::Index r = values.size() - first;
  sigma_ = values.tail(r);
  basis_ = eig.eigenvectors().rightCols(r);

  if (primal_) {
    // u_i'y = v_i'F'y / s_i
    const Eigen::MatrixXd ft_y = features.transpose() * targets;
    proj_ = (basis_.transpose() * ft_y).array().colwise() / sigma_.array().sqrt();
  } else {
    proj_ = basis_.transpose() * targets;
    features_ = features;
  }
  proj_sq_ = proj_.array().square();
  residual0_ = (targets.colwise().squaredNorm().transpose() - proj_sq_.colwise().sum().transpose()).cwiseMax(0.0);
}

EvidenceSpectrum::Moments EvidenceSpectrum::moments(std::size_t t, double alpha, double beta) const {
  Moments mo{0.0, 0.0, 0.0, 0.0};
  const auto col = static_cast<Eigen::Index>(t);
  for (Eigen::Index i = 0; i < sigma_.size(); ++i) {
    const double s = sigma_[i];
    const double x2 = proj_sq_(i, col);
    const double denom = alpha + beta * s;
    mo.gamma += beta * s / denom;
    mo.m_norm2 += beta * beta * s * x2 / (denom * denom);
    mo.residual += x2 * (alpha / denom) * (alpha / denom);
    mo.log_det += std::log(denom);
  }
  mo.residual += residual0_[col];
  mo.log_det += static_cast<double>(d_ - rank()) * std::log(alpha);
  return mo;
}

double EvidenceSpectrum::log_evidence(std::size_t t, double alpha, double beta) const {
  check_precisions(alpha, beta);
  const auto mo = moments(t, alpha, beta);
  const auto n = static_cast<double>(n_);
  const auto d = static_cast<double>(d_);
  return 0.5 * d * std::log(alpha) + 0.5 * n * std::log(beta) - 0.5 * n * kLog2Pi - 0.5 * alpha * mo.m_norm2 -
         0.5 * beta * mo.residual - 0.5 * mo.log_det;
}

EvidenceSpectrum::Fit EvidenceSpectrum::maximize(std::size_t t, const EvidenceOptions& options) const {
  Fit fit;
  double alpha = clamp_precision(options.initial_alpha);
  double beta = clamp_precision(options.initial_beta);
  const auto n = static_cast<double>(n_);
  for (int it = 1; it <= options.max_iterations; ++it) {
    const auto mo = moments(t, alpha, beta);
    const double next_alpha = clamp_precision(mo.gamma / mo.m_norm2);
    const double next_beta = clamp_precision((n - mo.gamma) / mo.residual);
    fit.iterations = it;
    const bool settled = std::abs(next_alpha - alpha) <= options.tolerance * alpha &&
                         std::abs(next_beta - beta) <= options.tolerance * beta;
    alpha = next_alpha;
    beta = next_beta;
    if (settled) {
      fit.converged = true;
      break;
    }
  }
  fit.alpha = alpha;
  fit.beta = beta;
  fit.log_evidence = log_evidence(t, alpha, beta);
  if (!fit.converged && std::isfinite(fit.log_evidence)) {
    // Unsettled iterates are still climbing toward an edge of the box; try both edges directly.
    const auto consider = [&](double a, double b) {
      const double v = log_evidence(t, a, b);
      if (v > fit.log_evidence) {
        fit.alpha = a;
        fit.beta = b;
        fit.log_evidence = v;
      }
    };
    const double yty = proj_sq_.col(static_cast<Eigen::Index>(t)).sum() + residual0_[static_cast<Eigen::Index>(t)];
    consider(kPrecisionMax, clamp_precision(n / yty));
    double a = alpha;
    for (int it = 0; it < options.max_iterations; ++it) {
      const auto mo = moments(t, a, kPrecisionMax);
      const double next = clamp_precision(mo.gamma / mo.m_norm2);
      const bool settled = std::abs(next - a) <= options.tolerance * a;
      a = next;
      if (settled) break;
    }
    consider(a, kPrecisionMax);
  }
  if (!std::isfinite(fit.log_evidence)) fail(ErrorCode::non_finite_result, "log evidence is not finite");
  return fit;
}

Eigen::VectorXd EvidenceSpectrum::posterior_mean(std::size_t t, double alpha, double beta) const {
  const auto col = static_cast<Eigen::Index>(t);
  const Eigen::ArrayXd denom = alpha + beta * sigma_.array();
  if (primal_) {
    const Eigen::VectorXd coeff = (beta * sigma_.array().sqrt() * proj_.col(col).array() / denom).matrix();
    return basis_ * coeff;
  }
  const Eigen::VectorXd coeff = (proj_.col(col).array() / denom).matrix();
  return beta * (features_.transpose() * (basis_ * coeff));
}

EvidenceResult maximize_evidence(const FeatureSet& fs, const EvidenceOptions& options) {
  fs.require_all_classes();
  const auto classes = static_cast<Eigen::Index>(fs.class_count());
  const auto n = static_cast<Eigen::Index>(fs.sample_count());

  Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(n, classes);
  for (Eigen::Index i = 0; i < n; ++i) targets(i, fs.labels[static_cast<std::size_t>(i)]) = 1.0;

  const EvidenceSpectrum spectrum(fs.features.cast<double>(), targets);

  EvidenceResult result;
  result.sample_count = fs.sample_count();
  result.label_digest = label_digest(fs.labels);
  result.m.resize(classes, static_cast<Eigen::Index>(fs.dim()));
  result.converged = true;
  for (Eigen::Index c = 0; c < classes; ++c) {
    const auto fit = spectrum.maximize(static_cast<std::size_t>(c), options);
    result.alphas.push_back(fit.alpha);
    result.betas.push_back(fit.beta);
    result.per_class.push_back(fit.log_evidence / static_cast<double>(n));
    result.m.row(c) = spectrum.posterior_mean(static_cast<std::size_t>(c), fit.alpha, fit.beta).transpose();
    result.iterations = std::max(result.iterations, fit.iterations);
    result.converged = result.converged && fit.converged;
  }

  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  result.logme = mean(result.per_class);
  result.alpha_star = mean(result.alphas);
  result.beta_star = mean(result.betas);
  if (!std::isfinite(result.logme)) fail(ErrorCode::non_finite_result, "logme is not finite");
  return result;
}

VpEvidenceResult vp_evidence(std::span<const FeatureSet> prompted, const EvidenceOptions& options) {
  if (prompted.empty()) fail(ErrorCode::empty_input, "need at least one prompted feature set");
  const auto& first = prompted.front();
  for (std::size_t k = 0; k < prompted.size(); ++k) {
    const auto& fs = prompted[k];
    if (fs.meta.feature_kind != FeatureKind::vp_classifier) {
      fail(ErrorCode::kind_mismatch, "prompted set " + std::to_string(k) + " is not vp_classifier");
    }
    if (fs.sample_count() != first.sample_count() || fs.labels != first.labels ||
        fs.class_count() != first.class_count()) {
      fail(ErrorCode::mismatched_sets, "prompted set " + std::to_string(k) + " has different samples or labels");
    }
  }

  VpEvidenceResult out;
  out.k = prompted.size();
  out.per_prompt.resize(out.k);
  EvidenceOptions inner = options;
  parallel_for(out.k, options.threads, [&](std::size_t k) { out.per_prompt[k] = maximize_evidence(prompted[k], inner); });

  double sum = 0.0;
  for (const auto& r : out.per_prompt) sum += r.logme;
  out.mean_logme = sum / static_cast<double>(out.k);
  double ss = 0.0;
  for (const auto& r : out.per_prompt) ss += (r.logme - out.mean_logme) * (r.logme - out.mean_logme);
  out.variance = ss / static_cast<double>(out.k);
  return out;
}

}  // namespace promptllr
