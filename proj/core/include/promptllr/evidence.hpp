#pragma once

// Bayesian evidence of a linear head on frozen features.
//
// For a target vector y (n) and feature matrix F (n x D), with weights
// w ~ N(0, 1/alpha I) and observation noise N(0, 1/beta), the log marginal
// likelihood is
//
//   L(alpha, beta) = D/2 log alpha + n/2 log beta - n/2 log 2pi
//                    - alpha/2 m'm - beta/2 |F m - y|^2 - 1/2 log|A|
//
//   A = alpha I + beta F'F,   m = beta A^-1 F'y.
//
// maximize_evidence() fits (alpha, beta) per class on one-vs-rest 0/1 targets
// using MacKay's fixed-point updates in the eigenbasis of the Gram matrix, and
// reports the class average of max L / n.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "promptllr/feature_set.hpp"

namespace promptllr {

struct EvidenceOptions {
  /// Relative change in both alpha and beta below which a class fit is converged.
  double tolerance = 1e-3;
  int max_iterations = 100;
  double initial_alpha = 1.0;
  double initial_beta = 1.0;
  /// Worker threads for per-prompt fan-out; 0 means default_thread_count().
  unsigned threads = 0;
};

struct EvidenceResult {
  /// Mean over classes of the per-sample maximized log evidence.
  double logme = 0.0;
  /// Class means of the fitted precisions; per-class values in `alphas` / `betas`.
  double alpha_star = 0.0;
  double beta_star = 0.0;
  std::vector<double> alphas;
  std::vector<double> betas;
  /// Maximized log evidence of each one-vs-rest target divided by n.
  std::vector<double> per_class;
  /// Posterior weight means, one row per class (C x D).
  Eigen::MatrixXd m;
  /// Largest iteration count over classes.
  int iterations = 0;
  bool converged = false;

  std::size_t sample_count = 0;
  /// FNV-1a digest of the label vector; lets callers check two fits saw the same samples.
  std::uint64_t label_digest = 0;
};

struct VpEvidenceResult {
  double mean_logme = 0.0;
  /// Population variance of the per-prompt logme values.
  double variance = 0.0;
  std::vector<EvidenceResult> per_prompt;
  std::size_t k = 0;
};

/// 0/1 indicator of `label == cls` over the samples of `fs`.
Eigen::VectorXd one_vs_rest_target(const FeatureSet& fs, std::int32_t cls);

/// Log evidence at fixed (alpha, beta), evaluated directly from A and its
/// Cholesky factor. Unnormalized (not divided by n).
double log_evidence_at(const Eigen::MatrixXd& features, const Eigen::VectorXd& target, double alpha, double beta);
double log_evidence_at(const FeatureSet& fs, const Eigen::VectorXd& target, double alpha, double beta);

/// Spectral summary of F sufficient to evaluate the evidence for any target:
/// the nonzero eigenvalues of F'F and the squared projections of each target on
/// the matching left singular vectors.
class EvidenceSpectrum {
 public:
  EvidenceSpectrum(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets);

  std::size_t sample_count() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }
  std::size_t rank() const noexcept { return static_cast<std::size_t>(sigma_.size()); }
  std::size_t target_count() const noexcept { return static_cast<std::size_t>(proj_sq_.cols()); }
  const Eigen::VectorXd& eigenvalues() const noexcept { return sigma_; }

  /// Log evidence of target `t` at (alpha, beta).
  double log_evidence(std::size_t t, double alpha, double beta) const;

  struct Fit {
    double alpha = 0.0;
    double beta = 0.0;
    double log_evidence = 0.0;
    int iterations = 0;
    bool converged = false;
  };

  Fit maximize(std::size_t t, const EvidenceOptions& options) const;

  /// Posterior mean beta A^-1 F'y for target `t` (length D).
  Eigen::VectorXd posterior_mean(std::size_t t, double alpha, double beta) const;

 private:
  struct Moments {
    double gamma;     // effective number of parameters
    double m_norm2;   // m'm
    double residual;  // |F m - y|^2
    double log_det;   // log|A| restricted to the nonzero spectrum
  };
  Moments moments(std::size_t t, double alpha, double beta) const;

  std::size_t n_ = 0;
  std::size_t d_ = 0;
  bool primal_ = true;        // eigenbasis of F'F (n >= D) or of FF' (n < D)
  Eigen::VectorXd sigma_;     // nonzero eigenvalues, length r
  Eigen::MatrixXd basis_;     // D x r right vectors (primal) or n x r left vectors (dual)
  Eigen::MatrixXd proj_sq_;   // r x T squared projections of targets on the left singular vectors
  Eigen::MatrixXd proj_;      // r x T signed projections, for posterior means
  Eigen::VectorXd residual0_; // |y|^2 - sum of proj_sq_, per target
  Eigen::MatrixXd features_;  // kept only in the dual case
};

EvidenceResult maximize_evidence(const FeatureSet& fs, const EvidenceOptions& options = {});

/// Monte-Carlo estimate of the prompt-averaged log evidence over K prompted sets.
VpEvidenceResult vp_evidence(std::span<const FeatureSet> prompted, const EvidenceOptions& options = {});

std::uint64_t label_digest(std::span<const std::int32_t> labels) noexcept;

}  // namespace promptllr
