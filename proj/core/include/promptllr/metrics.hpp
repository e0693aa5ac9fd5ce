#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace promptllr {

/// Kendall's tau-a. Tied pairs contribute zero; the denominator is always n(n-1)/2.
/// O(n log n) via Knight's merge-sort pair counting.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// Spearman's rho, 1 - 6 sum d^2 / (n (n^2 - 1)), with average ranks for ties.
double spearman_rho(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Fraction of entries whose score and gain are both strictly positive or
/// both strictly negative. Zeros count as misses.
double llr_accuracy(std::span<const double> scores, std::span<const double> gains);

/// Mann-Whitney AUROC: P(pos > neg) + 0.5 P(pos == neg).
double auroc(std::span<const double> pos_scores, std::span<const double> neg_scores);

/// Pearson correlation. Throws zero_variance if either input is constant.
double pcc(std::span<const double> x, std::span<const double> y);

/// Mean over rows of the Pearson correlation between matching rows of two
/// embedding matrices (one layer's embeddings for the same samples).
double mean_rowwise_pcc(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct RankingEval {
  double tau = 0.0;
  double rho = 0.0;
  double llr_acc = 0.0;
  std::size_t n = 0;
};

RankingEval evaluate_ranking(std::span<const double> scores, std::span<const double> gains);

}  // namespace promptllr
