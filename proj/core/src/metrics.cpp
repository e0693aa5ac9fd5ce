#include "promptllr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "promptllr/error.hpp"

namespace promptllr {

namespace {

void require_pairs(std::span<const double> x, std::span<const double> y, std::size_t min_n) {
  if (x.size() != y.size()) {
    fail(ErrorCode::length_mismatch, "lengths differ: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() < min_n) fail(ErrorCode::out_of_range, "need at least " + std::to_string(min_n) + " entries");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) fail(ErrorCode::non_finite_value, "non-finite input");
  }
}

// Number of pairs i<j tied within each run of equal values in a sorted range.
template <typename It, typename Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t total = 0;
  while (first != last) {
    auto run_end = std::next(first);
    while (run_end != last && eq(*first, *run_end)) ++run_end;
    const auto len = static_cast<std::int64_t>(std::distance(first, run_end));
    total += len * (len - 1) / 2;
    first = run_end;
  }
  return total;
}

// Sorts `v` and returns the number of inversions (pairs out of order).
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, scratch, lo, mid) + merge_count(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  require_pairs(x, y, 2);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  const auto total_pairs = static_cast<std::int64_t>(n * (n - 1) / 2);
  const std::int64_t x_ties =
      tied_pairs(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
  const std::int64_t joint_ties = tied_pairs(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] == x[b] && y[a] == y[b];
  });

  std::vector<double> ys(n), scratch(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  const std::int64_t discordant = merge_count(ys, scratch, 0, n);
  const std::int64_t y_ties = tied_pairs(ys.begin(), ys.end(), [](double a, double b) { return a == b; });

  // concordant - discordant over pairs untied in both coordinates
  const std::int64_t s = total_pairs - x_ties - y_ties + joint_ties - 2 * discordant;
  return 2.0 * static_cast<double>(s) / static_cast<double>(n * (n - 1));
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1 .. j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  require_pairs(x, y, 2);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  double sum_d2 = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) sum_d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  const auto n = static_cast<double>(x.size());
  return 1.0 - 6.0 * sum_d2 / (n * (n * n - 1.0));
}

double llr_accuracy(std::span<const double> scores, std::span<const double> gains) {
  require_pairs(scores, gains, 1);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if ((scores[i] > 0.0 && gains[i] > 0.0) || (scores[i] < 0.0 && gains[i] < 0.0)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

double auroc(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  if (pos_scores.empty() || neg_scores.empty()) fail(ErrorCode::empty_input, "AUROC needs both score sets non-empty");
  std::vector<double> pooled(pos_scores.begin(), pos_scores.end());
  pooled.insert(pooled.end(), neg_scores.begin(), neg_scores.end());
  for (double v : pooled) {
    if (std::isnan(v)) fail(ErrorCode::non_finite_value, "AUROC input contains NaN");
  }
  const auto ranks = average_ranks(pooled);
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < pos_scores.size(); ++i) pos_rank_sum += ranks[i];
  const auto np = static_cast<double>(pos_scores.size());
  const auto nn = static_cast<double>(neg_scores.size());
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * nn);
}

double pcc(std::span<const double> x, std::span<const double> y) {
  require_pairs(x, y, 2);
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::zero_variance, "PCC undefined for a constant vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double mean_rowwise_pcc(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorCode::shape_mismatch, "embedding shapes differ");
  if (a.rows() == 0) fail(ErrorCode::empty_input, "no embeddings");
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Eigen::VectorXd ra = a.row(i).transpose();
    const Eigen::VectorXd rb = b.row(i).transpose();
    total += pcc(std::span(ra.data(), static_cast<std::size_t>(ra.size())),
                 std::span(rb.data(), static_cast<std::size_t>(rb.size())));
  }
  return total / static_cast<double>(a.rows());
}

RankingEval evaluate_ranking(std::span<const double> scores, std::span<const double> gains) {
  RankingEval eval;
  eval.tau = kendall_tau(scores, gains);
  eval.rho = spearman_rho(scores, gains);
  eval.llr_acc = llr_accuracy(scores, gains);
  eval.n = scores.size();
  return eval;
}

}  // namespace promptllr
