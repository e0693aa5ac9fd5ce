#include "promptllr/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles/rank_oracle.hpp"
#include "promptllr/feature_set.hpp"
#include "test_util.hpp"

using namespace promptllr;
using testutil::error_code_of;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

std::vector<double> tied_vector(std::mt19937_64& rng, std::size_t n, int levels) {
  std::uniform_int_distribution<int> pick(0, levels - 1);
  std::vector<double> v(n);
  for (auto& x : v) x = pick(rng);
  return v;
}

}  // namespace

TEST(KendallTau, IdentityAndReversal) {
  const std::vector<double> x = {0.3, -1.0, 2.5, 7.0, 4.0};
  std::vector<double> rev = x;
  for (auto& v : rev) v = -v;
  EXPECT_EQ(kendall_tau(x, x), 1.0);
  EXPECT_EQ(kendall_tau(x, rev), -1.0);
}

TEST(KendallTau, AllPermutationsOfSixMatchPairOracle) {
  std::vector<double> base = {1, 2, 3, 4, 5, 6};
  std::vector<double> perm = base;
  int count = 0;
  do {
    EXPECT_EQ(kendall_tau(base, perm), oracle::kendall_pairs(base, perm));
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(count, 720);
}

TEST(KendallTau, TiedVectorsMatchPairOracle) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> n_dist(2, 40);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = n_dist(rng);
    const auto x = tied_vector(rng, n, 1 + trial % 5);
    const auto y = tied_vector(rng, n, 1 + trial % 7);
    EXPECT_NEAR(kendall_tau(x, y), oracle::kendall_pairs(x, y), 1e-15) << "trial " << trial;
  }
}

TEST(KendallTau, LargeRandomMatchesPairOracle) {
  std::mt19937_64 rng(5);
  const auto x = random_vector(rng, 700), y = random_vector(rng, 700);
  EXPECT_NEAR(kendall_tau(x, y), oracle::kendall_pairs(x, y), 1e-15);
}

TEST(KendallTau, Errors) {
  const std::vector<double> a = {1, 2}, b = {1, 2, 3}, one = {1};
  EXPECT_EQ(error_code_of([&] { kendall_tau(a, b); }), ErrorCode::length_mismatch);
  EXPECT_EQ(error_code_of([&] { kendall_tau(one, one); }), ErrorCode::out_of_range);
  const std::vector<double> nan = {1, std::nan("")};
  EXPECT_EQ(error_code_of([&] { kendall_tau(nan, a); }), ErrorCode::non_finite_value);
}

TEST(SpearmanRho, HandExample) {
  const std::vector<double> x = {1, 2, 3, 4, 5}, y = {2, 1, 3, 5, 4};
  EXPECT_NEAR(spearman_rho(x, y), 0.8, 1e-15);
}

TEST(SpearmanRho, IdentityAndReversal) {
  const std::vector<double> x = {5, 1, 9, 3}, r = {-5, -1, -9, -3};
  EXPECT_EQ(spearman_rho(x, x), 1.0);
  EXPECT_EQ(spearman_rho(x, r), -1.0);
}

TEST(SpearmanRho, AllPermutationsOfSixMatchCountingOracle) {
  std::vector<double> base = {1, 2, 3, 4, 5, 6};
  std::vector<double> perm = base;
  do {
    EXPECT_NEAR(spearman_rho(base, perm), oracle::spearman_counting(base, perm), 1e-15);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(SpearmanRho, TiedVectorsMatchCountingOracle) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> n_dist(2, 40);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = n_dist(rng);
    const auto x = tied_vector(rng, n, 1 + trial % 6);
    const auto y = tied_vector(rng, n, 2 + trial % 4);
    EXPECT_NEAR(spearman_rho(x, y), oracle::spearman_counting(x, y), 1e-12) << "trial " << trial;
  }
}

TEST(AverageRanks, MatchCountingOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto v = tied_vector(rng, 25, 1 + trial % 8);
    EXPECT_EQ(average_ranks(v), oracle::counting_ranks(v));
  }
}

TEST(RankMetrics, InvariantUnderIncreasingTransforms) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_vector(rng, 30), y = random_vector(rng, 30);
    std::vector<double> fx(x.size()), gy(y.size());
    std::transform(x.begin(), x.end(), fx.begin(), [](double v) { return std::exp(v) + 3.0; });
    std::transform(y.begin(), y.end(), gy.begin(), [](double v) { return v * v * v; });
    EXPECT_EQ(kendall_tau(x, y), kendall_tau(fx, gy));
    EXPECT_EQ(spearman_rho(x, y), spearman_rho(fx, gy));
  }
}

TEST(LlrAccuracy, Basics) {
  const std::vector<double> pos = {1, 2, 3}, neg = {-1, -2, -3};
  EXPECT_EQ(llr_accuracy(pos, pos), 1.0);
  EXPECT_EQ(llr_accuracy(pos, neg), 0.0);
  EXPECT_EQ(llr_accuracy(neg, neg), 1.0);
  const std::vector<double> zero = {0, 1, -1}, g = {1, 1, -1};
  EXPECT_NEAR(llr_accuracy(zero, g), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(llr_accuracy(g, zero), 2.0 / 3.0, 1e-15);
  const std::vector<double> empty;
  EXPECT_EQ(error_code_of([&] { llr_accuracy(empty, empty); }), ErrorCode::out_of_range);
}

TEST(LlrAccuracy, DependsOnlyOnSigns) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_vector(rng, 12), g = random_vector(rng, 12);
    std::vector<double> ss(12), sg(12);
    for (std::size_t i = 0; i < 12; ++i) {
      ss[i] = (s[i] > 0) - (s[i] < 0);
      sg[i] = (g[i] > 0) - (g[i] < 0);
    }
    EXPECT_EQ(llr_accuracy(s, g), llr_accuracy(ss, sg));
  }
}

TEST(LlrAccuracy, ElevenOfTwelveOnShippedGains) {
  const auto records = read_gains_csv(PROMPTLLR_DATA_DIR "/gains_clip.csv");
  std::vector<double> gains, scores;
  for (const auto& r : records) {
    gains.push_back(r.gain);
    scores.push_back(r.gain > 0 ? 0.1 : -0.1);
  }
  scores[3] = -scores[3];
  EXPECT_NEAR(llr_accuracy(scores, gains), 0.9167, 5e-5);
  EXPECT_EQ(llr_accuracy(scores, gains), 11.0 / 12.0);
}

TEST(Auroc, Basics) {
  const std::vector<double> hi = {5, 6, 7}, lo = {1, 2}, same = {1, 2, 3};
  EXPECT_EQ(auroc(hi, lo), 1.0);
  EXPECT_EQ(auroc(lo, hi), 0.0);
  EXPECT_EQ(auroc(same, same), 0.5);
  const std::vector<double> empty;
  EXPECT_EQ(error_code_of([&] { auroc(empty, hi); }), ErrorCode::empty_input);
}

TEST(Auroc, MatchesPairOracleIncludingTies) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pos = trial % 2 ? random_vector(rng, 20) : tied_vector(rng, 20, 4);
    const auto neg = trial % 2 ? random_vector(rng, 20) : tied_vector(rng, 20, 4);
    EXPECT_EQ(auroc(pos, neg), oracle::auroc_pairs(pos, neg));
  }
}

TEST(Auroc, ComplementWithoutTies) {
  std::mt19937_64 rng(11);
  const auto pos = random_vector(rng, 33), neg = random_vector(rng, 17);
  EXPECT_NEAR(auroc(pos, neg), 1.0 - auroc(neg, pos), 1e-15);
}

TEST(Pcc, AffineAndNegation) {
  const std::vector<double> x = {0.5, 1.0, -2.0, 3.0, 4.5};
  std::vector<double> y(x.size()), neg(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = 3.0 * x[i] + 7.0;
    neg[i] = -x[i];
  }
  EXPECT_NEAR(pcc(x, y), 1.0, 1e-15);
  EXPECT_NEAR(pcc(x, neg), -1.0, 1e-15);
}

TEST(Pcc, MatchesTextbookFormula) {
  const std::vector<double> x = {1.2, -0.4, 3.3, 2.0, 0.0, -1.1, 5.5, 2.2, -3.0, 0.7};
  const std::vector<double> y = {0.8, 0.1, 2.9, 1.0, -0.5, -0.2, 4.0, 3.1, -2.2, 0.0};
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  const double n = 10;
  for (std::size_t i = 0; i < 10; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  const double expected = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  EXPECT_NEAR(pcc(x, y), expected, 1e-12);
}

TEST(Pcc, InvariantUnderPositiveAffineMaps) {
  std::mt19937_64 rng(12);
  const auto x = random_vector(rng, 40), y = random_vector(rng, 40);
  std::vector<double> ax(40), by(40);
  for (std::size_t i = 0; i < 40; ++i) {
    ax[i] = 0.01 * x[i] - 100.0;
    by[i] = 250.0 * y[i] + 3.0;
  }
  EXPECT_NEAR(pcc(x, y), pcc(ax, by), 1e-12);
}

TEST(Pcc, ConstantInputIsZeroVariance) {
  const std::vector<double> c = {2, 2, 2}, x = {1, 2, 3};
  EXPECT_EQ(error_code_of([&] { pcc(c, x); }), ErrorCode::zero_variance);
}

TEST(MeanRowwisePcc, AveragesPerSampleCorrelations) {
  Eigen::MatrixXd a(2, 3), b(2, 3);
  a << 1, 2, 3, 1, 0, 2;
  b << 2, 4, 6, 3, 1, -4;
  const std::vector<double> a1 = {1, 0, 2}, b1 = {3, 1, -4};
  EXPECT_NEAR(mean_rowwise_pcc(a, b), 0.5 * (1.0 + pcc(a1, b1)), 1e-15);
  EXPECT_EQ(error_code_of([&] { mean_rowwise_pcc(a, Eigen::MatrixXd(3, 3)); }), ErrorCode::shape_mismatch);
}

TEST(EvaluateRanking, BundlesAllMetrics) {
  const std::vector<double> s = {0.5, -0.2, 0.1, -0.9}, g = {3.0, -1.0, -0.5, -4.0};
  const auto eval = evaluate_ranking(s, g);
  EXPECT_EQ(eval.n, 4u);
  EXPECT_EQ(eval.tau, kendall_tau(s, g));
  EXPECT_EQ(eval.rho, spearman_rho(s, g));
  EXPECT_EQ(eval.llr_acc, 0.75);
}
