#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles/rank_oracle.hpp"
#include "promptllr/prompts.hpp"
#include "test_util.hpp"

using namespace promptllr;
using testutil::error_code_of;

namespace {

std::vector<float> random_image(std::mt19937_64& rng, std::size_t h, std::size_t w) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> v(3 * h * w);
  for (auto& x : v) x = u(rng);
  return v;
}

SpectrumProfile random_profile(std::mt19937_64& rng, std::size_t bins) {
  std::exponential_distribution<double> e(1.0);
  SpectrumProfile p;
  p.bins.resize(bins);
  for (auto& b : p.bins) b = e(rng);
  const double s = std::accumulate(p.bins.begin(), p.bins.end(), 0.0);
  for (auto& b : p.bins) b /= s;
  return p;
}

/// Profile from the naive DFT, fftshift and radial binning written out directly.
std::vector<double> naive_profile(const std::vector<float>& chw, std::size_t h, std::size_t w) {
  const std::size_t bins = std::min(h, w) / 2;
  std::vector<double> sum(bins, 0.0), count(bins, 0.0);
  for (std::size_t c = 0; c < 3; ++c) {
    const std::vector<float> plane(chw.begin() + static_cast<std::ptrdiff_t>(c * h * w),
                                   chw.begin() + static_cast<std::ptrdiff_t>((c + 1) * h * w));
    const auto mag = oracle::naive_dft_magnitude(plane, h, w);
    // shifted[(k + h/2) % h][(l + w/2) % w] = mag[k][l]; centre sits at (h/2, w/2)
    for (std::size_t k = 0; k < h; ++k) {
      for (std::size_t l = 0; l < w; ++l) {
        const double sy = double((k + h / 2) % h) - double(h / 2);
        const double sx = double((l + w / 2) % w) - double(w / 2);
        const auto r = static_cast<std::size_t>(std::lround(std::hypot(sy, sx)));
        if (r < bins) {
          sum[r] += mag[k * w + l];
          count[r] += 1.0;
        }
      }
    }
  }
  std::vector<double> out(bins);
  double total = 0.0;
  for (std::size_t r = 0; r < bins; ++r) {
    out[r] = (count[r] > 0 ? sum[r] / count[r] : 0.0) + kSpectrumEpsilon;
    total += out[r];
  }
  for (auto& v : out) v /= total;
  return out;
}

}  // namespace

TEST(SpectrumProfile, NormalizedAndSized) {
  std::mt19937_64 rng(1);
  for (auto [h, w] : {std::pair{16, 16}, std::pair{9, 14}, std::pair{31, 8}}) {
    const auto p = spectrum_profile(h, w, random_image(rng, h, w));
    ASSERT_EQ(p.bins.size(), static_cast<std::size_t>(std::min(h, w) / 2));
    EXPECT_NEAR(std::accumulate(p.bins.begin(), p.bins.end(), 0.0), 1.0, 1e-9);
    for (double b : p.bins) EXPECT_GE(b, 0.0);
  }
}

TEST(SpectrumProfile, MatchesNaiveDft) {
  std::mt19937_64 rng(2);
  for (auto [h, w] : {std::pair{8, 6}, std::pair{7, 9}, std::pair{10, 10}}) {
    const auto img = random_image(rng, h, w);
    const auto got = spectrum_profile(h, w, img).bins;
    const auto expected = naive_profile(img, h, w);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
  }
}

TEST(SpectrumProfile, ConstantRingIsDcDominated) {
  PromptSpec spec;
  spec.height = 64;
  spec.width = 64;
  spec.frame = 8;
  PromptSample p = gradient_prompt(spec, std::vector<float>(spec.tensor_size(), -1.0f));
  const auto prof = spectrum_profile(p);
  for (std::size_t r = 1; r < prof.bins.size(); ++r) EXPECT_GT(prof.bins[0], prof.bins[r]) << "bin " << r;
}

TEST(SpectrumProfile, InvariantToCircularTranslation) {
  std::mt19937_64 rng(3);
  const std::size_t h = 24, w = 20;
  const auto img = random_image(rng, h, w);
  for (auto [dy, dx] : {std::pair{1, 0}, std::pair{5, 7}, std::pair{23, 19}}) {
    std::vector<float> shifted(img.size());
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t col = 0; col < w; ++col) {
          shifted[c * h * w + ((r + dy) % h) * w + (col + dx) % w] = img[c * h * w + r * w + col];
        }
      }
    }
    const auto a = spectrum_profile(h, w, img).bins, b = spectrum_profile(h, w, shifted).bins;
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
  }
}

TEST(SpectrumProfile, WhiteNoiseIsRoughlyFlat) {
  const std::size_t h = 64, w = 64;
  double ratio_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> normal;
    std::vector<float> img(3 * h * w);
    for (auto& v : img) v = normal(rng);
    const auto bins = spectrum_profile(h, w, img).bins;
    const auto [lo, hi] = std::minmax_element(bins.begin() + 1, bins.end());
    ratio_sum += *hi / *lo;
  }
  EXPECT_LE(ratio_sum / 20.0, 3.0);
}

TEST(SpectrumProfile, Errors) {
  EXPECT_EQ(error_code_of([] { spectrum_profile(4, 4, std::vector<float>(47)); }), ErrorCode::shape_mismatch);
  EXPECT_EQ(error_code_of([] { spectrum_profile(1, 4, std::vector<float>(12)); }), ErrorCode::shape_mismatch);
}

TEST(SpectrumKl, SelfDivergenceIsZero) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto p = random_profile(rng, 1 + i);
    EXPECT_EQ(spectrum_kl(p, p), 0.0);
  }
}

TEST(SpectrumKl, TwoBinHandValue) {
  const SpectrumProfile p{{0.5, 0.5}}, q{{0.9, 0.1}};
  const double expected = 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1);
  EXPECT_NEAR(spectrum_kl(p, q), expected, 1e-6);
  EXPECT_NEAR(spectrum_kl(p, q), 0.5108, 5e-5);
}

TEST(SpectrumKl, NonNegativeOnRandomPairs) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t bins = 1 + i % 40;
    EXPECT_GE(spectrum_kl(random_profile(rng, bins), random_profile(rng, bins)), 0.0);
  }
}

TEST(SpectrumKl, HandlesZeroBinsThroughSmoothing) {
  const SpectrumProfile p{{1.0, 0.0}}, q{{0.0, 1.0}};
  const double kl = spectrum_kl(p, q);
  EXPECT_TRUE(std::isfinite(kl));
  EXPECT_GT(kl, 20.0);
}

TEST(SpectrumKl, DecreasesAlongMixingPath) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_profile(rng, 16), q = random_profile(rng, 16);
    double prev = std::numeric_limits<double>::infinity();
    for (int step = 0; step <= 9; ++step) {
      const double t = step / 9.0;
      SpectrumProfile mix;
      for (std::size_t i = 0; i < 16; ++i) mix.bins.push_back((1 - t) * q.bins[i] + t * p.bins[i]);
      const double kl = spectrum_kl(p, mix);
      EXPECT_LT(kl, prev);
      prev = kl;
    }
    EXPECT_NEAR(prev, 0.0, 1e-15);
  }
}

TEST(SpectrumKl, Errors) {
  const SpectrumProfile a{{0.5, 0.5}}, b{{1.0}}, empty{};
  EXPECT_EQ(error_code_of([&] { spectrum_kl(a, b); }), ErrorCode::bin_mismatch);
  EXPECT_EQ(error_code_of([&] { spectrum_kl(empty, empty); }), ErrorCode::empty_input);
}
