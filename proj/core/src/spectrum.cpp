#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

#include "promptllr/error.hpp"
#include "promptllr/prompts.hpp"

namespace promptllr {

namespace {

// FFTW planner calls are not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Fft2d {
 public:
  Fft2d(std::uint32_t h, std::uint32_t w) : size_(std::size_t{h} * w) {
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size_));
    if (buf_ == nullptr) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_2d(static_cast<int>(h), static_cast<int>(w), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~Fft2d() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(buf_);
  }
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  /// In-place transform of one real plane; returns magnitudes in natural (unshifted) order.
  void magnitudes(std::span<const float> plane, std::vector<double>& out) {
    for (std::size_t i = 0; i < size_; ++i) {
      buf_[i][0] = plane[i];
      buf_[i][1] = 0.0;
    }
    fftw_execute(plan_);
    out.resize(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = std::hypot(buf_[i][0], buf_[i][1]);
  }

 private:
  std::size_t size_;
  fftw_complex* buf_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace

SpectrumProfile spectrum_profile(std::uint32_t height, std::uint32_t width, std::span<const float> chw) {
  const std::size_t plane = std::size_t{height} * width;
  if (height < 2 || width < 2) fail(ErrorCode::shape_mismatch, "spectrum needs at least a 2x2 image");
  if (chw.size() != PromptSpec::channels * plane) fail(ErrorCode::shape_mismatch, "tensor size != 3*h*w");

  const std::size_t bins = std::min(height, width) / 2;
  std::vector<double> sums(bins, 0.0);
  std::vector<std::size_t> counts(bins, 0);

  // Bin index of every frequency after an fftshift-style centering.
  std::vector<std::int64_t> bin_of(plane, -1);
  for (std::uint32_t k = 0; k < height; ++k) {
    const double dy = static_cast<double>((k + height / 2) % height) - static_cast<double>(height / 2);
    for (std::uint32_t l = 0; l < width; ++l) {
      const double dx = static_cast<double>((l + width / 2) % width) - static_cast<double>(width / 2);
      const auto r = static_cast<std::size_t>(std::lround(std::sqrt(dy * dy + dx * dx)));
      if (r < bins) {
        bin_of[std::size_t{k} * width + l] = static_cast<std::int64_t>(r);
        ++counts[r];
      }
    }
  }

  Fft2d fft(height, width);
  std::vector<double> mag;
  for (std::uint32_t c = 0; c < PromptSpec::channels; ++c) {
    fft.magnitudes(chw.subspan(c * plane, plane), mag);
    for (std::size_t i = 0; i < plane; ++i) {
      if (bin_of[i] >= 0) sums[static_cast<std::size_t>(bin_of[i])] += mag[i];
    }
  }

  SpectrumProfile profile;
  profile.bins.resize(bins);
  double total = 0.0;
  for (std::size_t r = 0; r < bins; ++r) {
    const double mean = counts[r] == 0 ? 0.0 : sums[r] / (static_cast<double>(counts[r]) * PromptSpec::channels);
    profile.bins[r] = mean + kSpectrumEpsilon;
    total += profile.bins[r];
  }
  for (auto& b : profile.bins) b /= total;
  return profile;
}

SpectrumProfile spectrum_profile(const PromptSample& prompt) {
  return spectrum_profile(prompt.spec.height, prompt.spec.width, prompt.delta);
}

double spectrum_kl(const SpectrumProfile& p, const SpectrumProfile& q) {
  if (p.bins.size() != q.bins.size()) {
    fail(ErrorCode::bin_mismatch, "bin counts differ: " + std::to_string(p.bins.size()) + " vs " +
                                         std::to_string(q.bins.size()));
  }
  if (p.bins.empty()) fail(ErrorCode::empty_input, "empty spectrum profile");
  const double norm = 1.0 + kSpectrumEpsilon * static_cast<double>(p.bins.size());
  double kl = 0.0;
  for (std::size_t i = 0; i < p.bins.size(); ++i) {
    if (p.bins[i] < 0.0 || q.bins[i] < 0.0) fail(ErrorCode::out_of_range, "profile bins must be nonnegative");
    const double pi = (p.bins[i] + kSpectrumEpsilon) / norm;
    const double qi = (q.bins[i] + kSpectrumEpsilon) / norm;
    kl += pi * std::log(pi / qi);
  }
  return kl;
}

}  // namespace promptllr
