#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace promptllr {

/// Geometry of a frame prompt: a border ring of width `frame` around an
/// h x w RGB input. Pixels inside the ring are the only free parameters.
struct PromptSpec {
  static constexpr std::uint32_t channels = 3;

  std::uint32_t height = 224;
  std::uint32_t width = 224;
  std::uint32_t frame = 16;

  /// Requires 0 < 2*frame < min(height, width).
  void validate() const;

  bool in_frame(std::uint32_t row, std::uint32_t col) const noexcept {
    return row < frame || col < frame || row >= height - frame || col >= width - frame;
  }
  std::size_t plane_size() const noexcept { return std::size_t{height} * width; }
  std::size_t tensor_size() const noexcept { return channels * plane_size(); }
  /// Number of free entries over all channels.
  std::size_t ring_size() const noexcept;

  friend bool operator==(const PromptSpec&, const PromptSpec&) = default;
};

enum class Provenance : std::uint8_t {
  gaussian = 0,
  gradient = 1,
  mini_ft_1 = 2,
  mini_ft_5 = 3,
  trained = 4,
};

std::string_view to_string(Provenance p) noexcept;
std::optional<Provenance> parse_provenance(std::string_view text) noexcept;

/// Prompt tensor in CHW order, zero outside the frame ring, values in [0, 1].
struct PromptSample {
  PromptSpec spec;
  std::vector<float> delta;
  Provenance provenance = Provenance::gaussian;
  std::optional<double> gamma;
  std::optional<std::int64_t> seed;

  float at(std::uint32_t channel, std::uint32_t row, std::uint32_t col) const {
    return delta[(std::size_t{channel} * spec.height + row) * spec.width + col];
  }

  void validate() const;

  friend bool operator==(const PromptSample&, const PromptSample&) = default;
};

/// Unclamped N(0, gamma) draws for the ring entries, in CHW scan order.
std::vector<double> gaussian_ring_draws(const PromptSpec& spec, double gamma, std::uint64_t seed);

/// Ring entries drawn i.i.d. N(0, gamma) (gamma is the variance), clamped to [0, 1].
PromptSample gaussian_prompt(const PromptSpec& spec, double gamma, std::int64_t seed);

/// Minimizer of delta'g over delta in [0,1]^d on the ring: 1 where g < 0, else 0.
PromptSample gradient_prompt(const PromptSpec& spec, std::span<const float> grads);

// .pst codec: "PSTv", u16 version, u32 h, u32 w, u32 frame, u8 provenance,
// f64 gamma, i64 seed, then 3*h*w f32 little-endian.
std::vector<std::uint8_t> encode_prompt(const PromptSample& prompt);
PromptSample decode_prompt(const std::vector<std::uint8_t>& bytes);
PromptSample load_prompt(const std::filesystem::path& path);
void write_prompt(const PromptSample& prompt, const std::filesystem::path& path);

/// Probability-normalized radial average of the centered 2-D DFT magnitude.
struct SpectrumProfile {
  std::vector<double> bins;
};

inline constexpr double kSpectrumEpsilon = 1e-12;

/// Channel-averaged |DFT| binned by rounded radius from the spectrum centre;
/// floor(min(h, w) / 2) bins.
SpectrumProfile spectrum_profile(std::uint32_t height, std::uint32_t width, std::span<const float> chw);
SpectrumProfile spectrum_profile(const PromptSample& prompt);

/// KL(p || q) in nats after epsilon smoothing of both profiles.
double spectrum_kl(const SpectrumProfile& p, const SpectrumProfile& q);

}  // namespace promptllr
