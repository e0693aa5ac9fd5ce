#include "promptllr/prompts.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "binary_io.hpp"
#include "promptllr/error.hpp"
#include "promptllr/io.hpp"

namespace promptllr {

namespace {

constexpr char kMagic[4] = {'P', 'S', 'T', 'v'};
constexpr std::uint16_t kVersion = 1;
// Absent optional fields are encoded as gamma = 0 and seed = INT64_MIN.
constexpr double kNoGamma = 0.0;
constexpr std::int64_t kNoSeed = std::numeric_limits<std::int64_t>::min();

}  // namespace

void PromptSpec::validate() const {
  if (frame == 0 || 2 * std::uint64_t{frame} >= std::min(height, width)) {
    fail(ErrorCode::shape_mismatch, "frame " + std::to_string(frame) + " invalid for " + std::to_string(height) + "x" +
                                        std::to_string(width));
  }
}

std::size_t PromptSpec::ring_size() const noexcept {
  const std::size_t inner = std::size_t{height - 2 * frame} * (width - 2 * frame);
  return channels * (plane_size() - inner);
}

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::gaussian: return "gaussian";
    case Provenance::gradient: return "gradient";
    case Provenance::mini_ft_1: return "mini_ft_1";
    case Provenance::mini_ft_5: return "mini_ft_5";
    case Provenance::trained: return "trained";
  }
  return "gaussian";
}

std::optional<Provenance> parse_provenance(std::string_view text) noexcept {
  for (auto p : {Provenance::gaussian, Provenance::gradient, Provenance::mini_ft_1, Provenance::mini_ft_5,
                 Provenance::trained}) {
    if (text == to_string(p)) return p;
  }
  return std::nullopt;
}

void PromptSample::validate() const {
  spec.validate();
  if (delta.size() != spec.tensor_size()) {
    fail(ErrorCode::shape_mismatch, "prompt tensor has " + std::to_string(delta.size()) + " entries, expected " +
                                        std::to_string(spec.tensor_size()));
  }
  if (static_cast<unsigned>(provenance) > 4) fail(ErrorCode::invalid_metadata, "unknown provenance");
  if (gamma && !(*gamma > 0.0 && std::isfinite(*gamma))) fail(ErrorCode::invalid_metadata, "gamma must be positive");
  std::size_t idx = 0;
  for (std::uint32_t c = 0; c < PromptSpec::channels; ++c) {
    for (std::uint32_t r = 0; r < spec.height; ++r) {
      for (std::uint32_t col = 0; col < spec.width; ++col, ++idx) {
        const float v = delta[idx];
        if (!std::isfinite(v)) fail(ErrorCode::non_finite_value, "prompt contains NaN or Inf");
        if (v < 0.0f || v > 1.0f) fail(ErrorCode::out_of_range, "prompt value outside [0, 1]");
        if (v != 0.0f && !spec.in_frame(r, col)) {
          fail(ErrorCode::support_violation, "nonzero prompt value inside the image interior");
        }
      }
    }
  }
}

std::vector<double> gaussian_ring_draws(const PromptSpec& spec, double gamma, std::uint64_t seed) {
  spec.validate();
  if (!(gamma > 0.0) || !std::isfinite(gamma)) fail(ErrorCode::out_of_range, "gamma must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(gamma));
  std::vector<double> draws(spec.ring_size());
  for (auto& v : draws) v = normal(rng);
  return draws;
}

PromptSample gaussian_prompt(const PromptSpec& spec, double gamma, std::int64_t seed) {
  const auto draws = gaussian_ring_draws(spec, gamma, static_cast<std::uint64_t>(seed));
  PromptSample out;
  out.spec = spec;
  out.provenance = Provenance::gaussian;
  out.gamma = gamma;
  out.seed = seed;
  out.delta.assign(spec.tensor_size(), 0.0f);
  std::size_t next = 0;
  std::size_t idx = 0;
  for (std::uint32_t c = 0; c < PromptSpec::channels; ++c) {
    for (std::uint32_t r = 0; r < spec.height; ++r) {
      for (std::uint32_t col = 0; col < spec.width; ++col, ++idx) {
        if (spec.in_frame(r, col)) out.delta[idx] = static_cast<float>(std::clamp(draws[next++], 0.0, 1.0));
      }
    }
  }
  return out;
}

PromptSample gradient_prompt(const PromptSpec& spec, std::span<const float> grads) {
  spec.validate();
  if (grads.size() != spec.tensor_size()) {
    fail(ErrorCode::shape_mismatch, "gradient tensor has " + std::to_string(grads.size()) + " entries, expected " +
                                        std::to_string(spec.tensor_size()));
  }
  PromptSample out;
  out.spec = spec;
  out.provenance = Provenance::gradient;
  out.delta.assign(spec.tensor_size(), 0.0f);
  std::size_t idx = 0;
  for (std::uint32_t c = 0; c < PromptSpec::channels; ++c) {
    for (std::uint32_t r = 0; r < spec.height; ++r) {
      for (std::uint32_t col = 0; col < spec.width; ++col, ++idx) {
        const float g = grads[idx];
        if (!std::isfinite(g)) fail(ErrorCode::non_finite_value, "gradient contains NaN or Inf");
        if (g < 0.0f && spec.in_frame(r, col)) out.delta[idx] = 1.0f;
      }
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_prompt(const PromptSample& prompt) {
  prompt.validate();
  detail::ByteWriter w(35 + prompt.delta.size() * 4);
  w.put_chars(std::string_view(kMagic, 4));
  w.put<std::uint16_t>(kVersion);
  w.put<std::uint32_t>(prompt.spec.height);
  w.put<std::uint32_t>(prompt.spec.width);
  w.put<std::uint32_t>(prompt.spec.frame);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(prompt.provenance));
  w.put<double>(prompt.gamma.value_or(kNoGamma));
  w.put<std::int64_t>(prompt.seed.value_or(kNoSeed));
  w.put_array<float>(prompt.delta);
  return std::move(w).take();
}

PromptSample decode_prompt(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.begin())) {
    fail(ErrorCode::bad_magic, "missing PSTv header");
  }
  detail::ByteReader r(bytes, ErrorCode::dimension_mismatch);
  r.get_chars(4);
  if (r.remaining() < 2) fail(ErrorCode::version_mismatch, "truncated version field");
  const auto version = r.get<std::uint16_t>();
  if (version != kVersion) fail(ErrorCode::version_mismatch, "unsupported version " + std::to_string(version));

  PromptSample p;
  p.spec.height = r.get<std::uint32_t>();
  p.spec.width = r.get<std::uint32_t>();
  p.spec.frame = r.get<std::uint32_t>();
  const auto prov = r.get<std::uint8_t>();
  const auto gamma = r.get<double>();
  const auto seed = r.get<std::int64_t>();
  if (prov > 4) fail(ErrorCode::invalid_metadata, "unknown provenance " + std::to_string(prov));
  p.provenance = static_cast<Provenance>(prov);
  if (gamma != kNoGamma) p.gamma = gamma;
  if (seed != kNoSeed) p.seed = seed;
  p.spec.validate();

  const std::uint64_t expected = std::uint64_t{PromptSpec::channels} * p.spec.height * p.spec.width * 4;
  if (r.remaining() != expected) {
    fail(ErrorCode::dimension_mismatch, "payload is " + std::to_string(r.remaining()) + " bytes, expected " +
                                            std::to_string(expected));
  }
  p.delta.resize(p.spec.tensor_size());
  r.get_array<float>(p.delta);
  p.validate();
  return p;
}

PromptSample load_prompt(const std::filesystem::path& path) { return decode_prompt(read_file_bytes(path)); }

void write_prompt(const PromptSample& prompt, const std::filesystem::path& path) {
  write_file_atomic(path, encode_prompt(prompt));
}

}  // namespace promptllr
