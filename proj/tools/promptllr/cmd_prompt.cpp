#include <filesystem>

#include "promptllr/common.hpp"
#include "promptllr/error.hpp"
#include "promptllr/prompts.hpp"

namespace promptllr::cli {

namespace {

struct SpecArgs {
  std::uint32_t height = 224;
  std::uint32_t width = 224;
  std::uint32_t frame = 16;

  PromptSpec spec() const {
    PromptSpec s;
    s.height = height;
    s.width = width;
    s.frame = frame;
    s.validate();
    return s;
  }
  json to_json() const { return {{"h", height}, {"w", width}, {"frame", frame}}; }
};

void add_spec_options(CLI::App* sub, SpecArgs& spec) {
  // --h is the image height here, so help is long-form only
  sub->set_help_flag("--help", "Print this help message and exit");
  sub->add_option("--h", spec.height, "Image height")->capture_default_str();
  sub->add_option("--w", spec.width, "Image width")->capture_default_str();
  sub->add_option("--frame", spec.frame, "Frame ring width")->capture_default_str();
}

struct GaussianArgs {
  SpecArgs spec;
  double gamma = 1.0;
  std::int64_t seed = 0;
  std::size_t count = 5;
  std::string out_dir = ".";
  std::string prefix = "gaussian";
  std::string output;
};

void run_gaussian(const GaussianArgs& args) {
  const auto spec = args.spec.spec();
  std::filesystem::create_directories(args.out_dir);
  json files = json::array();
  for (std::size_t i = 0; i < args.count; ++i) {
    const auto seed = args.seed + static_cast<std::int64_t>(i);
    const auto prompt = gaussian_prompt(spec, args.gamma, seed);
    const auto path = std::filesystem::path(args.out_dir) / (args.prefix + "_" + std::to_string(seed) + ".pst");
    write_prompt(prompt, path);
    files.push_back({{"path", path.string()}, {"seed", seed}});
  }
  json config = args.spec.to_json();
  config["gamma"] = args.gamma;
  config["seed"] = args.seed;
  config["count"] = args.count;
  config["out_dir"] = args.out_dir;
  emit_json(args.output, envelope("prompt gaussian", config, {{"files", files}}));
}

struct GradientArgs {
  SpecArgs spec;
  std::string grads;
  std::string prompt_out;
  std::string output;
};

void run_gradient(const GradientArgs& args) {
  const auto spec = args.spec.spec();
  const auto g = load_feature_set(args.grads);
  if (g.dim() != spec.tensor_size()) {
    fail(ErrorCode::shape_mismatch, "gradient file has D=" + std::to_string(g.dim()) + ", expected 3*h*w=" +
                                        std::to_string(spec.tensor_size()));
  }
  // rows are per-sample gradients; the prompt uses their mean
  const Eigen::RowVectorXd mean = g.features.cast<double>().colwise().mean();
  const Eigen::RowVectorXf meanf = mean.cast<float>();
  const auto prompt = gradient_prompt(spec, std::span<const float>(meanf.data(), static_cast<std::size_t>(meanf.size())));
  write_prompt(prompt, args.prompt_out);
  std::size_t on = 0;
  for (float v : prompt.delta) on += v > 0.0f ? 1 : 0;
  json config = args.spec.to_json();
  config["grads"] = args.grads;
  config["samples"] = g.sample_count();
  emit_json(args.output, envelope("prompt gradient", config,
                                  {{"path", args.prompt_out}, {"ring_size", spec.ring_size()}, {"active", on}}));
}

struct SpectrumArgs {
  std::string prompt;
  std::string output;
};

void run_spectrum(const SpectrumArgs& args) {
  const auto p = load_prompt(args.prompt);
  const auto profile = spectrum_profile(p);
  emit_json(args.output, envelope("prompt spectrum", {{"prompt", args.prompt}},
                                  {{"bins", profile.bins}, {"provenance", std::string(to_string(p.provenance))}}));
}

struct KlArgs {
  std::string a;
  std::string b;
  bool reverse = false;
  std::string output;
};

void run_kl(const KlArgs& args) {
  const auto pa = spectrum_profile(load_prompt(args.a));
  const auto pb = spectrum_profile(load_prompt(args.b));
  const double kl = args.reverse ? spectrum_kl(pb, pa) : spectrum_kl(pa, pb);
  json config = {{"a", args.a}, {"b", args.b}, {"direction", args.reverse ? "KL(b||a)" : "KL(a||b)"}};
  emit_json(args.output, envelope("prompt kl", config, {{"kl", kl}, {"bins", pa.bins.size()}}));
}

}  // namespace

void register_prompt(CLI::App& root, const Globals&, Runner& run) {
  auto* prompt = root.add_subcommand("prompt", "Generate prompts and compare their spectra");
  prompt->require_subcommand(1);

  auto gaussian = std::make_shared<GaussianArgs>();
  auto* g = prompt->add_subcommand("gaussian", "Ring prompts with entries drawn from N(0, gamma), clamped to [0, 1]");
  add_spec_options(g, gaussian->spec);
  g->add_option("--gamma", gaussian->gamma, "Variance of the draws")->capture_default_str();
  g->add_option("--seed", gaussian->seed, "Seed of the first prompt; prompt i uses seed + i")->capture_default_str();
  g->add_option("--count", gaussian->count, "Number of prompts")->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("--out-dir", gaussian->out_dir, "Directory for the .pst files")->capture_default_str();
  g->add_option("--prefix", gaussian->prefix, "File name prefix")->capture_default_str();
  add_output_option(g, gaussian->output);
  g->callback([gaussian, &run] { run = [gaussian] { run_gaussian(*gaussian); }; });

  auto gradient = std::make_shared<GradientArgs>();
  auto* d = prompt->add_subcommand("gradient", "Gradient-sign prompt: 1 on the ring where the mean gradient is negative");
  add_spec_options(d, gradient->spec);
  d->add_option("--grads", gradient->grads, "Pixel gradients as .fst with D = 3*h*w (CHW), one row per sample")
      ->required();
  d->add_option("--prompt-out", gradient->prompt_out, "Output .pst")->required();
  add_output_option(d, gradient->output);
  d->callback([gradient, &run] { run = [gradient] { run_gradient(*gradient); }; });

  auto spectrum = std::make_shared<SpectrumArgs>();
  auto* s = prompt->add_subcommand("spectrum", "Radial frequency profile of a prompt");
  s->add_option("prompt", spectrum->prompt, "Prompt file (.pst)")->required();
  add_output_option(s, spectrum->output);
  s->callback([spectrum, &run] { run = [spectrum] { run_spectrum(*spectrum); }; });

  auto kl = std::make_shared<KlArgs>();
  auto* k = prompt->add_subcommand("kl", "KL divergence between the spectral profiles of two prompts");
  k->add_option("a", kl->a, "First prompt (.pst)")->required();
  k->add_option("b", kl->b, "Second prompt (.pst)")->required();
  k->add_flag("--reverse", kl->reverse, "Compute KL(b || a) instead of KL(a || b)");
  add_output_option(k, kl->output);
  k->callback([kl, &run] { run = [kl] { run_kl(*kl); }; });
}

}  // namespace promptllr::cli
