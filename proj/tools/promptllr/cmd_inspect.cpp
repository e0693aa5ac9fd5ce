#include "promptllr/common.hpp"
#include "promptllr/error.hpp"
#include "promptllr/io.hpp"
#include "promptllr/prompts.hpp"

namespace promptllr::cli {

namespace {

struct InspectArgs {
  std::string path;
  std::string output;
};

json inspect_fst(const std::vector<std::uint8_t>& bytes) {
  const auto fs = decode_feature_set(bytes);
  json out = {{"format", "fst"},
              {"n", fs.sample_count()},
              {"dim", fs.dim()},
              {"classes", fs.class_count()},
              {"feature_kind", std::string(to_string(fs.meta.feature_kind))},
              {"prompt_tag", std::string(to_string(fs.meta.prompt_tag))},
              {"dataset_name", fs.meta.dataset_name},
              {"model_name", fs.meta.model_name},
              {"class_histogram", fs.class_histogram()}};
  out["prompt_seed"] = fs.meta.prompt_seed ? json(*fs.meta.prompt_seed) : json(nullptr);
  return out;
}

json inspect_pst(const std::vector<std::uint8_t>& bytes) {
  const auto p = decode_prompt(bytes);
  std::size_t nonzero = 0;
  double sum = 0.0;
  for (float v : p.delta) {
    nonzero += v != 0.0f ? 1 : 0;
    sum += v;
  }
  json out = {{"format", "pst"},
              {"h", p.spec.height},
              {"w", p.spec.width},
              {"frame", p.spec.frame},
              {"provenance", std::string(to_string(p.provenance))},
              {"ring_size", p.spec.ring_size()},
              {"nonzero", nonzero},
              {"ring_mean", sum / static_cast<double>(p.spec.ring_size())}};
  out["gamma"] = p.gamma ? json(*p.gamma) : json(nullptr);
  out["seed"] = p.seed ? json(*p.seed) : json(nullptr);
  return out;
}

void run_inspect(const InspectArgs& args) {
  const auto bytes = read_file_bytes(args.path);
  const std::string magic(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(4, bytes.size())));
  json result;
  if (magic == "FSTv") {
    result = inspect_fst(bytes);
  } else if (magic == "PSTv") {
    result = inspect_pst(bytes);
  } else {
    fail(ErrorCode::bad_magic, args.path + " is neither an .fst nor a .pst file");
  }
  emit_json(args.output, envelope("inspect", {{"path", args.path}}, result));
}

}  // namespace

void register_inspect(CLI::App& root, const Globals&, Runner& run) {
  auto args = std::make_shared<InspectArgs>();
  auto* sub = root.add_subcommand("inspect", "Validate a .fst or .pst file and print its header");
  sub->add_option("path", args->path, "File to inspect")->required();
  add_output_option(sub, args->output);
  sub->callback([args, &run] { run = [args] { run_inspect(*args); }; });
}

}  // namespace promptllr::cli
