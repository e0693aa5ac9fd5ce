#include "promptllr/common.hpp"
#include "promptllr/error.hpp"
#include "promptllr/llr.hpp"

namespace promptllr::cli {

namespace {

struct ScoreArgs {
  std::string lp;
  std::vector<std::string> vp;
  bool override_kinds = false;
  std::string tag = "gaussian";
  std::string name;
  std::string output;
};

json fit_json(const EvidenceResult& fit) {
  return {{"logme", fit.logme},
          {"alpha_star", fit.alpha_star},
          {"beta_star", fit.beta_star},
          {"iterations", fit.iterations},
          {"converged", fit.converged}};
}

void run_score(const ScoreArgs& args, const Globals& globals) {
  const auto tag = parse_prompt_tag(args.tag);
  if (!tag || *tag == PromptTag::none) fail(ErrorCode::invalid_metadata, "unknown prompt tag '" + args.tag + "'");

  auto lp = load_feature_set(args.lp);
  auto vp = load_sets(args.vp);
  if (args.override_kinds) {
    lp.meta.feature_kind = FeatureKind::lp_penultimate;
    lp.meta.prompt_tag = PromptTag::none;
    for (auto& v : vp) {
      v.meta.feature_kind = FeatureKind::vp_classifier;
      v.meta.prompt_tag = *tag;
    }
  }
  if (lp.meta.feature_kind != FeatureKind::lp_penultimate) {
    fail(ErrorCode::kind_mismatch, args.lp + " is not an lp_penultimate set (use --override-kinds)");
  }

  const auto options = evidence_options(globals);
  const auto lp_fit = maximize_evidence(lp, options);
  const auto vp_fit = vp_evidence(vp, options);
  const auto name = args.name.empty() ? lp.meta.dataset_name : args.name;
  const auto report = llr_score(lp_fit, vp_fit, name, vp.front().meta.prompt_tag);

  json per_prompt = json::array();
  for (const auto& f : vp_fit.per_prompt) per_prompt.push_back(fit_json(f));

  json config = {{"lp", args.lp},
                 {"vp", args.vp},
                 {"override_kinds", args.override_kinds},
                 {"k_prompts", vp.size()},
                 {"evidence", evidence_options_json(options)}};
  if (args.override_kinds) config["tag"] = args.tag;
  json result = {{"reports", json::array({report_json(report)})},
                 {"lp_fit", fit_json(lp_fit)},
                 {"vp_fits", per_prompt}};
  emit_json(args.output, envelope("score", config, result));
}

}  // namespace

void register_score(CLI::App& root, const Globals& globals, Runner& run) {
  auto args = std::make_shared<ScoreArgs>();
  auto* sub = root.add_subcommand("score", "LLR score of one dataset from LP features and K prompted VP feature sets");
  sub->add_option("--lp", args->lp, "LP feature set (.fst)")->required();
  sub->add_option("--vp", args->vp, "Prompted VP feature sets (.fst), one per prompt")->required();
  sub->add_flag("--override-kinds", args->override_kinds,
                "Treat --lp as lp_penultimate and every --vp as vp_classifier regardless of file metadata");
  sub->add_option("--tag", args->tag, "Prompt tag applied with --override-kinds")->capture_default_str();
  sub->add_option("--name", args->name, "Dataset name for the report (default: from the LP file)");
  add_output_option(sub, args->output);
  sub->callback([args, &globals, &run] { run = [args, &globals] { run_score(*args, globals); }; });
}

}  // namespace promptllr::cli
