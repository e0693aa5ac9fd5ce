#include <optional>

#include "promptllr/baselines.hpp"
#include "promptllr/common.hpp"

namespace promptllr::cli {

namespace {

struct SoftmaxArgs {
  std::string logits;
  double temperature = kDefaultOdinTemperature;
  std::string perturbed;
  std::string output;
};

struct MahalanobisArgs {
  std::string train;
  std::string id;
  std::string ood;
  std::string output;
};

json score_json(const BaselineScore& s) {
  return {{"method", std::string(to_string(s.method))},
          {"dataset_score", s.dataset_score},
          {"sort_sign", s.sort_sign},
          {"oriented_score", s.oriented_score()},
          {"per_sample", s.per_sample}};
}

void run_confidence(const SoftmaxArgs& args) {
  const auto score = confidence_score(load_matrix(args.logits));
  emit_json(args.output, envelope("baseline confidence", {{"logits", args.logits}}, score_json(score)));
}

void run_odin(const SoftmaxArgs& args) {
  std::optional<Eigen::MatrixXd> perturbed;
  if (!args.perturbed.empty()) perturbed = load_matrix(args.perturbed);
  const auto score = odin_score(load_matrix(args.logits), args.temperature, perturbed);
  json config = {{"logits", args.logits}, {"temperature", args.temperature}};
  if (!args.perturbed.empty()) config["perturbed"] = args.perturbed;
  emit_json(args.output, envelope("baseline odin", config, score_json(score)));
}

void run_mahalanobis(const MahalanobisArgs& args) {
  const auto fit = mahalanobis_fit(load_feature_set(args.train));
  const auto score = mahalanobis_baseline(fit, load_matrix(args.id), load_matrix(args.ood));
  json result = score_json(score);
  result["ridge"] = fit.ridge;
  emit_json(args.output,
            envelope("baseline mahalanobis", {{"train", args.train}, {"id", args.id}, {"ood", args.ood}}, result));
}

}  // namespace

void register_baseline(CLI::App& root, const Globals&, Runner& run) {
  auto* base = root.add_subcommand("baseline", "OOD-detection baseline scores");
  base->require_subcommand(1);

  auto conf = std::make_shared<SoftmaxArgs>();
  auto* c = base->add_subcommand("confidence", "Mean maximum softmax probability");
  c->add_option("--logits", conf->logits, "Logits as .fst (n x C)")->required();
  add_output_option(c, conf->output);
  c->callback([conf, &run] { run = [conf] { run_confidence(*conf); }; });

  auto odin = std::make_shared<SoftmaxArgs>();
  auto* o = base->add_subcommand("odin", "Temperature-scaled maximum softmax");
  o->add_option("--logits", odin->logits, "Logits as .fst (n x C)")->required();
  o->add_option("--temperature", odin->temperature, "Softmax temperature")->capture_default_str();
  o->add_option("--perturbed", odin->perturbed, "Logits of input-perturbed samples (.fst), replaces --logits");
  add_output_option(o, odin->output);
  o->callback([odin, &run] { run = [odin] { run_odin(*odin); }; });

  auto maha = std::make_shared<MahalanobisArgs>();
  auto* m = base->add_subcommand("mahalanobis", "AUROC of min-class Mahalanobis distance, OOD vs ID reference");
  m->add_option("--train", maha->train, "Labelled features for class means and tied covariance (.fst)")->required();
  m->add_option("--id", maha->id, "In-distribution reference features (.fst)")->required();
  m->add_option("--ood", maha->ood, "Downstream features scored as positives (.fst)")->required();
  add_output_option(m, maha->output);
  m->callback([maha, &run] { run = [maha] { run_mahalanobis(*maha); }; });
}

}  // namespace promptllr::cli
