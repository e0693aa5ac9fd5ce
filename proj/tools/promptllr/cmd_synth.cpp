#include <filesystem>

#include "promptllr/common.hpp"
#include "promptllr/error.hpp"
#include "promptllr/synthetic.hpp"

namespace promptllr::cli {

namespace {

struct DomainArgs {
  std::string preset = "ood";
  std::uint64_t seed = 0;
  std::uint32_t classes = 0;
  std::size_t per_class = 0;
  std::uint32_t dim = 0;
  std::size_t prompts = 5;
  std::string name;
  std::string out_dir = ".";
  std::string output;
};

struct ClusterArgs {
  std::uint32_t classes = 2;
  std::size_t per_class = 50;
  std::uint32_t dim = 8;
  double separation = 3.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
  std::string kind = "lp_penultimate";
  std::string name = "clusters";
  std::string fst_out;
  std::string output;
};

void run_domain(const DomainArgs& args) {
  auto spec = args.preset == "ood" ? synthetic::ood_domain_spec(args.seed) : synthetic::id_domain_spec(args.seed);
  if (args.classes) spec.classes = args.classes;
  if (args.per_class) spec.per_class = args.per_class;
  if (args.dim) spec.lp_dim = spec.vp_dim = args.dim;
  spec.prompts = args.prompts;
  spec.name = args.name.empty() ? "synthetic-" + args.preset : args.name;
  const auto domain = synthetic::make_domain(spec);

  const std::filesystem::path dir(args.out_dir);
  std::filesystem::create_directories(dir);
  write_feature_set(domain.lp, dir / "lp.fst");
  json vp = json::array();
  for (std::size_t k = 0; k < domain.vp.size(); ++k) {
    const auto path = dir / ("vp_" + std::to_string(k) + ".fst");
    write_feature_set(domain.vp[k], path);
    vp.push_back(path.string());
  }
  json config = {{"preset", args.preset},       {"seed", args.seed},       {"classes", spec.classes},
                 {"per_class", spec.per_class}, {"lp_dim", spec.lp_dim},   {"vp_dim", spec.vp_dim},
                 {"prompts", spec.prompts},     {"name", spec.name},       {"out_dir", args.out_dir}};
  emit_json(args.output, envelope("synth domain", config, {{"lp", (dir / "lp.fst").string()}, {"vp", vp}}));
}

void run_clusters(const ClusterArgs& args) {
  const auto kind = parse_feature_kind(args.kind);
  if (!kind) fail(ErrorCode::invalid_metadata, "unknown feature kind '" + args.kind + "'");
  synthetic::ClusterSpec spec;
  spec.classes = args.classes;
  spec.per_class = args.per_class;
  spec.dim = args.dim;
  spec.separation = args.separation;
  spec.noise = args.noise;
  spec.seed = args.seed;
  FeatureMeta meta;
  meta.feature_kind = *kind;
  meta.prompt_tag = *kind == FeatureKind::vp_classifier ? PromptTag::gaussian : PromptTag::none;
  meta.dataset_name = args.name;
  meta.model_name = "synthetic";
  const auto fs = synthetic::gaussian_clusters(spec, meta);
  write_feature_set(fs, args.fst_out);
  json config = {{"classes", args.classes}, {"per_class", args.per_class}, {"dim", args.dim},
                 {"separation", args.separation}, {"noise", args.noise}, {"seed", args.seed}, {"kind", args.kind}};
  emit_json(args.output, envelope("synth clusters", config, {{"path", args.fst_out}, {"n", fs.sample_count()}}));
}

}  // namespace

void register_synth(CLI::App& root, const Globals&, Runner& run) {
  auto* synth = root.add_subcommand("synth", "Write synthetic feature-set fixtures");
  synth->require_subcommand(1);

  auto domain = std::make_shared<DomainArgs>();
  auto* d = synth->add_subcommand("domain", "LP features plus K prompted VP sets for one synthetic dataset");
  d->add_option("--preset", domain->preset, "ood: classes separate only after prompting; id: the reverse")
      ->check(CLI::IsMember({"ood", "id"}))
      ->capture_default_str();
  d->add_option("--seed", domain->seed)->capture_default_str();
  d->add_option("--classes", domain->classes, "Override the preset's class count");
  d->add_option("--per-class", domain->per_class, "Override samples per class");
  d->add_option("--dim", domain->dim, "Override LP and VP dimension");
  d->add_option("--prompts", domain->prompts, "Number of VP sets (K)")->capture_default_str()->check(CLI::PositiveNumber);
  d->add_option("--name", domain->name, "Dataset name stored in the files");
  d->add_option("--out-dir", domain->out_dir, "Directory for lp.fst and vp_<k>.fst")->capture_default_str();
  add_output_option(d, domain->output);
  d->callback([domain, &run] { run = [domain] { run_domain(*domain); }; });

  auto clusters = std::make_shared<ClusterArgs>();
  auto* c = synth->add_subcommand("clusters", "Isotropic Gaussian class clusters as one .fst");
  c->add_option("--classes", clusters->classes)->capture_default_str();
  c->add_option("--per-class", clusters->per_class)->capture_default_str();
  c->add_option("--dim", clusters->dim)->capture_default_str();
  c->add_option("--separation", clusters->separation)->capture_default_str();
  c->add_option("--noise", clusters->noise)->capture_default_str();
  c->add_option("--seed", clusters->seed)->capture_default_str();
  c->add_option("--kind", clusters->kind)->check(CLI::IsMember({"lp_penultimate", "vp_classifier"}))->capture_default_str();
  c->add_option("--name", clusters->name)->capture_default_str();
  c->add_option("--fst-out", clusters->fst_out, "Output .fst")->required();
  add_output_option(c, clusters->output);
  c->callback([clusters, &run] { run = [clusters] { run_clusters(*clusters); }; });
}

}  // namespace promptllr::cli
