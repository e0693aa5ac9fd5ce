#include <sstream>

#include "promptllr/common.hpp"
#include "promptllr/error.hpp"
#include "promptllr/llr.hpp"

namespace promptllr::cli {

namespace {

struct MixArgs {
  std::string a;
  std::string b;
  std::vector<std::string> vp_a;
  std::vector<std::string> vp_b;
  std::vector<std::string> k;
  std::string format = "json";
  std::string output;
};

std::uint32_t parse_k(const std::string& text, std::uint32_t full) {
  if (text == "full") return full;
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used == text.size() && v >= 0) return static_cast<std::uint32_t>(v);
  } catch (const std::exception&) {
  }
  fail(ErrorCode::out_of_range, "k must be a nonnegative integer or 'full', got '" + text + "'");
}

void run_mix(const MixArgs& args, const Globals& globals) {
  if (args.vp_a.size() != args.vp_b.size()) {
    fail(ErrorCode::mismatched_sets, "--vp-a and --vp-b need the same number of prompt sets");
  }
  const auto a = load_feature_set(args.a);
  const auto b = load_feature_set(args.b);
  const auto vp_a = load_sets(args.vp_a);
  const auto vp_b = load_sets(args.vp_b);

  std::vector<std::uint32_t> ks;
  for (const auto& text : args.k) ks.push_back(parse_k(text, b.class_count()));

  // build every mixture first so bad k values fail before any fitting
  std::vector<SweepEntry> entries;
  for (auto k : ks) {
    SweepEntry e{mix_feature_sets(a, b, k), {}};
    for (std::size_t p = 0; p < vp_a.size(); ++p) e.vp.push_back(mix_feature_sets(vp_a[p], vp_b[p], k));
    entries.push_back(std::move(e));
  }
  const auto reports = llr_sweep(entries, evidence_options(globals));

  const auto fraction = [&](std::size_t i) {
    const auto n = static_cast<double>(entries[i].lp.sample_count());
    return (n - static_cast<double>(a.sample_count())) / n;
  };

  if (args.format == "csv") {
    std::ostringstream out;
    out.precision(17);
    out << "k,ood_fraction,llr,logme_lp,logme_vp_mean,vp_variance\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& r = reports[i];
      out << ks[i] << ',' << fraction(i) << ',' << r.llr << ',' << r.logme_lp << ',' << r.logme_vp_mean << ','
          << r.vp_variance << '\n';
    }
    emit(args.output, out.str());
    return;
  }

  json rows = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    json row = report_json(reports[i]);
    row["k_classes"] = ks[i];
    row["ood_fraction"] = fraction(i);
    rows.push_back(row);
  }
  json config = {{"a", args.a},           {"b", args.b},
                 {"vp_a", args.vp_a},     {"vp_b", args.vp_b},
                 {"k", args.k},           {"format", args.format},
                 {"evidence", evidence_options_json(evidence_options(globals))}};
  emit_json(args.output, envelope("mix-sweep", config, {{"reports", rows}}));
}

}  // namespace

void register_mix_sweep(CLI::App& root, const Globals& globals, Runner& run) {
  auto args = std::make_shared<MixArgs>();
  auto* sub = root.add_subcommand("mix-sweep", "LLR across mixtures of dataset A with the first k classes of B");
  sub->add_option("--a", args->a, "LP features of the base dataset (.fst)")->required();
  sub->add_option("--b", args->b, "LP features of the dataset mixed in (.fst)")->required();
  sub->add_option("--vp-a", args->vp_a, "Prompted features of A, one per prompt")->required();
  sub->add_option("--vp-b", args->vp_b, "Prompted features of B, paired with --vp-a")->required();
  sub->add_option("--k", args->k, "Class counts taken from B (integers or 'full')")->required();
  sub->add_option("--format", args->format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  add_output_option(sub, args->output);
  sub->callback([args, &globals, &run] { run = [args, &globals] { run_mix(*args, globals); }; });
}

}  // namespace promptllr::cli
