#include "promptllr/llr.hpp"

#include <json.hpp>

#include "promptllr/error.hpp"

namespace promptllr {

LlrReport llr_score(const EvidenceResult& lp, const VpEvidenceResult& vp, std::string dataset_name,
                    PromptTag prompt_tag) {
  if (vp.per_prompt.empty()) fail(ErrorCode::empty_input, "VP evidence has no prompt fits");
  for (const auto& fit : vp.per_prompt) {
    if (fit.sample_count != lp.sample_count || fit.label_digest != lp.label_digest) {
      fail(ErrorCode::sample_mismatch, "LP and VP evidences were computed on different samples");
    }
  }
  LlrReport report;
  report.dataset_name = std::move(dataset_name);
  report.logme_lp = lp.logme;
  report.logme_vp_mean = vp.mean_logme;
  report.llr = vp.mean_logme - lp.logme;
  report.vp_variance = vp.variance;
  report.k_prompts = vp.k;
  report.prompt_tag = prompt_tag;
  return report;
}

VpEvidenceResult as_single_prompt(const EvidenceResult& fit) {
  VpEvidenceResult vp;
  vp.mean_logme = fit.logme;
  vp.variance = 0.0;
  vp.per_prompt = {fit};
  vp.k = 1;
  return vp;
}

LlrReport score_feature_sets(const FeatureSet& lp, std::span<const FeatureSet> vp, const EvidenceOptions& options) {
  if (vp.empty()) fail(ErrorCode::empty_input, "need at least one VP feature set");
  if (lp.labels != vp.front().labels) fail(ErrorCode::sample_mismatch, "LP and VP labels differ");
  const auto lp_fit = maximize_evidence(lp, options);
  const auto vp_fit = vp_evidence(vp, options);
  return llr_score(lp_fit, vp_fit, lp.meta.dataset_name, vp.front().meta.prompt_tag);
}

std::vector<LlrReport> llr_sweep(std::span<const SweepEntry> mixtures, const EvidenceOptions& options) {
  std::vector<LlrReport> out;
  out.reserve(mixtures.size());
  for (const auto& entry : mixtures) out.push_back(score_feature_sets(entry.lp, entry.vp, options));
  return out;
}

std::string reports_to_json(std::span<const LlrReport> reports, int indent) {
  auto arr = nlohmann::json::array();
  for (const auto& r : reports) {
    arr.push_back({{"dataset", r.dataset_name},
                   {"llr", r.llr},
                   {"logme_lp", r.logme_lp},
                   {"logme_vp_mean", r.logme_vp_mean},
                   {"vp_variance", r.vp_variance},
                   {"k", r.k_prompts},
                   {"prompt_tag", std::string(to_string(r.prompt_tag))}});
  }
  return arr.dump(indent);
}

std::vector<LlrReport> reports_from_json(std::string_view text) {
  std::vector<LlrReport> out;
  try {
    const auto arr = nlohmann::json::parse(text);
    if (!arr.is_array()) fail(ErrorCode::invalid_metadata, "report JSON must be an array");
    for (const auto& item : arr) {
      LlrReport r;
      r.dataset_name = item.at("dataset").get<std::string>();
      r.llr = item.at("llr").get<double>();
      r.logme_lp = item.value("logme_lp", 0.0);
      r.logme_vp_mean = item.value("logme_vp_mean", 0.0);
      r.vp_variance = item.value("vp_variance", 0.0);
      r.k_prompts = item.value("k", std::size_t{0});
      r.prompt_tag = parse_prompt_tag(item.value("prompt_tag", std::string("none"))).value_or(PromptTag::none);
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_metadata, std::string("bad report JSON: ") + e.what());
  }
  return out;
}

}  // namespace promptllr
