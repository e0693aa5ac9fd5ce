#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "promptllr/evidence.hpp"
#include "promptllr/feature_set.hpp"

namespace promptllr {

/// Dataset-level log-likelihood ratio: prompt-averaged evidence of the VP
/// features minus the evidence of the LP features. Positive favors visual
/// prompting, negative favors linear probing.
struct LlrReport {
  std::string dataset_name;
  double llr = 0.0;
  double logme_lp = 0.0;
  double logme_vp_mean = 0.0;
  double vp_variance = 0.0;
  std::size_t k_prompts = 0;
  PromptTag prompt_tag = PromptTag::none;
};

LlrReport llr_score(const EvidenceResult& lp, const VpEvidenceResult& vp, std::string dataset_name = {},
                    PromptTag prompt_tag = PromptTag::none);

/// Wraps a single fit as a K=1 prompt average.
VpEvidenceResult as_single_prompt(const EvidenceResult& fit);

/// Fits both sides and scores. Dataset name and tag come from the sets' metadata.
LlrReport score_feature_sets(const FeatureSet& lp, std::span<const FeatureSet> vp, const EvidenceOptions& options = {});

struct SweepEntry {
  FeatureSet lp;
  std::vector<FeatureSet> vp;
};

/// One report per entry, in input order.
std::vector<LlrReport> llr_sweep(std::span<const SweepEntry> mixtures, const EvidenceOptions& options = {});

/// JSON array of {dataset, llr, logme_lp, logme_vp_mean, vp_variance, k, prompt_tag}.
std::string reports_to_json(std::span<const LlrReport> reports, int indent = 2);
std::vector<LlrReport> reports_from_json(std::string_view text);

}  // namespace promptllr
