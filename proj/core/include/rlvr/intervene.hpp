#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rlvr/inference.hpp"
#include "rlvr/question.hpp"
#include "rlvr/rollout.hpp"

namespace rlvr {

struct InterventionRecord {
    std::string base_question_id;
    InterventionKind kind = InterventionKind::many_hop;
    std::optional<VerifiableQuestion> transformed;  // absent when rejected
    bool accepted = false;  // survived both the structural checks and re-filtering
    std::string reason;     // rejection reason, or "kept" / the filter bin
};

inline constexpr const char* kInterventionLogSchema = "intervention_log/v1";

std::string intervention_record_to_json_line(const InterventionRecord& r);

struct TransformOutcome {
    std::optional<VerifiableQuestion> question;
    std::string reason;  // set when rejected
};

// Asks the endpoint to rewrite the question's text while keeping the target
// and answer format untouched, then checks the reply: options must survive
// byte-for-byte, the stated target must still name the same answer. One
// retry with a fresh derived seed before giving up. The transformed question
// keeps the base target/options/format verbatim and gets provenance
// intervention(kind) plus a "+<kind>" id suffix.
TransformOutcome apply_intervention(const VerifiableQuestion& q, InterventionKind kind,
                                    Sampler& sampler, std::uint64_t run_seed);

struct IntervenedDataset {
    std::vector<VerifiableQuestion> combined;  // base and transformed, 1:1 interleaved
    std::vector<InterventionRecord> records;   // one per base question
    std::vector<WinRateRecord> transformed_win_rates;
};

// Transforms every base question, re-measures win-rates on the transformed
// statements, keeps the strictly-mixed ones, then combines base and accepted
// transformed questions 1:1 (the larger side subsampled, seeded). Zero
// accepted transformations is an error.
IntervenedDataset build_intervened_dataset(const std::vector<VerifiableQuestion>& base,
                                           InterventionKind kind, Sampler& sampler,
                                           const SamplingConfig& rollout_config,
                                           std::uint64_t run_seed);

}  // namespace rlvr
