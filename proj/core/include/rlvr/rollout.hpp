#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlvr/inference.hpp"
#include "rlvr/question.hpp"

namespace rlvr {

struct RolloutRecord {
    std::string question_id;
    std::vector<std::string> completions;  // G strings
    std::vector<int> rewards;              // G values in {0,1}
};

// Exact success fraction, stored as the integer pair (never a float).
struct WinRateRecord {
    std::string question_id;
    int successes = 0;  // c
    int total = 0;      // n

    double win_rate() const { return total ? static_cast<double>(successes) / total : 0.0; }
    bool operator==(const WinRateRecord&) const = default;
};

inline constexpr const char* kRolloutSchema = "rollouts/v1";
inline constexpr const char* kWinRateSchema = "win_rates/v1";

std::string rollout_record_to_json_line(const RolloutRecord& r);
RolloutRecord rollout_record_from_json_line(const std::string& line);
std::string win_rate_record_to_json_line(const WinRateRecord& r);
WinRateRecord win_rate_record_from_json_line(const std::string& line);

std::vector<WinRateRecord> load_win_rates(const std::filesystem::path& file);
void save_win_rates(const std::filesystem::path& file, const std::vector<WinRateRecord>& records);
std::vector<RolloutRecord> load_rollouts(const std::filesystem::path& file);
void save_rollouts(const std::filesystem::path& file, const std::vector<RolloutRecord>& records);

// Samples config.num_samples completions for one question (evaluation
// instructions prepended, per-question seed derived from config.seed and the
// question id) and grades each into a binary reward.
RolloutRecord rollout_question(const VerifiableQuestion& q, Sampler& sampler,
                               const SamplingConfig& config);

struct WinRateResult {
    std::vector<WinRateRecord> records;    // ordered by question_id
    std::vector<RolloutRecord> rollouts;   // same order, kept for reuse
};

// One record per question. Duplicate question ids are an error; sampler
// failures are rethrown tagged with the question id.
WinRateResult measure_win_rates(const std::vector<VerifiableQuestion>& questions,
                                Sampler& sampler, const SamplingConfig& config);

struct FilterResult {
    std::vector<VerifiableQuestion> kept;  // input order, 0 < win_rate < 1
    std::vector<std::string> too_easy;     // question_ids with win_rate = 1
    std::vector<std::string> too_hard;     // question_ids with win_rate = 0
};

// Partitions the input: kept ∪ too_easy ∪ too_hard, pairwise disjoint.
// A question without a record is a hard error.
FilterResult filter_by_win_rate(const std::vector<VerifiableQuestion>& questions,
                                const std::vector<WinRateRecord>& records);

}  // namespace rlvr
