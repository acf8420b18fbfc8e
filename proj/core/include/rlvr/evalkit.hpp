#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rlvr/inference.hpp"
#include "rlvr/question.hpp"
#include "rlvr/rollout.hpp"

namespace rlvr {

enum class SplitKind { validation, test };

struct Subtask {
    std::string subtask_id;
    std::vector<VerifiableQuestion> questions;
};

struct BenchmarkSplit {
    std::string name;
    std::vector<Subtask> subtasks;
    SplitKind kind = SplitKind::validation;
};

// Groups a question file by subtask_id (first-appearance order). Every
// question must carry a subtask_id; subtasks must be nonempty.
BenchmarkSplit load_benchmark_split(const std::filesystem::path& file, const std::string& name,
                                    SplitKind kind = SplitKind::validation);

// Probability that at least one of k draws (without replacement from n
// samples holding c successes) is a success: 1 − C(n−c,k)/C(n,k), computed as
// the product ∏_{j<k} (n−c−j)/(n−j) with early exit when n−c < k.
double pass_at_k(int n, int c, int k);

struct QuestionOutcome {
    std::string question_id;
    std::string subtask_id;
    int n = 0;
    int c = 0;
};

struct PassAtKReport {
    std::vector<int> ks;
    std::vector<std::string> subtask_ids;
    std::vector<QuestionOutcome> outcomes;
    // per_subtask[s][j] = mean pass@ks[j] over subtask s's questions.
    std::vector<std::vector<double>> per_subtask;
    std::vector<double> macro;  // mean over subtasks, one per k
};

// Assembles the report from per-question (n, c) outcomes.
PassAtKReport summarize_outcomes(const std::vector<QuestionOutcome>& outcomes,
                                 const std::vector<std::string>& subtask_order,
                                 const std::vector<int>& ks);

struct EvalResult {
    PassAtKReport report;
    std::vector<RolloutRecord> rollouts;  // reusable as win-rate inputs
};

// Samples n completions per question (evaluation instructions prepended,
// per-question seeds derived from base.seed), grades them, and aggregates
// pass@k per sub-task plus the macro average. Requires n ≥ max(ks).
EvalResult evaluate(Sampler& sampler, const BenchmarkSplit& split, int n,
                    const std::vector<int>& ks, const SamplingConfig& base);

// CSV rows (subtask_id, k, pass_at_k) with a trailing macro row per k.
void save_report_csv(const std::filesystem::path& file, const PassAtKReport& report);
PassAtKReport load_report_csv(const std::filesystem::path& file);

struct DiscriminabilityReport {
    int k_low = 0;
    int k_high = 0;
    double sigma_low = 0.0;
    double sigma_high = 0.0;
    double ratio = 0.0;       // sigma_high / sigma_low when defined
    bool ratio_defined = false;
};

// Population standard deviation of the models' macro scores at each k.
// Needs at least two model reports; σ_low = 0 leaves the ratio undefined.
DiscriminabilityReport discriminability(const std::vector<PassAtKReport>& reports, int k_low,
                                        int k_high);

}  // namespace rlvr
