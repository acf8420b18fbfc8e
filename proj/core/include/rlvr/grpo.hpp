#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "rlvr/inference.hpp"
#include "rlvr/question.hpp"

namespace rlvr {

// Tabular categorical policy: one logit vector per context (question id) over
// a shared answer alphabet. Parameters θ are the concatenated logits.
struct ToyPolicy {
    std::vector<std::string> contexts;
    std::vector<std::string> alphabet;
    std::vector<std::vector<double>> logits;  // [context][action]

    static ToyPolicy uniform(std::vector<std::string> contexts,
                             std::vector<std::string> alphabet);

    int context_index(const std::string& context) const;  // -1 when absent
    std::vector<double> probs(int context) const;         // softmax of logits
    std::vector<double> logprobs(int context) const;      // log softmax, stable
    int sample_action(int context, std::mt19937_64& rng) const;
};

inline constexpr const char* kPolicySchema = "toy_policy/v1";

// Flat text format: schema header line, then one logit per line. Round-trips
// byte-identically (save∘load∘save is stable).
void save_policy(const std::filesystem::path& file, const ToyPolicy& policy);
ToyPolicy load_policy(const std::filesystem::path& file);

struct GrpoConfig {
    double epsilon = 0.2;  // clip width
    int group_size = 8;    // G
    double learning_rate = 0.1;
    int steps = 250;
    int batch_size = 8;
    std::uint64_t seed = 0;
};

void validate_grpo_config(const GrpoConfig& c);

struct GroupSample {
    std::string question_id;
    std::vector<int> actions;           // indices into the alphabet
    std::vector<double> old_logprobs;   // logπ_old at sampling time
    std::vector<double> rewards;
    std::vector<double> advantages;     // rewards minus the group mean
};

// Mean-centered copy: a_i = r_i − mean(r). Sums to zero.
std::vector<double> advantages(const std::vector<double>& rewards);

// min(ρ·a, clamp(ρ, 1−ε, 1+ε)·a). ρ must be positive.
double surrogate_term(double ratio, double advantage, double epsilon);

struct ObjectiveGradient {
    double objective = 0.0;
    std::vector<std::vector<double>> gradient;  // same shape as policy logits
    double clip_fraction = 0.0;  // members whose ratio left [1−ε, 1+ε]
};

// J = mean over groups of the per-group mean surrogate term, with
// ρ_i = exp(logπ_θ(a_i) − old_logprob_i), the old log-probs recorded at
// sampling time. The gradient flows through logπ_θ only (advantages and old
// log-probs are constants); whichever branch the min selects is
// differentiated, ties taking the unclipped branch, and a clipped ratio
// outside the band contributes zero. `old` must share the policy's contexts
// and alphabet.
ObjectiveGradient objective_and_gradient(const ToyPolicy& policy, const ToyPolicy& old,
                                         const std::vector<GroupSample>& groups, double epsilon);

struct StepMetrics {
    int step = 0;
    double mean_reward = 0.0;
    double objective = 0.0;
    double clip_fraction = 0.0;
};

struct TrainResult {
    ToyPolicy policy;
    std::vector<StepMetrics> metrics;
};

// One gradient-ascent step per outer step: snapshot old ← θ, sample G actions
// per question in the round-robin batch from the snapshot, grade the actions
// as answers, center rewards, step θ. Deterministic under config.seed. NaN in
// the parameters aborts naming the step.
TrainResult train(const ToyPolicy& init, const std::vector<VerifiableQuestion>& questions,
                  const GrpoConfig& config);

// Mean over questions of Σ_a π(a|q) · reward(a, q).
double expected_reward(const ToyPolicy& policy, const std::vector<VerifiableQuestion>& questions);

// Answer alphabet implied by a question set: option letters for
// multiple-choice, targets and their variants for exact-string.
std::vector<std::string> alphabet_for_questions(const std::vector<VerifiableQuestion>& questions);

void save_metrics_csv(const std::filesystem::path& file, const std::vector<StepMetrics>& metrics);

// Serves a toy policy through the sampler contract. Prompts are matched back
// to contexts via the questions' evaluation prompts; each draw is emitted as
// a "The answer is: …" completion. Deterministic in (prompt, config.seed).
class ToyPolicySampler final : public Sampler {
  public:
    ToyPolicySampler(ToyPolicy policy, const std::vector<VerifiableQuestion>& questions);
    std::vector<std::string> sample(const std::string& prompt,
                                    const SamplingConfig& config) override;

  private:
    ToyPolicy policy_;
    std::unordered_map<std::string, int> context_by_prompt_;
};

}  // namespace rlvr
