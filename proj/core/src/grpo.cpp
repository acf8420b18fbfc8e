#include "rlvr/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rlvr/hash.hpp"
#include "rlvr/jsonl.hpp"
#include "rlvr/verify.hpp"

namespace rlvr {

ToyPolicy ToyPolicy::uniform(std::vector<std::string> contexts,
                             std::vector<std::string> alphabet) {
    if (contexts.empty()) throw std::runtime_error("policy needs at least one context");
    if (alphabet.empty()) throw std::runtime_error("policy needs a nonempty alphabet");
    ToyPolicy p;
    p.contexts = std::move(contexts);
    p.alphabet = std::move(alphabet);
    p.logits.assign(p.contexts.size(), std::vector<double>(p.alphabet.size(), 0.0));
    return p;
}

int ToyPolicy::context_index(const std::string& context) const {
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        if (contexts[i] == context) return static_cast<int>(i);
    }
    return -1;
}

std::vector<double> ToyPolicy::logprobs(int context) const {
    const auto& row = logits.at(static_cast<std::size_t>(context));
    const double peak = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double v : row) total += std::exp(v - peak);
    const double log_z = peak + std::log(total);
    std::vector<double> out(row.size());
    for (std::size_t a = 0; a < row.size(); ++a) out[a] = row[a] - log_z;
    return out;
}

std::vector<double> ToyPolicy::probs(int context) const {
    auto lp = logprobs(context);
    for (double& v : lp) v = std::exp(v);
    return lp;
}

int ToyPolicy::sample_action(int context, std::mt19937_64& rng) const {
    const auto p = probs(context);
    std::discrete_distribution<int> dist(p.begin(), p.end());
    return dist(rng);
}

void save_policy(const std::filesystem::path& file, const ToyPolicy& policy) {
    nlohmann::ordered_json header;
    header["schema"] = kPolicySchema;
    header["contexts"] = policy.contexts;
    header["alphabet"] = policy.alphabet;
    std::ostringstream out;
    out << header.dump() << '\n';
    for (const auto& row : policy.logits) {
        for (double v : row) out << format_double(v) << '\n';
    }
    write_text_file(file, out.str());
}

ToyPolicy load_policy(const std::filesystem::path& file) {
    std::istringstream in(read_text_file(file));
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty policy file " + file.string());
    const auto header = nlohmann::json::parse(line);
    if (header.value("schema", "") != kPolicySchema) {
        throw std::runtime_error("policy file " + file.string() + " has the wrong schema");
    }
    ToyPolicy p;
    p.contexts = header.at("contexts").get<std::vector<std::string>>();
    p.alphabet = header.at("alphabet").get<std::vector<std::string>>();
    p.logits.assign(p.contexts.size(), std::vector<double>(p.alphabet.size(), 0.0));
    for (auto& row : p.logits) {
        for (double& v : row) {
            if (!std::getline(in, line)) {
                throw std::runtime_error("policy file " + file.string() + " is truncated");
            }
            v = std::stod(line);
        }
    }
    if (std::getline(in, line) && !line.empty()) {
        throw std::runtime_error("policy file " + file.string() + " has trailing data");
    }
    return p;
}

void validate_grpo_config(const GrpoConfig& c) {
    if (c.epsilon <= 0) throw std::runtime_error("epsilon must be positive");
    if (c.group_size < 2) throw std::runtime_error("group_size must be at least 2");
    if (c.steps < 0) throw std::runtime_error("steps must be nonnegative");
    if (c.batch_size < 1) throw std::runtime_error("batch_size must be positive");
}

std::vector<double> advantages(const std::vector<double>& rewards) {
    if (rewards.empty()) throw std::runtime_error("advantages of an empty group");
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= static_cast<double>(rewards.size());
    std::vector<double> out(rewards.size());
    for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = rewards[i] - mean;
    return out;
}

double surrogate_term(double ratio, double advantage, double epsilon) {
    if (!(ratio > 0)) throw std::runtime_error("importance ratio must be positive");
    const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    return std::min(ratio * advantage, clipped * advantage);
}

ObjectiveGradient objective_and_gradient(const ToyPolicy& policy, const ToyPolicy& old,
                                         const std::vector<GroupSample>& groups,
                                         double epsilon) {
    if (policy.contexts != old.contexts || policy.alphabet != old.alphabet) {
        throw std::runtime_error("policy and old snapshot disagree on contexts or alphabet");
    }
    if (groups.empty()) throw std::runtime_error("no groups");

    ObjectiveGradient out;
    out.gradient.assign(policy.logits.size(),
                        std::vector<double>(policy.alphabet.size(), 0.0));
    const double group_weight = 1.0 / static_cast<double>(groups.size());
    long members = 0;
    long clipped_members = 0;

    for (const auto& g : groups) {
        const int ctx = policy.context_index(g.question_id);
        if (ctx < 0) throw std::runtime_error("unknown context " + g.question_id);
        const std::size_t n = g.actions.size();
        if (n == 0 || g.old_logprobs.size() != n || g.advantages.size() != n) {
            throw std::runtime_error("malformed group for " + g.question_id);
        }
        const auto lp = policy.logprobs(ctx);
        const auto p = policy.probs(ctx);
        const double member_weight = group_weight / static_cast<double>(n);
        auto& grad_row = out.gradient[static_cast<std::size_t>(ctx)];

        for (std::size_t i = 0; i < n; ++i) {
            const int a = g.actions[i];
            if (a < 0 || a >= static_cast<int>(policy.alphabet.size())) {
                throw std::runtime_error("action out of range for " + g.question_id);
            }
            const double adv = g.advantages[i];
            const double ratio = std::exp(lp[static_cast<std::size_t>(a)] - g.old_logprobs[i]);
            if (!(ratio > 0)) throw std::runtime_error("importance ratio must be positive");
            const double clipped_ratio = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
            const double unclipped = ratio * adv;
            const double clipped = clipped_ratio * adv;
            out.objective += member_weight * std::min(unclipped, clipped);
            ++members;
            if (ratio < 1.0 - epsilon || ratio > 1.0 + epsilon) ++clipped_members;

            // d/dθ of ρ·a is ρ·a·∇logπ(a); the clipped branch is constant in
            // θ wherever the clamp binds, so only the unclipped branch (which
            // also wins ties) moves the parameters.
            if (unclipped <= clipped) {
                const double coeff = member_weight * unclipped;
                for (std::size_t b = 0; b < grad_row.size(); ++b) {
                    grad_row[b] -= coeff * p[b];
                }
                grad_row[static_cast<std::size_t>(a)] += coeff;
            }
        }
    }
    out.clip_fraction = members ? static_cast<double>(clipped_members) / members : 0.0;
    return out;
}

namespace {

// Reward of answering `answer` on q, routed through the grading contract.
int action_reward(const std::string& answer, const VerifiableQuestion& q) {
    return grade_completion(std::string(kAnswerPrefix) + " " + answer, q).value;
}

void check_finite(const ToyPolicy& policy, int step) {
    for (const auto& row : policy.logits) {
        for (double v : row) {
            if (!std::isfinite(v)) {
                throw std::runtime_error("non-finite parameters at step " +
                                         std::to_string(step));
            }
        }
    }
}

}  // namespace

TrainResult train(const ToyPolicy& init, const std::vector<VerifiableQuestion>& questions,
                  const GrpoConfig& config) {
    validate_grpo_config(config);
    if (questions.empty()) throw std::runtime_error("no questions to train on");
    TrainResult result;
    result.policy = init;
    ToyPolicy& policy = result.policy;

    std::vector<int> context_of(questions.size());
    for (std::size_t i = 0; i < questions.size(); ++i) {
        const int ctx = policy.context_index(questions[i].question_id);
        if (ctx < 0) {
            throw std::runtime_error("policy has no context for " + questions[i].question_id);
        }
        context_of[i] = ctx;
    }

    std::mt19937_64 rng(config.seed);
    for (int step = 0; step < config.steps; ++step) {
        const ToyPolicy old = policy;
        std::vector<GroupSample> groups;
        double reward_sum = 0.0;
        long reward_count = 0;

        for (int j = 0; j < config.batch_size; ++j) {
            const std::size_t qi =
                (static_cast<std::size_t>(step) * config.batch_size + j) % questions.size();
            const VerifiableQuestion& q = questions[qi];
            const int ctx = context_of[qi];
            const auto old_lp = old.logprobs(ctx);

            GroupSample g;
            g.question_id = q.question_id;
            for (int i = 0; i < config.group_size; ++i) {
                const int a = old.sample_action(ctx, rng);
                g.actions.push_back(a);
                g.old_logprobs.push_back(old_lp[static_cast<std::size_t>(a)]);
                const int r = action_reward(old.alphabet[static_cast<std::size_t>(a)], q);
                g.rewards.push_back(r);
                reward_sum += r;
                ++reward_count;
            }
            g.advantages = advantages(g.rewards);
            groups.push_back(std::move(g));
        }

        const auto step_result = objective_and_gradient(policy, old, groups, config.epsilon);
        for (std::size_t c = 0; c < policy.logits.size(); ++c) {
            for (std::size_t a = 0; a < policy.logits[c].size(); ++a) {
                policy.logits[c][a] += config.learning_rate * step_result.gradient[c][a];
            }
        }
        check_finite(policy, step);
        result.metrics.push_back({step, reward_sum / static_cast<double>(reward_count),
                                  step_result.objective, step_result.clip_fraction});
    }
    return result;
}

double expected_reward(const ToyPolicy& policy,
                       const std::vector<VerifiableQuestion>& questions) {
    if (questions.empty()) throw std::runtime_error("no questions");
    double total = 0.0;
    for (const auto& q : questions) {
        const int ctx = policy.context_index(q.question_id);
        if (ctx < 0) throw std::runtime_error("policy has no context for " + q.question_id);
        const auto p = policy.probs(ctx);
        double value = 0.0;
        for (std::size_t a = 0; a < p.size(); ++a) {
            value += p[a] * action_reward(policy.alphabet[a], q);
        }
        total += value;
    }
    return total / static_cast<double>(questions.size());
}

std::vector<std::string> alphabet_for_questions(
    const std::vector<VerifiableQuestion>& questions) {
    std::vector<std::string> alphabet;
    std::set<std::string> seen;
    auto add = [&](const std::string& s) {
        if (seen.insert(s).second) alphabet.push_back(s);
    };
    for (const auto& q : questions) {
        if (q.answer_format == AnswerFormat::multiple_choice) {
            for (const auto& opt : q.options) add("(" + opt.letter + ")");
        } else {
            add(q.target);
            for (const auto& v : q.target_variants) add(v);
        }
    }
    if (alphabet.empty()) throw std::runtime_error("questions imply an empty alphabet");
    return alphabet;
}

void save_metrics_csv(const std::filesystem::path& file,
                      const std::vector<StepMetrics>& metrics) {
    std::ostringstream out;
    out << "step,mean_reward,objective,clip_fraction\n";
    for (const auto& m : metrics) {
        out << m.step << ',' << format_double(m.mean_reward) << ','
            << format_double(m.objective) << ',' << format_double(m.clip_fraction) << '\n';
    }
    write_text_file(file, out.str());
}

ToyPolicySampler::ToyPolicySampler(ToyPolicy policy,
                                   const std::vector<VerifiableQuestion>& questions)
    : policy_(std::move(policy)) {
    for (const auto& q : questions) {
        const int ctx = policy_.context_index(q.question_id);
        if (ctx < 0) throw std::runtime_error("policy has no context for " + q.question_id);
        context_by_prompt_.emplace(build_eval_prompt(q.question), ctx);
    }
}

std::vector<std::string> ToyPolicySampler::sample(const std::string& prompt,
                                                  const SamplingConfig& config) {
    validate_sampling_config(config);
    auto it = context_by_prompt_.find(prompt);
    if (it == context_by_prompt_.end()) {
        throw std::runtime_error("toy policy saw a prompt outside its question set");
    }
    std::mt19937_64 rng(mix64(config.seed ^ fnv1a64(prompt)));
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(config.num_samples));
    for (int i = 0; i < config.num_samples; ++i) {
        const int a = policy_.sample_action(it->second, rng);
        out.push_back(std::string(kAnswerPrefix) + " " +
                      policy_.alphabet[static_cast<std::size_t>(a)]);
    }
    return out;
}

}  // namespace rlvr
