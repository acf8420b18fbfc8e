#include "rlvr/rollout.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "rlvr/hash.hpp"
#include "rlvr/jsonl.hpp"
#include "rlvr/verify.hpp"

namespace rlvr {

std::string rollout_record_to_json_line(const RolloutRecord& r) {
    nlohmann::ordered_json j;
    j["question_id"] = r.question_id;
    j["completions"] = r.completions;
    j["rewards"] = r.rewards;
    return j.dump();
}

RolloutRecord rollout_record_from_json_line(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    return {j.at("question_id").get<std::string>(),
            j.at("completions").get<std::vector<std::string>>(),
            j.at("rewards").get<std::vector<int>>()};
}

std::string win_rate_record_to_json_line(const WinRateRecord& r) {
    nlohmann::ordered_json j;
    j["question_id"] = r.question_id;
    j["successes"] = r.successes;
    j["total"] = r.total;
    return j.dump();
}

WinRateRecord win_rate_record_from_json_line(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    WinRateRecord r{j.at("question_id").get<std::string>(), j.at("successes").get<int>(),
                    j.at("total").get<int>()};
    if (r.total < 1 || r.successes < 0 || r.successes > r.total) {
        throw std::runtime_error("bad win-rate record for " + r.question_id);
    }
    return r;
}

std::vector<WinRateRecord> load_win_rates(const std::filesystem::path& file) {
    std::vector<WinRateRecord> out;
    for (const auto& line : read_jsonl_lines(file, kWinRateSchema)) {
        out.push_back(win_rate_record_from_json_line(line));
    }
    return out;
}

void save_win_rates(const std::filesystem::path& file,
                    const std::vector<WinRateRecord>& records) {
    std::vector<std::string> lines;
    lines.reserve(records.size());
    for (const auto& r : records) lines.push_back(win_rate_record_to_json_line(r));
    write_jsonl_lines(file, kWinRateSchema, lines);
}

std::vector<RolloutRecord> load_rollouts(const std::filesystem::path& file) {
    std::vector<RolloutRecord> out;
    for (const auto& line : read_jsonl_lines(file, kRolloutSchema)) {
        out.push_back(rollout_record_from_json_line(line));
    }
    return out;
}

void save_rollouts(const std::filesystem::path& file,
                   const std::vector<RolloutRecord>& records) {
    std::vector<std::string> lines;
    lines.reserve(records.size());
    for (const auto& r : records) lines.push_back(rollout_record_to_json_line(r));
    write_jsonl_lines(file, kRolloutSchema, lines);
}

RolloutRecord rollout_question(const VerifiableQuestion& q, Sampler& sampler,
                               const SamplingConfig& config) {
    SamplingConfig per_question = config;
    per_question.seed = derive_seed(config.seed, q.question_id);
    RolloutRecord rec;
    rec.question_id = q.question_id;
    try {
        rec.completions = sampler.sample(build_eval_prompt(q.question), per_question);
    } catch (const std::exception& e) {
        throw std::runtime_error("sampling failed for " + q.question_id + ": " + e.what());
    }
    rec.rewards.reserve(rec.completions.size());
    for (const auto& completion : rec.completions) {
        rec.rewards.push_back(grade_completion(completion, q).value);
    }
    return rec;
}

WinRateResult measure_win_rates(const std::vector<VerifiableQuestion>& questions,
                                Sampler& sampler, const SamplingConfig& config) {
    validate_sampling_config(config);
    std::set<std::string> ids;
    for (const auto& q : questions) {
        if (!ids.insert(q.question_id).second) {
            throw std::runtime_error("duplicate question_id " + q.question_id);
        }
    }
    std::vector<const VerifiableQuestion*> ordered;
    ordered.reserve(questions.size());
    for (const auto& q : questions) ordered.push_back(&q);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto* a, const auto* b) { return a->question_id < b->question_id; });

    WinRateResult result;
    for (const auto* q : ordered) {
        RolloutRecord rec = rollout_question(*q, sampler, config);
        WinRateRecord wr{rec.question_id, 0, static_cast<int>(rec.rewards.size())};
        for (int r : rec.rewards) wr.successes += r;
        result.records.push_back(wr);
        result.rollouts.push_back(std::move(rec));
    }
    return result;
}

FilterResult filter_by_win_rate(const std::vector<VerifiableQuestion>& questions,
                                const std::vector<WinRateRecord>& records) {
    std::map<std::string, const WinRateRecord*> by_id;
    for (const auto& r : records) by_id[r.question_id] = &r;

    FilterResult result;
    for (const auto& q : questions) {
        auto it = by_id.find(q.question_id);
        if (it == by_id.end()) {
            throw std::runtime_error("no win-rate record for " + q.question_id);
        }
        const WinRateRecord& r = *it->second;
        if (r.successes == 0) {
            result.too_hard.push_back(q.question_id);
        } else if (r.successes == r.total) {
            result.too_easy.push_back(q.question_id);
        } else {
            result.kept.push_back(q);
        }
    }
    return result;
}

}  // namespace rlvr
