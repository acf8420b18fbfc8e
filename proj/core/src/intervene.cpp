#include "rlvr/intervene.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "rlvr/hash.hpp"
#include "rlvr/reply_format.hpp"
#include "rlvr/verify.hpp"

namespace rlvr {

std::string intervention_record_to_json_line(const InterventionRecord& r) {
    nlohmann::ordered_json j;
    j["base_question_id"] = r.base_question_id;
    j["kind"] = to_string(r.kind);
    j["accepted"] = r.accepted;
    j["reason"] = r.reason;
    if (r.transformed) j["transformed_question_id"] = r.transformed->question_id;
    return j.dump();
}

namespace {

// One transformation attempt; the caller owns retries.
TransformOutcome attempt(const VerifiableQuestion& q, InterventionKind kind, Sampler& sampler,
                         std::uint64_t seed) {
    SamplingConfig cfg{0.7, 4096, 1, seed};
    const auto replies = sampler.sample(build_intervention_prompt(q, kind), cfg);
    const auto parsed = parse_fenced_reply(replies.front());
    if (!parsed.reply) return {std::nullopt, "unparseable reply: " + parsed.error};

    if (q.answer_format == AnswerFormat::multiple_choice) {
        if (parsed.reply->options != q.options) return {std::nullopt, "options mutated"};
        const std::string canonical = normalize_answer(parsed.reply->target);
        bool target_ok = canonical == q.target;
        if (!target_ok) {
            for (const auto& opt : q.options) {
                if (opt.letter == q.target && normalize_answer(opt.text) == canonical) {
                    target_ok = true;
                }
            }
        }
        if (!target_ok) return {std::nullopt, "target mutated"};
    } else {
        if (!parsed.reply->options.empty()) return {std::nullopt, "format mutated"};
        const std::string canonical = normalize_answer(parsed.reply->target);
        bool target_ok = canonical == normalize_answer(q.target);
        for (const auto& v : q.target_variants) {
            target_ok = target_ok || canonical == normalize_answer(v);
        }
        if (!target_ok) return {std::nullopt, "target mutated"};
    }

    VerifiableQuestion out = q;
    out.question_id = q.question_id + "+" + to_string(kind);
    out.provenance = Provenance::intervention(kind);
    out.question = parsed.reply->question;
    if (q.answer_format == AnswerFormat::multiple_choice) {
        out.question += "\n" + render_option_block(q.options);
    }
    return {out, ""};
}

}  // namespace

TransformOutcome apply_intervention(const VerifiableQuestion& q, InterventionKind kind,
                                    Sampler& sampler, std::uint64_t run_seed) {
    if (q.provenance.is_intervention) {
        throw std::runtime_error("refusing to transform already-transformed " + q.question_id);
    }
    const std::string tag = "intervene:" + q.question_id + ":" + to_string(kind);
    auto first = attempt(q, kind, sampler, derive_seed(run_seed, tag));
    if (first.question) return first;
    auto second = attempt(q, kind, sampler, derive_seed(run_seed, tag + ":retry"));
    if (second.question) return second;
    return first;  // report the original failure
}

IntervenedDataset build_intervened_dataset(const std::vector<VerifiableQuestion>& base,
                                           InterventionKind kind, Sampler& sampler,
                                           const SamplingConfig& rollout_config,
                                           std::uint64_t run_seed) {
    if (base.empty()) throw std::runtime_error("no base questions");

    IntervenedDataset out;
    std::vector<VerifiableQuestion> transformed;
    for (const auto& q : base) {
        InterventionRecord rec;
        rec.base_question_id = q.question_id;
        rec.kind = kind;
        auto outcome = apply_intervention(q, kind, sampler, run_seed);
        if (outcome.question) {
            rec.transformed = outcome.question;
            transformed.push_back(*outcome.question);
        } else {
            rec.reason = outcome.reason;
        }
        out.records.push_back(std::move(rec));
    }
    if (transformed.empty()) throw std::runtime_error("every transformation was rejected");

    // Win-rates re-measured on the transformed statements, then the same
    // strict 0 < c/n < 1 filter as the base data went through.
    auto measured = measure_win_rates(transformed, sampler, rollout_config);
    out.transformed_win_rates = measured.records;
    auto filtered = filter_by_win_rate(transformed, measured.records);

    std::set<std::string> kept_ids;
    for (const auto& q : filtered.kept) kept_ids.insert(q.question_id);
    std::set<std::string> easy(filtered.too_easy.begin(), filtered.too_easy.end());
    for (auto& rec : out.records) {
        if (!rec.transformed) continue;
        const std::string& id = rec.transformed->question_id;
        if (kept_ids.count(id)) {
            rec.accepted = true;
            rec.reason = "kept";
        } else {
            rec.reason = easy.count(id) ? "too_easy" : "too_hard";
        }
    }
    if (filtered.kept.empty()) {
        throw std::runtime_error("every transformation was filtered out");
    }

    const std::size_t pair_count = std::min(base.size(), filtered.kept.size());
    auto subsample = [&](const std::vector<VerifiableQuestion>& side, const char* label) {
        if (side.size() <= pair_count) return side;
        std::vector<std::size_t> order(side.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::mt19937_64 rng(derive_seed(run_seed, std::string("combine:") + label));
        for (std::size_t i = 0; i < pair_count; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
            std::swap(order[i], order[pick(rng)]);
        }
        order.resize(pair_count);
        std::sort(order.begin(), order.end());  // keep the original relative order
        std::vector<VerifiableQuestion> chosen;
        chosen.reserve(pair_count);
        for (auto i : order) chosen.push_back(side[i]);
        return chosen;
    };
    const auto base_side = subsample(base, "base");
    const auto transformed_side = subsample(filtered.kept, "transformed");
    for (std::size_t i = 0; i < pair_count; ++i) {
        out.combined.push_back(base_side[i]);
        out.combined.push_back(transformed_side[i]);
    }
    return out;
}

}  // namespace rlvr
