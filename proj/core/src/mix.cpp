#include "rlvr/mix.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "rlvr/hash.hpp"
#include "rlvr/jsonl.hpp"

namespace rlvr {

std::string to_string(MixStrategy s) { return s == MixStrategy::macro ? "macro" : "micro"; }

MixStrategy mix_strategy_from_string(const std::string& s) {
    if (s == "macro") return MixStrategy::macro;
    if (s == "micro") return MixStrategy::micro;
    throw std::runtime_error("mix strategy must be 'macro' or 'micro', got '" + s + "'");
}

MixtureSpec macro_mix(const Ranking& macro_ranking, int n_top) {
    if (n_top < 1) throw std::runtime_error("n_top must be positive");
    if (n_top > static_cast<int>(macro_ranking.size())) {
        throw std::runtime_error("n_top exceeds the number of ranked tasks");
    }
    MixtureSpec spec;
    spec.strategy = MixStrategy::macro;
    spec.n_top = n_top;
    spec.selected_task_ids.assign(macro_ranking.begin(), macro_ranking.begin() + n_top);
    return spec;
}

MixtureSpec macro_mix(const UtilityMatrix& matrix, int n_top) {
    return macro_mix(make_ranking(matrix.task_ids, matrix.macro()), n_top);
}

MixtureSpec micro_mix(const PerSubtaskRankings& rankings, int n_top) {
    if (n_top < 1) throw std::runtime_error("n_top must be positive");
    MixtureSpec spec;
    spec.strategy = MixStrategy::micro;
    spec.n_top = n_top;
    std::set<std::string> seen;
    for (std::size_t s = 0; s < rankings.subtask_ids.size(); ++s) {
        const auto& ranking = rankings.rankings[s];
        if (static_cast<int>(ranking.size()) < n_top) {
            throw std::runtime_error("sub-task " + rankings.subtask_ids[s] + " ranks only " +
                                     std::to_string(ranking.size()) + " tasks, need " +
                                     std::to_string(n_top));
        }
        std::vector<std::string> top(ranking.begin(), ranking.begin() + n_top);
        for (const auto& id : top) {
            if (seen.insert(id).second) spec.selected_task_ids.push_back(id);
        }
        spec.per_subtask_selection.emplace_back(rankings.subtask_ids[s], std::move(top));
    }
    return spec;
}

MixtureSpec micro_mix(const UtilityMatrix& matrix, int n_top) {
    return micro_mix(make_per_subtask_rankings(matrix), n_top);
}

void save_mixture_manifest(const std::filesystem::path& file, const MixtureManifest& m) {
    nlohmann::ordered_json j;
    j["schema"] = kMixtureManifestSchema;
    j["strategy"] = to_string(m.spec.strategy);
    j["n_top"] = m.spec.n_top;
    j["selected_task_ids"] = m.spec.selected_task_ids;
    if (!m.spec.per_subtask_selection.empty()) {
        nlohmann::ordered_json sel = nlohmann::ordered_json::array();
        for (const auto& [subtask, tasks] : m.spec.per_subtask_selection) {
            sel.push_back({{"subtask_id", subtask}, {"task_ids", tasks}});
        }
        j["per_subtask_selection"] = std::move(sel);
    }
    j["seed"] = m.seed;
    j["target_size"] = m.target_size;
    j["actual_size"] = m.actual_size;
    j["per_task_counts"] = m.per_task_counts;
    j["shortfall_task_ids"] = m.shortfall_task_ids;
    write_text_file(file, j.dump(2) + "\n");
}

MixtureManifest load_mixture_manifest(const std::filesystem::path& file) {
    const auto j = nlohmann::json::parse(read_text_file(file));
    if (j.value("schema", "") != kMixtureManifestSchema) {
        throw std::runtime_error("mixture manifest " + file.string() + " has the wrong schema");
    }
    MixtureManifest m;
    m.spec.strategy = mix_strategy_from_string(j.at("strategy").get<std::string>());
    m.spec.n_top = j.at("n_top").get<int>();
    m.spec.selected_task_ids = j.at("selected_task_ids").get<std::vector<std::string>>();
    if (j.contains("per_subtask_selection")) {
        for (const auto& row : j["per_subtask_selection"]) {
            m.spec.per_subtask_selection.emplace_back(
                row.at("subtask_id").get<std::string>(),
                row.at("task_ids").get<std::vector<std::string>>());
        }
    }
    m.seed = j.at("seed").get<std::uint64_t>();
    m.target_size = j.at("target_size").get<int>();
    m.actual_size = j.at("actual_size").get<int>();
    m.per_task_counts = j.at("per_task_counts").get<std::map<std::string, int>>();
    m.shortfall_task_ids = j.at("shortfall_task_ids").get<std::vector<std::string>>();
    return m;
}

std::map<std::string, std::vector<VerifiableQuestion>> pools_by_task(
    const std::vector<VerifiableQuestion>& questions) {
    std::map<std::string, std::vector<VerifiableQuestion>> pools;
    for (const auto& q : questions) pools[q.source_task_id].push_back(q);
    return pools;
}

namespace {

// Uniform quotas over the unpinned tasks, remainder to earlier ones; any task
// whose pool can't meet its quota gets pinned at the pool size and the rest
// is re-split. Terminates because each pass pins at least one task.
std::vector<int> waterfill_quotas(const std::vector<int>& pool_sizes, int target,
                                  std::vector<bool>* pinned_out) {
    const std::size_t n = pool_sizes.size();
    std::vector<int> quota(n, 0);
    std::vector<bool> pinned(n, false);
    int remaining = target;
    while (true) {
        std::vector<std::size_t> open;
        for (std::size_t i = 0; i < n; ++i) {
            if (!pinned[i]) open.push_back(i);
        }
        if (open.empty() || remaining <= 0) break;
        const int base = remaining / static_cast<int>(open.size());
        const int extra = remaining % static_cast<int>(open.size());
        bool changed = false;
        for (std::size_t rank = 0; rank < open.size(); ++rank) {
            const std::size_t i = open[rank];
            const int want = base + (static_cast<int>(rank) < extra ? 1 : 0);
            if (pool_sizes[i] < want) {
                quota[i] = pool_sizes[i];
                pinned[i] = true;
                remaining -= pool_sizes[i];
                changed = true;
            }
        }
        if (!changed) {
            for (std::size_t rank = 0; rank < open.size(); ++rank) {
                const std::size_t i = open[rank];
                quota[i] = base + (static_cast<int>(rank) < extra ? 1 : 0);
            }
            remaining = 0;
            break;
        }
    }
    if (pinned_out) *pinned_out = pinned;
    return quota;
}

}  // namespace

MixtureDataset materialize(const MixtureSpec& spec,
                           const std::map<std::string, std::vector<VerifiableQuestion>>& pools,
                           int target_size, std::uint64_t seed, bool include_interventions) {
    if (target_size < 1) throw std::runtime_error("target_size must be positive");
    if (spec.selected_task_ids.empty()) throw std::runtime_error("mixture selects no tasks");

    std::vector<std::vector<VerifiableQuestion>> usable;
    for (const auto& task_id : spec.selected_task_ids) {
        auto it = pools.find(task_id);
        std::vector<VerifiableQuestion> pool;
        if (it != pools.end()) {
            for (const auto& q : it->second) {
                if (include_interventions || !q.provenance.is_intervention) pool.push_back(q);
            }
        }
        if (pool.empty()) {
            throw std::runtime_error("selected task " + task_id + " has an empty pool");
        }
        usable.push_back(std::move(pool));
    }

    std::vector<int> sizes;
    sizes.reserve(usable.size());
    for (const auto& p : usable) sizes.push_back(static_cast<int>(p.size()));
    std::vector<bool> pinned;
    const auto quotas = waterfill_quotas(sizes, target_size, &pinned);

    MixtureDataset out;
    out.manifest.spec = spec;
    out.manifest.seed = seed;
    out.manifest.target_size = target_size;

    std::vector<std::vector<VerifiableQuestion>> draws(usable.size());
    for (std::size_t t = 0; t < usable.size(); ++t) {
        auto& pool = usable[t];
        std::mt19937_64 rng(derive_seed(seed, spec.selected_task_ids[t]));
        const int take = quotas[t];
        for (int i = 0; i < take; ++i) {
            std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i),
                                                            pool.size() - 1);
            std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
        }
        draws[t].assign(pool.begin(), pool.begin() + take);
        out.manifest.per_task_counts[spec.selected_task_ids[t]] = take;
        if (pinned[t]) out.manifest.shortfall_task_ids.push_back(spec.selected_task_ids[t]);
    }

    const int max_quota = *std::max_element(quotas.begin(), quotas.end());
    for (int round = 0; round < max_quota; ++round) {
        for (std::size_t t = 0; t < draws.size(); ++t) {
            if (round < static_cast<int>(draws[t].size())) {
                out.prompts.push_back(draws[t][static_cast<std::size_t>(round)]);
            }
        }
    }
    out.manifest.actual_size = static_cast<int>(out.prompts.size());

    std::set<std::string> ids;
    for (const auto& q : out.prompts) {
        if (!ids.insert(q.question_id).second) {
            throw std::runtime_error("duplicate question_id in mixture: " + q.question_id);
        }
    }
    return out;
}

}  // namespace rlvr
