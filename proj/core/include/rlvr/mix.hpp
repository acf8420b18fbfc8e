#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rlvr/question.hpp"
#include "rlvr/rank.hpp"

namespace rlvr {

enum class MixStrategy { macro, micro };

std::string to_string(MixStrategy s);
MixStrategy mix_strategy_from_string(const std::string& s);

struct MixtureSpec {
    MixStrategy strategy = MixStrategy::macro;
    int n_top = 1;
    std::vector<std::string> selected_task_ids;  // ordered, duplicate-free
    // micro only: which tasks each sub-task demanded, in rank order.
    std::vector<std::pair<std::string, std::vector<std::string>>> per_subtask_selection;
};

// Top n_top tasks of the macro (row-mean) ranking.
MixtureSpec macro_mix(const UtilityMatrix& matrix, int n_top);
MixtureSpec macro_mix(const Ranking& macro_ranking, int n_top);

// Per-sub-task top-n_top lists; selected = their deduplicated union, ordered
// by first appearance scanning sub-tasks in order and ranks within each.
MixtureSpec micro_mix(const PerSubtaskRankings& rankings, int n_top);
MixtureSpec micro_mix(const UtilityMatrix& matrix, int n_top);

struct MixtureManifest {
    MixtureSpec spec;
    std::uint64_t seed = 0;
    int target_size = 0;
    int actual_size = 0;
    std::map<std::string, int> per_task_counts;
    std::vector<std::string> shortfall_task_ids;  // pools that ran dry
};

inline constexpr const char* kMixtureManifestSchema = "mixture_manifest/v1";

void save_mixture_manifest(const std::filesystem::path& file, const MixtureManifest& m);
MixtureManifest load_mixture_manifest(const std::filesystem::path& file);

struct MixtureDataset {
    std::vector<VerifiableQuestion> prompts;
    MixtureManifest manifest;
};

// Draws target_size prompts round-robin over the selected tasks: uniform
// per-task quotas with the remainder going to earlier tasks, re-balanced by
// greedy waterfill when a pool is too small (the manifest flags such tasks),
// seeded without-replacement sampling inside each pool. Non-original
// provenance is excluded unless include_interventions is set. An empty pool
// for a selected task is a hard error naming the task.
MixtureDataset materialize(const MixtureSpec& spec,
                           const std::map<std::string, std::vector<VerifiableQuestion>>& pools,
                           int target_size, std::uint64_t seed,
                           bool include_interventions = false);

// Groups questions by source_task_id, preserving input order per task.
std::map<std::string, std::vector<VerifiableQuestion>> pools_by_task(
    const std::vector<VerifiableQuestion>& questions);

}  // namespace rlvr
