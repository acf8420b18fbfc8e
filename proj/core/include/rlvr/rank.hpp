#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rlvr/evalkit.hpp"
#include "rlvr/grpo.hpp"
#include "rlvr/inference.hpp"
#include "rlvr/question.hpp"
#include "rlvr/rollout.hpp"

namespace rlvr {

// Task × sub-task utility scores u[k][i], with the macro column as row means.
struct UtilityMatrix {
    std::vector<std::string> task_ids;
    std::vector<std::string> subtask_ids;
    std::vector<std::vector<double>> scores;  // [task][subtask]

    std::vector<double> macro() const;  // arithmetic row means
};

void validate_matrix(const UtilityMatrix& m);

// CSV: header "task_id,<subtask>,…", one row per task.
void save_matrix_csv(const std::filesystem::path& file, const UtilityMatrix& m);
UtilityMatrix load_matrix_csv(const std::filesystem::path& file);

using Ranking = std::vector<std::string>;  // task ids, best first

// Strict descending sort with ties broken by ascending task_id. NaN scores
// are a hard error.
Ranking make_ranking(const std::vector<std::string>& task_ids,
                     const std::vector<double>& scores);

struct PerSubtaskRankings {
    std::vector<std::string> subtask_ids;
    std::vector<Ranking> rankings;  // aligned with subtask_ids
};

PerSubtaskRankings make_per_subtask_rankings(const UtilityMatrix& m);

// CSV with columns subtask_id,rank,task_id (1-based contiguous ranks;
// a trailing task_name column is tolerated and ignored).
PerSubtaskRankings load_ranking_fixture_csv(const std::filesystem::path& file);
void save_rankings_csv(const std::filesystem::path& file, const PerSubtaskRankings& rankings,
                       const Ranking& macro);  // macro rows under "__macro__"

// Loads rankings saved by save_rankings_csv; macro_out receives the
// "__macro__" rows (empty when the file has none, e.g. a rank-only fixture).
PerSubtaskRankings load_rankings_csv(const std::filesystem::path& file, Ranking* macro_out);

// Mean token-set Jaccard overlap between sampled cross pairs of question
// texts. Tokens are lowercased alphanumeric runs; sampling is seeded and
// capped per side.
double utility_lexical(const std::vector<std::string>& task_questions,
                       const std::vector<std::string>& validation_questions,
                       std::uint64_t seed, int sample_cap = 200);

struct SimilarityDiagnostics {
    long pairs_used = 0;
    long pairs_skipped = 0;  // zero-vector embeddings
};

// Mean pairwise cosine similarity (clamped below at 0) between sampled task
// and validation question embeddings. Zero-vector pairs are skipped.
double utility_semantic(const std::vector<std::string>& task_questions,
                        const std::vector<std::string>& validation_questions,
                        Embedder& embedder, std::uint64_t seed, int sample_cap = 200,
                        SimilarityDiagnostics* diagnostics = nullptr);

// Mean win-rate over one task's records (pre-filter population).
double utility_difficulty(const std::vector<WinRateRecord>& records);

// Approach (c) at desk scale: toy-train on the task's questions, then score
// the trained policy per validation sub-task as pass@k from n samples.
// Returns one score per validation sub-task.
std::vector<double> utility_trained_eval(const std::vector<VerifiableQuestion>& task_dataset,
                                         const BenchmarkSplit& validation,
                                         const GrpoConfig& config, int n, int k);

// Pearson correlation; both series need ≥2 points and nonzero variance.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);
// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace rlvr
