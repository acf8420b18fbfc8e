#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rlvr/inference.hpp"
#include "rlvr/question.hpp"

namespace rlvr {

struct Instance {
    std::string input;
    std::vector<std::string> outputs;  // acceptable gold outputs, nonempty
};

struct Task {
    std::string task_id;
    std::string definition;
    std::vector<Instance> instances;
    std::string category;  // optional skill label, empty when absent
};

struct Corpus {
    std::vector<Task> tasks;
    std::vector<std::string> candidate_ids;  // task_ids that passed screening

    const Task* find_task(const std::string& task_id) const;
};

// Reads every *.json task file under `path` (task_id = filename stem).
// Files carry {"Definition": "…" | ["…"], "Instances": [{"input", "output": [..]}]}
// with an optional "Categories" label. Malformed files and duplicate ids are
// hard errors naming the file.
Corpus ingest_tasks(const std::filesystem::path& path);

inline constexpr const char* kTaskSchema = "tasks/v1";

std::string task_to_json_line(const Task& task);
Task task_from_json_line(const std::string& line);

// Tasks as a line-delimited file (candidate ids are stored separately).
void save_corpus(const std::filesystem::path& file, const Corpus& corpus);
Corpus load_corpus(const std::filesystem::path& file);

void save_candidates(const std::filesystem::path& file, const std::vector<std::string>& task_ids);
std::vector<std::string> load_candidates(const std::filesystem::path& file);

// Prompt sent to the screening endpoint for one task.
std::string build_screening_prompt(const Task& task);

struct ScreenRecord {
    std::string task_id;
    bool suitable = false;
    bool ambiguous = false;  // reply started with neither yes nor no
    std::string reply;
};

inline constexpr const char* kScreenSchema = "screen/v1";
inline constexpr const char* kCandidateSchema = "candidates/v1";

std::string screen_record_to_json_line(const ScreenRecord& r);
ScreenRecord screen_record_from_json_line(const std::string& line);

// True iff the reply, trimmed and lowercased, begins with "yes". A reply
// starting with neither yes nor no is unsuitable and flagged ambiguous.
ScreenRecord screen_task_suitability(const Task& task, Sampler& sampler, std::uint64_t run_seed);

// Screens every task and fills corpus.candidate_ids in task order.
std::vector<ScreenRecord> screen_corpus(Corpus& corpus, Sampler& sampler, std::uint64_t run_seed);

struct DropRecord {
    std::string task_id;
    int instance_index = 0;
    std::string question_id;  // set when the id was assigned before the drop
    std::string reason;
};

inline constexpr const char* kDropSchema = "drops/v1";

std::string drop_record_to_json_line(const DropRecord& r);
DropRecord drop_record_from_json_line(const std::string& line);

struct ReformatResult {
    std::vector<VerifiableQuestion> questions;
    std::vector<DropRecord> drops;
};

// One question per instance; instances whose replies fail the checks are
// dropped with a reason. |questions| + |drops| = |task.instances|.
ReformatResult reformat_task(const Task& task, Sampler& sampler, std::uint64_t run_seed);

// Reformats every candidate task of the corpus in candidate order.
ReformatResult reformat_corpus(const Corpus& corpus, Sampler& sampler, std::uint64_t run_seed);

}  // namespace rlvr
