#pragma once

#include <string>
#include <vector>

#include "rlvr/question.hpp"

namespace rlvr {

// Answer-line prefix the evaluation prompt asks models to emit.
inline constexpr const char* kAnswerPrefix = "The answer is:";

// Instruction block prepended to every rollout/evaluation prompt.
const std::string& evaluation_prompt();

// evaluation instructions + blank line + question text.
std::string build_eval_prompt(const std::string& question_text);

enum class AnswerKind { letter, literal, missing };

struct ExtractedAnswer {
    std::string raw_tail;   // remainder of the prefix line, untouched
    std::string canonical;  // normalized answer
    AnswerKind kind = AnswerKind::missing;
};

// Canonical answer normalization: trim, strip matched surrounding quotes and
// parentheses and trailing periods to a fixpoint, lowercase, collapse inner
// whitespace. Idempotent.
std::string normalize_answer(const std::string& s);

// Scans for the LAST case-insensitive occurrence of kAnswerPrefix and takes
// the rest of that line. No prefix => kind missing.
ExtractedAnswer extract_answer(const std::string& completion);

struct Reward {
    int value = 0;  // in {0, 1}
};

Reward grade(const ExtractedAnswer& answer, const VerifiableQuestion& question);

// Convenience: extract + grade.
Reward grade_completion(const std::string& completion, const VerifiableQuestion& question);

// A completion that states the target itself must grade to 1. Used as a
// mechanical check on every emitted dataset.
bool question_admits_correct_answer(const VerifiableQuestion& q);

// Throws naming the first offending question_id.
void check_dataset_verifiable(const std::vector<VerifiableQuestion>& questions);

}  // namespace rlvr
