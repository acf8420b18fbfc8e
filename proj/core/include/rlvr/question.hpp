#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rlvr {

enum class AnswerFormat { multiple_choice, exact_string };

std::string to_string(AnswerFormat f);
AnswerFormat answer_format_from_string(const std::string& s);

// The nine target-preserving question transformations.
enum class InterventionKind {
    many_hop,
    against_prior,
    learn_on_fly,
    long_context,
    find_errors,
    inductive,
    constraint_satisfaction,
    compositional,
    knowledge_intensive,
};

inline constexpr int kInterventionKindCount = 9;
const std::vector<InterventionKind>& all_intervention_kinds();
std::string to_string(InterventionKind k);
InterventionKind intervention_kind_from_string(const std::string& s);

// original | intervention:<kind>
struct Provenance {
    bool is_intervention = false;
    InterventionKind kind = InterventionKind::many_hop;  // valid iff is_intervention

    static Provenance original() { return {}; }
    static Provenance intervention(InterventionKind k) { return {true, k}; }
    bool operator==(const Provenance&) const = default;
};

std::string to_string(const Provenance& p);
Provenance provenance_from_string(const std::string& s);

struct McqOption {
    std::string letter;  // single lowercase letter: "a", "b", ...
    std::string text;
    bool operator==(const McqOption&) const = default;
};

// One verifiable RLVR item: a question with a machine-checkable target.
// For multiple_choice, target is an option letter and options is nonempty;
// for exact_string, target is the gold answer and target_variants holds any
// alternate gold outputs that also count as correct.
struct VerifiableQuestion {
    std::string question_id;
    std::string source_task_id;
    std::string question;  // full text, options rendered inline for MCQ
    std::vector<McqOption> options;
    std::string target;
    std::vector<std::string> target_variants;
    AnswerFormat answer_format = AnswerFormat::exact_string;
    Provenance provenance;
    std::string subtask_id;  // set for benchmark-split questions, else empty

    bool operator==(const VerifiableQuestion&) const = default;
};

// "(a) yes\n(b) no"
std::string render_option_block(const std::vector<McqOption>& options);

// Enforces the type invariants (letters well-formed, MCQ target among the
// declared letters, nonempty id). Throws on violation.
void validate_question(const VerifiableQuestion& q);

std::string question_to_json_line(const VerifiableQuestion& q);
VerifiableQuestion question_from_json_line(const std::string& line);

inline constexpr const char* kQuestionSchema = "questions/v1";
std::vector<VerifiableQuestion> load_questions(const std::string& path);
void save_questions(const std::string& path, const std::vector<VerifiableQuestion>& questions);

}  // namespace rlvr
