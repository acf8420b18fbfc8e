#include "rlvr/question.hpp"

#include <stdexcept>

#include "json.hpp"
#include "rlvr/jsonl.hpp"

namespace rlvr {

std::string to_string(AnswerFormat f) {
    return f == AnswerFormat::multiple_choice ? "multiple_choice" : "exact_string";
}

AnswerFormat answer_format_from_string(const std::string& s) {
    if (s == "multiple_choice") return AnswerFormat::multiple_choice;
    if (s == "exact_string") return AnswerFormat::exact_string;
    throw std::runtime_error("unknown answer_format: " + s);
}

const std::vector<InterventionKind>& all_intervention_kinds() {
    static const std::vector<InterventionKind> kinds = {
        InterventionKind::many_hop,
        InterventionKind::against_prior,
        InterventionKind::learn_on_fly,
        InterventionKind::long_context,
        InterventionKind::find_errors,
        InterventionKind::inductive,
        InterventionKind::constraint_satisfaction,
        InterventionKind::compositional,
        InterventionKind::knowledge_intensive,
    };
    return kinds;
}

std::string to_string(InterventionKind k) {
    switch (k) {
        case InterventionKind::many_hop: return "many_hop";
        case InterventionKind::against_prior: return "against_prior";
        case InterventionKind::learn_on_fly: return "learn_on_fly";
        case InterventionKind::long_context: return "long_context";
        case InterventionKind::find_errors: return "find_errors";
        case InterventionKind::inductive: return "inductive";
        case InterventionKind::constraint_satisfaction: return "constraint_satisfaction";
        case InterventionKind::compositional: return "compositional";
        case InterventionKind::knowledge_intensive: return "knowledge_intensive";
    }
    throw std::runtime_error("invalid InterventionKind");
}

InterventionKind intervention_kind_from_string(const std::string& s) {
    for (auto k : all_intervention_kinds()) {
        if (to_string(k) == s) return k;
    }
    throw std::runtime_error("unknown intervention kind: " + s);
}

std::string to_string(const Provenance& p) {
    return p.is_intervention ? "intervention:" + to_string(p.kind) : "original";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "original") return Provenance::original();
    const std::string prefix = "intervention:";
    if (s.rfind(prefix, 0) == 0) {
        return Provenance::intervention(intervention_kind_from_string(s.substr(prefix.size())));
    }
    throw std::runtime_error("unknown provenance: " + s);
}

std::string render_option_block(const std::vector<McqOption>& options) {
    std::string out;
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (i) out += '\n';
        out += "(" + options[i].letter + ") " + options[i].text;
    }
    return out;
}

void validate_question(const VerifiableQuestion& q) {
    if (q.question_id.empty()) throw std::runtime_error("question_id empty");
    if (q.question.empty()) throw std::runtime_error(q.question_id + ": question text empty");
    if (q.answer_format == AnswerFormat::multiple_choice) {
        if (q.options.empty()) {
            throw std::runtime_error(q.question_id + ": multiple_choice without options");
        }
        bool target_found = false;
        for (std::size_t i = 0; i < q.options.size(); ++i) {
            const auto& opt = q.options[i];
            if (opt.letter.size() != 1 || opt.letter[0] < 'a' || opt.letter[0] > 'z') {
                throw std::runtime_error(q.question_id + ": bad option letter '" + opt.letter + "'");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (q.options[j].letter == opt.letter) {
                    throw std::runtime_error(q.question_id + ": duplicate option letter '" +
                                             opt.letter + "'");
                }
            }
            if (opt.letter == q.target) target_found = true;
        }
        if (!target_found) {
            throw std::runtime_error(q.question_id + ": target '" + q.target +
                                     "' is not a declared option letter");
        }
    } else {
        if (q.target.empty()) throw std::runtime_error(q.question_id + ": empty target");
        if (!q.options.empty()) {
            throw std::runtime_error(q.question_id + ": exact_string question carries options");
        }
    }
}

std::string question_to_json_line(const VerifiableQuestion& q) {
    nlohmann::ordered_json j;
    j["question_id"] = q.question_id;
    j["source_task_id"] = q.source_task_id;
    j["question"] = q.question;
    if (!q.options.empty()) {
        nlohmann::ordered_json opts = nlohmann::ordered_json::array();
        for (const auto& o : q.options) opts.push_back({{"letter", o.letter}, {"text", o.text}});
        j["options"] = std::move(opts);
    }
    j["target"] = q.target;
    if (!q.target_variants.empty()) j["target_variants"] = q.target_variants;
    j["answer_format"] = to_string(q.answer_format);
    j["provenance"] = to_string(q.provenance);
    if (!q.subtask_id.empty()) j["subtask_id"] = q.subtask_id;
    return j.dump();
}

VerifiableQuestion question_from_json_line(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    VerifiableQuestion q;
    q.question_id = j.at("question_id").get<std::string>();
    q.source_task_id = j.value("source_task_id", "");
    q.question = j.at("question").get<std::string>();
    if (j.contains("options")) {
        for (const auto& o : j.at("options")) {
            q.options.push_back({o.at("letter").get<std::string>(), o.at("text").get<std::string>()});
        }
    }
    q.target = j.at("target").get<std::string>();
    if (j.contains("target_variants")) {
        q.target_variants = j.at("target_variants").get<std::vector<std::string>>();
    }
    q.answer_format = answer_format_from_string(j.at("answer_format").get<std::string>());
    q.provenance = provenance_from_string(j.value("provenance", "original"));
    q.subtask_id = j.value("subtask_id", "");
    return q;
}

std::vector<VerifiableQuestion> load_questions(const std::string& path) {
    std::vector<VerifiableQuestion> out;
    for (const auto& line : read_jsonl_lines(path, kQuestionSchema)) {
        out.push_back(question_from_json_line(line));
    }
    return out;
}

void save_questions(const std::string& path, const std::vector<VerifiableQuestion>& questions) {
    std::vector<std::string> lines;
    lines.reserve(questions.size());
    for (const auto& q : questions) lines.push_back(question_to_json_line(q));
    write_jsonl_lines(path, kQuestionSchema, lines);
}

}  // namespace rlvr
