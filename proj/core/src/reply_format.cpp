#include "rlvr/reply_format.hpp"

#include <sstream>

namespace rlvr {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

bool starts_with(const std::string& s, const char* tag) { return s.rfind(tag, 0) == 0; }

// Content between the first pair of ``` fence lines, or all lines.
std::vector<std::string> unfence(std::vector<std::string> lines) {
    std::size_t open = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (starts_with(trim(lines[i]), "```")) {
            open = i;
            break;
        }
    }
    if (open == lines.size()) return lines;
    std::size_t close = lines.size();
    for (std::size_t i = open + 1; i < lines.size(); ++i) {
        if (starts_with(trim(lines[i]), "```")) {
            close = i;
            break;
        }
    }
    return {lines.begin() + open + 1, lines.begin() + close};
}

ReplyParseResult fail(const std::string& why) { return {std::nullopt, why}; }

}  // namespace

std::optional<McqOption> parse_option_line(const std::string& line) {
    const std::string t = trim(line);
    if (t.size() < 3 || t[0] != '(' || t[2] != ')') return std::nullopt;
    if (t[1] < 'a' || t[1] > 'z') return std::nullopt;
    return McqOption{std::string(1, t[1]), trim(t.substr(3))};
}

ReplyParseResult parse_fenced_reply(const std::string& text) {
    const auto lines = unfence(split_lines(text));

    std::size_t q_at = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (starts_with(lines[i], "QUESTION:")) {
            q_at = i;
            break;
        }
    }
    if (q_at == lines.size()) return fail("no QUESTION: tag");

    ParsedReply out;
    std::vector<std::string> stem;
    {
        const std::string rest = trim(lines[q_at].substr(9));
        if (!rest.empty()) stem.push_back(rest);
    }
    std::size_t i = q_at + 1;
    for (; i < lines.size(); ++i) {
        if (starts_with(lines[i], "OPTIONS:") || starts_with(lines[i], "TARGET:")) break;
        stem.push_back(lines[i]);
    }
    while (!stem.empty() && trim(stem.back()).empty()) stem.pop_back();
    while (!stem.empty() && trim(stem.front()).empty()) stem.erase(stem.begin());
    if (stem.empty()) return fail("empty question");
    {
        std::ostringstream joined;
        for (std::size_t s = 0; s < stem.size(); ++s) {
            if (s) joined << '\n';
            joined << stem[s];
        }
        out.question = joined.str();
    }

    if (i < lines.size() && starts_with(lines[i], "OPTIONS:")) {
        if (!trim(lines[i].substr(8)).empty()) {
            return fail("OPTIONS: must be followed by one option per line");
        }
        ++i;
        for (; i < lines.size(); ++i) {
            if (starts_with(lines[i], "TARGET:")) break;
            if (trim(lines[i]).empty()) continue;
            auto opt = parse_option_line(lines[i]);
            if (!opt) return fail("bad option line: " + trim(lines[i]));
            out.options.push_back(*opt);
        }
        if (out.options.empty()) return fail("OPTIONS: block has no options");
    }

    if (i == lines.size() || !starts_with(lines[i], "TARGET:")) return fail("no TARGET: tag");
    out.target = trim(lines[i].substr(7));
    if (out.target.empty()) {
        for (++i; i < lines.size(); ++i) {
            if (!trim(lines[i]).empty()) {
                out.target = trim(lines[i]);
                break;
            }
        }
    }
    if (out.target.empty()) return fail("empty target");
    return {out, ""};
}

std::string build_reformat_prompt(const std::string& definition, const std::string& input,
                                  const std::vector<std::string>& gold_outputs) {
    std::ostringstream p;
    p << "Rewrite the task instance below as one self-contained question whose answer can be "
         "checked by exact string match.\n\n";
    p << "Task definition:\n" << definition << "\n\n";
    p << "Instance input:\n" << input << "\n\n";
    p << "Acceptable answers:\n";
    for (const auto& g : gold_outputs) p << "- " << g << "\n";
    p << "\nReply in exactly this layout, with each tag at the start of its line:\n";
    p << "QUESTION:\n<the question text>\n";
    p << "OPTIONS:\n(a) <first choice>\n(b) <second choice>\n";
    p << "TARGET:\n<the correct answer>\n\n";
    p << "If the answers come from a small closed set, list every choice under OPTIONS: and put "
         "the correct choice on the TARGET: line. Otherwise omit the OPTIONS: block entirely and "
         "make TARGET: exactly one of the acceptable answers. Do not add commentary.";
    return p.str();
}

const char* intervention_instruction(InterventionKind kind) {
    switch (kind) {
        case InterventionKind::many_hop:
            return "Rewrite it so reaching the answer requires chaining several intermediate "
                   "deductions instead of one direct step.";
        case InterventionKind::against_prior:
            return "Rewrite it so a plausible-sounding assumption points away from the correct "
                   "answer while the stated facts still determine it.";
        case InterventionKind::learn_on_fly:
            return "Introduce a small invented rule or notation inside the question and restate "
                   "the problem in terms of it.";
        case InterventionKind::long_context:
            return "Pad the question with additional neutral context that does not change the "
                   "answer, so the relevant facts sit inside a longer passage.";
        case InterventionKind::find_errors:
            return "Recast it so the solver must first spot what is wrong or inconsistent in the "
                   "presented material before answering.";
        case InterventionKind::inductive:
            return "Present worked input-output examples of the underlying rule and ask for the "
                   "answer on a new case, so the rule must be induced from the examples.";
        case InterventionKind::constraint_satisfaction:
            return "Restate it as a set of explicit constraints that must all hold at once to "
                   "pin down the answer.";
        case InterventionKind::compositional:
            return "Split it into dependent sub-questions whose partial results must be combined "
                   "to produce the final answer.";
        case InterventionKind::knowledge_intensive:
            return "Weave in related background knowledge so the question reads as "
                   "knowledge-heavy while the stated content still fully determines the answer.";
    }
    return "";
}

std::string build_intervention_prompt(const VerifiableQuestion& q, InterventionKind kind) {
    std::ostringstream p;
    p << "Transform the question below into a new question with the same correct answer. "
      << intervention_instruction(kind) << "\n\n";
    p << "Question:\n" << q.question << "\n\n";
    if (q.answer_format == AnswerFormat::multiple_choice) {
        p << "Correct answer: (" << q.target << ")\n\n";
    } else {
        p << "Correct answer: " << q.target << "\n\n";
    }
    p << "Reply in exactly this layout, with each tag at the start of its line:\n";
    p << "QUESTION:\n<the transformed question";
    if (q.answer_format == AnswerFormat::multiple_choice) {
        p << ", without the answer choices>\n";
        p << "OPTIONS:\n<the original answer choices, one per line, byte-for-byte unchanged>\n";
    } else {
        p << ">\n";
    }
    p << "TARGET:\n<the correct answer, unchanged>\n\n";
    if (q.answer_format == AnswerFormat::multiple_choice) {
        p << "Do not add, remove, reorder, or reword the answer choices. ";
    }
    p << "Do not change what the correct answer is. Do not add commentary.";
    return p.str();
}

}  // namespace rlvr
