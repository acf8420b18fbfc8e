#include "rlvr/verify.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace rlvr {

const std::string& evaluation_prompt() {
    static const std::string prompt =
        "Think step by step, and when you are ready to provide the final answer, use the "
        "prefix \"The answer is:\" followed by the answer directly, with no formatting and "
        "no markup. For instance: \"The answer is: 42\", or \"The answer is: yes\", or "
        "\"The answer is: (a)\" For multi-choice questions, provide the letter, e.g. "
        "\"The answer is: (a)\"";
    return prompt;
}

std::string build_eval_prompt(const std::string& question_text) {
    return evaluation_prompt() + "\n\n" + question_text;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// True iff the string is fully wrapped by one matched paren pair, i.e. the
// opening paren closes only at the last character.
bool fully_parenthesized(const std::string& s) {
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') return false;
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')') {
            --depth;
            if (depth == 0) return i + 1 == s.size();
            if (depth < 0) return false;
        }
    }
    return false;
}

std::string strip_wrappers(std::string s) {
    for (;;) {
        std::string before = s;
        s = trim(s);
        if (s.size() >= 2 && s.front() == s.back() && (s.front() == '"' || s.front() == '\'')) {
            s = s.substr(1, s.size() - 2);
        }
        if (fully_parenthesized(s)) {
            s = s.substr(1, s.size() - 2);
        }
        while (!s.empty() && s.back() == '.') s.pop_back();
        if (s == before) return s;
    }
}

}  // namespace

std::string normalize_answer(const std::string& s) {
    std::string t = strip_wrappers(s);
    std::string out;
    out.reserve(t.size());
    bool in_space = false;
    for (char c : t) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out += ' ';
        in_space = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

namespace {

// Case-insensitive search for the last occurrence of `needle` in `hay`.
std::size_t rfind_ci(const std::string& hay, const std::string& needle) {
    if (needle.empty() || hay.size() < needle.size()) return std::string::npos;
    auto lower = [](char c) { return std::tolower(static_cast<unsigned char>(c)); };
    for (std::size_t start = hay.size() - needle.size() + 1; start-- > 0;) {
        bool match = true;
        for (std::size_t j = 0; j < needle.size(); ++j) {
            if (lower(hay[start + j]) != lower(needle[j])) {
                match = false;
                break;
            }
        }
        if (match) return start;
    }
    return std::string::npos;
}

}  // namespace

ExtractedAnswer extract_answer(const std::string& completion) {
    ExtractedAnswer out;
    const std::string prefix = kAnswerPrefix;
    const std::size_t pos = rfind_ci(completion, prefix);
    if (pos == std::string::npos) {
        out.kind = AnswerKind::missing;
        return out;
    }
    std::size_t tail_begin = pos + prefix.size();
    std::size_t line_end = completion.find('\n', tail_begin);
    if (line_end == std::string::npos) line_end = completion.size();
    out.raw_tail = completion.substr(tail_begin, line_end - tail_begin);
    out.canonical = normalize_answer(out.raw_tail);
    const bool single_letter = out.canonical.size() == 1 && out.canonical[0] >= 'a' &&
                               out.canonical[0] <= 'z';
    out.kind = single_letter ? AnswerKind::letter : AnswerKind::literal;
    return out;
}

Reward grade(const ExtractedAnswer& answer, const VerifiableQuestion& question) {
    validate_question(question);
    if (answer.kind == AnswerKind::missing) return {0};
    if (question.answer_format == AnswerFormat::multiple_choice) {
        if (answer.kind == AnswerKind::letter) {
            return {answer.canonical == question.target ? 1 : 0};
        }
        // Option-text fallback: models often emit the option text instead of
        // its letter; accept it when it names the target option.
        for (const auto& opt : question.options) {
            if (opt.letter == question.target) {
                return {answer.canonical == normalize_answer(opt.text) ? 1 : 0};
            }
        }
        return {0};
    }
    if (answer.canonical == normalize_answer(question.target)) return {1};
    for (const auto& variant : question.target_variants) {
        if (answer.canonical == normalize_answer(variant)) return {1};
    }
    return {0};
}

Reward grade_completion(const std::string& completion, const VerifiableQuestion& question) {
    return grade(extract_answer(completion), question);
}

bool question_admits_correct_answer(const VerifiableQuestion& q) {
    std::string stated = q.answer_format == AnswerFormat::multiple_choice
                             ? "(" + q.target + ")"
                             : q.target;
    const std::string completion = std::string(kAnswerPrefix) + " " + stated;
    return grade_completion(completion, q).value == 1;
}

void check_dataset_verifiable(const std::vector<VerifiableQuestion>& questions) {
    for (const auto& q : questions) {
        validate_question(q);
        if (!question_admits_correct_answer(q)) {
            throw std::runtime_error(q.question_id + ": no completion can reach reward 1");
        }
    }
}

}  // namespace rlvr
