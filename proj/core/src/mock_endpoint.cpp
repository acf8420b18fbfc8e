#include "rlvr/mock_endpoint.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

#include "rlvr/hash.hpp"
#include "rlvr/reply_format.hpp"
#include "rlvr/verify.hpp"

namespace rlvr {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Section of `text` between `from` (exclusive) and `to` (or the end).
std::string slice_between(const std::string& text, const std::string& from,
                          const std::string& to) {
    const auto start = text.find(from);
    if (start == std::string::npos) return "";
    const auto begin = start + from.size();
    const auto end = to.empty() ? std::string::npos : text.find(to, begin);
    return trim(text.substr(begin, end == std::string::npos ? end : end - begin));
}

std::uint64_t reply_salt(const std::string& prompt, std::uint64_t seed, int index) {
    return mix64(mix64(seed) ^ fnv1a64(prompt) ^
                 (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(index + 1)));
}

std::string screen_reply(const std::string& prompt) {
    const std::string description =
        slice_between(prompt, "Task Description: ", "\nExample Input: ");
    if (description.find("open-ended") != std::string::npos) {
        return "No, the output is free-form prose.";
    }
    return "Yes.";
}

std::string reformat_reply(const std::string& prompt) {
    const std::string definition = slice_between(prompt, "Task definition:\n", "\n\nInstance input:\n");
    const std::string input = slice_between(prompt, "Instance input:\n", "\n\nAcceptable answers:\n");
    const std::string answers =
        slice_between(prompt, "Acceptable answers:\n", "\n\nReply in exactly");
    std::vector<std::string> golds;
    {
        std::istringstream in(answers);
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.rfind("- ", 0) == 0) golds.push_back(trim(line.substr(2)));
        }
    }
    if (definition.empty() || input.empty() || golds.empty()) {
        throw std::runtime_error("scripted endpoint saw a malformed rewrite request");
    }
    if (input.find("[JUNK]") != std::string::npos) return "I cannot help with that.";

    const std::string stem = definition + "\n" + input;
    std::ostringstream out;
    out << "QUESTION:\n" << stem << "\n";
    if (input.find("[DRIFT]") != std::string::npos) {
        out << "TARGET:\nmismatched-answer-0\n";
        return out.str();
    }
    const std::string choices = slice_between(definition, "Answer with one of: ", ".");
    if (!choices.empty()) {
        std::vector<std::string> texts;
        std::istringstream in(choices);
        std::string piece;
        while (std::getline(in, piece, ',')) texts.push_back(trim(piece));
        out << "OPTIONS:\n";
        std::string gold_letter;
        for (std::size_t i = 0; i < texts.size(); ++i) {
            const std::string letter(1, static_cast<char>('a' + i));
            out << "(" << letter << ") " << texts[i] << "\n";
            if (normalize_answer(texts[i]) == normalize_answer(golds.front())) {
                gold_letter = letter;
            }
        }
        // Alternate between the letter form and the literal answer so both
        // target spellings flow through the pipeline.
        if (!gold_letter.empty() && fnv1a64(input) % 2 == 0) {
            out << "TARGET:\n(" << gold_letter << ")\n";
        } else {
            out << "TARGET:\n" << golds.front() << "\n";
        }
    } else {
        out << "TARGET:\n" << golds.front() << "\n";
    }
    return out.str();
}

std::string rollout_reply(const std::string& prompt, const std::string& question,
                          std::uint64_t salt) {
    if (salt % 7 == 0) return "I ran out of budget before answering.";
    const std::uint64_t pick = mix64(salt ^ 0xabcdefull);

    std::vector<std::string> letters;
    {
        std::istringstream in(question);
        std::string line;
        while (std::getline(in, line)) {
            if (auto opt = parse_option_line(line)) letters.push_back(opt->letter);
        }
    }
    if (!letters.empty()) {
        const std::string& letter = letters[pick % letters.size()];
        return "Considering each option in turn.\nThe answer is: (" + letter + ")";
    }

    const std::string gold = slice_between(question, "[[answer: ", "]]");
    if (!gold.empty()) {
        // Per-question difficulty knob: the question text hashes to how many
        // of 8 reply slots answer correctly, spanning always-wrong (0)
        // through always-right (8).
        const std::uint64_t threshold = mix64(fnv1a64(question)) % 9;
        if (pick % 8 < threshold) {
            return "Working through it.\nThe answer is: " + gold;
        }
        return "Working through it.\nThe answer is: wrong-" + std::to_string(pick % 8);
    }
    return "The answer is: unknown";
}

std::string decorate_stem(const std::string& stem, InterventionKind kind) {
    switch (kind) {
        case InterventionKind::many_hop:
            return "First work out each intermediate fact you need, then combine them.\n" + stem;
        case InterventionKind::against_prior:
            return "Most people answer this one from intuition and get it wrong; trust only "
                   "the stated facts.\n" +
                   stem;
        case InterventionKind::learn_on_fly:
            return "For this problem, call an answer 'stable' exactly when it satisfies the "
                   "description below; report the stable answer.\n" +
                   stem;
        case InterventionKind::long_context:
            return stem +
                   "\nUnrelated background: the archive room keeps ledgers from three decades, "
                   "sorted by year and then by clerk. Visitors sign a register at the desk, and "
                   "the register is rotated every month. None of this changes the question "
                   "above.";
        case InterventionKind::find_errors:
            return "One sentence below may be misleading; identify and discount it before "
                   "answering.\n" +
                   stem;
        case InterventionKind::inductive:
            return "Worked examples: a case like the first maps to its listed outcome; a case "
                   "like the second maps to its listed outcome. Apply the same rule here.\n" +
                   stem;
        case InterventionKind::constraint_satisfaction:
            return "Treat every stated fact as a hard constraint; the answer must satisfy all "
                   "of them at once.\n" +
                   stem;
        case InterventionKind::compositional:
            return "Split the problem into parts, answer each part, then combine the partial "
                   "answers.\n" +
                   stem;
        case InterventionKind::knowledge_intensive:
            return "Recall what you know about this topic before answering; only the stated "
                   "content decides it.\n" +
                   stem;
    }
    return stem;
}

std::string intervention_reply(const std::string& prompt) {
    InterventionKind kind = InterventionKind::many_hop;
    bool found = false;
    for (InterventionKind k : all_intervention_kinds()) {
        if (prompt.find(intervention_instruction(k)) != std::string::npos) {
            kind = k;
            found = true;
            break;
        }
    }
    if (!found) throw std::runtime_error("scripted endpoint saw an unknown rewrite instruction");

    const std::string question = slice_between(prompt, "Question:\n", "\n\nCorrect answer: ");
    const std::string answer = slice_between(prompt, "\nCorrect answer: ", "\n\nReply in exactly");
    if (question.empty() || answer.empty()) {
        throw std::runtime_error("scripted endpoint saw a malformed transform request");
    }

    // The trailing run of option lines is the option block; what precedes is
    // the stem the transformation may touch.
    std::vector<std::string> lines;
    {
        std::istringstream in(question);
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }
    std::size_t options_at = lines.size();
    while (options_at > 0 && parse_option_line(lines[options_at - 1])) --options_at;
    std::ostringstream stem;
    for (std::size_t i = 0; i < options_at; ++i) {
        if (i) stem << '\n';
        stem << lines[i];
    }

    std::ostringstream out;
    if (question.find("[MUTATE]") != std::string::npos) {
        out << "QUESTION:\n" << decorate_stem(trim(stem.str()), kind) << "\n";
        out << "TARGET:\naltered-target\n";
        return out.str();
    }
    out << "QUESTION:\n" << decorate_stem(trim(stem.str()), kind) << "\n";
    if (options_at < lines.size()) {
        out << "OPTIONS:\n";
        for (std::size_t i = options_at; i < lines.size(); ++i) out << lines[i] << "\n";
    }
    out << "TARGET:\n" << answer << "\n";
    return out.str();
}

}  // namespace

std::vector<std::string> ScriptedMockSampler::sample(const std::string& prompt,
                                                     const SamplingConfig& config) {
    validate_sampling_config(config);
    std::vector<std::string> replies;
    replies.reserve(static_cast<std::size_t>(config.num_samples));

    if (prompt.rfind("This is an instruction-following task", 0) == 0) {
        replies.assign(static_cast<std::size_t>(config.num_samples), screen_reply(prompt));
        return replies;
    }
    if (prompt.rfind("Rewrite the task instance below", 0) == 0) {
        replies.assign(static_cast<std::size_t>(config.num_samples), reformat_reply(prompt));
        return replies;
    }
    if (prompt.rfind("Transform the question below", 0) == 0) {
        replies.assign(static_cast<std::size_t>(config.num_samples), intervention_reply(prompt));
        return replies;
    }
    const std::string& instructions = evaluation_prompt();
    if (prompt.rfind(instructions, 0) == 0) {
        std::string question = prompt.substr(instructions.size());
        if (question.rfind("\n\n", 0) == 0) question = question.substr(2);
        for (int i = 0; i < config.num_samples; ++i) {
            replies.push_back(rollout_reply(prompt, question, reply_salt(prompt, config.seed, i)));
        }
        return replies;
    }
    throw std::runtime_error("scripted endpoint cannot handle this prompt");
}

std::vector<double> HashedBagEmbedder::embed(const std::string& text) {
    std::vector<double> v(16, 0.0);
    std::string token;
    auto flush = [&] {
        if (!token.empty()) {
            v[fnv1a64(token) % v.size()] += 1.0;
            token.clear();
        }
    };
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else {
            flush();
        }
    }
    flush();
    return v;
}

std::shared_ptr<Sampler> make_endpoint_sampler(const std::string& url) {
    if (url == "mock://scripted") return std::make_shared<ScriptedMockSampler>();
    if (url.rfind("http://", 0) == 0 || url.rfind("https://", 0) == 0) {
        return std::make_shared<HttpSampler>(url);
    }
    throw std::runtime_error("unsupported sampler endpoint: " + url);
}

std::shared_ptr<Embedder> make_endpoint_embedder(const std::string& url) {
    if (url == "mock://embed") return std::make_shared<HashedBagEmbedder>();
    if (url.rfind("http://", 0) == 0 || url.rfind("https://", 0) == 0) {
        return std::make_shared<HttpEmbedder>(url);
    }
    throw std::runtime_error("unsupported embedder endpoint: " + url);
}

}  // namespace rlvr
