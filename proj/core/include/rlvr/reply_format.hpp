#pragma once

// Line-oriented contract for model replies that carry a rewritten question:
//
//   QUESTION:
//   <stem, one or more lines>
//   OPTIONS:            (omitted for exact-string questions)
//   (a) first option
//   (b) second option
//   TARGET:
//   <single line>
//
// The block may be wrapped in a ``` fence; tags must start their line.

#include <optional>
#include <string>
#include <vector>

#include "rlvr/question.hpp"

namespace rlvr {

struct ParsedReply {
    std::string question;           // stem only, option block not included
    std::vector<McqOption> options; // empty for exact-string replies
    std::string target;             // single line, untrimmed beyond edges
};

// Returns nullopt with a reason when the reply does not follow the layout.
struct ReplyParseResult {
    std::optional<ParsedReply> reply;
    std::string error;  // set iff !reply
};

ReplyParseResult parse_fenced_reply(const std::string& text);

// "(a) some text" -> {"a", "some text"}; nullopt if the line is not an option.
std::optional<McqOption> parse_option_line(const std::string& line);

// Prompt sent to the reformatting endpoint for one instance.
std::string build_reformat_prompt(const std::string& definition, const std::string& input,
                                  const std::vector<std::string>& gold_outputs);

// The per-kind rewrite instruction embedded in the intervention prompt.
const char* intervention_instruction(InterventionKind kind);

// Prompt sent to the intervention endpoint for one question.
std::string build_intervention_prompt(const VerifiableQuestion& q, InterventionKind kind);

}  // namespace rlvr
