#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "rlvr/corpus.hpp"
#include "rlvr/hash.hpp"
#include "rlvr/intervene.hpp"
#include "rlvr/mock_endpoint.hpp"
#include "rlvr/reply_format.hpp"
#include "rlvr/verify.hpp"
#include "test_support.hpp"

using rlvr::ScriptedMockSampler;
using rlvr::SamplingConfig;

namespace {

SamplingConfig cfg_n(int n, std::uint64_t seed = 3) {
    SamplingConfig cfg;
    cfg.num_samples = n;
    cfg.seed = seed;
    return cfg;
}

rlvr::Task demo_task(const std::string& definition) {
    rlvr::Task t;
    t.task_id = "task001";
    t.definition = definition;
    t.instances = {{"Example question text.", {"gold"}}};
    return t;
}

}  // namespace

TEST_CASE("screening replies split on free-form task descriptions") {
    ScriptedMockSampler mock;
    const auto yes =
        mock.sample(rlvr::build_screening_prompt(demo_task("Reply with the codeword.")),
                    cfg_n(1));
    CHECK(yes == std::vector<std::string>{"Yes."});

    const auto no = mock.sample(
        rlvr::build_screening_prompt(demo_task("Write an open-ended reflection on the prompt.")),
        cfg_n(2));
    REQUIRE(no.size() == 2);
    CHECK(no[0] == "No, the output is free-form prose.");
    CHECK(no[1] == no[0]);
}

TEST_CASE("rewrite replies follow the tagged layout for exact-answer tasks") {
    ScriptedMockSampler mock;
    const std::string prompt = rlvr::build_reformat_prompt(
        "Read the archive note and reply with the codeword.",
        "Note 3: the clerk filed the amber parcel. [[answer: amber-3]]", {"amber-3"});
    const auto replies = mock.sample(prompt, cfg_n(1));
    REQUIRE(replies.size() == 1);

    const auto parsed = rlvr::parse_fenced_reply(replies[0]);
    REQUIRE(parsed.reply.has_value());
    CHECK(parsed.reply->options.empty());
    CHECK(parsed.reply->target == "amber-3");
    CHECK(parsed.reply->question.find("Read the archive note") != std::string::npos);
    CHECK(parsed.reply->question.find("Note 3:") != std::string::npos);
}

TEST_CASE("rewrite replies build an option block from an enumerated choice list") {
    ScriptedMockSampler mock;
    const std::string definition =
        "Decide which color the rule selects. Answer with one of: red, green, blue.";
    auto reply_for = [&](const std::string& input) {
        const auto out =
            mock.sample(rlvr::build_reformat_prompt(definition, input, {"green"}), cfg_n(1));
        const auto parsed = rlvr::parse_fenced_reply(out.at(0));
        REQUIRE(parsed.reply.has_value());
        return *parsed.reply;
    };

    const std::string input_a = "Round 1: pick the middle listed color.";
    const auto parsed_a = reply_for(input_a);
    REQUIRE(parsed_a.options.size() == 3);
    CHECK(parsed_a.options[0] == rlvr::McqOption{"a", "red"});
    CHECK(parsed_a.options[1] == rlvr::McqOption{"b", "green"});
    CHECK(parsed_a.options[2] == rlvr::McqOption{"c", "blue"});
    // The target alternates between the letter and the literal answer,
    // keyed off the instance input's hash parity.
    if (rlvr::fnv1a64(input_a) % 2 == 0) {
        CHECK(parsed_a.target == "(b)");
    } else {
        CHECK(parsed_a.target == "green");
    }

    // Sweep inputs until both spellings have appeared.
    bool saw_letter = false, saw_literal = false;
    for (int i = 0; i < 8 && !(saw_letter && saw_literal); ++i) {
        const auto t = reply_for("Round " + std::to_string(i) + ": pick the middle color.").target;
        saw_letter = saw_letter || t == "(b)";
        saw_literal = saw_literal || t == "green";
    }
    CHECK(saw_letter);
    CHECK(saw_literal);
}

TEST_CASE("marked instances trigger the scripted failure modes") {
    ScriptedMockSampler mock;
    const auto junk = mock.sample(
        rlvr::build_reformat_prompt("Say the word.", "Round 1: noise. [JUNK]", {"w"}), cfg_n(1));
    CHECK(junk.at(0) == "I cannot help with that.");

    const auto drift = mock.sample(
        rlvr::build_reformat_prompt("Say the word.", "Round 1: shifted. [DRIFT]", {"w"}),
        cfg_n(1));
    const auto parsed = rlvr::parse_fenced_reply(drift.at(0));
    REQUIRE(parsed.reply.has_value());
    CHECK(parsed.reply->target == "mismatched-answer-0");

    CHECK_THROWS_WITH_AS(mock.sample(rlvr::build_reformat_prompt("", "", {}), cfg_n(1)),
                         doctest::Contains("malformed rewrite request"), std::runtime_error);
}

TEST_CASE("rollout replies are deterministic and sweep the option letters") {
    ScriptedMockSampler mock;
    const auto mcq = testfx::make_mcq("t#0", "Pick one.", {"w0", "w1", "w2", "w3"}, 2);
    const std::string prompt = rlvr::build_eval_prompt(mcq.question);

    const auto a = mock.sample(prompt, cfg_n(56, 11));
    const auto b = mock.sample(prompt, cfg_n(56, 11));
    CHECK(a == b);

    int budget_misses = 0;
    std::set<std::string> distinct;
    for (const auto& reply : a) {
        if (reply == "I ran out of budget before answering.") {
            ++budget_misses;
            continue;
        }
        CHECK(reply.rfind("Considering each option in turn.\nThe answer is: (", 0) == 0);
        distinct.insert(reply);
    }
    // salt % 7 == 0 hits roughly one reply slot in seven.
    CHECK(budget_misses > 0);
    CHECK(budget_misses < 28);
    CHECK(distinct.size() >= 2);

    const auto other_seed = mock.sample(prompt, cfg_n(56, 12));
    CHECK(other_seed != a);
}

TEST_CASE("exact-answer rollouts scale difficulty with the question hash") {
    ScriptedMockSampler mock;
    const std::string question =
        "Read the note for task738 and reply.\nNote 2: filed. [[answer: cedar-2]]";
    const auto replies = mock.sample(rlvr::build_eval_prompt(question), cfg_n(24, 5));
    int correct = 0;
    for (const auto& reply : replies) {
        const bool budget = reply == "I ran out of budget before answering.";
        const bool right = reply == "Working through it.\nThe answer is: cedar-2";
        const bool wrong = reply.rfind("Working through it.\nThe answer is: wrong-", 0) == 0;
        CHECK((budget || right || wrong));
        correct += right ? 1 : 0;
    }
    // This particular question hashes to a mixed difficulty; nothing more
    // specific is guaranteed across the sweep than "not degenerate".
    CHECK(correct >= 0);

    const auto plain = mock.sample(rlvr::build_eval_prompt("No marker here."), cfg_n(8, 5));
    for (const auto& reply : plain) {
        CHECK((reply == "The answer is: unknown" ||
               reply == "I ran out of budget before answering."));
    }

    CHECK_THROWS_WITH_AS(mock.sample("completely foreign prompt", cfg_n(1)),
                         doctest::Contains("cannot handle this prompt"), std::runtime_error);
}

TEST_CASE("scripted rewrites survive apply_intervention for every kind") {
    ScriptedMockSampler mock;
    const auto mcq = testfx::make_mcq("t#0", "Which label does the rule keep?",
                                      {"w0", "w1", "w2", "w3"}, 1);
    const auto exact = testfx::make_exact("e#0", "Reply with the filed codeword.", "cedar-2");

    std::set<std::string> stems;
    for (rlvr::InterventionKind kind : rlvr::all_intervention_kinds()) {
        const auto out = rlvr::apply_intervention(mcq, kind, mock, 7);
        REQUIRE(out.question.has_value());
        CHECK(out.question->options == mcq.options);
        CHECK(out.question->target == mcq.target);
        CHECK(out.question->question != mcq.question);
        CHECK(out.question->question.find("Which label does the rule keep?") !=
              std::string::npos);
        stems.insert(out.question->question);

        const auto out2 = rlvr::apply_intervention(exact, kind, mock, 7);
        REQUIRE(out2.question.has_value());
        CHECK(out2.question->target == "cedar-2");
        CHECK(out2.question->options.empty());
    }
    // Every kind decorates the stem differently.
    CHECK(stems.size() == rlvr::all_intervention_kinds().size());

    const auto marked = testfx::make_exact("m#0", "Echo the code. [MUTATE]", "cedar-2");
    const auto rejected = rlvr::apply_intervention(marked, rlvr::InterventionKind::many_hop, mock, 7);
    CHECK(!rejected.question.has_value());
    CHECK(rejected.reason == "target mutated");
}

TEST_CASE("the hashed embedder is a case-insensitive bag of words") {
    rlvr::HashedBagEmbedder embedder;
    const auto v = embedder.embed("cat cat dog");
    REQUIRE(v.size() == 16);
    double total = 0.0;
    for (double x : v) {
        CHECK(x >= 0.0);
        total += x;
    }
    CHECK(total == 3.0);

    CHECK(embedder.embed("Cat, DOG! cat") == v);
    CHECK(embedder.embed("cat dog cat") == v);

    const auto zero = embedder.embed("  \t!!\n");
    for (double x : zero) CHECK(x == 0.0);

    CHECK(embedder.embed("cat") != embedder.embed("dog"));
}

TEST_CASE("endpoint factories pick implementations off the URL scheme") {
    auto scripted = rlvr::make_endpoint_sampler("mock://scripted");
    REQUIRE(scripted != nullptr);
    const auto probe = scripted->sample(
        rlvr::build_screening_prompt(demo_task("Reply with the codeword.")), cfg_n(1));
    CHECK(probe == std::vector<std::string>{"Yes."});

    auto embed = rlvr::make_endpoint_embedder("mock://embed");
    REQUIRE(embed != nullptr);
    CHECK(embed->embed("cat").size() == 16);

    CHECK(rlvr::make_endpoint_sampler("http://localhost:9") != nullptr);
    CHECK(rlvr::make_endpoint_embedder("https://localhost:9") != nullptr);

    CHECK_THROWS_WITH_AS(rlvr::make_endpoint_sampler("ftp://nope"),
                         doctest::Contains("unsupported sampler endpoint"), std::runtime_error);
    CHECK_THROWS_WITH_AS(rlvr::make_endpoint_embedder("mock://scripted"),
                         doctest::Contains("unsupported embedder endpoint"), std::runtime_error);
}
