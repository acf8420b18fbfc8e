#include <stdexcept>
#include <string>

#include "doctest.h"
#include "rlvr/verify.hpp"
#include "test_support.hpp"

using rlvr::AnswerKind;
using rlvr::extract_answer;
using rlvr::grade_completion;
using rlvr::normalize_answer;

TEST_CASE("normalize_answer strips wrappers to a fixpoint") {
    CHECK(normalize_answer("  42 ") == "42");
    CHECK(normalize_answer("\"yes\"") == "yes");
    CHECK(normalize_answer("(a)") == "a");
    CHECK(normalize_answer("('(a)')") == "a");
    CHECK(normalize_answer("answer...") == "answer");
    CHECK(normalize_answer(" \"(Paris.)\" ") == "paris");
    CHECK(normalize_answer("Two   Words\tHere") == "two words here");
    CHECK(normalize_answer("") == "");
    CHECK(normalize_answer("   ") == "");
}

TEST_CASE("normalize_answer is idempotent") {
    for (const std::string s :
         {"  (\"Mixed Case.\") ", "(a)", "'x'", "a. b. c.", "(unbalanced", "a)(b", "42"}) {
        CAPTURE(s);
        CHECK(normalize_answer(normalize_answer(s)) == normalize_answer(s));
    }
}

TEST_CASE("normalize_answer leaves partial wrappers alone") {
    // Only a paren pair that wraps the whole string is a wrapper.
    CHECK(normalize_answer("(a) and (b)") == "(a) and (b)");
    CHECK(normalize_answer("f(x)") == "f(x)");
    // Mismatched quote characters are content, not wrappers.
    CHECK(normalize_answer("\"x'") == "\"x'");
}

TEST_CASE("extract_answer takes the last prefix occurrence, case-insensitively") {
    const auto a = extract_answer(
        "The answer is: 13 looks right at first.\nBut no.\nthe ANSWER is: 42\ntrailing");
    CHECK(a.kind == AnswerKind::literal);
    CHECK(a.raw_tail == " 42");
    CHECK(a.canonical == "42");

    const auto none = extract_answer("I never commit to anything.");
    CHECK(none.kind == AnswerKind::missing);
    CHECK(none.canonical == "");
}

TEST_CASE("extract_answer classifies single letters") {
    CHECK(extract_answer("The answer is: (a)").kind == AnswerKind::letter);
    CHECK(extract_answer("The answer is: b").kind == AnswerKind::letter);
    CHECK(extract_answer("The answer is: (ab)").kind == AnswerKind::literal);
    CHECK(extract_answer("The answer is: 7").kind == AnswerKind::literal);
    CHECK(extract_answer("The answer is:").kind == AnswerKind::literal);  // empty literal
}

TEST_CASE("extract_answer stops at the end of the prefix line") {
    const auto a = extract_answer("The answer is: yes\nThe explanation continues");
    CHECK(a.canonical == "yes");
}

TEST_CASE("grading accepts the documented reply forms") {
    // "The answer is: 42" for a literal target.
    auto literal = testfx::make_exact("q#0", "Compute.", "42");
    CHECK(grade_completion("Let me think.\nThe answer is: 42", literal).value == 1);
    CHECK(grade_completion("The answer is: 41", literal).value == 0);

    // "The answer is: yes" for a yes/no target.
    auto yesno = testfx::make_exact("q#1", "Decide.", "yes");
    CHECK(grade_completion("The answer is: yes", yesno).value == 1);
    CHECK(grade_completion("The answer is: Yes.", yesno).value == 1);
    CHECK(grade_completion("The answer is: no", yesno).value == 0);

    // "The answer is: (a)" for an MCQ target.
    auto mcq = testfx::make_mcq("q#2", "Pick.", {"tide", "wave", "foam"}, 0);
    CHECK(grade_completion("The answer is: (a)", mcq).value == 1);
    CHECK(grade_completion("The answer is: a", mcq).value == 1);
    CHECK(grade_completion("The answer is: (B)", mcq).value == 0);
}

TEST_CASE("MCQ grading falls back to the target option's text") {
    auto mcq = testfx::make_mcq("q#3", "Pick.", {"spring tide", "neap tide"}, 1);
    CHECK(grade_completion("The answer is: neap tide", mcq).value == 1);
    CHECK(grade_completion("The answer is: Neap   Tide.", mcq).value == 1);
    // Text of a non-target option does not count.
    CHECK(grade_completion("The answer is: spring tide", mcq).value == 0);
    // A wrong letter is graded as a letter, not matched against texts.
    CHECK(grade_completion("The answer is: (a)", mcq).value == 0);
}

TEST_CASE("exact grading consults target variants") {
    auto q = testfx::make_exact("q#4", "Recall.", "color", {"colour"});
    CHECK(grade_completion("The answer is: colour", q).value == 1);
    CHECK(grade_completion("The answer is: COLOR.", q).value == 1);
    CHECK(grade_completion("The answer is: hue", q).value == 0);
}

TEST_CASE("missing prefix grades to zero") {
    auto q = testfx::make_exact("q#5", "Recall.", "x");
    CHECK(grade_completion("x", q).value == 0);
}

TEST_CASE("build_eval_prompt prepends the shared instruction block") {
    const auto p = rlvr::build_eval_prompt("What is 2+2?");
    CHECK(p.find(rlvr::evaluation_prompt()) == 0);
    CHECK(p.substr(p.size() - 12) == "What is 2+2?");
    CHECK(p.find("\n\n") != std::string::npos);
    // The instruction block names the required prefix and shows the forms.
    CHECK(rlvr::evaluation_prompt().find("The answer is: 42") != std::string::npos);
    CHECK(rlvr::evaluation_prompt().find("The answer is: yes") != std::string::npos);
    CHECK(rlvr::evaluation_prompt().find("The answer is: (a)") != std::string::npos);
}

TEST_CASE("question_admits_correct_answer holds for well-formed questions") {
    CHECK(rlvr::question_admits_correct_answer(
        testfx::make_mcq("q#6", "Pick.", {"ash", "elm"}, 1)));
    CHECK(rlvr::question_admits_correct_answer(testfx::make_exact("q#7", "Say.", "Fjord Bay.")));

    auto qs = std::vector<rlvr::VerifiableQuestion>{
        testfx::make_exact("q#8", "Say.", "ok"),
        testfx::make_mcq("q#9", "Pick.", {"a1", "b2"}, 0),
    };
    CHECK_NOTHROW(rlvr::check_dataset_verifiable(qs));
    // A target spanning lines cannot be stated on the answer line, so no
    // completion can earn reward 1 for it.
    qs[0].target = "two\nlines";
    CHECK_FALSE(rlvr::question_admits_correct_answer(qs[0]));
    CHECK_THROWS_WITH_AS(rlvr::check_dataset_verifiable(qs),
                         doctest::Contains("no completion can reach reward 1"),
                         std::runtime_error);
}
