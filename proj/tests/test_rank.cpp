#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "rlvr/jsonl.hpp"
#include "rlvr/rank.hpp"
#include "test_support.hpp"

using rlvr::Ranking;
using rlvr::UtilityMatrix;

namespace {

UtilityMatrix small_matrix() {
    UtilityMatrix m;
    m.task_ids = {"t1", "t2", "t3"};
    m.subtask_ids = {"sA", "sB"};
    m.scores = {{0.5, 0.1}, {0.25, 0.75}, {0.5, 0.5}};
    return m;
}

struct TableEmbedder : rlvr::Embedder {
    std::vector<double> embed(const std::string& text) override {
        if (text == "ax") return {1.0, 0.0};
        if (text == "ay") return {0.0, 1.0};
        if (text == "diag") return {1.0, 1.0};
        if (text == "anti") return {-1.0, 0.0};
        if (text == "short") return {1.0};
        return {0.0, 0.0};
    }
};

}  // namespace

TEST_CASE("matrix macro column is the row mean") {
    const auto m = small_matrix();
    const auto macro = m.macro();
    REQUIRE(macro.size() == 3);
    CHECK(macro[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(macro[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(macro[2] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("validate_matrix rejects malformed matrices") {
    auto m = small_matrix();
    CHECK_NOTHROW(rlvr::validate_matrix(m));

    auto empty = m;
    empty.task_ids.clear();
    empty.scores.clear();
    CHECK_THROWS_WITH_AS(rlvr::validate_matrix(empty), doctest::Contains("must be nonempty"),
                         std::runtime_error);

    auto short_rows = m;
    short_rows.scores.pop_back();
    CHECK_THROWS_WITH_AS(rlvr::validate_matrix(short_rows),
                         doctest::Contains("row count mismatch"), std::runtime_error);

    auto ragged = m;
    ragged.scores[1].pop_back();
    CHECK_THROWS_WITH_AS(rlvr::validate_matrix(ragged),
                         doctest::Contains("column count mismatch"), std::runtime_error);

    auto poisoned = m;
    poisoned.scores[0][1] = std::nan("");
    CHECK_THROWS_WITH_AS(rlvr::validate_matrix(poisoned), doctest::Contains("holds NaN"),
                         std::runtime_error);

    auto dup = m;
    dup.task_ids[2] = "t1";
    CHECK_THROWS_WITH_AS(rlvr::validate_matrix(dup), doctest::Contains("duplicate task ids"),
                         std::runtime_error);
}

TEST_CASE("matrix CSV round-trips exactly") {
    testfx::TempDir tmp;
    auto m = small_matrix();
    m.scores[0][0] = 1.0 / 3.0;  // needs all 17 digits to survive
    const auto file = tmp.file("matrix.csv");
    rlvr::save_matrix_csv(file, m);

    const auto text = rlvr::read_text_file(file);
    CHECK(text.rfind("task_id,sA,sB\n", 0) == 0);

    const auto loaded = rlvr::load_matrix_csv(file);
    CHECK(loaded.task_ids == m.task_ids);
    CHECK(loaded.subtask_ids == m.subtask_ids);
    CHECK(loaded.scores == m.scores);
}

TEST_CASE("load_matrix_csv rejects malformed files") {
    testfx::TempDir tmp;
    const auto file = tmp.file("matrix.csv");
    rlvr::write_text_file(file, "");
    CHECK_THROWS_WITH_AS(rlvr::load_matrix_csv(file), doctest::Contains("empty matrix file"),
                         std::runtime_error);
    rlvr::write_text_file(file, "wrong,header\n");
    CHECK_THROWS_WITH_AS(rlvr::load_matrix_csv(file), doctest::Contains("bad header"),
                         std::runtime_error);
    rlvr::write_text_file(file, "task_id,sA,sB\nt1,0.5\n");
    CHECK_THROWS_WITH_AS(rlvr::load_matrix_csv(file), doctest::Contains("row width mismatch"),
                         std::runtime_error);
}

TEST_CASE("make_ranking sorts descending with id tie-breaks") {
    const Ranking r = rlvr::make_ranking({"tb", "ta", "tc", "td"}, {0.5, 0.5, 0.9, 0.1});
    CHECK(r == Ranking{"tc", "ta", "tb", "td"});

    CHECK_THROWS_WITH_AS(rlvr::make_ranking({"a"}, {0.1, 0.2}),
                         doctest::Contains("disagree in length"), std::runtime_error);
    CHECK_THROWS_WITH_AS(rlvr::make_ranking({"a", "b"}, {0.1, std::nan("")}),
                         doctest::Contains("cannot rank NaN"), std::runtime_error);
}

TEST_CASE("per-subtask rankings order each column independently") {
    const auto out = rlvr::make_per_subtask_rankings(small_matrix());
    REQUIRE(out.subtask_ids == std::vector<std::string>{"sA", "sB"});
    // Column sA: t1 = t3 = 0.5 (tie -> id order), t2 = 0.25.
    CHECK(out.rankings[0] == Ranking{"t1", "t3", "t2"});
    CHECK(out.rankings[1] == Ranking{"t2", "t3", "t1"});
}

TEST_CASE("the committed ranking fixture loads with 23 sub-tasks of 5 tasks") {
    const auto fixture =
        rlvr::load_ranking_fixture_csv(std::string(RLVRKIT_DATA_DIR) + "/bbeh_top5_per_subtask.csv");
    REQUIRE(fixture.subtask_ids.size() == 23);
    for (const auto& ranking : fixture.rankings) CHECK(ranking.size() == 5);
    CHECK(fixture.subtask_ids.front() == "movie recommendation");
    CHECK(fixture.rankings.front() ==
          Ranking{"task827", "task069", "task212", "task1297", "task1209"});
    CHECK(fixture.subtask_ids.back() == "dyck languages");
    CHECK(fixture.rankings.back().back() == "task1152");
}

TEST_CASE("load_ranking_fixture_csv rejects malformed fixtures") {
    testfx::TempDir tmp;
    const auto file = tmp.file("fixture.csv");
    rlvr::write_text_file(file, "");
    CHECK_THROWS_WITH_AS(rlvr::load_ranking_fixture_csv(file), doctest::Contains("empty fixture"),
                         std::runtime_error);
    rlvr::write_text_file(file, "task_id,rank,subtask_id\n");
    CHECK_THROWS_WITH_AS(rlvr::load_ranking_fixture_csv(file), doctest::Contains("bad header"),
                         std::runtime_error);
    rlvr::write_text_file(file, "subtask_id,rank,task_id\n");
    CHECK_THROWS_WITH_AS(rlvr::load_ranking_fixture_csv(file), doctest::Contains("no rows"),
                         std::runtime_error);
    rlvr::write_text_file(file, "subtask_id,rank,task_id\ns1,1,t1\ns1,3,t2\n");
    CHECK_THROWS_WITH_AS(rlvr::load_ranking_fixture_csv(file),
                         doctest::Contains("not contiguous from 1"), std::runtime_error);
    rlvr::write_text_file(file, "subtask_id,rank,task_id\ns1,2,t1\n");
    CHECK_THROWS_AS(rlvr::load_ranking_fixture_csv(file), std::runtime_error);
}

TEST_CASE("rankings CSV round-trips and separates the macro rows") {
    testfx::TempDir tmp;
    rlvr::PerSubtaskRankings rankings;
    rankings.subtask_ids = {"sB", "sA"};  // save must preserve this order
    rankings.rankings = {{"t2", "t1"}, {"t1", "t2"}};
    const Ranking macro = {"t1", "t2"};
    const auto file = tmp.file("rankings.csv");
    rlvr::save_rankings_csv(file, rankings, macro);

    Ranking macro_loaded;
    const auto loaded = rlvr::load_rankings_csv(file, &macro_loaded);
    CHECK(loaded.subtask_ids == rankings.subtask_ids);
    CHECK(loaded.rankings == rankings.rankings);
    CHECK(macro_loaded == macro);

    // A rank-only fixture has no __macro__ rows; the out-param comes back empty.
    rlvr::save_rankings_csv(file, rankings, {});
    macro_loaded = {"stale"};
    const auto no_macro = rlvr::load_rankings_csv(file, &macro_loaded);
    CHECK(no_macro.subtask_ids == rankings.subtask_ids);
    CHECK(macro_loaded.empty());
}

TEST_CASE("lexical utility averages token-set overlap over all pairs") {
    // Pairs: J=1, J=0, J=0, J=1/2 -> mean 0.375.
    const std::vector<std::string> task = {"alpha beta", "gamma"};
    const std::vector<std::string> val = {"Alpha, BETA!", "delta gamma"};
    CHECK(rlvr::utility_lexical(task, val, 1) == doctest::Approx(0.375).epsilon(1e-15));

    // Punctuation-only texts have empty token sets; such pairs count as zero.
    CHECK(rlvr::utility_lexical({"!!!"}, {"???"}, 1) == 0.0);

    CHECK_THROWS_WITH_AS(rlvr::utility_lexical({}, {"x"}, 1),
                         doctest::Contains("nonempty question sets"), std::runtime_error);

    // Below the cap no sampling happens, so the seed cannot matter.
    CHECK(rlvr::utility_lexical(task, val, 1) == rlvr::utility_lexical(task, val, 99));
}

TEST_CASE("lexical utility samples deterministically above the cap") {
    std::vector<std::string> task, val;
    for (int i = 0; i < 40; ++i) {
        task.push_back("task text number " + std::to_string(i));
        val.push_back("validation text number " + std::to_string(i * 7));
    }
    const double a = rlvr::utility_lexical(task, val, 42, 10);
    const double b = rlvr::utility_lexical(task, val, 42, 10);
    CHECK(a == b);
    CHECK(a > 0.0);
    CHECK(a < 1.0);
}

TEST_CASE("semantic utility averages clamped cosine over usable pairs") {
    TableEmbedder embedder;
    rlvr::SimilarityDiagnostics diag;

    // cos(ax, diag) = cos(ay, diag) = 1/sqrt(2).
    const double mean =
        rlvr::utility_semantic({"ax", "ay"}, {"diag"}, embedder, 5, 200, &diag);
    CHECK(mean == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(diag.pairs_used == 2);
    CHECK(diag.pairs_skipped == 0);

    // Zero vectors and dimension mismatches are skipped, not averaged in.
    const double with_junk =
        rlvr::utility_semantic({"ax", "ay"}, {"diag", "zero", "short"}, embedder, 5, 200, &diag);
    CHECK(with_junk == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(diag.pairs_used == 2);
    CHECK(diag.pairs_skipped == 4);

    // Negative cosine clamps to zero rather than rewarding anti-alignment.
    CHECK(rlvr::utility_semantic({"ax"}, {"anti"}, embedder, 5) == 0.0);

    CHECK_THROWS_WITH_AS(rlvr::utility_semantic({"zero"}, {"diag"}, embedder, 5),
                         doctest::Contains("degenerate"), std::runtime_error);
    CHECK_THROWS_WITH_AS(rlvr::utility_semantic({}, {"diag"}, embedder, 5),
                         doctest::Contains("nonempty question sets"), std::runtime_error);
}

TEST_CASE("difficulty utility is the mean win rate") {
    const std::vector<rlvr::WinRateRecord> records = {{"q1", 2, 8}, {"q2", 6, 8}};
    CHECK(rlvr::utility_difficulty(records) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_WITH_AS(rlvr::utility_difficulty({}), doctest::Contains("at least one record"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(rlvr::utility_difficulty({{"q1", 0, 0}}),
                         doctest::Contains("zero samples"), std::runtime_error);
}

TEST_CASE("trained-eval utility scores higher where training transfers") {
    // Tabular policies only transfer through shared question ids: the "seen"
    // sub-task reuses a training question, the "unseen" one does not.
    std::vector<rlvr::VerifiableQuestion> task_dataset = {
        testfx::make_mcq("t9#0", "Pick the marked option.", {"p", "q", "r", "s"}, 1),
        testfx::make_mcq("t9#1", "Pick the marked option.", {"p", "q", "r", "s"}, 1),
        testfx::make_mcq("t9#2", "Pick the marked option.", {"p", "q", "r", "s"}, 1),
    };
    rlvr::BenchmarkSplit validation;
    validation.name = "toy";
    auto seen = task_dataset[0];
    seen.subtask_id = "seen";
    auto unseen = testfx::make_mcq("fresh#0", "Pick the marked option.", {"p", "q", "r", "s"}, 1);
    unseen.subtask_id = "unseen";
    validation.subtasks = {{"seen", {seen}}, {"unseen", {unseen}}};

    rlvr::GrpoConfig config;
    config.group_size = 8;
    config.learning_rate = 0.1;
    config.steps = 450;
    config.batch_size = 1;
    config.seed = 613;

    const auto row = rlvr::utility_trained_eval(task_dataset, validation, config, 8, 1);
    REQUIRE(row.size() == 2);
    CHECK(row[0] > row[1]);
    CHECK(row[0] > 0.8);
    CHECK(row[1] < 0.8);

    // Deterministic given the same config.
    CHECK(rlvr::utility_trained_eval(task_dataset, validation, config, 8, 1) == row);

    CHECK_THROWS_WITH_AS(rlvr::utility_trained_eval({}, validation, config, 8, 1),
                         doctest::Contains("empty task dataset"), std::runtime_error);
}

TEST_CASE("pearson matches hand-worked values") {
    CHECK(rlvr::pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rlvr::pearson({1, 2, 3}, {6, 4, 2}) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(rlvr::pearson({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(0.8).epsilon(1e-12));

    CHECK_THROWS_WITH_AS(rlvr::pearson({1}, {1}), doctest::Contains(">= 2 points"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(rlvr::pearson({1, 2}, {1, 2, 3}), doctest::Contains(">= 2 points"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(rlvr::pearson({1, 1}, {1, 2}), doctest::Contains("constant series"),
                         std::runtime_error);
}

TEST_CASE("spearman ranks before correlating and averages ties") {
    // Any monotone map scores 1 regardless of spacing.
    CHECK(rlvr::spearman({1, 10, 100}, {3, 4, 5}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rlvr::spearman({1, 10, 100}, {5, 4, 3}) == doctest::Approx(-1.0).epsilon(1e-12));
    // Tied xs take the average rank 1.5: correlation sqrt(3)/2.
    CHECK(rlvr::spearman({1, 1, 2}, {1, 2, 3}) ==
          doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
}
