#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "rlvr/jsonl.hpp"
#include "rlvr/mix.hpp"
#include "pipeline_fixture.hpp"
#include "test_support.hpp"

using rlvr::MixStrategy;
using rlvr::MixtureSpec;
using rlvr::VerifiableQuestion;

namespace {

std::map<std::string, std::vector<VerifiableQuestion>> uniform_pools(
    const std::vector<std::string>& task_ids, int per_task) {
    std::map<std::string, std::vector<VerifiableQuestion>> pools;
    for (const auto& t : task_ids) {
        for (int i = 0; i < per_task; ++i) {
            pools[t].push_back(
                testfx::make_exact(t + "#" + std::to_string(i), "Q " + std::to_string(i), "x"));
        }
    }
    return pools;
}

MixtureSpec plain_spec(const std::vector<std::string>& task_ids) {
    MixtureSpec spec;
    spec.strategy = MixStrategy::macro;
    spec.n_top = static_cast<int>(task_ids.size());
    spec.selected_task_ids = task_ids;
    return spec;
}

}  // namespace

TEST_CASE("mix strategy names round-trip") {
    CHECK(rlvr::to_string(MixStrategy::macro) == "macro");
    CHECK(rlvr::to_string(MixStrategy::micro) == "micro");
    CHECK(rlvr::mix_strategy_from_string("macro") == MixStrategy::macro);
    CHECK(rlvr::mix_strategy_from_string("micro") == MixStrategy::micro);
    CHECK_THROWS_WITH_AS(rlvr::mix_strategy_from_string("both"),
                         doctest::Contains("'macro' or 'micro'"), std::runtime_error);
}

TEST_CASE("macro mixing takes the ranking prefix") {
    const rlvr::Ranking ranking = {"t3", "t1", "t2"};
    const auto spec = rlvr::macro_mix(ranking, 2);
    CHECK(spec.strategy == MixStrategy::macro);
    CHECK(spec.n_top == 2);
    CHECK(spec.selected_task_ids == std::vector<std::string>{"t3", "t1"});
    CHECK(spec.per_subtask_selection.empty());

    CHECK_THROWS_WITH_AS(rlvr::macro_mix(ranking, 0), doctest::Contains("must be positive"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(rlvr::macro_mix(ranking, 4),
                         doctest::Contains("exceeds the number of ranked tasks"),
                         std::runtime_error);
}

TEST_CASE("macro mixing from a matrix ranks by row mean") {
    rlvr::UtilityMatrix m;
    m.task_ids = {"t1", "t2", "t3"};
    m.subtask_ids = {"sA", "sB"};
    m.scores = {{0.9, 0.1}, {0.6, 0.6}, {0.2, 0.3}};  // means 0.5, 0.6, 0.25
    const auto spec = rlvr::macro_mix(m, 2);
    CHECK(spec.selected_task_ids == std::vector<std::string>{"t2", "t1"});
}

TEST_CASE("micro mixing unions per-sub-task winners in first-appearance order") {
    const auto fixture = rlvr::load_ranking_fixture_csv(std::string(RLVRKIT_DATA_DIR) +
                                                        "/bbeh_top5_per_subtask.csv");
    const auto top1 = rlvr::micro_mix(fixture, 1);
    CHECK(top1.strategy == MixStrategy::micro);
    CHECK(top1.selected_task_ids == testfx::micro_top1_union());
    REQUIRE(top1.per_subtask_selection.size() == 23);
    CHECK(top1.per_subtask_selection.front().first == "movie recommendation");
    CHECK(top1.per_subtask_selection.front().second == std::vector<std::string>{"task827"});

    const auto top2 = rlvr::micro_mix(fixture, 2);
    CHECK(top2.selected_task_ids == testfx::micro_top2_union());
    CHECK(top2.per_subtask_selection.front().second ==
          std::vector<std::string>{"task827", "task069"});

    CHECK_THROWS_WITH_AS(rlvr::micro_mix(fixture, 6), doctest::Contains("ranks only"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(rlvr::micro_mix(fixture, 0), doctest::Contains("must be positive"),
                         std::runtime_error);
}

TEST_CASE("ample pools split the target into near-equal quotas") {
    const auto pools = uniform_pools({"t1", "t2", "t3"}, 400);
    const auto out = rlvr::materialize(plain_spec({"t1", "t2", "t3"}), pools, 500, 7);
    CHECK(out.manifest.per_task_counts.at("t1") == 167);
    CHECK(out.manifest.per_task_counts.at("t2") == 167);
    CHECK(out.manifest.per_task_counts.at("t3") == 166);
    CHECK(out.manifest.actual_size == 500);
    CHECK(out.manifest.target_size == 500);
    CHECK(out.manifest.shortfall_task_ids.empty());
    CHECK(out.prompts.size() == 500);
}

TEST_CASE("a dry pool pins at its size and the rest is re-split") {
    auto pools = uniform_pools({"t1", "t2"}, 900);
    pools["t1"].resize(100);
    const auto out = rlvr::materialize(plain_spec({"t1", "t2"}), pools, 500, 7);
    CHECK(out.manifest.per_task_counts.at("t1") == 100);
    CHECK(out.manifest.per_task_counts.at("t2") == 400);
    CHECK(out.manifest.actual_size == 500);
    CHECK(out.manifest.shortfall_task_ids == std::vector<std::string>{"t1"});
}

TEST_CASE("an unreachable target takes everything and reports the gap") {
    auto pools = uniform_pools({"t1", "t2"}, 4);
    pools["t1"].resize(3);
    const auto out = rlvr::materialize(plain_spec({"t1", "t2"}), pools, 10, 7);
    CHECK(out.manifest.per_task_counts.at("t1") == 3);
    CHECK(out.manifest.per_task_counts.at("t2") == 4);
    CHECK(out.manifest.actual_size == 7);
    CHECK(out.manifest.target_size == 10);
    CHECK(out.manifest.shortfall_task_ids == std::vector<std::string>{"t1", "t2"});
}

TEST_CASE("prompts interleave the selected tasks round-robin") {
    const auto pools = uniform_pools({"t1", "t2"}, 8);
    const auto out = rlvr::materialize(plain_spec({"t1", "t2"}), pools, 3, 7);
    REQUIRE(out.prompts.size() == 3);
    // Quotas are {2, 1}: rounds give t1, t2, then t1's second draw.
    CHECK(out.prompts[0].source_task_id == "t1");
    CHECK(out.prompts[1].source_task_id == "t2");
    CHECK(out.prompts[2].source_task_id == "t1");
}

TEST_CASE("materialize is deterministic in the seed") {
    const auto pools = uniform_pools({"t1", "t2", "t3"}, 50);
    const auto spec = plain_spec({"t1", "t2", "t3"});
    const auto a = rlvr::materialize(spec, pools, 30, 11);
    const auto b = rlvr::materialize(spec, pools, 30, 11);
    REQUIRE(a.prompts.size() == b.prompts.size());
    for (std::size_t i = 0; i < a.prompts.size(); ++i) {
        CHECK(a.prompts[i].question_id == b.prompts[i].question_id);
    }
    const auto c = rlvr::materialize(spec, pools, 30, 12);
    bool same = true;
    for (std::size_t i = 0; i < a.prompts.size(); ++i) {
        same = same && a.prompts[i].question_id == c.prompts[i].question_id;
    }
    CHECK(!same);
}

TEST_CASE("intervened questions stay out of mixtures unless asked for") {
    auto pools = uniform_pools({"t1"}, 4);
    for (auto& q : pools["t1"]) {
        q.provenance = rlvr::Provenance::intervention(rlvr::InterventionKind::many_hop);
    }
    CHECK_THROWS_WITH_AS(rlvr::materialize(plain_spec({"t1"}), pools, 2, 7),
                         doctest::Contains("t1 has an empty pool"), std::runtime_error);

    const auto out = rlvr::materialize(plain_spec({"t1"}), pools, 2, 7, true);
    CHECK(out.prompts.size() == 2);
    CHECK(out.prompts[0].provenance.is_intervention);

    // A half-intervened pool quietly shrinks to its original questions.
    auto mixed = uniform_pools({"t2"}, 4);
    mixed["t2"][0].provenance = rlvr::Provenance::intervention(rlvr::InterventionKind::many_hop);
    mixed["t2"][2].provenance = rlvr::Provenance::intervention(rlvr::InterventionKind::many_hop);
    const auto originals = rlvr::materialize(plain_spec({"t2"}), mixed, 2, 7);
    for (const auto& q : originals.prompts) CHECK(!q.provenance.is_intervention);
}

TEST_CASE("materialize validates its inputs") {
    const auto pools = uniform_pools({"t1"}, 4);
    CHECK_THROWS_WITH_AS(rlvr::materialize(plain_spec({"t1"}), pools, 0, 7),
                         doctest::Contains("target_size must be positive"), std::runtime_error);
    CHECK_THROWS_WITH_AS(rlvr::materialize(plain_spec({}), pools, 2, 7),
                         doctest::Contains("selects no tasks"), std::runtime_error);
    CHECK_THROWS_WITH_AS(rlvr::materialize(plain_spec({"ghost"}), pools, 2, 7),
                         doctest::Contains("ghost has an empty pool"), std::runtime_error);

    auto dup = uniform_pools({"t1"}, 1);
    dup["t1"].push_back(dup["t1"][0]);
    CHECK_THROWS_WITH_AS(rlvr::materialize(plain_spec({"t1"}), dup, 2, 7),
                         doctest::Contains("duplicate question_id in mixture"),
                         std::runtime_error);
}

TEST_CASE("pools_by_task groups by source task preserving order") {
    std::vector<VerifiableQuestion> questions = {
        testfx::make_exact("a#1", "Q", "x"), testfx::make_exact("b#0", "Q", "x"),
        testfx::make_exact("a#0", "Q", "x")};
    const auto pools = rlvr::pools_by_task(questions);
    REQUIRE(pools.size() == 2);
    REQUIRE(pools.at("a").size() == 2);
    CHECK(pools.at("a")[0].question_id == "a#1");
    CHECK(pools.at("a")[1].question_id == "a#0");
    CHECK(pools.at("b")[0].question_id == "b#0");
}

TEST_CASE("mixture manifests round-trip through JSON") {
    testfx::TempDir tmp;
    rlvr::MixtureManifest m;
    m.spec.strategy = MixStrategy::micro;
    m.spec.n_top = 2;
    m.spec.selected_task_ids = {"t2", "t1"};
    m.spec.per_subtask_selection = {{"sA", {"t2", "t1"}}, {"sB", {"t2", "t2"}}};
    m.seed = 99;
    m.target_size = 500;
    m.actual_size = 480;
    m.per_task_counts = {{"t1", 230}, {"t2", 250}};
    m.shortfall_task_ids = {"t1"};

    const auto file = tmp.file("manifest.json");
    rlvr::save_mixture_manifest(file, m);
    CHECK(rlvr::read_text_file(file).find("\"schema\": \"mixture_manifest/v1\"") !=
          std::string::npos);

    const auto loaded = rlvr::load_mixture_manifest(file);
    CHECK(loaded.spec.strategy == m.spec.strategy);
    CHECK(loaded.spec.n_top == m.spec.n_top);
    CHECK(loaded.spec.selected_task_ids == m.spec.selected_task_ids);
    CHECK(loaded.spec.per_subtask_selection == m.spec.per_subtask_selection);
    CHECK(loaded.seed == m.seed);
    CHECK(loaded.target_size == m.target_size);
    CHECK(loaded.actual_size == m.actual_size);
    CHECK(loaded.per_task_counts == m.per_task_counts);
    CHECK(loaded.shortfall_task_ids == m.shortfall_task_ids);

    // A macro manifest omits the per-sub-task block entirely.
    rlvr::MixtureManifest macro;
    macro.spec = rlvr::macro_mix({"t1", "t2"}, 1);
    rlvr::save_mixture_manifest(file, macro);
    CHECK(rlvr::read_text_file(file).find("per_subtask_selection") == std::string::npos);
    CHECK(rlvr::load_mixture_manifest(file).spec.per_subtask_selection.empty());

    rlvr::write_text_file(file, "{\"schema\": \"other/v1\"}");
    CHECK_THROWS_WITH_AS(rlvr::load_mixture_manifest(file), doctest::Contains("wrong schema"),
                         std::runtime_error);
}
