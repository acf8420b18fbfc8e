#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "rlvr/evalkit.hpp"
#include "rlvr/grpo.hpp"
#include "rlvr/mix.hpp"
#include "rlvr/question.hpp"
#include "rlvr/rank.hpp"
#include "rlvr/verify.hpp"

namespace {

rlvr::VerifiableQuestion mcq_question(int i) {
    rlvr::VerifiableQuestion q;
    q.question_id = "bench#" + std::to_string(i);
    q.source_task_id = "bench";
    q.options = {{"a", "red"}, {"b", "green"}, {"c", "blue"}, {"d", "grey"}};
    q.target = "b";
    q.answer_format = rlvr::AnswerFormat::multiple_choice;
    q.question = "Which of the named colors sits between red and blue in the list above?\n" +
                 rlvr::render_option_block(q.options);
    return q;
}

void BM_pass_at_k(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    double acc = 0.0;
    for (auto _ : state) {
        for (int c = 0; c <= n; ++c) {
            for (int k = 1; k <= n; ++k) acc += rlvr::pass_at_k(n, c, k);
        }
    }
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_pass_at_k)->Arg(8)->Arg(64);

void BM_extract_and_grade(benchmark::State& state) {
    const rlvr::VerifiableQuestion q = mcq_question(0);
    const std::string completion =
        "Considering each option against the constraint.\n"
        "Red is first, blue is third, so the middle one is green.\n"
        "The answer is: (b)";
    long total = 0;
    for (auto _ : state) {
        total += rlvr::grade_completion(completion, q).value;
    }
    benchmark::DoNotOptimize(total);
}
BENCHMARK(BM_extract_and_grade);

void BM_grpo_objective_gradient(benchmark::State& state) {
    const int contexts = static_cast<int>(state.range(0));
    std::vector<std::string> ids, alphabet{"(a)", "(b)", "(c)", "(d)"};
    for (int i = 0; i < contexts; ++i) ids.push_back("bench#" + std::to_string(i));
    rlvr::ToyPolicy policy = rlvr::ToyPolicy::uniform(ids, alphabet);
    rlvr::ToyPolicy old = policy;
    std::mt19937_64 rng(7);
    for (auto& row : policy.logits) {
        for (double& v : row) v += std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    }
    std::vector<rlvr::GroupSample> groups;
    for (int i = 0; i < contexts; ++i) {
        rlvr::GroupSample g;
        g.question_id = ids[i];
        const auto lp = old.logprobs(i);
        for (int j = 0; j < 8; ++j) {
            const int a = old.sample_action(i, rng);
            g.actions.push_back(a);
            g.old_logprobs.push_back(lp[a]);
            g.rewards.push_back(a == 1 ? 1.0 : 0.0);
        }
        g.advantages = rlvr::advantages(g.rewards);
        groups.push_back(std::move(g));
    }
    for (auto _ : state) {
        auto out = rlvr::objective_and_gradient(policy, old, groups, 0.2);
        benchmark::DoNotOptimize(out.objective);
    }
}
BENCHMARK(BM_grpo_objective_gradient)->Arg(8)->Arg(64);

void BM_micro_mix_fixture(benchmark::State& state) {
    const rlvr::PerSubtaskRankings rankings =
        rlvr::load_ranking_fixture_csv(std::string(RLVRKIT_DATA_DIR) + "/bbeh_top5_per_subtask.csv");
    for (auto _ : state) {
        auto spec = rlvr::micro_mix(rankings, 2);
        benchmark::DoNotOptimize(spec.selected_task_ids.size());
    }
}
BENCHMARK(BM_micro_mix_fixture);

}  // namespace

BENCHMARK_MAIN();
