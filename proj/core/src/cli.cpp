#include "rlvr/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rlvr/corpus.hpp"
#include "rlvr/evalkit.hpp"
#include "rlvr/grpo.hpp"
#include "rlvr/hash.hpp"
#include "rlvr/intervene.hpp"
#include "rlvr/jsonl.hpp"
#include "rlvr/manifest.hpp"
#include "rlvr/mix.hpp"
#include "rlvr/mock_endpoint.hpp"
#include "rlvr/rank.hpp"
#include "rlvr/rollout.hpp"
#include "rlvr/verify.hpp"

namespace fs = std::filesystem;

namespace rlvr {
namespace {

inline constexpr const char* kRemovedSchema = "removed/v1";
inline constexpr const char* kCompletionSchema = "completions/v1";
inline constexpr const char* kRewardSchema = "rewards/v1";
inline constexpr const char* kCorrelationSchema = "correlations/v1";

struct Budget {
    int prompts = 0;
    int steps = 0;
};

Budget budget_from_name(const std::string& name) {
    if (name == "curation") return {500, 250};
    if (name == "scale") return {10000, 5000};
    throw UsageError("unknown budget preset '" + name + "' (expected curation or scale)");
}

struct GlobalConfig {
    std::string endpoint = "mock://scripted";
    std::string embed_endpoint = "mock://embed";
    std::string mode = "live";
    std::string cache;        // empty => in-memory only
    std::string embed_cache;  // empty => in-memory only
    std::string runs_dir = "runs";
    std::string budget_name = "curation";
    std::uint64_t seed = 0;
    Budget budget{500, 250};

    nlohmann::ordered_json to_json() const {
        return {{"endpoint", endpoint},     {"embed_endpoint", embed_endpoint},
                {"mode", mode},             {"cache", cache},
                {"embed_cache", embed_cache}, {"runs", runs_dir},
                {"budget", budget_name},    {"seed", seed}};
    }
};

struct GlobalFlags {
    std::string endpoint, embed_endpoint, mode, cache, embed_cache, runs_dir, budget, config_file;
    std::uint64_t seed = 0;
    CLI::Option* endpoint_o = nullptr;
    CLI::Option* embed_endpoint_o = nullptr;
    CLI::Option* mode_o = nullptr;
    CLI::Option* cache_o = nullptr;
    CLI::Option* embed_cache_o = nullptr;
    CLI::Option* runs_o = nullptr;
    CLI::Option* budget_o = nullptr;
    CLI::Option* seed_o = nullptr;
};

void add_global_flags(CLI::App& app, GlobalFlags& f) {
    f.endpoint_o = app.add_option("--endpoint", f.endpoint,
                                  "completion endpoint (mock://scripted or http(s)://…)");
    f.embed_endpoint_o = app.add_option("--embed-endpoint", f.embed_endpoint,
                                        "embedding endpoint (mock://embed or http(s)://…)");
    f.mode_o = app.add_option("--mode", f.mode, "live (record) or replay (cache only)");
    f.cache_o = app.add_option("--cache", f.cache, "response cache file");
    f.embed_cache_o = app.add_option("--embed-cache", f.embed_cache, "embedding cache file");
    f.runs_o = app.add_option("--runs", f.runs_dir, "run-manifest directory (default runs)");
    f.budget_o = app.add_option("--budget", f.budget,
                                "preset: curation (500 prompts / 250 steps) or "
                                "scale (10000 / 5000)");
    f.seed_o = app.add_option("--seed", f.seed, "run seed (default 0)");
    app.add_option("--config", f.config_file,
                   "JSON config file; precedence is flags, then file, then environment");
}

// Precedence: flags > config file > environment > built-in defaults.
GlobalConfig resolve_global(const GlobalFlags& f) {
    GlobalConfig g;
    if (const char* v = std::getenv("RLVRKIT_ENDPOINT")) g.endpoint = v;
    if (const char* v = std::getenv("RLVRKIT_MODE")) g.mode = v;

    if (!f.config_file.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_text_file(f.config_file));
        } catch (const std::exception& e) {
            throw UsageError("config file " + f.config_file + ": " + e.what());
        }
        if (!j.is_object()) throw UsageError("config file " + f.config_file + " is not an object");
        static const std::set<std::string> known = {"endpoint",    "embed_endpoint", "mode",
                                                    "cache",       "embed_cache",    "runs",
                                                    "budget",      "seed"};
        for (const auto& [key, value] : j.items()) {
            if (!known.count(key)) {
                throw UsageError("config file " + f.config_file + ": unknown key '" + key + "'");
            }
            (void)value;
        }
        try {
            if (j.contains("endpoint")) g.endpoint = j["endpoint"].get<std::string>();
            if (j.contains("embed_endpoint")) g.embed_endpoint = j["embed_endpoint"].get<std::string>();
            if (j.contains("mode")) g.mode = j["mode"].get<std::string>();
            if (j.contains("cache")) g.cache = j["cache"].get<std::string>();
            if (j.contains("embed_cache")) g.embed_cache = j["embed_cache"].get<std::string>();
            if (j.contains("runs")) g.runs_dir = j["runs"].get<std::string>();
            if (j.contains("budget")) g.budget_name = j["budget"].get<std::string>();
            if (j.contains("seed")) g.seed = j["seed"].get<std::uint64_t>();
        } catch (const nlohmann::json::exception& e) {
            throw UsageError("config file " + f.config_file + ": " + e.what());
        }
    }

    if (f.endpoint_o->count()) g.endpoint = f.endpoint;
    if (f.embed_endpoint_o->count()) g.embed_endpoint = f.embed_endpoint;
    if (f.mode_o->count()) g.mode = f.mode;
    if (f.cache_o->count()) g.cache = f.cache;
    if (f.embed_cache_o->count()) g.embed_cache = f.embed_cache;
    if (f.runs_o->count()) g.runs_dir = f.runs_dir;
    if (f.budget_o->count()) g.budget_name = f.budget;
    if (f.seed_o->count()) g.seed = f.seed;

    try {
        cache_mode_from_string(g.mode);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    g.budget = budget_from_name(g.budget_name);
    return g;
}

std::shared_ptr<Sampler> make_sampler(const GlobalConfig& g) {
    const CacheMode mode = cache_mode_from_string(g.mode);
    if (mode == CacheMode::replay && g.cache.empty()) {
        throw UsageError("replay mode needs --cache pointing at a recorded response file");
    }
    auto cache = g.cache.empty() ? std::make_shared<ResponseCache>()
                                 : std::make_shared<ResponseCache>(fs::path(g.cache));
    std::shared_ptr<Sampler> source;
    if (mode == CacheMode::live) source = make_endpoint_sampler(g.endpoint);
    return std::make_shared<CachingSampler>(std::move(source), std::move(cache), mode);
}

std::shared_ptr<Embedder> make_embedder(const GlobalConfig& g) {
    const CacheMode mode = cache_mode_from_string(g.mode);
    if (mode == CacheMode::replay && g.embed_cache.empty()) {
        throw UsageError("replay mode needs --embed-cache pointing at a recorded embedding file");
    }
    std::shared_ptr<Embedder> source;
    if (mode == CacheMode::live) source = make_endpoint_embedder(g.embed_endpoint);
    return std::make_shared<CachingEmbedder>(std::move(source), mode, fs::path(g.embed_cache));
}

// Collects the manifest for one run: digests of verified inputs and written
// outputs, the resolved configuration, and wall-clock bounds.
struct RunScope {
    fs::path runs_dir;
    RunManifest m;

    RunScope(const GlobalConfig& g, const std::string& subcommand, nlohmann::ordered_json args) {
        runs_dir = g.runs_dir;
        m.run_id = next_run_id(runs_dir, subcommand);
        m.subcommand = subcommand;
        m.config_json =
            nlohmann::ordered_json{{"global", g.to_json()}, {"args", std::move(args)}}.dump();
        m.seed = g.seed;
        m.cache_mode = g.mode;
        m.started_at = iso8601_utc_now();
    }

    void verify(const std::vector<fs::path>& inputs) { m.inputs = verify_inputs(runs_dir, inputs); }
    void add_output(const fs::path& p) { m.outputs[p.string()] = sha256_file(p); }
    void finish() {
        m.finished_at = iso8601_utc_now();
        save_run_manifest(runs_dir, m);
    }
};

void note_cache_input(std::vector<fs::path>& inputs, const std::string& path) {
    if (!path.empty() && fs::exists(path)) inputs.push_back(path);
}

void note_cache_output(RunScope& run, const std::string& path) {
    if (!path.empty() && fs::exists(path)) run.add_output(path);
}

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

nlohmann::ordered_json grpo_config_json(const GrpoConfig& c) {
    return {{"epsilon", c.epsilon},   {"group_size", c.group_size},
            {"learning_rate", c.learning_rate}, {"steps", c.steps},
            {"batch_size", c.batch_size}, {"seed", c.seed}};
}

// ---------------------------------------------------------------- ingest ---

struct IngestOpts {
    std::string tasks, out;
};

int cmd_ingest(const GlobalConfig& g, const IngestOpts& o) {
    RunScope run(g, "ingest", {{"tasks", o.tasks}, {"out", o.out}});
    std::vector<fs::path> inputs;
    if (fs::is_directory(o.tasks)) {
        for (const auto& entry : fs::directory_iterator(o.tasks)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                inputs.push_back(entry.path());
            }
        }
        std::sort(inputs.begin(), inputs.end());
    } else {
        inputs.push_back(o.tasks);
    }
    run.verify(inputs);

    const Corpus corpus = ingest_tasks(o.tasks);
    save_corpus(o.out, corpus);
    run.add_output(o.out);
    run.finish();

    std::size_t instances = 0;
    for (const Task& t : corpus.tasks) instances += t.instances.size();
    std::cout << "ingested " << corpus.tasks.size() << " tasks (" << instances
              << " instances) -> " << o.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- screen ---

struct ScreenOpts {
    std::string corpus, out, log;
};

int cmd_screen(const GlobalConfig& g, const ScreenOpts& o) {
    RunScope run(g, "screen", {{"corpus", o.corpus}, {"out", o.out}, {"log", o.log}});
    std::vector<fs::path> inputs{o.corpus};
    note_cache_input(inputs, g.cache);
    run.verify(inputs);

    Corpus corpus = load_corpus(o.corpus);
    auto sampler = make_sampler(g);
    const std::vector<ScreenRecord> records = screen_corpus(corpus, *sampler, g.seed);

    save_candidates(o.out, corpus.candidate_ids);
    run.add_output(o.out);
    if (!o.log.empty()) {
        std::vector<std::string> lines;
        lines.reserve(records.size());
        for (const ScreenRecord& r : records) lines.push_back(screen_record_to_json_line(r));
        write_jsonl_lines(o.log, kScreenSchema, lines);
        run.add_output(o.log);
    }
    note_cache_output(run, g.cache);
    run.finish();

    std::cout << "screened " << corpus.tasks.size() << " tasks: " << corpus.candidate_ids.size()
              << " candidates -> " << o.out << "\n";
    return kExitOk;
}

// -------------------------------------------------------------- reformat ---

struct ReformatOpts {
    std::string corpus, candidates, out, drops;
};

int cmd_reformat(const GlobalConfig& g, const ReformatOpts& o) {
    RunScope run(g, "reformat",
                 {{"corpus", o.corpus},
                  {"candidates", o.candidates},
                  {"out", o.out},
                  {"drops", o.drops}});
    std::vector<fs::path> inputs{o.corpus, o.candidates};
    note_cache_input(inputs, g.cache);
    run.verify(inputs);

    Corpus corpus = load_corpus(o.corpus);
    corpus.candidate_ids = load_candidates(o.candidates);
    auto sampler = make_sampler(g);
    const ReformatResult result = reformat_corpus(corpus, *sampler, g.seed);

    save_questions(o.out, result.questions);
    run.add_output(o.out);
    if (!o.drops.empty()) {
        std::vector<std::string> lines;
        lines.reserve(result.drops.size());
        for (const DropRecord& d : result.drops) lines.push_back(drop_record_to_json_line(d));
        write_jsonl_lines(o.drops, kDropSchema, lines);
        run.add_output(o.drops);
    }
    note_cache_output(run, g.cache);
    run.finish();

    std::cout << "reformatted " << corpus.candidate_ids.size() << " candidate tasks: "
              << result.questions.size() << " questions, " << result.drops.size()
              << " dropped -> " << o.out << "\n";
    return kExitOk;
}

// -------------------------------------------------------------- rollouts ---

struct RolloutsOpts {
    std::string questions, out, rollouts_out;
    int n = 8;
    double temperature = 0.7;
    int max_new_tokens = 4096;
};

int cmd_rollouts(const GlobalConfig& g, const RolloutsOpts& o) {
    RunScope run(g, "rollouts",
                 {{"questions", o.questions},
                  {"out", o.out},
                  {"rollouts", o.rollouts_out},
                  {"n", o.n},
                  {"temperature", o.temperature},
                  {"max_new_tokens", o.max_new_tokens}});
    std::vector<fs::path> inputs{o.questions};
    note_cache_input(inputs, g.cache);
    run.verify(inputs);

    const std::vector<VerifiableQuestion> questions = load_questions(o.questions);
    auto sampler = make_sampler(g);
    SamplingConfig config = default_rollout_config(g.seed);
    config.num_samples = o.n;
    config.temperature = o.temperature;
    config.max_new_tokens = o.max_new_tokens;
    const WinRateResult result = measure_win_rates(questions, *sampler, config);

    save_win_rates(o.out, result.records);
    run.add_output(o.out);
    if (!o.rollouts_out.empty()) {
        save_rollouts(o.rollouts_out, result.rollouts);
        run.add_output(o.rollouts_out);
    }
    note_cache_output(run, g.cache);
    run.finish();

    double mean = 0.0;
    for (const WinRateRecord& r : result.records) mean += r.win_rate();
    if (!result.records.empty()) mean /= static_cast<double>(result.records.size());
    std::cout << "measured win rates for " << result.records.size() << " questions (n=" << o.n
              << ", mean " << fixed4(mean) << ") -> " << o.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- filter ---

struct FilterOpts {
    std::string questions, win_rates, out, removed;
};

int cmd_filter(const GlobalConfig& g, const FilterOpts& o) {
    RunScope run(g, "filter",
                 {{"questions", o.questions},
                  {"win_rates", o.win_rates},
                  {"out", o.out},
                  {"removed", o.removed}});
    run.verify({o.questions, o.win_rates});

    const std::vector<VerifiableQuestion> questions = load_questions(o.questions);
    const FilterResult result = filter_by_win_rate(questions, load_win_rates(o.win_rates));

    save_questions(o.out, result.kept);
    run.add_output(o.out);
    if (!o.removed.empty()) {
        std::vector<std::string> lines;
        for (const std::string& id : result.too_easy) {
            lines.push_back(nlohmann::ordered_json{{"question_id", id}, {"reason", "too_easy"}}.dump());
        }
        for (const std::string& id : result.too_hard) {
            lines.push_back(nlohmann::ordered_json{{"question_id", id}, {"reason", "too_hard"}}.dump());
        }
        write_jsonl_lines(o.removed, kRemovedSchema, lines);
        run.add_output(o.removed);
    }
    run.finish();

    std::cout << "kept " << result.kept.size() << " of " << questions.size() << " questions ("
              << result.too_easy.size() << " too easy, " << result.too_hard.size()
              << " too hard) -> " << o.out << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------ rank ---

struct RankOpts {
    std::string method, out, fixture, matrix, questions, win_rates, validation, matrix_out,
        dispatch;
    int n = 8;
    int k = 8;
    int steps = -1;  // -1 => budget preset
    int group_size = 8;
    int batch_size = 8;
    double lr = 0.1;
    double epsilon = 0.2;
};

int cmd_rank(const GlobalConfig& g, const RankOpts& o) {
    RunScope run(g, "rank",
                 {{"method", o.method},
                  {"out", o.out},
                  {"fixture", o.fixture},
                  {"matrix", o.matrix},
                  {"questions", o.questions},
                  {"win_rates", o.win_rates},
                  {"validation", o.validation},
                  {"matrix_out", o.matrix_out},
                  {"dispatch", o.dispatch}});

    if (o.method == "fixture") {
        if (o.fixture.empty()) throw UsageError("--method fixture needs --fixture");
        if (o.out.empty()) throw UsageError("--method fixture needs --out");
        run.verify({o.fixture});
        const PerSubtaskRankings rankings = load_ranking_fixture_csv(o.fixture);
        save_rankings_csv(o.out, rankings, {});
        run.add_output(o.out);
        run.finish();
        std::cout << "loaded ranking fixture (" << rankings.subtask_ids.size()
                  << " sub-tasks) -> " << o.out << "\n";
        return kExitOk;
    }

    if (o.method == "matrix") {
        if (o.matrix.empty()) throw UsageError("--method matrix needs --matrix");
        if (o.out.empty()) throw UsageError("--method matrix needs --out");
        run.verify({o.matrix});
        const UtilityMatrix m = load_matrix_csv(o.matrix);
        validate_matrix(m);
        const PerSubtaskRankings rankings = make_per_subtask_rankings(m);
        const Ranking macro = make_ranking(m.task_ids, m.macro());
        save_rankings_csv(o.out, rankings, macro);
        run.add_output(o.out);
        run.finish();
        std::cout << "ranked " << m.task_ids.size() << " tasks over " << m.subtask_ids.size()
                  << " sub-tasks -> " << o.out << "\n";
        return kExitOk;
    }

    if (o.method == "difficulty") {
        if (o.questions.empty() || o.win_rates.empty()) {
            throw UsageError("--method difficulty needs --questions and --win-rates");
        }
        if (o.out.empty()) throw UsageError("--method difficulty needs --out");
        run.verify({o.questions, o.win_rates});
        const std::vector<VerifiableQuestion> questions = load_questions(o.questions);
        std::map<std::string, WinRateRecord> by_id;
        for (const WinRateRecord& r : load_win_rates(o.win_rates)) by_id[r.question_id] = r;
        std::map<std::string, std::vector<WinRateRecord>> per_task;
        for (const VerifiableQuestion& q : questions) {
            auto it = by_id.find(q.question_id);
            if (it == by_id.end()) {
                throw std::runtime_error("no win-rate record for " + q.question_id);
            }
            per_task[q.source_task_id].push_back(it->second);
        }
        std::vector<std::string> task_ids;
        std::vector<double> scores;
        for (const auto& [task_id, records] : per_task) {
            task_ids.push_back(task_id);
            scores.push_back(utility_difficulty(records));
        }
        const Ranking macro = make_ranking(task_ids, scores);
        save_rankings_csv(o.out, PerSubtaskRankings{}, macro);
        run.add_output(o.out);
        run.finish();
        std::cout << "ranked " << task_ids.size() << " tasks by mean win rate -> " << o.out
                  << "\n";
        return kExitOk;
    }

    if (o.method == "trained-eval") {
        if (o.questions.empty()) throw UsageError("--method trained-eval needs --questions");
        GrpoConfig base_cfg;
        base_cfg.epsilon = o.epsilon;
        base_cfg.group_size = o.group_size;
        base_cfg.learning_rate = o.lr;
        base_cfg.steps = o.steps >= 0 ? o.steps : g.budget.steps;
        base_cfg.batch_size = o.batch_size;
        validate_grpo_config(base_cfg);

        if (!o.dispatch.empty()) {
            // Farm the per-task training runs out instead of toy-training here.
            run.verify({o.questions});
            const auto pools = pools_by_task(load_questions(o.questions));
            fs::create_directories(o.dispatch);
            for (const auto& [task_id, dataset] : pools) {
                const fs::path data = fs::path(o.dispatch) / (task_id + ".data.jsonl");
                save_questions(data.string(), dataset);
                GrpoConfig cfg = base_cfg;
                cfg.seed = derive_seed(g.seed, "rank:" + task_id);
                const fs::path job = fs::path(o.dispatch) / (task_id + ".job.json");
                write_training_job_manifest(job, task_id, data.string(), sha256_file(data),
                                            grpo_config_json(cfg).dump());
                run.add_output(data);
                run.add_output(job);
            }
            run.finish();
            std::cout << "wrote " << pools.size() << " training-job manifests under "
                      << o.dispatch << "\n";
            return kExitOk;
        }

        if (o.validation.empty()) throw UsageError("--method trained-eval needs --validation");
        if (o.out.empty()) throw UsageError("--method trained-eval needs --out");
        run.verify({o.questions, o.validation});
        const auto pools = pools_by_task(load_questions(o.questions));
        const BenchmarkSplit split =
            load_benchmark_split(o.validation, fs::path(o.validation).stem().string());

        UtilityMatrix m;
        for (const Subtask& s : split.subtasks) m.subtask_ids.push_back(s.subtask_id);
        for (const auto& [task_id, dataset] : pools) {
            GrpoConfig cfg = base_cfg;
            cfg.seed = derive_seed(g.seed, "rank:" + task_id);
            m.task_ids.push_back(task_id);
            m.scores.push_back(utility_trained_eval(dataset, split, cfg, o.n, o.k));
        }
        validate_matrix(m);

        if (!o.matrix_out.empty()) {
            save_matrix_csv(o.matrix_out, m);
            run.add_output(o.matrix_out);
        }
        const PerSubtaskRankings rankings = make_per_subtask_rankings(m);
        const Ranking macro = make_ranking(m.task_ids, m.macro());
        save_rankings_csv(o.out, rankings, macro);
        run.add_output(o.out);
        run.finish();
        std::cout << "toy-trained and ranked " << m.task_ids.size() << " tasks against "
                  << m.subtask_ids.size() << " validation sub-tasks -> " << o.out << "\n";
        return kExitOk;
    }

    throw UsageError("unknown rank method '" + o.method +
                     "' (expected fixture, matrix, difficulty, or trained-eval)");
}

// ------------------------------------------------------------------- mix ---

struct MixOpts {
    std::string rankings, strategy, pool, out, manifest;
    int n_top = 1;
    int size = -1;  // -1 => budget preset
    bool include_interventions = false;
};

int cmd_mix(const GlobalConfig& g, const MixOpts& o) {
    const int target_size = o.size >= 0 ? o.size : g.budget.prompts;
    const fs::path manifest_path =
        o.manifest.empty() ? fs::path(o.out).replace_extension(".manifest.json")
                           : fs::path(o.manifest);
    RunScope run(g, "mix",
                 {{"rankings", o.rankings},
                  {"strategy", o.strategy},
                  {"n_top", o.n_top},
                  {"pool", o.pool},
                  {"size", target_size},
                  {"out", o.out},
                  {"manifest", manifest_path.string()},
                  {"include_interventions", o.include_interventions}});
    run.verify({o.rankings, o.pool});

    MixStrategy strategy;
    try {
        strategy = mix_strategy_from_string(o.strategy);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }

    Ranking macro;
    const PerSubtaskRankings rankings = load_rankings_csv(o.rankings, &macro);
    MixtureSpec spec;
    if (strategy == MixStrategy::macro) {
        if (macro.empty()) {
            throw UsageError("rankings file " + o.rankings +
                             " has no macro rows; macro mixing needs a macro ranking");
        }
        spec = macro_mix(macro, o.n_top);
    } else {
        spec = micro_mix(rankings, o.n_top);
    }

    const auto pools = pools_by_task(load_questions(o.pool));
    const MixtureDataset dataset =
        materialize(spec, pools, target_size, g.seed, o.include_interventions);

    save_questions(o.out, dataset.prompts);
    run.add_output(o.out);
    save_mixture_manifest(manifest_path, dataset.manifest);
    run.add_output(manifest_path);
    run.finish();

    std::cout << to_string(strategy) << " top-" << o.n_top << " selected "
              << spec.selected_task_ids.size() << " tasks; materialized "
              << dataset.manifest.actual_size << " of " << target_size << " prompts -> " << o.out
              << "\n";
    if (!dataset.manifest.shortfall_task_ids.empty()) {
        std::cout << "note: " << dataset.manifest.shortfall_task_ids.size()
                  << " pools ran dry (see manifest)\n";
    }
    return kExitOk;
}

// ------------------------------------------------------------- intervene ---

struct InterveneOpts {
    std::string questions, kind, out, log, win_rates_out;
    int n = 8;
};

int cmd_intervene(const GlobalConfig& g, const InterveneOpts& o) {
    RunScope run(g, "intervene",
                 {{"questions", o.questions},
                  {"kind", o.kind},
                  {"out", o.out},
                  {"log", o.log},
                  {"win_rates", o.win_rates_out},
                  {"n", o.n}});
    std::vector<fs::path> inputs{o.questions};
    note_cache_input(inputs, g.cache);
    run.verify(inputs);

    InterventionKind kind;
    try {
        kind = intervention_kind_from_string(o.kind);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }

    const std::vector<VerifiableQuestion> base = load_questions(o.questions);
    auto sampler = make_sampler(g);
    SamplingConfig rollout_config = default_rollout_config(g.seed);
    rollout_config.num_samples = o.n;
    const IntervenedDataset dataset =
        build_intervened_dataset(base, kind, *sampler, rollout_config, g.seed);

    save_questions(o.out, dataset.combined);
    run.add_output(o.out);
    if (!o.log.empty()) {
        std::vector<std::string> lines;
        lines.reserve(dataset.records.size());
        for (const InterventionRecord& r : dataset.records) {
            lines.push_back(intervention_record_to_json_line(r));
        }
        write_jsonl_lines(o.log, kInterventionLogSchema, lines);
        run.add_output(o.log);
    }
    if (!o.win_rates_out.empty()) {
        save_win_rates(o.win_rates_out, dataset.transformed_win_rates);
        run.add_output(o.win_rates_out);
    }
    note_cache_output(run, g.cache);
    run.finish();

    std::size_t accepted = 0;
    for (const InterventionRecord& r : dataset.records) accepted += r.accepted ? 1 : 0;
    std::cout << to_string(kind) << ": accepted " << accepted << " of " << dataset.records.size()
              << " transformations; combined dataset has " << dataset.combined.size()
              << " prompts -> " << o.out << "\n";
    return kExitOk;
}

// ------------------------------------------------------------- train-toy ---

struct TrainToyOpts {
    std::string questions, out, metrics, init;
    int steps = -1;  // -1 => budget preset
    int group_size = 8;
    int batch_size = 8;
    double lr = 0.1;
    double epsilon = 0.2;
    double kl = 0.0;
    CLI::Option* kl_o = nullptr;
};

int cmd_train_toy(const GlobalConfig& g, const TrainToyOpts& o) {
    if (o.kl_o != nullptr && o.kl_o->count() > 0) {
        throw UsageError("--kl is not implemented: the surrogate objective carries no KL term");
    }
    GrpoConfig cfg;
    cfg.epsilon = o.epsilon;
    cfg.group_size = o.group_size;
    cfg.learning_rate = o.lr;
    cfg.steps = o.steps >= 0 ? o.steps : g.budget.steps;
    cfg.batch_size = o.batch_size;
    cfg.seed = g.seed;
    validate_grpo_config(cfg);

    RunScope run(g, "train-toy",
                 {{"questions", o.questions},
                  {"out", o.out},
                  {"metrics", o.metrics},
                  {"init", o.init},
                  {"grpo", grpo_config_json(cfg)}});
    std::vector<fs::path> inputs{o.questions};
    if (!o.init.empty()) inputs.push_back(o.init);
    run.verify(inputs);

    const std::vector<VerifiableQuestion> questions = load_questions(o.questions);
    ToyPolicy init;
    if (o.init.empty()) {
        std::vector<std::string> contexts;
        contexts.reserve(questions.size());
        for (const VerifiableQuestion& q : questions) contexts.push_back(q.question_id);
        init = ToyPolicy::uniform(std::move(contexts), alphabet_for_questions(questions));
    } else {
        init = load_policy(o.init);
    }

    const double reward_before = expected_reward(init, questions);
    const TrainResult result = train(init, questions, cfg);
    const double reward_after = expected_reward(result.policy, questions);

    save_policy(o.out, result.policy);
    run.add_output(o.out);
    if (!o.metrics.empty()) {
        save_metrics_csv(o.metrics, result.metrics);
        run.add_output(o.metrics);
    }
    run.finish();

    std::cout << "trained " << cfg.steps << " steps on " << questions.size()
              << " prompts: expected reward " << fixed4(reward_before) << " -> "
              << fixed4(reward_after) << " -> " << o.out << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------ eval ---

struct EvalOpts {
    std::string questions, out, rollouts_out, policy;
    int n = 8;
    std::vector<int> ks;
    CLI::Option* k_o = nullptr;
};

int cmd_eval(const GlobalConfig& g, const EvalOpts& o) {
    std::vector<int> ks = o.ks;
    if (o.k_o == nullptr || o.k_o->count() == 0) {
        ks = o.n >= 2 ? std::vector<int>{1, o.n} : std::vector<int>{1};
    }
    RunScope run(g, "eval",
                 {{"questions", o.questions},
                  {"out", o.out},
                  {"rollouts", o.rollouts_out},
                  {"policy", o.policy},
                  {"n", o.n},
                  {"k", ks}});
    std::vector<fs::path> inputs{o.questions};
    if (!o.policy.empty()) inputs.push_back(o.policy);
    if (o.policy.empty()) note_cache_input(inputs, g.cache);
    run.verify(inputs);

    const BenchmarkSplit split =
        load_benchmark_split(o.questions, fs::path(o.questions).stem().string());
    std::shared_ptr<Sampler> sampler;
    if (!o.policy.empty()) {
        std::vector<VerifiableQuestion> all_questions;
        for (const Subtask& s : split.subtasks) {
            all_questions.insert(all_questions.end(), s.questions.begin(), s.questions.end());
        }
        sampler = std::make_shared<ToyPolicySampler>(load_policy(o.policy), all_questions);
    } else {
        sampler = make_sampler(g);
    }

    const SamplingConfig base = default_rollout_config(g.seed);
    const EvalResult result = evaluate(*sampler, split, o.n, ks, base);

    save_report_csv(o.out, result.report);
    run.add_output(o.out);
    if (!o.rollouts_out.empty()) {
        save_rollouts(o.rollouts_out, result.rollouts);
        run.add_output(o.rollouts_out);
    }
    if (o.policy.empty()) note_cache_output(run, g.cache);
    run.finish();

    std::cout << "evaluated " << split.subtasks.size() << " sub-tasks (n=" << o.n << ")";
    for (std::size_t j = 0; j < ks.size(); ++j) {
        std::cout << (j == 0 ? ": " : ", ") << "macro pass@" << ks[j] << " = "
                  << fixed4(result.report.macro[j]);
    }
    std::cout << " -> " << o.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- report ---

struct ReportOpts {
    std::string questions, validation, win_rates, matrix, out, correlations;
};

int cmd_report(const GlobalConfig& g, const ReportOpts& o) {
    RunScope run(g, "report",
                 {{"questions", o.questions},
                  {"validation", o.validation},
                  {"win_rates", o.win_rates},
                  {"matrix", o.matrix},
                  {"out", o.out},
                  {"correlations", o.correlations}});
    std::vector<fs::path> inputs{o.questions, o.validation};
    if (!o.win_rates.empty()) inputs.push_back(o.win_rates);
    if (!o.matrix.empty()) inputs.push_back(o.matrix);
    note_cache_input(inputs, g.embed_cache);
    run.verify(inputs);

    const auto pools = pools_by_task(load_questions(o.questions));
    const BenchmarkSplit split =
        load_benchmark_split(o.validation, fs::path(o.validation).stem().string());
    std::vector<std::string> validation_texts;
    for (const Subtask& s : split.subtasks) {
        for (const VerifiableQuestion& q : s.questions) validation_texts.push_back(q.question);
    }

    std::map<std::string, WinRateRecord> win_rates_by_id;
    const bool have_difficulty = !o.win_rates.empty();
    if (have_difficulty) {
        for (const WinRateRecord& r : load_win_rates(o.win_rates)) {
            win_rates_by_id[r.question_id] = r;
        }
    }
    std::map<std::string, double> trained_by_task;
    const bool have_trained = !o.matrix.empty();
    if (have_trained) {
        const UtilityMatrix m = load_matrix_csv(o.matrix);
        const std::vector<double> macro = m.macro();
        for (std::size_t i = 0; i < m.task_ids.size(); ++i) trained_by_task[m.task_ids[i]] = macro[i];
    }

    auto embedder = make_embedder(g);
    std::vector<std::string> task_ids;
    std::vector<double> lexical, semantic, difficulty, trained;
    for (const auto& [task_id, questions] : pools) {
        std::vector<std::string> texts;
        texts.reserve(questions.size());
        for (const VerifiableQuestion& q : questions) texts.push_back(q.question);
        task_ids.push_back(task_id);
        lexical.push_back(utility_lexical(texts, validation_texts, g.seed));
        semantic.push_back(utility_semantic(texts, validation_texts, *embedder, g.seed));
        if (have_difficulty) {
            std::vector<WinRateRecord> records;
            for (const VerifiableQuestion& q : questions) {
                auto it = win_rates_by_id.find(q.question_id);
                if (it == win_rates_by_id.end()) {
                    throw std::runtime_error("no win-rate record for " + q.question_id);
                }
                records.push_back(it->second);
            }
            difficulty.push_back(utility_difficulty(records));
        }
        if (have_trained) {
            auto it = trained_by_task.find(task_id);
            if (it == trained_by_task.end()) {
                throw std::runtime_error("matrix " + o.matrix + " has no row for " + task_id);
            }
            trained.push_back(it->second);
        }
    }

    std::ostringstream csv;
    csv << "task_id,lexical,semantic";
    if (have_difficulty) csv << ",difficulty";
    if (have_trained) csv << ",trained";
    csv << "\n";
    for (std::size_t i = 0; i < task_ids.size(); ++i) {
        csv << task_ids[i] << "," << format_double(lexical[i]) << "," << format_double(semantic[i]);
        if (have_difficulty) csv << "," << format_double(difficulty[i]);
        if (have_trained) csv << "," << format_double(trained[i]);
        csv << "\n";
    }
    write_text_file(o.out, csv.str());
    run.add_output(o.out);

    struct Column {
        std::string name;
        const std::vector<double>* values;
    };
    std::vector<Column> columns{{"lexical", &lexical}, {"semantic", &semantic}};
    if (have_difficulty) columns.push_back({"difficulty", &difficulty});
    if (have_trained) columns.push_back({"trained", &trained});

    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < columns.size(); ++a) {
        for (std::size_t b = a + 1; b < columns.size(); ++b) {
            nlohmann::ordered_json row{{"a", columns[a].name}, {"b", columns[b].name}};
            std::string text;
            try {
                const double p = pearson(*columns[a].values, *columns[b].values);
                const double s = spearman(*columns[a].values, *columns[b].values);
                row["pearson"] = p;
                row["spearman"] = s;
                text = "pearson " + fixed4(p) + ", spearman " + fixed4(s);
            } catch (const std::exception&) {
                row["pearson"] = nullptr;
                row["spearman"] = nullptr;
                text = "undefined";
            }
            pairs.push_back(std::move(row));
            std::cout << "correlation(" << columns[a].name << ", " << columns[b].name
                      << "): " << text << "\n";
        }
    }
    if (!o.correlations.empty()) {
        nlohmann::ordered_json doc{{"schema", kCorrelationSchema}, {"pairs", std::move(pairs)}};
        write_text_file(o.correlations, doc.dump(2) + "\n");
        run.add_output(o.correlations);
    }
    note_cache_output(run, g.embed_cache);
    run.finish();

    std::cout << "reported utilities for " << task_ids.size() << " tasks -> " << o.out << "\n";
    return kExitOk;
}

// ----------------------------------------------------------------- grade ---

struct GradeOpts {
    std::string completions, questions, out;
};

int cmd_grade(const GlobalConfig& g, const GradeOpts& o) {
    RunScope run(g, "grade",
                 {{"completions", o.completions}, {"questions", o.questions}, {"out", o.out}});
    run.verify({o.completions, o.questions});

    std::map<std::string, VerifiableQuestion> by_id;
    for (const VerifiableQuestion& q : load_questions(o.questions)) by_id[q.question_id] = q;

    const auto kind_name = [](AnswerKind k) {
        switch (k) {
            case AnswerKind::letter: return "letter";
            case AnswerKind::literal: return "literal";
            case AnswerKind::missing: return "missing";
        }
        return "missing";
    };

    std::vector<std::string> lines;
    long correct = 0;
    long total = 0;
    for (const std::string& line : read_jsonl_lines(o.completions, kCompletionSchema)) {
        const auto j = nlohmann::json::parse(line);
        const std::string id = j.at("question_id").get<std::string>();
        const std::string completion = j.at("completion").get<std::string>();
        auto it = by_id.find(id);
        if (it == by_id.end()) throw std::runtime_error("unknown question_id " + id);
        const ExtractedAnswer answer = extract_answer(completion);
        const Reward reward = grade(answer, it->second);
        correct += reward.value;
        ++total;
        lines.push_back(nlohmann::ordered_json{{"question_id", id},
                                               {"reward", reward.value},
                                               {"answer_kind", kind_name(answer.kind)},
                                               {"canonical", answer.canonical}}
                            .dump());
    }

    if (!o.out.empty()) {
        write_jsonl_lines(o.out, kRewardSchema, lines);
        run.add_output(o.out);
    } else {
        for (const std::string& line : lines) std::cout << line << "\n";
    }
    run.finish();

    std::cout << "graded " << total << " completions: " << correct << " correct\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"deterministic data-curation pipeline for RL with verifiable rewards",
                 "rlvrkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "rlvrkit 0.1.0");

    GlobalFlags flags;
    add_global_flags(app, flags);
    GlobalConfig g;

    IngestOpts ingest;
    auto* ingest_sub = app.add_subcommand("ingest", "read task files into a corpus file");
    ingest_sub->add_option("--tasks", ingest.tasks, "task JSON file or directory")
        ->required()
        ->check(CLI::ExistingPath);
    ingest_sub->add_option("--out", ingest.out, "corpus output file")->required();

    ScreenOpts screen;
    auto* screen_sub = app.add_subcommand("screen", "ask the endpoint which tasks suit RL training");
    screen_sub->add_option("--corpus", screen.corpus, "corpus file")
        ->required()
        ->check(CLI::ExistingFile);
    screen_sub->add_option("--out", screen.out, "candidate task-id output file")->required();
    screen_sub->add_option("--log", screen.log, "per-task screening replies (optional)");

    ReformatOpts reformat;
    auto* reformat_sub =
        app.add_subcommand("reformat", "rewrite candidate instances into verifiable questions");
    reformat_sub->add_option("--corpus", reformat.corpus, "corpus file")
        ->required()
        ->check(CLI::ExistingFile);
    reformat_sub->add_option("--candidates", reformat.candidates, "candidate task-id file")
        ->required()
        ->check(CLI::ExistingFile);
    reformat_sub->add_option("--out", reformat.out, "question output file")->required();
    reformat_sub->add_option("--drops", reformat.drops, "drop log (optional)");

    RolloutsOpts rollouts;
    auto* rollouts_sub = app.add_subcommand("rollouts", "sample completions and measure win rates");
    rollouts_sub->add_option("--questions", rollouts.questions, "question file")
        ->required()
        ->check(CLI::ExistingFile);
    rollouts_sub->add_option("--out", rollouts.out, "win-rate output file")->required();
    rollouts_sub->add_option("--rollouts", rollouts.rollouts_out,
                             "raw completion output file (optional)");
    rollouts_sub->add_option("--n", rollouts.n, "samples per question (default 8)")
        ->check(CLI::PositiveNumber);
    rollouts_sub->add_option("--temperature", rollouts.temperature, "sampling temperature");
    rollouts_sub->add_option("--max-new-tokens", rollouts.max_new_tokens, "generation budget")
        ->check(CLI::PositiveNumber);

    FilterOpts filter;
    auto* filter_sub =
        app.add_subcommand("filter", "keep questions with strictly mixed win rates");
    filter_sub->add_option("--questions", filter.questions, "question file")
        ->required()
        ->check(CLI::ExistingFile);
    filter_sub->add_option("--win-rates", filter.win_rates, "win-rate file")
        ->required()
        ->check(CLI::ExistingFile);
    filter_sub->add_option("--out", filter.out, "kept-question output file")->required();
    filter_sub->add_option("--removed", filter.removed, "removed-question log (optional)");

    RankOpts rank;
    auto* rank_sub = app.add_subcommand("rank", "score and rank tasks by estimated utility");
    rank_sub->add_option("--method", rank.method, "fixture | matrix | difficulty | trained-eval")
        ->required();
    rank_sub->add_option("--out", rank.out, "rankings CSV output");
    rank_sub->add_option("--fixture", rank.fixture, "per-sub-task ranking fixture CSV")
        ->check(CLI::ExistingFile);
    rank_sub->add_option("--matrix", rank.matrix, "task × sub-task utility matrix CSV")
        ->check(CLI::ExistingFile);
    rank_sub->add_option("--questions", rank.questions, "question pool file")
        ->check(CLI::ExistingFile);
    rank_sub->add_option("--win-rates", rank.win_rates, "win-rate file (difficulty method)")
        ->check(CLI::ExistingFile);
    rank_sub->add_option("--validation", rank.validation, "validation split question file")
        ->check(CLI::ExistingFile);
    rank_sub->add_option("--matrix-out", rank.matrix_out,
                         "write the trained-eval utility matrix (optional)");
    rank_sub->add_option("--dispatch", rank.dispatch,
                         "write per-task training-job manifests here instead of toy-training");
    rank_sub->add_option("--n", rank.n, "eval samples per question (default 8)")
        ->check(CLI::PositiveNumber);
    rank_sub->add_option("--k", rank.k, "pass@k cutoff (default 8)")->check(CLI::PositiveNumber);
    rank_sub->add_option("--steps", rank.steps, "toy-training steps (default: budget preset)")
        ->check(CLI::NonNegativeNumber);
    rank_sub->add_option("--group-size", rank.group_size, "rollout group size G (default 8)");
    rank_sub->add_option("--batch-size", rank.batch_size, "questions per step (default 8)");
    rank_sub->add_option("--lr", rank.lr, "learning rate (default 0.1)");
    rank_sub->add_option("--epsilon", rank.epsilon, "clip width (default 0.2)");

    MixOpts mix;
    auto* mix_sub = app.add_subcommand("mix", "select top tasks and materialize a prompt mixture");
    mix_sub->add_option("--rankings", mix.rankings, "rankings CSV (from rank)")
        ->required()
        ->check(CLI::ExistingFile);
    mix_sub->add_option("--strategy", mix.strategy, "macro | micro")->required();
    mix_sub->add_option("--n-top", mix.n_top, "tasks per ranking to keep")
        ->required()
        ->check(CLI::PositiveNumber);
    mix_sub->add_option("--pool", mix.pool, "question pool file")
        ->required()
        ->check(CLI::ExistingFile);
    mix_sub->add_option("--size", mix.size, "prompt budget (default: budget preset)")
        ->check(CLI::PositiveNumber);
    mix_sub->add_option("--out", mix.out, "mixture question output file")->required();
    mix_sub->add_option("--manifest", mix.manifest,
                        "mixture manifest output (default: <out>.manifest.json)");
    mix_sub->add_flag("--include-interventions", mix.include_interventions,
                      "let transformed questions into the pools");

    InterveneOpts intervene;
    auto* intervene_sub =
        app.add_subcommand("intervene", "transform questions and re-filter the results");
    intervene_sub->add_option("--questions", intervene.questions, "base question file")
        ->required()
        ->check(CLI::ExistingFile);
    intervene_sub->add_option("--kind", intervene.kind, "transformation kind")->required();
    intervene_sub->add_option("--out", intervene.out, "combined dataset output file")->required();
    intervene_sub->add_option("--log", intervene.log, "per-question outcome log (optional)");
    intervene_sub->add_option("--win-rates", intervene.win_rates_out,
                              "transformed-question win rates (optional)");
    intervene_sub->add_option("--n", intervene.n, "samples per transformed question (default 8)")
        ->check(CLI::PositiveNumber);

    TrainToyOpts train_toy;
    auto* train_toy_sub =
        app.add_subcommand("train-toy", "policy-gradient training of the tabular toy policy");
    train_toy_sub->add_option("--questions", train_toy.questions, "training question file")
        ->required()
        ->check(CLI::ExistingFile);
    train_toy_sub->add_option("--out", train_toy.out, "trained policy output file")->required();
    train_toy_sub->add_option("--metrics", train_toy.metrics, "per-step metrics CSV (optional)");
    train_toy_sub->add_option("--init", train_toy.init, "initial policy file (optional)")
        ->check(CLI::ExistingFile);
    train_toy_sub->add_option("--steps", train_toy.steps, "steps (default: budget preset)")
        ->check(CLI::NonNegativeNumber);
    train_toy_sub->add_option("--group-size", train_toy.group_size, "group size G (default 8)");
    train_toy_sub->add_option("--batch-size", train_toy.batch_size,
                              "questions per step (default 8)");
    train_toy_sub->add_option("--lr", train_toy.lr, "learning rate (default 0.1)");
    train_toy_sub->add_option("--epsilon", train_toy.epsilon, "clip width (default 0.2)");
    train_toy.kl_o = train_toy_sub->add_option("--kl", train_toy.kl, "KL penalty (unsupported)");

    EvalOpts eval;
    auto* eval_sub = app.add_subcommand("eval", "pass@k evaluation over a benchmark split");
    eval_sub->add_option("--questions", eval.questions, "split question file (with sub-task ids)")
        ->required()
        ->check(CLI::ExistingFile);
    eval_sub->add_option("--out", eval.out, "report CSV output")->required();
    eval_sub->add_option("--rollouts", eval.rollouts_out, "raw completion output (optional)");
    eval_sub->add_option("--policy", eval.policy, "toy policy to evaluate instead of the endpoint")
        ->check(CLI::ExistingFile);
    eval_sub->add_option("--n", eval.n, "samples per question (default 8)")
        ->check(CLI::PositiveNumber);
    eval.k_o = eval_sub->add_option("--k", eval.ks, "pass@k cutoffs (default 1 and n)")
                   ->check(CLI::PositiveNumber);

    ReportOpts report;
    auto* report_sub =
        app.add_subcommand("report", "per-task utility columns and their correlations");
    report_sub->add_option("--questions", report.questions, "question pool file")
        ->required()
        ->check(CLI::ExistingFile);
    report_sub->add_option("--validation", report.validation, "validation split question file")
        ->required()
        ->check(CLI::ExistingFile);
    report_sub->add_option("--win-rates", report.win_rates, "win-rate file (optional)")
        ->check(CLI::ExistingFile);
    report_sub->add_option("--matrix", report.matrix, "trained-eval matrix CSV (optional)")
        ->check(CLI::ExistingFile);
    report_sub->add_option("--out", report.out, "per-task utility CSV output")->required();
    report_sub->add_option("--correlations", report.correlations,
                           "correlation JSON output (optional)");

    GradeOpts grade;
    auto* grade_sub = app.add_subcommand("grade", "grade recorded completions against questions");
    grade_sub->add_option("--completions", grade.completions, "completion file")
        ->required()
        ->check(CLI::ExistingFile);
    grade_sub->add_option("--questions", grade.questions, "question file")
        ->required()
        ->check(CLI::ExistingFile);
    grade_sub->add_option("--out", grade.out, "reward output file (default: stdout)");

    // Global flags may appear before or after the subcommand name.
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        sub->fallthrough();
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
        g = resolve_global(flags);

        if (ingest_sub->parsed()) return cmd_ingest(g, ingest);
        if (screen_sub->parsed()) return cmd_screen(g, screen);
        if (reformat_sub->parsed()) return cmd_reformat(g, reformat);
        if (rollouts_sub->parsed()) return cmd_rollouts(g, rollouts);
        if (filter_sub->parsed()) return cmd_filter(g, filter);
        if (rank_sub->parsed()) return cmd_rank(g, rank);
        if (mix_sub->parsed()) return cmd_mix(g, mix);
        if (intervene_sub->parsed()) return cmd_intervene(g, intervene);
        if (train_toy_sub->parsed()) return cmd_train_toy(g, train_toy);
        if (eval_sub->parsed()) return cmd_eval(g, eval);
        if (report_sub->parsed()) return cmd_report(g, report);
        if (grade_sub->parsed()) return cmd_grade(g, grade);
        throw UsageError("a subcommand is required");
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DigestMismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDigestMismatch;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace rlvr
