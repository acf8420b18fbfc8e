#include "rlvr/corpus.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rlvr/hash.hpp"
#include "rlvr/jsonl.hpp"
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

std::string join_definition(const nlohmann::json& def) {
    if (def.is_string()) return def.get<std::string>();
    if (def.is_array()) {
        std::ostringstream out;
        bool first = true;
        for (const auto& part : def) {
            if (!part.is_string()) break;
            if (!first) out << '\n';
            out << part.get<std::string>();
            first = false;
        }
        if (!first) return out.str();
    }
    throw std::runtime_error("Definition must be a string or array of strings");
}

Task parse_task_file(const std::filesystem::path& file) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(file));
    } catch (const std::exception& e) {
        throw std::runtime_error("task file " + file.string() + ": " + e.what());
    }
    Task task;
    task.task_id = file.stem().string();
    if (!doc.contains("Definition")) {
        throw std::runtime_error("task file " + file.string() + " missing Definition");
    }
    task.definition = trim(join_definition(doc["Definition"]));
    if (task.definition.empty()) {
        throw std::runtime_error("task file " + file.string() + " has an empty Definition");
    }
    if (!doc.contains("Instances") || !doc["Instances"].is_array() || doc["Instances"].empty()) {
        throw std::runtime_error("task file " + file.string() + " has no Instances");
    }
    for (const auto& inst : doc["Instances"]) {
        Instance parsed;
        parsed.input = inst.at("input").get<std::string>();
        const auto& output = inst.at("output");
        if (output.is_string()) {
            parsed.outputs.push_back(output.get<std::string>());
        } else {
            for (const auto& o : output) parsed.outputs.push_back(o.get<std::string>());
        }
        if (parsed.outputs.empty()) {
            throw std::runtime_error("task file " + file.string() + " has an instance with no outputs");
        }
        for (const auto& o : parsed.outputs) {
            if (trim(o).empty()) {
                throw std::runtime_error("task file " + file.string() +
                                         " has a whitespace-only gold output");
            }
        }
        task.instances.push_back(std::move(parsed));
    }
    if (doc.contains("Categories")) {
        const auto& cat = doc["Categories"];
        if (cat.is_string()) {
            task.category = cat.get<std::string>();
        } else if (cat.is_array() && !cat.empty() && cat[0].is_string()) {
            task.category = cat[0].get<std::string>();
        }
    }
    return task;
}

}  // namespace

const Task* Corpus::find_task(const std::string& task_id) const {
    for (const auto& t : tasks) {
        if (t.task_id == task_id) return &t;
    }
    return nullptr;
}

Corpus ingest_tasks(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("task path does not exist: " + path.string());
    }
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(path)) {
        for (const auto& entry : std::filesystem::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(path);
    }
    if (files.empty()) throw std::runtime_error("no tasks found under " + path.string());

    Corpus corpus;
    std::set<std::string> seen;
    for (const auto& file : files) {
        Task task = parse_task_file(file);
        if (!seen.insert(task.task_id).second) {
            throw std::runtime_error("duplicate task_id " + task.task_id);
        }
        corpus.tasks.push_back(std::move(task));
    }
    return corpus;
}

std::string task_to_json_line(const Task& task) {
    nlohmann::ordered_json j;
    j["task_id"] = task.task_id;
    j["definition"] = task.definition;
    nlohmann::ordered_json instances = nlohmann::ordered_json::array();
    for (const Instance& inst : task.instances) {
        instances.push_back({{"input", inst.input}, {"outputs", inst.outputs}});
    }
    j["instances"] = std::move(instances);
    j["category"] = task.category;
    return j.dump();
}

Task task_from_json_line(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    Task task;
    task.task_id = j.at("task_id").get<std::string>();
    task.definition = j.at("definition").get<std::string>();
    for (const auto& inst : j.at("instances")) {
        task.instances.push_back({inst.at("input").get<std::string>(),
                                  inst.at("outputs").get<std::vector<std::string>>()});
    }
    task.category = j.value("category", std::string{});
    return task;
}

void save_corpus(const std::filesystem::path& file, const Corpus& corpus) {
    std::vector<std::string> lines;
    lines.reserve(corpus.tasks.size());
    for (const Task& task : corpus.tasks) lines.push_back(task_to_json_line(task));
    write_jsonl_lines(file, kTaskSchema, lines);
}

Corpus load_corpus(const std::filesystem::path& file) {
    Corpus corpus;
    for (const std::string& line : read_jsonl_lines(file, kTaskSchema)) {
        corpus.tasks.push_back(task_from_json_line(line));
    }
    return corpus;
}

void save_candidates(const std::filesystem::path& file, const std::vector<std::string>& task_ids) {
    std::vector<std::string> lines;
    lines.reserve(task_ids.size());
    for (const std::string& id : task_ids) {
        lines.push_back(nlohmann::ordered_json{{"task_id", id}}.dump());
    }
    write_jsonl_lines(file, kCandidateSchema, lines);
}

std::vector<std::string> load_candidates(const std::filesystem::path& file) {
    std::vector<std::string> ids;
    for (const std::string& line : read_jsonl_lines(file, kCandidateSchema)) {
        ids.push_back(nlohmann::json::parse(line).at("task_id").get<std::string>());
    }
    return ids;
}

std::string build_screening_prompt(const Task& task) {
    const Instance& example = task.instances.front();
    std::ostringstream p;
    p << "This is an instruction-following task use to train LLMs. Consider, the given task "
         "description and examples. Now assess the suitability of the task for  RL training "
         "reasoning models. Think step by step and only respond with yes/no.\n";
    p << "Task ID: " << task.task_id << "\n";
    p << "Task Description: " << task.definition << "\n";
    p << "Example Input: " << example.input << "\n";
    p << "Example Output: " << example.outputs.front();
    return p.str();
}

std::string screen_record_to_json_line(const ScreenRecord& r) {
    nlohmann::ordered_json j;
    j["task_id"] = r.task_id;
    j["suitable"] = r.suitable;
    j["ambiguous"] = r.ambiguous;
    j["reply"] = r.reply;
    return j.dump();
}

ScreenRecord screen_record_from_json_line(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    return {j.at("task_id").get<std::string>(), j.at("suitable").get<bool>(),
            j.at("ambiguous").get<bool>(), j.at("reply").get<std::string>()};
}

ScreenRecord screen_task_suitability(const Task& task, Sampler& sampler,
                                     std::uint64_t run_seed) {
    if (task.instances.empty()) {
        throw std::runtime_error("task " + task.task_id + " has no instance to screen with");
    }
    SamplingConfig cfg{0.0, 4096, 1, derive_seed(run_seed, "screen:" + task.task_id)};
    const auto replies = sampler.sample(build_screening_prompt(task), cfg);
    ScreenRecord rec;
    rec.task_id = task.task_id;
    rec.reply = replies.front();
    std::string head = trim(rec.reply);
    std::transform(head.begin(), head.end(), head.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    rec.suitable = head.rfind("yes", 0) == 0;
    rec.ambiguous = !rec.suitable && head.rfind("no", 0) != 0;
    return rec;
}

std::vector<ScreenRecord> screen_corpus(Corpus& corpus, Sampler& sampler,
                                        std::uint64_t run_seed) {
    std::vector<ScreenRecord> records;
    corpus.candidate_ids.clear();
    for (const auto& task : corpus.tasks) {
        records.push_back(screen_task_suitability(task, sampler, run_seed));
        if (records.back().suitable) corpus.candidate_ids.push_back(task.task_id);
    }
    return records;
}

std::string drop_record_to_json_line(const DropRecord& r) {
    nlohmann::ordered_json j;
    j["task_id"] = r.task_id;
    j["instance_index"] = r.instance_index;
    if (!r.question_id.empty()) j["question_id"] = r.question_id;
    j["reason"] = r.reason;
    return j.dump();
}

DropRecord drop_record_from_json_line(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    DropRecord r;
    r.task_id = j.at("task_id").get<std::string>();
    r.instance_index = j.at("instance_index").get<int>();
    if (j.contains("question_id")) r.question_id = j["question_id"].get<std::string>();
    r.reason = j.at("reason").get<std::string>();
    return r;
}

namespace {

// Builds one question from a parsed reply, or explains why it can't.
struct BuildOutcome {
    std::optional<VerifiableQuestion> question;
    std::string reason;
};

BuildOutcome build_question(const ParsedReply& reply, const Instance& instance,
                            const std::string& question_id, const std::string& task_id) {
    std::vector<std::string> golds;
    for (const auto& g : instance.outputs) {
        std::string t = g;
        auto b = t.find_first_not_of(" \t\r\n");
        auto e = t.find_last_not_of(" \t\r\n");
        t = (b == std::string::npos) ? "" : t.substr(b, e - b + 1);
        if (!t.empty() && std::find(golds.begin(), golds.end(), t) == golds.end()) {
            golds.push_back(t);
        }
    }
    auto gold_match = [&](const std::string& canonical) {
        for (const auto& g : golds) {
            if (normalize_answer(g) == canonical) return true;
        }
        return false;
    };

    VerifiableQuestion q;
    q.question_id = question_id;
    q.source_task_id = task_id;
    q.provenance = Provenance::original();

    if (!reply.options.empty()) {
        std::set<std::string> letters;
        for (const auto& opt : reply.options) {
            if (!letters.insert(opt.letter).second) return {std::nullopt, "bad options"};
            if (opt.text.empty()) return {std::nullopt, "bad options"};
        }
        const std::string canonical_target = normalize_answer(reply.target);
        const McqOption* chosen = nullptr;
        if (canonical_target.size() == 1 && letters.count(canonical_target)) {
            for (const auto& opt : reply.options) {
                if (opt.letter == canonical_target) chosen = &opt;
            }
        } else {
            for (const auto& opt : reply.options) {
                if (normalize_answer(opt.text) == canonical_target) {
                    chosen = &opt;
                    break;
                }
            }
            if (!chosen) return {std::nullopt, "target not among options"};
        }
        if (!gold_match(normalize_answer(chosen->text))) return {std::nullopt, "target drift"};
        q.answer_format = AnswerFormat::multiple_choice;
        q.options = reply.options;
        q.target = chosen->letter;
        q.question = reply.question + "\n" + render_option_block(reply.options);
    } else {
        const std::string canonical_target = normalize_answer(reply.target);
        const std::string* matched = nullptr;
        for (const auto& g : golds) {
            if (normalize_answer(g) == canonical_target) {
                matched = &g;
                break;
            }
        }
        if (!matched) return {std::nullopt, "target drift"};
        q.answer_format = AnswerFormat::exact_string;
        q.target = *matched;
        q.target_variants = golds;
        q.question = reply.question;
    }

    try {
        validate_question(q);
    } catch (const std::exception&) {
        return {std::nullopt, "bad options"};
    }
    if (!question_admits_correct_answer(q)) return {std::nullopt, "unverifiable target"};
    return {q, ""};
}

}  // namespace

ReformatResult reformat_task(const Task& task, Sampler& sampler, std::uint64_t run_seed) {
    ReformatResult result;
    for (std::size_t i = 0; i < task.instances.size(); ++i) {
        const Instance& instance = task.instances[i];
        const std::string question_id = task.task_id + "#" + std::to_string(i);
        SamplingConfig cfg{0.0, 4096, 1, derive_seed(run_seed, "reformat:" + question_id)};
        const auto prompt =
            build_reformat_prompt(task.definition, instance.input, instance.outputs);
        const auto replies = sampler.sample(prompt, cfg);
        const auto parsed = parse_fenced_reply(replies.front());
        if (!parsed.reply) {
            result.drops.push_back({task.task_id, static_cast<int>(i), question_id,
                                    "unparseable reply: " + parsed.error});
            continue;
        }
        auto outcome = build_question(*parsed.reply, instance, question_id, task.task_id);
        if (!outcome.question) {
            result.drops.push_back(
                {task.task_id, static_cast<int>(i), question_id, outcome.reason});
            continue;
        }
        result.questions.push_back(std::move(*outcome.question));
    }
    return result;
}

ReformatResult reformat_corpus(const Corpus& corpus, Sampler& sampler, std::uint64_t run_seed) {
    ReformatResult all;
    for (const auto& id : corpus.candidate_ids) {
        const Task* task = corpus.find_task(id);
        if (!task) throw std::runtime_error("candidate id " + id + " not in corpus");
        auto part = reformat_task(*task, sampler, run_seed);
        std::move(part.questions.begin(), part.questions.end(),
                  std::back_inserter(all.questions));
        std::move(part.drops.begin(), part.drops.end(), std::back_inserter(all.drops));
    }
    return all;
}

}  // namespace rlvr
