#include "rlvr/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rlvr/jsonl.hpp"

namespace rlvr {

BenchmarkSplit load_benchmark_split(const std::filesystem::path& file, const std::string& name,
                                    SplitKind kind) {
    BenchmarkSplit split;
    split.name = name;
    split.kind = kind;
    std::map<std::string, std::size_t> index;
    for (auto& q : load_questions(file.string())) {
        if (q.subtask_id.empty()) {
            throw std::runtime_error("question " + q.question_id + " has no subtask_id");
        }
        auto [it, inserted] = index.emplace(q.subtask_id, split.subtasks.size());
        if (inserted) split.subtasks.push_back({q.subtask_id, {}});
        split.subtasks[it->second].questions.push_back(std::move(q));
    }
    if (split.subtasks.empty()) throw std::runtime_error("empty benchmark split " + name);
    return split;
}

double pass_at_k(int n, int c, int k) {
    if (n < 1 || c < 0 || c > n) throw std::runtime_error("bad (n, c) sample counts");
    if (k < 1 || k > n) throw std::runtime_error("k must satisfy 1 <= k <= n");
    if (n - c < k) return 1.0;
    double miss_all = 1.0;
    for (int j = 0; j < k; ++j) {
        miss_all *= static_cast<double>(n - c - j) / static_cast<double>(n - j);
    }
    return 1.0 - miss_all;
}

PassAtKReport summarize_outcomes(const std::vector<QuestionOutcome>& outcomes,
                                 const std::vector<std::string>& subtask_order,
                                 const std::vector<int>& ks) {
    if (ks.empty()) throw std::runtime_error("no k values requested");
    PassAtKReport report;
    report.ks = ks;
    report.subtask_ids = subtask_order;
    report.outcomes = outcomes;

    std::map<std::string, std::vector<const QuestionOutcome*>> grouped;
    for (const auto& o : outcomes) grouped[o.subtask_id].push_back(&o);

    report.per_subtask.assign(subtask_order.size(), std::vector<double>(ks.size(), 0.0));
    report.macro.assign(ks.size(), 0.0);
    for (std::size_t s = 0; s < subtask_order.size(); ++s) {
        auto it = grouped.find(subtask_order[s]);
        if (it == grouped.end() || it->second.empty()) {
            throw std::runtime_error("subtask " + subtask_order[s] + " has no outcomes");
        }
        for (std::size_t j = 0; j < ks.size(); ++j) {
            double sum = 0.0;
            for (const auto* o : it->second) sum += pass_at_k(o->n, o->c, ks[j]);
            report.per_subtask[s][j] = sum / static_cast<double>(it->second.size());
            report.macro[j] += report.per_subtask[s][j];
        }
    }
    for (double& m : report.macro) m /= static_cast<double>(subtask_order.size());
    return report;
}

EvalResult evaluate(Sampler& sampler, const BenchmarkSplit& split, int n,
                    const std::vector<int>& ks, const SamplingConfig& base) {
    if (ks.empty()) throw std::runtime_error("no k values requested");
    for (int k : ks) {
        if (k > n) {
            throw std::runtime_error("k=" + std::to_string(k) + " exceeds n=" +
                                     std::to_string(n));
        }
    }
    SamplingConfig config = base;
    config.num_samples = n;

    EvalResult result;
    std::vector<QuestionOutcome> outcomes;
    std::vector<std::string> order;
    for (const auto& sub : split.subtasks) {
        if (sub.questions.empty()) throw std::runtime_error("empty subtask " + sub.subtask_id);
        order.push_back(sub.subtask_id);
        for (const auto& q : sub.questions) {
            RolloutRecord rec = rollout_question(q, sampler, config);
            QuestionOutcome o{q.question_id, sub.subtask_id, static_cast<int>(rec.rewards.size()),
                              0};
            for (int r : rec.rewards) o.c += r;
            outcomes.push_back(o);
            result.rollouts.push_back(std::move(rec));
        }
    }
    result.report = summarize_outcomes(outcomes, order, ks);
    return result;
}

void save_report_csv(const std::filesystem::path& file, const PassAtKReport& report) {
    std::ostringstream out;
    out << "subtask_id,k,pass_at_k\n";
    for (std::size_t s = 0; s < report.subtask_ids.size(); ++s) {
        for (std::size_t j = 0; j < report.ks.size(); ++j) {
            out << report.subtask_ids[s] << ',' << report.ks[j] << ','
                << format_double(report.per_subtask[s][j]) << '\n';
        }
    }
    for (std::size_t j = 0; j < report.ks.size(); ++j) {
        out << "macro," << report.ks[j] << ',' << format_double(report.macro[j]) << '\n';
    }
    write_text_file(file, out.str());
}

PassAtKReport load_report_csv(const std::filesystem::path& file) {
    std::istringstream in(read_text_file(file));
    std::string line;
    if (!std::getline(in, line) || line != "subtask_id,k,pass_at_k") {
        throw std::runtime_error("report " + file.string() + " has the wrong header");
    }
    PassAtKReport report;
    std::map<std::string, std::map<int, double>> cells;
    std::vector<std::string> order;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw std::runtime_error("bad report row: " + line);
        }
        const std::string subtask = line.substr(0, c1);
        const int k = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
        const double value = std::stod(line.substr(c2 + 1));
        if (cells.find(subtask) == cells.end() && subtask != "macro") order.push_back(subtask);
        cells[subtask][k] = value;
    }
    if (cells.find("macro") == cells.end()) {
        throw std::runtime_error("report " + file.string() + " has no macro rows");
    }
    for (const auto& [k, v] : cells["macro"]) {
        report.ks.push_back(k);
        report.macro.push_back(v);
    }
    report.subtask_ids = order;
    report.per_subtask.assign(order.size(), std::vector<double>(report.ks.size(), 0.0));
    for (std::size_t s = 0; s < order.size(); ++s) {
        for (std::size_t j = 0; j < report.ks.size(); ++j) {
            const auto& row = cells.at(order[s]);
            auto it = row.find(report.ks[j]);
            if (it == row.end()) {
                throw std::runtime_error("report row missing k for " + order[s]);
            }
            report.per_subtask[s][j] = it->second;
        }
    }
    return report;
}

namespace {

double macro_at_k(const PassAtKReport& report, int k) {
    for (std::size_t j = 0; j < report.ks.size(); ++j) {
        if (report.ks[j] == k) return report.macro[j];
    }
    throw std::runtime_error("report lacks k=" + std::to_string(k));
}

double population_sigma(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(xs.size()));
}

}  // namespace

DiscriminabilityReport discriminability(const std::vector<PassAtKReport>& reports, int k_low,
                                        int k_high) {
    if (reports.size() < 2) throw std::runtime_error("discriminability needs >= 2 models");
    std::vector<double> low, high;
    for (const auto& r : reports) {
        low.push_back(macro_at_k(r, k_low));
        high.push_back(macro_at_k(r, k_high));
    }
    DiscriminabilityReport out;
    out.k_low = k_low;
    out.k_high = k_high;
    out.sigma_low = population_sigma(low);
    out.sigma_high = population_sigma(high);
    out.ratio_defined = out.sigma_low > 0.0;
    out.ratio = out.ratio_defined ? out.sigma_high / out.sigma_low
                                  : std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace rlvr
