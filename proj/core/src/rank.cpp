#include "rlvr/rank.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rlvr/hash.hpp"
#include "rlvr/jsonl.hpp"

namespace rlvr {

std::vector<double> UtilityMatrix::macro() const {
    std::vector<double> out;
    out.reserve(scores.size());
    for (const auto& row : scores) {
        double sum = 0.0;
        for (double v : row) sum += v;
        out.push_back(sum / static_cast<double>(row.size()));
    }
    return out;
}

void validate_matrix(const UtilityMatrix& m) {
    if (m.task_ids.empty() || m.subtask_ids.empty()) {
        throw std::runtime_error("utility matrix must be nonempty");
    }
    if (m.scores.size() != m.task_ids.size()) {
        throw std::runtime_error("utility matrix row count mismatch");
    }
    for (const auto& row : m.scores) {
        if (row.size() != m.subtask_ids.size()) {
            throw std::runtime_error("utility matrix column count mismatch");
        }
        for (double v : row) {
            if (std::isnan(v)) throw std::runtime_error("utility matrix holds NaN");
        }
    }
    std::set<std::string> ids(m.task_ids.begin(), m.task_ids.end());
    if (ids.size() != m.task_ids.size()) {
        throw std::runtime_error("utility matrix has duplicate task ids");
    }
}

void save_matrix_csv(const std::filesystem::path& file, const UtilityMatrix& m) {
    validate_matrix(m);
    std::ostringstream out;
    out << "task_id";
    for (const auto& s : m.subtask_ids) out << ',' << s;
    out << '\n';
    for (std::size_t t = 0; t < m.task_ids.size(); ++t) {
        out << m.task_ids[t];
        for (double v : m.scores[t]) out << ',' << format_double(v);
        out << '\n';
    }
    write_text_file(file, out.str());
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

}  // namespace

UtilityMatrix load_matrix_csv(const std::filesystem::path& file) {
    std::istringstream in(read_text_file(file));
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty matrix file " + file.string());
    auto header = split_csv_row(line);
    if (header.size() < 2 || header[0] != "task_id") {
        throw std::runtime_error("matrix file " + file.string() + " has a bad header");
    }
    UtilityMatrix m;
    m.subtask_ids.assign(header.begin() + 1, header.end());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_row(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error("matrix row width mismatch: " + line);
        }
        m.task_ids.push_back(cells[0]);
        std::vector<double> row;
        for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(std::stod(cells[i]));
        m.scores.push_back(std::move(row));
    }
    validate_matrix(m);
    return m;
}

Ranking make_ranking(const std::vector<std::string>& task_ids,
                     const std::vector<double>& scores) {
    if (task_ids.size() != scores.size()) {
        throw std::runtime_error("ranking inputs disagree in length");
    }
    for (double v : scores) {
        if (std::isnan(v)) throw std::runtime_error("cannot rank NaN scores");
    }
    std::vector<std::size_t> order(task_ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return task_ids[a] < task_ids[b];
    });
    Ranking out;
    out.reserve(order.size());
    for (auto i : order) out.push_back(task_ids[i]);
    return out;
}

PerSubtaskRankings make_per_subtask_rankings(const UtilityMatrix& m) {
    validate_matrix(m);
    PerSubtaskRankings out;
    out.subtask_ids = m.subtask_ids;
    for (std::size_t s = 0; s < m.subtask_ids.size(); ++s) {
        std::vector<double> column;
        column.reserve(m.task_ids.size());
        for (const auto& row : m.scores) column.push_back(row[s]);
        out.rankings.push_back(make_ranking(m.task_ids, column));
    }
    return out;
}

PerSubtaskRankings load_ranking_fixture_csv(const std::filesystem::path& file) {
    std::istringstream in(read_text_file(file));
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty fixture " + file.string());
    auto header = split_csv_row(line);
    if (header.size() < 3 || header[0] != "subtask_id" || header[1] != "rank" ||
        header[2] != "task_id") {
        throw std::runtime_error("fixture " + file.string() + " has a bad header");
    }
    PerSubtaskRankings out;
    std::map<std::string, std::size_t> index;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_row(line);
        if (cells.size() < 3) throw std::runtime_error("bad fixture row: " + line);
        const std::string& subtask = cells[0];
        const int rank = std::stoi(cells[1]);
        auto [it, inserted] = index.emplace(subtask, out.subtask_ids.size());
        if (inserted) {
            out.subtask_ids.push_back(subtask);
            out.rankings.emplace_back();
        }
        auto& ranking = out.rankings[it->second];
        if (rank != static_cast<int>(ranking.size()) + 1) {
            throw std::runtime_error("fixture ranks for " + subtask +
                                     " are not contiguous from 1");
        }
        ranking.push_back(cells[2]);
    }
    if (out.subtask_ids.empty()) throw std::runtime_error("fixture has no rows");
    return out;
}

void save_rankings_csv(const std::filesystem::path& file, const PerSubtaskRankings& rankings,
                       const Ranking& macro) {
    std::ostringstream out;
    out << "subtask_id,rank,task_id\n";
    for (std::size_t s = 0; s < rankings.subtask_ids.size(); ++s) {
        for (std::size_t r = 0; r < rankings.rankings[s].size(); ++r) {
            out << rankings.subtask_ids[s] << ',' << r + 1 << ',' << rankings.rankings[s][r]
                << '\n';
        }
    }
    for (std::size_t r = 0; r < macro.size(); ++r) {
        out << "__macro__," << r + 1 << ',' << macro[r] << '\n';
    }
    write_text_file(file, out.str());
}

PerSubtaskRankings load_rankings_csv(const std::filesystem::path& file, Ranking* macro_out) {
    PerSubtaskRankings all = load_ranking_fixture_csv(file);
    PerSubtaskRankings out;
    if (macro_out) macro_out->clear();
    for (std::size_t s = 0; s < all.subtask_ids.size(); ++s) {
        if (all.subtask_ids[s] == "__macro__") {
            if (macro_out) *macro_out = all.rankings[s];
        } else {
            out.subtask_ids.push_back(all.subtask_ids[s]);
            out.rankings.push_back(all.rankings[s]);
        }
    }
    return out;
}

namespace {

std::vector<std::string> seeded_sample(const std::vector<std::string>& items, int cap,
                                       std::uint64_t seed) {
    if (static_cast<int>(items.size()) <= cap) return items;
    std::vector<std::string> pool = items;
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates: only the first `cap` slots are needed.
    for (int i = 0; i < cap; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
    }
    pool.resize(static_cast<std::size_t>(cap));
    return pool;
}

std::set<std::string> token_set(const std::string& text) {
    std::set<std::string> tokens;
    std::string cur;
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else if (!cur.empty()) {
            tokens.insert(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.insert(cur);
    return tokens;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& t : a) inter += b.count(t);
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

double utility_lexical(const std::vector<std::string>& task_questions,
                       const std::vector<std::string>& validation_questions,
                       std::uint64_t seed, int sample_cap) {
    if (task_questions.empty() || validation_questions.empty()) {
        throw std::runtime_error("similarity needs nonempty question sets");
    }
    const auto left = seeded_sample(task_questions, sample_cap, derive_seed(seed, "lex:task"));
    const auto right =
        seeded_sample(validation_questions, sample_cap, derive_seed(seed, "lex:val"));
    std::vector<std::set<std::string>> right_tokens;
    right_tokens.reserve(right.size());
    for (const auto& r : right) right_tokens.push_back(token_set(r));
    double total = 0.0;
    for (const auto& l : left) {
        const auto lt = token_set(l);
        for (const auto& rt : right_tokens) total += jaccard(lt, rt);
    }
    return total / (static_cast<double>(left.size()) * static_cast<double>(right.size()));
}

double utility_semantic(const std::vector<std::string>& task_questions,
                        const std::vector<std::string>& validation_questions,
                        Embedder& embedder, std::uint64_t seed, int sample_cap,
                        SimilarityDiagnostics* diagnostics) {
    if (task_questions.empty() || validation_questions.empty()) {
        throw std::runtime_error("similarity needs nonempty question sets");
    }
    const auto left = seeded_sample(task_questions, sample_cap, derive_seed(seed, "sem:task"));
    const auto right =
        seeded_sample(validation_questions, sample_cap, derive_seed(seed, "sem:val"));
    auto embed_all = [&](const std::vector<std::string>& texts) {
        std::vector<std::vector<double>> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(embedder.embed(t));
        return out;
    };
    const auto lv = embed_all(left);
    const auto rv = embed_all(right);
    auto norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };
    SimilarityDiagnostics diag;
    double total = 0.0;
    for (const auto& a : lv) {
        const double na = norm(a);
        for (const auto& b : rv) {
            const double nb = norm(b);
            if (na == 0.0 || nb == 0.0 || a.size() != b.size()) {
                ++diag.pairs_skipped;
                continue;
            }
            double dot = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
            total += std::max(0.0, dot / (na * nb));
            ++diag.pairs_used;
        }
    }
    if (diagnostics) *diagnostics = diag;
    if (diag.pairs_used == 0) throw std::runtime_error("every embedding pair was degenerate");
    return total / static_cast<double>(diag.pairs_used);
}

double utility_difficulty(const std::vector<WinRateRecord>& records) {
    if (records.empty()) throw std::runtime_error("difficulty needs at least one record");
    double total = 0.0;
    for (const auto& r : records) {
        if (r.total < 1) throw std::runtime_error("win-rate record with zero samples");
        total += r.win_rate();
    }
    return total / static_cast<double>(records.size());
}

std::vector<double> utility_trained_eval(const std::vector<VerifiableQuestion>& task_dataset,
                                         const BenchmarkSplit& validation,
                                         const GrpoConfig& config, int n, int k) {
    if (task_dataset.empty()) throw std::runtime_error("empty task dataset");
    std::vector<VerifiableQuestion> all = task_dataset;
    std::set<std::string> training_ids;
    for (const auto& q : task_dataset) training_ids.insert(q.question_id);
    for (const auto& sub : validation.subtasks) {
        for (const auto& q : sub.questions) {
            if (!training_ids.count(q.question_id)) all.push_back(q);
        }
    }
    ToyPolicy policy = ToyPolicy::uniform(
        [&] {
            std::vector<std::string> ids;
            ids.reserve(all.size());
            for (const auto& q : all) ids.push_back(q.question_id);
            return ids;
        }(),
        alphabet_for_questions(all));

    auto trained = train(policy, task_dataset, config);
    ToyPolicySampler sampler(std::move(trained.policy), all);
    SamplingConfig eval_config = default_rollout_config(derive_seed(config.seed, "trained-eval"));
    const auto result = evaluate(sampler, validation, n, {k}, eval_config);
    std::vector<double> row;
    row.reserve(result.report.per_subtask.size());
    for (const auto& values : result.report.per_subtask) row.push_back(values.front());
    return row;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw std::runtime_error("correlation needs two equal-length series of >= 2 points");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw std::runtime_error("correlation of a constant series");
    return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    return pearson(average_ranks(xs), average_ranks(ys));
}

}  // namespace rlvr
