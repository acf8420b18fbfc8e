#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rlvr/inference.hpp"
#include "rlvr/question.hpp"

namespace testfx {

// Unique scratch directory, removed recursively on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<unsigned> counter{0};
        std::random_device rd;
        path = std::filesystem::temp_directory_path() /
               ("rlvrkit-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }

    std::string file(const std::string& name) const { return (path / name).string(); }
};

// Sampler driven by a lambda, for scripting exact reply sequences.
struct FnSampler final : rlvr::Sampler {
    using Fn = std::function<std::vector<std::string>(const std::string&,
                                                      const rlvr::SamplingConfig&)>;
    Fn fn;

    explicit FnSampler(Fn f) : fn(std::move(f)) {}
    std::vector<std::string> sample(const std::string& prompt,
                                    const rlvr::SamplingConfig& config) override {
        return fn(prompt, config);
    }
};

inline std::shared_ptr<FnSampler> shared_sampler(FnSampler s) {
    return std::make_shared<FnSampler>(std::move(s));
}

// Same reply in every slot, for all prompts.
inline FnSampler constant_sampler(std::string reply) {
    return FnSampler([reply = std::move(reply)](const std::string&,
                                                const rlvr::SamplingConfig& config) {
        return std::vector<std::string>(static_cast<std::size_t>(config.num_samples), reply);
    });
}

inline rlvr::VerifiableQuestion make_mcq(const std::string& id, const std::string& stem,
                                         const std::vector<std::string>& option_texts,
                                         int gold_index) {
    rlvr::VerifiableQuestion q;
    q.question_id = id;
    const auto hash_pos = id.find('#');
    q.source_task_id = hash_pos == std::string::npos ? id : id.substr(0, hash_pos);
    for (std::size_t i = 0; i < option_texts.size(); ++i) {
        q.options.push_back({std::string(1, static_cast<char>('a' + i)), option_texts[i]});
    }
    q.target = q.options.at(static_cast<std::size_t>(gold_index)).letter;
    q.answer_format = rlvr::AnswerFormat::multiple_choice;
    q.question = stem + "\n" + rlvr::render_option_block(q.options);
    return q;
}

inline rlvr::VerifiableQuestion make_exact(const std::string& id, const std::string& stem,
                                           const std::string& gold,
                                           std::vector<std::string> variants = {}) {
    rlvr::VerifiableQuestion q;
    q.question_id = id;
    const auto hash_pos = id.find('#');
    q.source_task_id = hash_pos == std::string::npos ? id : id.substr(0, hash_pos);
    q.question = stem;
    q.target = gold;
    q.target_variants = std::move(variants);
    q.answer_format = rlvr::AnswerFormat::exact_string;
    return q;
}

}  // namespace testfx
