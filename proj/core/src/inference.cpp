#include "rlvr/inference.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "rlvr/hash.hpp"
#include "rlvr/jsonl.hpp"

#define CPPHTTPLIB_THREAD_POOL_COUNT 4
#include "httplib.h"

namespace rlvr {

SamplingConfig default_rollout_config(std::uint64_t seed) {
    return SamplingConfig{0.7, 4096, 8, seed};
}

void validate_sampling_config(const SamplingConfig& c) {
    if (c.temperature < 0) throw std::runtime_error("temperature must be >= 0");
    if (c.max_new_tokens <= 0) throw std::runtime_error("max_new_tokens must be positive");
    if (c.num_samples < 1) throw std::runtime_error("num_samples must be >= 1");
}

std::string CacheKey::to_string() const {
    return prompt_hash + "|t=" + format_double(temperature) + "|m=" +
           std::to_string(max_new_tokens) + "|s=" + std::to_string(seed) + "|i=" +
           std::to_string(sample_index);
}

CacheKey make_cache_key(const std::string& prompt, const SamplingConfig& config,
                        int sample_index) {
    return CacheKey{to_hex(fnv1a64(prompt)), config.temperature, config.max_new_tokens,
                    config.seed, sample_index};
}

ResponseCache::ResponseCache(const std::filesystem::path& file) : file_(file) {
    if (std::filesystem::exists(file)) {
        for (const auto& line : read_jsonl_lines(file, kCacheSchema)) {
            const auto j = nlohmann::json::parse(line);
            CacheKey key{j.at("prompt_hash").get<std::string>(), j.at("temperature").get<double>(),
                         j.at("max_new_tokens").get<int>(), j.at("seed").get<std::uint64_t>(),
                         j.at("sample_index").get<int>()};
            rows_.emplace(key.to_string(), j.at("reply").get<std::string>());
        }
    } else {
        if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
        std::ofstream out(file, std::ios::trunc | std::ios::binary);
        if (!out) throw std::runtime_error("cannot create cache file " + file.string());
        out << nlohmann::json{{"schema", kCacheSchema}}.dump() << '\n';
    }
}

std::optional<std::string> ResponseCache::lookup(const CacheKey& key) const {
    std::lock_guard lock(mu_);
    auto it = rows_.find(key.to_string());
    if (it == rows_.end()) return std::nullopt;
    return it->second;
}

void ResponseCache::insert(const CacheKey& key, const std::string& reply) {
    std::lock_guard lock(mu_);
    auto [it, inserted] = rows_.emplace(key.to_string(), reply);
    if (!inserted) return;
    if (file_.empty()) return;
    std::ofstream out(file_, std::ios::app | std::ios::binary);
    if (!out) throw std::runtime_error("cannot append to cache file " + file_.string());
    nlohmann::ordered_json j;
    j["prompt_hash"] = key.prompt_hash;
    j["temperature"] = key.temperature;
    j["max_new_tokens"] = key.max_new_tokens;
    j["seed"] = key.seed;
    j["sample_index"] = key.sample_index;
    j["reply"] = reply;
    out << j.dump() << '\n';
}

std::size_t ResponseCache::size() const {
    std::lock_guard lock(mu_);
    return rows_.size();
}

std::string to_string(CacheMode m) { return m == CacheMode::live ? "live" : "replay"; }

CacheMode cache_mode_from_string(const std::string& s) {
    if (s == "live") return CacheMode::live;
    if (s == "replay") return CacheMode::replay;
    throw std::runtime_error("cache mode must be 'live' or 'replay', got '" + s + "'");
}

CachingSampler::CachingSampler(std::shared_ptr<Sampler> source,
                               std::shared_ptr<ResponseCache> cache, CacheMode mode)
    : source_(std::move(source)), cache_(std::move(cache)), mode_(mode) {
    if (!cache_) throw std::runtime_error("CachingSampler needs a cache");
    if (mode_ == CacheMode::live && !source_) {
        throw std::runtime_error("live mode needs a source sampler");
    }
}

std::vector<std::string> CachingSampler::sample(const std::string& prompt,
                                                const SamplingConfig& config) {
    validate_sampling_config(config);
    std::vector<std::string> out(static_cast<std::size_t>(config.num_samples));
    std::vector<int> missing;
    for (int i = 0; i < config.num_samples; ++i) {
        auto hit = cache_->lookup(make_cache_key(prompt, config, i));
        if (hit) {
            out[static_cast<std::size_t>(i)] = *hit;
        } else {
            missing.push_back(i);
        }
    }
    if (missing.empty()) return out;
    if (mode_ == CacheMode::replay) {
        const auto key = make_cache_key(prompt, config, missing.front());
        throw std::runtime_error("replay cache miss: prompt_hash=" + key.prompt_hash +
                                 " sample_index=" + std::to_string(missing.front()));
    }
    const auto fresh = source_->sample(prompt, config);
    if (static_cast<int>(fresh.size()) != config.num_samples) {
        throw std::runtime_error("source returned " + std::to_string(fresh.size()) +
                                 " completions, expected " + std::to_string(config.num_samples));
    }
    for (int i : missing) {
        cache_->insert(make_cache_key(prompt, config, i), fresh[static_cast<std::size_t>(i)]);
        // Read back through the cache so record and replay agree verbatim.
        out[static_cast<std::size_t>(i)] =
            *cache_->lookup(make_cache_key(prompt, config, i));
    }
    return out;
}

namespace {

struct ParsedUrl {
    std::string base;  // scheme://host:port
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw std::runtime_error("bad endpoint url: " + url);
    auto path_begin = url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) return {url, "/"};
    return {url.substr(0, path_begin), url.substr(path_begin)};
}

nlohmann::json post_json_with_retries(const std::string& url, const nlohmann::json& body,
                                      const RetryPolicy& retry) {
    const auto parsed = split_url(url);
    httplib::Client client(parsed.base);
    client.set_read_timeout(600, 0);
    httplib::Headers headers;
    if (const char* token = std::getenv("RLVRKIT_API_KEY")) {
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    std::string last_error;
    for (int attempt = 0; attempt < retry.attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(retry.backoff_base_ms << (attempt - 1)));
        }
        auto res = client.Post(parsed.path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "transport error " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        try {
            return nlohmann::json::parse(res->body);
        } catch (const std::exception& e) {
            last_error = std::string("bad response body: ") + e.what();
        }
    }
    throw std::runtime_error("endpoint " + url + " failed after " +
                             std::to_string(retry.attempts) + " attempts: " + last_error);
}

}  // namespace

HttpSampler::HttpSampler(std::string url, RetryPolicy retry)
    : url_(std::move(url)), retry_(retry) {}

std::vector<std::string> HttpSampler::sample(const std::string& prompt,
                                             const SamplingConfig& config) {
    validate_sampling_config(config);
    nlohmann::json body{{"prompt", prompt},
                        {"temperature", config.temperature},
                        {"max_tokens", config.max_new_tokens},
                        {"n", config.num_samples},
                        {"seed", config.seed}};
    const auto reply = post_json_with_retries(url_, body, retry_);
    if (!reply.contains("completions") || !reply["completions"].is_array()) {
        throw std::runtime_error("endpoint reply lacks completions array");
    }
    auto completions = reply["completions"].get<std::vector<std::string>>();
    if (static_cast<int>(completions.size()) < config.num_samples) {
        throw std::runtime_error("endpoint returned " + std::to_string(completions.size()) +
                                 " completions, need " + std::to_string(config.num_samples));
    }
    completions.resize(static_cast<std::size_t>(config.num_samples));
    return completions;
}

CachingEmbedder::CachingEmbedder(std::shared_ptr<Embedder> source, CacheMode mode,
                                 const std::filesystem::path& file)
    : source_(std::move(source)), mode_(mode), file_(file) {
    if (mode_ == CacheMode::live && !source_) {
        throw std::runtime_error("live mode needs a source embedder");
    }
    if (!file_.empty() && std::filesystem::exists(file_)) {
        for (const auto& line : read_jsonl_lines(file_, kEmbedCacheSchema)) {
            const auto j = nlohmann::json::parse(line);
            rows_.emplace(j.at("text_hash").get<std::string>(),
                          j.at("embedding").get<std::vector<double>>());
        }
    } else if (!file_.empty()) {
        if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
        std::ofstream out(file_, std::ios::trunc | std::ios::binary);
        out << nlohmann::json{{"schema", kEmbedCacheSchema}}.dump() << '\n';
    }
}

std::vector<double> CachingEmbedder::embed(const std::string& text) {
    const std::string key = to_hex(fnv1a64(text));
    {
        std::lock_guard lock(mu_);
        auto it = rows_.find(key);
        if (it != rows_.end()) return it->second;
    }
    if (mode_ == CacheMode::replay) {
        throw std::runtime_error("replay embedding cache miss: text_hash=" + key);
    }
    auto vec = source_->embed(text);
    std::lock_guard lock(mu_);
    auto [it, inserted] = rows_.emplace(key, std::move(vec));
    if (inserted && !file_.empty()) {
        std::ofstream out(file_, std::ios::app | std::ios::binary);
        nlohmann::ordered_json j;
        j["text_hash"] = key;
        j["embedding"] = it->second;
        out << j.dump() << '\n';
    }
    return it->second;
}

HttpEmbedder::HttpEmbedder(std::string url, RetryPolicy retry)
    : url_(std::move(url)), retry_(retry) {}

std::vector<double> HttpEmbedder::embed(const std::string& text) {
    const auto reply = post_json_with_retries(url_, nlohmann::json{{"text", text}}, retry_);
    if (!reply.contains("embedding") || !reply["embedding"].is_array()) {
        throw std::runtime_error("embedder reply lacks embedding array");
    }
    return reply["embedding"].get<std::vector<double>>();
}

}  // namespace rlvr
