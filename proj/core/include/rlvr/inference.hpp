#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace rlvr {

struct SamplingConfig {
    double temperature = 0.7;
    int max_new_tokens = 4096;
    int num_samples = 8;  // G
    std::uint64_t seed = 0;
};

// Rollout defaults: temperature 0.7, generation length 4096, 8 samples.
SamplingConfig default_rollout_config(std::uint64_t seed = 0);

void validate_sampling_config(const SamplingConfig& c);

class Sampler {
  public:
    virtual ~Sampler() = default;
    // Returns exactly config.num_samples completions.
    virtual std::vector<std::string> sample(const std::string& prompt,
                                            const SamplingConfig& config) = 0;
};

// Cache key fields: prompt hash, temperature, max_new_tokens, seed, sample
// index. num_samples is deliberately not keyed, so replaying a prefix of a
// recorded group hits.
struct CacheKey {
    std::string prompt_hash;
    double temperature = 0.0;
    int max_new_tokens = 0;
    std::uint64_t seed = 0;
    int sample_index = 0;

    std::string to_string() const;
};

CacheKey make_cache_key(const std::string& prompt, const SamplingConfig& config, int sample_index);

// Append-only keyed store persisted as a line-delimited file. A key is
// written at most once; lookups return the stored string verbatim.
class ResponseCache {
  public:
    // In-memory only.
    ResponseCache() = default;
    // Loads existing rows; subsequent inserts append to the file.
    explicit ResponseCache(const std::filesystem::path& file);

    std::optional<std::string> lookup(const CacheKey& key) const;
    // No-op if the key is already present.
    void insert(const CacheKey& key, const std::string& reply);
    std::size_t size() const;

  private:
    mutable std::mutex mu_;
    std::unordered_map<std::string, std::string> rows_;
    std::filesystem::path file_;  // empty => in-memory
};

inline constexpr const char* kCacheSchema = "cache/v1";

enum class CacheMode { live, replay };

std::string to_string(CacheMode m);
CacheMode cache_mode_from_string(const std::string& s);

// Routes every request through the cache. Live mode contacts the source only
// for keys the cache lacks; replay mode treats a miss as a hard error (it
// signals a nondeterministic pipeline).
class CachingSampler final : public Sampler {
  public:
    CachingSampler(std::shared_ptr<Sampler> source, std::shared_ptr<ResponseCache> cache,
                   CacheMode mode);

    std::vector<std::string> sample(const std::string& prompt,
                                    const SamplingConfig& config) override;

    ResponseCache& cache() { return *cache_; }

  private:
    std::shared_ptr<Sampler> source_;
    std::shared_ptr<ResponseCache> cache_;
    CacheMode mode_;
};

struct RetryPolicy {
    int attempts = 3;
    int backoff_base_ms = 250;  // doubles per attempt
};

// Live endpoint speaking the single-POST wire protocol:
//   request  {"prompt":..., "temperature":..., "max_tokens":..., "n":..., "seed":...}
//   response {"completions": ["...", ...]}
// Bearer token from RLVRKIT_API_KEY is attached when present.
class HttpSampler final : public Sampler {
  public:
    explicit HttpSampler(std::string url, RetryPolicy retry = {});
    std::vector<std::string> sample(const std::string& prompt,
                                    const SamplingConfig& config) override;

  private:
    std::string url_;
    RetryPolicy retry_;
};

class Embedder {
  public:
    virtual ~Embedder() = default;
    virtual std::vector<double> embed(const std::string& text) = 0;
};

inline constexpr const char* kEmbedCacheSchema = "embed_cache/v1";

// Record/replay wrapper for embeddings, keyed by text hash.
class CachingEmbedder final : public Embedder {
  public:
    CachingEmbedder(std::shared_ptr<Embedder> source, CacheMode mode,
                    const std::filesystem::path& file = {});
    std::vector<double> embed(const std::string& text) override;

  private:
    std::shared_ptr<Embedder> source_;
    CacheMode mode_;
    std::mutex mu_;
    std::unordered_map<std::string, std::vector<double>> rows_;
    std::filesystem::path file_;
};

// POST {"text": ...} -> {"embedding": [...]}.
class HttpEmbedder final : public Embedder {
  public:
    explicit HttpEmbedder(std::string url, RetryPolicy retry = {});
    std::vector<double> embed(const std::string& text) override;

  private:
    std::string url_;
    RetryPolicy retry_;
};

}  // namespace rlvr
