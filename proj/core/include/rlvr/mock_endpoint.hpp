#pragma once

// Scripted stand-ins for the remote endpoints, for self-contained pipeline
// runs and tests. Replies are pure functions of (prompt, seed, sample index),
// so recorded runs replay byte-identically.
//
// Endpoint URLs understood by the factories:
//   mock://scripted  deterministic text endpoint (screening, reformatting,
//                    rollouts, interventions)
//   mock://embed     deterministic 16-dim hashed bag-of-words embedder
//   http(s)://…      live endpoints speaking the wire protocol

#include <memory>

#include "rlvr/inference.hpp"

namespace rlvr {

class ScriptedMockSampler final : public Sampler {
  public:
    std::vector<std::string> sample(const std::string& prompt,
                                    const SamplingConfig& config) override;
};

class HashedBagEmbedder final : public Embedder {
  public:
    std::vector<double> embed(const std::string& text) override;
};

std::shared_ptr<Sampler> make_endpoint_sampler(const std::string& url);
std::shared_ptr<Embedder> make_endpoint_embedder(const std::string& url);

}  // namespace rlvr
