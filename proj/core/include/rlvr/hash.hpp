#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rlvr {

// FNV-1a over raw bytes. Stable across platforms; used for cache keys and
// seed derivation, not for integrity (manifests use SHA-256).
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ull);

// splitmix64 finalizer; decorrelates seeds built from related inputs.
std::uint64_t mix64(std::uint64_t x);

// Per-item seed: hash(run_seed, id). Reproducible yet decorrelated sampling.
std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view id);

std::string to_hex(std::uint64_t v);

}  // namespace rlvr
