#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlvr {

// Raised when a consumed artifact no longer matches the digest some earlier
// run recorded for it. The CLI maps this to its own exit code.
struct DigestMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hex SHA-256 of the file's bytes.
std::string sha256_file(const std::filesystem::path& file);
std::string sha256_bytes(const std::string& bytes);

// Current wall-clock time as "YYYY-MM-DDTHH:MM:SSZ".
std::string iso8601_utc_now();

struct RunManifest {
    std::string run_id;
    std::string subcommand;
    std::string config_json;  // fully resolved configuration, serialized
    std::uint64_t seed = 0;
    std::string cache_mode;
    std::map<std::string, std::string> inputs;   // path -> digest
    std::map<std::string, std::string> outputs;  // path -> digest
    std::string started_at;   // ISO 8601 UTC
    std::string finished_at;
};

inline constexpr const char* kRunManifestSchema = "run_manifest/v1";

// Manifests are append-only: each run writes a fresh numbered file
// ("run-000123-<subcommand>.json") under the runs directory.
std::string next_run_id(const std::filesystem::path& runs_dir, const std::string& subcommand);
void save_run_manifest(const std::filesystem::path& runs_dir, const RunManifest& m);
RunManifest load_run_manifest(const std::filesystem::path& file);
// All manifests in the directory, oldest first.
std::vector<RunManifest> load_run_manifests(const std::filesystem::path& runs_dir);

// Digest-chain check: for each input path produced by some earlier run (it
// appears among that run's outputs), the latest recorded digest must match
// the bytes on disk now. Throws DigestMismatchError naming the file. Returns
// the path -> digest map for the inputs.
std::map<std::string, std::string> verify_inputs(const std::filesystem::path& runs_dir,
                                                 const std::vector<std::filesystem::path>& inputs);

// Request record for farming a real training run out to external
// infrastructure; nothing in this repository executes it.
void write_training_job_manifest(const std::filesystem::path& file, const std::string& task_id,
                                 const std::string& dataset_path,
                                 const std::string& dataset_digest,
                                 const std::string& config_json);

}  // namespace rlvr
