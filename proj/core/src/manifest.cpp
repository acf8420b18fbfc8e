#include "rlvr/manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>

#include <openssl/evp.h>

#include "json.hpp"
#include "rlvr/jsonl.hpp"

namespace rlvr {

namespace {

std::string digest_hex(const unsigned char* digest, unsigned len) {
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

}  // namespace

std::string sha256_bytes(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr)) {
        throw std::runtime_error("sha256 failed");
    }
    return digest_hex(digest, len);
}

std::string sha256_file(const std::filesystem::path& file) {
    return sha256_bytes(read_text_file(file));
}

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string next_run_id(const std::filesystem::path& runs_dir, const std::string& subcommand) {
    std::size_t count = 0;
    if (std::filesystem::exists(runs_dir)) {
        for (const auto& entry : std::filesystem::directory_iterator(runs_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") ++count;
        }
    }
    char seq[16];
    std::snprintf(seq, sizeof seq, "%06zu", count + 1);
    return std::string("run-") + seq + "-" + subcommand;
}

void save_run_manifest(const std::filesystem::path& runs_dir, const RunManifest& m) {
    nlohmann::ordered_json j;
    j["schema"] = kRunManifestSchema;
    j["run_id"] = m.run_id;
    j["subcommand"] = m.subcommand;
    j["config"] = nlohmann::json::parse(m.config_json.empty() ? "{}" : m.config_json);
    j["seed"] = m.seed;
    j["cache_mode"] = m.cache_mode;
    j["inputs"] = m.inputs;
    j["outputs"] = m.outputs;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    write_text_file(runs_dir / (m.run_id + ".json"), j.dump(2) + "\n");
}

RunManifest load_run_manifest(const std::filesystem::path& file) {
    const auto j = nlohmann::json::parse(read_text_file(file));
    if (j.value("schema", "") != kRunManifestSchema) {
        throw std::runtime_error("manifest " + file.string() + " has the wrong schema");
    }
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    m.config_json = j.at("config").dump();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.cache_mode = j.at("cache_mode").get<std::string>();
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    return m;
}

std::vector<RunManifest> load_run_manifests(const std::filesystem::path& runs_dir) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::exists(runs_dir)) {
        for (const auto& entry : std::filesystem::directory_iterator(runs_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                files.push_back(entry.path());
            }
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<RunManifest> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(load_run_manifest(f));
    return out;
}

std::map<std::string, std::string> verify_inputs(
    const std::filesystem::path& runs_dir, const std::vector<std::filesystem::path>& inputs) {
    // Latest manifest wins for each produced path.
    std::map<std::string, std::string> produced;
    for (const auto& m : load_run_manifests(runs_dir)) {
        for (const auto& [path, digest] : m.outputs) produced[path] = digest;
    }
    std::map<std::string, std::string> digests;
    for (const auto& input : inputs) {
        const std::string key = input.string();
        const std::string now = sha256_file(input);
        auto it = produced.find(key);
        if (it != produced.end() && it->second != now) {
            throw DigestMismatchError("digest mismatch for " + key +
                                      ": recorded " + it->second + ", found " + now);
        }
        digests[key] = now;
    }
    return digests;
}

void write_training_job_manifest(const std::filesystem::path& file, const std::string& task_id,
                                 const std::string& dataset_path,
                                 const std::string& dataset_digest,
                                 const std::string& config_json) {
    nlohmann::ordered_json j;
    j["schema"] = "training_job/v1";
    j["task_id"] = task_id;
    j["dataset_path"] = dataset_path;
    j["dataset_digest"] = dataset_digest;
    j["config"] = nlohmann::json::parse(config_json.empty() ? "{}" : config_json);
    write_text_file(file, j.dump(2) + "\n");
}

}  // namespace rlvr
