#include "rlvr/jsonl.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rlvr {

std::vector<std::string> read_jsonl_lines(const std::filesystem::path& file,
                                          const std::string& expected_schema) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string header;
    if (!std::getline(in, header)) {
        throw std::runtime_error(file.string() + ": empty file, expected schema header");
    }
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(header);
    } catch (const std::exception& e) {
        throw std::runtime_error(file.string() + ": bad schema header: " + e.what());
    }
    const std::string schema = h.value("schema", "");
    if (schema != expected_schema) {
        throw std::runtime_error(file.string() + ": schema '" + schema + "', expected '" +
                                 expected_schema + "'");
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void write_jsonl_lines(const std::filesystem::path& file, const std::string& schema,
                       const std::vector<std::string>& record_lines) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << nlohmann::json{{"schema", schema}}.dump() << '\n';
    for (const auto& l : record_lines) out << l << '\n';
    if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::string read_text_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& file, const std::string& content) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

}  // namespace rlvr
