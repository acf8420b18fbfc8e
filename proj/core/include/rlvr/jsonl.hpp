#pragma once

// Line-delimited dataset files. Every file starts with a one-line schema
// header {"schema": "<name>"} followed by one JSON record per line.

#include <filesystem>
#include <string>
#include <vector>

namespace rlvr {

// Raw record lines, already validated against the schema header.
std::vector<std::string> read_jsonl_lines(const std::filesystem::path& file,
                                          const std::string& expected_schema);

void write_jsonl_lines(const std::filesystem::path& file, const std::string& schema,
                       const std::vector<std::string>& record_lines);

std::string read_text_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, const std::string& content);

// Formats a double with enough digits to round-trip exactly (%.17g).
std::string format_double(double v);

}  // namespace rlvr
