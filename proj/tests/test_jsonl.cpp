#include <stdexcept>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "rlvr/jsonl.hpp"
#include "test_support.hpp"

TEST_CASE("jsonl roundtrips records under a schema header") {
    testfx::TempDir tmp;
    const auto path = tmp.file("data.jsonl");
    const std::vector<std::string> records = {R"({"a":1})", R"({"b":"two"})"};
    rlvr::write_jsonl_lines(path, "demo/v1", records);

    CHECK(rlvr::read_jsonl_lines(path, "demo/v1") == records);

    const std::string raw = rlvr::read_text_file(path);
    CHECK(raw.substr(0, raw.find('\n')) == R"({"schema":"demo/v1"})");
    CHECK(raw.back() == '\n');
}

TEST_CASE("jsonl rejects schema mismatches and malformed headers") {
    testfx::TempDir tmp;
    const auto path = tmp.file("data.jsonl");
    rlvr::write_jsonl_lines(path, "demo/v1", {});
    CHECK_THROWS_WITH_AS(rlvr::read_jsonl_lines(path, "other/v1"),
                         doctest::Contains("schema 'demo/v1', expected 'other/v1'"),
                         std::runtime_error);

    rlvr::write_text_file(path, "not-json\n");
    CHECK_THROWS_WITH_AS(rlvr::read_jsonl_lines(path, "demo/v1"),
                         doctest::Contains("bad schema header"), std::runtime_error);

    rlvr::write_text_file(path, "");
    CHECK_THROWS_WITH_AS(rlvr::read_jsonl_lines(path, "demo/v1"),
                         doctest::Contains("empty file"), std::runtime_error);

    CHECK_THROWS_WITH_AS(rlvr::read_jsonl_lines(tmp.file("absent.jsonl"), "demo/v1"),
                         doctest::Contains("cannot open"), std::runtime_error);
}

TEST_CASE("jsonl skips blank lines and tolerates a trailing newline") {
    testfx::TempDir tmp;
    const auto path = tmp.file("data.jsonl");
    rlvr::write_text_file(path, R"({"schema":"demo/v1"})"
                                "\n{\"a\":1}\n\n{\"a\":2}\n\n");
    const auto lines = rlvr::read_jsonl_lines(path, "demo/v1");
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == R"({"a":1})");
    CHECK(lines[1] == R"({"a":2})");
}

TEST_CASE("jsonl writers create missing parent directories") {
    testfx::TempDir tmp;
    const auto nested = tmp.file("a/b/c/data.jsonl");
    rlvr::write_jsonl_lines(nested, "demo/v1", {R"({"x":1})"});
    CHECK(rlvr::read_jsonl_lines(nested, "demo/v1").size() == 1);

    const auto nested_txt = tmp.file("d/e/file.txt");
    rlvr::write_text_file(nested_txt, "hello");
    CHECK(rlvr::read_text_file(nested_txt) == "hello");
}

TEST_CASE("write_text_file truncates existing content") {
    testfx::TempDir tmp;
    const auto path = tmp.file("file.txt");
    rlvr::write_text_file(path, "a longer first version\n");
    rlvr::write_text_file(path, "short\n");
    CHECK(rlvr::read_text_file(path) == "short\n");
}

TEST_CASE("format_double round-trips doubles exactly") {
    for (double v : {0.0, 1.0, -1.0, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -2.5e-7}) {
        CAPTURE(v);
        // strtod rather than stod: stod raises out_of_range on subnormals.
        CHECK(std::strtod(rlvr::format_double(v).c_str(), nullptr) == v);
    }
    CHECK(rlvr::format_double(1.0) == "1");
    CHECK(rlvr::format_double(0.5) == "0.5");
}
