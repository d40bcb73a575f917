#include <doctest.h>

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "cavsim/io.hpp"

using namespace cavsim;

TEST_CASE("config parsing: keys, comments, whitespace") {
    const auto cfg = parse_config_text(
        "# a comment\n"
        "omega = 1.0\n"
        "  dim=20   # trailing comment\n"
        "\n"
        "method = exact\n");
    CHECK(cfg.at("omega") == "1.0");
    CHECK(cfg.at("dim") == "20");
    CHECK(cfg.at("method") == "exact");
    CHECK(cfg.size() == 3);
}

TEST_CASE("config parsing: malformed input and missing files") {
    CHECK_THROWS_AS(parse_config_text("omega 1.0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("= 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_file("/nonexistent/cavsim.ini"), ConfigError);
}

TEST_CASE("doubles round-trip through the table format") {
    const double x = 0.1234567890123456789;
    CHECK(std::stod(format_double(x)) == x);
    CHECK(std::stod(format_double(1e-300)) == 1e-300);
}

TEST_CASE("csv output: metadata block, header, deterministic bytes") {
    Table t;
    t.meta = {{"seed", "42"}, {"omega", "1"}};
    t.columns = {"t", "value", "tag"};
    t.rows.push_back({0.0, 1.5, "pass"});
    t.rows.push_back({0.5, -2.25, "fail"});

    const std::string a = table_to_csv(t);
    const std::string b = table_to_csv(t);
    CHECK(a == b);
    CHECK(a.find("# seed = 42\n") != std::string::npos);
    CHECK(a.find("t,value,tag\n") != std::string::npos);
    CHECK(a.find("pass") != std::string::npos);
}

TEST_CASE("json output parses back with the same shape") {
    Table t;
    t.meta = {{"seed", "7"}};
    t.columns = {"x", "label"};
    t.rows.push_back({3.5, "ok"});
    const auto j = nlohmann::json::parse(table_to_json(t));
    CHECK(j["meta"]["seed"] == "7");
    CHECK(j["columns"].size() == 2);
    CHECK(j["rows"][0][0] == 3.5);
    CHECK(j["rows"][0][1] == "ok");
}

TEST_CASE("write_table lands atomically and leaves no temp file") {
    const std::string path = "test_io_out.csv";
    Table t;
    t.columns = {"a"};
    t.rows.push_back({1.0});
    write_table(path, t, "csv");
    std::ifstream in(path);
    REQUIRE(static_cast<bool>(in));
    std::string first;
    std::getline(in, first);
    CHECK(first == "a");
    std::ifstream tmp(path + ".tmp");
    CHECK_FALSE(static_cast<bool>(tmp));
    std::remove(path.c_str());

    CHECK_THROWS_AS(write_table(path, t, "yaml"), ConfigError);
    CHECK_THROWS_AS(write_table("/nonexistent-dir/x.csv", t, "csv"), IoError);
}
