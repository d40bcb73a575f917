#pragma once

// Flat key=value config files and machine-readable result tables.
// Tables are written atomically (temp file + rename), with the fully
// resolved configuration recorded in a '#' comment block (CSV) or a "meta"
// object (JSON) so every output is reproducible from its own header.
// Doubles are printed with 17 significant digits and round-trip exactly.

#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace cavsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

// Flat INI-style text: "key = value" lines, '#' comments, blank lines
// allowed. No sections, no nesting.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        out[key] = value;
    }
    return out;
}

inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

// One table cell: a double or a short text tag.
struct Cell {
    bool is_number = true;
    double number = 0.0;
    std::string text;

    Cell(double x) : is_number(true), number(x) {}  // NOLINT: implicit by design
    Cell(const char* s) : is_number(false), text(s) {}
    Cell(std::string s) : is_number(false), text(std::move(s)) {}
};

struct Table {
    std::vector<std::pair<std::string, std::string>> meta;  // resolved config, in order
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

namespace detail {

inline void atomic_write(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open output file: " + tmp);
        out << contents;
        if (!out) {
            std::remove(tmp.c_str());
            throw IoError("write failed: " + tmp);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("rename failed: " + path);
    }
}

}  // namespace detail

inline std::string table_to_csv(const Table& t) {
    std::string s;
    for (const auto& [k, v] : t.meta) s += "# " + k + " = " + v + "\n";
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
        if (j) s += ",";
        s += t.columns[j];
    }
    s += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) s += ",";
            s += row[j].is_number ? format_double(row[j].number) : row[j].text;
        }
        s += "\n";
    }
    return s;
}

inline std::string table_to_json(const Table& t) {
    nlohmann::ordered_json j;
    j["meta"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.meta) j["meta"][k] = v;
    j["columns"] = t.columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json jr = nlohmann::ordered_json::array();
        for (const auto& c : row) {
            if (c.is_number)
                jr.push_back(c.number);
            else
                jr.push_back(c.text);
        }
        j["rows"].push_back(std::move(jr));
    }
    return j.dump(2) + "\n";
}

inline void write_table(const std::string& path, const Table& t, const std::string& format) {
    if (format == "csv")
        detail::atomic_write(path, table_to_csv(t));
    else if (format == "json")
        detail::atomic_write(path, table_to_json(t));
    else
        throw ConfigError("unknown output format: " + format + " (expected csv or json)");
}

}  // namespace cavsim
