// io.hpp — CSV parsing/writing helpers.
#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dsgld/errors.hpp"

namespace dsgld {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::vector<std::vector<std::string>> read_csv_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    return rows;
}

inline bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto [p, ec] = std::from_chars(b, e, out);
    while (p < e && (*p == ' ' || *p == '\t')) ++p;
    return ec == std::errc() && p == e;
}

// Full-precision double formatting so exported files replay byte-identically.
inline std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace dsgld
