#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "disent/errors.hpp"

namespace disent::csvio {

// Shortest exact decimal for a double; infinities print as "inf"/"-inf".
inline std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// 32-bit export precision.
inline std::string fmt_f32(double v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%.9g", double(float(v)));
    return buf;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline Table read(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open CSV: " + path);
    Table t;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            t.header = split_line(line);
            first = false;
        } else {
            t.rows.push_back(split_line(line));
        }
    }
    return t;
}

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);  // binary: keep \n exact for byte comparisons
    if (!f) throw FormatError("cannot write file: " + path);
    f << content;
}

}  // namespace disent::csvio
