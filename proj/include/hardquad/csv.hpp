#pragma once

// CSV output: RFC-style quoting, LF line endings, numbers rendered with 17
// significant digits.  A gnuplot-ready two-column variant is available for
// each experiment's primary pair.

#include <string>
#include <vector>

#include "hardquad/config.hpp"

namespace hardquad {

inline std::string csv_escape(const std::string& field) {
    const bool needs_quote = field.find_first_of(",\"\n") != std::string::npos;
    if (!needs_quote) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) { row(std::move(header)); }

    void row(const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line += ',';
            line += csv_escape(cells[i]);
        }
        text_ += line;
        text_ += '\n';
    }

    const std::string& text() const { return text_; }

private:
    std::string text_;
};

inline std::string cell(double x) { return format_double17(x); }
inline std::string cell(int x) { return std::to_string(x); }
inline std::string cell(long long x) { return std::to_string(x); }
inline std::string cell(unsigned long long x) { return std::to_string(x); }
inline std::string cell(std::uint64_t x) { return std::to_string(x); }
inline std::string cell(bool b) { return b ? "true" : "false"; }

}  // namespace hardquad
