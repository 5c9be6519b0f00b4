// Deterministic CSV emission: comma separators, "\n" line endings, mandatory
// header, numbers at 17 significant digits so doubles round-trip exactly.
#pragma once

#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace ammsim::csv {

inline std::string format_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

inline std::string format_number(int value) { return std::to_string(value); }

inline std::string format_flag(bool value) { return value ? "1" : "0"; }

class Writer {
  public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void row(std::span<const std::string> cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    void row(std::initializer_list<std::string> cells) {
        row(std::span<const std::string>(cells.begin(), cells.size()));
    }

  private:
    std::ostream& out_;
};

}  // namespace ammsim::csv
