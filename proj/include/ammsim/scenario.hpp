// Scenario configuration: a flat key = value text format with # comments and
// dotted keys for sweep ranges. Example:
//
//   p_a = 1.0
//   p_b = 2.0
//   alpha = 0.5
//   beta = 0.1
//   f = 0.003
//   y_a0 = 100
//   lp_fractions = 0.5,0.3,0.2
//   sweep.alpha = 0.1,0.9,9     # start,stop,steps (steps = number of points)
//
// Unknown keys, duplicates, and malformed numbers are errors carrying the
// offending line number.
#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ammsim/agents.hpp"

namespace ammsim {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SweepRange {
    double start = 0.0;
    double stop = 0.0;
    int steps = 1;  // number of points, endpoints inclusive

    std::vector<double> points() const {
        std::vector<double> result;
        result.reserve(steps);
        if (steps == 1) {
            result.push_back(start);
            return result;
        }
        for (int i = 0; i < steps; ++i) {
            result.push_back(start + (stop - start) * i / (steps - 1));
        }
        return result;
    }
};

struct ScenarioConfig {
    double p_a = 1.0;
    double p_b = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double f = 0.0;
    double y_a0 = 1.0;
    int n_lps = 2;
    int m_arbitrageurs = 2;
    std::vector<double> lp_fractions = {0.5, 0.5};
    std::optional<SweepRange> sweep_alpha;
    std::optional<SweepRange> sweep_beta;
    std::optional<SweepRange> sweep_f;
    std::optional<SweepRange> sweep_y_a0;

    double y_b0() const { return y_a0 * p_a / p_b; }

    MarketParams market_params() const {
        MarketParams params;
        params.p_a = p_a;
        params.p_b = p_b;
        params.alpha = alpha;
        params.beta = beta;
        params.fee = f;
        params.n_lps = n_lps;
        params.n_arbitrageurs = m_arbitrageurs;
        return params;
    }

    // Grid axes in the fixed output order alpha, beta, f, y_a0; a missing
    // sweep collapses its axis to the scalar value.
    std::vector<double> alphas() const { return axis(sweep_alpha, alpha); }
    std::vector<double> betas() const { return axis(sweep_beta, beta); }
    std::vector<double> fees() const { return axis(sweep_f, f); }
    std::vector<double> deposits() const { return axis(sweep_y_a0, y_a0); }

  private:
    static std::vector<double> axis(const std::optional<SweepRange>& range, double fallback) {
        if (range) return range->points();
        return {fallback};
    }
};

namespace config_detail {

inline std::string_view trim(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    return text;
}

inline double parse_double(std::string_view text, int line) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("line " + std::to_string(line) + ": malformed number '" +
                          std::string(text) + "'");
    }
    return value;
}

inline int parse_int(std::string_view text, int line) {
    int value = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("line " + std::to_string(line) + ": malformed integer '" +
                          std::string(text) + "'");
    }
    return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    size_t begin = 0;
    while (true) {
        const size_t pos = text.find(sep, begin);
        if (pos == std::string_view::npos) {
            parts.push_back(trim(text.substr(begin)));
            return parts;
        }
        parts.push_back(trim(text.substr(begin, pos - begin)));
        begin = pos + 1;
    }
}

inline SweepRange parse_range(std::string_view text, int line) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) {
        throw ConfigError("line " + std::to_string(line) +
                          ": sweep range needs start,stop,steps");
    }
    SweepRange range;
    range.start = parse_double(parts[0], line);
    range.stop = parse_double(parts[1], line);
    range.steps = parse_int(parts[2], line);
    if (range.steps < 1) {
        throw ConfigError("line " + std::to_string(line) + ": sweep steps must be >= 1");
    }
    return range;
}

}  // namespace config_detail

inline ScenarioConfig parse_scenario_text(std::string_view text) {
    using namespace config_detail;
    ScenarioConfig config;
    std::map<std::string, int> seen;
    std::map<std::string, bool> required = {
        {"p_a", false}, {"p_b", false}, {"alpha", false},
        {"beta", false}, {"f", false},  {"y_a0", false},
    };

    int line_number = 0;
    size_t cursor = 0;
    while (cursor <= text.size()) {
        const size_t eol = text.find('\n', cursor);
        std::string_view line = text.substr(
            cursor, eol == std::string_view::npos ? text.size() - cursor : eol - cursor);
        cursor = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_number;

        if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        const size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_number) + ": expected key = value");
        }
        const std::string key{trim(line.substr(0, eq))};
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("line " + std::to_string(line_number) + ": empty key or value");
        }
        if (auto [it, inserted] = seen.emplace(key, line_number); !inserted) {
            throw ConfigError("line " + std::to_string(line_number) + ": duplicate key '" + key +
                              "' (first set on line " + std::to_string(it->second) + ")");
        }
        if (auto it = required.find(key); it != required.end()) it->second = true;

        if (key == "p_a") config.p_a = parse_double(value, line_number);
        else if (key == "p_b") config.p_b = parse_double(value, line_number);
        else if (key == "alpha") config.alpha = parse_double(value, line_number);
        else if (key == "beta") config.beta = parse_double(value, line_number);
        else if (key == "f") config.f = parse_double(value, line_number);
        else if (key == "y_a0") config.y_a0 = parse_double(value, line_number);
        else if (key == "n_lps") config.n_lps = parse_int(value, line_number);
        else if (key == "m_arbitrageurs") config.m_arbitrageurs = parse_int(value, line_number);
        else if (key == "lp_fractions") {
            config.lp_fractions.clear();
            for (std::string_view part : split(value, ',')) {
                config.lp_fractions.push_back(parse_double(part, line_number));
            }
        } else if (key == "sweep.alpha") config.sweep_alpha = parse_range(value, line_number);
        else if (key == "sweep.beta") config.sweep_beta = parse_range(value, line_number);
        else if (key == "sweep.f") config.sweep_f = parse_range(value, line_number);
        else if (key == "sweep.y_a0") config.sweep_y_a0 = parse_range(value, line_number);
        else {
            throw ConfigError("line " + std::to_string(line_number) + ": unknown key '" + key +
                              "'");
        }
    }

    for (const auto& [key, present] : required) {
        if (!present) throw ConfigError("missing required key '" + key + "'");
    }

    if (!(config.p_a > 0.0) || !(config.p_b > 0.0)) throw ConfigError("prices must be positive");
    if (!(config.y_a0 > 0.0)) throw ConfigError("y_a0 must be positive");
    if (!(config.alpha >= 0.0) || !(config.beta >= 0.0)) {
        throw ConfigError("alpha and beta must be nonnegative");
    }
    if (!(config.f >= 0.0 && config.f < 1.0)) throw ConfigError("f must lie in [0, 1)");
    if (config.n_lps < 2) throw ConfigError("n_lps must be >= 2");
    if (config.m_arbitrageurs < 2) throw ConfigError("m_arbitrageurs must be >= 2");
    double fraction_sum = 0.0;
    for (double w : config.lp_fractions) {
        if (!(w > 0.0 && w < 1.0)) throw ConfigError("lp_fractions entries must lie in (0, 1)");
        fraction_sum += w;
    }
    if (std::abs(fraction_sum - 1.0) > 1e-9) throw ConfigError("lp_fractions must sum to 1");
    return config;
}

inline ScenarioConfig parse_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str());
}

}  // namespace ammsim
