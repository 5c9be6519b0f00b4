#pragma once

#include <algorithm>
#include <cmath>
#include <random>

namespace testutil {

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

// Relative difference with an absolute floor, for values that can legitimately
// sit near zero.
inline double rel_diff_floored(double a, double b, double floor) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace testutil
