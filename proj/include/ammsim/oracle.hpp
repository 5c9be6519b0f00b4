// Deliberately naive reference implementations used by the test suite and the
// CLI's --oracle mode: grid search with golden-section refinement for the two
// trader optimizations, a dense sign scan for beta_2, and a finite-difference
// helper. The objectives are written out here from scratch; nothing is shared
// with the closed-form modules beyond the pool itself.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include "ammsim/engine.hpp"
#include "ammsim/pool.hpp"

namespace ammsim::oracle {

struct OracleConfig {
    int grid_points = 10000;
    double refinement_tolerance = 1e-10;  // bracket width, relative to max(1, |x|)
    double scan_cap = 1e6;

    void validate() const {
        if (grid_points < 100) throw std::invalid_argument("grid_points must be >= 100");
        if (!(refinement_tolerance > 0.0)) throw std::invalid_argument("nonpositive tolerance");
        if (!(scan_cap > 0.0)) throw std::invalid_argument("nonpositive scan cap");
    }
};

struct SearchResult {
    double arg_best = 0.0;
    double value_best = 0.0;
};

namespace detail {

// Coarse grid over [lo, hi], then golden-section around the best cell.
inline SearchResult maximize(const std::function<double(double)>& objective, double lo,
                             double hi, const OracleConfig& config) {
    config.validate();
    const int n = config.grid_points;
    int best = 0;
    double best_value = objective(lo);
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double value = objective(x);
        if (value > best_value) {
            best_value = value;
            best = i;
        }
    }
    double a = lo + (hi - lo) * std::max(0, best - 1) / n;
    double b = lo + (hi - lo) * std::min(n, best + 1) / n;

    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (b - a > config.refinement_tolerance * std::max(1.0, std::abs(x1))) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = objective(x1);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, objective(x)};
}

}  // namespace detail

// Brute-force maximum of the arbitrage payoff
//   -v_in (1+f) x + v_out (r_out - r_in r_out / (r_in + x))
// over x in [0, 2 r_in].
inline SearchResult brute_force_arbitrage(double r_in, double r_out, double v_in, double v_out,
                                          double f, const OracleConfig& config = {}) {
    if (!(r_in > 0.0) || !(r_out > 0.0)) throw std::invalid_argument("no liquidity");
    if (!(v_in > 0.0) || !(v_out > 0.0)) throw std::invalid_argument("nonpositive value");
    auto objective = [=](double x) {
        const double received = r_out - r_in * r_out / (r_in + x);
        return -v_in * (1.0 + f) * x + v_out * received;
    };
    return detail::maximize(objective, 0.0, 2.0 * r_in, config);
}

inline SearchResult brute_force_arbitrage(const PoolState& pool, TokenValues values,
                                          SwapDirection dir, const OracleConfig& config = {}) {
    const double r_in = dir == SwapDirection::AForB ? pool.reserve_a : pool.reserve_b;
    const double r_out = dir == SwapDirection::AForB ? pool.reserve_b : pool.reserve_a;
    const double v_in = dir == SwapDirection::AForB ? values.value_a : values.value_b;
    const double v_out = dir == SwapDirection::AForB ? values.value_b : values.value_a;
    return brute_force_arbitrage(r_in, r_out, v_in, v_out, pool.fee_rate, config);
}

// Brute-force maximum of the investor's utility from taking q of the desired
// token (reserve r_desired) against the other reserve:
//   v_desired (1+alpha) q - v_other (1+f) (r_other r_desired / (r_desired - q) - r_other)
// over q in [0, 0.999 r_desired].
inline SearchResult brute_force_investor(double r_desired, double r_other, double v_desired,
                                         double v_other, double alpha, double f,
                                         const OracleConfig& config = {}) {
    if (!(r_desired > 0.0) || !(r_other > 0.0)) throw std::invalid_argument("no liquidity");
    auto objective = [=](double q) {
        const double paid_in = r_other * r_desired / (r_desired - q) - r_other;
        return v_desired * (1.0 + alpha) * q - v_other * (1.0 + f) * paid_in;
    };
    return detail::maximize(objective, 0.0, 0.999 * r_desired, config);
}

inline SearchResult brute_force_investor(const PoolState& pool, const MarketParams& params,
                                         InvestorType type, const OracleConfig& config = {}) {
    const bool wants_a = type == InvestorType::TypeA;
    return brute_force_investor(wants_a ? pool.reserve_a : pool.reserve_b,
                                wants_a ? pool.reserve_b : pool.reserve_a,
                                wants_a ? params.p_a : params.p_b,
                                wants_a ? params.p_b : params.p_a, params.alpha, params.fee,
                                config);
}

struct SignChangeBracket {
    double lo = 0.0;  // payoff >= 0 here
    double hi = 0.0;  // payoff < 0 here
};

// Dense scan of the enumerated expected LP payoff over beta, starting at the
// balanced-pool threshold. Deliberately based on the playout engine rather
// than the closed form, so it brackets beta_2 through an independent route.
inline SignChangeBracket scan_beta2(const MarketParams& params, double y_a0, double resolution,
                                    const OracleConfig& config = {}) {
    config.validate();
    if (!(resolution > 0.0)) throw std::invalid_argument("nonpositive resolution");
    MarketParams p = params;
    const std::array<double, 2> dep{y_a0, y_a0 * p.p_a / p.p_b};
    double beta = p.fee;
    while (beta <= config.scan_cap) {
        const double next = beta + resolution;
        p.beta = next;
        if (expected_lp_payoff(p, dep) < 0.0) return {beta, next};
        beta = next;
    }
    throw std::runtime_error("beta2 scan cap exhausted");
}

// Bisects the enumerated payoff inside a scan bracket.
inline double refine_beta2(const MarketParams& params, double y_a0, SignChangeBracket bracket,
                           int iterations = 100) {
    MarketParams p = params;
    const std::array<double, 2> dep{y_a0, y_a0 * p.p_a / p.p_b};
    double lo = bracket.lo;
    double hi = bracket.hi;
    for (int i = 0; i < iterations && hi - lo > 1e-14 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        p.beta = mid;
        (expected_lp_payoff(p, dep) >= 0.0 ? lo : hi) = mid;
    }
    return lo;
}

// Central finite difference.
inline double central_difference(const std::function<double(double)>& fn, double x, double step) {
    return (fn(x + step) - fn(x - step)) / (2.0 * step);
}

// Playout hooks that size every order by grid search instead of closed form.
inline PlayoutHooks playout_hooks(OracleConfig config = {}) {
    PlayoutHooks hooks;
    hooks.arbitrage = [config](const PoolState& pool, const MarketParams& params,
                               TokenValues values) -> std::optional<ArbOrder> {
        params.validate();
        for (SwapDirection dir : {SwapDirection::AForB, SwapDirection::BForA}) {
            const SearchResult found = brute_force_arbitrage(pool, values, dir, config);
            if (found.arg_best > 1e-9 && found.value_best > 0.0) {
                ArbOrder order;
                order.amount_in = found.arg_best;
                order.direction = dir;
                order.expected_profit = found.value_best;
                order.gas_bid = found.value_best;
                return order;
            }
        }
        return std::nullopt;
    };
    hooks.investor = [config](const PoolState& pool, const MarketParams& params,
                              InvestorType type) -> std::optional<TradeOrder> {
        params.validate();
        const SearchResult found = brute_force_investor(pool, params, type, config);
        if (found.arg_best <= 1e-9 || !(found.value_best > 0.0)) return std::nullopt;
        TradeOrder order;
        order.amount_out_requested = found.arg_best;
        order.investor_type = type;
        return order;
    };
    return hooks;
}

}  // namespace ammsim::oracle
