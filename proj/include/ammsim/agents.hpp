// Closed-form optimizers for the two strategic traders: the arbitrageur who
// realigns the pool with external token values, and the investor who trades
// for private-use value. Both are stateless functions of the pool and the
// market parameters.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "ammsim/pool.hpp"

namespace ammsim {

struct MarketParams {
    double p_a = 1.0;  // consumption good per token A
    double p_b = 1.0;  // consumption good per token B
    double alpha = 0.0;  // investor's private-use premium
    double beta = 0.0;   // relative size of the price shock
    double fee = 0.0;    // pool fee rate f, in [0, 1)
    int n_lps = 2;
    int n_arbitrageurs = 2;

    void validate() const {
        if (!(p_a > 0.0) || !(p_b > 0.0)) throw std::invalid_argument("prices must be positive");
        if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
        if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
        if (!(fee >= 0.0 && fee < 1.0)) throw std::invalid_argument("fee must lie in [0, 1)");
        if (n_lps < 2) throw std::invalid_argument("need at least two liquidity providers");
        if (n_arbitrageurs < 2) throw std::invalid_argument("need at least two arbitrageurs");
    }
};

// Consumption-good value of one token of each kind at some point in time.
struct TokenValues {
    double value_a = 1.0;
    double value_b = 1.0;
};

enum class InvestorType { TypeA, TypeB };
enum class ShockTarget { TokenA, TokenB };

struct ArbOrder {
    double amount_in = 0.0;  // tokens of the cheap-side token traded in
    SwapDirection direction = SwapDirection::AForB;
    double expected_profit = 0.0;  // consumption-good units
    double gas_bid = 0.0;
};

struct TradeOrder {
    double amount_out_requested = 0.0;  // tokens of the desired token
    InvestorType investor_type = InvestorType::TypeA;
    double gas_bid = 0.0;  // uncontested, so zero
};

namespace detail {

// Profit of trading `x` of the in-token for the out-token at external values
// (v_in, v_out): -v_in (1+f) x + v_out * out(x).
inline double arb_objective(double r_in, double r_out, double v_in, double v_out,
                            double f, double x) {
    return -v_in * (1.0 + f) * x + v_out * (r_out - r_in * r_out / (r_in + x));
}

// Stationary point of arb_objective; positive iff the direction is feasible.
inline double arb_optimum(double r_in, double r_out, double v_in, double v_out, double f) {
    return std::sqrt(v_out * r_in * r_out / ((1.0 + f) * v_in)) - r_in;
}

}  // namespace detail

// Best arbitrage against the pool when tokens are worth `values` per unit.
// Tries both directions; at most one admits a positive optimum. Empty result
// means no profitable arbitrage exists.
inline std::optional<ArbOrder> optimal_arbitrage(const PoolState& pool,
                                                 const MarketParams& params,
                                                 TokenValues values) {
    params.validate();
    detail::require_liquidity(pool);
    if (!(values.value_a > 0.0) || !(values.value_b > 0.0)) {
        throw std::invalid_argument("token values must be positive");
    }
    const double f = pool.fee_rate;
    struct Candidate {
        SwapDirection dir;
        double r_in, r_out, v_in, v_out;
    };
    const Candidate candidates[2] = {
        {SwapDirection::AForB, pool.reserve_a, pool.reserve_b, values.value_a, values.value_b},
        {SwapDirection::BForA, pool.reserve_b, pool.reserve_a, values.value_b, values.value_a},
    };
    for (const Candidate& c : candidates) {
        const double x = detail::arb_optimum(c.r_in, c.r_out, c.v_in, c.v_out, f);
        if (x > 0.0) {
            ArbOrder order;
            order.amount_in = x;
            order.direction = c.dir;
            order.expected_profit = detail::arb_objective(c.r_in, c.r_out, c.v_in, c.v_out, f, x);
            // Complete-information competition bids the full surplus.
            order.gas_bid = order.expected_profit;
            return order;
        }
    }
    return std::nullopt;
}

// Smallest shock on the target token making arbitrage profitable at the
// current reserves: beta_1 = (1+f) r_other v_other / (r_target v_target) - 1.
inline double beta_one(const PoolState& pool, const MarketParams& params,
                       ShockTarget target = ShockTarget::TokenB) {
    params.validate();
    detail::require_liquidity(pool);
    const double value_a = pool.reserve_a * params.p_a;
    const double value_b = pool.reserve_b * params.p_b;
    if (target == ShockTarget::TokenB) {
        return (1.0 + params.fee) * value_a / value_b - 1.0;
    }
    return (1.0 + params.fee) * value_b / value_a - 1.0;
}

// Investor's optimal purchase of the preferred token out of a value-balanced
// pool: q* = (1 - sqrt((f+1)/(alpha+1))) * reserve. No trade when alpha <= f.
inline std::optional<TradeOrder> investor_optimal_trade(const PoolState& pool,
                                                        const MarketParams& params,
                                                        InvestorType type) {
    params.validate();
    detail::require_liquidity(pool);
    if (!detail::close_rel(pool.reserve_a * params.p_a, pool.reserve_b * params.p_b, 1e-9)) {
        throw std::invalid_argument("pool is not value-balanced");
    }
    const double q_fraction = 1.0 - std::sqrt((params.fee + 1.0) / (params.alpha + 1.0));
    if (!(q_fraction > 0.0)) return std::nullopt;
    TradeOrder order;
    order.investor_type = type;
    order.amount_out_requested =
        q_fraction * (type == InvestorType::TypeA ? pool.reserve_a : pool.reserve_b);
    order.gas_bid = 0.0;
    return order;
}

// Arbitrage profit at the optimum, in closed form: plugging x* into the
// objective gives -2(1+f) v_in sqrt((1+beta) v_out r_in r_out / ((1+f) v_in))
// + (1+beta) v_out r_out + (1+f) v_in r_in, where the shock (1+beta)
// multiplies the out-token's base value.
inline double arb_profit_closed_form(double r_in, double r_out, double v_in, double v_out,
                                     double f, double beta) {
    if (!(r_in > 0.0) || !(r_out > 0.0)) throw std::invalid_argument("no liquidity");
    if (!(v_in > 0.0) || !(v_out > 0.0)) throw std::invalid_argument("nonpositive value");
    const double beta1 = (1.0 + f) * r_in * v_in / (r_out * v_out) - 1.0;
    if (!(beta > beta1)) throw std::domain_error("no arbitrage regime");
    const double shocked_out = (1.0 + beta) * v_out;
    return -2.0 * (1.0 + f) * v_in * std::sqrt(shocked_out * r_in * r_out / ((1.0 + f) * v_in)) +
           shocked_out * r_out + (1.0 + f) * v_in * r_in;
}

}  // namespace ammsim
