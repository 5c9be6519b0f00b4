// Plays the three-period game for one event realization, enumerates the four
// equiprobable events for the exact expected LP payoff, and evaluates the
// closed-form payoff expression and its beta-derivative for cross-checks.
//
// Timeline per playout:
//   t=0  LPs deposit a value-balanced pair (y_a0, y_b0).
//   t=1  the investor trades, then one arbitrage round at pre-shock values
//        (gas g1 equals that round's profit, or 0 if no arbitrage).
//   t=2  the shock multiplies one token's value by (1+beta); one arbitrage
//        round at post-shock values (gas g2 = pi); LPs withdraw and value
//        their holdings at post-shock prices.
//
// The LP payoff books the position at the start of t=2 and subtracts the
// t=2 arbitrage profit:
//   payoff = v_a (y_a2 - y_a0) + v_b (y_b2 - y_b0) - pi.
// Under the GrossReserve fee convention that equals valuing the final pool,
// since the arbitrage drains exactly pi of pool value.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include "ammsim/agents.hpp"
#include "ammsim/auction.hpp"
#include "ammsim/pool.hpp"

namespace ammsim {

struct EventTag {
    InvestorType investor_type = InvestorType::TypeA;
    ShockTarget shock_target = ShockTarget::TokenA;
};

// The four equiprobable events S_ij: investor type i arrives, shock hits j.
inline constexpr std::array<EventTag, 4> kAllEvents = {{
    {InvestorType::TypeA, ShockTarget::TokenA},
    {InvestorType::TypeA, ShockTarget::TokenB},
    {InvestorType::TypeB, ShockTarget::TokenA},
    {InvestorType::TypeB, ShockTarget::TokenB},
}};

struct Trajectory {
    std::array<double, 2> reserves_t0{};     // after the t=0 deposit
    std::array<double, 2> reserves_t1{};     // after the investor trade
    std::array<double, 2> reserves_t2{};     // start of t=2 (after t=1 arbitrage)
    std::array<double, 2> reserves_final{};  // after the t=2 arbitrage
    std::optional<TradeOrder> investor_order;
    std::optional<ArbOrder> arb_t1;
    std::optional<ArbOrder> arb_t2;
    double gas_t1 = 0.0;  // g1
    double gas_t2 = 0.0;  // g2 = pi
    TokenValues post_shock_prices{};
    double lp_payoff_total = 0.0;  // aggregate; LP i receives w_i' of it
};

// Optimizer hooks let the brute-force search stand in for the closed forms
// (the CLI's --oracle mode and the cross-validation tests use this).
struct PlayoutHooks {
    std::function<std::optional<ArbOrder>(const PoolState&, const MarketParams&, TokenValues)>
        arbitrage = [](const PoolState& pool, const MarketParams& params, TokenValues values) {
            return optimal_arbitrage(pool, params, values);
        };
    std::function<std::optional<TradeOrder>(const PoolState&, const MarketParams&, InvestorType)>
        investor = [](const PoolState& pool, const MarketParams& params, InvestorType type) {
            return investor_optimal_trade(pool, params, type);
        };
};

inline Trajectory playout(const MarketParams& params, std::array<double, 2> initial_deposit,
                          EventTag event,
                          FeeConvention convention = kCalibratedFeeConvention,
                          const PlayoutHooks& hooks = {}) {
    params.validate();
    const auto [y_a0, y_b0] = initial_deposit;
    if (!(y_a0 > 0.0) || !(y_b0 > 0.0)) throw std::invalid_argument("empty initial deposit");
    if (!detail::close_rel(y_a0 * params.p_a, y_b0 * params.p_b, 1e-9)) {
        throw std::invalid_argument("initial deposit is not value-balanced");
    }

    PoolState pool;
    pool.fee_rate = params.fee;
    pool.convention = convention;
    pool = deposit(pool, y_a0, y_b0, params.p_a, params.p_b).pool;

    Trajectory traj;
    traj.reserves_t0 = {pool.owned_a(), pool.owned_b()};

    // t=1: the investor trades, uncontested (gas 0).
    traj.investor_order = hooks.investor(pool, params, event.investor_type);
    if (traj.investor_order) {
        pool = settle_round(pool, {make_pending(*traj.investor_order, 0)},
                            {params.p_a, params.p_b})
                   .pool;
    }
    traj.reserves_t1 = {pool.owned_a(), pool.owned_b()};

    // t=1 arbitrage round at pre-shock values.
    traj.arb_t1 = hooks.arbitrage(pool, params, {params.p_a, params.p_b});
    if (traj.arb_t1) {
        traj.gas_t1 = traj.arb_t1->gas_bid;
        pool = settle_round(pool, {make_pending(*traj.arb_t1, 1)}, {params.p_a, params.p_b}).pool;
    }
    traj.reserves_t2 = {pool.owned_a(), pool.owned_b()};

    // t=2: shock, then one arbitrage round at post-shock values.
    traj.post_shock_prices =
        event.shock_target == ShockTarget::TokenA
            ? TokenValues{params.p_a * (1.0 + params.beta), params.p_b}
            : TokenValues{params.p_a, params.p_b * (1.0 + params.beta)};
    traj.arb_t2 = hooks.arbitrage(pool, params, traj.post_shock_prices);
    if (traj.arb_t2) {
        traj.gas_t2 = traj.arb_t2->gas_bid;
        pool = settle_round(pool, {make_pending(*traj.arb_t2, 2)}, traj.post_shock_prices).pool;
    }
    traj.reserves_final = {pool.owned_a(), pool.owned_b()};

    traj.lp_payoff_total =
        traj.post_shock_prices.value_a * (traj.reserves_t2[0] - traj.reserves_t0[0]) +
        traj.post_shock_prices.value_b * (traj.reserves_t2[1] - traj.reserves_t0[1]) -
        traj.gas_t2;
    return traj;
}

// Exact expectation over the four events, each with probability 1/4.
inline double expected_lp_payoff(const MarketParams& params, std::array<double, 2> initial_deposit,
                                 FeeConvention convention = kCalibratedFeeConvention,
                                 const PlayoutHooks& hooks = {}) {
    double total = 0.0;
    for (const EventTag& event : kAllEvents) {
        total += playout(params, initial_deposit, event, convention, hooks).lp_payoff_total;
    }
    return total / 4.0;
}

namespace detail {

struct ClosedFormTerms {
    double s;  // sqrt((f+1)/(alpha+1)), the post-trade share of the taken reserve
    double r;  // sqrt(1 - f s / (1+f)); reserves at the start of t=2 are
               // y_a0 ((1+f) r - f s) and y_b0 (1+f) r up to relabeling
    double c;  // r ((1+f) r - f s) = product growth factor / (1+f)
};

inline ClosedFormTerms closed_form_terms(double alpha, double f) {
    ClosedFormTerms t;
    t.s = std::sqrt((f + 1.0) / (alpha + 1.0));
    const double radicand = 1.0 - f / (std::sqrt(alpha + 1.0) * std::sqrt(f + 1.0));
    if (!(radicand >= 0.0)) throw std::domain_error("outside model domain");
    t.r = std::sqrt(radicand);
    t.c = t.r * ((f + 1.0) * t.r - f * std::sqrt(f + 1.0) / std::sqrt(alpha + 1.0));
    return t;
}

}  // namespace detail

// Ex-ante LP payoff per unit deposit, in closed form.
inline double closed_form_U(const MarketParams& params, double y_a0) {
    params.validate();
    if (!(y_a0 > 0.0)) throw std::invalid_argument("y_a0 must be positive");
    const double f = params.fee;
    const double alpha = params.alpha;
    const double beta = params.beta;
    const auto terms = detail::closed_form_terms(alpha, f);
    const double inner = (beta + 1.0) * terms.c;
    if (!(inner >= 0.0)) throw std::domain_error("outside model domain");
    return 0.5 * params.p_a * y_a0 *
           (std::sqrt(f + 1.0) * f * f / std::sqrt(alpha + 1.0) -
            2.0 * (f + 1.0) * f * terms.r - 2.0 * beta - 4.0 +
            4.0 * (f + 1.0) * std::sqrt(inner));
}

// Exact derivative of closed_form_U with respect to beta:
//   dU/dbeta = (-1 + (1+f) sqrt(c) / sqrt(1+beta)) p_a y_a0,
// where c collapses to 1 at f = 0. The sqrt(c) factor keeps the derivative
// consistent with finite differences of closed_form_U for every fee.
inline double dU_dbeta_closed_form(const MarketParams& params, double y_a0) {
    params.validate();
    if (!(y_a0 > 0.0)) throw std::invalid_argument("y_a0 must be positive");
    const auto terms = detail::closed_form_terms(params.alpha, params.fee);
    if (!(terms.c >= 0.0)) throw std::domain_error("outside model domain");
    return (-1.0 + (1.0 + params.fee) * std::sqrt(terms.c) / std::sqrt(1.0 + params.beta)) *
           params.p_a * y_a0;
}

}  // namespace ammsim
