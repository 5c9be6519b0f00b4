#include <catch2/catch_amalgamated.hpp>

#include "ammsim/agents.hpp"
#include "ammsim/oracle.hpp"
#include "test_util.hpp"

using namespace ammsim;
using testutil::rel_diff;
using testutil::uniform;

namespace {

PoolState make_pool(double a, double b, double fee = 0.0) {
    PoolState pool;
    pool.reserve_a = a;
    pool.reserve_b = b;
    pool.total_shares = 1.0;
    pool.fee_rate = fee;
    return pool;
}

MarketParams make_params(double p_a, double p_b, double alpha, double beta, double fee) {
    MarketParams params;
    params.p_a = p_a;
    params.p_b = p_b;
    params.alpha = alpha;
    params.beta = beta;
    params.fee = fee;
    return params;
}

}  // namespace

TEST_CASE("optimal arbitrage on the worked example") {
    const PoolState pool = make_pool(100, 100);
    const MarketParams params = make_params(1, 1, 0, 0.21, 0);

    SECTION("no shock, balanced pool: nothing to do") {
        REQUIRE_FALSE(optimal_arbitrage(pool, params, {1.0, 1.0}).has_value());
    }
    SECTION("21% shock on B at zero fee") {
        const auto order = optimal_arbitrage(pool, params, {1.0, 1.21});
        REQUIRE(order.has_value());
        REQUIRE(order->direction == SwapDirection::AForB);
        REQUIRE(rel_diff(order->amount_in, 10.0) < 1e-12);
        REQUIRE(rel_diff(order->expected_profit, 1.0) < 1e-12);
        REQUIRE(order->gas_bid == order->expected_profit);
    }
    SECTION("fee equal to the shock sits exactly on the threshold") {
        PoolState fee_pool = make_pool(100, 100, 0.21);
        REQUIRE_FALSE(optimal_arbitrage(fee_pool, params, {1.0, 1.21}).has_value());
    }
    SECTION("shock on A flips the direction") {
        const auto order = optimal_arbitrage(pool, params, {1.21, 1.0});
        REQUIRE(order.has_value());
        REQUIRE(order->direction == SwapDirection::BForA);
    }
}

TEST_CASE("an order is emitted exactly when beta exceeds beta1") {
    const PoolState pool = make_pool(80, 125, 0.003);
    const MarketParams params = make_params(1.5, 1.2, 0, 0, 0.003);
    const double beta1 = beta_one(pool, params, ShockTarget::TokenB);
    for (double offset : {1e-6, -1e-6}) {
        const auto order =
            optimal_arbitrage(pool, params, {1.5, 1.2 * (1.0 + beta1 + offset)});
        REQUIRE(order.has_value() == (offset > 0));
    }
}

TEST_CASE("closed-form arbitrage agrees with the brute-force oracle") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 40; ++i) {
        const double r_a = uniform(rng, 1, 1000);
        const double r_b = uniform(rng, 1, 1000);
        const double p_a = uniform(rng, 0.1, 10);
        const double p_b = uniform(rng, 0.1, 10);
        const double fee = uniform(rng, 0, 0.05);
        const PoolState pool = make_pool(r_a, r_b, fee);
        const MarketParams params = make_params(p_a, p_b, 0, 0, fee);
        const double beta1 = beta_one(pool, params, ShockTarget::TokenB);
        const double beta = beta1 + uniform(rng, 1e-3, 2.0);

        const TokenValues values{p_a, p_b * (1.0 + beta)};
        const auto order = optimal_arbitrage(pool, params, values);
        REQUIRE(order.has_value());
        const auto oracle_best =
            oracle::brute_force_arbitrage(pool, values, order->direction);
        REQUIRE(rel_diff(order->amount_in, oracle_best.arg_best) < 1e-6);
        REQUIRE(testutil::rel_diff_floored(order->expected_profit, oracle_best.value_best,
                                           1e-12 * p_a * r_a) < 1e-8);
    }
}

TEST_CASE("at most one direction is ever feasible") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 200; ++i) {
        const PoolState pool = make_pool(uniform(rng, 1, 1000), uniform(rng, 1, 1000),
                                         uniform(rng, 0, 0.05));
        const TokenValues values{uniform(rng, 0.1, 10), uniform(rng, 0.1, 10)};
        const bool a_side = detail::arb_optimum(pool.reserve_a, pool.reserve_b, values.value_a,
                                                values.value_b, pool.fee_rate) > 0.0;
        const bool b_side = detail::arb_optimum(pool.reserve_b, pool.reserve_a, values.value_b,
                                                values.value_a, pool.fee_rate) > 0.0;
        REQUIRE_FALSE((a_side && b_side));
    }
}

TEST_CASE("arbitrage comparative statics") {
    const PoolState pool = make_pool(200, 150);
    const MarketParams params = make_params(1.1, 0.9, 0, 0, 0);

    SECTION("size and profit increase in beta") {
        double prev_x = 0.0, prev_pi = 0.0;
        const double beta1 = beta_one(pool, params, ShockTarget::TokenB);
        for (int i = 1; i <= 10; ++i) {
            const double beta = beta1 + 0.05 * i;
            const auto order = optimal_arbitrage(pool, params, {1.1, 0.9 * (1 + beta)});
            REQUIRE(order.has_value());
            REQUIRE(order->amount_in > prev_x);
            REQUIRE(order->expected_profit > prev_pi);
            prev_x = order->amount_in;
            prev_pi = order->expected_profit;
        }
    }
    SECTION("size and profit decrease in the fee") {
        double prev_x = 1e18, prev_pi = 1e18;
        for (int i = 0; i <= 10; ++i) {
            PoolState fee_pool = pool;
            fee_pool.fee_rate = 0.005 * i;
            MarketParams p = params;
            p.fee = fee_pool.fee_rate;
            const auto order = optimal_arbitrage(fee_pool, p, {1.1, 0.9 * 1.5});
            REQUIRE(order.has_value());
            REQUIRE(order->amount_in < prev_x);
            REQUIRE(order->expected_profit < prev_pi);
            prev_x = order->amount_in;
            prev_pi = order->expected_profit;
        }
    }
}

TEST_CASE("beta1 threshold formula") {
    SECTION("value-balanced reserves give beta1 = f") {
        const MarketParams params = make_params(1, 2, 0, 0, 0.003);
        const PoolState pool = make_pool(20, 10, 0.003);
        REQUIRE(beta_one(pool, params) == Catch::Approx(0.003));
        REQUIRE(beta_one(pool, params, ShockTarget::TokenA) == Catch::Approx(0.003));
    }
    SECTION("zero fee, balanced: beta1 = 0") {
        const MarketParams params = make_params(1, 1, 0, 0, 0);
        REQUIRE(beta_one(make_pool(10, 10), params) == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("worked example") {
        const MarketParams params = make_params(1, 2, 0, 0, 0.003);
        REQUIRE(rel_diff(beta_one(make_pool(20, 10, 0.003), params),
                         1.003 * 20.0 * 1.0 / (10.0 * 2.0) - 1.0) < 1e-12);
    }
    SECTION("increasing in the fee") {
        double prev = -1.0;
        for (int i = 0; i <= 10; ++i) {
            const double fee = 0.005 * i;
            const MarketParams params = make_params(1.3, 0.8, 0, 0, fee);
            const double b1 = beta_one(make_pool(100, 120, fee), params);
            REQUIRE(b1 > prev);
            prev = b1;
        }
    }
    SECTION("agrees with a bisection oracle for the smallest profitable beta") {
        std::mt19937_64 rng(99);
        for (int i = 0; i < 10; ++i) {
            const double r_a = uniform(rng, 1, 1000);
            const double r_b = uniform(rng, 1, 1000);
            const double p_a = uniform(rng, 0.1, 10);
            const double p_b = uniform(rng, 0.1, 10);
            const double fee = uniform(rng, 0, 0.05);
            const PoolState pool = make_pool(r_a, r_b, fee);
            const MarketParams params = make_params(p_a, p_b, 0, 0, fee);

            auto profitable = [&](double beta) {
                const auto found = oracle::brute_force_arbitrage(
                    pool, {p_a, p_b * (1.0 + beta)}, SwapDirection::AForB);
                return found.value_best > 0.0 && found.arg_best > 1e-9;
            };
            const double b1 = beta_one(pool, params, ShockTarget::TokenB);
            double lo = -1.0 + 1e-9, hi = std::max(2.0 * std::abs(b1), 1.0) + 1.0;
            REQUIRE(profitable(hi));
            for (int iter = 0; iter < 60; ++iter) {
                const double mid = 0.5 * (lo + hi);
                (profitable(mid) ? hi : lo) = mid;
            }
            REQUIRE(std::abs(hi - b1) < 1e-8 * std::max(1.0, std::abs(b1)) + 1e-8);
        }
    }
}

TEST_CASE("investor optimal trade") {
    const PoolState pool = make_pool(120, 120);

    SECTION("no trade when alpha does not beat the fee") {
        const MarketParams params = make_params(1, 1, 0.01, 0, 0.01);
        REQUIRE_FALSE(investor_optimal_trade(pool, params, InvestorType::TypeA).has_value());
    }
    SECTION("worked example: alpha=0.44, f=0 takes a sixth of the reserve") {
        const MarketParams params = make_params(1, 1, 0.44, 0, 0);
        const auto order = investor_optimal_trade(pool, params, InvestorType::TypeA);
        REQUIRE(order.has_value());
        REQUIRE(rel_diff(order->amount_out_requested, 20.0) < 1e-12);
        REQUIRE(order->gas_bid == 0.0);
    }
    SECTION("type B draws on the B reserve") {
        const PoolState uneven = make_pool(100, 50);  // balanced at p_b = 2 p_a
        const MarketParams params = make_params(1, 2, 0.44, 0, 0);
        const auto order = investor_optimal_trade(uneven, params, InvestorType::TypeB);
        REQUIRE(order.has_value());
        REQUIRE(rel_diff(order->amount_out_requested, 50.0 / 6.0) < 1e-12);
    }
    SECTION("unbalanced pool is rejected") {
        const MarketParams params = make_params(1, 1, 0.44, 0, 0);
        REQUIRE_THROWS_AS(investor_optimal_trade(make_pool(100, 50), params, InvestorType::TypeA),
                          std::invalid_argument);
    }
    SECTION("trade size increases in alpha and decreases in f") {
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 10; ++j) {
                const double alpha = 0.1 + 0.08 * i;
                const double fee = 0.005 * j;
                PoolState p = pool;
                p.fee_rate = fee;
                auto q_at = [&](double a, double f2) {
                    PoolState pp = pool;
                    pp.fee_rate = f2;
                    const auto order = investor_optimal_trade(
                        pp, make_params(1, 1, a, 0, f2), InvestorType::TypeA);
                    return order ? order->amount_out_requested : 0.0;
                };
                REQUIRE(q_at(alpha + 0.08, fee) > q_at(alpha, fee));
                REQUIRE(q_at(alpha, fee + 0.005) < q_at(alpha, fee));
            }
        }
    }
    SECTION("agrees with the brute-force oracle") {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 20; ++i) {
            const double p_a = uniform(rng, 0.1, 10);
            const double p_b = uniform(rng, 0.1, 10);
            const double y_a = uniform(rng, 10, 1000);
            const double fee = uniform(rng, 0, 0.05);
            const double alpha = fee + uniform(rng, 0.05, 1.0);
            PoolState p = make_pool(y_a, y_a * p_a / p_b, fee);
            const MarketParams params = make_params(p_a, p_b, alpha, 0, fee);
            const auto order = investor_optimal_trade(p, params, InvestorType::TypeA);
            REQUIRE(order.has_value());
            const auto found = oracle::brute_force_investor(p, params, InvestorType::TypeA);
            REQUIRE(rel_diff(order->amount_out_requested, found.arg_best) < 1e-6);
        }
    }
}

TEST_CASE("arbitrage profit closed form") {
    SECTION("matches the worked example") {
        REQUIRE(rel_diff(arb_profit_closed_form(100, 100, 1.0, 1.0, 0.0, 0.21), 1.0) < 1e-12);
    }
    SECTION("equals the objective evaluated at the optimum") {
        std::mt19937_64 rng(77);
        for (int i = 0; i < 50; ++i) {
            const double r_in = uniform(rng, 1, 1000);
            const double r_out = uniform(rng, 1, 1000);
            const double v_in = uniform(rng, 0.1, 10);
            const double v_out = uniform(rng, 0.1, 10);
            const double fee = uniform(rng, 0, 0.05);
            const double beta1 = (1.0 + fee) * r_in * v_in / (r_out * v_out) - 1.0;
            const double beta = beta1 + uniform(rng, 1e-3, 2.0);
            const double x_star =
                std::sqrt((1.0 + beta) * v_out * r_in * r_out / ((1.0 + fee) * v_in)) - r_in;
            const double via_objective =
                -v_in * (1.0 + fee) * x_star +
                (1.0 + beta) * v_out * (r_out - r_in * r_out / (r_in + x_star));
            const double closed = arb_profit_closed_form(r_in, r_out, v_in, v_out, fee, beta);
            REQUIRE(testutil::rel_diff_floored(closed, via_objective, 1e-12 * v_in * r_in) <
                    1e-10);
        }
    }
    SECTION("profit vanishes at the threshold") {
        const double beta1 = 0.0;  // balanced, zero fee
        const double profit = arb_profit_closed_form(100, 100, 1.0, 1.0, 0.0, beta1 + 1e-9);
        REQUIRE(std::abs(profit) < 1e-6);
    }
    SECTION("doubling both reserves doubles the profit") {
        const double once = arb_profit_closed_form(100, 100, 1.0, 1.0, 0.0, 0.21);
        const double twice = arb_profit_closed_form(200, 200, 1.0, 1.0, 0.0, 0.21);
        REQUIRE(rel_diff(twice, 2.0 * once) < 1e-12);
    }
    SECTION("rejects the no-arbitrage regime") {
        REQUIRE_THROWS_AS(arb_profit_closed_form(100, 100, 1.0, 1.0, 0.003, 0.001),
                          std::domain_error);
    }
}
