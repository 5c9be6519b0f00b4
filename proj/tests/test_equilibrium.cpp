#include <catch2/catch_amalgamated.hpp>

#include "ammsim/equilibrium.hpp"
#include "test_util.hpp"

using namespace ammsim;
using testutil::rel_diff;

namespace {

MarketParams make_params(double alpha, double beta, double fee) {
    MarketParams params;
    params.alpha = alpha;
    params.beta = beta;
    params.fee = fee;
    return params;
}

}  // namespace

TEST_CASE("beta2_solve finds the zero of U") {
    const MarketParams params = make_params(0.5, 0.0, 0.003);
    const double y_a0 = 12.0;
    const double beta2 = beta2_solve(params, y_a0).value();

    SECTION("defining property") {
        MarketParams p = params;
        p.beta = beta2;
        REQUIRE(std::abs(closed_form_U(p, y_a0)) < 1e-10 * p.p_a * y_a0);
    }
    SECTION("sign pattern around the root") {
        MarketParams p = params;
        p.beta = 0.5 * (p.fee + beta2);
        REQUIRE(closed_form_U(p, y_a0) > 0.0);
        p.beta = 2.0 * beta2;
        REQUIRE(closed_form_U(p, y_a0) < 0.0);
    }
    SECTION("invariant to the initial scan step") {
        for (double step : {0.01, 0.1, 1.0, 3.0}) {
            const double again = beta2_solve(params, y_a0, {step, 1e6}).value();
            REQUIRE(rel_diff(again, beta2) < 1e-8);
        }
    }
    SECTION("invariant to the deposit size") {
        REQUIRE(rel_diff(beta2_solve(params, 1.0).value(), beta2) < 1e-10);
    }
}

TEST_CASE("beta2 is nondecreasing in alpha and exceeds the fee") {
    for (double fee : {0.003, 0.01, 0.03}) {
        double prev = 0.0;
        for (double alpha : {0.2, 0.4, 0.8}) {
            const double beta2 = beta2_solve(make_params(alpha, 0.0, fee), 1.0).value();
            REQUIRE(beta2 >= prev);
            REQUIRE(beta2 > fee);
            prev = beta2;
        }
    }
}

TEST_CASE("freeze verdict") {
    const MarketParams base = make_params(0.5, 0.0, 0.003);
    const double beta2 = beta2_solve(base, 1.0).value();

    SECTION("no freeze at zero shock") {
        MarketParams p = base;
        p.beta = 0.0;
        REQUIRE_FALSE(freeze_verdict(p, 1.0));
    }
    SECTION("freeze well past beta2") {
        MarketParams p = base;
        p.beta = 2.0 * beta2;
        REQUIRE(freeze_verdict(p, 1.0));
    }
    SECTION("deposit at indifference") {
        MarketParams p = base;
        p.beta = beta2;
        REQUIRE_FALSE(freeze_verdict(p, 1.0));
    }
    SECTION("single false-to-true flip along a dense beta scan") {
        MarketParams p = base;
        int flips = 0;
        bool prev = false;
        for (int i = 0; i <= 1000; ++i) {
            p.beta = 4.0 * beta2 * i / 1000;
            const bool frozen = freeze_verdict(p, 1.0);
            if (frozen != prev) {
                ++flips;
                REQUIRE(frozen);  // only false -> true
            }
            prev = frozen;
        }
        REQUIRE(flips == 1);
    }
    SECTION("at exactly alpha=beta=f=0 the LP is indifferent and deposits") {
        REQUIRE_FALSE(freeze_verdict(make_params(0, 0, 0), 1.0));
    }
}

TEST_CASE("equilibrium report ties the pieces together") {
    MarketParams params = make_params(0.4, 0.05, 0.003);
    const EquilibriumReport report = make_equilibrium_report(params, 10.0);
    REQUIRE(report.beta1 == params.fee);
    REQUIRE(report.beta2 > report.beta1);
    REQUIRE(report.freeze == (report.u_at_beta < 0.0));
}

TEST_CASE("U changes sign exactly once past beta1") {
    for (double fee : {0.003, 0.02}) {
        for (double alpha : {0.1, 0.5, 0.9}) {
            MarketParams p = make_params(alpha, 0.0, fee);
            const double beta2 = beta2_solve(p, 1.0).value();
            int sign_changes = 0;
            double prev = 1.0;
            for (int i = 0; i <= 1000; ++i) {
                p.beta = fee + (4.0 * beta2 - fee) * i / 1000;
                const double u = closed_form_U(p, 1.0);
                if (i > 0 && (u < 0.0) != (prev < 0.0)) ++sign_changes;
                prev = u;
            }
            REQUIRE(sign_changes == 1);
        }
    }
}

TEST_CASE("gas-fee comparative statics") {
    MarketParams base;
    const std::vector<double> alphas{0.5};
    const std::vector<double> fees{0.003};

    SECTION("g2 rises with beta; tripling the deposit triples the gas") {
        const std::vector<double> betas{0.01, 0.02, 0.03, 0.05, 0.08};
        const std::vector<double> deposits{10.0, 30.0};
        const auto rows = gas_fee_statics(base, alphas, betas, fees, deposits);
        REQUIRE(rows.size() == betas.size() * deposits.size());

        double prev_g2 = -1.0;
        for (const SweepRow& row : rows) {
            if (row.y_a0 != 10.0 || !row.valid) continue;
            REQUIRE(row.g2 >= prev_g2);
            prev_g2 = row.g2;
        }
        for (size_t i = 0; i + 1 < rows.size(); i += 2) {
            REQUIRE(rows[i].y_a0 == 10.0);
            REQUIRE(rows[i + 1].y_a0 == 30.0);
            REQUIRE(std::abs(rows[i + 1].g2 - 3.0 * rows[i].g2) <=
                    1e-9 * std::max(1.0, rows[i + 1].g2));
            REQUIRE(std::abs(rows[i + 1].g1 - 3.0 * rows[i].g1) <=
                    1e-9 * std::max(1.0, rows[i + 1].g1));
        }
    }
    SECTION("with no investor trade, g2 is identically zero up to beta1 = f") {
        const std::vector<double> no_trade_alpha{0.0};
        const std::vector<double> betas{0.0, 0.001, 0.002, 0.003};
        const std::vector<double> deposits{10.0};
        const auto rows = gas_fee_statics(base, no_trade_alpha, betas, fees, deposits);
        for (const SweepRow& row : rows) {
            REQUIRE(row.g1 == 0.0);
            REQUIRE(row.g2 == 0.0);
        }
    }
    SECTION("rows at or past beta2 are flagged invalid") {
        const double beta2 = beta2_solve(make_params(0.5, 0.0, 0.003), 1.0).value();
        const std::vector<double> betas{0.5 * beta2, 2.0 * beta2};
        const std::vector<double> deposits{10.0};
        const auto rows = gas_fee_statics(base, alphas, betas, fees, deposits);
        REQUIRE(rows[0].valid);
        REQUIRE_FALSE(rows[1].valid);
    }
}
