// Batch subcommands behind the CLI: each one reads a scenario config, runs
// the requested computation over the (possibly swept) parameter grid, and
// writes one CSV with a fixed, documented column schema. Output is
// deterministic: identical config and build produce byte-identical files.
#pragma once

#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ammsim/csv.hpp"
#include "ammsim/equilibrium.hpp"
#include "ammsim/oracle.hpp"
#include "ammsim/scenario.hpp"

namespace ammsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitDomainError = 2;

namespace detail {

// Index-parallel map with deterministic slot assignment; rethrows the first
// worker exception.
template <typename Fn>
void parallel_for(size_t n, Fn fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const size_t workers = std::min<size_t>(n, hw ? hw : 1);
    if (workers <= 1 || n < 16) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline std::string event_name(const EventTag& event) {
    std::string name = "S_";
    name += event.investor_type == InvestorType::TypeA ? 'A' : 'B';
    name += event.shock_target == ShockTarget::TokenA ? 'A' : 'B';
    return name;
}

struct GridPoint {
    double alpha, beta, fee, y_a0;
};

inline std::vector<GridPoint> grid(const ScenarioConfig& config) {
    std::vector<GridPoint> points;
    for (double alpha : config.alphas())
        for (double beta : config.betas())
            for (double fee : config.fees())
                for (double y_a0 : config.deposits()) points.push_back({alpha, beta, fee, y_a0});
    return points;
}

inline MarketParams at_point(const ScenarioConfig& config, const GridPoint& point) {
    MarketParams params = config.market_params();
    params.alpha = point.alpha;
    params.beta = point.beta;
    params.fee = point.fee;
    return params;
}

inline double relative_gap(double enumerated, double closed, double scale) {
    return std::abs(enumerated - closed) / std::max(std::abs(closed), 1e-12 * scale);
}

}  // namespace detail

inline void run_playout(const ScenarioConfig& config, std::ostream& out, bool use_oracle) {
    csv::Writer writer(out);
    writer.row({"event", "investor_type", "shock_target", "p_a", "p_b", "alpha", "beta", "f",
                "y_a0", "y_b0", "reserve_a_t0", "reserve_b_t0", "reserve_a_t1", "reserve_b_t1",
                "reserve_a_t2", "reserve_b_t2", "reserve_a_final", "reserve_b_final",
                "investor_q", "arb_in_t1", "g1", "arb_in_t2", "g2", "value_a_post",
                "value_b_post", "lp_payoff_total"});
    const MarketParams params = config.market_params();
    const std::array<double, 2> dep{config.y_a0, config.y_b0()};
    const PlayoutHooks hooks = use_oracle ? oracle::playout_hooks() : PlayoutHooks{};
    for (const EventTag& event : kAllEvents) {
        const Trajectory traj =
            playout(params, dep, event, kCalibratedFeeConvention, hooks);
        writer.row({detail::event_name(event),
                    event.investor_type == InvestorType::TypeA ? "A" : "B",
                    event.shock_target == ShockTarget::TokenA ? "A" : "B",
                    csv::format_number(params.p_a), csv::format_number(params.p_b),
                    csv::format_number(params.alpha), csv::format_number(params.beta),
                    csv::format_number(params.fee), csv::format_number(config.y_a0),
                    csv::format_number(config.y_b0()),
                    csv::format_number(traj.reserves_t0[0]), csv::format_number(traj.reserves_t0[1]),
                    csv::format_number(traj.reserves_t1[0]), csv::format_number(traj.reserves_t1[1]),
                    csv::format_number(traj.reserves_t2[0]), csv::format_number(traj.reserves_t2[1]),
                    csv::format_number(traj.reserves_final[0]),
                    csv::format_number(traj.reserves_final[1]),
                    csv::format_number(traj.investor_order ? traj.investor_order->amount_out_requested
                                                           : 0.0),
                    csv::format_number(traj.arb_t1 ? traj.arb_t1->amount_in : 0.0),
                    csv::format_number(traj.gas_t1),
                    csv::format_number(traj.arb_t2 ? traj.arb_t2->amount_in : 0.0),
                    csv::format_number(traj.gas_t2),
                    csv::format_number(traj.post_shock_prices.value_a),
                    csv::format_number(traj.post_shock_prices.value_b),
                    csv::format_number(traj.lp_payoff_total)});
    }
}

inline void run_expected(const ScenarioConfig& config, std::ostream& out, bool use_oracle) {
    csv::Writer writer(out);
    writer.row({"p_a", "p_b", "alpha", "beta", "f", "y_a0", "u_enumerated", "u_closed_form",
                "abs_gap", "rel_gap"});
    const auto points = detail::grid(config);
    const PlayoutHooks hooks = use_oracle ? oracle::playout_hooks() : PlayoutHooks{};
    struct Cell {
        double enumerated, closed;
    };
    std::vector<Cell> cells(points.size());
    detail::parallel_for(points.size(), [&](size_t i) {
        const MarketParams params = detail::at_point(config, points[i]);
        const std::array<double, 2> dep{points[i].y_a0, points[i].y_a0 * params.p_a / params.p_b};
        cells[i].enumerated = expected_lp_payoff(params, dep, kCalibratedFeeConvention, hooks);
        cells[i].closed = closed_form_U(params, points[i].y_a0);
    });
    for (size_t i = 0; i < points.size(); ++i) {
        const double scale = config.p_a * points[i].y_a0;
        writer.row({csv::format_number(config.p_a), csv::format_number(config.p_b),
                    csv::format_number(points[i].alpha), csv::format_number(points[i].beta),
                    csv::format_number(points[i].fee), csv::format_number(points[i].y_a0),
                    csv::format_number(cells[i].enumerated), csv::format_number(cells[i].closed),
                    csv::format_number(std::abs(cells[i].enumerated - cells[i].closed)),
                    csv::format_number(
                        detail::relative_gap(cells[i].enumerated, cells[i].closed, scale))});
    }
}

inline void run_thresholds(const ScenarioConfig& config, std::ostream& out, bool use_oracle) {
    csv::Writer writer(out);
    std::vector<std::string> header = {"p_a", "p_b", "alpha", "f", "y_a0", "beta1", "beta2"};
    if (use_oracle) {
        header.insert(header.end(), {"beta2_scan_lo", "beta2_scan_hi", "beta2_enumerated"});
    }
    writer.row(header);

    struct Point {
        double alpha, fee, y_a0;
    };
    std::vector<Point> points;
    for (double alpha : config.alphas())
        for (double fee : config.fees())
            for (double y_a0 : config.deposits()) points.push_back({alpha, fee, y_a0});

    struct Cell {
        double beta1, beta2, scan_lo, scan_hi, beta2_enum;
    };
    std::vector<Cell> cells(points.size());
    detail::parallel_for(points.size(), [&](size_t i) {
        MarketParams params = config.market_params();
        params.alpha = points[i].alpha;
        params.fee = points[i].fee;
        params.beta = 0.0;
        PoolState pool;
        pool.fee_rate = params.fee;
        pool = deposit(pool, points[i].y_a0, points[i].y_a0 * params.p_a / params.p_b, params.p_a,
                       params.p_b)
                   .pool;
        cells[i].beta1 = beta_one(pool, params);
        cells[i].beta2 = beta2_solve(params, points[i].y_a0).value();
        if (use_oracle) {
            const auto bracket = oracle::scan_beta2(params, points[i].y_a0, 1e-3);
            cells[i].scan_lo = bracket.lo;
            cells[i].scan_hi = bracket.hi;
            cells[i].beta2_enum = oracle::refine_beta2(params, points[i].y_a0, bracket);
        }
    });
    for (size_t i = 0; i < points.size(); ++i) {
        std::vector<std::string> row = {
            csv::format_number(config.p_a),      csv::format_number(config.p_b),
            csv::format_number(points[i].alpha), csv::format_number(points[i].fee),
            csv::format_number(points[i].y_a0),  csv::format_number(cells[i].beta1),
            csv::format_number(cells[i].beta2)};
        if (use_oracle) {
            row.push_back(csv::format_number(cells[i].scan_lo));
            row.push_back(csv::format_number(cells[i].scan_hi));
            row.push_back(csv::format_number(cells[i].beta2_enum));
        }
        writer.row(row);
    }
}

inline void run_freeze_map(const ScenarioConfig& config, std::ostream& out) {
    csv::Writer writer(out);
    writer.row({"p_a", "p_b", "alpha", "beta", "f", "y_a0", "u", "freeze"});
    const auto points = detail::grid(config);
    struct Cell {
        double u;
        bool freeze;
    };
    std::vector<Cell> cells(points.size());
    detail::parallel_for(points.size(), [&](size_t i) {
        const MarketParams params = detail::at_point(config, points[i]);
        cells[i].u = closed_form_U(params, points[i].y_a0);
        cells[i].freeze = cells[i].u < 0.0;
    });
    for (size_t i = 0; i < points.size(); ++i) {
        writer.row({csv::format_number(config.p_a), csv::format_number(config.p_b),
                    csv::format_number(points[i].alpha), csv::format_number(points[i].beta),
                    csv::format_number(points[i].fee), csv::format_number(points[i].y_a0),
                    csv::format_number(cells[i].u), csv::format_flag(cells[i].freeze)});
    }
}

inline void run_gas_sweep(const ScenarioConfig& config, std::ostream& out) {
    csv::Writer writer(out);
    writer.row({"p_a", "p_b", "alpha", "beta", "f", "y_a0", "u", "g1", "g2", "beta2", "valid"});
    const auto alphas = config.alphas();
    const auto betas = config.betas();
    const auto fees = config.fees();
    const auto deposits = config.deposits();
    const auto rows = gas_fee_statics(config.market_params(), alphas, betas, fees, deposits);
    for (const SweepRow& row : rows) {
        writer.row({csv::format_number(config.p_a), csv::format_number(config.p_b),
                    csv::format_number(row.alpha), csv::format_number(row.beta),
                    csv::format_number(row.fee), csv::format_number(row.y_a0),
                    csv::format_number(row.u), csv::format_number(row.g1),
                    csv::format_number(row.g2), csv::format_number(row.beta2),
                    csv::format_flag(row.valid)});
    }
}

struct CalibrationSummary {
    double max_rel_gap_gross = 0.0;
    double max_rel_gap_side_bucket = 0.0;
    bool gross_matches = false;
    bool side_bucket_matches = false;
};

inline CalibrationSummary run_calibrate(const ScenarioConfig& config, std::ostream& out) {
    csv::Writer writer(out);
    writer.row({"convention", "alpha", "beta", "f", "u_enumerated", "u_closed_form", "abs_gap",
                "rel_gap"});
    const auto points = detail::grid(config);
    constexpr double kTolerance = 1e-6;
    CalibrationSummary summary;
    for (FeeConvention convention : {FeeConvention::GrossReserve, FeeConvention::SideBucket}) {
        const std::string name =
            convention == FeeConvention::GrossReserve ? "gross_reserve" : "side_bucket";
        std::vector<double> gaps(points.size());
        struct Cell {
            double enumerated, closed;
        };
        std::vector<Cell> cells(points.size());
        detail::parallel_for(points.size(), [&](size_t i) {
            const MarketParams params = detail::at_point(config, points[i]);
            const std::array<double, 2> dep{points[i].y_a0,
                                            points[i].y_a0 * params.p_a / params.p_b};
            cells[i].enumerated = expected_lp_payoff(params, dep, convention);
            cells[i].closed = closed_form_U(params, points[i].y_a0);
            gaps[i] = detail::relative_gap(cells[i].enumerated, cells[i].closed,
                                           params.p_a * points[i].y_a0);
        });
        double max_gap = 0.0;
        for (size_t i = 0; i < points.size(); ++i) {
            max_gap = std::max(max_gap, gaps[i]);
            writer.row({name, csv::format_number(points[i].alpha),
                        csv::format_number(points[i].beta), csv::format_number(points[i].fee),
                        csv::format_number(cells[i].enumerated),
                        csv::format_number(cells[i].closed),
                        csv::format_number(std::abs(cells[i].enumerated - cells[i].closed)),
                        csv::format_number(gaps[i])});
        }
        if (convention == FeeConvention::GrossReserve) {
            summary.max_rel_gap_gross = max_gap;
            summary.gross_matches = max_gap < kTolerance;
        } else {
            summary.max_rel_gap_side_bucket = max_gap;
            summary.side_bucket_matches = max_gap < kTolerance;
        }
    }
    return summary;
}

// Entry point shared by the binary and the tests. Returns a process exit
// code: 0 success, 1 config error, 2 domain error.
inline int run(const std::string& subcommand, const std::string& config_path,
               const std::string& out_path, bool use_oracle, std::ostream& diagnostics = std::cerr,
               std::ostream* info = nullptr) {
    try {
        const ScenarioConfig config = parse_scenario_file(config_path);
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw ConfigError("cannot open output file '" + out_path + "'");

        if (subcommand == "playout") {
            run_playout(config, out, use_oracle);
        } else if (subcommand == "expected") {
            run_expected(config, out, use_oracle);
        } else if (subcommand == "thresholds") {
            run_thresholds(config, out, use_oracle);
        } else if (subcommand == "freeze-map") {
            run_freeze_map(config, out);
        } else if (subcommand == "gas-sweep") {
            run_gas_sweep(config, out);
        } else if (subcommand == "calibrate") {
            const CalibrationSummary summary = run_calibrate(config, out);
            if (info) {
                *info << "calibration: gross_reserve max_rel_gap="
                      << csv::format_number(summary.max_rel_gap_gross)
                      << (summary.gross_matches ? " (matches)" : " (does not match)") << "\n";
                *info << "calibration: side_bucket max_rel_gap="
                      << csv::format_number(summary.max_rel_gap_side_bucket)
                      << (summary.side_bucket_matches ? " (matches)" : " (does not match)")
                      << "\n";
            }
        } else {
            throw ConfigError("unknown subcommand '" + subcommand + "'");
        }
        return kExitOk;
    } catch (const ConfigError& error) {
        diagnostics << "config error: " << error.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& error) {
        diagnostics << "error: " << error.what() << "\n";
        return kExitDomainError;
    }
}

}  // namespace ammsim::cli
