// Constant-product pool state machine: swaps, fee accrual, value-matched
// deposits, pro-rata withdrawals, spot price. All operations are pure: they
// take a PoolState by const reference and return a new one.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ammsim {

enum class SwapDirection { AForB, BForA };

// Where the swap fee ends up. GrossReserve books the full fee into the
// pricing reserve at swap time; SideBucket keeps fee tokens next to the pool
// and pays them out pro rata at withdrawal, leaving swap pricing unaffected.
// The calibration suite (see tests and the `calibrate` CLI subcommand) selects
// GrossReserve; SideBucket is retained as the rejected alternative.
enum class FeeConvention { GrossReserve, SideBucket };

inline constexpr FeeConvention kCalibratedFeeConvention = FeeConvention::GrossReserve;

// Fraction of the collected fee credited to liquidity providers. The model
// keeps all of it in the pool; a platform cut would lower this.
inline constexpr double kRetainedFeeFraction = 1.0;

struct PoolState {
    double reserve_a = 0.0;
    double reserve_b = 0.0;
    // Fee tokens held outside the pricing reserves. Always zero under
    // GrossReserve.
    double fee_bucket_a = 0.0;
    double fee_bucket_b = 0.0;
    double total_shares = 0.0;
    double fee_rate = 0.0;  // fraction of input amount, in [0, 1)
    FeeConvention convention = kCalibratedFeeConvention;

    bool empty() const { return total_shares == 0.0; }
    // Tokens owned by LPs in aggregate, including any side-bucket fees.
    double owned_a() const { return reserve_a + fee_bucket_a; }
    double owned_b() const { return reserve_b + fee_bucket_b; }
};

inline double pool_product(const PoolState& pool) {
    return pool.reserve_a * pool.reserve_b;
}

namespace detail {

inline void require_liquidity(const PoolState& pool) {
    if (!(pool.reserve_a > 0.0) || !(pool.reserve_b > 0.0)) {
        throw std::invalid_argument("no liquidity");
    }
}

inline double in_reserve(const PoolState& pool, SwapDirection dir) {
    return dir == SwapDirection::AForB ? pool.reserve_a : pool.reserve_b;
}

inline double out_reserve(const PoolState& pool, SwapDirection dir) {
    return dir == SwapDirection::AForB ? pool.reserve_b : pool.reserve_a;
}

inline bool close_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace detail

// Output amount for a fee-free constant-product swap:
// (r_in + amount_in)(r_out - out) = r_in * r_out. Pure query; callers add the
// fee on the input side.
inline double quote_out(const PoolState& pool, double amount_in, SwapDirection dir) {
    detail::require_liquidity(pool);
    if (!(amount_in >= 0.0)) throw std::invalid_argument("negative amount_in");
    const double r_in = detail::in_reserve(pool, dir);
    const double r_out = detail::out_reserve(pool, dir);
    return r_out - r_in * r_out / (r_in + amount_in);
}

// Input amount needed to take amount_out of the output token (fee excluded).
inline double quote_in(const PoolState& pool, double amount_out, SwapDirection dir) {
    detail::require_liquidity(pool);
    if (!(amount_out >= 0.0)) throw std::invalid_argument("negative amount_out");
    const double r_in = detail::in_reserve(pool, dir);
    const double r_out = detail::out_reserve(pool, dir);
    if (!(amount_out < r_out)) throw std::invalid_argument("cannot drain pool");
    return r_in * amount_out / (r_out - amount_out);
}

struct SwapResult {
    PoolState pool;
    double amount_out = 0.0;
    double fee_paid = 0.0;  // in input-token units
};

// Executes a swap. The trader supplies amount_in * (1 + fee_rate) of the
// input token in total; the swap is priced on amount_in alone.
inline SwapResult execute_swap(const PoolState& pool, double amount_in, SwapDirection dir) {
    const double amount_out = quote_out(pool, amount_in, dir);
    const double r_out = detail::out_reserve(pool, dir);
    if (!(amount_out < r_out) && amount_in > 0.0) {
        throw std::invalid_argument("cannot drain pool");
    }
    const double fee = pool.fee_rate * amount_in;
    const double retained = kRetainedFeeFraction * fee;

    SwapResult result;
    result.pool = pool;
    result.amount_out = amount_out;
    result.fee_paid = fee;

    double booked_in = amount_in;
    double bucket_in = 0.0;
    if (pool.convention == FeeConvention::GrossReserve) {
        booked_in += retained;
    } else {
        bucket_in = retained;
    }
    if (dir == SwapDirection::AForB) {
        result.pool.reserve_a += booked_in;
        result.pool.fee_bucket_a += bucket_in;
        result.pool.reserve_b -= amount_out;
    } else {
        result.pool.reserve_b += booked_in;
        result.pool.fee_bucket_b += bucket_in;
        result.pool.reserve_a -= amount_out;
    }
    return result;
}

struct DepositResult {
    PoolState pool;
    double shares_minted = 0.0;
};

// Deposits equal-value amounts of both tokens. For an empty pool the amounts
// define the initial ratio and mint one share by convention.
inline DepositResult deposit(const PoolState& pool, double amount_a, double amount_b,
                             double p_a, double p_b) {
    if (!(amount_a >= 0.0) || !(amount_b >= 0.0)) {
        throw std::invalid_argument("negative deposit amount");
    }
    if (!(p_a > 0.0) || !(p_b > 0.0)) throw std::invalid_argument("nonpositive price");
    if (amount_a == 0.0 && amount_b == 0.0) return {pool, 0.0};

    if (!detail::close_rel(amount_a * p_a, amount_b * p_b, 1e-9)) {
        throw std::invalid_argument("value mismatch");
    }
    DepositResult result;
    result.pool = pool;
    if (pool.empty()) {
        result.pool.reserve_a = amount_a;
        result.pool.reserve_b = amount_b;
        result.pool.total_shares = 1.0;
        result.shares_minted = 1.0;
        return result;
    }
    if (!detail::close_rel(amount_a * pool.reserve_b, amount_b * pool.reserve_a, 1e-9)) {
        throw std::invalid_argument("ratio mismatch");
    }
    result.shares_minted = pool.total_shares * amount_a / pool.reserve_a;
    result.pool.reserve_a += amount_a;
    result.pool.reserve_b += amount_b;
    result.pool.total_shares += result.shares_minted;
    return result;
}

struct WithdrawResult {
    PoolState pool;
    double amount_a = 0.0;
    double amount_b = 0.0;
};

// Redeems shares for the pro-rata slice of reserves (and of any side-bucket
// fees).
inline WithdrawResult withdraw(const PoolState& pool, double shares) {
    if (!(shares >= 0.0)) throw std::invalid_argument("negative shares");
    if (shares > pool.total_shares) throw std::invalid_argument("shares exceed total");
    WithdrawResult result;
    result.pool = pool;
    if (shares == 0.0) return result;

    const double fraction = shares / pool.total_shares;
    result.amount_a = fraction * pool.owned_a();
    result.amount_b = fraction * pool.owned_b();
    result.pool.reserve_a -= fraction * pool.reserve_a;
    result.pool.reserve_b -= fraction * pool.reserve_b;
    result.pool.fee_bucket_a -= fraction * pool.fee_bucket_a;
    result.pool.fee_bucket_b -= fraction * pool.fee_bucket_b;
    result.pool.total_shares -= shares;
    if (result.pool.total_shares == 0.0) {
        result.pool.reserve_a = 0.0;
        result.pool.reserve_b = 0.0;
        result.pool.fee_bucket_a = 0.0;
        result.pool.fee_bucket_b = 0.0;
    }
    return result;
}

// Reserve ratio, the price of token B in token A units for an infinitesimal
// trade.
inline double spot_price(const PoolState& pool) {
    detail::require_liquidity(pool);
    return pool.reserve_a / pool.reserve_b;
}

struct LpAccount {
    double shares = 0.0;
    double deposit_fraction = 0.0;  // share of the aggregate t=0 deposit
};

}  // namespace ammsim
