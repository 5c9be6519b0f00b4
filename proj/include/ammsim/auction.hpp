// Execution-priority auction for one block of simultaneously submitted
// orders. Orders are sorted by gas bid, executed against the pool in that
// sequence, and arbitrage orders are re-checked for profitability at their
// turn (an arbitrage that lost the race usually has nothing left to take).
#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "ammsim/agents.hpp"
#include "ammsim/pool.hpp"

namespace ammsim {

struct ExitOrder {
    double lp_shares = 0.0;
    double deposit_fraction = 0.0;  // the LP's w_i'
    double gas_bid = 0.0;
};

struct PendingOrder {
    std::variant<ArbOrder, TradeOrder, ExitOrder> order;
    int agent_id = 0;
    double gas_bid = 0.0;
};

inline PendingOrder make_pending(ArbOrder order, int agent_id) {
    return {order, agent_id, order.gas_bid};
}
inline PendingOrder make_pending(TradeOrder order, int agent_id) {
    return {order, agent_id, order.gas_bid};
}
inline PendingOrder make_pending(ExitOrder order, int agent_id) {
    return {order, agent_id, order.gas_bid};
}

struct EquilibriumBids {
    double arb_gas = 0.0;                // winning arbitrage bid
    std::vector<double> lp_bid_caps;     // most each LP is willing to pay
};

// Second-price competition with complete information over a prize pi: the
// arbitrage bid is driven to the full surplus, and LP i never bids above the
// slice of the loss she could avoid, w_i' * pi.
inline EquilibriumBids equilibrium_bids(double pi, int m, std::span<const double> lp_fractions) {
    if (!(pi >= 0.0)) throw std::invalid_argument("negative prize");
    if (m < 2) throw std::invalid_argument("need at least two arbitrageurs");
    double sum = 0.0;
    for (double w : lp_fractions) {
        if (!(w > 0.0 && w < 1.0)) throw std::invalid_argument("lp fraction outside (0,1)");
        sum += w;
    }
    if (sum > 1.0 + 1e-9) throw std::invalid_argument("lp fractions exceed 1");
    EquilibriumBids bids;
    bids.arb_gas = pi;
    bids.lp_bid_caps.reserve(lp_fractions.size());
    for (double w : lp_fractions) bids.lp_bid_caps.push_back(w * pi);
    return bids;
}

// Descending gas bid; ties broken by ascending agent id for determinism.
inline std::vector<PendingOrder> resolve_priority(std::vector<PendingOrder> orders) {
    std::stable_sort(orders.begin(), orders.end(),
                     [](const PendingOrder& a, const PendingOrder& b) {
                         if (a.gas_bid != b.gas_bid) return a.gas_bid > b.gas_bid;
                         return a.agent_id < b.agent_id;
                     });
    return orders;
}

struct ExecutedOrder {
    PendingOrder order;
    double amount_in = 0.0;
    double amount_out = 0.0;
    double withdrawn_a = 0.0;
    double withdrawn_b = 0.0;
    double gas_paid = 0.0;
};

struct GasPayment {
    int agent_id = 0;
    double amount = 0.0;
};

struct SettlementResult {
    PoolState pool;
    std::vector<ExecutedOrder> executed;
    std::vector<GasPayment> gas_paid;  // winners only; failed orders pay nothing
};

// Executes one block of orders in priority order. Gas is a pure transfer out
// of the game: it is recorded per agent and never credited to the pool.
inline SettlementResult settle_round(const PoolState& pool, std::vector<PendingOrder> orders,
                                     TokenValues values) {
    SettlementResult result;
    result.pool = pool;
    for (PendingOrder& pending : resolve_priority(std::move(orders))) {
        ExecutedOrder record;
        record.order = pending;
        if (const ArbOrder* arb = std::get_if<ArbOrder>(&pending.order)) {
            // Re-evaluate against the current pool: earlier executions may
            // have consumed the opportunity.
            const double out = quote_out(result.pool, arb->amount_in, arb->direction);
            const double v_in = arb->direction == SwapDirection::AForB ? values.value_a
                                                                       : values.value_b;
            const double v_out = arb->direction == SwapDirection::AForB ? values.value_b
                                                                        : values.value_a;
            const double profit =
                v_out * out - v_in * (1.0 + result.pool.fee_rate) * arb->amount_in;
            if (!(profit > 0.0)) continue;  // order fails, no gas charged
            const SwapResult swapped = execute_swap(result.pool, arb->amount_in, arb->direction);
            result.pool = swapped.pool;
            record.amount_in = arb->amount_in;
            record.amount_out = swapped.amount_out;
        } else if (const TradeOrder* trade = std::get_if<TradeOrder>(&pending.order)) {
            const SwapDirection dir = trade->investor_type == InvestorType::TypeA
                                          ? SwapDirection::BForA
                                          : SwapDirection::AForB;
            const double amount_in = quote_in(result.pool, trade->amount_out_requested, dir);
            const SwapResult swapped = execute_swap(result.pool, amount_in, dir);
            result.pool = swapped.pool;
            record.amount_in = amount_in;
            record.amount_out = swapped.amount_out;
        } else {
            const ExitOrder& exit = std::get<ExitOrder>(pending.order);
            const WithdrawResult withdrawn = withdraw(result.pool, exit.lp_shares);
            result.pool = withdrawn.pool;
            record.withdrawn_a = withdrawn.amount_a;
            record.withdrawn_b = withdrawn.amount_b;
        }
        record.gas_paid = pending.gas_bid;
        result.gas_paid.push_back({pending.agent_id, pending.gas_bid});
        result.executed.push_back(record);
    }
    return result;
}

}  // namespace ammsim
