#pragma once

// Binary-outcome prediction market run by a logarithmic-market-scoring-rule
// market maker. Cost function C(q) = b * ln(exp(q_yes/b) + exp(q_no/b));
// the instantaneous YES price is the softmax weight of q_yes.

#include <rmkt/dataset.hpp>
#include <rmkt/error.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rmkt {

inline constexpr double default_liquidity = 100.0;
inline constexpr double default_endowment = 100.0;

namespace lmsr {

/// ln(1 + e^z) without overflow.
inline double softplus(double z) noexcept { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double log_sum_exp(double a, double b) noexcept {
    double const m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

inline double cost(double liquidity, double q_yes, double q_no) noexcept {
    return liquidity * log_sum_exp(q_yes / liquidity, q_no / liquidity);
}

/// Price of the outcome holding `q_self` against `q_other`. Clamped into the
/// open interval so extreme states still quote strictly inside (0,1).
inline double price(double liquidity, double q_self, double q_other) noexcept {
    double const z = (q_self - q_other) / liquidity;
    double const p = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
    return std::clamp(p, std::numeric_limits<double>::min(), hi);
}

/// C(q + quantity * e_side) - C(q), evaluated relative to the current prices
/// so that large |q| do not cancel.
inline double trade_cost(double liquidity, double q_yes, double q_no, Side side, double quantity) noexcept {
    if (quantity == 0.0) return 0.0;
    double const q_self = side == Side::Yes ? q_yes : q_no;
    double const q_other = side == Side::Yes ? q_no : q_yes;
    double const a = quantity / liquidity;
    double const log_p_self = -softplus((q_other - q_self) / liquidity);
    double const log_p_other = -softplus((q_self - q_other) / liquidity);
    if (std::abs(a) <= 1.0) return liquidity * std::log1p(std::exp(log_p_self) * std::expm1(a));
    return liquidity * log_sum_exp(log_p_self + a, log_p_other);
}

/// Signed quantity of `side` that moves that side's price to `target`.
inline double quantity_to_reach(double liquidity, double q_yes, double q_no, Side side, double target) noexcept {
    double const logit = std::log(target) - std::log1p(-target);
    double const q_self = side == Side::Yes ? q_yes : q_no;
    double const q_other = side == Side::Yes ? q_no : q_yes;
    return liquidity * logit - (q_self - q_other);
}

}  // namespace lmsr

struct Ledger {
    double tokens = 0.0;
    double yes_held = 0.0;
    double no_held = 0.0;

    friend bool operator==(Ledger const&, Ledger const&) = default;
};

/// `cost` is the current value of the cost function C(q), in tokens.
struct Quote {
    double price_yes = 0.5;
    double price_no = 0.5;
    double cost = 0.0;
};

enum class MarketStatus { Open, Settled };

class MarketState {
public:
    MarketState(double liquidity, double endowment, std::set<std::string> const& traders, std::string market_id = {})
        : liquidity_(liquidity), endowment_(endowment), market_id_(std::move(market_id)) {
        if (!(liquidity > 0.0) || !std::isfinite(liquidity))
            fail(Errc::NonPositiveLiquidity, "liquidity parameter must be positive, got " + csv::format_double(liquidity));
        if (!(endowment >= 0.0)) fail(Errc::InvalidValue, "endowment must be nonnegative");
        for (auto const& t : traders) ledgers_.emplace(t, Ledger{endowment, 0.0, 0.0});
    }

    [[nodiscard]] double liquidity() const noexcept { return liquidity_; }
    [[nodiscard]] double endowment() const noexcept { return endowment_; }
    [[nodiscard]] double q_yes() const noexcept { return q_yes_; }
    [[nodiscard]] double q_no() const noexcept { return q_no_; }
    [[nodiscard]] MarketStatus status() const noexcept { return status_; }
    [[nodiscard]] std::optional<int> outcome() const noexcept { return outcome_; }
    [[nodiscard]] std::string const& market_id() const noexcept { return market_id_; }
    [[nodiscard]] std::map<std::string, Ledger> const& ledgers() const noexcept { return ledgers_; }
    /// Tokens paid into the market maker by trades, net of sells.
    [[nodiscard]] double maker_intake() const noexcept { return maker_intake_; }
    /// Tokens paid out by the market maker at settlement.
    [[nodiscard]] double maker_payout() const noexcept { return maker_payout_; }

    [[nodiscard]] Ledger const& ledger(std::string const& trader) const {
        auto it = ledgers_.find(trader);
        if (it == ledgers_.end()) fail(Errc::InvalidValue, "unknown trader '" + trader + "'");
        return it->second;
    }

    [[nodiscard]] Quote quote() const {
        require_open();
        return {lmsr::price(liquidity_, q_yes_, q_no_), lmsr::price(liquidity_, q_no_, q_yes_),
                lmsr::cost(liquidity_, q_yes_, q_no_)};
    }

    [[nodiscard]] double cost_to_trade(Side side, double quantity) const {
        require_open();
        return lmsr::trade_cost(liquidity_, q_yes_, q_no_, side, quantity);
    }

    /// Buys (quantity > 0) or sells (quantity < 0) contracts of `side`.
    /// Leaves the state untouched when it throws.
    Trade execute(std::string const& trader, Side side, double quantity, Timestamp timestamp) {
        require_open();
        if (!std::isfinite(quantity) || quantity == 0.0)
            fail(Errc::InvalidValue, "trade quantity must be finite and nonzero");
        auto it = ledgers_.find(trader);
        if (it == ledgers_.end()) fail(Errc::InvalidValue, "unknown trader '" + trader + "'");
        Ledger& ledger = it->second;
        double& held = side == Side::Yes ? ledger.yes_held : ledger.no_held;
        if (held + quantity < 0.0)
            fail(Errc::InsufficientHoldings, "trader '" + trader + "' holds " + csv::format_double(held) + " " +
                                                 std::string(to_string(side)) + " contracts, cannot sell " +
                                                 csv::format_double(-quantity));
        double const cost = lmsr::trade_cost(liquidity_, q_yes_, q_no_, side, quantity);
        if (ledger.tokens - cost < 0.0)
            fail(Errc::InsufficientTokens, "trader '" + trader + "' has " + csv::format_double(ledger.tokens) +
                                               " tokens, trade costs " + csv::format_double(cost));
        ledger.tokens -= cost;
        held += quantity;
        (side == Side::Yes ? q_yes_ : q_no_) += quantity;
        maker_intake_ += cost;

        Trade t;
        t.finding_id = market_id_;
        t.trader_id = trader;
        t.timestamp = timestamp;
        t.side = side;
        t.quantity = quantity;
        t.post_trade_price = lmsr::price(liquidity_, q_yes_, q_no_);
        t.row = ++sequence_;
        return t;
    }

    /// Pays one token per contract of the realized outcome.
    std::map<std::string, double> settle(int outcome) {
        require_open();
        if (outcome != 0 && outcome != 1) fail(Errc::InvalidValue, "outcome must be 0 or 1");
        std::map<std::string, double> final_tokens;
        for (auto& [trader, ledger] : ledgers_) {
            double const payout = outcome == 1 ? ledger.yes_held : ledger.no_held;
            ledger.tokens += payout;
            maker_payout_ += payout;
            final_tokens.emplace(trader, ledger.tokens);
        }
        status_ = MarketStatus::Settled;
        outcome_ = outcome;
        return final_tokens;
    }

private:
    void require_open() const {
        if (status_ != MarketStatus::Open) fail(Errc::MarketSettled, "market '" + market_id_ + "' is settled");
    }

    double liquidity_;
    double endowment_;
    std::string market_id_;
    double q_yes_ = 0.0;
    double q_no_ = 0.0;
    double maker_intake_ = 0.0;
    double maker_payout_ = 0.0;
    std::size_t sequence_ = 0;
    MarketStatus status_ = MarketStatus::Open;
    std::optional<int> outcome_;
    std::map<std::string, Ledger> ledgers_;
};

inline MarketState new_market(double liquidity, double endowment, std::set<std::string> const& traders,
                              std::string market_id = {}) {
    return MarketState(liquidity, endowment, traders, std::move(market_id));
}

inline Quote price(MarketState const& ms) { return ms.quote(); }

inline double cost_to_trade(MarketState const& ms, Side side, double quantity) {
    return ms.cost_to_trade(side, quantity);
}

/// Value-semantics form: returns the successor state and the emitted trade.
inline std::pair<MarketState, Trade> execute_trade(MarketState ms, std::string const& trader, Side side,
                                                   double quantity, Timestamp timestamp) {
    Trade t = ms.execute(trader, side, quantity, timestamp);
    return {std::move(ms), std::move(t)};
}

inline std::map<std::string, double> settle(MarketState& ms, int outcome) { return ms.settle(outcome); }

// ---------------------------------------------------------------------------
// Replay

struct PriceTaking {};

struct Simulated {
    double liquidity = default_liquidity;
    double endowment = default_endowment;
};

using ReplayMode = std::variant<PriceTaking, Simulated>;

struct PricePoint {
    Timestamp timestamp;
    double price = 0.5;
};

/// Price path of one market. PriceTaking returns the recorded prices;
/// Simulated re-executes the recorded (side, quantity) pairs through a fresh
/// market maker. The last point is the market's closing forecast.
inline std::vector<PricePoint> replay(Dataset const& ds, std::string_view finding_id, ReplayMode const& mode) {
    auto const trades = trades_for(ds, finding_id);
    if (trades.empty()) fail(Errc::EmptyMarket, "market '" + std::string(finding_id) + "' has no trades");
    std::vector<PricePoint> path;
    path.reserve(trades.size());

    if (std::holds_alternative<PriceTaking>(mode)) {
        for (auto const& t : trades) path.push_back({t.timestamp, t.post_trade_price});
        return path;
    }

    auto const& sim = std::get<Simulated>(mode);
    std::set<std::string> traders;
    for (auto const& t : trades) traders.insert(t.trader_id);
    MarketState market(sim.liquidity, sim.endowment, traders, std::string(finding_id));
    for (auto const& t : trades) {
        if (!t.side || !t.quantity)
            fail(Errc::InvalidValue, "trade row " + std::to_string(t.row) + " of '" + std::string(finding_id) +
                                         "' lacks side/quantity needed for simulated replay");
        auto const emitted = market.execute(t.trader_id, *t.side, *t.quantity, t.timestamp);
        path.push_back({t.timestamp, emitted.post_trade_price});
    }
    return path;
}

}  // namespace rmkt
