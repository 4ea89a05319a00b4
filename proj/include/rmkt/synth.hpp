#pragma once

// Deterministic synthetic datasets driven by the LMSR engine, so every
// pipeline stage can run without the real data.

#include <rmkt/dataset.hpp>
#include <rmkt/lmsr.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace rmkt {

/// Platform-independent draws on top of mt19937_64 (the standard
/// distributions are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
    double normal() {
        double const u1 = 1.0 - uniform();  // (0, 1]
        double const u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::mt19937_64 engine_;
};

struct SynthConfig {
    std::uint64_t seed = 7;
    std::size_t markets = 20;
    std::size_t traders = 30;
    double liquidity = default_liquidity;
    double endowment = default_endowment;
    std::size_t min_trades = 26;
    std::size_t max_trades = 60;
    double survey_rate = 0.7;  // chance a trader answers the survey for a finding
    Timestamp start = Timestamp{1'420'070'400'000};  // 2015-01-01T00:00:00Z
};

namespace detail {

inline std::string numbered(char const* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%03zu", prefix, i + 1);
    return buf;
}

inline double round_to(double v, double step) { return std::round(v / step) * step; }
// Decimal places rather than a step, so the result prints without float noise.
inline double truncate_to(double v, int places) {
    double const scale = std::pow(10.0, places);
    return std::trunc(v * scale) / scale;
}

}  // namespace detail

/// Findings cycle through the four projects. Each has a latent replication
/// probability; forecasters hold noisy beliefs about it, answer the survey,
/// and trade part of the way from the current price toward their belief.
/// Trades are front-loaded in time and carry exact engine quantities and
/// prices, so simulated replay with the same liquidity reproduces them.
inline Dataset synthesize(SynthConfig const& cfg) {
    if (cfg.markets == 0 || cfg.traders == 0) fail(Errc::InvalidValue, "synth needs at least one market and trader");
    if (cfg.min_trades == 0 || cfg.max_trades < cfg.min_trades) fail(Errc::InvalidValue, "bad trade-count range");
    Rng rng(cfg.seed);

    std::vector<std::string> trader_ids;
    std::vector<double> noise;
    for (std::size_t j = 0; j < cfg.traders; ++j) {
        trader_ids.push_back(detail::numbered("T", j));
        noise.push_back(rng.uniform(0.05, 0.3));
    }

    std::vector<Finding> findings;
    std::vector<SurveyResponse> surveys;
    std::vector<Trade> trades;
    std::set<std::string> active_traders;

    constexpr std::int64_t hour = 3'600'000;
    for (std::size_t m = 0; m < cfg.markets; ++m) {
        Finding f;
        f.id = detail::numbered("F", m);
        f.project = all_projects[m % 4];
        double const latent = rng.uniform(0.1, 0.9);
        f.outcome = rng.uniform() < latent ? 1 : 0;
        double const log10p = f.outcome ? -rng.uniform(1.0, 5.0) : -rng.uniform(0.6, 3.0);
        f.original_p = detail::round_to(std::pow(10.0, log10p), 1e-6);
        if (*f.original_p <= 0.0) f.original_p = 1e-6;
        f.p_category = categorize_pvalue(*f.original_p);
        std::int64_t const duration_hours = f.project == Project::EERP ? 10 * 24 : 14 * 24;
        f.market_open = Timestamp{cfg.start.ms + static_cast<std::int64_t>(m % 4) * 30 * 24 * hour};
        f.market_close = Timestamp{f.market_open.ms + duration_hours * hour};

        std::vector<double> beliefs(cfg.traders);
        for (std::size_t j = 0; j < cfg.traders; ++j)
            beliefs[j] = std::clamp(detail::round_to(latent + noise[j] * rng.normal(), 0.01), 0.02, 0.98);

        std::set<std::string> ids(trader_ids.begin(), trader_ids.end());
        MarketState market(cfg.liquidity, cfg.endowment, ids, f.id);
        std::size_t const n_trades = cfg.min_trades + rng.index(cfg.max_trades - cfg.min_trades + 1);
        std::vector<std::int64_t> times;
        for (std::size_t k = 0; k < n_trades; ++k) {
            double const u = rng.uniform();
            times.push_back(f.market_open.ms + 1000 * static_cast<std::int64_t>(u * u * u * static_cast<double>(duration_hours) * 3600.0));
        }
        std::sort(times.begin(), times.end());

        for (auto ts : times) {
            std::size_t const j = rng.index(cfg.traders);
            auto const& who = trader_ids[j];
            double const view = std::clamp(beliefs[j] + 0.03 * rng.normal(), 0.01, 0.99);
            double const p = market.quote().price_yes;
            double const target = p + rng.uniform(0.3, 0.7) * (view - p);
            if (std::abs(target - p) < 1e-4) continue;
            auto const& ledger = market.ledger(who);

            Side side;
            double qty;
            if (target > p) {
                double const sell_no = lmsr::quantity_to_reach(cfg.liquidity, market.q_yes(), market.q_no(), Side::No, 1.0 - target);
                if (ledger.no_held > 0.0) {
                    side = Side::No;
                    qty = std::max(sell_no, -ledger.no_held);
                } else {
                    side = Side::Yes;
                    qty = lmsr::quantity_to_reach(cfg.liquidity, market.q_yes(), market.q_no(), Side::Yes, target);
                }
            } else {
                double const sell_yes = lmsr::quantity_to_reach(cfg.liquidity, market.q_yes(), market.q_no(), Side::Yes, target);
                if (ledger.yes_held > 0.0) {
                    side = Side::Yes;
                    qty = std::max(sell_yes, -ledger.yes_held);
                } else {
                    side = Side::No;
                    qty = lmsr::quantity_to_reach(cfg.liquidity, market.q_yes(), market.q_no(), Side::No, 1.0 - target);
                }
            }
            qty = detail::truncate_to(qty, 4);
            // Spend at most half the remaining budget on one trade.
            while (qty > 0.0 && market.cost_to_trade(side, qty) > 0.5 * ledger.tokens) qty = detail::truncate_to(qty / 2, 4);
            if (qty == 0.0 || (qty < 0.0 && -qty > (side == Side::Yes ? ledger.yes_held : ledger.no_held))) continue;

            auto t = market.execute(who, side, qty, Timestamp{ts});
            t.row = trades.size() + 1;
            trades.push_back(std::move(t));
            active_traders.insert(who);
        }
        if (trades.empty() || trades.back().finding_id != f.id) {
            // Guarantee a nonempty market.
            auto t = market.execute(trader_ids[0], Side::Yes, 1.0, Timestamp{f.market_open.ms + hour});
            t.row = trades.size() + 1;
            trades.push_back(std::move(t));
            active_traders.insert(trader_ids[0]);
        }

        for (std::size_t j = 0; j < cfg.traders; ++j)
            if (rng.uniform() < cfg.survey_rate)
                surveys.push_back({f.id, trader_ids[j], beliefs[j], 0});
        findings.push_back(std::move(f));
    }

    // Survey data only covers participants who traded somewhere; every finding
    // keeps at least one response.
    std::vector<SurveyResponse> kept;
    std::set<std::string> has_survey;
    for (auto& s : surveys)
        if (active_traders.contains(s.forecaster_id)) {
            has_survey.insert(s.finding_id);
            kept.push_back(std::move(s));
        }
    for (auto const& f : findings) {
        if (has_survey.contains(f.id)) continue;
        for (auto const& t : trades)
            if (t.finding_id == f.id) {
                kept.push_back({f.id, t.trader_id, 0.5, 0});
                break;
            }
    }
    std::stable_sort(kept.begin(), kept.end(), [](auto const& a, auto const& b) { return a.finding_id < b.finding_id; });
    for (std::size_t i = 0; i < kept.size(); ++i) kept[i].row = i + 1;
    for (std::size_t i = 0; i < findings.size(); ++i) findings[i].row = i + 1;

    return Dataset(std::move(findings), std::move(kept), std::move(trades));
}

}  // namespace rmkt
