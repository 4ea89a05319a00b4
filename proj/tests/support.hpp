#pragma once

// Fixtures and random generators shared by the unit, property and
// acceptance tests.

#include <rmkt/rmkt.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fx {

using namespace rmkt;

/// Test-side generator. Deliberately not rmkt::Rng so the library's own
/// sampling code is never used to check itself.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    bool coin(double p = 0.5) { return uniform() < p; }
    double normal(double mu = 0.0, double sigma = 1.0) { return std::normal_distribution<double>(mu, sigma)(engine_); }

    std::vector<double> beliefs(std::size_t n) {
        std::vector<double> v(n);
        for (auto& b : v) b = coin(0.15) ? static_cast<double>(integer(0, 20)) / 20.0 : uniform();
        return v;
    }
    std::vector<double> positive(std::size_t n, double lo = 0.01, double hi = 5.0) {
        std::vector<double> v(n);
        for (auto& w : v) w = uniform(lo, hi);
        return v;
    }
    template <class T>
    void shuffle(std::vector<T>& v) {
        std::shuffle(v.begin(), v.end(), engine_);
    }

private:
    std::mt19937_64 engine_;
};

inline Timestamp at_hours(double h) {
    return Timestamp{1'577'836'800'000 + static_cast<std::int64_t>(h * 3'600'000.0)};  // from 2020-01-01
}

inline Finding finding(std::string id, Project project, int outcome, double close_hours = 336.0,
                       PValueCategory cat = PValueCategory::AboveThreshold) {
    Finding f;
    f.id = std::move(id);
    f.project = project;
    f.outcome = outcome;
    f.p_category = cat;
    f.market_open = at_hours(0);
    f.market_close = at_hours(close_hours);
    return f;
}

inline Trade trade(std::string finding_id, std::string trader, double hours, double price) {
    Trade t;
    t.finding_id = std::move(finding_id);
    t.trader_id = std::move(trader);
    t.timestamp = at_hours(hours);
    t.post_trade_price = price;
    return t;
}

inline SurveyResponse survey(std::string finding_id, std::string forecaster, double belief) {
    return {std::move(finding_id), std::move(forecaster), belief, 0};
}

/// Numbers rows 1..n in order, as loading would.
template <class T>
std::vector<T> numbered(std::vector<T> v) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i].row = i + 1;
    return v;
}

inline Dataset make(std::vector<Finding> f, std::vector<SurveyResponse> s, std::vector<Trade> t) {
    return Dataset(numbered(std::move(f)), numbered(std::move(s)), numbered(std::move(t)));
}

// Two findings, four survey responses and six trades.
inline constexpr char const* outcomes_csv =
    "finding_id,project,outcome,p_value_category,original_p_value,market_open,market_close\n"
    "A1,RPP,1,AtOrBelowThreshold,0.001,2020-01-01T00:00:00Z,2020-01-15T00:00:00Z\n"
    "B2,EERP,0,AboveThreshold,0.03,2020-01-01T00:00:00Z,2020-01-11T00:00:00Z\n";

inline constexpr char const* surveys_csv =
    "finding_id,forecaster_id,belief\n"
    "A1,u1,0.8\n"
    "A1,u2,0.6\n"
    "B2,u1,0.3\n"
    "B2,u2,0.5\n";

inline constexpr char const* trades_csv =
    "finding_id,trader_id,timestamp,side,quantity,post_trade_price\n"
    "A1,u1,2020-01-01T01:00:00Z,YES,10,0.52497918747894\n"
    "A1,u2,2020-01-02T00:00:00Z,YES,20,0.574442516811659\n"
    "A1,u1,2020-01-03T00:00:00Z,NO,5,0.5621765008857981\n"
    "B2,u2,2020-01-01T02:00:00Z,NO,10,0.47502081252106\n"
    "B2,u1,2020-01-01T03:00:00Z,NO,10,0.45016600268752216\n"
    "B2,u2,2020-01-04T00:00:00Z,YES,5,0.46257015465625045\n";

inline LoadResult load_fixture(std::string const& outcomes = outcomes_csv, std::string const& surveys = surveys_csv,
                               std::string const& trades = trades_csv) {
    return parse_dataset(outcomes, surveys, trades, ColumnMapping{});
}

}  // namespace fx
