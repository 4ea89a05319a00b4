#pragma once

// Per-finding forecasts: the closing market price and four ways of pooling
// survey beliefs.

#include <rmkt/csv.hpp>
#include <rmkt/dataset.hpp>
#include <rmkt/error.hpp>
#include <rmkt/stats.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace rmkt {

enum class Method { MarketFinalPrice, SurveyMean, SurveyMedian, SurveyVoting, SurveyVarWeighted };

inline constexpr Method all_methods[] = {Method::MarketFinalPrice, Method::SurveyMean, Method::SurveyMedian,
                                         Method::SurveyVoting, Method::SurveyVarWeighted};

constexpr std::string_view to_string(Method m) noexcept {
    switch (m) {
    case Method::MarketFinalPrice: return "market";
    case Method::SurveyMean: return "survey_mean";
    case Method::SurveyMedian: return "survey_median";
    case Method::SurveyVoting: return "survey_voting";
    case Method::SurveyVarWeighted: return "survey_var_weighted";
    }
    return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
    for (auto m : all_methods)
        if (to_string(m) == s) return m;
    return std::nullopt;
}

struct AggregateForecast {
    std::string finding_id;
    Method method = Method::MarketFinalPrice;
    double value = 0.5;
    std::size_t n_inputs = 0;

    friend bool operator==(AggregateForecast const&, AggregateForecast const&) = default;
};

struct ForecasterWeight {
    std::string forecaster_id;
    double weight = 0.0;
};

using WeightMap = std::map<std::string, double, std::less<>>;

inline constexpr double default_vote_threshold = 0.5;

// ---------------------------------------------------------------------------
// Kernels over raw beliefs

/// Share of beliefs at or above the threshold.
inline double voting_share(std::span<double const> beliefs, double threshold = default_vote_threshold) {
    if (beliefs.empty()) fail(Errc::NoSurveyResponses, "no beliefs to vote");
    auto const yes = std::count_if(beliefs.begin(), beliefs.end(), [&](double b) { return b >= threshold; });
    return static_cast<double>(yes) / static_cast<double>(beliefs.size());
}

inline double weighted_mean(std::span<double const> beliefs, std::span<double const> weights) {
    if (beliefs.size() != weights.size()) fail(Errc::DegenerateInput, "beliefs and weights differ in length");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < beliefs.size(); ++i) {
        num += weights[i] * beliefs[i];
        den += weights[i];
    }
    if (den <= 0.0) fail(Errc::AllWeightsZero, "every respondent has zero weight");
    return std::clamp(num / den, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Dataset-level aggregators

namespace detail {

inline std::vector<double> beliefs_for(Dataset const& ds, std::string_view finding_id) {
    std::vector<double> out;
    for (auto i : ds.survey_indices(finding_id)) out.push_back(ds.surveys()[i].belief);
    if (out.empty()) fail(Errc::NoSurveyResponses, "finding '" + std::string(finding_id) + "' has no survey responses");
    return out;
}

}  // namespace detail

/// Price of the last trade at or before market close.
inline AggregateForecast market_final_price(Dataset const& ds, std::string_view finding_id) {
    auto const& finding = ds.finding(finding_id);
    auto const idx = ds.trade_indices(finding_id);
    std::optional<double> last;
    std::size_t n = 0;
    for (auto i : idx) {
        auto const& t = ds.trades()[i];
        if (t.timestamp > finding.market_close) break;
        last = t.post_trade_price;
        ++n;
    }
    if (!last) fail(Errc::EmptyMarket, "market '" + std::string(finding_id) + "' has no trades before close");
    return {std::string(finding_id), Method::MarketFinalPrice, *last, n};
}

inline AggregateForecast survey_mean(Dataset const& ds, std::string_view finding_id) {
    auto const b = detail::beliefs_for(ds, finding_id);
    return {std::string(finding_id), Method::SurveyMean, std::clamp(stats::mean(b), 0.0, 1.0), b.size()};
}

inline AggregateForecast survey_median(Dataset const& ds, std::string_view finding_id) {
    auto const b = detail::beliefs_for(ds, finding_id);
    return {std::string(finding_id), Method::SurveyMedian, stats::median(b), b.size()};
}

inline AggregateForecast survey_voting(Dataset const& ds, std::string_view finding_id,
                                       double threshold = default_vote_threshold) {
    auto const b = detail::beliefs_for(ds, finding_id);
    return {std::string(finding_id), Method::SurveyVoting, voting_share(b, threshold), b.size()};
}

/// Sample variance of each forecaster's beliefs across the findings they
/// answered; fewer than two responses gives weight 0. Restricting to one
/// project uses only that project's findings.
inline std::vector<ForecasterWeight> forecaster_weights(Dataset const& ds, std::optional<Project> project = {}) {
    std::map<std::string, std::vector<double>, std::less<>> by_forecaster;
    for (auto const& s : ds.surveys()) {
        if (project) {
            auto idx = ds.index_of(s.finding_id);
            if (!idx || ds.findings()[*idx].project != *project) continue;
        }
        by_forecaster[s.forecaster_id].push_back(s.belief);
    }
    std::vector<ForecasterWeight> out;
    out.reserve(by_forecaster.size());
    for (auto const& [id, beliefs] : by_forecaster)
        out.push_back({id, beliefs.size() < 2 ? 0.0 : stats::variance(beliefs)});
    return out;
}

inline WeightMap to_map(std::span<ForecasterWeight const> weights) {
    WeightMap m;
    for (auto const& w : weights) m.emplace(w.forecaster_id, w.weight);
    return m;
}

/// Respondents missing from `weights` count as weight 0.
inline AggregateForecast survey_var_weighted(Dataset const& ds, std::string_view finding_id, WeightMap const& weights) {
    std::vector<double> beliefs, w;
    for (auto i : ds.survey_indices(finding_id)) {
        auto const& s = ds.surveys()[i];
        beliefs.push_back(s.belief);
        auto it = weights.find(s.forecaster_id);
        w.push_back(it == weights.end() ? 0.0 : it->second);
    }
    if (beliefs.empty())
        fail(Errc::NoSurveyResponses, "finding '" + std::string(finding_id) + "' has no survey responses");
    try {
        return {std::string(finding_id), Method::SurveyVarWeighted, weighted_mean(beliefs, w), beliefs.size()};
    } catch (Error const& e) {
        if (e.code() != Errc::AllWeightsZero) throw;
        fail(Errc::AllWeightsZero, "finding '" + std::string(finding_id) + "': every respondent has zero weight");
    }
}

struct AggregateOptions {
    std::vector<Method> methods{std::begin(all_methods), std::end(all_methods)};
    double vote_threshold = default_vote_threshold;
    bool per_project_weights = false;
};

/// A forecast that could not be produced, with the reason.
struct SkippedForecast {
    std::string finding_id;
    Method method;
    Errc code;
    std::string message;
};

struct AggregateSet {
    std::vector<AggregateForecast> forecasts;  // finding order, then method order
    std::vector<SkippedForecast> skipped;

    [[nodiscard]] std::optional<AggregateForecast> find(std::string_view finding_id, Method m) const {
        for (auto const& f : forecasts)
            if (f.method == m && f.finding_id == finding_id) return f;
        return std::nullopt;
    }
};

inline AggregateSet aggregate_all(Dataset const& ds, AggregateOptions const& opts = {}) {
    AggregateSet out;
    std::map<std::optional<Project>, WeightMap> weights;
    auto weights_for = [&](Project p) -> WeightMap const& {
        std::optional<Project> key;
        if (opts.per_project_weights) key = p;
        auto it = weights.find(key);
        if (it == weights.end()) it = weights.emplace(key, to_map(forecaster_weights(ds, key))).first;
        return it->second;
    };
    for (auto const& f : ds.findings()) {
        for (auto m : opts.methods) {
            try {
                switch (m) {
                case Method::MarketFinalPrice: out.forecasts.push_back(market_final_price(ds, f.id)); break;
                case Method::SurveyMean: out.forecasts.push_back(survey_mean(ds, f.id)); break;
                case Method::SurveyMedian: out.forecasts.push_back(survey_median(ds, f.id)); break;
                case Method::SurveyVoting: out.forecasts.push_back(survey_voting(ds, f.id, opts.vote_threshold)); break;
                case Method::SurveyVarWeighted:
                    out.forecasts.push_back(survey_var_weighted(ds, f.id, weights_for(f.project)));
                    break;
                }
            } catch (Error const& e) {
                out.skipped.push_back({f.id, m, e.code(), e.what()});
            }
        }
    }
    return out;
}

inline void write_aggregates(std::ostream& out, std::span<AggregateForecast const> forecasts) {
    csv::write_row(out, {"finding_id", "method", "value", "n_inputs"});
    for (auto const& f : forecasts)
        csv::write_row(out, {f.finding_id, std::string(to_string(f.method)), csv::format_double(f.value),
                             std::to_string(f.n_inputs)});
}

}  // namespace rmkt
