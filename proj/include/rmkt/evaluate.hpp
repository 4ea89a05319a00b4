#pragma once

// Scoring of aggregated forecasts against replication outcomes, per-project
// summaries, and the hypothesis tests run on them.

#include <rmkt/aggregate.hpp>
#include <rmkt/csv.hpp>
#include <rmkt/dataset.hpp>
#include <rmkt/error.hpp>
#include <rmkt/stats.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace rmkt {

struct ScoreRow {
    std::string finding_id;
    Method method = Method::MarketFinalPrice;
    Project project = Project::RPP;
    double forecast = 0.5;
    int outcome = 0;
    int predicted = 1;  // 1 iff forecast >= threshold
    bool correct = false;
    double abs_error = 0.5;
    double extremeness = 0.0;  // |forecast - 0.5|
};

inline ScoreRow score_one(std::string finding_id, Method method, Project project, double forecast, int outcome,
                          double threshold = default_vote_threshold) {
    ScoreRow r;
    r.finding_id = std::move(finding_id);
    r.method = method;
    r.project = project;
    r.forecast = forecast;
    r.outcome = outcome;
    r.predicted = forecast >= threshold ? 1 : 0;
    r.correct = r.predicted == outcome;
    r.abs_error = std::abs(static_cast<double>(outcome) - forecast);
    r.extremeness = std::abs(forecast - 0.5);
    return r;
}

/// One row per forecast, in input order. Forecasts naming an unknown finding
/// raise MissingOutcome.
inline std::vector<ScoreRow> score(std::span<AggregateForecast const> forecasts, std::span<Finding const> findings,
                                   double threshold = default_vote_threshold) {
    std::map<std::string_view, Finding const*> by_id;
    for (auto const& f : findings) by_id.emplace(f.id, &f);
    std::vector<ScoreRow> rows;
    rows.reserve(forecasts.size());
    for (auto const& fc : forecasts) {
        auto it = by_id.find(fc.finding_id);
        if (it == by_id.end()) fail(Errc::MissingOutcome, "no outcome for finding '" + fc.finding_id + "'");
        rows.push_back(score_one(fc.finding_id, fc.method, it->second->project, fc.value, it->second->outcome, threshold));
    }
    return rows;
}

inline void write_scores(std::ostream& out, std::span<ScoreRow const> rows) {
    csv::write_row(out, {"finding_id", "project", "method", "forecast", "outcome", "predicted", "correct", "abs_error",
                         "extremeness"});
    for (auto const& r : rows)
        csv::write_row(out, {r.finding_id, std::string(to_string(r.project)), std::string(to_string(r.method)),
                             csv::format_double(r.forecast), std::to_string(r.outcome), std::to_string(r.predicted),
                             r.correct ? "1" : "0", csv::format_double(r.abs_error),
                             csv::format_double(r.extremeness)});
}

// ---------------------------------------------------------------------------
// Pairing helpers

/// Values of two methods for the findings scored under both, in the order
/// the first method's rows appear.
struct PairedScores {
    std::vector<ScoreRow> a;
    std::vector<ScoreRow> b;

    [[nodiscard]] std::vector<double> forecasts_a() const { return project(a, &ScoreRow::forecast); }
    [[nodiscard]] std::vector<double> forecasts_b() const { return project(b, &ScoreRow::forecast); }
    [[nodiscard]] std::vector<double> outcomes() const {
        std::vector<double> out;
        for (auto const& r : a) out.push_back(r.outcome);
        return out;
    }
    static std::vector<double> project(std::vector<ScoreRow> const& rows, double ScoreRow::*field) {
        std::vector<double> out;
        out.reserve(rows.size());
        for (auto const& r : rows) out.push_back(r.*field);
        return out;
    }
};

inline std::vector<ScoreRow> rows_of(std::span<ScoreRow const> rows, Method m) {
    std::vector<ScoreRow> out;
    for (auto const& r : rows)
        if (r.method == m) out.push_back(r);
    return out;
}

inline PairedScores pair_methods(std::span<ScoreRow const> rows, Method a, Method b) {
    std::map<std::string_view, ScoreRow const*> second;
    for (auto const& r : rows)
        if (r.method == b) second.emplace(r.finding_id, &r);
    PairedScores out;
    for (auto const& r : rows) {
        if (r.method != a) continue;
        if (auto it = second.find(r.finding_id); it != second.end()) {
            out.a.push_back(r);
            out.b.push_back(*it->second);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Summaries

struct MethodSummary {
    Method method = Method::MarketFinalPrice;
    std::size_t n = 0;
    double mean_belief = 0.0;
    double sd_belief = 0.0;  // sample SD; NaN for n < 2
    std::size_t n_correct = 0;
    double mae = 0.0;
    std::optional<double> spearman_outcome;
    std::optional<double> pearson_outcome;
};

/// `project` empty means the pooled group.
struct ProjectSummary {
    std::optional<Project> project;
    std::size_t n_findings = 0;
    std::size_t n_replicated = 0;
    double replication_rate = 0.0;
    std::vector<MethodSummary> methods;
    std::optional<double> spearman_market_survey;
    std::optional<double> pearson_market_survey;

    [[nodiscard]] MethodSummary const* method(Method m) const {
        for (auto const& s : methods)
            if (s.method == m) return &s;
        return nullptr;
    }
    [[nodiscard]] std::string label() const { return project ? std::string(to_string(*project)) : "Pooled"; }
};

enum class GroupBy { Project, Pooled };

namespace detail {

template <class F>
std::optional<double> try_stat(F&& f) {
    try {
        return f();
    } catch (Error const& e) {
        if (e.code() != Errc::DegenerateInput) throw;
        return std::nullopt;
    }
}

inline ProjectSummary summarize_group(std::span<ScoreRow const> rows, std::optional<Project> project) {
    ProjectSummary s;
    s.project = project;
    std::map<std::string_view, int> outcomes;
    std::vector<Method> methods;
    for (auto const& r : rows) {
        outcomes.emplace(r.finding_id, r.outcome);
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    }
    std::sort(methods.begin(), methods.end());
    s.n_findings = outcomes.size();
    for (auto const& [id, o] : outcomes) s.n_replicated += static_cast<std::size_t>(o);
    s.replication_rate = s.n_findings ? static_cast<double>(s.n_replicated) / static_cast<double>(s.n_findings) : 0.0;

    for (auto m : methods) {
        auto const mrows = rows_of(rows, m);
        MethodSummary ms;
        ms.method = m;
        ms.n = mrows.size();
        auto const fc = PairedScores::project(mrows, &ScoreRow::forecast);
        auto const err = PairedScores::project(mrows, &ScoreRow::abs_error);
        std::vector<double> out;
        for (auto const& r : mrows) {
            out.push_back(r.outcome);
            ms.n_correct += r.correct ? 1 : 0;
        }
        ms.mean_belief = stats::mean(fc);
        ms.sd_belief = fc.size() >= 2 ? stats::sd(fc) : std::nan("");
        ms.mae = stats::mean(err);
        ms.spearman_outcome = try_stat([&] { return stats::spearman(out, fc); });
        ms.pearson_outcome = try_stat([&] { return stats::pearson(out, fc); });
        s.methods.push_back(ms);
    }
    auto const paired = pair_methods(rows, Method::MarketFinalPrice, Method::SurveyMean);
    if (!paired.a.empty()) {
        auto const m = paired.forecasts_a();
        auto const v = paired.forecasts_b();
        s.spearman_market_survey = try_stat([&] { return stats::spearman(m, v); });
        s.pearson_market_survey = try_stat([&] { return stats::pearson(m, v); });
    }
    return s;
}

}  // namespace detail

/// Per-project summaries (in project order, only projects present) or the
/// single pooled summary.
inline std::vector<ProjectSummary> summarize(std::span<ScoreRow const> rows, GroupBy group) {
    std::vector<ProjectSummary> out;
    if (rows.empty()) return out;
    if (group == GroupBy::Pooled) {
        out.push_back(detail::summarize_group(rows, std::nullopt));
        return out;
    }
    for (auto p : all_projects) {
        std::vector<ScoreRow> sub;
        for (auto const& r : rows)
            if (r.project == p) sub.push_back(r);
        if (!sub.empty()) out.push_back(detail::summarize_group(sub, p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tests

struct ConfusionQuadrants {
    Method method = Method::MarketFinalPrice;
    std::size_t predicted_replicate_did = 0;
    std::size_t predicted_replicate_did_not = 0;
    std::size_t predicted_fail_did = 0;
    std::size_t predicted_fail_did_not = 0;

    [[nodiscard]] std::size_t total() const {
        return predicted_replicate_did + predicted_replicate_did_not + predicted_fail_did + predicted_fail_did_not;
    }
    [[nodiscard]] std::size_t predicted_fail() const { return predicted_fail_did + predicted_fail_did_not; }
    [[nodiscard]] std::size_t predicted_replicate() const {
        return predicted_replicate_did + predicted_replicate_did_not;
    }
};

inline ConfusionQuadrants quadrants(std::span<ScoreRow const> rows, Method m) {
    ConfusionQuadrants q;
    q.method = m;
    for (auto const& r : rows) {
        if (r.method != m) continue;
        if (r.predicted == 1)
            ++(r.outcome == 1 ? q.predicted_replicate_did : q.predicted_replicate_did_not);
        else
            ++(r.outcome == 1 ? q.predicted_fail_did : q.predicted_fail_did_not);
    }
    return q;
}

struct AsymmetryResult {
    ConfusionQuadrants quadrants;
    stats::TestResult test;
};

/// Chi-square test of whether accuracy differs between predicted-fail and
/// predicted-replicate findings. Rows: prediction; columns: correct/incorrect.
inline AsymmetryResult asymmetry_test(std::span<ScoreRow const> rows, Method m, bool yates = false) {
    auto const q = quadrants(rows, m);
    stats::Table2x2 const t{{{static_cast<double>(q.predicted_fail_did_not), static_cast<double>(q.predicted_fail_did)},
                             {static_cast<double>(q.predicted_replicate_did),
                              static_cast<double>(q.predicted_replicate_did_not)}}};
    return {q, stats::chi_square_2x2(t, yates)};
}

/// Market and survey-mean asymmetry tests.
inline std::pair<AsymmetryResult, AsymmetryResult> asymmetry_tests(std::span<ScoreRow const> rows, bool yates = false) {
    return {asymmetry_test(rows, Method::MarketFinalPrice, yates), asymmetry_test(rows, Method::SurveyMean, yates)};
}

/// Chi-square comparison of binarized accuracy between two methods.
/// Rows: method; columns: correct/incorrect.
inline stats::TestResult accuracy_test(std::span<ScoreRow const> rows, Method a = Method::MarketFinalPrice,
                                       Method b = Method::SurveyMean, bool yates = false) {
    auto count = [&](Method m) {
        std::array<double, 2> c{0.0, 0.0};
        for (auto const& r : rows)
            if (r.method == m) c[r.correct ? 0 : 1] += 1.0;
        return c;
    };
    return stats::chi_square_2x2({count(a), count(b)}, yates);
}

struct OverestimationTests {
    stats::TestResult survey;  // outcome - survey mean
    stats::TestResult market;  // outcome - market price
};

/// Paired t-tests of outcomes against forecasts; negative t means the
/// forecasts overestimate the replication rate.
inline OverestimationTests overestimation_tests(std::span<ScoreRow const> rows) {
    auto const s = rows_of(rows, Method::SurveyMean);
    auto const m = rows_of(rows, Method::MarketFinalPrice);
    auto outcomes = [](std::vector<ScoreRow> const& r) {
        std::vector<double> o;
        for (auto const& x : r) o.push_back(x.outcome);
        return o;
    };
    return {stats::paired_t(outcomes(s), PairedScores::project(s, &ScoreRow::forecast)),
            stats::paired_t(outcomes(m), PairedScores::project(m, &ScoreRow::forecast))};
}

/// Paired t-test of survey-mean minus market absolute errors; positive t
/// means the market errs less.
inline stats::TestResult error_difference_test(std::span<ScoreRow const> rows) {
    auto const p = pair_methods(rows, Method::SurveyMean, Method::MarketFinalPrice);
    return stats::paired_t(PairedScores::project(p.a, &ScoreRow::abs_error),
                           PairedScores::project(p.b, &ScoreRow::abs_error));
}

/// Paired t-test of market minus survey-mean extremeness.
inline stats::TestResult extremeness_test(std::span<ScoreRow const> rows) {
    auto const p = pair_methods(rows, Method::MarketFinalPrice, Method::SurveyMean);
    return stats::paired_t(PairedScores::project(p.a, &ScoreRow::extremeness),
                           PairedScores::project(p.b, &ScoreRow::extremeness));
}

// ---------------------------------------------------------------------------
// p-value category analysis

struct CategoryRate {
    PValueCategory category = PValueCategory::AboveThreshold;
    std::size_t n = 0;
    std::size_t replicated = 0;

    [[nodiscard]] double rate() const { return n ? static_cast<double>(replicated) / static_cast<double>(n) : 0.0; }
};

struct PValueAnalysis {
    stats::OLSFit fit;  // outcome on the indicator of p <= threshold
    CategoryRate above;
    CategoryRate at_or_below;
    double indicator_outcome_correlation = 0.0;  // its square equals fit.r_squared
};

inline PValueAnalysis pvalue_regression(std::span<Finding const> findings) {
    PValueAnalysis a;
    a.above.category = PValueCategory::AboveThreshold;
    a.at_or_below.category = PValueCategory::AtOrBelowThreshold;
    std::vector<double> x, y;
    for (auto const& f : findings) {
        bool const strong = f.p_category == PValueCategory::AtOrBelowThreshold;
        x.push_back(strong ? 1.0 : 0.0);
        y.push_back(f.outcome);
        auto& c = strong ? a.at_or_below : a.above;
        ++c.n;
        c.replicated += static_cast<std::size_t>(f.outcome);
    }
    if (a.above.n == 0 || a.at_or_below.n == 0)
        fail(Errc::DegenerateInput, "p-value regression needs findings in both categories");
    a.fit = stats::ols_simple(x, y);
    a.indicator_outcome_correlation = detail::try_stat([&] { return stats::pearson(x, y); }).value_or(0.0);
    return a;
}

}  // namespace rmkt
