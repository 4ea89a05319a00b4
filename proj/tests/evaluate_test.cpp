#include "support.hpp"

#include <gtest/gtest.h>

using namespace rmkt;

namespace {

/// Rows for one method with the given quadrant counts.
std::vector<ScoreRow> rows_with(Method m, std::size_t fail_did, std::size_t fail_did_not, std::size_t rep_did,
                                std::size_t rep_did_not) {
    std::vector<ScoreRow> rows;
    int id = 0;
    auto add = [&](std::size_t n, double forecast, int outcome) {
        for (std::size_t i = 0; i < n; ++i)
            rows.push_back(score_one("F" + std::to_string(id++), m, Project::RPP, forecast, outcome));
    };
    add(fail_did, 0.3, 1);
    add(fail_did_not, 0.3, 0);
    add(rep_did, 0.7, 1);
    add(rep_did_not, 0.7, 0);
    return rows;
}

double chi2_oracle(double a, double b, double c, double d) {
    double const n = a + b + c + d;
    double const num = n * (a * d - b * c) * (a * d - b * c);
    return num / ((a + b) * (c + d) * (a + c) * (b + d));
}

}  // namespace

TEST(Score, BoundaryForecast) {
    auto const r = score_one("F", Method::SurveyMean, Project::RPP, 0.5, 0);
    EXPECT_EQ(r.predicted, 1);
    EXPECT_FALSE(r.correct);
    EXPECT_EQ(r.abs_error, 0.5);
    EXPECT_EQ(r.extremeness, 0.0);
}

TEST(Score, UnknownFindingRaisesMissingOutcome) {
    std::vector<AggregateForecast> const fc{{"nope", Method::SurveyMean, 0.4, 3}};
    std::vector<Finding> const f{fx::finding("F", Project::RPP, 1)};
    try {
        (void)score(fc, f);
        FAIL();
    } catch (Error const& e) {
        EXPECT_EQ(e.code(), Errc::MissingOutcome);
    }
}

TEST(Score, RowInvariants) {
    fx::Gen g(8);
    for (int i = 0; i < 1000; ++i) {
        double const f = g.coin(0.1) ? 0.5 : g.uniform();
        int const o = g.coin() ? 1 : 0;
        auto const r = score_one("F", Method::MarketFinalPrice, Project::SSRP, f, o);
        EXPECT_GE(r.abs_error, 0.0);
        EXPECT_LE(r.abs_error, 1.0);
        EXPECT_GE(r.extremeness, 0.0);
        EXPECT_LE(r.extremeness, 0.5);
        EXPECT_EQ(r.correct, (f >= 0.5) == (o == 1));
    }
}

TEST(Summaries, PerProjectAndPooled) {
    std::vector<Finding> f{fx::finding("a", Project::RPP, 1), fx::finding("b", Project::RPP, 0),
                           fx::finding("c", Project::SSRP, 1), fx::finding("d", Project::SSRP, 1)};
    std::vector<AggregateForecast> fc{{"a", Method::MarketFinalPrice, 0.8, 1}, {"b", Method::MarketFinalPrice, 0.6, 1},
                                      {"c", Method::MarketFinalPrice, 0.9, 1}, {"d", Method::MarketFinalPrice, 0.4, 1}};
    auto const rows = score(fc, f);
    auto const by_project = summarize(rows, GroupBy::Project);
    ASSERT_EQ(by_project.size(), 2u);
    EXPECT_EQ(by_project[0].project, Project::RPP);
    EXPECT_EQ(by_project[1].label(), "SSRP");
    auto const pooled = summarize(rows, GroupBy::Pooled).front();
    EXPECT_EQ(pooled.label(), "Pooled");
    EXPECT_EQ(pooled.n_findings, 4u);
    EXPECT_EQ(pooled.n_replicated, 3u);
    EXPECT_DOUBLE_EQ(pooled.replication_rate, 0.75);
    auto const* m = pooled.method(Method::MarketFinalPrice);
    ASSERT_NE(m, nullptr);
    EXPECT_EQ(m->n_correct, 2u);
    EXPECT_NEAR(m->mae, (0.2 + 0.6 + 0.1 + 0.6) / 4.0, 1e-15);
    EXPECT_NEAR(m->mean_belief, 0.675, 1e-15);
    EXPECT_EQ(pooled.method(Method::SurveyMean), nullptr);
    EXPECT_FALSE(pooled.spearman_market_survey);
}

TEST(Quadrants, CountsAndAsymmetryFromReportedCells) {
    auto const market = rows_with(Method::MarketFinalPrice, 3, 28, 48, 25);
    auto const q = quadrants(market, Method::MarketFinalPrice);
    EXPECT_EQ(q.predicted_fail(), 31u);
    EXPECT_EQ(q.predicted_replicate(), 73u);
    EXPECT_EQ(q.total(), 104u);
    auto const a = asymmetry_test(market, Method::MarketFinalPrice);
    EXPECT_NEAR(a.test.statistic, chi2_oracle(28, 3, 48, 25), 1e-12);
    EXPECT_NEAR(a.test.statistic, 6.68, 0.01);
    EXPECT_NEAR(a.test.p_value, 0.01, 0.001);

    auto const survey = rows_with(Method::SurveyMean, 2, 20, 48, 33);
    auto const s = asymmetry_test(survey, Method::SurveyMean);
    EXPECT_EQ(s.quadrants.predicted_fail(), 22u);
    EXPECT_EQ(s.quadrants.predicted_replicate(), 81u);
    // These cells give 7.73, not the 4.45 reported alongside them.
    EXPECT_NEAR(s.test.statistic, chi2_oracle(20, 2, 48, 33), 1e-12);
}

TEST(Quadrants, EqualAccuracyShowsNoAsymmetry) {
    auto const rows = rows_with(Method::SurveyMean, 2, 8, 16, 4);  // 80% correct in both groups
    auto const a = asymmetry_test(rows, Method::SurveyMean);
    EXPECT_NEAR(a.test.statistic, 0.0, 1e-12);
    EXPECT_GT(a.test.p_value, 0.05);
}

TEST(Accuracy, MarketVersusSurveyCounts) {
    auto rows = rows_with(Method::MarketFinalPrice, 0, 30, 45, 28);  // 75 correct of 103
    auto survey = rows_with(Method::SurveyMean, 0, 30, 38, 35);      // 68 correct of 103
    rows.insert(rows.end(), survey.begin(), survey.end());
    auto const t = accuracy_test(rows);
    EXPECT_NEAR(t.statistic, chi2_oracle(75, 28, 68, 35), 1e-12);
    EXPECT_NEAR(t.statistic, 1.12, 0.01);
    EXPECT_NEAR(t.p_value, 0.29, 0.005);
}

TEST(Overestimation, PerfectForecastsGiveZero) {
    std::vector<ScoreRow> rows;
    for (int i = 0; i < 6; ++i) {
        rows.push_back(score_one("F" + std::to_string(i), Method::SurveyMean, Project::RPP, i % 2, i % 2));
        rows.push_back(score_one("F" + std::to_string(i), Method::MarketFinalPrice, Project::RPP, i % 2, i % 2));
    }
    auto const t = overestimation_tests(rows);
    EXPECT_EQ(t.survey.statistic, 0.0);
    EXPECT_EQ(t.survey.p_value, 1.0);
    EXPECT_EQ(t.market.p_value, 1.0);
}

TEST(Overestimation, OptimisticForecastsGiveNegativeT) {
    fx::Gen g(21);
    std::vector<ScoreRow> rows;
    for (int i = 0; i < 60; ++i) {
        int const o = g.coin(0.4) ? 1 : 0;
        rows.push_back(score_one("F" + std::to_string(i), Method::SurveyMean, Project::RPP, g.uniform(0.5, 0.9), o));
        rows.push_back(score_one("F" + std::to_string(i), Method::MarketFinalPrice, Project::RPP, g.uniform(0.5, 0.9), o));
    }
    auto const t = overestimation_tests(rows);
    EXPECT_LT(t.survey.statistic, 0.0);
    EXPECT_LT(t.market.statistic, 0.0);
    EXPECT_EQ(t.market.df, 59.0);
}

TEST(ErrorDifference, PositiveWhenMarketErrsLess) {
    fx::Gen g(4);
    std::vector<ScoreRow> rows;
    for (int i = 0; i < 40; ++i) {
        int const o = g.coin() ? 1 : 0;
        double const s = g.uniform(0.3, 0.7);
        double const m = o ? std::min(1.0, s + g.uniform(0.0, 0.2)) : std::max(0.0, s - g.uniform(0.0, 0.2));
        rows.push_back(score_one("F" + std::to_string(i), Method::SurveyMean, Project::RPP, s, o));
        rows.push_back(score_one("F" + std::to_string(i), Method::MarketFinalPrice, Project::RPP, m, o));
    }
    EXPECT_GT(error_difference_test(rows).statistic, 0.0);
}

TEST(Extremeness, ExtremizedMarketIsMoreExtreme) {
    fx::Gen g(5);
    std::vector<ScoreRow> rows, same;
    for (int i = 0; i < 50; ++i) {
        double const s = g.uniform(0.2, 0.8);
        double const m = std::clamp(0.5 + 2.0 * (s - 0.5), 0.0, 1.0);
        auto const id = "F" + std::to_string(i);
        rows.push_back(score_one(id, Method::SurveyMean, Project::EERP, s, 1));
        rows.push_back(score_one(id, Method::MarketFinalPrice, Project::EERP, m, 1));
        same.push_back(score_one(id, Method::SurveyMean, Project::EERP, s, 1));
        same.push_back(score_one(id, Method::MarketFinalPrice, Project::EERP, s, 1));
    }
    EXPECT_GT(extremeness_test(rows).statistic, 0.0);
    EXPECT_EQ(extremeness_test(same).statistic, 0.0);
}

TEST(PValue, GroupRatesAndFit) {
    std::vector<Finding> f;
    for (int i = 0; i < 10; ++i)
        f.push_back(fx::finding("s" + std::to_string(i), Project::RPP, i < 7 ? 1 : 0, 336.0,
                                PValueCategory::AtOrBelowThreshold));
    for (int i = 0; i < 8; ++i) f.push_back(fx::finding("w" + std::to_string(i), Project::ML2, i < 2 ? 1 : 0));
    auto const p = pvalue_regression(f);
    EXPECT_NEAR(p.at_or_below.rate(), 0.7, 1e-15);
    EXPECT_NEAR(p.above.rate(), 0.25, 1e-15);
    EXPECT_NEAR(p.fit.intercept, 0.25, 1e-12);
    EXPECT_NEAR(p.fit.slope, 0.45, 1e-12);
    EXPECT_NEAR(p.indicator_outcome_correlation * p.indicator_outcome_correlation, p.fit.r_squared, 1e-12);
    EXPECT_EQ(p.fit.n, 18u);
}

TEST(PValue, AllReplicatedHasZeroRSquared) {
    std::vector<Finding> f{fx::finding("a", Project::RPP, 1, 336, PValueCategory::AtOrBelowThreshold),
                           fx::finding("b", Project::RPP, 1), fx::finding("c", Project::RPP, 1)};
    auto const p = pvalue_regression(f);
    EXPECT_EQ(p.fit.r_squared, 0.0);
    EXPECT_EQ(p.indicator_outcome_correlation, 0.0);
}

TEST(PValue, SingleCategoryIsDegenerate) {
    std::vector<Finding> f{fx::finding("a", Project::RPP, 1), fx::finding("b", Project::RPP, 0),
                           fx::finding("c", Project::RPP, 1)};
    EXPECT_THROW((void)pvalue_regression(f), Error);
}
