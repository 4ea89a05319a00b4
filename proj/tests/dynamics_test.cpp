#include "properties.hpp"

#include <gtest/gtest.h>

using namespace rmkt;

namespace {

ErrorCurve curve_of(std::vector<std::pair<double, double>> const& pts) {
    ErrorCurve c;
    for (auto [x, y] : pts) c.points.push_back({x, y, 1});
    return c;
}

}  // namespace

TEST(ErrorSeries, AbsoluteErrorPerTrade) {
    auto const ds = fx::make({fx::finding("A", Project::RPP, 1), fx::finding("B", Project::RPP, 0)}, {},
                             {fx::trade("A", "t", 1, 0.5), fx::trade("A", "t", 2, 0.7), fx::trade("A", "t", 4.5, 0.9),
                              fx::trade("B", "t", 1, 0.5), fx::trade("B", "t", 3, 0.5)});
    auto const a = error_series(ds, "A", Axis::TradeIndex);
    ASSERT_EQ(a.size(), 3u);
    EXPECT_NEAR(a[0].error, 0.5, 1e-15);
    EXPECT_NEAR(a[1].error, 0.3, 1e-15);
    EXPECT_NEAR(a[2].error, 0.1, 1e-15);
    EXPECT_EQ(a[2].x, 3.0);
    EXPECT_NEAR(error_series(ds, "A", Axis::HoursSinceOpen)[2].x, 4.5, 1e-12);
    for (auto const& p : error_series(ds, "B", Axis::TradeIndex)) EXPECT_EQ(p.error, 0.5);
}

TEST(ErrorSeries, MonotonePathGivesNonincreasingErrors) {
    fx::Gen g(2);
    std::vector<Trade> t;
    double p = 0.5;
    for (int i = 0; i < 50; ++i) t.push_back(fx::trade("A", "t", i + 1, p = g.uniform(p, 0.999)));
    auto const ds = fx::make({fx::finding("A", Project::RPP, 1)}, {}, t);
    auto const s = error_series(ds, "A", Axis::TradeIndex);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LE(s[i].error, s[i - 1].error);
}

TEST(MeanErrorCurve, SingleMarketStepFunction) {
    auto const ds = fx::make({fx::finding("A", Project::RPP, 1)}, {},
                             {fx::trade("A", "t", 1, 0.6), fx::trade("A", "t", 3, 0.8)});
    std::vector<double> const grid{0, 1, 2, 3, 4};
    auto const c = mean_error_curve(ds, Axis::HoursSinceOpen, grid);
    std::vector<double> const want{0.5, 0.4, 0.4, 0.2, 0.2};
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(c.points[i].mean_abs_error, want[i], 1e-12) << i;
    EXPECT_EQ(c.points[0].n_contributing, 0u);
    EXPECT_EQ(c.points[1].n_contributing, 1u);
}

TEST(MeanErrorCurve, AveragesAcrossMarkets) {
    auto const ds = fx::make({fx::finding("A", Project::RPP, 1), fx::finding("B", Project::RPP, 0)}, {},
                             {fx::trade("A", "t", 1, 0.8), fx::trade("B", "t", 1, 0.4)});
    auto const c = mean_error_curve(ds, Axis::TradeIndex);
    ASSERT_EQ(c.points.size(), 2u);
    EXPECT_NEAR(c.points[1].mean_abs_error, 0.3, 1e-15);
}

TEST(MeanErrorCurve, EndsAtFinalPriceMae) {
    auto const ds = synthesize({.seed = 3, .markets = 16});
    auto const c = mean_error_curve(ds, Axis::TradeIndex);
    auto const rows = score(aggregate_all(ds, {.methods = {Method::MarketFinalPrice}}).forecasts, ds.findings());
    double mae = 0.0;
    for (auto const& r : rows) mae += r.abs_error;
    mae /= static_cast<double>(rows.size());
    EXPECT_NEAR(c.points.back().mean_abs_error, mae, 1e-12);
    auto const h = mean_error_curve(ds, Axis::HoursSinceOpen);
    EXPECT_NEAR(h.points.back().mean_abs_error, mae, 1e-12);
}

TEST(MeanErrorCurve, RejectsUnsortedGrid) {
    auto const ds = fx::load_fixture().dataset;
    std::vector<double> const grid{0, 2, 1};
    EXPECT_THROW((void)mean_error_curve(ds, Axis::TradeIndex, grid), Error);
}

TEST(Loess, ReproducesConstantsAndLines) {
    std::vector<double> x, k, line;
    for (int i = 0; i < 40; ++i) {
        x.push_back(i * 0.5);
        k.push_back(0.42);
        line.push_back(0.9 - 0.01 * i * 0.5);
    }
    for (int degree : {1, 2})
        for (double span : {0.1, 0.3, 0.75, 1.0}) {
            auto const fk = loess(x, k, {span, degree});
            auto const fl = loess(x, line, {span, degree});
            for (std::size_t i = 0; i < x.size(); ++i) {
                EXPECT_NEAR(fk[i], 0.42, 1e-14);
                EXPECT_NEAR(fl[i], line[i], 1e-12);
            }
        }
}

TEST(Loess, CommutesWithAffineMaps) {
    fx::Gen g(6);
    std::vector<double> x, y, z;
    for (int i = 0; i < 60; ++i) {
        x.push_back(i);
        y.push_back(0.3 + 0.2 * std::exp(-i / 10.0) + g.normal(0, 0.02));
        z.push_back(5.0 - 3.0 * y.back());
    }
    auto const fy = loess(x, y, {});
    auto const fz = loess(x, z, {});
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(fz[i], 5.0 - 3.0 * fy[i], 1e-12);
}

TEST(Loess, RoundedEqualSpacingKeepsBothNeighbours) {
    // Offsets like this make |x[i+1] - x[i]| and |x[i] - x[i-1]| differ in the last bits.
    std::vector<double> x, y;
    for (int i = 0; i < 9; ++i) {
        x.push_back(3.130577145934239 + i);
        y.push_back(0.1 * i);
    }
    auto const fit = loess(x, y, {0.15, 1});
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(fit[i], y[i], 1e-12);
}

TEST(Loess, InvalidConfigs) {
    std::vector<double> const x{0, 1, 2, 3, 4}, y{1, 2, 3, 4, 5};
    EXPECT_THROW((void)loess(x, y, {0.0, 2}), Error);
    EXPECT_THROW((void)loess(x, y, {0.5, 3}), Error);
    try {
        (void)loess(std::vector<double>{0, 1}, std::vector<double>{1, 2}, {});
        FAIL();
    } catch (Error const& e) {
        EXPECT_EQ(e.code(), Errc::InsufficientPoints);
    }
}

TEST(Loess, AgreesWithLeastSquaresOracle) {
    auto const c = props::loess_suite(1234, 30);
    EXPECT_TRUE(c.ok()) << c.summary();
}

TEST(Milestone, LinearInterpolation) {
    auto const c = curve_of({{0, 0.5}, {10, 0.1}});
    EXPECT_NEAR(reduction_milestone(c, 0.5).x, 5.0, 1e-12);
    EXPECT_NEAR(reduction_fraction_at(c, 5.0), 0.5, 1e-12);
}

TEST(Milestone, MinimumVersusFinalTotal) {
    // Falls to 0.1 by x = 2, then drifts back up to 0.2.
    auto const c = curve_of({{0, 0.5}, {1, 0.3}, {2, 0.1}, {3, 0.2}});
    EXPECT_NEAR(reduction_milestone(c, 1.0).x, 2.0, 1e-12);
    EXPECT_NEAR(reduction_milestone(c, 1.0, ReductionTotal::FirstMinusFinal).x, 1.5, 1e-12);
    EXPECT_NEAR(reduction_fraction_at(c, 1.0), 0.5, 1e-12);
}

TEST(Milestone, NoReduction) {
    try {
        (void)reduction_milestone(curve_of({{0, 0.2}, {1, 0.3}}), 0.9);
        FAIL();
    } catch (Error const& e) {
        EXPECT_EQ(e.code(), Errc::NoReduction);
    }
}

TEST(LateSmoothing, SinglePostCutoffTradeIsTheForecast) {
    auto const ds = fx::make({fx::finding("A", Project::RPP, 1, 336.0)}, {},
                             {fx::trade("A", "t", 10, 0.4), fx::trade("A", "t", 200, 0.7)});
    EXPECT_DOUBLE_EQ(late_weighted_price(ds, "A", 168.0), 0.7);
}

TEST(LateSmoothing, LinearTimeWeights) {
    auto const ds = fx::make({fx::finding("A", Project::RPP, 1, 368.0)}, {},
                             {fx::trade("A", "t", 218, 0.4), fx::trade("A", "t", 318, 0.8)});
    // Weights 0.25 and 0.75.
    EXPECT_NEAR(late_weighted_price(ds, "A", 168.0), 0.25 * 0.4 + 0.75 * 0.8, 1e-12);
}

TEST(LateSmoothing, FlatLatePricesGiveZeroT) {
    std::vector<Finding> f;
    std::vector<Trade> t;
    for (int i = 0; i < 5; ++i) {
        auto const id = "M" + std::to_string(i);
        f.push_back(fx::finding(id, Project::SSRP, i % 2));
        t.push_back(fx::trade(id, "a", 5, 0.5));
        t.push_back(fx::trade(id, "a", 170, 0.3 + 0.1 * i));
        t.push_back(fx::trade(id, "a", 300, 0.3 + 0.1 * i));
    }
    auto const r = late_trade_smoothing(fx::make(f, {}, t));
    EXPECT_EQ(r.test.statistic, 0.0);
    EXPECT_EQ(r.test.p_value, 1.0);
    EXPECT_EQ(r.n_smoothed, 5u);
}

TEST(WriteCurve, Columns) {
    auto const raw = curve_of({{0, 0.5}, {1, 0.25}});
    std::ostringstream out;
    write_curve(out, raw, std::nullopt);
    EXPECT_EQ(out.str(), "x,mean_abs_error,smoothed,n_contributing\n0,0.5,NA,1\n1,0.25,NA,1\n");
}
