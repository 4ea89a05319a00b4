#include "properties.hpp"

#include <gtest/gtest.h>

using namespace rmkt;

TEST(SpecialFunctions, KnownIdentities) {
    for (double x : {0.0, 0.01, 0.3, 0.5, 0.99, 1.0}) EXPECT_NEAR(special::incomplete_beta(1.0, 1.0, x), x, 1e-15);
    // ln B(a, a) at a = 150 subtracts log-gammas near 600, so about 1e-13 is lost there.
    for (double a : {0.1, 1.0, 7.5, 150.0}) EXPECT_NEAR(special::incomplete_beta(a, a, 0.5), 0.5, 1e-12);
    for (double x : {1e-6, 0.2, 1.0, 4.0, 30.0}) EXPECT_NEAR(special::gamma_q(0.5, x), std::erfc(std::sqrt(x)), 1e-14);
    EXPECT_NEAR(special::log_gamma(0.5), 0.5 * std::log(3.14159265358979323846), 1e-14);
    EXPECT_NEAR(special::log_gamma(101.0), std::lgamma(101.0), 1e-12);
}

TEST(SpecialFunctions, ChiSquareCriticalValue) {
    EXPECT_NEAR(special::chi_square_sf(3.841, 1.0), 0.050013683763956804, 1e-12);
    EXPECT_NEAR(special::chi_square_sf(3.841, 1.0), props::oracle_gamma_q(0.5, 3.841 / 2.0), 1e-14);
}

TEST(SpecialFunctions, StudentTTails) {
    EXPECT_EQ(special::student_t_two_sided(0.0, 5.0), 1.0);
    double const t = 2.2281388519649385;  // 97.5% quantile at 10 df
    EXPECT_NEAR(special::student_t_two_sided(t, 10.0), 0.05, 1e-11);
    EXPECT_NEAR(special::student_t_two_sided(t, 10.0),
                static_cast<double>(props::oracle_ibeta(5.0, 0.5, 10.0 / (10.0 + t * t))), 1e-15);
    EXPECT_NEAR(special::student_t_cdf(-1.0, 1.0), 0.25, 1e-14);  // Cauchy
}

TEST(SpecialFunctions, DomainErrors) {
    EXPECT_THROW((void)special::incomplete_beta(0.0, 1.0, 0.5), Error);
    EXPECT_THROW((void)special::incomplete_beta(1.0, 1.0, 1.5), Error);
    EXPECT_THROW((void)special::gamma_q(1.0, -1.0), Error);
    EXPECT_THROW((void)special::chi_square_sf(1.0, 0.0), Error);
}

TEST(SpecialFunctions, MatchHighPrecisionOracle) {
    auto const c = props::special_function_oracle(5, 400);
    EXPECT_TRUE(c.ok()) << c.summary();
}

TEST(Descriptive, MeanVarianceMedian) {
    std::vector<double> const x{2, 4, 4, 4, 5, 5, 7, 9};
    EXPECT_EQ(stats::mean(x), 5.0);
    EXPECT_NEAR(stats::variance(x), 32.0 / 7.0, 1e-15);
    EXPECT_EQ(stats::median(x), 4.5);
    EXPECT_THROW((void)stats::mean(std::vector<double>{}), Error);
}

TEST(Correlation, PearsonSelfIsOne) {
    std::vector<double> const x{0.1, 0.7, 0.3, 0.9};
    EXPECT_NEAR(stats::pearson(x, x), 1.0, 1e-15);
    std::vector<double> const flat{1, 1, 1, 1};
    EXPECT_THROW((void)stats::pearson(x, flat), Error);
}

TEST(Correlation, SpearmanMonotoneTransform) {
    std::vector<double> const x{0.3, -1.0, 2.5, 0.0, 7.0, 1.1};
    std::vector<double> y;
    for (double v : x) y.push_back(std::exp(3.0 * v) - 4.0);
    EXPECT_NEAR(stats::spearman(x, y), 1.0, 1e-15);
}

TEST(Correlation, AverageRanksForTies) {
    std::vector<double> const x{10, 20, 20, 5, 20};
    EXPECT_EQ(stats::average_ranks(x), (std::vector<double>{2, 4, 4, 1, 4}));
    // Pearson on the average ranks by hand: 4.5 / sqrt(4.5 * 5)
    EXPECT_NEAR(stats::spearman(std::vector<double>{1, 2, 2, 3}, std::vector<double>{1, 3, 2, 4}), 0.9486832980505138,
                1e-14);
}

TEST(PairedT, IdenticalSequences) {
    std::vector<double> const x{0.2, 0.5, 0.9};
    auto const r = stats::paired_t(x, x);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_EQ(r.df, 2.0);
}

TEST(PairedT, MatchesDirectComputation) {
    std::vector<double> const x{1, 0, 1, 1, 0, 1, 0, 0};
    std::vector<double> const y{0.8, 0.4, 0.6, 0.9, 0.5, 0.7, 0.3, 0.6};
    // t = mean(d) / (sd(d) / sqrt(n)) with d = x - y
    std::vector<double> d;
    for (std::size_t i = 0; i < x.size(); ++i) d.push_back(x[i] - y[i]);
    double const t = stats::mean(d) / (stats::sd(d) / std::sqrt(8.0));
    auto const r = stats::paired_t(x, y);
    EXPECT_NEAR(r.statistic, t, 1e-14);
    EXPECT_NEAR(r.p_value, props::oracle_ibeta(3.5, 0.5, 7.0 / (7.0 + t * t)), 1e-12);
}

TEST(PairedT, ConstantNonzeroDifferenceIsDegenerate) {
    std::vector<double> const x{1, 2, 3}, y{0, 1, 2};
    EXPECT_THROW((void)stats::paired_t(x, y), Error);
}

TEST(ChiSquare, ObservedEqualsExpected) {
    auto const r = stats::chi_square_2x2({{{10, 20}, {10, 20}}});
    EXPECT_NEAR(r.statistic, 0.0, 1e-15);
    EXPECT_NEAR(r.p_value, 1.0, 1e-15);
}

TEST(ChiSquare, AccuracyComparisonCounts) {
    // correct/incorrect: 75/28 against 68/35
    auto const r = stats::chi_square_2x2({{{75, 28}, {68, 35}}});
    EXPECT_NEAR(r.statistic, 1.12, 0.05);
    EXPECT_NEAR(r.p_value, 0.29, 0.01);
    // Direct evaluation of sum (O - E)^2 / E.
    double const n = 206, r0 = 103, r1 = 103, c0 = 143, c1 = 63;
    double want = 0;
    double const obs[2][2] = {{75, 28}, {68, 35}};
    double const rows[2] = {r0, r1}, cols[2] = {c0, c1};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double const e = rows[i] * cols[j] / n;
            want += (obs[i][j] - e) * (obs[i][j] - e) / e;
        }
    EXPECT_NEAR(r.statistic, want, 1e-12);
}

TEST(ChiSquare, YatesShrinksStatistic) {
    stats::Table2x2 const t{{{28, 3}, {48, 25}}};
    auto const plain = stats::chi_square_2x2(t);
    auto const yates = stats::chi_square_2x2(t, true);
    EXPECT_NEAR(plain.statistic, 6.676, 0.001);
    EXPECT_LT(yates.statistic, plain.statistic);
}

TEST(ChiSquare, ZeroMarginalIsDegenerate) {
    try {
        (void)stats::chi_square_2x2({{{0, 0}, {3, 4}}});
        FAIL();
    } catch (Error const& e) {
        EXPECT_EQ(e.code(), Errc::DegenerateTable);
    }
}

TEST(Ols, ExactLine) {
    std::vector<double> const x{1, 2, 3, 4, 5};
    auto const f = stats::ols_simple(x, x);
    EXPECT_NEAR(f.slope, 1.0, 1e-15);
    EXPECT_NEAR(f.intercept, 0.0, 1e-14);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-15);
}

TEST(Ols, KnownStandardErrors) {
    // Textbook formulas for a binary regressor.
    std::vector<double> const x{0, 0, 0, 1, 1, 1, 1};
    std::vector<double> const y{0, 1, 0, 1, 1, 0, 1};
    auto const f = stats::ols_simple(x, y);
    EXPECT_NEAR(f.intercept, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(f.slope, 0.75 - 1.0 / 3.0, 1e-15);
    double const sse = 2.0 / 3.0 + 0.75;  // within-group sums of squares
    double const s2 = sse / 5.0, sxx = 7.0 * (4.0 / 7.0) * (3.0 / 7.0);
    EXPECT_NEAR(f.se_slope, std::sqrt(s2 / sxx), 1e-15);
    EXPECT_NEAR(f.se_intercept, std::sqrt(s2 / 3.0), 1e-15);
}

TEST(Ols, ConstantResponseHasZeroRSquared) {
    std::vector<double> const x{0, 1, 0, 1}, y{1, 1, 1, 1};
    auto const f = stats::ols_simple(x, y);
    EXPECT_EQ(f.r_squared, 0.0);
    EXPECT_EQ(f.slope, 0.0);
    EXPECT_EQ(f.slope_test.p_value, 1.0);
}

TEST(Properties, Identities) {
    auto const c = props::stats_identities(13, 300);
    EXPECT_TRUE(c.ok()) << c.summary();
}
