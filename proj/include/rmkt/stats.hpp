#pragma once

// Correlations, paired t-test, 2x2 chi-square test and simple OLS.

#include <rmkt/error.hpp>
#include <rmkt/special_functions.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace rmkt::stats {

enum class TestKind { PairedT, ChiSquare1, OLSCoef };

struct TestResult {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
    TestKind kind = TestKind::PairedT;
};

inline double mean(std::span<double const> x) {
    if (x.empty()) fail(Errc::DegenerateInput, "mean of empty sequence");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Sample variance (divisor n - 1).
inline double variance(std::span<double const> x) {
    if (x.size() < 2) fail(Errc::DegenerateInput, "variance needs at least two values");
    double const m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

inline double sd(std::span<double const> x) { return std::sqrt(variance(x)); }

/// Median; an even count gives the midpoint of the two central values.
inline double median(std::span<double const> x) {
    if (x.empty()) fail(Errc::DegenerateInput, "median of empty sequence");
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    auto const n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace detail {

inline void require_pair(std::span<double const> x, std::span<double const> y, std::size_t min_n, char const* what) {
    if (x.size() != y.size())
        fail(Errc::DegenerateInput, std::string(what) + ": sequences differ in length (" + std::to_string(x.size()) +
                                        " vs " + std::to_string(y.size()) + ")");
    if (x.size() < min_n)
        fail(Errc::DegenerateInput, std::string(what) + ": needs at least " + std::to_string(min_n) + " observations");
}

}  // namespace detail

inline double pearson(std::span<double const> x, std::span<double const> y) {
    detail::require_pair(x, y, 3, "pearson");
    double const mx = mean(x);
    double const my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double const dx = x[i] - mx;
        double const dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) fail(Errc::DegenerateInput, "pearson: constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// 1-based ranks; tied values share the mean of their positions.
inline std::vector<double> average_ranks(std::span<double const> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        double const r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline double spearman(std::span<double const> x, std::span<double const> y) {
    detail::require_pair(x, y, 3, "spearman");
    auto const rx = average_ranks(x);
    auto const ry = average_ranks(y);
    return pearson(rx, ry);
}

/// Paired t-test on d = x - y, two-sided. Identical sequences give t = 0, p = 1.
inline TestResult paired_t(std::span<double const> x, std::span<double const> y) {
    detail::require_pair(x, y, 2, "paired_t");
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
    double const n = static_cast<double>(d.size());
    double const md = mean(d);
    double const var = variance(d);
    if (var == 0.0) {
        if (md == 0.0) return {0.0, n - 1.0, 1.0, TestKind::PairedT};
        fail(Errc::DegenerateInput, "paired_t: differences are constant and nonzero");
    }
    double const t = md / std::sqrt(var / n);
    return {t, n - 1.0, special::student_t_two_sided(t, n - 1.0), TestKind::PairedT};
}

/// Rows and columns of a 2x2 contingency table of counts.
using Table2x2 = std::array<std::array<double, 2>, 2>;

/// Pearson chi-square test of independence with one degree of freedom;
/// `yates` applies the continuity correction.
inline TestResult chi_square_2x2(Table2x2 const& t, bool yates = false) {
    double const r0 = t[0][0] + t[0][1];
    double const r1 = t[1][0] + t[1][1];
    double const c0 = t[0][0] + t[1][0];
    double const c1 = t[0][1] + t[1][1];
    double const n = r0 + r1;
    for (auto const& row : t)
        for (double v : row)
            if (!(v >= 0.0)) fail(Errc::DegenerateTable, "chi_square: negative count");
    if (r0 == 0.0 || r1 == 0.0 || c0 == 0.0 || c1 == 0.0) fail(Errc::DegenerateTable, "chi_square: zero marginal");
    double const rows[2] = {r0, r1};
    double const cols[2] = {c0, c1};
    double stat = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double const expected = rows[i] * cols[j] / n;
            double dev = std::abs(t[i][j] - expected);
            if (yates) dev = std::max(0.0, dev - 0.5);
            stat += dev * dev / expected;
        }
    return {stat, 1.0, special::chi_square_sf(stat, 1.0), TestKind::ChiSquare1};
}

struct OLSFit {
    double intercept = 0.0;
    double slope = 0.0;
    double se_intercept = 0.0;
    double se_slope = 0.0;
    double r_squared = 0.0;  // defined as 0 when y is constant
    std::size_t n = 0;
    TestResult intercept_test;
    TestResult slope_test;
};

/// y = intercept + slope * x by least squares with homoskedastic standard errors.
inline OLSFit ols_simple(std::span<double const> x, std::span<double const> y) {
    detail::require_pair(x, y, 3, "ols_simple");
    double const n = static_cast<double>(x.size());
    double const mx = mean(x);
    double const my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) fail(Errc::DegenerateInput, "ols_simple: regressor is constant");

    OLSFit fit;
    fit.n = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double const r = y[i] - (fit.intercept + fit.slope * x[i]);
        sse += r * r;
    }
    fit.r_squared = syy == 0.0 ? 0.0 : std::clamp(1.0 - sse / syy, 0.0, 1.0);
    double const df = n - 2.0;
    double const s2 = sse / df;
    fit.se_slope = std::sqrt(s2 / sxx);
    fit.se_intercept = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    auto coef_test = [df](double estimate, double se) {
        if (se == 0.0) return TestResult{estimate == 0.0 ? 0.0 : HUGE_VAL, df, estimate == 0.0 ? 1.0 : 0.0,
                                         TestKind::OLSCoef};
        double const t = estimate / se;
        return TestResult{t, df, special::student_t_two_sided(t, df), TestKind::OLSCoef};
    };
    fit.intercept_test = coef_test(fit.intercept, fit.se_intercept);
    fit.slope_test = coef_test(fit.slope, fit.se_slope);
    return fit;
}

}  // namespace rmkt::stats
