#pragma once

// Regularized incomplete beta and gamma functions and the t / chi-square
// tail probabilities built on them. Reentrant: no global state, which is why
// log-gamma is evaluated here rather than through std::lgamma (signgam).

#include <rmkt/error.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace rmkt::special {

namespace detail {

inline constexpr double eps = 1e-16;
inline constexpr double tiny = 1e-300;
inline constexpr int max_iterations = 100000;

inline void require(bool ok, char const* what) {
    if (!ok) fail(Errc::DomainError, what);
}

}  // namespace detail

/// ln Gamma(x) for x > 0 (Lanczos, g = 7, 9 terms; ~1e-15 relative).
inline double log_gamma(double x) {
    detail::require(x > 0.0 && std::isfinite(x), "log_gamma requires finite x > 0");
    static constexpr std::array<double, 9> c{0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                             771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                             -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
    }
    double const z = x - 1.0;
    double sum = c[0];
    for (int i = 1; i < 9; ++i) sum += c[i] / (z + i);
    double const t = z + 7.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

inline double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

namespace detail {

// Continued fraction for I_x(a,b), modified Lentz. Converges quickly for
// x < (a + 1) / (a + b + 2).
inline double beta_continued_fraction(double a, double b, double x) {
    double const qab = a + b;
    double const qap = a + 1.0;
    double const qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iterations; ++m) {
        int const m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double const del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    fail(Errc::DomainError, "incomplete beta continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    detail::require(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b), "incomplete_beta requires a, b > 0");
    detail::require(x >= 0.0 && x <= 1.0, "incomplete_beta requires 0 <= x <= 1");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double const log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * detail::beta_continued_fraction(a, b, x) / a;
    return 1.0 - std::exp(log_front) * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

namespace detail {

inline double gamma_series(double s, double x) {
    double ap = s;
    double sum = 1.0 / s;
    double del = sum;
    for (int n = 1; n <= max_iterations; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * eps) return sum * std::exp(-x + s * std::log(x) - log_gamma(s));
    }
    fail(Errc::DomainError, "incomplete gamma series did not converge");
}

inline double gamma_continued_fraction(double s, double x) {
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_iterations; ++i) {
        double const an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double const del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return std::exp(-x + s * std::log(x) - log_gamma(s)) * h;
    }
    fail(Errc::DomainError, "incomplete gamma continued fraction did not converge");
}

}  // namespace detail

/// Regularized lower incomplete gamma P(s, x).
inline double gamma_p(double s, double x) {
    detail::require(s > 0.0 && std::isfinite(s), "gamma_p requires s > 0");
    detail::require(x >= 0.0, "gamma_p requires x >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < s + 1.0) return detail::gamma_series(s, x);
    return 1.0 - detail::gamma_continued_fraction(s, x);
}

/// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x).
inline double gamma_q(double s, double x) {
    detail::require(s > 0.0 && std::isfinite(s), "gamma_q requires s > 0");
    detail::require(x >= 0.0, "gamma_q requires x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < s + 1.0) return 1.0 - detail::gamma_series(s, x);
    return detail::gamma_continued_fraction(s, x);
}

/// Two-sided tail probability P(|T| >= |t|) for Student's t with `df` degrees of freedom.
inline double student_t_two_sided(double t, double df) {
    detail::require(df > 0.0, "student_t requires df > 0");
    if (std::isnan(t)) fail(Errc::DomainError, "t statistic is NaN");
    if (std::isinf(t)) return 0.0;
    return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

inline double student_t_cdf(double t, double df) {
    double const tail = 0.5 * student_t_two_sided(t, df);
    return t >= 0.0 ? 1.0 - tail : tail;
}

/// Upper tail P(X >= x) of the chi-square distribution.
inline double chi_square_sf(double x, double df) {
    detail::require(df > 0.0, "chi_square requires df > 0");
    detail::require(x >= 0.0, "chi_square statistic must be nonnegative");
    return gamma_q(0.5 * df, 0.5 * x);
}

}  // namespace rmkt::special
