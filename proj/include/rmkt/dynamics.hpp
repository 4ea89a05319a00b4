#pragma once

// How market error falls as trading proceeds: per-market error series,
// cross-market mean error curves over trade number or elapsed hours, LOESS
// smoothing of those curves, and error-reduction milestones.

#include <rmkt/csv.hpp>
#include <rmkt/dataset.hpp>
#include <rmkt/error.hpp>
#include <rmkt/stats.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace rmkt {

enum class Axis { TradeIndex, HoursSinceOpen };

constexpr std::string_view to_string(Axis a) noexcept { return a == Axis::TradeIndex ? "trades" : "hours"; }

struct ErrorPoint {
    double x = 0.0;
    double error = 0.0;
};

struct CurvePoint {
    double x = 0.0;
    double mean_abs_error = 0.0;
    std::size_t n_contributing = 0;  // markets with at least one trade at or before x
};

struct ErrorCurve {
    Axis axis = Axis::TradeIndex;
    std::vector<CurvePoint> points;

    [[nodiscard]] std::vector<double> xs() const {
        std::vector<double> v;
        for (auto const& p : points) v.push_back(p.x);
        return v;
    }
    [[nodiscard]] std::vector<double> values() const {
        std::vector<double> v;
        for (auto const& p : points) v.push_back(p.mean_abs_error);
        return v;
    }
};

/// |outcome - price| after each trade. Trade k (1-based) sits at x = k on the
/// trade axis, or at its elapsed hours since market open on the time axis.
inline std::vector<ErrorPoint> error_series(Dataset const& ds, std::string_view finding_id, Axis axis) {
    auto const& f = ds.finding(finding_id);
    auto const idx = ds.trade_indices(finding_id);
    if (idx.empty()) fail(Errc::EmptyMarket, "market '" + std::string(finding_id) + "' has no trades");
    std::vector<ErrorPoint> out;
    out.reserve(idx.size());
    std::size_t k = 0;
    for (auto i : idx) {
        auto const& t = ds.trades()[i];
        ++k;
        double const x = axis == Axis::TradeIndex ? static_cast<double>(k) : hours_between(f.market_open, t.timestamp);
        out.push_back({x, std::abs(static_cast<double>(f.outcome) - t.post_trade_price)});
    }
    return out;
}

/// Trade axis: 0, 1, ..., longest market's trade count. Time axis: whole
/// hours from 0 through the longest market duration (rounded up).
inline std::vector<double> default_grid(Dataset const& ds, Axis axis) {
    double last = 0.0;
    for (auto const& f : ds.findings()) {
        double const extent = axis == Axis::TradeIndex ? static_cast<double>(ds.trade_indices(f.id).size())
                                                       : std::ceil(hours_between(f.market_open, f.market_close));
        last = std::max(last, extent);
    }
    std::vector<double> grid;
    for (double x = 0.0; x <= last; x += 1.0) grid.push_back(x);
    return grid;
}

/// Mean over all markets of the error of each market's latest trade at or
/// before each grid point. Markets without such a trade contribute
/// |outcome - 0.5|; markets that have stopped trading keep their last error.
inline ErrorCurve mean_error_curve(Dataset const& ds, Axis axis, std::span<double const> grid) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) fail(Errc::InvalidValue, "grid must be strictly increasing");
    struct Market {
        double prior_error;
        std::vector<ErrorPoint> series;
    };
    std::vector<Market> markets;
    markets.reserve(ds.findings().size());
    for (auto const& f : ds.findings()) {
        Market m{std::abs(static_cast<double>(f.outcome) - 0.5), {}};
        if (!ds.trade_indices(f.id).empty()) m.series = error_series(ds, f.id, axis);
        markets.push_back(std::move(m));
    }

    ErrorCurve curve;
    curve.axis = axis;
    if (markets.empty()) return curve;
    for (double g : grid) {
        double sum = 0.0;
        std::size_t contributing = 0;
        for (auto const& m : markets) {
            auto it = std::upper_bound(m.series.begin(), m.series.end(), g,
                                       [](double v, ErrorPoint const& p) { return v < p.x; });
            if (it == m.series.begin()) {
                sum += m.prior_error;
            } else {
                sum += std::prev(it)->error;
                ++contributing;
            }
        }
        curve.points.push_back({g, sum / static_cast<double>(markets.size()), contributing});
    }
    return curve;
}

inline ErrorCurve mean_error_curve(Dataset const& ds, Axis axis) {
    auto const grid = default_grid(ds, axis);
    return mean_error_curve(ds, axis, grid);
}

// ---------------------------------------------------------------------------
// LOESS

struct LoessConfig {
    double span = 0.75;
    int degree = 2;
};

namespace detail {

inline double tricube(double u) {
    if (u >= 1.0) return 0.0;
    double const t = 1.0 - u * u * u;
    return t * t * t;
}

/// Solves the (degree+1)-square system in place by Gaussian elimination
/// with partial pivoting. Returns false when singular.
inline bool solve(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    std::size_t const n = b.size();
    double scale = 0.0;
    for (auto const& row : a)
        for (double v : row) scale = std::max(scale, std::abs(v));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) <= 1e-13 * scale) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double const f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * b[c];
        b[i] = s / a[i][i];
    }
    return true;
}

}  // namespace detail

/// Locally weighted polynomial regression evaluated at each x. The
/// neighbourhood of x is its q = max(floor(span * n), degree + 1) nearest
/// points; its radius h is the q-th smallest distance, widened to the next
/// distinct distance while fewer than degree + 1 points lie strictly inside.
/// Distances within 1e-9 of the x range count as ties, so spacing that is
/// equal up to rounding cannot leave a neighbour with a vanishing weight.
/// Weights are tricube(d / h).
inline std::vector<double> loess(std::span<double const> x, std::span<double const> y, LoessConfig const& cfg) {
    if (x.size() != y.size()) fail(Errc::InvalidValue, "loess: x and y differ in length");
    if (!(cfg.span > 0.0 && cfg.span <= 1.0)) fail(Errc::InvalidValue, "loess: span must be in (0, 1]");
    if (cfg.degree != 1 && cfg.degree != 2) fail(Errc::InvalidValue, "loess: degree must be 1 or 2");
    std::size_t const n = x.size();
    std::size_t const terms = static_cast<std::size_t>(cfg.degree) + 1;
    if (n < terms + 1)
        fail(Errc::InsufficientPoints, "loess: need at least " + std::to_string(terms + 1) + " points, got " +
                                           std::to_string(n));
    std::size_t const q =
        std::clamp(static_cast<std::size_t>(std::floor(cfg.span * static_cast<double>(n))), terms, n);

    auto const [lo, hi] = std::minmax_element(x.begin(), x.end());
    double const tie = 1e-9 * (*hi - *lo);

    std::vector<double> fitted(n);
    std::vector<double> dist(n), scratch(n);
    for (std::size_t i = 0; i < n; ++i) {
        double const x0 = x[i];
        for (std::size_t j = 0; j < n; ++j) dist[j] = std::abs(x[j] - x0);
        scratch = dist;
        std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(q - 1), scratch.end());
        double h = scratch[q - 1];
        auto inside = [&](double radius) {
            return static_cast<std::size_t>(std::count_if(dist.begin(), dist.end(), [&](double d) { return d < radius - tie; }));
        };
        while (inside(h) < terms) {
            double next = HUGE_VAL;
            for (double d : dist)
                if (d > h + tie) next = std::min(next, d);
            if (!std::isfinite(next)) {
                // Every point is within h: extend just past the farthest one.
                h = h > 0.0 ? h * (1.0 + 1e-9) : 1.0;
                break;
            }
            h = next;
        }

        std::vector<std::vector<double>> normal(terms, std::vector<double>(terms, 0.0));
        std::vector<double> rhs(terms, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double const w = detail::tricube(dist[j] / h);
            if (w == 0.0) continue;
            double const u = (x[j] - x0) / h;
            double basis[3] = {1.0, u, u * u};
            for (std::size_t r = 0; r < terms; ++r) {
                rhs[r] += w * basis[r] * y[j];
                for (std::size_t c = 0; c < terms; ++c) normal[r][c] += w * basis[r] * basis[c];
            }
        }
        if (!detail::solve(normal, rhs))
            fail(Errc::InsufficientPoints, "loess: local design is singular at x = " + csv::format_double(x0));
        fitted[i] = rhs[0];
    }
    return fitted;
}

/// Same grid, values replaced by their LOESS fit. Smoothed values are not
/// clamped, so they may leave [0, 1] slightly near sharp bends.
inline ErrorCurve loess_fit(ErrorCurve const& curve, LoessConfig const& cfg = {}) {
    auto const smoothed = loess(curve.xs(), curve.values(), cfg);
    ErrorCurve out = curve;
    for (std::size_t i = 0; i < out.points.size(); ++i) out.points[i].mean_abs_error = smoothed[i];
    return out;
}

// ---------------------------------------------------------------------------
// Milestones

/// What "total error reduction" is measured against.
enum class ReductionTotal { FirstMinusMinimum, FirstMinusFinal };

struct Milestone {
    double fraction = 0.0;
    double x = 0.0;
};

namespace detail {

inline double total_reduction(std::vector<CurvePoint> const& pts, ReductionTotal mode) {
    if (pts.empty()) fail(Errc::NoReduction, "empty curve");
    double const first = pts.front().mean_abs_error;
    double end = pts.back().mean_abs_error;
    if (mode == ReductionTotal::FirstMinusMinimum)
        for (auto const& p : pts) end = std::min(end, p.mean_abs_error);
    double const total = first - end;
    if (!(total > 0.0)) fail(Errc::NoReduction, "curve never falls below its first value");
    return total;
}

}  // namespace detail

/// Smallest x (linearly interpolated between grid points) by which the
/// curve has fallen by `fraction` of its total reduction.
inline Milestone reduction_milestone(ErrorCurve const& curve, double fraction,
                                     ReductionTotal mode = ReductionTotal::FirstMinusMinimum) {
    if (!(fraction > 0.0 && fraction <= 1.0)) fail(Errc::InvalidValue, "fraction must be in (0, 1]");
    auto const& pts = curve.points;
    double const total = detail::total_reduction(pts, mode);
    double const target = pts.front().mean_abs_error - fraction * total;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].mean_abs_error <= target) {
            double const y0 = pts[i - 1].mean_abs_error;
            double const y1 = pts[i].mean_abs_error;
            double const t = y0 == y1 ? 1.0 : (y0 - target) / (y0 - y1);
            return {fraction, pts[i - 1].x + std::clamp(t, 0.0, 1.0) * (pts[i].x - pts[i - 1].x)};
        }
    }
    // Only reachable through rounding in `target`; the minimum attains it.
    auto const best = std::min_element(pts.begin(), pts.end(), [](auto const& a, auto const& b) {
        return a.mean_abs_error < b.mean_abs_error;
    });
    return {fraction, best->x};
}

/// Share of the total reduction achieved by x (curve interpolated linearly).
inline double reduction_fraction_at(ErrorCurve const& curve, double x,
                                    ReductionTotal mode = ReductionTotal::FirstMinusMinimum) {
    auto const& pts = curve.points;
    double const total = detail::total_reduction(pts, mode);
    double y = pts.back().mean_abs_error;
    if (x <= pts.front().x) {
        y = pts.front().mean_abs_error;
    } else {
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (x <= pts[i].x) {
                double const t = (x - pts[i - 1].x) / (pts[i].x - pts[i - 1].x);
                y = pts[i - 1].mean_abs_error + t * (pts[i].mean_abs_error - pts[i - 1].mean_abs_error);
                break;
            }
    }
    return (pts.front().mean_abs_error - y) / total;
}

// ---------------------------------------------------------------------------
// Late-trade smoothing

struct LateSmoothingResult {
    stats::TestResult test;  // paired t on final-price error minus smoothed error
    std::size_t n_markets = 0;
    std::size_t n_smoothed = 0;  // markets with at least one trade after the cutoff
    double mae_final = 0.0;
    double mae_smoothed = 0.0;
};

/// Alternative forecast for one market: the mean of prices of trades after
/// open + cutoff, weighted linearly from 0 at the cutoff to 1 at close.
/// Without such trades, the final price.
inline double late_weighted_price(Dataset const& ds, std::string_view finding_id, double cutoff_hours) {
    auto const& f = ds.finding(finding_id);
    auto const idx = ds.trade_indices(finding_id);
    if (idx.empty()) fail(Errc::EmptyMarket, "market '" + std::string(finding_id) + "' has no trades");
    double const span_hours = hours_between(f.market_open, f.market_close) - cutoff_hours;
    double num = 0.0, den = 0.0;
    for (auto i : idx) {
        auto const& t = ds.trades()[i];
        double const after = hours_between(f.market_open, t.timestamp) - cutoff_hours;
        if (after <= 0.0 || span_hours <= 0.0) continue;
        double const w = after / span_hours;
        num += w * t.post_trade_price;
        den += w;
    }
    return den > 0.0 ? num / den : ds.trades()[idx.back()].post_trade_price;
}

inline LateSmoothingResult late_trade_smoothing(Dataset const& ds, double cutoff_hours = 168.0) {
    std::vector<double> final_err, smooth_err;
    LateSmoothingResult r;
    for (auto const& f : ds.findings()) {
        auto const idx = ds.trade_indices(f.id);
        if (idx.empty()) continue;
        double const final_price = ds.trades()[idx.back()].post_trade_price;
        double const alt = late_weighted_price(ds, f.id, cutoff_hours);
        final_err.push_back(std::abs(f.outcome - final_price));
        smooth_err.push_back(std::abs(f.outcome - alt));
        bool smoothed = false;
        for (auto i : idx)
            if (hours_between(f.market_open, ds.trades()[i].timestamp) > cutoff_hours) smoothed = true;
        r.n_smoothed += smoothed ? 1 : 0;
    }
    r.n_markets = final_err.size();
    if (r.n_markets < 2) fail(Errc::DegenerateInput, "late-trade smoothing needs at least two markets with trades");
    r.mae_final = stats::mean(final_err);
    r.mae_smoothed = stats::mean(smooth_err);
    r.test = stats::paired_t(final_err, smooth_err);
    return r;
}

inline void write_curve(std::ostream& out, ErrorCurve const& raw, std::optional<ErrorCurve> const& smoothed) {
    csv::write_row(out, {"x", "mean_abs_error", "smoothed", "n_contributing"});
    for (std::size_t i = 0; i < raw.points.size(); ++i) {
        auto const& p = raw.points[i];
        csv::write_row(out, {csv::format_double(p.x), csv::format_double(p.mean_abs_error),
                             smoothed ? csv::format_double(smoothed->points[i].mean_abs_error) : std::string("NA"),
                             std::to_string(p.n_contributing)});
    }
}

}  // namespace rmkt
