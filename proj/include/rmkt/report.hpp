#pragma once

// Runs the full analysis over a dataset and renders it: aggregates, scores,
// Table-1 and Table-2 shaped tables, error curves, a flat key-value report
// document, and computed-vs-published discrepancies.

#include <rmkt/aggregate.hpp>
#include <rmkt/csv.hpp>
#include <rmkt/dataset.hpp>
#include <rmkt/dynamics.hpp>
#include <rmkt/evaluate.hpp>
#include <rmkt/reference_values.hpp>
#include <rmkt/stats.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace rmkt {

struct AnalysisOptions {
    AggregateOptions aggregate;  // its vote_threshold is also the binarization threshold
    bool yates = false;
    LoessConfig loess;
    double late_cutoff_hours = 168.0;
    bool dynamics = true;
};

struct Analysis {
    AnalysisOptions options;
    std::size_t n_findings = 0;
    std::size_t n_surveys = 0;
    std::size_t n_trades = 0;

    AggregateSet aggregates;
    std::vector<ScoreRow> scores;
    std::vector<ProjectSummary> projects;
    std::optional<ProjectSummary> pooled;

    std::optional<stats::TestResult> overestimation_survey;
    std::optional<stats::TestResult> overestimation_market;
    std::optional<stats::TestResult> error_difference;
    std::optional<stats::TestResult> extremeness;
    std::optional<stats::TestResult> accuracy;
    std::optional<AsymmetryResult> asymmetry_market;
    std::optional<AsymmetryResult> asymmetry_survey;
    std::optional<PValueAnalysis> pvalue;

    std::optional<ErrorCurve> curve_trades;
    std::optional<ErrorCurve> curve_hours;
    std::optional<ErrorCurve> smooth_trades;
    std::optional<ErrorCurve> smooth_hours;
    std::map<std::string, double> milestones;
    std::optional<LateSmoothingResult> late_smoothing;

    std::vector<std::string> notes;  // why any part above is missing
};

namespace detail {

template <class T, class F>
void attempt(std::optional<T>& slot, std::vector<std::string>& notes, std::string const& what, F&& f) {
    try {
        slot = f();
    } catch (Error const& e) {
        notes.push_back(what + ": " + e.what());
    }
}

}  // namespace detail

inline Analysis analyze(Dataset const& ds, AnalysisOptions const& opts = {}) {
    Analysis a;
    a.options = opts;
    a.n_findings = ds.findings().size();
    a.n_surveys = ds.surveys().size();
    a.n_trades = ds.trades().size();
    a.aggregates = aggregate_all(ds, opts.aggregate);
    for (auto const& s : a.aggregates.skipped)
        a.notes.push_back("skipped " + std::string(to_string(s.method)) + " for " + s.finding_id + ": " + s.message);
    a.scores = score(a.aggregates.forecasts, ds.findings(), opts.aggregate.vote_threshold);
    a.projects = summarize(a.scores, GroupBy::Project);
    if (auto pooled = summarize(a.scores, GroupBy::Pooled); !pooled.empty()) a.pooled = pooled.front();

    auto& notes = a.notes;
    auto const& rows = a.scores;
    detail::attempt(a.overestimation_survey, notes, "overestimation (survey)",
                    [&] { return overestimation_tests(rows).survey; });
    detail::attempt(a.overestimation_market, notes, "overestimation (market)",
                    [&] { return overestimation_tests(rows).market; });
    detail::attempt(a.error_difference, notes, "error difference", [&] { return error_difference_test(rows); });
    detail::attempt(a.extremeness, notes, "extremeness", [&] { return extremeness_test(rows); });
    detail::attempt(a.accuracy, notes, "accuracy chi-square",
                    [&] { return accuracy_test(rows, Method::MarketFinalPrice, Method::SurveyMean, opts.yates); });
    detail::attempt(a.asymmetry_market, notes, "asymmetry (market)",
                    [&] { return asymmetry_test(rows, Method::MarketFinalPrice, opts.yates); });
    detail::attempt(a.asymmetry_survey, notes, "asymmetry (survey)",
                    [&] { return asymmetry_test(rows, Method::SurveyMean, opts.yates); });
    detail::attempt(a.pvalue, notes, "p-value regression", [&] { return pvalue_regression(ds.findings()); });

    if (opts.dynamics && !ds.findings().empty()) {
        a.curve_trades = mean_error_curve(ds, Axis::TradeIndex);
        a.curve_hours = mean_error_curve(ds, Axis::HoursSinceOpen);
        detail::attempt(a.smooth_trades, notes, "loess (trades)", [&] { return loess_fit(*a.curve_trades, opts.loess); });
        detail::attempt(a.smooth_hours, notes, "loess (hours)", [&] { return loess_fit(*a.curve_hours, opts.loess); });
        auto milestone = [&](std::optional<ErrorCurve> const& c, std::string const& axis, double fraction) {
            if (!c) return;
            std::optional<Milestone> m;
            detail::attempt(m, notes, "milestone " + axis, [&] { return reduction_milestone(*c, fraction); });
            if (m) a.milestones["dynamics." + axis + ".x_at_" + csv::format_double(fraction)] = m->x;
        };
        milestone(a.smooth_trades, "trades", 0.5);
        milestone(a.smooth_trades, "trades", 0.9);
        milestone(a.smooth_hours, "hours", 0.65);
        milestone(a.smooth_hours, "hours", 0.9);
        if (a.curve_hours) {
            std::optional<double> f;
            detail::attempt(f, notes, "raw reduction by first hour",
                            [&] { return reduction_fraction_at(*a.curve_hours, 1.0); });
            if (f) a.milestones["dynamics.hours.raw_fraction_by_1"] = *f;
        }
        if (a.smooth_hours) {
            std::optional<double> f;
            detail::attempt(f, notes, "reduction by first hour",
                            [&] { return reduction_fraction_at(*a.smooth_hours, 1.0); });
            if (f) a.milestones["dynamics.hours.fraction_by_1"] = *f;
        }
        detail::attempt(a.late_smoothing, notes, "late-trade smoothing",
                        [&] { return late_trade_smoothing(ds, opts.late_cutoff_hours); });
    }
    return a;
}

// ---------------------------------------------------------------------------
// Flat metrics

inline std::map<std::string, double> metrics(Analysis const& a) {
    std::map<std::string, double> m;
    m["counts.findings"] = static_cast<double>(a.n_findings);
    m["counts.surveys"] = static_cast<double>(a.n_surveys);
    m["counts.trades"] = static_cast<double>(a.n_trades);

    auto put_summary = [&](ProjectSummary const& s) {
        std::string const g = s.label() + ".";
        m[g + "n_findings"] = static_cast<double>(s.n_findings);
        m[g + "n_replicated"] = static_cast<double>(s.n_replicated);
        m[g + "replication_rate"] = s.replication_rate;
        if (s.spearman_market_survey) m[g + "spearman_market_survey"] = *s.spearman_market_survey;
        if (s.pearson_market_survey) m[g + "pearson_market_survey"] = *s.pearson_market_survey;
        for (auto const& ms : s.methods) {
            std::string const k = g + std::string(to_string(ms.method)) + ".";
            m[k + "n"] = static_cast<double>(ms.n);
            m[k + "mean"] = ms.mean_belief;
            if (!std::isnan(ms.sd_belief)) m[k + "sd"] = ms.sd_belief;
            m[k + "n_correct"] = static_cast<double>(ms.n_correct);
            m[k + "mae"] = ms.mae;
            if (ms.spearman_outcome) m[k + "spearman_outcome"] = *ms.spearman_outcome;
            if (ms.pearson_outcome) m[k + "pearson_outcome"] = *ms.pearson_outcome;
        }
    };
    for (auto const& s : a.projects) put_summary(s);
    if (a.pooled) put_summary(*a.pooled);

    auto put_test = [&](std::string const& name, std::optional<stats::TestResult> const& t) {
        if (!t) return;
        std::string const stat = t->kind == stats::TestKind::PairedT ? ".t" : ".statistic";
        m["tests." + name + stat] = t->statistic;
        m["tests." + name + ".df"] = t->df;
        m["tests." + name + ".p"] = t->p_value;
    };
    put_test("overestimation_survey", a.overestimation_survey);
    put_test("overestimation_market", a.overestimation_market);
    put_test("error_difference", a.error_difference);
    put_test("extremeness", a.extremeness);
    put_test("accuracy_chi2", a.accuracy);
    auto put_asym = [&](std::string const& name, std::optional<AsymmetryResult> const& r) {
        if (!r) return;
        put_test("asymmetry_" + name, r->test);
        auto const& q = r->quadrants;
        std::string const k = "quadrants." + std::string(to_string(q.method)) + ".";
        m[k + "predicted_fail"] = static_cast<double>(q.predicted_fail());
        m[k + "predicted_fail_did"] = static_cast<double>(q.predicted_fail_did);
        m[k + "predicted_replicate"] = static_cast<double>(q.predicted_replicate());
        m[k + "predicted_replicate_did_not"] = static_cast<double>(q.predicted_replicate_did_not);
    };
    put_asym("market", a.asymmetry_market);
    put_asym("survey", a.asymmetry_survey);

    if (a.pvalue) {
        auto const& p = *a.pvalue;
        m["pvalue.intercept"] = p.fit.intercept;
        m["pvalue.se_intercept"] = p.fit.se_intercept;
        m["pvalue.p_intercept"] = p.fit.intercept_test.p_value;
        m["pvalue.slope"] = p.fit.slope;
        m["pvalue.se_slope"] = p.fit.se_slope;
        m["pvalue.p_slope"] = p.fit.slope_test.p_value;
        m["pvalue.r_squared"] = p.fit.r_squared;
        m["pvalue.n"] = static_cast<double>(p.fit.n);
        m["pvalue.rate_at_or_below"] = p.at_or_below.rate();
        m["pvalue.rate_above"] = p.above.rate();
        m["pvalue.n_at_or_below"] = static_cast<double>(p.at_or_below.n);
        m["pvalue.n_above"] = static_cast<double>(p.above.n);
        m["pvalue.correlation"] = p.indicator_outcome_correlation;
    }

    for (auto const& [k, v] : a.milestones) m[k] = v;
    if (a.curve_trades && !a.curve_trades->points.empty())
        m["dynamics.trades.final_mean_abs_error"] = a.curve_trades->points.back().mean_abs_error;
    if (a.late_smoothing) {
        put_test("late_smoothing", a.late_smoothing->test);
        m["dynamics.late_smoothing.mae_final"] = a.late_smoothing->mae_final;
        m["dynamics.late_smoothing.mae_smoothed"] = a.late_smoothing->mae_smoothed;
        m["dynamics.late_smoothing.n_smoothed"] = static_cast<double>(a.late_smoothing->n_smoothed);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Discrepancies against published values

struct Discrepancy {
    std::string key;
    std::optional<double> computed;
    double published = 0.0;
    double tolerance = 0.0;

    [[nodiscard]] std::string status() const {
        if (!computed) return "missing";
        return std::abs(*computed - published) <= tolerance + 1e-12 ? "match" : "deviation";
    }
};

inline std::vector<Discrepancy> discrepancies(std::map<std::string, double> const& computed) {
    std::vector<Discrepancy> out;
    for (auto const& ref : reference::values) {
        Discrepancy d;
        d.key = std::string(ref.key);
        d.published = ref.published;
        d.tolerance = ref.tolerance;
        if (auto it = computed.find(std::string(ref.metric_key())); it != computed.end()) d.computed = it->second;
        out.push_back(std::move(d));
    }
    return out;
}

inline void write_discrepancies(std::ostream& out, std::vector<Discrepancy> const& ds) {
    csv::write_row(out, {"key", "computed", "published", "delta", "tolerance", "status"});
    for (auto const& d : ds)
        csv::write_row(out, {d.key, d.computed ? csv::format_double(*d.computed) : "NA", csv::format_double(d.published),
                             d.computed ? csv::format_double(*d.computed - d.published) : "NA",
                             csv::format_double(d.tolerance), d.status()});
}

// ---------------------------------------------------------------------------
// Tables

namespace detail {

inline std::string count_pct(std::size_t k, std::size_t n) {
    if (n == 0) return "NA";
    return std::to_string(k) + " (" + csv::format_fixed(100.0 * static_cast<double>(k) / static_cast<double>(n), 1) + "%)";
}

inline std::string opt3(std::optional<double> v) { return v ? csv::format_fixed(*v, 3) : "NA"; }

}  // namespace detail

/// Rows are metrics; columns are the projects present followed by Pooled.
inline void write_table1(std::ostream& out, Analysis const& a) {
    std::vector<ProjectSummary const*> cols;
    for (auto const& s : a.projects) cols.push_back(&s);
    if (a.pooled) cols.push_back(&*a.pooled);

    std::vector<std::string> header{"metric"};
    for (auto const* c : cols) header.push_back(c->label());
    csv::write_row(out, header);

    auto row = [&](std::string const& name, std::function<std::string(ProjectSummary const&)> const& cell) {
        std::vector<std::string> r{name};
        for (auto const* c : cols) r.push_back(cell(*c));
        csv::write_row(out, r);
    };
    auto method_cell = [](Method m, std::function<std::string(MethodSummary const&)> f) {
        return [m, f](ProjectSummary const& s) {
            auto const* ms = s.method(m);
            return ms ? f(*ms) : std::string("NA");
        };
    };
    auto mean_of = [](MethodSummary const& ms) { return csv::format_fixed(ms.mean_belief, 3); };
    auto mae_of = [](MethodSummary const& ms) { return csv::format_fixed(ms.mae, 3); };
    auto correct_of = [](MethodSummary const& ms) { return detail::count_pct(ms.n_correct, ms.n); };
    auto rho_of = [](MethodSummary const& ms) { return detail::opt3(ms.spearman_outcome); };
    auto r_of = [](MethodSummary const& ms) { return detail::opt3(ms.pearson_outcome); };

    row("Replicated Findings", [](auto const& s) { return std::to_string(s.n_findings); });
    row("Successful replications", [](auto const& s) { return detail::count_pct(s.n_replicated, s.n_findings); });
    row("Mean beliefs - Prediction Market", method_cell(Method::MarketFinalPrice, mean_of));
    row("Correct - Prediction Markets (%)", method_cell(Method::MarketFinalPrice, correct_of));
    row("Mean Absolute Error - Prediction Market", method_cell(Method::MarketFinalPrice, mae_of));
    row("Mean beliefs - Survey", method_cell(Method::SurveyMean, mean_of));
    row("Correct - Survey (%)", method_cell(Method::SurveyMean, correct_of));
    row("Mean Absolute Error - Survey", method_cell(Method::SurveyMean, mae_of));
    row("Spearman Correlation - Prediction Market and Survey beliefs",
        [](auto const& s) { return detail::opt3(s.spearman_market_survey); });
    row("Spearman Correlation - Replication Outcomes and Prediction Market",
        method_cell(Method::MarketFinalPrice, rho_of));
    row("Spearman Correlation - Replication Outcomes and Survey beliefs", method_cell(Method::SurveyMean, rho_of));
    row("Pearson Correlation - Prediction Market and Survey beliefs",
        [](auto const& s) { return detail::opt3(s.pearson_market_survey); });
    row("Pearson Correlation - Replication Outcomes and Prediction Market", method_cell(Method::MarketFinalPrice, r_of));
    row("Pearson Correlation - Replication Outcomes and Survey beliefs", method_cell(Method::SurveyMean, r_of));
    for (auto m : {Method::SurveyMedian, Method::SurveyVoting, Method::SurveyVarWeighted}) {
        row("Mean beliefs - " + std::string(to_string(m)), method_cell(m, mean_of));
        row("Mean Absolute Error - " + std::string(to_string(m)), method_cell(m, mae_of));
    }
}

inline std::string significance_stars(double p) { return p < 0.005 ? "**" : p < 0.05 ? "*" : ""; }

inline void write_table2(std::ostream& out, PValueAnalysis const& p) {
    csv::write_row(out, {"term", "estimate", "std_error", "t_value", "p_value", "note"});
    auto coef = [&](std::string const& name, double est, double se, stats::TestResult const& t) {
        csv::write_row(out, {name, csv::format_fixed(est, 4), csv::format_fixed(se, 4), csv::format_fixed(t.statistic, 3),
                             csv::format_double(t.p_value), significance_stars(t.p_value)});
    };
    coef("Intercept", p.fit.intercept, p.fit.se_intercept, p.fit.intercept_test);
    coef("P value <= threshold", p.fit.slope, p.fit.se_slope, p.fit.slope_test);
    csv::write_row(out, {"Observations", std::to_string(p.fit.n), "", "", "", ""});
    csv::write_row(out, {"R2", csv::format_fixed(p.fit.r_squared, 4), "", "", "", ""});
    auto rate = [&](std::string const& name, CategoryRate const& c) {
        csv::write_row(out, {name, csv::format_fixed(c.rate(), 4), "", "", "",
                             std::to_string(c.replicated) + "/" + std::to_string(c.n)});
    };
    rate("Replication rate (p <= threshold)", p.at_or_below);
    rate("Replication rate (p > threshold)", p.above);
}

// ---------------------------------------------------------------------------
// Report document

inline nlohmann::ordered_json to_json(Analysis const& a) {
    nlohmann::ordered_json doc;
    auto const& o = a.options;
    nlohmann::ordered_json cfg;
    std::vector<std::string> methods;
    for (auto m : o.aggregate.methods) methods.emplace_back(to_string(m));
    cfg["methods"] = methods;
    cfg["threshold"] = o.aggregate.vote_threshold;
    cfg["per_project_weights"] = o.aggregate.per_project_weights;
    cfg["yates"] = o.yates;
    cfg["loess_span"] = o.loess.span;
    cfg["loess_degree"] = o.loess.degree;
    cfg["late_cutoff_hours"] = o.late_cutoff_hours;
    doc["config"] = cfg;

    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (auto const& [k, v] : metrics(a)) m[k] = v;
    doc["metrics"] = m;

    nlohmann::ordered_json disc = nlohmann::ordered_json::array();
    for (auto const& d : discrepancies(metrics(a))) {
        nlohmann::ordered_json e;
        e["key"] = d.key;
        e["computed"] = d.computed ? nlohmann::ordered_json(*d.computed) : nlohmann::ordered_json(nullptr);
        e["published"] = d.published;
        e["tolerance"] = d.tolerance;
        e["status"] = d.status();
        disc.push_back(e);
    }
    doc["discrepancies"] = disc;
    doc["notes"] = a.notes;
    return doc;
}

// ---------------------------------------------------------------------------
// Output files

/// Which output files to emit.
struct OutputSelection {
    bool aggregates = true;
    bool scores = true;
    bool table1 = true;
    bool table2 = true;
    bool curves = true;
    bool discrepancies = true;
    bool report = true;
};

inline void write_text_file(std::filesystem::path const& path, std::string const& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::Io, "cannot write '" + path.string() + "'");
    out << content;
}

template <class F>
std::string render(F&& f) {
    std::ostringstream s;
    f(s);
    return s.str();
}

/// Writes the selected outputs into `dir` (created if needed); returns the
/// paths written, in order.
inline std::vector<std::filesystem::path> write_outputs(Analysis const& a, std::filesystem::path const& dir,
                                                        OutputSelection const& sel = {}) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    auto emit = [&](char const* name, std::string const& content) {
        auto const path = dir / name;
        write_text_file(path, content);
        written.push_back(path);
    };
    if (sel.aggregates)
        emit("aggregates.csv", render([&](std::ostream& o) { write_aggregates(o, a.aggregates.forecasts); }));
    if (sel.scores) emit("scores.csv", render([&](std::ostream& o) { write_scores(o, a.scores); }));
    if (sel.table1) emit("table1.csv", render([&](std::ostream& o) { write_table1(o, a); }));
    if (sel.table2 && a.pvalue) emit("table2.csv", render([&](std::ostream& o) { write_table2(o, *a.pvalue); }));
    if (sel.curves && a.curve_trades)
        emit("curve_trades.csv", render([&](std::ostream& o) { write_curve(o, *a.curve_trades, a.smooth_trades); }));
    if (sel.curves && a.curve_hours)
        emit("curve_hours.csv", render([&](std::ostream& o) { write_curve(o, *a.curve_hours, a.smooth_hours); }));
    if (sel.discrepancies)
        emit("discrepancies.csv",
             render([&](std::ostream& o) { write_discrepancies(o, discrepancies(metrics(a))); }));
    if (sel.report) emit("report.json", to_json(a).dump(2) + "\n");
    return written;
}

}  // namespace rmkt
