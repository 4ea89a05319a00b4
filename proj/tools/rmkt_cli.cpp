// rmkt: command-line front end for loading, replaying, aggregating and
// evaluating replication-forecast datasets.
//
// Exit codes: 0 success, 1 usage error, 2 invalid data, 3 analysis or I/O error.

#include <rmkt/rmkt.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace rmkt;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_failure = 3;

struct RunConfig {
    std::string data_dir;
    std::string outcomes;
    std::string surveys;
    std::string trades;
    std::string mapping;
    std::string out;
    std::vector<std::string> methods;
    double threshold = default_vote_threshold;
    double loess_span = 0.75;
    int loess_degree = 2;
    double pvalue_threshold = default_pvalue_threshold;
    bool yates = false;
    bool per_project_weights = false;
    bool strict = false;
    std::optional<std::size_t> expect_findings;

    // replay
    std::string finding;
    std::string mode = "price-taking";
    double liquidity = default_liquidity;
    double endowment = default_endowment;

    // synth
    std::uint64_t seed = 7;
    std::size_t markets = 20;
    std::size_t traders = 30;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

DatasetPaths paths_of(RunConfig const& c) {
    DatasetPaths p;
    if (!c.data_dir.empty()) p = DatasetPaths::in_directory(c.data_dir);
    if (!c.outcomes.empty()) p.outcomes = c.outcomes;
    if (!c.surveys.empty()) p.surveys = c.surveys;
    if (!c.trades.empty()) p.trades = c.trades;
    if (p.outcomes.empty() || p.surveys.empty() || p.trades.empty())
        throw UsageError("input tables not given: pass --data-dir (or set RMKT_DATA_DIR) or all of "
                         "--outcomes, --surveys and --trades");
    return p;
}

void print_violations(std::ostream& out, ValidationReport const& r) {
    for (auto const& v : r.violations) out << describe(v) << '\n';
}

/// Loads the dataset. Rejected rows are reported on stderr and left out;
/// with --strict any error aborts the run.
Dataset load(RunConfig const& c) {
    ColumnMapping mapping;
    if (!c.mapping.empty()) mapping = read_mapping(c.mapping);
    LoadOptions opts;
    opts.pvalue_threshold = c.pvalue_threshold;
    opts.expected_findings = c.expect_findings;
    auto result = load_dataset(paths_of(c), mapping, opts);
    print_violations(std::cerr, result.report);
    if (c.strict && !result.report.ok())
        throw Error(Errc::InvalidValue, std::to_string(result.report.error_count()) + " invalid rows (--strict)");
    return std::move(result.dataset);
}

AnalysisOptions analysis_options(RunConfig const& c) {
    AnalysisOptions o;
    if (!c.methods.empty()) {
        o.aggregate.methods.clear();
        for (auto const& name : c.methods) {
            if (name == "all") {
                o.aggregate.methods.assign(std::begin(all_methods), std::end(all_methods));
                continue;
            }
            auto m = parse_method(name);
            if (!m) throw UsageError("unknown method '" + name + "'");
            o.aggregate.methods.push_back(*m);
        }
    }
    o.aggregate.vote_threshold = c.threshold;
    o.aggregate.per_project_weights = c.per_project_weights;
    o.yates = c.yates;
    o.loess = {c.loess_span, c.loess_degree};
    return o;
}

fs::path out_dir(RunConfig const& c) { return c.out.empty() ? fs::path(".") : fs::path(c.out); }

void list_written(std::vector<fs::path> const& paths) {
    for (auto const& p : paths) std::cout << p.string() << '\n';
}

void print_notes(Analysis const& a) {
    for (auto const& n : a.notes) std::cerr << "note: " << n << '\n';
}

void print_test(std::string const& name, std::optional<stats::TestResult> const& t) {
    if (!t) return;
    std::cout << name << ": statistic=" << csv::format_fixed(t->statistic, 4) << " df=" << csv::format_double(t->df)
              << " p=" << csv::format_double(t->p_value) << '\n';
}

// ---------------------------------------------------------------------------
// Subcommands

int run_validate(RunConfig const& c) {
    ColumnMapping mapping;
    if (!c.mapping.empty()) mapping = read_mapping(c.mapping);
    LoadOptions opts;
    opts.pvalue_threshold = c.pvalue_threshold;
    opts.expected_findings = c.expect_findings;
    auto const result = load_dataset(paths_of(c), mapping, opts);
    print_violations(std::cout, result.report);
    auto const& ds = result.dataset;
    std::cout << "rows read: outcomes=" << result.rows_read[0] << " surveys=" << result.rows_read[1]
              << " trades=" << result.rows_read[2] << '\n'
              << "rows kept: outcomes=" << ds.findings().size() << " surveys=" << ds.surveys().size()
              << " trades=" << ds.trades().size() << '\n'
              << "errors=" << result.report.error_count() << " warnings=" << result.report.warning_count() << '\n';
    return result.report.ok() ? 0 : exit_data;
}

int run_replay(RunConfig const& c) {
    auto const ds = load(c);
    ReplayMode mode;
    if (c.mode == "price-taking")
        mode = PriceTaking{};
    else if (c.mode == "simulated")
        mode = Simulated{c.liquidity, c.endowment};
    else
        throw UsageError("unknown replay mode '" + c.mode + "' (expected price-taking or simulated)");

    std::vector<std::string> ids;
    if (c.finding.empty())
        for (auto const& f : ds.findings()) ids.push_back(f.id);
    else
        ids.push_back(c.finding);

    auto write = [&](std::ostream& out) {
        csv::write_row(out, {"finding_id", "step", "timestamp", "price"});
        for (auto const& id : ids) {
            if (ds.trade_indices(id).empty() && !c.finding.empty()) replay(ds, id, mode);  // raises EmptyMarket
            if (ds.trade_indices(id).empty()) continue;
            auto const path = replay(ds, id, mode);
            for (std::size_t i = 0; i < path.size(); ++i)
                csv::write_row(out, {id, std::to_string(i + 1), format_timestamp(path[i].timestamp),
                                     csv::format_double(path[i].price)});
        }
    };
    if (c.out.empty()) {
        write(std::cout);
    } else {
        fs::create_directories(c.out);
        auto const path = fs::path(c.out) / "replay.csv";
        write_text_file(path, render(write));
        std::cout << path.string() << '\n';
    }
    return 0;
}

int run_aggregate(RunConfig const& c) {
    auto const ds = load(c);
    auto const opts = analysis_options(c);
    auto const set = aggregate_all(ds, opts.aggregate);
    for (auto const& s : set.skipped)
        std::cerr << "note: skipped " << to_string(s.method) << " for " << s.finding_id << ": " << s.message << '\n';
    fs::create_directories(out_dir(c));
    auto const path = out_dir(c) / "aggregates.csv";
    write_text_file(path, render([&](std::ostream& o) { write_aggregates(o, set.forecasts); }));
    std::cout << path.string() << '\n';
    return 0;
}

int run_evaluate(RunConfig const& c) {
    auto const ds = load(c);
    auto opts = analysis_options(c);
    opts.dynamics = false;
    auto const a = analyze(ds, opts);
    print_notes(a);
    OutputSelection sel;
    sel.table2 = sel.curves = sel.report = false;
    list_written(write_outputs(a, out_dir(c), sel));
    print_test("overestimation_survey", a.overestimation_survey);
    print_test("overestimation_market", a.overestimation_market);
    print_test("error_difference", a.error_difference);
    print_test("extremeness", a.extremeness);
    print_test("accuracy_chi2", a.accuracy);
    if (a.asymmetry_market) print_test("asymmetry_market", a.asymmetry_market->test);
    if (a.asymmetry_survey) print_test("asymmetry_survey", a.asymmetry_survey->test);
    return 0;
}

int run_dynamics(RunConfig const& c) {
    auto const ds = load(c);
    auto const opts = analysis_options(c);
    if (ds.findings().empty()) throw Error(Errc::EmptyMarket, "dataset has no findings");
    Analysis a;
    a.options = opts;
    a.curve_trades = mean_error_curve(ds, Axis::TradeIndex);
    a.curve_hours = mean_error_curve(ds, Axis::HoursSinceOpen);
    a.smooth_trades = loess_fit(*a.curve_trades, opts.loess);
    a.smooth_hours = loess_fit(*a.curve_hours, opts.loess);

    fs::create_directories(out_dir(c));
    std::vector<fs::path> written;
    for (auto [name, raw, smooth] : {std::tuple{"curve_trades.csv", &a.curve_trades, &a.smooth_trades},
                                     std::tuple{"curve_hours.csv", &a.curve_hours, &a.smooth_hours}}) {
        auto const path = out_dir(c) / name;
        write_text_file(path, render([&](std::ostream& o) { write_curve(o, **raw, *smooth); }));
        written.push_back(path);
    }
    list_written(written);

    auto milestone = [&](char const* axis, ErrorCurve const& curve, double fraction) {
        try {
            auto const m = reduction_milestone(curve, fraction);
            std::cout << axis << " x_at_" << csv::format_double(fraction) << "=" << csv::format_fixed(m.x, 2) << '\n';
        } catch (Error const& e) {
            std::cerr << "note: milestone " << axis << ": " << e.what() << '\n';
        }
    };
    milestone("trades", *a.smooth_trades, 0.5);
    milestone("trades", *a.smooth_trades, 0.9);
    milestone("hours", *a.smooth_hours, 0.65);
    milestone("hours", *a.smooth_hours, 0.9);
    try {
        auto const late = late_trade_smoothing(ds);
        print_test("late_smoothing", late.test);
    } catch (Error const& e) {
        std::cerr << "note: late-trade smoothing: " << e.what() << '\n';
    }
    return 0;
}

int run_pvalue(RunConfig const& c) {
    auto const ds = load(c);
    auto const p = pvalue_regression(ds.findings());
    fs::create_directories(out_dir(c));
    auto const path = out_dir(c) / "table2.csv";
    write_text_file(path, render([&](std::ostream& o) { write_table2(o, p); }));
    std::cout << path.string() << '\n';
    std::cout << "slope=" << csv::format_fixed(p.fit.slope, 4) << " se=" << csv::format_fixed(p.fit.se_slope, 4)
              << " r_squared=" << csv::format_fixed(p.fit.r_squared, 4) << '\n';
    return 0;
}

int run_report(RunConfig const& c) {
    auto const ds = load(c);
    auto const a = analyze(ds, analysis_options(c));
    print_notes(a);
    list_written(write_outputs(a, out_dir(c)));
    return 0;
}

int run_synth(RunConfig const& c) {
    SynthConfig cfg;
    cfg.seed = c.seed;
    cfg.markets = c.markets;
    cfg.traders = c.traders;
    cfg.liquidity = c.liquidity;
    cfg.endowment = c.endowment;
    auto const ds = synthesize(cfg);
    fs::create_directories(out_dir(c));
    auto const paths = DatasetPaths::in_directory(out_dir(c).string());
    write_dataset(ds, paths);
    std::cout << paths.outcomes << '\n' << paths.surveys << '\n' << paths.trades << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig c;
    CLI::App app{"Replication-forecast market analysis"};
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--data-dir", c.data_dir, "Directory holding outcomes.csv, surveys.csv and trades.csv")
        ->envname("RMKT_DATA_DIR");
    app.add_option("--outcomes", c.outcomes, "Outcomes table");
    app.add_option("--surveys", c.surveys, "Survey table");
    app.add_option("--trades", c.trades, "Trades table");
    app.add_option("--mapping", c.mapping, "Column mapping file (table.field=source lines)");
    app.add_option("--out", c.out, "Output directory");
    app.add_option("--method", c.methods, "Aggregation methods (repeatable; 'all' for every method)");
    app.add_option("--threshold", c.threshold, "Binarization and voting threshold")
        ->check(CLI::Range(0.0, 1.0).description("in (0,1)"));
    app.add_option("--loess-span", c.loess_span, "LOESS span")->check(CLI::PositiveNumber);
    app.add_option("--loess-degree", c.loess_degree, "LOESS degree")->check(CLI::Range(1, 2));
    app.add_option("--pvalue-threshold", c.pvalue_threshold, "Original p-value category threshold")
        ->check(CLI::PositiveNumber);
    app.add_flag("--yates", c.yates, "Apply Yates continuity correction to 2x2 chi-square tests");
    app.add_flag("--per-project-weights", c.per_project_weights, "Estimate forecaster variances within each project");
    app.add_flag("--strict", c.strict, "Fail when any row is rejected");
    app.add_option("--expect-findings", c.expect_findings, "Warn when the finding count differs");
    app.add_option("--seed", c.seed, "Seed for synthetic fixtures");
    app.add_option("--liquidity", c.liquidity, "Market-maker liquidity b")->check(CLI::PositiveNumber);
    app.add_option("--endowment", c.endowment, "Tokens per trader")->check(CLI::NonNegativeNumber);

    auto* validate = app.add_subcommand("validate", "Check the input tables and list rejected rows");
    auto* replay_cmd = app.add_subcommand("replay", "Emit market price paths");
    replay_cmd->add_option("--finding", c.finding, "Finding to replay (default: all)");
    replay_cmd->add_option("--mode", c.mode, "price-taking or simulated");
    auto* aggregate = app.add_subcommand("aggregate", "Compute per-finding forecasts");
    auto* evaluate = app.add_subcommand("evaluate", "Score forecasts and run the comparison tests");
    auto* dynamics = app.add_subcommand("dynamics", "Error-reduction curves and milestones");
    auto* pvalue = app.add_subcommand("pvalue", "Replication rate by original p-value category");
    auto* report = app.add_subcommand("report", "Run everything and write all outputs");
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth->add_option("--markets", c.markets, "Number of markets")->check(CLI::PositiveNumber);
    synth->add_option("--traders", c.traders, "Number of traders")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }
    if (c.threshold <= 0.0 || c.threshold >= 1.0) {
        std::cerr << "error: Usage: --threshold must lie strictly between 0 and 1\n";
        return exit_usage;
    }

    try {
        if (validate->parsed()) return run_validate(c);
        if (replay_cmd->parsed()) return run_replay(c);
        if (aggregate->parsed()) return run_aggregate(c);
        if (evaluate->parsed()) return run_evaluate(c);
        if (dynamics->parsed()) return run_dynamics(c);
        if (pvalue->parsed()) return run_pvalue(c);
        if (report->parsed()) return run_report(c);
        if (synth->parsed()) return run_synth(c);
    } catch (UsageError const& e) {
        std::cerr << "error: Usage: " << e.what() << '\n';
        return exit_usage;
    } catch (Error const& e) {
        std::cerr << "error: " << e.what() << '\n';
        bool const data = e.code() != Errc::Io && e.code() != Errc::DomainError;
        return data ? exit_data : exit_failure;
    } catch (std::exception const& e) {
        std::cerr << "error: Internal: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_usage;
}
