#pragma once

// Three-table data model (outcomes, surveys, trades), CSV ingestion with
// configurable column mapping, validation with row provenance, and
// canonical-form writing.

#include <rmkt/csv.hpp>
#include <rmkt/error.hpp>
#include <rmkt/timestamp.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace rmkt {

enum class Project { RPP, EERP, ML2, SSRP };

inline constexpr Project all_projects[] = {Project::RPP, Project::EERP, Project::ML2, Project::SSRP};

constexpr std::string_view to_string(Project p) noexcept {
    switch (p) {
    case Project::RPP: return "RPP";
    case Project::EERP: return "EERP";
    case Project::ML2: return "ML2";
    case Project::SSRP: return "SSRP";
    }
    return "?";
}

/// Strength of evidence of the original finding, split at the p-value threshold.
enum class PValueCategory { AboveThreshold, AtOrBelowThreshold };

constexpr std::string_view to_string(PValueCategory c) noexcept {
    return c == PValueCategory::AboveThreshold ? "AboveThreshold" : "AtOrBelowThreshold";
}

inline constexpr double default_pvalue_threshold = 0.005;

constexpr PValueCategory categorize_pvalue(double p, double threshold = default_pvalue_threshold) noexcept {
    return p <= threshold ? PValueCategory::AtOrBelowThreshold : PValueCategory::AboveThreshold;
}

enum class Side { Yes, No };

constexpr std::string_view to_string(Side s) noexcept { return s == Side::Yes ? "YES" : "NO"; }

struct Finding {
    std::string id;
    Project project = Project::RPP;
    int outcome = 0;
    PValueCategory p_category = PValueCategory::AboveThreshold;
    std::optional<double> original_p;
    Timestamp market_open;
    Timestamp market_close;
    std::size_t row = 0;  // 1-based data row in the source file, 0 if synthesized

    friend bool operator==(Finding const&, Finding const&) = default;
};

struct SurveyResponse {
    std::string finding_id;
    std::string forecaster_id;
    double belief = 0.0;
    std::size_t row = 0;

    friend bool operator==(SurveyResponse const&, SurveyResponse const&) = default;
};

/// One market transaction. `quantity` is signed: negative sells contracts of
/// `side` back to the market maker. Side and quantity may be absent when the
/// source only records prices.
struct Trade {
    std::string finding_id;
    std::string trader_id;
    Timestamp timestamp;
    std::optional<Side> side;
    std::optional<double> quantity;
    double post_trade_price = 0.5;
    std::size_t row = 0;  // also the load sequence number used to break timestamp ties

    friend bool operator==(Trade const&, Trade const&) = default;
};

// ---------------------------------------------------------------------------
// Column mapping

enum class TableKind { Outcomes, Surveys, Trades };

constexpr std::string_view to_string(TableKind t) noexcept {
    switch (t) {
    case TableKind::Outcomes: return "outcomes";
    case TableKind::Surveys: return "surveys";
    case TableKind::Trades: return "trades";
    }
    return "?";
}

struct CanonicalColumn {
    TableKind table;
    std::string_view field;
    bool required;
};

inline constexpr CanonicalColumn canonical_columns[] = {
    {TableKind::Outcomes, "finding_id", true},
    {TableKind::Outcomes, "project", true},
    {TableKind::Outcomes, "outcome", true},
    {TableKind::Outcomes, "p_value_category", true},
    {TableKind::Outcomes, "original_p_value", false},
    {TableKind::Outcomes, "market_open", true},
    {TableKind::Outcomes, "market_close", true},
    {TableKind::Surveys, "finding_id", true},
    {TableKind::Surveys, "forecaster_id", true},
    {TableKind::Surveys, "belief", true},
    {TableKind::Trades, "finding_id", true},
    {TableKind::Trades, "trader_id", true},
    {TableKind::Trades, "timestamp", true},
    {TableKind::Trades, "side", false},
    {TableKind::Trades, "quantity", false},
    {TableKind::Trades, "post_trade_price", true},
};

/// Maps canonical fields (`<table>.<field>`) onto source column headers.
/// Unmapped fields use their canonical name.
struct ColumnMapping {
    char delimiter = ',';
    std::map<std::string, std::string, std::less<>> columns;

    [[nodiscard]] std::string source(TableKind table, std::string_view field) const {
        std::string key = std::string(to_string(table)) + "." + std::string(field);
        if (auto it = columns.find(key); it != columns.end()) return it->second;
        return std::string(field);
    }
    [[nodiscard]] bool explicitly_mapped(TableKind table, std::string_view field) const {
        return columns.contains(std::string(to_string(table)) + "." + std::string(field));
    }

    friend bool operator==(ColumnMapping const&, ColumnMapping const&) = default;
};

/// Parses `key = value` lines; `#` starts a comment. Recognized keys are
/// `delimiter` (a single character or `tab`) and `<table>.<field>`.
inline ColumnMapping parse_mapping(std::string_view text) {
    ColumnMapping mapping;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto const trimmed = csv::detail::trim(line);
        if (trimmed.empty()) continue;
        auto const eq = trimmed.find('=');
        if (eq == std::string_view::npos)
            fail(Errc::ParseError, "mapping line " + std::to_string(line_no) + ": expected key = value");
        std::string const key(csv::detail::trim(trimmed.substr(0, eq)));
        std::string const value(csv::detail::trim(trimmed.substr(eq + 1)));
        if (key == "delimiter") {
            if (value == "tab" || value == "\\t")
                mapping.delimiter = '\t';
            else if (value.size() == 1)
                mapping.delimiter = value[0];
            else
                fail(Errc::InvalidValue, "mapping line " + std::to_string(line_no) + ": delimiter must be one character");
            continue;
        }
        bool known = false;
        for (auto const& col : canonical_columns)
            if (key == std::string(to_string(col.table)) + "." + std::string(col.field)) known = true;
        if (!known) fail(Errc::InvalidValue, "mapping line " + std::to_string(line_no) + ": unknown field '" + key + "'");
        if (value.empty()) fail(Errc::InvalidValue, "mapping line " + std::to_string(line_no) + ": empty column name");
        mapping.columns[key] = value;
    }
    return mapping;
}

inline ColumnMapping read_mapping(std::string const& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::Io, "cannot open mapping '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_mapping(buf.str());
}

// ---------------------------------------------------------------------------
// Dataset

class Dataset {
public:
    Dataset() = default;

    Dataset(std::vector<Finding> findings, std::vector<SurveyResponse> surveys, std::vector<Trade> trades,
            ColumnMapping mapping = {})
        : findings_(std::move(findings)),
          surveys_(std::move(surveys)),
          trades_(std::move(trades)),
          mapping_(std::move(mapping)) {
        build_index();
    }

    [[nodiscard]] std::span<Finding const> findings() const noexcept { return findings_; }
    [[nodiscard]] std::span<SurveyResponse const> surveys() const noexcept { return surveys_; }
    [[nodiscard]] std::span<Trade const> trades() const noexcept { return trades_; }
    [[nodiscard]] ColumnMapping const& mapping() const noexcept { return mapping_; }

    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view finding_id) const {
        if (auto it = index_.find(finding_id); it != index_.end()) return it->second;
        return std::nullopt;
    }

    [[nodiscard]] Finding const& finding(std::string_view finding_id) const {
        return findings_[checked_index(finding_id)];
    }

    /// Indices into trades(), ordered by (timestamp, load sequence).
    [[nodiscard]] std::span<std::size_t const> trade_indices(std::string_view finding_id) const {
        return trades_by_finding_[checked_index(finding_id)];
    }

    [[nodiscard]] std::span<std::size_t const> survey_indices(std::string_view finding_id) const {
        return surveys_by_finding_[checked_index(finding_id)];
    }

    friend bool operator==(Dataset const& a, Dataset const& b) {
        return a.findings_ == b.findings_ && a.surveys_ == b.surveys_ && a.trades_ == b.trades_;
    }

private:
    std::size_t checked_index(std::string_view finding_id) const {
        auto idx = index_of(finding_id);
        if (!idx) fail(Errc::UnknownFinding, "no finding with id '" + std::string(finding_id) + "'");
        return *idx;
    }

    void build_index() {
        for (std::size_t i = 0; i < findings_.size(); ++i) index_.emplace(findings_[i].id, i);
        trades_by_finding_.assign(findings_.size(), {});
        surveys_by_finding_.assign(findings_.size(), {});
        for (std::size_t i = 0; i < trades_.size(); ++i)
            if (auto f = index_of(trades_[i].finding_id)) trades_by_finding_[*f].push_back(i);
        for (std::size_t i = 0; i < surveys_.size(); ++i)
            if (auto f = index_of(surveys_[i].finding_id)) surveys_by_finding_[*f].push_back(i);
        for (auto& idx : trades_by_finding_)
            std::stable_sort(idx.begin(), idx.end(), [this](std::size_t a, std::size_t b) {
                auto const& ta = trades_[a];
                auto const& tb = trades_[b];
                if (ta.timestamp != tb.timestamp) return ta.timestamp < tb.timestamp;
                return ta.row < tb.row;
            });
    }

    std::vector<Finding> findings_;
    std::vector<SurveyResponse> surveys_;
    std::vector<Trade> trades_;
    ColumnMapping mapping_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::vector<std::vector<std::size_t>> trades_by_finding_;
    std::vector<std::vector<std::size_t>> surveys_by_finding_;
};

/// Trades of one market in chronological order; timestamp ties keep load order.
inline std::vector<Trade> trades_for(Dataset const& ds, std::string_view finding_id) {
    std::vector<Trade> out;
    for (auto i : ds.trade_indices(finding_id)) out.push_back(ds.trades()[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Validation

enum class Severity { Error, Warning };

struct Violation {
    Severity severity = Severity::Error;
    Errc code = Errc::InvalidValue;
    TableKind table = TableKind::Outcomes;
    std::size_t row = 0;  // 1-based data row; 0 when the issue is dataset-wide
    std::string column;
    std::string message;

    friend bool operator==(Violation const&, Violation const&) = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    [[nodiscard]] std::size_t error_count() const {
        return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                      [](auto const& v) { return v.severity == Severity::Error; }));
    }
    [[nodiscard]] std::size_t warning_count() const { return violations.size() - error_count(); }
    [[nodiscard]] bool ok() const { return error_count() == 0; }

    friend bool operator==(ValidationReport const&, ValidationReport const&) = default;
};

inline std::string describe(Violation const& v) {
    std::string s = v.severity == Severity::Error ? "error" : "warning";
    s += " [" + std::string(to_string(v.code)) + "] " + std::string(to_string(v.table));
    if (v.row) s += " row " + std::to_string(v.row);
    if (!v.column.empty()) s += " column '" + v.column + "'";
    return s + ": " + v.message;
}

struct ValidateOptions {
    double pvalue_threshold = default_pvalue_threshold;
    /// When set, a differing number of findings is reported as a warning.
    std::optional<std::size_t> expected_findings;
};

namespace detail {

template <class Record>
std::size_t provenance(Record const& r, std::size_t index) {
    return r.row ? r.row : index + 1;
}

inline Violation error(Errc code, TableKind table, std::size_t row, std::string column, std::string message) {
    return {Severity::Error, code, table, row, std::move(column), std::move(message)};
}

inline Violation warning(Errc code, TableKind table, std::size_t row, std::string column, std::string message) {
    return {Severity::Warning, code, table, row, std::move(column), std::move(message)};
}

using FindingLookup = std::map<std::string, Finding const*, std::less<>>;

/// Appends violations for every finding; marks rejected rows in `bad`.
inline void check_findings(std::span<Finding const> findings, double threshold, std::vector<Violation>& out,
                           std::vector<bool>& bad) {
    bad.assign(findings.size(), false);
    std::set<std::string, std::less<>> seen;
    for (std::size_t i = 0; i < findings.size(); ++i) {
        auto const& f = findings[i];
        auto const row = provenance(f, i);
        auto reject = [&](Errc code, std::string col, std::string msg) {
            out.push_back(error(code, TableKind::Outcomes, row, std::move(col), std::move(msg)));
            bad[i] = true;
        };
        if (f.id.empty()) reject(Errc::InvalidValue, "finding_id", "empty finding id");
        if (!seen.insert(f.id).second) reject(Errc::InvalidValue, "finding_id", "duplicate finding id '" + f.id + "'");
        if (f.outcome != 0 && f.outcome != 1)
            reject(Errc::InvalidValue, "outcome", "outcome must be 0 or 1, got " + std::to_string(f.outcome));
        if (!(f.market_open < f.market_close))
            reject(Errc::InvalidValue, "market_close", "market_open must precede market_close");
        if (f.original_p) {
            double const p = *f.original_p;
            if (!(p >= 0.0) || !std::isfinite(p))
                reject(Errc::InvalidValue, "original_p_value", "p-value must be a nonnegative number");
            else if (categorize_pvalue(p, threshold) != f.p_category)
                reject(Errc::InvalidValue, "p_value_category",
                       "category " + std::string(to_string(f.p_category)) + " inconsistent with p = " +
                           csv::format_double(p));
        }
    }
}

inline FindingLookup lookup_of(std::span<Finding const> findings, std::vector<bool> const& bad) {
    FindingLookup lookup;
    for (std::size_t i = 0; i < findings.size(); ++i)
        if (!bad[i]) lookup.emplace(findings[i].id, &findings[i]);
    return lookup;
}

inline void check_surveys(std::span<SurveyResponse const> surveys, FindingLookup const& lookup,
                          std::vector<Violation>& out, std::vector<bool>& bad) {
    bad.assign(surveys.size(), false);
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t i = 0; i < surveys.size(); ++i) {
        auto const& s = surveys[i];
        auto const row = provenance(s, i);
        auto reject = [&](Errc code, std::string col, std::string msg) {
            out.push_back(error(code, TableKind::Surveys, row, std::move(col), std::move(msg)));
            bad[i] = true;
        };
        if (!(s.belief >= 0.0 && s.belief <= 1.0))
            reject(Errc::InvalidValue, "belief", "belief " + csv::format_double(s.belief) + " outside [0,1]");
        if (!lookup.contains(s.finding_id))
            reject(Errc::DanglingReference, "finding_id", "unknown finding '" + s.finding_id + "'");
        if (!seen.emplace(s.finding_id, s.forecaster_id).second)
            reject(Errc::InvalidValue, "forecaster_id",
                   "duplicate response of '" + s.forecaster_id + "' for '" + s.finding_id + "'");
    }
}

inline void check_trades(std::span<Trade const> trades, FindingLookup const& lookup, std::vector<Violation>& out,
                         std::vector<bool>& bad) {
    bad.assign(trades.size(), false);
    for (std::size_t i = 0; i < trades.size(); ++i) {
        auto const& t = trades[i];
        auto const row = provenance(t, i);
        auto reject = [&](Errc code, std::string col, std::string msg) {
            out.push_back(error(code, TableKind::Trades, row, std::move(col), std::move(msg)));
            bad[i] = true;
        };
        if (!(t.post_trade_price > 0.0 && t.post_trade_price < 1.0))
            reject(Errc::InvalidValue, "post_trade_price",
                   "price " + csv::format_double(t.post_trade_price) + " outside (0,1)");
        if (t.quantity && (!std::isfinite(*t.quantity) || *t.quantity == 0.0))
            reject(Errc::InvalidValue, "quantity", "quantity must be finite and nonzero");
        auto it = lookup.find(t.finding_id);
        if (it == lookup.end()) {
            reject(Errc::DanglingReference, "finding_id", "unknown finding '" + t.finding_id + "'");
            continue;
        }
        auto const& f = *it->second;
        if (t.timestamp < f.market_open || t.timestamp > f.market_close)
            reject(Errc::InvalidValue, "timestamp",
                   "trade at " + format_timestamp(t.timestamp) + " outside market window [" +
                       format_timestamp(f.market_open) + ", " + format_timestamp(f.market_close) + "]");
    }
}

inline void check_warnings(std::span<Finding const> findings, std::span<SurveyResponse const> surveys,
                           std::span<Trade const> trades, ValidateOptions const& opts, std::vector<Violation>& out) {
    std::set<std::string, std::less<>> traders;
    std::map<std::string, std::size_t, std::less<>> trade_count;
    std::map<std::string, std::size_t, std::less<>> survey_count;
    for (auto const& t : trades) {
        traders.insert(t.trader_id);
        ++trade_count[t.finding_id];
    }
    for (auto const& s : surveys) ++survey_count[s.finding_id];

    std::set<std::string, std::less<>> reported;
    for (std::size_t i = 0; i < surveys.size(); ++i) {
        auto const& s = surveys[i];
        if (!traders.contains(s.forecaster_id) && reported.insert(s.forecaster_id).second)
            out.push_back(warning(Errc::DanglingReference, TableKind::Surveys, provenance(s, i), "forecaster_id",
                                  "forecaster '" + s.forecaster_id + "' answered the survey but never traded"));
    }
    for (std::size_t i = 0; i < findings.size(); ++i) {
        auto const& f = findings[i];
        if (!trade_count.contains(f.id))
            out.push_back(warning(Errc::EmptyMarket, TableKind::Outcomes, provenance(f, i), "finding_id",
                                  "finding '" + f.id + "' has no trades"));
        if (!survey_count.contains(f.id))
            out.push_back(warning(Errc::NoSurveyResponses, TableKind::Outcomes, provenance(f, i), "finding_id",
                                  "finding '" + f.id + "' has no survey responses"));
    }
    if (opts.expected_findings && findings.size() != *opts.expected_findings)
        out.push_back(warning(Errc::InvalidValue, TableKind::Outcomes, 0, "",
                              "expected " + std::to_string(*opts.expected_findings) + " findings, found " +
                                  std::to_string(findings.size())));
}

}  // namespace detail

/// Lists every invariant violation with row provenance. Pure.
inline ValidationReport validate(Dataset const& ds, ValidateOptions const& opts = {}) {
    ValidationReport report;
    std::vector<bool> bad_findings, bad_rows;
    detail::check_findings(ds.findings(), opts.pvalue_threshold, report.violations, bad_findings);
    auto const lookup = detail::lookup_of(ds.findings(), bad_findings);
    detail::check_surveys(ds.surveys(), lookup, report.violations, bad_rows);
    detail::check_trades(ds.trades(), lookup, report.violations, bad_rows);
    detail::check_warnings(ds.findings(), ds.surveys(), ds.trades(), opts, report.violations);
    return report;
}

// ---------------------------------------------------------------------------
// Loading

struct DatasetPaths {
    std::string outcomes;
    std::string surveys;
    std::string trades;

    static DatasetPaths in_directory(std::string const& dir) {
        std::string base = dir;
        if (!base.empty() && base.back() != '/') base.push_back('/');
        return {base + "outcomes.csv", base + "surveys.csv", base + "trades.csv"};
    }
};

struct LoadOptions {
    double pvalue_threshold = default_pvalue_threshold;
    std::optional<std::size_t> expected_findings;
};

struct LoadResult {
    Dataset dataset;
    ValidationReport report;  // rows listed as errors were excluded from `dataset`
    std::size_t rows_read[3] = {0, 0, 0};  // outcomes, surveys, trades
};

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::optional<Project> parse_project(std::string_view s) {
    auto const l = lower(csv::detail::trim(s));
    if (l == "rpp") return Project::RPP;
    if (l == "eerp") return Project::EERP;
    if (l == "ml2") return Project::ML2;
    if (l == "ssrp") return Project::SSRP;
    return std::nullopt;
}

inline std::optional<int> parse_outcome(std::string_view s) {
    auto const l = lower(csv::detail::trim(s));
    if (l == "1" || l == "true" || l == "yes" || l == "1.0") return 1;
    if (l == "0" || l == "false" || l == "no" || l == "0.0") return 0;
    return std::nullopt;
}

inline std::optional<PValueCategory> parse_pcategory(std::string_view s) {
    auto const l = lower(csv::detail::trim(s));
    if (l == "abovethreshold" || l == "above" || l == "suggestive" || l == "p>0.005" || l == "0")
        return PValueCategory::AboveThreshold;
    if (l == "atorbelowthreshold" || l == "at_or_below" || l == "significant" || l == "p<=0.005" || l == "1")
        return PValueCategory::AtOrBelowThreshold;
    return std::nullopt;
}

inline std::optional<Side> parse_side(std::string_view s) {
    auto const l = lower(csv::detail::trim(s));
    if (l == "yes" || l == "y") return Side::Yes;
    if (l == "no" || l == "n") return Side::No;
    return std::nullopt;
}

/// Resolves mapped column positions for one table; optional columns absent
/// from the file resolve to nullopt unless the mapping names them explicitly.
class Columns {
public:
    Columns(csv::Table const& table, ColumnMapping const& mapping, TableKind kind) {
        for (auto const& col : canonical_columns) {
            if (col.table != kind) continue;
            auto const name = mapping.source(kind, col.field);
            auto const pos = table.column(name);
            if (!pos && (col.required || mapping.explicitly_mapped(kind, col.field)))
                fail(Errc::MissingColumn, std::string(to_string(kind)) + " file lacks column '" + name +
                                              "' (canonical field '" + std::string(col.field) + "')");
            positions_.emplace(std::string(col.field), pos);
        }
    }
    [[nodiscard]] std::optional<std::size_t> operator[](std::string_view field) const {
        return positions_.find(field)->second;
    }

private:
    std::map<std::string, std::optional<std::size_t>, std::less<>> positions_;
};

/// Reads cells of one data row, recording the first conversion failure.
class RowReader {
public:
    RowReader(std::vector<std::string> const& cells, Columns const& cols, TableKind kind, std::size_t row,
              std::vector<Violation>& out)
        : cells_(cells), cols_(cols), kind_(kind), row_(row), out_(out) {}

    [[nodiscard]] bool ok() const { return ok_; }

    std::string_view raw(std::string_view field) const {
        auto pos = cols_[field];
        if (!pos || *pos >= cells_.size()) return {};
        return cells_[*pos];
    }

    template <class T, class Parser>
    std::optional<T> get(std::string_view field, Parser parse, bool optional_field = false) {
        auto const text = raw(field);
        if (text.empty()) {
            if (!optional_field) reject(field, "missing value");
            return std::nullopt;
        }
        auto v = parse(text);
        if (!v) reject(field, "cannot parse '" + std::string(text) + "'");
        return v;
    }

    void reject(std::string_view field, std::string message) {
        out_.push_back(error(Errc::InvalidValue, kind_, row_, std::string(field), std::move(message)));
        ok_ = false;
    }

private:
    std::vector<std::string> const& cells_;
    Columns const& cols_;
    TableKind kind_;
    std::size_t row_;
    std::vector<Violation>& out_;
    bool ok_ = true;
};

inline std::optional<double> parse_number(std::string_view s) { return csv::parse_double(s); }

inline std::vector<Finding> parse_findings(csv::Table const& table, ColumnMapping const& mapping,
                                           std::vector<Violation>& out) {
    Columns const cols(table, mapping, TableKind::Outcomes);
    std::vector<Finding> findings;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        RowReader r(table.rows[i], cols, TableKind::Outcomes, i + 1, out);
        Finding f;
        f.row = i + 1;
        f.id = std::string(csv::detail::trim(r.raw("finding_id")));
        if (f.id.empty()) r.reject("finding_id", "missing value");
        auto project = r.get<Project>("project", parse_project);
        auto outcome = r.get<int>("outcome", parse_outcome);
        auto cat = r.get<PValueCategory>("p_value_category", parse_pcategory);
        f.original_p = r.get<double>("original_p_value", parse_number, true);
        auto open = r.get<Timestamp>("market_open", parse_timestamp);
        auto close = r.get<Timestamp>("market_close", parse_timestamp);
        if (!r.ok()) continue;
        f.project = *project;
        f.outcome = *outcome;
        f.p_category = *cat;
        f.market_open = *open;
        f.market_close = *close;
        findings.push_back(std::move(f));
    }
    return findings;
}

inline std::vector<SurveyResponse> parse_surveys(csv::Table const& table, ColumnMapping const& mapping,
                                                 std::vector<Violation>& out) {
    Columns const cols(table, mapping, TableKind::Surveys);
    std::vector<SurveyResponse> surveys;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        RowReader r(table.rows[i], cols, TableKind::Surveys, i + 1, out);
        SurveyResponse s;
        s.row = i + 1;
        s.finding_id = std::string(csv::detail::trim(r.raw("finding_id")));
        s.forecaster_id = std::string(csv::detail::trim(r.raw("forecaster_id")));
        if (s.finding_id.empty()) r.reject("finding_id", "missing value");
        if (s.forecaster_id.empty()) r.reject("forecaster_id", "missing value");
        auto belief = r.get<double>("belief", parse_number);
        if (!r.ok()) continue;
        s.belief = *belief;
        surveys.push_back(std::move(s));
    }
    return surveys;
}

inline std::vector<Trade> parse_trades(csv::Table const& table, ColumnMapping const& mapping,
                                       std::vector<Violation>& out) {
    Columns const cols(table, mapping, TableKind::Trades);
    std::vector<Trade> trades;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        RowReader r(table.rows[i], cols, TableKind::Trades, i + 1, out);
        Trade t;
        t.row = i + 1;
        t.finding_id = std::string(csv::detail::trim(r.raw("finding_id")));
        t.trader_id = std::string(csv::detail::trim(r.raw("trader_id")));
        if (t.finding_id.empty()) r.reject("finding_id", "missing value");
        if (t.trader_id.empty()) r.reject("trader_id", "missing value");
        auto ts = r.get<Timestamp>("timestamp", parse_timestamp);
        t.side = r.get<Side>("side", parse_side, true);
        t.quantity = r.get<double>("quantity", parse_number, true);
        auto price = r.get<double>("post_trade_price", parse_number);
        if (!r.ok()) continue;
        t.timestamp = *ts;
        t.post_trade_price = *price;
        trades.push_back(std::move(t));
    }
    return trades;
}

template <class T>
std::vector<T> keep(std::vector<T>&& rows, std::vector<bool> const& bad) {
    std::vector<T> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (!bad[i]) out.push_back(std::move(rows[i]));
    return out;
}

}  // namespace detail

/// Loads the three tables from text. Structural problems (missing header or
/// mapped column) throw; row-level problems are reported and the offending
/// rows excluded. Excluding a finding also excludes rows referencing it.
inline LoadResult parse_dataset(std::string_view outcomes_text, std::string_view surveys_text,
                                std::string_view trades_text, ColumnMapping const& mapping,
                                LoadOptions const& opts = {}) {
    auto const outcomes_table = csv::parse(outcomes_text, mapping.delimiter);
    auto const surveys_table = csv::parse(surveys_text, mapping.delimiter);
    auto const trades_table = csv::parse(trades_text, mapping.delimiter);

    LoadResult result;
    result.rows_read[0] = outcomes_table.rows.size();
    result.rows_read[1] = surveys_table.rows.size();
    result.rows_read[2] = trades_table.rows.size();
    auto& v = result.report.violations;

    auto findings = detail::parse_findings(outcomes_table, mapping, v);
    auto surveys = detail::parse_surveys(surveys_table, mapping, v);
    auto trades = detail::parse_trades(trades_table, mapping, v);

    std::vector<bool> bad;
    detail::check_findings(findings, opts.pvalue_threshold, v, bad);
    findings = detail::keep(std::move(findings), bad);
    std::vector<bool> all_good(findings.size(), false);
    auto const lookup = detail::lookup_of(findings, all_good);
    detail::check_surveys(surveys, lookup, v, bad);
    surveys = detail::keep(std::move(surveys), bad);
    detail::check_trades(trades, lookup, v, bad);
    trades = detail::keep(std::move(trades), bad);

    detail::check_warnings(findings, surveys, trades, {opts.pvalue_threshold, opts.expected_findings}, v);

    // Report in file order: outcomes, surveys, trades, then dataset-wide notes.
    std::stable_sort(v.begin(), v.end(), [](Violation const& a, Violation const& b) {
        if (a.severity != b.severity) return a.severity == Severity::Error;
        if (a.table != b.table) return a.table < b.table;
        return a.row < b.row;
    });
    result.dataset = Dataset(std::move(findings), std::move(surveys), std::move(trades), mapping);
    return result;
}

inline LoadResult load_dataset(DatasetPaths const& paths, ColumnMapping const& mapping, LoadOptions const& opts = {}) {
    auto slurp = [](std::string const& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) fail(Errc::Io, "cannot open '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    return parse_dataset(slurp(paths.outcomes), slurp(paths.surveys), slurp(paths.trades), mapping, opts);
}

// ---------------------------------------------------------------------------
// Canonical writing

inline void write_outcomes(std::ostream& out, std::span<Finding const> findings) {
    csv::write_row(out, {"finding_id", "project", "outcome", "p_value_category", "original_p_value", "market_open",
                         "market_close"});
    for (auto const& f : findings)
        csv::write_row(out, {f.id, std::string(to_string(f.project)), std::to_string(f.outcome),
                             std::string(to_string(f.p_category)),
                             f.original_p ? csv::format_double(*f.original_p) : std::string{},
                             format_timestamp(f.market_open), format_timestamp(f.market_close)});
}

inline void write_surveys(std::ostream& out, std::span<SurveyResponse const> surveys) {
    csv::write_row(out, {"finding_id", "forecaster_id", "belief"});
    for (auto const& s : surveys) csv::write_row(out, {s.finding_id, s.forecaster_id, csv::format_double(s.belief)});
}

inline void write_trades(std::ostream& out, std::span<Trade const> trades) {
    csv::write_row(out, {"finding_id", "trader_id", "timestamp", "side", "quantity", "post_trade_price"});
    for (auto const& t : trades)
        csv::write_row(out, {t.finding_id, t.trader_id, format_timestamp(t.timestamp),
                             t.side ? std::string(to_string(*t.side)) : std::string{},
                             t.quantity ? csv::format_double(*t.quantity) : std::string{},
                             csv::format_double(t.post_trade_price)});
}

inline void write_dataset(Dataset const& ds, DatasetPaths const& paths) {
    auto open = [](std::string const& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) fail(Errc::Io, "cannot write '" + path + "'");
        return out;
    };
    auto o = open(paths.outcomes);
    write_outcomes(o, ds.findings());
    auto s = open(paths.surveys);
    write_surveys(s, ds.surveys());
    auto t = open(paths.trades);
    write_trades(t, ds.trades());
}

}  // namespace rmkt
