#pragma once

// Published headline values for the pooled four-project dataset, used to
// report computed-vs-published deltas. Tolerances are the bands a faithful
// reproduction is expected to land in.

#include <string_view>

namespace rmkt::reference {

struct Value {
    std::string_view key;
    double published;
    double tolerance;
    std::string_view metric = {};  // computed metric compared against; defaults to key

    [[nodiscard]] constexpr std::string_view metric_key() const { return metric.empty() ? key : metric; }
};

inline constexpr Value values[] = {
    // Counts
    {"counts.findings", 103, 0},
    {"counts.trades", 7850, 0},
    {"counts.surveys", 7380, 0},
    {"Pooled.n_findings", 103, 0},
    {"Pooled.n_replicated", 51, 0},
    {"RPP.n_findings", 40, 0},
    {"RPP.n_replicated", 15, 0},
    {"EERP.n_findings", 18, 0},
    {"EERP.n_replicated", 11, 0},
    {"ML2.n_findings", 24, 0},
    {"ML2.n_replicated", 11, 0},
    {"SSRP.n_findings", 21, 0},
    {"SSRP.n_replicated", 13, 0},

    // Market final prices
    {"Pooled.market.mean", 0.627, 0.005},
    {"Pooled.market.sd", 0.21, 0.01},
    {"Pooled.market.mae", 0.384, 0.005},
    {"Pooled.market.n_correct", 76, 0},
    {"Pooled.market.n_correct_text", 75, 0, "Pooled.market.n_correct"},
    {"RPP.market.mean", 0.556, 0.005},
    {"EERP.market.mean", 0.751, 0.005},
    {"ML2.market.mean", 0.644, 0.005},
    {"SSRP.market.mean", 0.634, 0.005},
    {"RPP.market.mae", 0.431, 0.01},
    {"EERP.market.mae", 0.414, 0.01},
    {"ML2.market.mae", 0.354, 0.01},
    {"SSRP.market.mae", 0.303, 0.01},
    {"RPP.market.n_correct", 28, 0},
    {"EERP.market.n_correct", 11, 0},
    {"ML2.market.n_correct", 18, 0},
    {"SSRP.market.n_correct", 18, 0},

    // Survey means
    {"Pooled.survey_mean.mean", 0.610, 0.005},
    {"Pooled.survey_mean.sd", 0.14, 0.01},
    {"Pooled.survey_mean.mae", 0.423, 0.005},
    {"Pooled.survey_mean.n_correct", 68, 0},
    {"RPP.survey_mean.mean", 0.546, 0.005},
    {"EERP.survey_mean.mean", 0.711, 0.005},
    {"ML2.survey_mean.mean", 0.647, 0.005},
    {"SSRP.survey_mean.mean", 0.605, 0.005},
    {"RPP.survey_mean.mae", 0.485, 0.01},
    {"EERP.survey_mean.mae", 0.409, 0.01},
    {"ML2.survey_mean.mae", 0.394, 0.01},
    {"SSRP.survey_mean.mae", 0.348, 0.01},
    {"RPP.survey_mean.n_correct", 23, 0},
    {"EERP.survey_mean.n_correct", 11, 0},
    {"ML2.survey_mean.n_correct", 16, 0},
    {"SSRP.survey_mean.n_correct", 18, 0},

    // Alternative survey aggregators
    {"Pooled.survey_median.mean", 0.63, 0.01},
    {"Pooled.survey_median.sd", 0.17, 0.01},
    {"Pooled.survey_median.mae", 0.412, 0.01},
    {"Pooled.survey_voting.mean", 0.66, 0.01},
    {"Pooled.survey_voting.sd", 0.21, 0.01},
    {"Pooled.survey_voting.mae", 0.39, 0.01},
    {"Pooled.survey_var_weighted.mean", 0.58, 0.01},
    {"Pooled.survey_var_weighted.sd", 0.17, 0.01},
    {"Pooled.survey_var_weighted.mae", 0.407, 0.01},
    {"Pooled.survey_mean.mae_aggregators", 0.422, 0.01, "Pooled.survey_mean.mae"},

    // Correlations
    {"Pooled.market.pearson_outcome", 0.581, 0.01},
    {"Pooled.survey_mean.pearson_outcome", 0.564, 0.01},
    {"Pooled.spearman_market_survey", 0.837, 0.01},
    {"Pooled.pearson_market_survey", 0.853, 0.01},
    {"RPP.spearman_market_survey", 0.736, 0.02},
    {"EERP.spearman_market_survey", 0.792, 0.02},
    {"ML2.spearman_market_survey", 0.947, 0.02},
    {"SSRP.spearman_market_survey", 0.845, 0.02},
    {"RPP.market.spearman_outcome", 0.418, 0.02},
    {"EERP.market.spearman_outcome", 0.297, 0.02},
    {"ML2.market.spearman_outcome", 0.755, 0.02},
    {"SSRP.market.spearman_outcome", 0.842, 0.02},
    {"Pooled.market.spearman_outcome", 0.568, 0.02},
    {"RPP.survey_mean.spearman_outcome", 0.243, 0.02},
    {"EERP.survey_mean.spearman_outcome", 0.516, 0.02},
    {"ML2.survey_mean.spearman_outcome", 0.731, 0.02},
    {"SSRP.survey_mean.spearman_outcome", 0.760, 0.02},
    {"Pooled.survey_mean.spearman_outcome", 0.557, 0.02},

    // Tests
    {"tests.overestimation_survey.t", -2.89, 0.05},
    {"tests.overestimation_survey.p", 0.0046, 0.001},
    {"tests.overestimation_market.t", -3.43, 0.05},
    {"tests.overestimation_market.p", 0.00088, 0.0005},
    {"tests.error_difference.t", 3.68, 0.1},
    {"tests.error_difference.p", 0.0003, 0.0005},
    {"tests.extremeness.t", 7.87, 0.2},
    {"tests.accuracy_chi2.statistic", 1.12, 0.05},
    {"tests.accuracy_chi2.p", 0.29, 0.02},
    {"tests.asymmetry_market.statistic", 6.68, 0.05},
    {"tests.asymmetry_market.p", 0.01, 0.005},
    {"tests.asymmetry_survey.statistic", 4.45, 0.05},
    {"tests.asymmetry_survey.p", 0.035, 0.005},
    {"quadrants.market.predicted_fail", 31, 0},
    {"quadrants.market.predicted_fail_did", 3, 0},
    {"quadrants.market.predicted_replicate", 73, 0},
    {"quadrants.market.predicted_replicate_did_not", 25, 0},
    {"quadrants.survey_mean.predicted_fail", 22, 0},
    {"quadrants.survey_mean.predicted_fail_did", 2, 0},
    {"quadrants.survey_mean.predicted_replicate", 81, 0},
    {"quadrants.survey_mean.predicted_replicate_did_not", 33, 0},

    // p-value categories
    {"pvalue.intercept", 0.2807, 0.005},
    {"pvalue.se_intercept", 0.0595, 0.005},
    {"pvalue.slope", 0.458, 0.005},
    {"pvalue.se_slope", 0.0890, 0.005},
    {"pvalue.r_squared", 0.2079, 0.005},
    {"pvalue.n", 103, 0},
    {"pvalue.rate_at_or_below", 0.74, 0.02},
    {"pvalue.rate_above", 0.28, 0.02},
    {"pvalue.correlation", 0.456, 0.01},

    // Dynamics
    {"dynamics.trades.x_at_0.9", 69, 14},
    {"dynamics.hours.x_at_0.9", 161, 32},
    {"dynamics.hours.x_at_0.65", 1, 1},
};

}  // namespace rmkt::reference
