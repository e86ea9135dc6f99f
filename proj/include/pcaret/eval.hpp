#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcaret/metrics.hpp"
#include "pcaret/types.hpp"

namespace pcaret::eval {

// Mean absolute error between aligned vectors.
double mae(std::span<const double> pred, std::span<const double> target);

// Sample Pearson correlation; throws DataError on constant input.
double pearson(std::span<const double> x, std::span<const double> y);

// Average ranks (1-based); ties share the mean of their rank range.
std::vector<double> average_ranks(std::span<const double> x);

// Pearson correlation of average-tied rank vectors.
double spearman(std::span<const double> x, std::span<const double> y);

struct RegressionResult {
    double intercept = 0.0; // beta0
    double slope = 0.0;     // beta1
    double slope_se = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
    double r2 = 0.0;
    double f_stat = 0.0;
    std::size_t n = 0;
};

// Simple one-predictor least squares with the standard slope t-test at
// n-2 degrees of freedom. Requires n >= 3 and non-constant x.
RegressionResult ols_simple(std::span<const double> x, std::span<const double> y);

// Upper-tail probability P(T > t) of Student's t with df degrees of
// freedom, via the regularized incomplete beta continued fraction.
// Two-sided p-values are 2 * student_t_sf(|t|, df).
double student_t_sf(double t, unsigned df);

// Applies an affine calibration fitted elsewhere: beta0 + beta1 * v.
std::vector<double> calibrated_predictions(std::span<const double> metric_values,
                                           const RegressionResult& train_fit);

struct NamedColumn {
    std::string name;
    std::vector<double> values;
};

enum class CorrelationMode { raw, ranked };

struct CorrelationMatrix {
    std::vector<std::string> names;
    std::vector<double> values; // row-major square

    double at(std::size_t i, std::size_t j) const { return values[i * names.size() + j]; }
};

CorrelationMatrix correlation_matrix(const std::vector<NamedColumn>& columns,
                                     CorrelationMode mode);

struct HistogramSpec {
    std::size_t bin_count = 10;
    std::optional<std::pair<double, double>> range; // auto [min,max] when absent
};

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint64_t> counts;
};

// Equal-width bins over [lo, hi]; hi itself lands in the last bin and
// out-of-range values clamp to the edge bins so counts always sum to n.
Histogram histogram(std::span<const double> values, const HistogramSpec& spec);

// Rank-vs-rank points (average-tied), ordered by the x rank; ties keep
// input order. Emitted for external plotting.
std::vector<std::pair<double, double>> qq_ranks(std::span<const double> x,
                                                std::span<const double> y);

// One evaluated metric column: values on the train and test split,
// row-aligned with the respective score vectors.
struct MetricColumn {
    metrics::MetricKind kind;
    Space space;
    std::vector<double> train_values;
    std::vector<double> test_values;
};

struct ReportRow {
    metrics::MetricKind kind;
    Space space;
    double mae_raw = 0.0;        // mean |score - raw metric value|
    double mae_calibrated = 0.0; // after train-fitted affine calibration
    double pearson = 0.0;
    double spearman = 0.0;
    std::size_t n = 0;
};

struct EvalReport {
    std::vector<ReportRow> rows;
};

// Test-split accuracy per metric; calibration is fitted on the train
// split only.
EvalReport build_report(std::span<const double> train_scores,
                        std::span<const double> test_scores,
                        const std::vector<MetricColumn>& columns);

struct RegressionRow {
    metrics::MetricKind kind;
    Space space;
    RegressionResult fit;
};

enum class RegressionSplit { test, train, all };

std::vector<RegressionRow> build_regressions(std::span<const double> train_scores,
                                             std::span<const double> test_scores,
                                             const std::vector<MetricColumn>& columns,
                                             RegressionSplit split);

// CSV and fixed-width table renderings, in the canonical metric order
// (similarities before norms, full space before PCA).
std::string report_csv(const EvalReport& report);
std::string report_table(const EvalReport& report);
std::string regression_csv(const std::vector<RegressionRow>& rows);
std::string regression_table(const std::vector<RegressionRow>& rows);
std::string correlation_csv(const CorrelationMatrix& matrix);
std::string histogram_csv(const Histogram& hist);
std::string qq_csv(const std::vector<std::pair<double, double>>& points);

} // namespace pcaret::eval
