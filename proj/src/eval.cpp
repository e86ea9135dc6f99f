#include "pcaret/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "pcaret/errors.hpp"

namespace pcaret::eval {

namespace {

void check_lengths(std::span<const double> x, std::span<const double> y, const char* op) {
    if (x.size() != y.size()) {
        throw DataError(std::string(op) + ": length mismatch, " + std::to_string(x.size()) +
                        " vs " + std::to_string(y.size()));
    }
}

double mean_of(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

// Continued-fraction core of the regularized incomplete beta function
// (Lentz's method).
double betacf(double a, double b, double x) {
    constexpr double kTiny = 1e-30;
    constexpr double kEps = 1e-14;
    constexpr int kMaxIter = 500;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw Error("betacf: continued fraction did not converge");
}

// Regularized incomplete beta I_x(a, b).
double betai(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * betacf(a, b, x) / a;
    }
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

} // namespace

double mae(std::span<const double> pred, std::span<const double> target) {
    check_lengths(pred, target, "mae");
    if (pred.empty()) {
        throw DataError("mae: empty input");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) sum += std::fabs(pred[i] - target[i]);
    return sum / static_cast<double>(pred.size());
}

double pearson(std::span<const double> x, std::span<const double> y) {
    check_lengths(x, y, "pearson");
    const std::size_t n = x.size();
    if (n < 2) {
        throw DataError("pearson: need at least 2 samples");
    }
    double mx = mean_of(x);
    double my = mean_of(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DataError("pearson: undefined for a constant input");
    }
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        // Positions i..j (0-based) share the average of ranks i+1..j+1.
        double avg = static_cast<double>(i + j + 2) / 2.0;
        for (std::size_t p = i; p <= j; ++p) ranks[order[p]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    check_lengths(x, y, "spearman");
    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    return pearson(rx, ry);
}

RegressionResult ols_simple(std::span<const double> x, std::span<const double> y) {
    check_lengths(x, y, "ols_simple");
    const std::size_t n = x.size();
    if (n < 3) {
        throw DataError("ols_simple: need at least 3 samples, got " + std::to_string(n));
    }
    double mx = mean_of(x);
    double my = mean_of(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) {
        throw DataError("ols_simple: constant predictor");
    }

    RegressionResult r;
    r.n = n;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;

    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double resid = y[i] - (r.intercept + r.slope * x[i]);
        sse += resid * resid;
    }
    r.r2 = syy > 0.0 ? 1.0 - sse / syy : 0.0;
    r.slope_se = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
    if (r.slope_se > 0.0) {
        r.t_stat = r.slope / r.slope_se;
    } else {
        // Perfect fit: the slope is either exactly zero or infinitely
        // significant.
        r.t_stat = r.slope == 0.0 ? 0.0
                                  : std::copysign(std::numeric_limits<double>::infinity(),
                                                  r.slope);
    }
    r.p_value = 2.0 * student_t_sf(std::fabs(r.t_stat), static_cast<unsigned>(n - 2));
    r.f_stat = r.t_stat * r.t_stat;
    return r;
}

double student_t_sf(double t, unsigned df) {
    if (df < 1) {
        throw DataError("student_t_sf: df must be >= 1");
    }
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return t > 0.0 ? 0.0 : 1.0;
    double nu = static_cast<double>(df);
    double x = nu / (nu + t * t);
    double tail = 0.5 * betai(nu / 2.0, 0.5, x);
    return t >= 0.0 ? tail : 1.0 - tail;
}

std::vector<double> calibrated_predictions(std::span<const double> metric_values,
                                           const RegressionResult& train_fit) {
    std::vector<double> out;
    out.reserve(metric_values.size());
    for (double v : metric_values) out.push_back(train_fit.intercept + train_fit.slope * v);
    return out;
}

CorrelationMatrix correlation_matrix(const std::vector<NamedColumn>& columns,
                                     CorrelationMode mode) {
    if (columns.empty()) {
        throw DataError("correlation_matrix: no columns");
    }
    const std::size_t m = columns.size();
    const std::size_t n = columns.front().values.size();
    for (const auto& col : columns) {
        if (col.values.size() != n) {
            throw DataError("correlation_matrix: column '" + col.name +
                            "' length mismatch");
        }
    }
    CorrelationMatrix out;
    out.names.reserve(m);
    for (const auto& col : columns) out.names.push_back(col.name);
    out.values.assign(m * m, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            double r = mode == CorrelationMode::raw
                           ? pearson(columns[i].values, columns[j].values)
                           : spearman(columns[i].values, columns[j].values);
            out.values[i * m + j] = r;
            out.values[j * m + i] = r;
        }
    }
    return out;
}

Histogram histogram(std::span<const double> values, const HistogramSpec& spec) {
    if (values.empty()) {
        throw DataError("histogram: empty input");
    }
    if (spec.bin_count < 1) {
        throw DataError("histogram: bin_count must be >= 1");
    }
    double lo, hi;
    if (spec.range) {
        lo = spec.range->first;
        hi = spec.range->second;
        if (!(lo < hi)) {
            throw DataError("histogram: empty range [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
        }
    } else {
        lo = *std::min_element(values.begin(), values.end());
        hi = *std::max_element(values.begin(), values.end());
        if (lo == hi) hi = lo + 1.0; // all values identical
    }
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(spec.bin_count, 0);
    const double width = (hi - lo) / static_cast<double>(spec.bin_count);
    const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(spec.bin_count) - 1;
    for (double v : values) {
        std::ptrdiff_t bin = static_cast<std::ptrdiff_t>(std::floor((v - lo) / width));
        bin = std::clamp<std::ptrdiff_t>(bin, 0, last);
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    return h;
}

std::vector<std::pair<double, double>> qq_ranks(std::span<const double> x,
                                                std::span<const double> y) {
    check_lengths(x, y, "qq_ranks");
    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rx[a] < rx[b]; });
    std::vector<std::pair<double, double>> points;
    points.reserve(x.size());
    for (std::size_t i : order) points.emplace_back(rx[i], ry[i]);
    return points;
}

EvalReport build_report(std::span<const double> train_scores,
                        std::span<const double> test_scores,
                        const std::vector<MetricColumn>& columns) {
    EvalReport report;
    for (const auto& col : columns) {
        if (col.train_values.size() != train_scores.size() ||
            col.test_values.size() != test_scores.size()) {
            throw DataError("build_report: metric column misaligned with score vectors");
        }
        ReportRow row;
        row.kind = col.kind;
        row.space = col.space;
        row.n = test_scores.size();
        row.mae_raw = mae(col.test_values, test_scores);
        RegressionResult fit = ols_simple(col.train_values, train_scores);
        auto predictions = calibrated_predictions(col.test_values, fit);
        row.mae_calibrated = mae(predictions, test_scores);
        row.pearson = pearson(col.test_values, test_scores);
        row.spearman = spearman(col.test_values, test_scores);
        report.rows.push_back(row);
    }
    return report;
}

std::vector<RegressionRow> build_regressions(std::span<const double> train_scores,
                                             std::span<const double> test_scores,
                                             const std::vector<MetricColumn>& columns,
                                             RegressionSplit split) {
    std::vector<RegressionRow> rows;
    for (const auto& col : columns) {
        std::vector<double> x;
        std::vector<double> y;
        switch (split) {
        case RegressionSplit::test:
            x = col.test_values;
            y.assign(test_scores.begin(), test_scores.end());
            break;
        case RegressionSplit::train:
            x = col.train_values;
            y.assign(train_scores.begin(), train_scores.end());
            break;
        case RegressionSplit::all:
            x = col.train_values;
            x.insert(x.end(), col.test_values.begin(), col.test_values.end());
            y.assign(train_scores.begin(), train_scores.end());
            y.insert(y.end(), test_scores.begin(), test_scores.end());
            break;
        }
        rows.push_back({col.kind, col.space, ols_simple(x, y)});
    }
    return rows;
}

std::string report_csv(const EvalReport& report) {
    std::string out = "metric,space,mae_raw,mae_calibrated,pearson,spearman,n\n";
    for (const auto& row : report.rows) {
        out += metrics::to_string(row.kind);
        out += ",";
        out += to_string(row.space);
        out += "," + fmt(row.mae_raw) + "," + fmt(row.mae_calibrated) + "," +
               fmt(row.pearson) + "," + fmt(row.spearman) + "," + std::to_string(row.n) + "\n";
    }
    return out;
}

std::string report_table(const EvalReport& report) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-26s %10s %10s %9s %9s %7s\n", "Metric", "MAE(raw)",
                  "MAE(cal)", "Pearson", "Spearman", "n");
    out << line;
    for (const auto& row : report.rows) {
        std::snprintf(line, sizeof(line), "%-26s %10.4f %10.4f %9.4f %9.4f %7zu\n",
                      metrics::display_name(row.kind, row.space).c_str(), row.mae_raw,
                      row.mae_calibrated, row.pearson, row.spearman, row.n);
        out << line;
    }
    return out.str();
}

std::string regression_csv(const std::vector<RegressionRow>& rows) {
    std::string out = "metric,space,intercept,slope,slope_se,t_stat,p_value,r2,f_stat,n\n";
    for (const auto& row : rows) {
        out += metrics::to_string(row.kind);
        out += ",";
        out += to_string(row.space);
        out += "," + fmt(row.fit.intercept) + "," + fmt(row.fit.slope) + "," +
               fmt(row.fit.slope_se) + "," + fmt(row.fit.t_stat) + "," + fmt(row.fit.p_value) +
               "," + fmt(row.fit.r2) + "," + fmt(row.fit.f_stat) + "," +
               std::to_string(row.fit.n) + "\n";
    }
    return out;
}

std::string regression_table(const std::vector<RegressionRow>& rows) {
    std::ostringstream out;
    char line[200];
    std::snprintf(line, sizeof(line), "%-26s %10s %12s %9s %10s %8s %11s\n", "Predictor",
                  "Intercept", "Slope", "t-stat", "p-value", "R2", "F-stat");
    out << line;
    for (const auto& row : rows) {
        std::snprintf(line, sizeof(line), "%-26s %10.4f %12.4f %9.2f %10.3g %8.4f %11.2f\n",
                      metrics::display_name(row.kind, row.space).c_str(), row.fit.intercept,
                      row.fit.slope, row.fit.t_stat, row.fit.p_value, row.fit.r2,
                      row.fit.f_stat);
        out << line;
    }
    return out.str();
}

std::string correlation_csv(const CorrelationMatrix& matrix) {
    std::string out = "column";
    for (const auto& name : matrix.names) out += "," + name;
    out += "\n";
    for (std::size_t i = 0; i < matrix.names.size(); ++i) {
        out += matrix.names[i];
        for (std::size_t j = 0; j < matrix.names.size(); ++j) {
            out += "," + fmt(matrix.at(i, j));
        }
        out += "\n";
    }
    return out;
}

std::string histogram_csv(const Histogram& hist) {
    std::string out = "bin_lo,bin_hi,count\n";
    const double width =
        (hist.hi - hist.lo) / static_cast<double>(hist.counts.size());
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        double lo = hist.lo + width * static_cast<double>(i);
        double hi = i + 1 == hist.counts.size() ? hist.hi : lo + width;
        out += fmt(lo) + "," + fmt(hi) + "," + std::to_string(hist.counts[i]) + "\n";
    }
    return out;
}

std::string qq_csv(const std::vector<std::pair<double, double>>& points) {
    std::string out = "rank_x,rank_y\n";
    for (const auto& [rx, ry] : points) {
        out += fmt(rx) + "," + fmt(ry) + "\n";
    }
    return out;
}

} // namespace pcaret::eval
