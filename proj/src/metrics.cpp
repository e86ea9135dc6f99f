#include "pcaret/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "pcaret/errors.hpp"
#include "pcaret/kernels.hpp"

namespace pcaret::metrics {

namespace {

void check_dims(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw DataError("metric: dimension mismatch, " + std::to_string(u.size()) + " vs " +
                        std::to_string(v.size()));
    }
}

void check_finite(std::span<const double> x, const char* which) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) {
            throw DataError(std::string("metric: non-finite entry in ") + which +
                            " at index " + std::to_string(i));
        }
    }
}

void check_inputs(std::span<const double> u, std::span<const double> v) {
    check_dims(u, v);
    check_finite(u, "u");
    check_finite(v, "v");
}

[[noreturn]] void throw_zero_vector(const char* metric) {
    throw DataError(std::string(metric) + ": undefined for a zero vector");
}

} // namespace

bool is_distance(MetricKind kind) {
    return kind == MetricKind::l1_norm || kind == MetricKind::l2_norm;
}

const char* to_string(MetricKind kind) {
    switch (kind) {
    case MetricKind::l1_norm: return "l1_norm";
    case MetricKind::l2_norm: return "l2_norm";
    case MetricKind::l1_similarity: return "l1_similarity";
    case MetricKind::cosine_similarity: return "cosine_similarity";
    }
    return "?";
}

MetricKind metric_from_name(const std::string& name) {
    for (MetricKind kind : kAllMetricKinds) {
        if (name == to_string(kind)) return kind;
    }
    throw UsageError("unknown metric '" + name + "'");
}

std::string display_name(MetricKind kind, Space space) {
    std::string base;
    switch (kind) {
    case MetricKind::l1_norm: base = "L1 Norm"; break;
    case MetricKind::l2_norm: base = "L2 Norm"; break;
    case MetricKind::l1_similarity: base = "L1 Similarity"; break;
    case MetricKind::cosine_similarity: base = "Cosine Similarity"; break;
    }
    if (space == Space::pca) base += " - PCA";
    return base;
}

double l1_norm(std::span<const double> u, std::span<const double> v) {
    check_inputs(u, v);
    return kernels::active_table().l1_norm(u.data(), v.data(), u.size());
}

double l2_norm(std::span<const double> u, std::span<const double> v) {
    check_inputs(u, v);
    return kernels::active_table().l2_norm(u.data(), v.data(), u.size());
}

double l1_similarity(std::span<const double> u, std::span<const double> v) {
    check_inputs(u, v);
    auto terms = kernels::active_table().l1_sim_terms(u.data(), v.data(), u.size());
    if (terms.nu == 0.0 || terms.nv == 0.0) throw_zero_vector("l1_similarity");
    return kernels::compose_l1_similarity(terms);
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    check_inputs(u, v);
    auto terms = kernels::active_table().cosine_terms(u.data(), v.data(), u.size());
    if (terms.nu == 0.0 || terms.nv == 0.0) throw_zero_vector("cosine_similarity");
    return kernels::compose_cosine(terms);
}

double metric_value(MetricKind kind, std::span<const double> u, std::span<const double> v) {
    switch (kind) {
    case MetricKind::l1_norm: return l1_norm(u, v);
    case MetricKind::l2_norm: return l2_norm(u, v);
    case MetricKind::l1_similarity: return l1_similarity(u, v);
    case MetricKind::cosine_similarity: return cosine_similarity(u, v);
    }
    throw UsageError("unknown metric kind");
}

AllMetrics all_metrics(std::span<const double> u, std::span<const double> v) {
    check_inputs(u, v);
    auto sums = kernels::active_table().fused(u.data(), v.data(), u.size());
    if (sums.abs_u == 0.0 || sums.abs_v == 0.0) throw_zero_vector("all_metrics");
    return AllMetrics{
        sums.abs_diff,
        std::sqrt(sums.sq_diff),
        kernels::compose_l1_similarity({sums.dot, sums.abs_u, sums.abs_v}),
        kernels::compose_cosine({sums.dot, sums.sq_u, sums.sq_v}),
    };
}

std::vector<double> pairwise_metric(const EmbeddingMatrix& E1, const EmbeddingMatrix& E2,
                                    MetricKind kind, unsigned threads) {
    if (E1.rows() != E2.rows()) {
        throw DataError("pairwise_metric: row count mismatch, " + std::to_string(E1.rows()) +
                        " vs " + std::to_string(E2.rows()));
    }
    if (E1.cols() != E2.cols()) {
        throw DataError("pairwise_metric: dimension mismatch, " + std::to_string(E1.cols()) +
                        " vs " + std::to_string(E2.cols()));
    }
    E1.require_finite("pairwise_metric: E1");
    E2.require_finite("pairwise_metric: E2");

    const std::size_t n = E1.rows();
    const std::size_t d = E1.cols();
    std::vector<double> out(n, 0.0);
    const auto& table = kernels::active_table();

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double* u = E1.row(i).data();
            const double* v = E2.row(i).data();
            switch (kind) {
            case MetricKind::l1_norm:
                out[i] = table.l1_norm(u, v, d);
                break;
            case MetricKind::l2_norm:
                out[i] = table.l2_norm(u, v, d);
                break;
            case MetricKind::l1_similarity: {
                auto t = table.l1_sim_terms(u, v, d);
                if (t.nu == 0.0 || t.nv == 0.0) throw_zero_vector("l1_similarity");
                out[i] = kernels::compose_l1_similarity(t);
                break;
            }
            case MetricKind::cosine_similarity: {
                auto t = table.cosine_terms(u, v, d);
                if (t.nu == 0.0 || t.nv == 0.0) throw_zero_vector("cosine_similarity");
                out[i] = kernels::compose_cosine(t);
                break;
            }
            }
        }
    };

    if (threads <= 1 || n < 2) {
        run_range(0, n);
        return out;
    }

    unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                run_range(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

std::string pairwise_csv(const std::vector<std::uint64_t>& pair_ids,
                         const std::vector<double>& values, MetricKind kind, Space space,
                         bool header) {
    if (pair_ids.size() != values.size()) {
        throw DataError("pairwise_csv: " + std::to_string(pair_ids.size()) + " ids for " +
                        std::to_string(values.size()) + " values");
    }
    std::string out;
    if (header) out += "pair_id,metric,space,value\n";
    char buf[64];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
        out += std::to_string(pair_ids[i]);
        out.push_back(',');
        out += to_string(kind);
        out.push_back(',');
        out += pcaret::to_string(space);
        out.push_back(',');
        out += buf;
        out.push_back('\n');
    }
    return out;
}

std::vector<SearchHit> top_k(std::span<const double> query, const store::VectorIndex& index,
                             MetricKind kind, std::size_t k) {
    if (index.rows() == 0) {
        throw DataError("top_k: empty index");
    }
    if (query.size() != index.dim) {
        throw DataError("top_k: query dim " + std::to_string(query.size()) +
                        " != index dim " + std::to_string(index.dim));
    }
    if (k == 0 || k > index.rows()) {
        throw DataError("top_k: k " + std::to_string(k) + " out of range [1, " +
                        std::to_string(index.rows()) + "]");
    }
    check_finite(query, "query");

    const auto& table = kernels::active_table();
    std::vector<double> candidate(index.dim);
    std::vector<SearchHit> hits;
    hits.reserve(index.rows());
    for (std::size_t i = 0; i < index.rows(); ++i) {
        index.copy_row(i, candidate.data());
        double value = 0.0;
        switch (kind) {
        case MetricKind::l1_norm:
            value = table.l1_norm(query.data(), candidate.data(), index.dim);
            break;
        case MetricKind::l2_norm:
            value = table.l2_norm(query.data(), candidate.data(), index.dim);
            break;
        case MetricKind::l1_similarity: {
            auto t = table.l1_sim_terms(query.data(), candidate.data(), index.dim);
            if (t.nu == 0.0 || t.nv == 0.0) throw_zero_vector("l1_similarity");
            value = kernels::compose_l1_similarity(t);
            break;
        }
        case MetricKind::cosine_similarity: {
            auto t = table.cosine_terms(query.data(), candidate.data(), index.dim);
            if (t.nu == 0.0 || t.nv == 0.0) throw_zero_vector("cosine_similarity");
            value = kernels::compose_cosine(t);
            break;
        }
        }
        hits.push_back({index.ids[i], value});
    }

    const bool ascending = is_distance(kind);
    std::sort(hits.begin(), hits.end(), [ascending](const SearchHit& a, const SearchHit& b) {
        if (a.value != b.value) return ascending ? a.value < b.value : a.value > b.value;
        return a.id < b.id;
    });
    hits.resize(k);
    return hits;
}

} // namespace pcaret::metrics
