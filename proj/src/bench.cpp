#include "pcaret/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "pcaret/errors.hpp"
#include "pcaret/hash.hpp"
#include "pcaret/rng.hpp"

namespace pcaret::bench {

namespace {

using Clock = std::chrono::steady_clock;

// Raw timed pass: no validation, no allocation inside the loop. The
// kernels are the same ones the metrics module dispatches to, so the
// checksummed outputs must match metrics::pairwise_metric bit for bit.
void pairwise_pass(const kernels::KernelTable& table, metrics::MetricKind kind,
                   const EmbeddingMatrix& E1, const EmbeddingMatrix& E2,
                   std::vector<double>& out, unsigned threads) {
    const std::size_t n = E1.rows();
    const std::size_t d = E1.cols();

    auto run_range = [&](std::size_t begin, std::size_t end) {
        switch (kind) {
        case metrics::MetricKind::l1_norm:
            for (std::size_t i = begin; i < end; ++i) {
                out[i] = table.l1_norm(E1.row(i).data(), E2.row(i).data(), d);
            }
            break;
        case metrics::MetricKind::l2_norm:
            for (std::size_t i = begin; i < end; ++i) {
                out[i] = table.l2_norm(E1.row(i).data(), E2.row(i).data(), d);
            }
            break;
        case metrics::MetricKind::l1_similarity:
            for (std::size_t i = begin; i < end; ++i) {
                auto t = table.l1_sim_terms(E1.row(i).data(), E2.row(i).data(), d);
                out[i] = kernels::compose_l1_similarity(t);
            }
            break;
        case metrics::MetricKind::cosine_similarity:
            for (std::size_t i = begin; i < end; ++i) {
                auto t = table.cosine_terms(E1.row(i).data(), E2.row(i).data(), d);
                out[i] = kernels::compose_cosine(t);
            }
            break;
        }
    };

    if (threads <= 1 || n < 2) {
        run_range(0, n);
        return;
    }
    unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, begin, end] { run_range(begin, end); });
    }
    for (auto& t : pool) t.join();
}

} // namespace

EmbeddingMatrix synthetic_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    EmbeddingMatrix out(rows, cols);
    SplitMix64 rng(seed);
    for (double& v : out.data()) v = rng.next_gaussian();
    return out;
}

TimingStats time_metric(metrics::MetricKind kind, const EmbeddingMatrix& E1,
                        const EmbeddingMatrix& E2, const BenchConfig& cfg) {
    if (E1.rows() == 0 || E2.rows() == 0) {
        throw DataError("time_metric: empty matrices");
    }
    if (E1.rows() != E2.rows() || E1.cols() != E2.cols()) {
        throw DataError("time_metric: matrices must be row-aligned with equal dims");
    }
    if (cfg.measured_iters < 1) {
        throw DataError("time_metric: measured_iters must be >= 1");
    }

    const auto& table = kernels::active_table();
    std::vector<double> out(E1.rows(), 0.0);

    for (std::size_t i = 0; i < cfg.warmup_iters; ++i) {
        pairwise_pass(table, kind, E1, E2, out, cfg.threads);
    }

    std::vector<double> samples_ms;
    samples_ms.reserve(cfg.measured_iters);
    std::uint64_t checksum = 0;
    for (std::size_t i = 0; i < cfg.measured_iters; ++i) {
        auto start = Clock::now();
        pairwise_pass(table, kind, E1, E2, out, cfg.threads);
        auto stop = Clock::now();
        samples_ms.push_back(
            std::chrono::duration<double, std::milli>(stop - start).count());
        std::uint64_t sum = fnv1a64(std::span<const double>(out.data(), out.size()));
        if (i == 0) {
            checksum = sum;
        } else if (sum != checksum) {
            throw Error("time_metric: checksum changed between passes");
        }
    }

    TimingStats stats;
    stats.checksum = checksum;
    double mean = 0.0;
    for (double s : samples_ms) mean += s;
    mean /= static_cast<double>(samples_ms.size());
    double var = 0.0;
    for (double s : samples_ms) var += (s - mean) * (s - mean);
    var = samples_ms.size() > 1 ? var / static_cast<double>(samples_ms.size() - 1) : 0.0;
    std::sort(samples_ms.begin(), samples_ms.end());
    stats.mean_ms = mean;
    stats.std_ms = std::sqrt(var);
    stats.median_ms = samples_ms[samples_ms.size() / 2];
    return stats;
}

IndexMemory index_memory(const store::VectorIndex& index) {
    IndexMemory mem;
    mem.payload_bytes = index.payload_bytes();
    mem.header_bytes = store::VectorIndex::header_bytes();
    mem.id_bytes = index.id_bytes();
    mem.total_bytes = index.file_bytes();
    return mem;
}

std::vector<BenchReport> bench_suite(const BenchConfig& cfg) {
    if (cfg.dims_pca > cfg.dims_full) {
        throw UsageError("bench: dims_pca must not exceed dims_full");
    }
    if (cfg.pair_count < 1) {
        throw UsageError("bench: pair_count must be >= 1");
    }

    EmbeddingMatrix full1 = synthetic_matrix(cfg.pair_count, cfg.dims_full, cfg.seed);
    EmbeddingMatrix full2 = synthetic_matrix(cfg.pair_count, cfg.dims_full, cfg.seed + 1);
    EmbeddingMatrix pca1 = synthetic_matrix(cfg.pair_count, cfg.dims_pca, cfg.seed + 2);
    EmbeddingMatrix pca2 = synthetic_matrix(cfg.pair_count, cfg.dims_pca, cfg.seed + 3);

    const std::size_t width = store::scalar_width(cfg.index_scalar);
    const std::size_t bytes_full = cfg.pair_count * cfg.dims_full * width;
    const std::size_t bytes_pca = cfg.pair_count * cfg.dims_pca * width;
    const char* backend = kernels::active_table().name;

    std::vector<BenchReport> reports;
    std::vector<TimingStats> full_stats;
    for (metrics::MetricKind kind : metrics::kAllMetricKinds) {
        TimingStats stats = time_metric(kind, full1, full2, cfg);
        full_stats.push_back(stats);
        BenchReport r;
        r.kind = kind;
        r.space = Space::full;
        r.mean_ms = stats.mean_ms;
        r.std_ms = stats.std_ms;
        r.median_ms = stats.median_ms;
        r.per_pair_us = stats.mean_ms * 1000.0 / static_cast<double>(cfg.pair_count);
        r.speedup = 1.0;
        r.checksum = stats.checksum;
        r.bytes_full = bytes_full;
        r.bytes_pca = bytes_pca;
        r.compression_ratio = 1.0;
        r.threads = cfg.threads;
        r.backend = backend;
        reports.push_back(r);
    }
    for (std::size_t m = 0; m < std::size(metrics::kAllMetricKinds); ++m) {
        metrics::MetricKind kind = metrics::kAllMetricKinds[m];
        TimingStats stats = time_metric(kind, pca1, pca2, cfg);
        BenchReport r;
        r.kind = kind;
        r.space = Space::pca;
        r.mean_ms = stats.mean_ms;
        r.std_ms = stats.std_ms;
        r.median_ms = stats.median_ms;
        r.per_pair_us = stats.mean_ms * 1000.0 / static_cast<double>(cfg.pair_count);
        r.speedup = stats.mean_ms > 0.0 ? full_stats[m].mean_ms / stats.mean_ms : 0.0;
        r.checksum = stats.checksum;
        r.bytes_full = bytes_full;
        r.bytes_pca = bytes_pca;
        r.compression_ratio =
            bytes_pca > 0 ? static_cast<double>(bytes_full) / static_cast<double>(bytes_pca)
                          : 0.0;
        r.threads = cfg.threads;
        r.backend = backend;
        reports.push_back(r);
    }
    return reports;
}

std::string bench_csv(const std::vector<BenchReport>& reports) {
    std::string out = "metric,space,mean_ms,std_ms,speedup,bytes,ratio\n";
    char buf[256];
    for (const auto& r : reports) {
        std::size_t bytes = r.space == Space::full ? r.bytes_full : r.bytes_pca;
        double ratio = r.space == Space::full ? 1.0 : r.compression_ratio;
        std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.6f,%.4f,%zu,%.6f\n",
                      metrics::to_string(r.kind), to_string(r.space), r.mean_ms, r.std_ms,
                      r.speedup, bytes, ratio);
        out += buf;
    }
    return out;
}

std::string bench_checksum_csv(const std::vector<BenchReport>& reports) {
    std::string out = "metric,space,checksum,bytes,ratio\n";
    char buf[256];
    for (const auto& r : reports) {
        std::size_t bytes = r.space == Space::full ? r.bytes_full : r.bytes_pca;
        double ratio = r.space == Space::full ? 1.0 : r.compression_ratio;
        std::snprintf(buf, sizeof(buf), "%s,%s,%016llx,%zu,%.6f\n", metrics::to_string(r.kind),
                      to_string(r.space), static_cast<unsigned long long>(r.checksum), bytes,
                      ratio);
        out += buf;
    }
    return out;
}

std::string bench_table(const std::vector<BenchReport>& reports) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-26s %12s %10s %12s %9s %14s %7s\n", "Metric",
                  "mean ms", "std ms", "us/pair", "speedup", "bytes", "ratio");
    out << line;
    for (const auto& r : reports) {
        std::size_t bytes = r.space == Space::full ? r.bytes_full : r.bytes_pca;
        double ratio = r.space == Space::full ? 1.0 : r.compression_ratio;
        std::snprintf(line, sizeof(line), "%-26s %12.4f %10.4f %12.5f %9.2f %14zu %7.2f\n",
                      metrics::display_name(r.kind, r.space).c_str(), r.mean_ms, r.std_ms,
                      r.per_pair_us, r.speedup, bytes, ratio);
        out << line;
    }
    return out.str();
}

} // namespace pcaret::bench
