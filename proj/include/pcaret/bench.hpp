#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcaret/kernels.hpp"
#include "pcaret/metrics.hpp"
#include "pcaret/store.hpp"
#include "pcaret/types.hpp"

namespace pcaret::bench {

struct BenchConfig {
    std::size_t warmup_iters = 3;
    std::size_t measured_iters = 30;
    std::size_t pair_count = 10000;
    std::size_t dims_full = 3072;
    std::size_t dims_pca = 110;
    std::uint64_t seed = 42;
    unsigned threads = 1; // single-threaded by default to stabilize timings
    store::ScalarKind index_scalar = store::ScalarKind::f32; // storage accounting
};

// Relative band treated as timing noise when comparing speedups that
// should be ~1 (e.g. dims_pca == dims_full).
inline constexpr double kNoiseBand = 2.0;

struct BenchReport {
    metrics::MetricKind kind;
    Space space;
    double mean_ms = 0.0;   // per pairwise-batch pass
    double std_ms = 0.0;
    double median_ms = 0.0;
    double per_pair_us = 0.0;
    double speedup = 1.0;   // vs the full-space counterpart
    std::uint64_t checksum = 0; // FNV-1a over the output doubles
    std::size_t bytes_full = 0; // index payload bytes at dims_full
    std::size_t bytes_pca = 0;  // index payload bytes at dims_pca
    double compression_ratio = 1.0;
    double noise_band = kNoiseBand;
    unsigned threads = 1;
    const char* backend = "";
};

// Deterministic standard-normal matrix for benchmark inputs.
EmbeddingMatrix synthetic_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

struct TimingStats {
    double mean_ms = 0.0;
    double std_ms = 0.0;
    double median_ms = 0.0;
    std::uint64_t checksum = 0;
};

// Times full pairwise passes of one metric over row-aligned matrices:
// warmup first, then measured_iters timed passes. The output vector is
// checksummed each pass; the checksum is identical across passes and
// keeps the computation observable.
TimingStats time_metric(metrics::MetricKind kind, const EmbeddingMatrix& E1,
                        const EmbeddingMatrix& E2, const BenchConfig& cfg);

// Exact storage accounting of an index file.
struct IndexMemory {
    std::size_t payload_bytes = 0;
    std::size_t header_bytes = 0;
    std::size_t id_bytes = 0;
    std::size_t total_bytes = 0; // complete file incl. checksum trailer
};
IndexMemory index_memory(const store::VectorIndex& index);

// All eight (metric, space) rows: each metric in the full space, then
// each in the PCA space, with speedups against the full counterpart.
std::vector<BenchReport> bench_suite(const BenchConfig& cfg);

// `metric,space,mean_ms,std_ms,speedup,bytes,ratio` (wall-clock, varies
// run to run).
std::string bench_csv(const std::vector<BenchReport>& reports);

// Deterministic companion: `metric,space,checksum,bytes,ratio`.
std::string bench_checksum_csv(const std::vector<BenchReport>& reports);

std::string bench_table(const std::vector<BenchReport>& reports);

} // namespace pcaret::bench
