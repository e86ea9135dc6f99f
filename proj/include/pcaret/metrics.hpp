#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcaret/store.hpp"
#include "pcaret/types.hpp"

namespace pcaret::metrics {

// The four pairwise measures. L1Norm/L2Norm are distances (lower is
// closer); L1Similarity/CosineSimilarity are similarities (higher is
// closer).
enum class MetricKind : std::uint8_t {
    l1_norm,
    l2_norm,
    l1_similarity,
    cosine_similarity,
};

inline constexpr MetricKind kAllMetricKinds[] = {
    MetricKind::cosine_similarity,
    MetricKind::l1_similarity,
    MetricKind::l1_norm,
    MetricKind::l2_norm,
};

bool is_distance(MetricKind kind);
const char* to_string(MetricKind kind);
MetricKind metric_from_name(const std::string& name);

// Display label matching the reporting convention, e.g.
// "Cosine Similarity" / "Cosine Similarity - PCA".
std::string display_name(MetricKind kind, Space space);

// Scalar operations. Inputs must be finite and equal-dimensioned;
// similarity metrics reject zero vectors (undefined metric) instead of
// returning 0.
double l1_norm(std::span<const double> u, std::span<const double> v);
double l2_norm(std::span<const double> u, std::span<const double> v);
double l1_similarity(std::span<const double> u, std::span<const double> v);
double cosine_similarity(std::span<const double> u, std::span<const double> v);
double metric_value(MetricKind kind, std::span<const double> u, std::span<const double> v);

// All four measures from one fused pass; bit-identical to the scalar
// operations above.
struct AllMetrics {
    double l1_norm;
    double l2_norm;
    double l1_similarity;
    double cosine_similarity;
};
AllMetrics all_metrics(std::span<const double> u, std::span<const double> v);

// Element i is metric(E1[i], E2[i]). Rows may be processed by several
// threads; each element has a fixed owner, so results are independent
// of thread count.
std::vector<double> pairwise_metric(const EmbeddingMatrix& E1, const EmbeddingMatrix& E2,
                                    MetricKind kind, unsigned threads = 1);

// CSV block `pair_id,metric,space,value` for one metric column.
std::string pairwise_csv(const std::vector<std::uint64_t>& pair_ids,
                         const std::vector<double>& values, MetricKind kind, Space space,
                         bool header);

struct SearchHit {
    std::uint64_t id;
    double value;
};

// Exact brute-force top-k over an index: similarities descending,
// distances ascending, ties broken by ascending id.
std::vector<SearchHit> top_k(std::span<const double> query, const store::VectorIndex& index,
                             MetricKind kind, std::size_t k);

} // namespace pcaret::metrics
