#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pcaret/types.hpp"

namespace pcaret::pca {

// Per-dimension centering/scaling parameters (sample statistics with
// the N-1 denominator). Zero-variance columns keep scale 1 and are
// flagged; they pass through centering only.
struct Standardizer {
    std::size_t dim = 0;
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<std::uint8_t> zero_variance;
};

Standardizer fit_standardizer(const EmbeddingMatrix& X);
EmbeddingMatrix standardize(const Standardizer& s, const EmbeddingMatrix& X);

// Principal-component model fitted by thin SVD of the centered data
// matrix. Component rows are orthonormal and sign-fixed so the
// largest-magnitude entry of each row is positive (first such entry on
// ties), which makes fitting deterministic.
struct PcaModel {
    std::size_t input_dim = 0;                    // d
    std::size_t num_components = 0;               // k
    std::vector<double> components;               // k x d row-major
    std::vector<double> explained_variance;       // eigenvalues, descending
    std::vector<double> explained_variance_ratio; // eigenvalue / total_variance
    std::vector<double> cumulative_ratio;         // running sum of ratios
    std::vector<double> train_mean;               // column means of the training matrix
    double total_variance = 0.0;                  // trace of the training covariance

    std::span<const double> component(std::size_t i) const {
        return {components.data() + i * input_dim, input_dim};
    }
};

// max_components caps the retained spectrum; pass kAllComponents for
// every computable component, i.e. min(N-1, d).
inline constexpr std::size_t kAllComponents = ~std::size_t(0);

PcaModel fit_pca(const EmbeddingMatrix& Xstd, std::size_t max_components = kAllComponents);

// Minimal k whose cumulative explained-variance ratio reaches the
// threshold (in (0,1]). Throws DataError when the fitted spectrum
// cannot reach it.
std::size_t select_components(const PcaModel& model, double threshold);

// Y = (X - train_mean) * components^T, N x k.
EmbeddingMatrix transform(const PcaModel& model, const EmbeddingMatrix& Xstd);

// X_hat = Y * components + train_mean, N x d.
EmbeddingMatrix inverse_transform(const PcaModel& model, const EmbeddingMatrix& Y);

// (component_index, cumulative_ratio) pairs, 1-based, for plotting.
std::vector<std::pair<std::size_t, double>> variance_curve(const PcaModel& model);

// Copy of the model keeping only the first k components (k <= fitted k).
PcaModel truncated(const PcaModel& model, std::size_t k);

// Checks every structural invariant (orthonormal rows, descending
// non-negative spectrum, cumulative ratios bounded). Throws DataError.
void validate_model(const PcaModel& model);

} // namespace pcaret::pca
