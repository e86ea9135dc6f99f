#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcaret/errors.hpp"

namespace pcaret {

// Dense row-major matrix of embedding vectors, one sentence per row.
// Computation throughout the library is double precision; narrower
// on-disk payloads are widened on load.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    EmbeddingMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw DataError("embedding matrix: data size " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(rows_) + "x" +
                            std::to_string(cols_));
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) {
        return {data_.data() + i * cols_, cols_};
    }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool operator==(const EmbeddingMatrix& other) const = default;

    // Throws DataError naming the first non-finite entry, if any.
    void require_finite(const std::string& context) const {
        for (std::size_t i = 0; i < data_.size(); ++i) {
            if (!std::isfinite(data_[i])) {
                throw DataError(context + ": non-finite value at row " +
                                std::to_string(i / cols_) + ", column " +
                                std::to_string(i % cols_));
            }
        }
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Vector space a metric is evaluated in: original embedding space or
// the PCA-projected space.
enum class Space : std::uint8_t { full, pca };

inline const char* to_string(Space s) { return s == Space::full ? "full" : "pca"; }

} // namespace pcaret
