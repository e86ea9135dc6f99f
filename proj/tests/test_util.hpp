#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pcaret/rng.hpp"
#include "pcaret/types.hpp"

namespace testutil {

// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "pcaret_test_XXXXXX")
                               .string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (mkdtemp(buf.data()) == nullptr) {
            throw std::runtime_error("mkdtemp failed");
        }
        path = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }

    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

inline pcaret::EmbeddingMatrix random_matrix(std::size_t rows, std::size_t cols,
                                             std::uint64_t seed) {
    pcaret::EmbeddingMatrix m(rows, cols);
    pcaret::SplitMix64 rng(seed);
    for (double& v : m.data()) v = rng.next_gaussian();
    return m;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    std::vector<double> v(n);
    pcaret::SplitMix64 rng(seed);
    for (double& x : v) x = rng.next_gaussian();
    return v;
}

// Sample covariance (N-1 denominator) of the rows of X, d x d row-major.
inline std::vector<double> sample_covariance(const pcaret::EmbeddingMatrix& X) {
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += X(i, j);
    }
    for (double& m : mean) m /= static_cast<double>(n);
    std::vector<double> cov(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < d; ++a) {
            double ca = X(i, a) - mean[a];
            for (std::size_t b = 0; b < d; ++b) {
                cov[a * d + b] += ca * (X(i, b) - mean[b]);
            }
        }
    }
    for (double& c : cov) c /= static_cast<double>(n - 1);
    return cov;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
// returned descending. Deliberately independent of the library's SVD
// path; used as the spectral oracle.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> A, std::size_t n) {
    auto at = [&](std::size_t i, std::size_t j) -> double& { return A[i * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
        }
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(at(p, q)) < 1e-300) continue;
                double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = at(k, p);
                    double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = at(p, k);
                    double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

} // namespace testutil
