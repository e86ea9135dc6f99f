#include "pcaret/kernels.hpp"

#include <cmath>

// Scalar reference kernels. These define the canonical accumulation
// order documented in kernels.hpp; SIMD backends must match them
// bit-for-bit.

namespace pcaret::kernels {

namespace {

inline double reduce4(const double acc[4]) {
    return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double l1_norm_scalar(const double* u, const double* v, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t main = n & ~std::size_t(3);
    for (std::size_t i = 0; i < main; i += 4) {
        acc[0] += std::fabs(u[i] - v[i]);
        acc[1] += std::fabs(u[i + 1] - v[i + 1]);
        acc[2] += std::fabs(u[i + 2] - v[i + 2]);
        acc[3] += std::fabs(u[i + 3] - v[i + 3]);
    }
    double total = reduce4(acc);
    for (std::size_t i = main; i < n; ++i) total += std::fabs(u[i] - v[i]);
    return total;
}

double l2_norm_scalar(const double* u, const double* v, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t main = n & ~std::size_t(3);
    for (std::size_t i = 0; i < main; i += 4) {
        double d0 = u[i] - v[i];
        double d1 = u[i + 1] - v[i + 1];
        double d2 = u[i + 2] - v[i + 2];
        double d3 = u[i + 3] - v[i + 3];
        acc[0] += d0 * d0;
        acc[1] += d1 * d1;
        acc[2] += d2 * d2;
        acc[3] += d3 * d3;
    }
    double total = reduce4(acc);
    for (std::size_t i = main; i < n; ++i) {
        double d = u[i] - v[i];
        total += d * d;
    }
    return std::sqrt(total);
}

SimTerms l1_sim_terms_scalar(const double* u, const double* v, std::size_t n) {
    double dot[4] = {0.0, 0.0, 0.0, 0.0};
    double au[4] = {0.0, 0.0, 0.0, 0.0};
    double av[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t main = n & ~std::size_t(3);
    for (std::size_t i = 0; i < main; i += 4) {
        for (std::size_t j = 0; j < 4; ++j) {
            dot[j] += u[i + j] * v[i + j];
            au[j] += std::fabs(u[i + j]);
            av[j] += std::fabs(v[i + j]);
        }
    }
    SimTerms t{reduce4(dot), reduce4(au), reduce4(av)};
    for (std::size_t i = main; i < n; ++i) {
        t.dot += u[i] * v[i];
        t.nu += std::fabs(u[i]);
        t.nv += std::fabs(v[i]);
    }
    return t;
}

SimTerms cosine_terms_scalar(const double* u, const double* v, std::size_t n) {
    double dot[4] = {0.0, 0.0, 0.0, 0.0};
    double su[4] = {0.0, 0.0, 0.0, 0.0};
    double sv[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t main = n & ~std::size_t(3);
    for (std::size_t i = 0; i < main; i += 4) {
        for (std::size_t j = 0; j < 4; ++j) {
            dot[j] += u[i + j] * v[i + j];
            su[j] += u[i + j] * u[i + j];
            sv[j] += v[i + j] * v[i + j];
        }
    }
    SimTerms t{reduce4(dot), reduce4(su), reduce4(sv)};
    for (std::size_t i = main; i < n; ++i) {
        t.dot += u[i] * v[i];
        t.nu += u[i] * u[i];
        t.nv += v[i] * v[i];
    }
    return t;
}

FusedSums fused_scalar(const double* u, const double* v, std::size_t n) {
    double ad[4] = {0.0, 0.0, 0.0, 0.0};
    double sd[4] = {0.0, 0.0, 0.0, 0.0};
    double dot[4] = {0.0, 0.0, 0.0, 0.0};
    double au[4] = {0.0, 0.0, 0.0, 0.0};
    double av[4] = {0.0, 0.0, 0.0, 0.0};
    double su[4] = {0.0, 0.0, 0.0, 0.0};
    double sv[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t main = n & ~std::size_t(3);
    for (std::size_t i = 0; i < main; i += 4) {
        for (std::size_t j = 0; j < 4; ++j) {
            double a = u[i + j];
            double b = v[i + j];
            double d = a - b;
            ad[j] += std::fabs(d);
            sd[j] += d * d;
            dot[j] += a * b;
            au[j] += std::fabs(a);
            av[j] += std::fabs(b);
            su[j] += a * a;
            sv[j] += b * b;
        }
    }
    FusedSums s{reduce4(ad), reduce4(sd), reduce4(dot),
                reduce4(au), reduce4(av), reduce4(su), reduce4(sv)};
    for (std::size_t i = main; i < n; ++i) {
        double a = u[i];
        double b = v[i];
        double d = a - b;
        s.abs_diff += std::fabs(d);
        s.sq_diff += d * d;
        s.dot += a * b;
        s.abs_u += std::fabs(a);
        s.abs_v += std::fabs(b);
        s.sq_u += a * a;
        s.sq_v += b * b;
    }
    return s;
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        "scalar",         l1_norm_scalar, l2_norm_scalar,
        l1_sim_terms_scalar, cosine_terms_scalar, fused_scalar,
    };
    return table;
}

} // namespace pcaret::kernels
