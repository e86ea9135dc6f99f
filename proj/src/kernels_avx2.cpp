// AVX2 kernel variants. Four doubles per register maps directly onto
// the canonical four-lane accumulation order, so each kernel here is
// bit-identical to its scalar reference: same per-lane operation
// sequence, same (s0+s2)+(s1+s3) reduction, same sequential tail.
// No FMA: the scalar reference uses separate multiply and add, and
// matching it exactly matters more than the last bit of throughput.

#include "pcaret/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

namespace pcaret::kernels {

namespace {

inline __m256d abs_pd(__m256d x) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

// (s0 + s2) + (s1 + s3)
inline double reduce_pd(__m256d acc) {
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d pair = _mm_add_pd(lo, hi); // (s0+s2, s1+s3)
    return _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
}

double l1_norm_avx2(const double* u, const double* v, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t main = n & ~std::size_t(3);
    for (std::size_t i = 0; i < main; i += 4) {
        __m256d a = _mm256_loadu_pd(u + i);
        __m256d b = _mm256_loadu_pd(v + i);
        acc = _mm256_add_pd(acc, abs_pd(_mm256_sub_pd(a, b)));
    }
    double total = reduce_pd(acc);
    for (std::size_t i = main; i < n; ++i) total += std::fabs(u[i] - v[i]);
    return total;
}

double l2_norm_avx2(const double* u, const double* v, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t main = n & ~std::size_t(3);
    for (std::size_t i = 0; i < main; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(u + i), _mm256_loadu_pd(v + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double total = reduce_pd(acc);
    for (std::size_t i = main; i < n; ++i) {
        double d = u[i] - v[i];
        total += d * d;
    }
    return std::sqrt(total);
}

SimTerms l1_sim_terms_avx2(const double* u, const double* v, std::size_t n) {
    __m256d dot = _mm256_setzero_pd();
    __m256d au = _mm256_setzero_pd();
    __m256d av = _mm256_setzero_pd();
    std::size_t main = n & ~std::size_t(3);
    for (std::size_t i = 0; i < main; i += 4) {
        __m256d a = _mm256_loadu_pd(u + i);
        __m256d b = _mm256_loadu_pd(v + i);
        dot = _mm256_add_pd(dot, _mm256_mul_pd(a, b));
        au = _mm256_add_pd(au, abs_pd(a));
        av = _mm256_add_pd(av, abs_pd(b));
    }
    SimTerms t{reduce_pd(dot), reduce_pd(au), reduce_pd(av)};
    for (std::size_t i = main; i < n; ++i) {
        t.dot += u[i] * v[i];
        t.nu += std::fabs(u[i]);
        t.nv += std::fabs(v[i]);
    }
    return t;
}

SimTerms cosine_terms_avx2(const double* u, const double* v, std::size_t n) {
    __m256d dot = _mm256_setzero_pd();
    __m256d su = _mm256_setzero_pd();
    __m256d sv = _mm256_setzero_pd();
    std::size_t main = n & ~std::size_t(3);
    for (std::size_t i = 0; i < main; i += 4) {
        __m256d a = _mm256_loadu_pd(u + i);
        __m256d b = _mm256_loadu_pd(v + i);
        dot = _mm256_add_pd(dot, _mm256_mul_pd(a, b));
        su = _mm256_add_pd(su, _mm256_mul_pd(a, a));
        sv = _mm256_add_pd(sv, _mm256_mul_pd(b, b));
    }
    SimTerms t{reduce_pd(dot), reduce_pd(su), reduce_pd(sv)};
    for (std::size_t i = main; i < n; ++i) {
        t.dot += u[i] * v[i];
        t.nu += u[i] * u[i];
        t.nv += v[i] * v[i];
    }
    return t;
}

FusedSums fused_avx2(const double* u, const double* v, std::size_t n) {
    __m256d ad = _mm256_setzero_pd();
    __m256d sd = _mm256_setzero_pd();
    __m256d dot = _mm256_setzero_pd();
    __m256d au = _mm256_setzero_pd();
    __m256d av = _mm256_setzero_pd();
    __m256d su = _mm256_setzero_pd();
    __m256d sv = _mm256_setzero_pd();
    std::size_t main = n & ~std::size_t(3);
    for (std::size_t i = 0; i < main; i += 4) {
        __m256d a = _mm256_loadu_pd(u + i);
        __m256d b = _mm256_loadu_pd(v + i);
        __m256d d = _mm256_sub_pd(a, b);
        ad = _mm256_add_pd(ad, abs_pd(d));
        sd = _mm256_add_pd(sd, _mm256_mul_pd(d, d));
        dot = _mm256_add_pd(dot, _mm256_mul_pd(a, b));
        au = _mm256_add_pd(au, abs_pd(a));
        av = _mm256_add_pd(av, abs_pd(b));
        su = _mm256_add_pd(su, _mm256_mul_pd(a, a));
        sv = _mm256_add_pd(sv, _mm256_mul_pd(b, b));
    }
    FusedSums s{reduce_pd(ad), reduce_pd(sd), reduce_pd(dot),
                reduce_pd(au), reduce_pd(av), reduce_pd(su), reduce_pd(sv)};
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

const KernelTable& avx2_table() {
    static const KernelTable table{
        "avx2",           l1_norm_avx2, l2_norm_avx2,
        l1_sim_terms_avx2, cosine_terms_avx2, fused_avx2,
    };
    return table;
}

} // namespace pcaret::kernels

#endif // __AVX2__
