#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace pcaret::kernels {

// Distance/similarity inner loops over double vectors.
//
// Every backend implements the same canonical accumulation order, so
// results are bit-identical no matter which backend runs:
//   - elements are consumed in blocks of four; block lane j accumulates
//     elements 4m+j into its own partial sum,
//   - the four partials reduce as (s0 + s2) + (s1 + s3),
//   - leftover tail elements are added sequentially, in index order.
// The order is fixed per pair; parallelism belongs across pairs.
// Kernel translation units are built with FP contraction disabled so
// the scalar reference cannot silently fuse multiply-adds.

// Sums feeding a similarity: dot product plus one norm-like term per
// input vector (sum of absolute values for L1 similarity, sum of
// squares for cosine).
struct SimTerms {
    double dot = 0.0;
    double nu = 0.0;
    double nv = 0.0;
};

// All seven accumulator outputs of the single-pass fused kernel.
struct FusedSums {
    double abs_diff = 0.0; // sum |u_i - v_i|
    double sq_diff = 0.0;  // sum (u_i - v_i)^2
    double dot = 0.0;      // sum u_i * v_i
    double abs_u = 0.0;    // sum |u_i|
    double abs_v = 0.0;    // sum |v_i|
    double sq_u = 0.0;     // sum u_i^2
    double sq_v = 0.0;     // sum v_i^2
};

struct KernelTable {
    const char* name;
    double (*l1_norm)(const double* u, const double* v, std::size_t n);
    double (*l2_norm)(const double* u, const double* v, std::size_t n);
    SimTerms (*l1_sim_terms)(const double* u, const double* v, std::size_t n);
    SimTerms (*cosine_terms)(const double* u, const double* v, std::size_t n);
    FusedSums (*fused)(const double* u, const double* v, std::size_t n);
};

enum class Backend { scalar, avx2 };

const char* to_string(Backend b);

const KernelTable& scalar_table();

// Backends compiled in and usable on this CPU; scalar is always first.
std::vector<Backend> available_backends();

// Active table: best available backend by default, or the one named by
// the PCARET_KERNEL_BACKEND environment variable (scalar|avx2).
const KernelTable& active_table();
Backend active_backend();
const KernelTable& table_for(Backend b);

// Overrides the startup selection; throws UsageError if the backend is
// not available. Intended for tests and the bench CLI flag.
void set_backend(Backend b);

// Composition of final metric values from the raw sums. Shared by all
// callers so the arithmetic after the reduction is identical
// everywhere.
inline double compose_l1_similarity(const SimTerms& t) {
    return t.dot / (t.nu * t.nv);
}

inline double compose_cosine(const SimTerms& t) {
    double value = t.dot / (std::sqrt(t.nu) * std::sqrt(t.nv));
    return std::clamp(value, -1.0, 1.0);
}

} // namespace pcaret::kernels
