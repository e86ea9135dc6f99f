#include "pcaret/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "pcaret/errors.hpp"

namespace pcaret::kernels {

#if defined(PCARET_HAVE_AVX2)
const KernelTable& avx2_table(); // defined in kernels_avx2.cpp
#endif

namespace {

bool cpu_has_avx2() {
#if defined(PCARET_HAVE_AVX2)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend pick_default() {
    if (const char* env = std::getenv("PCARET_KERNEL_BACKEND")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::avx2;
        // Unknown or unavailable name: fall through to autodetection.
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& active_slot() {
    static std::atomic<Backend> slot{pick_default()};
    return slot;
}

} // namespace

const char* to_string(Backend b) {
    return b == Backend::scalar ? "scalar" : "avx2";
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out{Backend::scalar};
    if (cpu_has_avx2()) out.push_back(Backend::avx2);
    return out;
}

const KernelTable& table_for(Backend b) {
    switch (b) {
    case Backend::scalar:
        return scalar_table();
    case Backend::avx2:
#if defined(PCARET_HAVE_AVX2)
        if (cpu_has_avx2()) return avx2_table();
#endif
        throw UsageError("kernel backend avx2 is not available on this machine");
    }
    throw UsageError("unknown kernel backend");
}

const KernelTable& active_table() {
    return table_for(active_slot().load(std::memory_order_relaxed));
}

Backend active_backend() {
    return active_slot().load(std::memory_order_relaxed);
}

void set_backend(Backend b) {
    table_for(b); // validates availability
    active_slot().store(b, std::memory_order_relaxed);
}

} // namespace pcaret::kernels
