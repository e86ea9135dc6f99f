#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace pcaret {

using Sha256Digest = std::array<std::uint8_t, 32>;

// SHA-256 of raw bytes (OpenSSL-backed). Used for cache keys and
// manifest input hashes.
Sha256Digest sha256(std::span<const std::uint8_t> bytes);
Sha256Digest sha256(const std::string& text);

std::string to_hex(std::span<const std::uint8_t> bytes);

// SHA-256 of a whole file, streamed.
Sha256Digest sha256_file(const std::string& path);

// FNV-1a 64-bit over raw bytes. Cheap order-sensitive checksum for
// benchmark outputs: bitwise-equal vectors, and only those, collide.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

inline std::uint64_t fnv1a64(std::span<const double> values) {
    return fnv1a64(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(values.data()), values.size() * sizeof(double)));
}

} // namespace pcaret
