#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcaret/pca.hpp"
#include "pcaret/types.hpp"

namespace pcaret::store {

// Binary formats, little-endian throughout, each file ending in a
// CRC-32 of everything before it so any corruption is detected on
// load.
//
// Vector index ("PCARVIDX", version 1):
//   magic[8] | version u16 | dim u32 | rows u64 | scalar_kind u8
//   | ids rows x u64 | payload rows*dim scalars | crc32 u32
//
// PCA model ("PCARMODL", version 1):
//   magic[8] | version u16 | d u32 | k u32 | total_variance f64
//   | train_mean d x f64 | standardizer mean d x f64
//   | standardizer scale d x f64 | components k*d x f64
//   | explained_variance k x f64 | crc32 u32

enum class ScalarKind : std::uint8_t { f32 = 0, f64 = 1 };

inline std::size_t scalar_width(ScalarKind kind) {
    return kind == ScalarKind::f32 ? 4 : 8;
}

inline const char* to_string(ScalarKind kind) {
    return kind == ScalarKind::f32 ? "f32" : "f64";
}

// Persisted embedding collection. Exactly one payload vector is
// populated, chosen by scalar_kind.
struct VectorIndex {
    std::uint32_t dim = 0;
    ScalarKind scalar_kind = ScalarKind::f32;
    std::vector<std::uint64_t> ids;
    std::vector<float> payload_f32;
    std::vector<double> payload_f64;

    std::size_t rows() const { return ids.size(); }

    // Widened row view for metric computation; exact for both kinds.
    void copy_row(std::size_t i, double* out) const;
    EmbeddingMatrix to_matrix() const;

    std::size_t payload_bytes() const { return rows() * dim * scalar_width(scalar_kind); }
    static constexpr std::size_t header_bytes() { return 8 + 2 + 4 + 8 + 1; }
    std::size_t id_bytes() const { return rows() * 8; }
    std::size_t file_bytes() const {
        return header_bytes() + id_bytes() + payload_bytes() + 4;
    }
};

// Builds an index from a matrix, narrowing to f32 when requested.
// Throws when ids are not unique or do not match the row count.
VectorIndex make_index(const std::vector<std::uint64_t>& ids, const EmbeddingMatrix& X,
                       ScalarKind kind);

void save_index(const VectorIndex& index, const std::string& path);
VectorIndex load_index(const std::string& path);

// Encoded image of an index (exact bytes save_index writes).
std::vector<std::uint8_t> encode_index(const VectorIndex& index);
VectorIndex decode_index(const std::vector<std::uint8_t>& bytes, const std::string& context);

struct LoadedModel {
    pca::Standardizer standardizer;
    pca::PcaModel model;
};

void save_model(const pca::PcaModel& model, const pca::Standardizer& standardizer,
                const std::string& path);
LoadedModel load_model(const std::string& path);

std::vector<std::uint8_t> encode_model(const pca::PcaModel& model,
                                       const pca::Standardizer& standardizer);
LoadedModel decode_model(const std::vector<std::uint8_t>& bytes, const std::string& context);

constexpr std::size_t model_header_bytes() { return 8 + 2 + 4 + 4 + 8; }
inline std::size_t model_file_bytes(std::size_t d, std::size_t k) {
    return model_header_bytes() + (3 * d + k * d + k) * 8 + 4;
}

// Decoded header summary for the `describe` CLI subcommand.
std::string describe_file(const std::string& path);

} // namespace pcaret::store
