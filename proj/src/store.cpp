#include "pcaret/store.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "pcaret/errors.hpp"
#include "pcaret/wire.hpp"

namespace pcaret::store {

namespace {

constexpr char kIndexMagic[9] = "PCARVIDX";
constexpr char kModelMagic[9] = "PCARMODL";
constexpr std::uint16_t kVersion = 1;

void check_magic(wire::ByteReader& r, const char* magic, const std::string& context) {
    auto got = r.bytes(8);
    if (std::memcmp(got.data(), magic, 8) != 0) {
        throw DataError(context + ": bad magic, not a " + std::string(magic) + " file");
    }
}

void check_version(std::uint16_t version, const std::string& context) {
    if (version != kVersion) {
        throw DataError(context + ": unsupported version " + std::to_string(version));
    }
}

// CRC32 of everything before the trailer; mismatch means corruption.
void check_crc(const std::vector<std::uint8_t>& bytes, const std::string& context) {
    if (bytes.size() < 4) {
        throw DataError(context + ": truncated, no room for checksum");
    }
    std::span<const std::uint8_t> body(bytes.data(), bytes.size() - 4);
    std::uint32_t stored = 0;
    for (int i = 0; i < 4; ++i) {
        stored |= static_cast<std::uint32_t>(bytes[bytes.size() - 4 + i]) << (8 * i);
    }
    if (wire::crc32_of(body) != stored) {
        throw DataError(context + ": checksum mismatch, file is corrupt");
    }
}

void append_crc(wire::ByteWriter& w) {
    std::uint32_t crc = wire::crc32_of(w.data());
    w.u32(crc);
}

void check_ids_unique(const std::vector<std::uint64_t>& ids, const std::string& context) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(ids.size());
    for (std::uint64_t id : ids) {
        if (!seen.insert(id).second) {
            throw DataError(context + ": duplicate id " + std::to_string(id));
        }
    }
}

} // namespace

void VectorIndex::copy_row(std::size_t i, double* out) const {
    if (scalar_kind == ScalarKind::f32) {
        const float* src = payload_f32.data() + i * dim;
        for (std::uint32_t j = 0; j < dim; ++j) out[j] = static_cast<double>(src[j]);
    } else {
        const double* src = payload_f64.data() + i * dim;
        for (std::uint32_t j = 0; j < dim; ++j) out[j] = src[j];
    }
}

EmbeddingMatrix VectorIndex::to_matrix() const {
    EmbeddingMatrix out(rows(), dim);
    for (std::size_t i = 0; i < rows(); ++i) copy_row(i, out.row(i).data());
    return out;
}

VectorIndex make_index(const std::vector<std::uint64_t>& ids, const EmbeddingMatrix& X,
                       ScalarKind kind) {
    if (ids.size() != X.rows()) {
        throw DataError("make_index: " + std::to_string(ids.size()) + " ids for " +
                        std::to_string(X.rows()) + " rows");
    }
    check_ids_unique(ids, "make_index");
    VectorIndex index;
    index.dim = static_cast<std::uint32_t>(X.cols());
    index.scalar_kind = kind;
    index.ids = ids;
    if (kind == ScalarKind::f32) {
        index.payload_f32.reserve(X.data().size());
        for (double v : X.data()) index.payload_f32.push_back(static_cast<float>(v));
    } else {
        index.payload_f64 = X.data();
    }
    return index;
}

std::vector<std::uint8_t> encode_index(const VectorIndex& index) {
    wire::ByteWriter w;
    w.text(kIndexMagic);
    w.u16(kVersion);
    w.u32(index.dim);
    w.u64(index.rows());
    w.u8(static_cast<std::uint8_t>(index.scalar_kind));
    for (std::uint64_t id : index.ids) w.u64(id);
    if (index.scalar_kind == ScalarKind::f32) {
        for (float v : index.payload_f32) w.f32(v);
    } else {
        for (double v : index.payload_f64) w.f64(v);
    }
    append_crc(w);
    return w.take();
}

VectorIndex decode_index(const std::vector<std::uint8_t>& bytes, const std::string& context) {
    check_crc(bytes, context);
    wire::ByteReader r(std::span<const std::uint8_t>(bytes.data(), bytes.size()), context);
    check_magic(r, kIndexMagic, context);
    check_version(r.u16(), context);

    VectorIndex index;
    index.dim = r.u32();
    std::uint64_t rows = r.u64();
    std::uint8_t kind = r.u8();
    if (kind > 1) {
        throw DataError(context + ": unknown scalar kind " + std::to_string(kind));
    }
    index.scalar_kind = static_cast<ScalarKind>(kind);

    std::size_t expected = VectorIndex::header_bytes() + rows * 8 +
                           rows * index.dim * scalar_width(index.scalar_kind) + 4;
    if (bytes.size() != expected) {
        throw DataError(context + ": expected " + std::to_string(expected) + " bytes, got " +
                        std::to_string(bytes.size()));
    }

    index.ids.reserve(rows);
    for (std::uint64_t i = 0; i < rows; ++i) index.ids.push_back(r.u64());
    check_ids_unique(index.ids, context);

    std::size_t scalars = static_cast<std::size_t>(rows) * index.dim;
    if (index.scalar_kind == ScalarKind::f32) {
        index.payload_f32.reserve(scalars);
        for (std::size_t i = 0; i < scalars; ++i) index.payload_f32.push_back(r.f32());
    } else {
        index.payload_f64.reserve(scalars);
        for (std::size_t i = 0; i < scalars; ++i) index.payload_f64.push_back(r.f64());
    }
    r.u32(); // crc, already verified
    r.expect_exhausted();
    return index;
}

void save_index(const VectorIndex& index, const std::string& path) {
    check_ids_unique(index.ids, "save_index");
    auto bytes = encode_index(index);
    wire::write_file_atomic(path, bytes);
}

VectorIndex load_index(const std::string& path) {
    return decode_index(wire::read_file(path), path);
}

std::vector<std::uint8_t> encode_model(const pca::PcaModel& model,
                                       const pca::Standardizer& standardizer) {
    if (standardizer.dim != model.input_dim) {
        throw DataError("encode_model: standardizer dim " + std::to_string(standardizer.dim) +
                        " != model dim " + std::to_string(model.input_dim));
    }
    wire::ByteWriter w;
    w.text(kModelMagic);
    w.u16(kVersion);
    w.u32(static_cast<std::uint32_t>(model.input_dim));
    w.u32(static_cast<std::uint32_t>(model.num_components));
    w.f64(model.total_variance);
    for (double v : model.train_mean) w.f64(v);
    for (double v : standardizer.mean) w.f64(v);
    for (double v : standardizer.scale) w.f64(v);
    for (double v : model.components) w.f64(v);
    for (double v : model.explained_variance) w.f64(v);
    append_crc(w);
    return w.take();
}

LoadedModel decode_model(const std::vector<std::uint8_t>& bytes, const std::string& context) {
    check_crc(bytes, context);
    wire::ByteReader r(std::span<const std::uint8_t>(bytes.data(), bytes.size()), context);
    check_magic(r, kModelMagic, context);
    check_version(r.u16(), context);

    std::size_t d = r.u32();
    std::size_t k = r.u32();
    std::size_t expected = model_file_bytes(d, k);
    if (bytes.size() != expected) {
        throw DataError(context + ": expected " + std::to_string(expected) + " bytes, got " +
                        std::to_string(bytes.size()));
    }

    LoadedModel out;
    out.model.input_dim = d;
    out.model.num_components = k;
    out.model.total_variance = r.f64();
    out.model.train_mean.resize(d);
    for (std::size_t i = 0; i < d; ++i) out.model.train_mean[i] = r.f64();

    out.standardizer.dim = d;
    out.standardizer.mean.resize(d);
    out.standardizer.scale.resize(d);
    out.standardizer.zero_variance.assign(d, 0);
    for (std::size_t i = 0; i < d; ++i) out.standardizer.mean[i] = r.f64();
    for (std::size_t i = 0; i < d; ++i) {
        double s = r.f64();
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw DataError(context + ": non-positive standardizer scale at column " +
                            std::to_string(i));
        }
        out.standardizer.scale[i] = s;
    }

    out.model.components.resize(k * d);
    for (std::size_t i = 0; i < k * d; ++i) out.model.components[i] = r.f64();
    out.model.explained_variance.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.model.explained_variance[i] = r.f64();

    // Ratios are derived, not stored.
    out.model.explained_variance_ratio.resize(k);
    out.model.cumulative_ratio.resize(k);
    double running = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double ratio = out.model.total_variance > 0.0
                           ? out.model.explained_variance[i] / out.model.total_variance
                           : 0.0;
        out.model.explained_variance_ratio[i] = ratio;
        running += ratio;
        out.model.cumulative_ratio[i] = running;
    }

    r.u32(); // crc
    r.expect_exhausted();
    pca::validate_model(out.model);
    return out;
}

void save_model(const pca::PcaModel& model, const pca::Standardizer& standardizer,
                const std::string& path) {
    auto bytes = encode_model(model, standardizer);
    wire::write_file_atomic(path, bytes);
}

LoadedModel load_model(const std::string& path) {
    return decode_model(wire::read_file(path), path);
}

std::string describe_file(const std::string& path) {
    auto bytes = wire::read_file(path);
    if (bytes.size() < 8) {
        throw DataError(path + ": too short to carry a format magic");
    }
    std::ostringstream out;
    if (std::memcmp(bytes.data(), kIndexMagic, 8) == 0) {
        VectorIndex index = decode_index(bytes, path);
        out << "vector index " << path << "\n"
            << "  version:       " << kVersion << "\n"
            << "  rows:          " << index.rows() << "\n"
            << "  dim:           " << index.dim << "\n"
            << "  scalar_kind:   " << to_string(index.scalar_kind) << "\n"
            << "  header_bytes:  " << VectorIndex::header_bytes() << "\n"
            << "  id_bytes:      " << index.id_bytes() << "\n"
            << "  payload_bytes: " << index.payload_bytes() << "\n"
            << "  file_bytes:    " << index.file_bytes() << "\n";
    } else if (std::memcmp(bytes.data(), kModelMagic, 8) == 0) {
        LoadedModel loaded = decode_model(bytes, path);
        out << "pca model " << path << "\n"
            << "  version:          " << kVersion << "\n"
            << "  input_dim:        " << loaded.model.input_dim << "\n"
            << "  components:       " << loaded.model.num_components << "\n"
            << "  total_variance:   " << loaded.model.total_variance << "\n"
            << "  cumulative_ratio: "
            << (loaded.model.cumulative_ratio.empty() ? 0.0
                                                      : loaded.model.cumulative_ratio.back())
            << "\n"
            << "  file_bytes:       "
            << model_file_bytes(loaded.model.input_dim, loaded.model.num_components) << "\n";
    } else {
        throw DataError(path + ": unknown magic");
    }
    return out.str();
}

} // namespace pcaret::store
