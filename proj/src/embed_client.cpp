#include "pcaret/embed_client.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <thread>

#include "pcaret/errors.hpp"
#include "pcaret/rng.hpp"
#include "pcaret/store.hpp"
#include "pcaret/wire.hpp"

namespace pcaret::embed {

namespace {

constexpr char kCacheMagic[9] = "PCARCACH";
constexpr std::uint16_t kCacheVersion = 1;

// Cache record: hash[32] | name_len u32 | name | dim u32 | dim x f64
// | crc32 of the record bytes. The file itself is magic + version
// followed by records, so appends never rewrite existing bytes.
void encode_record(wire::ByteWriter& w, const EmbeddingRecord& rec) {
    wire::ByteWriter body;
    body.bytes(std::span<const std::uint8_t>(rec.text_hash.data(), rec.text_hash.size()));
    body.u32(static_cast<std::uint32_t>(rec.model_name.size()));
    body.text(rec.model_name);
    body.u32(static_cast<std::uint32_t>(rec.vector.size()));
    for (double v : rec.vector) body.f64(v);
    std::uint32_t crc = wire::crc32_of(body.data());
    w.bytes(body.data());
    w.u32(crc);
}

// Reads the body fields only; the caller verifies the trailing crc.
EmbeddingRecord decode_record_body(wire::ByteReader& r) {
    EmbeddingRecord rec;
    auto hash = r.bytes(32);
    std::copy(hash.begin(), hash.end(), rec.text_hash.begin());
    std::uint32_t name_len = r.u32();
    auto name = r.bytes(name_len);
    rec.model_name.assign(name.begin(), name.end());
    std::uint32_t dim = r.u32();
    rec.vector.reserve(dim);
    for (std::uint32_t i = 0; i < dim; ++i) rec.vector.push_back(r.f64());
    return rec;
}

void check_finite_vector(const std::vector<double>& v, const std::string& context) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw ProviderError(context + ": non-finite value at component " +
                                std::to_string(i));
        }
    }
}

class HttpTransport final : public EmbeddingTransport {
public:
    explicit HttpTransport(const ProviderConfig& cfg) {
        const std::string& url = cfg.endpoint;
        auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) {
            throw UsageError("provider endpoint must be an http(s) URL: " + url);
        }
        auto path_start = url.find('/', scheme_end + 3);
        base_ = path_start == std::string::npos ? url : url.substr(0, path_start);
        path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
        if (const char* key = std::getenv(cfg.api_key_env.c_str())) {
            api_key_ = key;
        }
    }

    TransportResult fetch(const std::string& model,
                          const std::vector<std::string>& batch) override {
        nlohmann::json body{{"model", model}, {"input", batch}};
        httplib::Client client(base_);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);
        httplib::Headers headers;
        if (!api_key_.empty()) {
            headers.emplace("Authorization", "Bearer " + api_key_);
        }
        auto res = client.Post(path_, headers, body.dump(), "application/json");

        TransportResult out;
        if (!res) {
            out.status = TransportResult::Status::transient;
            out.error = "transport error: " + httplib::to_string(res.error());
            return out;
        }
        if (res->status == 429) {
            out.status = TransportResult::Status::rate_limited;
            out.error = "rate limited (429)";
            return out;
        }
        if (res->status >= 500) {
            out.status = TransportResult::Status::transient;
            out.error = "server error " + std::to_string(res->status);
            return out;
        }
        if (res->status != 200) {
            out.status = TransportResult::Status::fatal;
            out.error = "http " + std::to_string(res->status) + ": " + res->body;
            return out;
        }
        try {
            auto json = nlohmann::json::parse(res->body);
            const auto& data = json.at("data");
            out.vectors.resize(data.size());
            for (std::size_t i = 0; i < data.size(); ++i) {
                const auto& item = data[i];
                std::size_t slot = item.contains("index")
                                       ? item.at("index").get<std::size_t>()
                                       : i;
                if (slot >= out.vectors.size()) {
                    throw ProviderError("response index " + std::to_string(slot) +
                                        " out of range");
                }
                out.vectors[slot] = item.at("embedding").get<std::vector<double>>();
            }
        } catch (const nlohmann::json::exception& e) {
            out.status = TransportResult::Status::fatal;
            out.error = std::string("malformed provider response: ") + e.what();
            return out;
        }
        out.status = TransportResult::Status::ok;
        return out;
    }

private:
    std::string base_;
    std::string path_;
    std::string api_key_;
};

} // namespace

Sha256Digest cache_key(const std::string& model_name, const std::string& text) {
    std::string keyed = model_name;
    keyed.push_back('\0');
    keyed += text;
    return sha256(keyed);
}

std::unique_ptr<EmbeddingTransport> make_http_transport(const ProviderConfig& cfg) {
    return std::make_unique<HttpTransport>(cfg);
}

EmbedCache::EmbedCache(std::string path) : path_(std::move(path)) {
    if (!std::filesystem::exists(path_)) return;
    auto bytes = wire::read_file(path_);
    wire::ByteReader r(std::span<const std::uint8_t>(bytes.data(), bytes.size()), path_);
    auto magic = r.bytes(8);
    if (std::memcmp(magic.data(), kCacheMagic, 8) != 0) {
        throw DataError(path_ + ": not an embedding cache file");
    }
    if (r.u16() != kCacheVersion) {
        throw DataError(path_ + ": unsupported cache version");
    }
    std::size_t record_no = 0;
    while (r.remaining() > 0) {
        ++record_no;
        std::size_t start = r.offset();
        EmbeddingRecord rec = decode_record_body(r);
        std::size_t body_len = r.offset() - start;
        std::uint32_t stored = r.u32();
        std::span<const std::uint8_t> body(bytes.data() + start, body_len);
        if (wire::crc32_of(body) != stored) {
            throw DataError(path_ + ": corrupt cache record " + std::to_string(record_no));
        }
        records_[to_hex(rec.text_hash)] = std::move(rec);
    }
}

const EmbeddingRecord* EmbedCache::find(const Sha256Digest& key) const {
    auto it = records_.find(to_hex(key));
    return it == records_.end() ? nullptr : &it->second;
}

void EmbedCache::append(const EmbeddingRecord& record) {
    std::lock_guard<std::mutex> lock(write_mutex_);
    bool fresh = !std::filesystem::exists(path_);
    wire::ByteWriter w;
    if (fresh) {
        w.text(kCacheMagic);
        w.u16(kCacheVersion);
    }
    encode_record(w, record);

    std::unique_ptr<std::FILE, decltype(&std::fclose)> f(std::fopen(path_.c_str(), "ab"),
                                                         &std::fclose);
    if (!f) {
        throw DataError("cannot open cache " + path_ + " for append");
    }
    const auto& data = w.data();
    if (std::fwrite(data.data(), 1, data.size(), f.get()) != data.size()) {
        throw DataError("write error on cache " + path_);
    }
    records_[to_hex(record.text_hash)] = record;
}

EmbeddingMatrix embed_texts(const std::vector<std::string>& texts, const ProviderConfig& cfg,
                            EmbedCache& cache, EmbeddingTransport* transport) {
    if (cfg.batch_size < 1) {
        throw UsageError("embed_texts: batch_size must be >= 1");
    }
    std::vector<Sha256Digest> keys;
    keys.reserve(texts.size());
    for (const auto& text : texts) keys.push_back(cache_key(cfg.model_name, text));

    // Unique missing texts, first-occurrence order.
    std::vector<std::string> missing;
    std::unordered_map<std::string, std::size_t> missing_slot;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (cache.find(keys[i]) != nullptr) continue;
        std::string hex = to_hex(keys[i]);
        if (missing_slot.emplace(hex, missing.size()).second) {
            missing.push_back(texts[i]);
        }
    }

    if (!missing.empty() && transport == nullptr) {
        throw ProviderError("no provider configured and " + std::to_string(missing.size()) +
                            " texts are not cached");
    }

    SplitMix64 jitter(cfg.jitter_seed);
    for (std::size_t begin = 0; begin < missing.size(); begin += cfg.batch_size) {
        std::size_t end = std::min(missing.size(), begin + cfg.batch_size);
        std::vector<std::string> batch(missing.begin() + static_cast<std::ptrdiff_t>(begin),
                                       missing.begin() + static_cast<std::ptrdiff_t>(end));

        TransportResult result;
        unsigned attempt = 0;
        while (true) {
            result = transport->fetch(cfg.model_name, batch);
            if (result.status == TransportResult::Status::ok) break;
            if (result.status == TransportResult::Status::fatal) {
                throw ProviderError("provider failure: " + result.error);
            }
            if (attempt >= cfg.max_retries) {
                throw ProviderError("provider failure after " + std::to_string(attempt + 1) +
                                    " attempts: " + result.error);
            }
            if (cfg.sleep_on_retry) {
                // Exponential backoff with jitter in [0, base).
                std::uint64_t wait = cfg.backoff_base_ms * (1ULL << attempt) +
                                     jitter.next_below(std::max(1u, cfg.backoff_base_ms));
                std::this_thread::sleep_for(std::chrono::milliseconds(wait));
            }
            ++attempt;
        }

        if (result.vectors.size() != batch.size()) {
            throw ProviderError("provider returned " + std::to_string(result.vectors.size()) +
                                " vectors for " + std::to_string(batch.size()) + " inputs");
        }
        for (std::size_t i = 0; i < batch.size(); ++i) {
            check_finite_vector(result.vectors[i], "provider vector");
            EmbeddingRecord rec;
            rec.text_hash = cache_key(cfg.model_name, batch[i]);
            rec.model_name = cfg.model_name;
            rec.vector = std::move(result.vectors[i]);
            cache.append(rec);
        }
    }

    // Assemble rows by input index from the (now complete) cache.
    std::size_t dim = 0;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const EmbeddingRecord* rec = cache.find(keys[i]);
        if (rec == nullptr) {
            throw ProviderError("text " + std::to_string(i) + " missing after fetch");
        }
        if (dim == 0) {
            dim = rec->vector.size();
        } else if (rec->vector.size() != dim) {
            throw ProviderError("dimension mismatch: text " + std::to_string(i) + " has " +
                                std::to_string(rec->vector.size()) + ", expected " +
                                std::to_string(dim));
        }
    }
    EmbeddingMatrix out(texts.size(), dim);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const EmbeddingRecord* rec = cache.find(keys[i]);
        std::copy(rec->vector.begin(), rec->vector.end(), out.row(i).begin());
    }
    return out;
}

EmbeddingMatrix load_vectors(const std::string& path) {
    auto bytes = wire::read_file(path);
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), "PCARVIDX", 8) == 0) {
        return store::decode_index(bytes, path).to_matrix();
    }

    // JSONL fallback: one {"id": ..., "vector": [...]} object per line.
    std::string text(bytes.begin(), bytes.end());
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::vector<double>> rows;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ": line " + std::to_string(line_no) + ": invalid json: " +
                            e.what());
        }
        std::vector<double> vec;
        try {
            vec = obj.at("vector").get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
        if (dim == 0 && !rows.empty()) {
            dim = rows.front().size();
        }
        if (!rows.empty() && vec.size() != rows.front().size()) {
            throw DataError(path + ": line " + std::to_string(line_no) + ": vector has " +
                            std::to_string(vec.size()) + " dims, previous rows have " +
                            std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(vec));
    }
    if (rows.empty()) {
        throw DataError(path + ": no vectors");
    }
    dim = rows.front().size();
    EmbeddingMatrix out(rows.size(), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            if (!std::isfinite(rows[i][j])) {
                throw DataError(path + ": non-finite value at row " + std::to_string(i));
            }
            out(i, j) = rows[i][j];
        }
    }
    return out;
}

} // namespace pcaret::embed
