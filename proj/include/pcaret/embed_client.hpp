#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "pcaret/hash.hpp"
#include "pcaret/types.hpp"

namespace pcaret::embed {

// One cached embedding: content hash of (model name, exact text
// bytes), the vector as returned by the provider, and the model that
// produced it.
struct EmbeddingRecord {
    Sha256Digest text_hash{};
    std::string model_name;
    std::vector<double> vector;
};

Sha256Digest cache_key(const std::string& model_name, const std::string& text);

struct ProviderConfig {
    std::string endpoint;                        // OpenAI-compatible embeddings URL
    std::string model_name = "text-embedding-3-large";
    std::string api_key_env = "PCARET_API_KEY";  // key is read from this variable
    std::size_t batch_size = 64;
    unsigned max_retries = 4;
    unsigned backoff_base_ms = 250;
    std::uint64_t jitter_seed = 0;
    bool sleep_on_retry = true; // tests disable to avoid real waits
};

// Outcome of one transport round trip. rate_limited and transient are
// retried with backoff; fatal aborts immediately.
struct TransportResult {
    enum class Status { ok, rate_limited, transient, fatal };
    Status status = Status::fatal;
    std::string error;
    std::vector<std::vector<double>> vectors; // one per input, input order
};

class EmbeddingTransport {
public:
    virtual ~EmbeddingTransport() = default;
    virtual TransportResult fetch(const std::string& model,
                                  const std::vector<std::string>& batch) = 0;
};

// HTTP POST {"model": ..., "input": [...]} against an
// OpenAI-compatible endpoint; bearer auth from the configured
// environment variable.
std::unique_ptr<EmbeddingTransport> make_http_transport(const ProviderConfig& cfg);

// Append-only on-disk cache of EmbeddingRecords, hash-keyed. Readers
// may share an instance; appends are serialized internally.
class EmbedCache {
public:
    // Loads the file if it exists; a missing file is an empty cache.
    explicit EmbedCache(std::string path);

    const EmbeddingRecord* find(const Sha256Digest& key) const;
    void append(const EmbeddingRecord& record);
    std::size_t size() const { return records_.size(); }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    mutable std::mutex write_mutex_;
    std::unordered_map<std::string, EmbeddingRecord> records_; // keyed by hex hash
};

// Embeds texts[i] into row i, serving from the cache where possible
// and fetching the rest in batches through the transport. A null
// transport is valid when every text is already cached.
EmbeddingMatrix embed_texts(const std::vector<std::string>& texts, const ProviderConfig& cfg,
                            EmbedCache& cache, EmbeddingTransport* transport);

// Precomputed vectors: either a vector-index file or JSONL lines of
// {"id": ..., "vector": [...]}. Row order is file order.
EmbeddingMatrix load_vectors(const std::string& path);

} // namespace pcaret::embed
