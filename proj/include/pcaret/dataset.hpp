#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pcaret::dataset {

struct SentencePair {
    std::uint64_t id = 0;
    std::string sentence1;
    std::string sentence2;
    double score = 0.0; // in [0,1] once normalized
};

struct ScoreScale {
    double lo = 0.0;
    double hi = 1.0;
};

struct PairDataset {
    std::vector<SentencePair> pairs;
    ScoreScale source_scale;

    std::size_t size() const { return pairs.size(); }
};

enum class FileFormat { csv, jsonl };

FileFormat format_from_name(const std::string& name);

// Loads scored sentence pairs from CSV (header row, case-insensitive
// column names sentence1, sentence2, score and optional id) or JSONL
// (one object per line with the same keys). Missing ids are assigned
// in file order. Scores must lie within the declared source scale.
PairDataset load_pairs(const std::string& path, FileFormat format,
                       ScoreScale source_scale = {0.0, 1.0});

// Affine map of every score onto [0,1]; idempotent once the scale is
// already [0,1].
PairDataset normalize_scores(const PairDataset& ds);

struct SplitSpec {
    std::uint64_t seed = 0;
    double train_fraction = 0.5;
};

// Deterministic pair-level split: |train| = round(fraction * N), the
// same (dataset, seed, fraction) always yields the same member sets.
std::pair<PairDataset, PairDataset> split(const PairDataset& ds, const SplitSpec& spec);

// Canonical CSV serialization (id,sentence1,sentence2,score).
void save_pairs_csv(const PairDataset& ds, const std::string& path);

} // namespace pcaret::dataset
