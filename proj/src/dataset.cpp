#include "pcaret/dataset.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "pcaret/csv.hpp"
#include "pcaret/errors.hpp"
#include "pcaret/rng.hpp"
#include "pcaret/wire.hpp"

namespace pcaret::dataset {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_score(const std::string& text, std::size_t line) {
    std::string t = trim(text);
    if (t.empty()) {
        throw DataError("row at line " + std::to_string(line) + ": empty score");
    }
    char* end = nullptr;
    double value = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(value)) {
        throw DataError("row at line " + std::to_string(line) + ": unparsable score '" + t +
                        "'");
    }
    return value;
}

void check_pair(SentencePair& pair, const ScoreScale& scale, std::size_t line) {
    pair.sentence1 = trim(pair.sentence1);
    pair.sentence2 = trim(pair.sentence2);
    if (pair.sentence1.empty() || pair.sentence2.empty()) {
        throw DataError("row at line " + std::to_string(line) + ": empty sentence");
    }
    if (pair.score < scale.lo || pair.score > scale.hi) {
        throw DataError("row at line " + std::to_string(line) + ": score " +
                        std::to_string(pair.score) + " outside declared scale [" +
                        std::to_string(scale.lo) + ", " + std::to_string(scale.hi) + "]");
    }
}

PairDataset load_csv(const std::string& text, const ScoreScale& scale) {
    auto records = parse_csv(text);
    if (records.empty()) {
        throw DataError("no records");
    }
    const auto& header = records.front();
    int col_s1 = -1, col_s2 = -1, col_score = -1, col_id = -1;
    for (std::size_t i = 0; i < header.fields.size(); ++i) {
        std::string name = lower(trim(header.fields[i]));
        if (name == "sentence1") col_s1 = static_cast<int>(i);
        else if (name == "sentence2") col_s2 = static_cast<int>(i);
        else if (name == "score") col_score = static_cast<int>(i);
        else if (name == "id") col_id = static_cast<int>(i);
    }
    if (col_s1 < 0 || col_s2 < 0 || col_score < 0) {
        throw DataError("csv header must name sentence1, sentence2 and score columns");
    }

    PairDataset ds;
    ds.source_scale = scale;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        std::size_t needed = static_cast<std::size_t>(
            std::max({col_s1, col_s2, col_score, col_id}) + 1);
        if (rec.fields.size() < needed) {
            throw DataError("row at line " + std::to_string(rec.line) + ": expected " +
                            std::to_string(needed) + " fields, got " +
                            std::to_string(rec.fields.size()));
        }
        SentencePair pair;
        pair.sentence1 = rec.fields[static_cast<std::size_t>(col_s1)];
        pair.sentence2 = rec.fields[static_cast<std::size_t>(col_s2)];
        pair.score = parse_score(rec.fields[static_cast<std::size_t>(col_score)], rec.line);
        if (col_id >= 0) {
            const std::string id_text = trim(rec.fields[static_cast<std::size_t>(col_id)]);
            try {
                pair.id = std::stoull(id_text);
            } catch (const std::exception&) {
                throw DataError("row at line " + std::to_string(rec.line) +
                                ": unparsable id '" + id_text + "'");
            }
        } else {
            pair.id = ds.pairs.size();
        }
        check_pair(pair, scale, rec.line);
        ds.pairs.push_back(std::move(pair));
    }
    if (ds.pairs.empty()) {
        throw DataError("no records");
    }
    return ds;
}

PairDataset load_jsonl(const std::string& text, const ScoreScale& scale) {
    PairDataset ds;
    ds.source_scale = scale;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("row at line " + std::to_string(line_no) + ": invalid json: " +
                            e.what());
        }
        if (!obj.is_object() || !obj.contains("sentence1") || !obj.contains("sentence2") ||
            !obj.contains("score")) {
            throw DataError("row at line " + std::to_string(line_no) +
                            ": object must carry sentence1, sentence2, score");
        }
        SentencePair pair;
        try {
            pair.sentence1 = obj.at("sentence1").get<std::string>();
            pair.sentence2 = obj.at("sentence2").get<std::string>();
            pair.score = obj.at("score").get<double>();
            pair.id = obj.contains("id") ? obj.at("id").get<std::uint64_t>() : ds.pairs.size();
        } catch (const nlohmann::json::exception& e) {
            throw DataError("row at line " + std::to_string(line_no) + ": " + e.what());
        }
        check_pair(pair, scale, line_no);
        ds.pairs.push_back(std::move(pair));
    }
    if (ds.pairs.empty()) {
        throw DataError("no records");
    }
    return ds;
}

void check_unique_ids(const PairDataset& ds) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(ds.pairs.size());
    for (const auto& pair : ds.pairs) {
        if (!seen.insert(pair.id).second) {
            throw DataError("duplicate pair id " + std::to_string(pair.id));
        }
    }
}

} // namespace

FileFormat format_from_name(const std::string& name) {
    std::string n = lower(name);
    if (n == "csv") return FileFormat::csv;
    if (n == "jsonl") return FileFormat::jsonl;
    throw UsageError("unknown dataset format '" + name + "' (expected csv or jsonl)");
}

PairDataset load_pairs(const std::string& path, FileFormat format, ScoreScale source_scale) {
    if (!(source_scale.hi > source_scale.lo)) {
        throw UsageError("degenerate score scale [" + std::to_string(source_scale.lo) + ", " +
                         std::to_string(source_scale.hi) + "]");
    }
    auto bytes = wire::read_file(path);
    std::string text(bytes.begin(), bytes.end());
    PairDataset ds = format == FileFormat::csv ? load_csv(text, source_scale)
                                               : load_jsonl(text, source_scale);
    check_unique_ids(ds);
    return ds;
}

PairDataset normalize_scores(const PairDataset& ds) {
    const double lo = ds.source_scale.lo;
    const double hi = ds.source_scale.hi;
    if (!(hi > lo)) {
        throw DataError("normalize_scores: degenerate scale [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    }
    PairDataset out = ds;
    for (auto& pair : out.pairs) {
        pair.score = (pair.score - lo) / (hi - lo);
    }
    out.source_scale = {0.0, 1.0};
    return out;
}

std::pair<PairDataset, PairDataset> split(const PairDataset& ds, const SplitSpec& spec) {
    const std::size_t n = ds.size();
    if (n < 2) {
        throw DataError("split: need at least 2 pairs, got " + std::to_string(n));
    }
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw DataError("split: train_fraction must be in (0,1), got " +
                        std::to_string(spec.train_fraction));
    }
    const std::size_t n_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n) {
        throw DataError("split: fraction " + std::to_string(spec.train_fraction) +
                        " yields an empty partition for " + std::to_string(n) + " pairs");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    SplitMix64 rng(spec.seed);
    deterministic_shuffle(order, rng);

    std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    // Keep file order inside each half so rows stay aligned with any
    // per-pair embedding matrices derived later.
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    PairDataset train, test;
    train.source_scale = ds.source_scale;
    test.source_scale = ds.source_scale;
    train.pairs.reserve(train_idx.size());
    test.pairs.reserve(test_idx.size());
    for (std::size_t i : train_idx) train.pairs.push_back(ds.pairs[i]);
    for (std::size_t i : test_idx) test.pairs.push_back(ds.pairs[i]);
    return {std::move(train), std::move(test)};
}

void save_pairs_csv(const PairDataset& ds, const std::string& path) {
    std::string out = "id,sentence1,sentence2,score\n";
    char buf[64];
    for (const auto& pair : ds.pairs) {
        std::snprintf(buf, sizeof(buf), "%.17g", pair.score);
        out += csv_join({std::to_string(pair.id), pair.sentence1, pair.sentence2, buf});
        out.push_back('\n');
    }
    wire::write_file_atomic(path, std::span<const std::uint8_t>(
                                      reinterpret_cast<const std::uint8_t*>(out.data()),
                                      out.size()));
}

} // namespace pcaret::dataset
