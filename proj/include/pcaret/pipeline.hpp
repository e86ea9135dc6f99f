#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "pcaret/bench.hpp"
#include "pcaret/dataset.hpp"
#include "pcaret/eval.hpp"
#include "pcaret/types.hpp"

namespace pcaret::pipeline {

// One experiment: ingest pairs, obtain embeddings, fit the compressor
// on the train split, evaluate every metric in both spaces on the test
// split, account index storage, and optionally run the kernel
// benchmarks. All stages share one root seed.
struct ExperimentConfig {
    // dataset
    std::string dataset_path;
    dataset::FileFormat format = dataset::FileFormat::csv;
    dataset::ScoreScale source_scale{0.0, 1.0};

    // embeddings: precomputed vector files row-aligned with the
    // dataset, or deterministic synthetic vectors when absent.
    std::string vectors1_path;
    std::string vectors2_path;
    std::size_t synthetic_dim = 64;

    // component selection: exactly one of the two drives the model.
    std::size_t k = 110;
    std::optional<double> variance_threshold;

    // split
    std::uint64_t seed = 42;
    double train_fraction = 0.5;

    // evaluation
    eval::RegressionSplit regression_split = eval::RegressionSplit::test;
    std::size_t histogram_bins = 30;

    // benchmark (skipped when run_bench is false)
    bool run_bench = true;
    bench::BenchConfig bench;

    std::string out_dir;
    bool quiet = false; // suppress stdout tables
};

struct ExperimentResult {
    std::size_t chosen_k = 0;
    std::size_t train_pairs = 0;
    std::size_t test_pairs = 0;
    eval::EvalReport report;
};

// Synthetic sentence-pair embeddings whose cosine similarity trends
// with the annotated score: the second vector mixes the first with
// score-weighted noise. Deterministic in (dataset order, dim, seed).
std::pair<EmbeddingMatrix, EmbeddingMatrix>
synthetic_pair_embeddings(const dataset::PairDataset& ds, std::size_t dim,
                          std::uint64_t seed);

// Runs the full experiment, writing every artifact plus manifest.json
// into cfg.out_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

} // namespace pcaret::pipeline
