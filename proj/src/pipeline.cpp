#include "pcaret/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <unordered_map>

#include "pcaret/embed_client.hpp"
#include "pcaret/errors.hpp"
#include "pcaret/manifest.hpp"
#include "pcaret/metrics.hpp"
#include "pcaret/pca.hpp"
#include "pcaret/rng.hpp"
#include "pcaret/store.hpp"
#include "pcaret/wire.hpp"

namespace pcaret::pipeline {

namespace {

namespace fs = std::filesystem;

void write_text(const std::string& path, const std::string& text) {
    wire::write_file_atomic(path, std::span<const std::uint8_t>(
                                      reinterpret_cast<const std::uint8_t*>(text.data()),
                                      text.size()));
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Rows of E belonging to the given subset, located by pair id.
std::vector<std::size_t> subset_rows(const dataset::PairDataset& full,
                                     const dataset::PairDataset& subset) {
    std::unordered_map<std::uint64_t, std::size_t> id_to_row;
    id_to_row.reserve(full.size());
    for (std::size_t i = 0; i < full.size(); ++i) id_to_row[full.pairs[i].id] = i;
    std::vector<std::size_t> rows;
    rows.reserve(subset.size());
    for (const auto& pair : subset.pairs) {
        auto it = id_to_row.find(pair.id);
        if (it == id_to_row.end()) {
            throw DataError("subset pair id " + std::to_string(pair.id) +
                            " missing from full dataset");
        }
        rows.push_back(it->second);
    }
    return rows;
}

EmbeddingMatrix take_rows(const EmbeddingMatrix& E, const std::vector<std::size_t>& rows) {
    EmbeddingMatrix out(rows.size(), E.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto src = E.row(rows[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

EmbeddingMatrix stack(const EmbeddingMatrix& A, const EmbeddingMatrix& B) {
    EmbeddingMatrix out(A.rows() + B.rows(), A.cols());
    std::copy(A.data().begin(), A.data().end(), out.data().begin());
    std::copy(B.data().begin(), B.data().end(),
              out.data().begin() + static_cast<std::ptrdiff_t>(A.data().size()));
    return out;
}

std::vector<double> scores_of(const dataset::PairDataset& ds) {
    std::vector<double> out;
    out.reserve(ds.size());
    for (const auto& pair : ds.pairs) out.push_back(pair.score);
    return out;
}

} // namespace

std::pair<EmbeddingMatrix, EmbeddingMatrix>
synthetic_pair_embeddings(const dataset::PairDataset& ds, std::size_t dim,
                          std::uint64_t seed) {
    EmbeddingMatrix E1(ds.size(), dim);
    EmbeddingMatrix E2(ds.size(), dim);
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        double s = ds.pairs[i].score;
        auto r1 = E1.row(i);
        auto r2 = E2.row(i);
        for (std::size_t j = 0; j < dim; ++j) r1[j] = rng.next_gaussian();
        for (std::size_t j = 0; j < dim; ++j) {
            double noise = rng.next_gaussian();
            r2[j] = s * r1[j] + (1.0 - s) * noise;
        }
    }
    return {std::move(E1), std::move(E2)};
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.out_dir.empty()) {
        throw UsageError("an output directory is required");
    }
    fs::create_directories(cfg.out_dir);
    auto out_path = [&](const std::string& name) {
        return (fs::path(cfg.out_dir) / name).string();
    };

    manifest::Builder mf(cfg.run_bench ? "pipeline" : "eval", cfg.seed);
    nlohmann::json config{
        {"dataset", cfg.dataset_path},
        {"format", cfg.format == dataset::FileFormat::csv ? "csv" : "jsonl"},
        {"score_scale", {cfg.source_scale.lo, cfg.source_scale.hi}},
        {"vectors1", cfg.vectors1_path},
        {"vectors2", cfg.vectors2_path},
        {"synthetic_dim", cfg.synthetic_dim},
        {"k", cfg.k},
        {"variance_threshold",
         cfg.variance_threshold ? nlohmann::json(*cfg.variance_threshold) : nlohmann::json()},
        {"seed", cfg.seed},
        {"train_fraction", cfg.train_fraction},
        {"regression_split",
         cfg.regression_split == eval::RegressionSplit::test
             ? "test"
             : (cfg.regression_split == eval::RegressionSplit::train ? "train" : "all")},
        {"histogram_bins", cfg.histogram_bins},
        {"run_bench", cfg.run_bench},
        {"bench",
         {{"warmup_iters", cfg.bench.warmup_iters},
          {"measured_iters", cfg.bench.measured_iters},
          {"pair_count", cfg.bench.pair_count},
          {"dims_full", cfg.bench.dims_full},
          {"dims_pca", cfg.bench.dims_pca},
          {"seed", cfg.bench.seed},
          {"threads", cfg.bench.threads}}},
        {"kernel_backend", kernels::active_table().name},
    };
    mf.set_config(config);

    // Ingest.
    dataset::PairDataset raw = dataset::load_pairs(cfg.dataset_path, cfg.format,
                                                   cfg.source_scale);
    mf.add_input("dataset", cfg.dataset_path);
    dataset::PairDataset ds = dataset::normalize_scores(raw);
    dataset::save_pairs_csv(ds, out_path("dataset_normalized.csv"));

    // Embeddings.
    EmbeddingMatrix E1, E2;
    if (!cfg.vectors1_path.empty() || !cfg.vectors2_path.empty()) {
        if (cfg.vectors1_path.empty() || cfg.vectors2_path.empty()) {
            throw UsageError("both vector files are required when one is given");
        }
        E1 = embed::load_vectors(cfg.vectors1_path);
        E2 = embed::load_vectors(cfg.vectors2_path);
        mf.add_input("vectors1", cfg.vectors1_path);
        mf.add_input("vectors2", cfg.vectors2_path);
        if (E1.rows() != ds.size() || E2.rows() != ds.size()) {
            throw DataError("vector files must be row-aligned with the dataset (" +
                            std::to_string(ds.size()) + " pairs, got " +
                            std::to_string(E1.rows()) + " and " + std::to_string(E2.rows()) +
                            ")");
        }
        if (E1.cols() != E2.cols()) {
            throw DataError("vector files disagree on dimensionality");
        }
    } else {
        std::tie(E1, E2) = synthetic_pair_embeddings(ds, cfg.synthetic_dim, cfg.seed);
    }
    const std::size_t dim = E1.cols();

    // Split.
    auto [train_ds, test_ds] = dataset::split(ds, {cfg.seed, cfg.train_fraction});
    auto train_rows = subset_rows(ds, train_ds);
    auto test_rows = subset_rows(ds, test_ds);

    // Fit standardizer + PCA on the train sentences only.
    EmbeddingMatrix train_stack = stack(take_rows(E1, train_rows), take_rows(E2, train_rows));
    pca::Standardizer scaler = pca::fit_standardizer(train_stack);
    EmbeddingMatrix train_std = pca::standardize(scaler, train_stack);
    pca::PcaModel full_model = pca::fit_pca(train_std);

    std::size_t chosen_k;
    if (cfg.variance_threshold) {
        chosen_k = pca::select_components(full_model, *cfg.variance_threshold);
    } else {
        if (cfg.k < 1 || cfg.k > full_model.num_components) {
            throw DataError("requested k " + std::to_string(cfg.k) +
                            " out of range [1, " +
                            std::to_string(full_model.num_components) + "]");
        }
        chosen_k = cfg.k;
    }
    pca::PcaModel model = pca::truncated(full_model, chosen_k);
    store::save_model(model, scaler, out_path("model.bin"));

    // Variance curve and threshold ladder from the full spectrum.
    {
        std::string curve = "component,cumulative_ratio\n";
        for (const auto& [idx, ratio] : pca::variance_curve(full_model)) {
            curve += std::to_string(idx) + "," + fmt(ratio) + "\n";
        }
        write_text(out_path("variance_curve.csv"), curve);

        std::string ladder = "threshold,components\n";
        for (double t : {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}) {
            try {
                ladder += fmt(t) + "," + std::to_string(pca::select_components(full_model, t)) +
                          "\n";
            } catch (const DataError&) {
                break; // remaining thresholds are unreachable too
            }
        }
        write_text(out_path("variance_ladder.csv"), ladder);
    }

    // Project all sentences into the PCA space.
    EmbeddingMatrix P1 = pca::transform(model, pca::standardize(scaler, E1));
    EmbeddingMatrix P2 = pca::transform(model, pca::standardize(scaler, E2));

    // Metric columns on both splits.
    std::vector<eval::MetricColumn> columns;
    for (Space space : {Space::full, Space::pca}) {
        const EmbeddingMatrix& A = space == Space::full ? E1 : P1;
        const EmbeddingMatrix& B = space == Space::full ? E2 : P2;
        for (metrics::MetricKind kind : metrics::kAllMetricKinds) {
            std::vector<double> all = metrics::pairwise_metric(A, B, kind);
            eval::MetricColumn col;
            col.kind = kind;
            col.space = space;
            col.train_values.reserve(train_rows.size());
            col.test_values.reserve(test_rows.size());
            for (std::size_t r : train_rows) col.train_values.push_back(all[r]);
            for (std::size_t r : test_rows) col.test_values.push_back(all[r]);
            columns.push_back(std::move(col));
        }
    }
    // Canonical row order: full space first, similarities before norms
    // (already produced in that order above).

    std::vector<double> train_scores = scores_of(train_ds);
    std::vector<double> test_scores = scores_of(test_ds);

    eval::EvalReport report = eval::build_report(train_scores, test_scores, columns);
    auto regressions =
        eval::build_regressions(train_scores, test_scores, columns, cfg.regression_split);

    write_text(out_path("eval_report.csv"), eval::report_csv(report));
    write_text(out_path("regression.csv"), eval::regression_csv(regressions));

    // Per-pair metric values on the test split.
    {
        std::vector<std::uint64_t> test_ids;
        test_ids.reserve(test_ds.size());
        for (const auto& pair : test_ds.pairs) test_ids.push_back(pair.id);
        std::string csv;
        bool first = true;
        for (const auto& col : columns) {
            csv += metrics::pairwise_csv(test_ids, col.test_values, col.kind, col.space, first);
            first = false;
        }
        write_text(out_path("pairwise.csv"), csv);
    }

    // Distributions: raw metric values and absolute errors vs score.
    {
        std::string raw_csv = "metric,space,bin_lo,bin_hi,count\n";
        std::string err_csv = "metric,space,bin_lo,bin_hi,count\n";
        for (const auto& col : columns) {
            eval::Histogram hr =
                eval::histogram(col.test_values, {cfg.histogram_bins, std::nullopt});
            std::vector<double> abs_err(col.test_values.size());
            for (std::size_t i = 0; i < abs_err.size(); ++i) {
                abs_err[i] = std::fabs(col.test_values[i] - test_scores[i]);
            }
            eval::Histogram he = eval::histogram(abs_err, {cfg.histogram_bins, std::nullopt});
            auto emit = [&](std::string& dst, const eval::Histogram& h) {
                const double width =
                    (h.hi - h.lo) / static_cast<double>(h.counts.size());
                for (std::size_t i = 0; i < h.counts.size(); ++i) {
                    double lo = h.lo + width * static_cast<double>(i);
                    double hi = i + 1 == h.counts.size() ? h.hi : lo + width;
                    dst += std::string(metrics::to_string(col.kind)) + "," +
                           to_string(col.space) + "," + fmt(lo) + "," + fmt(hi) + "," +
                           std::to_string(h.counts[i]) + "\n";
                }
            };
            emit(raw_csv, hr);
            emit(err_csv, he);
        }
        write_text(out_path("hist_raw.csv"), raw_csv);
        write_text(out_path("hist_abs_error.csv"), err_csv);
    }

    // Rank-vs-rank pairs against the score, for QQ-style plots.
    {
        std::string qq = "metric,space,rank_metric,rank_score\n";
        for (const auto& col : columns) {
            auto points = eval::qq_ranks(col.test_values, test_scores);
            for (const auto& [rm, rs] : points) {
                qq += std::string(metrics::to_string(col.kind)) + "," + to_string(col.space) +
                      "," + fmt(rm) + "," + fmt(rs) + "\n";
            }
        }
        write_text(out_path("qq.csv"), qq);
    }

    // Correlation heatmaps (raw and ranked) over metric columns + score.
    {
        std::vector<eval::NamedColumn> named;
        for (const auto& col : columns) {
            named.push_back({metrics::display_name(col.kind, col.space), col.test_values});
        }
        named.push_back({"Score", test_scores});
        write_text(out_path("corr_raw.csv"),
                   eval::correlation_csv(
                       eval::correlation_matrix(named, eval::CorrelationMode::raw)));
        write_text(out_path("corr_ranked.csv"),
                   eval::correlation_csv(
                       eval::correlation_matrix(named, eval::CorrelationMode::ranked)));
    }

    // Index storage accounting over every sentence vector (two per pair).
    {
        std::vector<std::uint64_t> vec_ids;
        vec_ids.reserve(2 * ds.size());
        for (const auto& pair : ds.pairs) vec_ids.push_back(2 * pair.id);
        for (const auto& pair : ds.pairs) vec_ids.push_back(2 * pair.id + 1);
        store::VectorIndex index_full =
            store::make_index(vec_ids, stack(E1, E2), store::ScalarKind::f32);
        store::VectorIndex index_pca =
            store::make_index(vec_ids, stack(P1, P2), store::ScalarKind::f32);
        store::save_index(index_full, out_path("index_full.vidx"));
        store::save_index(index_pca, out_path("index_pca.vidx"));

        bench::IndexMemory mf_full = bench::index_memory(index_full);
        bench::IndexMemory mf_pca = bench::index_memory(index_pca);
        std::string csv =
            "space,rows,dim,scalar_kind,payload_bytes,id_bytes,header_bytes,total_bytes,"
            "payload_ratio,total_ratio\n";
        char buf[256];
        std::snprintf(buf, sizeof(buf), "full,%zu,%zu,f32,%zu,%zu,%zu,%zu,1,1\n",
                      index_full.rows(), static_cast<std::size_t>(index_full.dim),
                      mf_full.payload_bytes, mf_full.id_bytes, mf_full.header_bytes,
                      mf_full.total_bytes);
        csv += buf;
        std::snprintf(buf, sizeof(buf), "pca,%zu,%zu,f32,%zu,%zu,%zu,%zu,%s,%s\n",
                      index_pca.rows(), static_cast<std::size_t>(index_pca.dim),
                      mf_pca.payload_bytes, mf_pca.id_bytes, mf_pca.header_bytes,
                      mf_pca.total_bytes,
                      fmt(static_cast<double>(mf_full.payload_bytes) /
                          static_cast<double>(mf_pca.payload_bytes))
                          .c_str(),
                      fmt(static_cast<double>(mf_full.total_bytes) /
                          static_cast<double>(mf_pca.total_bytes))
                          .c_str());
        csv += buf;
        write_text(out_path("storage.csv"), csv);
    }

    // Kernel benchmarks on synthetic vectors (dims default to the
    // experiment's own full/pca dimensionality).
    if (cfg.run_bench) {
        bench::BenchConfig bcfg = cfg.bench;
        if (bcfg.dims_full == 0) bcfg.dims_full = dim;
        if (bcfg.dims_pca == 0) bcfg.dims_pca = chosen_k;
        auto reports = bench::bench_suite(bcfg);
        write_text(out_path("bench.csv"), bench::bench_csv(reports));
        write_text(out_path("bench_checksums.csv"), bench::bench_checksum_csv(reports));
        if (!cfg.quiet) {
            std::cout << bench::bench_table(reports);
        }
        mf.add_output("bench_csv", out_path("bench.csv"), /*is_volatile=*/true);
        mf.add_output("bench_checksums", out_path("bench_checksums.csv"));
    }

    for (const char* name :
         {"dataset_normalized.csv", "model.bin", "variance_curve.csv", "variance_ladder.csv",
          "eval_report.csv", "regression.csv", "pairwise.csv", "hist_raw.csv",
          "hist_abs_error.csv", "qq.csv", "corr_raw.csv", "corr_ranked.csv",
          "index_full.vidx", "index_pca.vidx", "storage.csv"}) {
        mf.add_output(name, out_path(name));
    }
    mf.write(out_path("manifest.json"));

    if (!cfg.quiet) {
        std::cout << "selected components: " << chosen_k << " of "
                  << full_model.num_components << " (cumulative ratio "
                  << (chosen_k > 0 ? model.cumulative_ratio.back() : 0.0) << ")\n"
                  << eval::report_table(report) << "\n"
                  << eval::regression_table(regressions);
    }

    ExperimentResult result;
    result.chosen_k = chosen_k;
    result.train_pairs = train_ds.size();
    result.test_pairs = test_ds.size();
    result.report = report;
    return result;
}

} // namespace pcaret::pipeline
