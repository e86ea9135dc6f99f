// pcaret: PCA compression and retrieval-quality evaluation for sentence
// embeddings. Subcommands cover each pipeline stage (ingest, embed,
// fit, transform, index, eval, bench, describe) plus an end-to-end
// `pipeline` run. Exit codes: 0 ok, 1 usage, 2 data, 3 provider.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "pcaret/bench.hpp"
#include "pcaret/dataset.hpp"
#include "pcaret/embed_client.hpp"
#include "pcaret/errors.hpp"
#include "pcaret/eval.hpp"
#include "pcaret/kernels.hpp"
#include "pcaret/manifest.hpp"
#include "pcaret/metrics.hpp"
#include "pcaret/pca.hpp"
#include "pcaret/pipeline.hpp"
#include "pcaret/store.hpp"
#include "pcaret/wire.hpp"

namespace fs = std::filesystem;
using namespace pcaret;

namespace {

dataset::ScoreScale parse_scale(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw UsageError("score scale must be lo:hi, got '" + text + "'");
    }
    try {
        return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw UsageError("unparsable score scale '" + text + "'");
    }
}

dataset::FileFormat resolve_format(const std::string& format, const std::string& path) {
    if (format == "csv" || format == "jsonl") return dataset::format_from_name(format);
    if (format == "auto") {
        if (path.ends_with(".csv")) return dataset::FileFormat::csv;
        if (path.ends_with(".jsonl") || path.ends_with(".ndjson")) {
            return dataset::FileFormat::jsonl;
        }
        throw UsageError("cannot infer dataset format from '" + path +
                         "'; pass --format csv|jsonl");
    }
    throw UsageError("unknown format '" + format + "'");
}

store::ScalarKind parse_scalar(const std::string& name) {
    if (name == "f32") return store::ScalarKind::f32;
    if (name == "f64") return store::ScalarKind::f64;
    throw UsageError("unknown scalar kind '" + name + "' (expected f32 or f64)");
}

// Vectors plus row ids: index files keep their own ids, JSONL rows get
// file order.
std::pair<EmbeddingMatrix, std::vector<std::uint64_t>> load_vectors_with_ids(
    const std::string& path) {
    auto bytes = wire::read_file(path);
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), "PCARVIDX", 8) == 0) {
        store::VectorIndex index = store::decode_index(bytes, path);
        return {index.to_matrix(), index.ids};
    }
    EmbeddingMatrix m = embed::load_vectors(path);
    std::vector<std::uint64_t> ids(m.rows());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    return {std::move(m), std::move(ids)};
}

struct CommonDataOpts {
    std::string input;
    std::string format = "auto";
    std::string scale = "0:1";
};

void add_dataset_options(CLI::App* cmd, CommonDataOpts& opts) {
    cmd->add_option("--input", opts.input, "scored sentence-pair file")->required();
    cmd->add_option("--format", opts.format, "csv|jsonl|auto (default: by extension)");
    cmd->add_option("--scale", opts.scale, "declared source score range lo:hi");
}

int cmd_ingest(const CommonDataOpts& data, const std::string& output) {
    auto format = resolve_format(data.format, data.input);
    auto ds = dataset::load_pairs(data.input, format, parse_scale(data.scale));
    auto normalized = dataset::normalize_scores(ds);
    dataset::save_pairs_csv(normalized, output);

    manifest::Builder mf("ingest", 0);
    mf.set_config({{"input", data.input},
                   {"format", data.format},
                   {"scale", data.scale},
                   {"output", output}});
    mf.add_input("dataset", data.input);
    mf.add_output("normalized", output);
    mf.write(output + ".manifest.json");
    std::cout << "ingested " << normalized.size() << " pairs -> " << output << "\n";
    return 0;
}

int cmd_embed(const CommonDataOpts& data, const embed::ProviderConfig& provider,
              const std::string& cache_path, const std::string& out_s1,
              const std::string& out_s2, const std::string& scalar) {
    auto format = resolve_format(data.format, data.input);
    auto ds = dataset::normalize_scores(
        dataset::load_pairs(data.input, format, parse_scale(data.scale)));

    std::vector<std::string> texts1, texts2;
    std::vector<std::uint64_t> ids;
    for (const auto& pair : ds.pairs) {
        texts1.push_back(pair.sentence1);
        texts2.push_back(pair.sentence2);
        ids.push_back(pair.id);
    }

    embed::EmbedCache cache(cache_path);
    std::unique_ptr<embed::EmbeddingTransport> transport;
    if (!provider.endpoint.empty()) {
        transport = embed::make_http_transport(provider);
    }
    EmbeddingMatrix E1 = embed::embed_texts(texts1, provider, cache, transport.get());
    EmbeddingMatrix E2 = embed::embed_texts(texts2, provider, cache, transport.get());

    auto kind = parse_scalar(scalar);
    store::save_index(store::make_index(ids, E1, kind), out_s1);
    store::save_index(store::make_index(ids, E2, kind), out_s2);

    manifest::Builder mf("embed", provider.jitter_seed);
    mf.set_config({{"input", data.input},
                   {"model", provider.model_name},
                   {"endpoint", provider.endpoint},
                   {"batch_size", provider.batch_size},
                   {"scalar", scalar}});
    mf.add_input("dataset", data.input);
    mf.add_output("s1", out_s1);
    mf.add_output("s2", out_s2);
    mf.add_output("cache", cache_path, /*is_volatile=*/true); // grows across runs
    mf.write(out_s1 + ".manifest.json");
    std::cout << "embedded " << ds.size() << " pairs at dim " << E1.cols() << "\n";
    return 0;
}

struct FitOpts {
    std::string s1, s2;
    std::size_t synthetic_dim = 0;
    std::uint64_t seed = 42;
    double fraction = 0.5;
    std::size_t k = 110;
    double threshold = 0.0; // 0 = unset
    std::string model_out = "model.bin";
    std::string curve_out, ladder_out;
};

int cmd_fit(const CommonDataOpts& data, const FitOpts& opts) {
    auto format = resolve_format(data.format, data.input);
    auto ds = dataset::normalize_scores(
        dataset::load_pairs(data.input, format, parse_scale(data.scale)));

    EmbeddingMatrix E1, E2;
    if (!opts.s1.empty()) {
        E1 = embed::load_vectors(opts.s1);
        E2 = embed::load_vectors(opts.s2);
        if (E1.rows() != ds.size() || E2.rows() != ds.size()) {
            throw DataError("vector files must be row-aligned with the dataset");
        }
    } else if (opts.synthetic_dim > 0) {
        std::tie(E1, E2) = pipeline::synthetic_pair_embeddings(ds, opts.synthetic_dim,
                                                               opts.seed);
    } else {
        throw UsageError("fit needs --s1/--s2 vector files or --synthetic-dim");
    }

    auto [train_ds, test_ds] = dataset::split(ds, {opts.seed, opts.fraction});
    (void)test_ds;

    // Stack the train sentences (two per pair) and fit on them.
    std::unordered_map<std::uint64_t, std::size_t> row_of;
    for (std::size_t i = 0; i < ds.size(); ++i) row_of[ds.pairs[i].id] = i;
    EmbeddingMatrix train_stack(2 * train_ds.size(), E1.cols());
    for (std::size_t i = 0; i < train_ds.size(); ++i) {
        std::size_t r = row_of[train_ds.pairs[i].id];
        auto src1 = E1.row(r);
        auto src2 = E2.row(r);
        std::copy(src1.begin(), src1.end(), train_stack.row(i).begin());
        std::copy(src2.begin(), src2.end(), train_stack.row(train_ds.size() + i).begin());
    }

    pca::Standardizer scaler = pca::fit_standardizer(train_stack);
    pca::PcaModel full_model = pca::fit_pca(pca::standardize(scaler, train_stack));

    std::size_t chosen_k;
    if (opts.threshold > 0.0) {
        chosen_k = pca::select_components(full_model, opts.threshold);
    } else {
        if (opts.k < 1 || opts.k > full_model.num_components) {
            throw DataError("requested k " + std::to_string(opts.k) + " out of range [1, " +
                            std::to_string(full_model.num_components) + "]");
        }
        chosen_k = opts.k;
    }
    store::save_model(pca::truncated(full_model, chosen_k), scaler, opts.model_out);

    if (!opts.curve_out.empty()) {
        std::string curve = "component,cumulative_ratio\n";
        char buf[64];
        for (const auto& [idx, ratio] : pca::variance_curve(full_model)) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", idx, ratio);
            curve += buf;
        }
        wire::write_file_atomic(opts.curve_out,
                                std::span<const std::uint8_t>(
                                    reinterpret_cast<const std::uint8_t*>(curve.data()),
                                    curve.size()));
    }
    if (!opts.ladder_out.empty()) {
        std::string ladder = "threshold,components\n";
        char buf[64];
        for (double t : {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}) {
            try {
                std::snprintf(buf, sizeof(buf), "%.17g,%zu\n", t,
                              pca::select_components(full_model, t));
                ladder += buf;
            } catch (const DataError&) {
                break;
            }
        }
        wire::write_file_atomic(opts.ladder_out,
                                std::span<const std::uint8_t>(
                                    reinterpret_cast<const std::uint8_t*>(ladder.data()),
                                    ladder.size()));
    }

    manifest::Builder mf("fit", opts.seed);
    mf.set_config({{"input", data.input},
                   {"s1", opts.s1},
                   {"s2", opts.s2},
                   {"synthetic_dim", opts.synthetic_dim},
                   {"seed", opts.seed},
                   {"train_fraction", opts.fraction},
                   {"k", opts.k},
                   {"threshold", opts.threshold},
                   {"model_out", opts.model_out}});
    mf.add_input("dataset", data.input);
    if (!opts.s1.empty()) {
        mf.add_input("s1", opts.s1);
        mf.add_input("s2", opts.s2);
    }
    mf.add_output("model", opts.model_out);
    mf.write(opts.model_out + ".manifest.json");

    std::cout << "selected components: " << chosen_k << " of " << full_model.num_components
              << "\n";
    return 0;
}

int cmd_transform(const std::string& model_path, const std::string& vectors_path,
                  const std::string& out_path, const std::string& scalar) {
    store::LoadedModel loaded = store::load_model(model_path);
    auto [X, ids] = load_vectors_with_ids(vectors_path);
    EmbeddingMatrix Y =
        pca::transform(loaded.model, pca::standardize(loaded.standardizer, X));
    store::save_index(store::make_index(ids, Y, parse_scalar(scalar)), out_path);

    manifest::Builder mf("transform", 0);
    mf.set_config({{"model", model_path}, {"vectors", vectors_path}, {"out", out_path}});
    mf.add_input("model", model_path);
    mf.add_input("vectors", vectors_path);
    mf.add_output("out", out_path);
    mf.write(out_path + ".manifest.json");
    std::cout << "transformed " << Y.rows() << " vectors to dim " << Y.cols() << "\n";
    return 0;
}

int cmd_index(const std::string& vectors_path, const std::string& out_path,
              const std::string& scalar) {
    auto [X, ids] = load_vectors_with_ids(vectors_path);
    store::VectorIndex index = store::make_index(ids, X, parse_scalar(scalar));
    store::save_index(index, out_path);
    auto mem = bench::index_memory(index);

    manifest::Builder mf("index", 0);
    mf.set_config({{"vectors", vectors_path}, {"out", out_path}, {"scalar", scalar}});
    mf.add_input("vectors", vectors_path);
    mf.add_output("index", out_path);
    mf.write(out_path + ".manifest.json");
    std::cout << "indexed " << index.rows() << " x " << index.dim << " ("
              << store::to_string(index.scalar_kind) << "), payload " << mem.payload_bytes
              << " bytes, file " << mem.total_bytes << " bytes\n";
    return 0;
}

int cmd_bench(bench::BenchConfig cfg, const std::string& backend, const std::string& out_dir) {
    if (backend == "scalar") kernels::set_backend(kernels::Backend::scalar);
    else if (backend == "avx2") kernels::set_backend(kernels::Backend::avx2);
    else if (backend != "auto") throw UsageError("unknown backend '" + backend + "'");

    auto reports = bench::bench_suite(cfg);
    std::cout << "kernel backend: " << kernels::active_table().name << "\n"
              << bench::bench_table(reports);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        auto csv_path = (fs::path(out_dir) / "bench.csv").string();
        auto sum_path = (fs::path(out_dir) / "bench_checksums.csv").string();
        std::string csv = bench::bench_csv(reports);
        std::string sums = bench::bench_checksum_csv(reports);
        wire::write_file_atomic(csv_path, std::span<const std::uint8_t>(
                                              reinterpret_cast<const std::uint8_t*>(csv.data()),
                                              csv.size()));
        wire::write_file_atomic(sum_path,
                                std::span<const std::uint8_t>(
                                    reinterpret_cast<const std::uint8_t*>(sums.data()),
                                    sums.size()));

        manifest::Builder mf("bench", cfg.seed);
        mf.set_config({{"pair_count", cfg.pair_count},
                       {"dims_full", cfg.dims_full},
                       {"dims_pca", cfg.dims_pca},
                       {"warmup_iters", cfg.warmup_iters},
                       {"measured_iters", cfg.measured_iters},
                       {"threads", cfg.threads},
                       {"backend", kernels::active_table().name}});
        mf.add_output("bench_csv", csv_path, /*is_volatile=*/true);
        mf.add_output("bench_checksums", sum_path);
        mf.write((fs::path(out_dir) / "manifest.json").string());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PCA compression and retrieval evaluation for sentence embeddings"};
    app.set_version_flag("--version", manifest::kToolVersion);
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "load, validate and normalize a pair dataset");
    CommonDataOpts ingest_data;
    std::string ingest_out = "dataset.csv";
    add_dataset_options(ingest, ingest_data);
    ingest->add_option("--output", ingest_out, "normalized CSV path");

    // embed
    auto* embed_cmd = app.add_subcommand("embed", "fetch embeddings via provider + cache");
    CommonDataOpts embed_data;
    embed::ProviderConfig provider;
    std::string cache_path = "embed_cache.bin";
    std::string embed_s1 = "s1.vidx", embed_s2 = "s2.vidx", embed_scalar = "f64";
    add_dataset_options(embed_cmd, embed_data);
    embed_cmd->add_option("--cache", cache_path, "embedding cache file");
    embed_cmd->add_option("--endpoint", provider.endpoint,
                          "OpenAI-compatible embeddings URL (omit for cache-only)");
    embed_cmd->add_option("--model", provider.model_name, "embedding model name");
    embed_cmd->add_option("--api-key-env", provider.api_key_env,
                          "environment variable holding the API key");
    embed_cmd->add_option("--batch-size", provider.batch_size, "texts per request");
    embed_cmd->add_option("--retries", provider.max_retries, "max retries per batch");
    embed_cmd->add_option("--backoff-ms", provider.backoff_base_ms, "base backoff");
    embed_cmd->add_option("--out-s1", embed_s1, "sentence1 index output");
    embed_cmd->add_option("--out-s2", embed_s2, "sentence2 index output");
    embed_cmd->add_option("--scalar", embed_scalar, "index scalar kind f32|f64");

    // fit
    auto* fit = app.add_subcommand("fit", "fit standardizer + PCA on the train split");
    CommonDataOpts fit_data;
    FitOpts fit_opts;
    add_dataset_options(fit, fit_data);
    fit->add_option("--s1", fit_opts.s1, "sentence1 vectors (index or jsonl)");
    fit->add_option("--s2", fit_opts.s2, "sentence2 vectors");
    fit->add_option("--synthetic-dim", fit_opts.synthetic_dim,
                    "generate synthetic embeddings of this dim instead");
    fit->add_option("--seed", fit_opts.seed, "split seed");
    fit->add_option("--train-fraction", fit_opts.fraction, "train fraction in (0,1)");
    auto* fit_k = fit->add_option("--k", fit_opts.k, "components to keep (default 110)");
    auto* fit_t = fit->add_option("--threshold", fit_opts.threshold,
                                  "pick minimal k reaching this variance ratio");
    fit_k->excludes(fit_t);
    fit->add_option("--model-out", fit_opts.model_out, "model file");
    fit->add_option("--curve-out", fit_opts.curve_out, "variance curve CSV");
    fit->add_option("--ladder-out", fit_opts.ladder_out, "threshold ladder CSV");

    // transform
    auto* transform = app.add_subcommand("transform", "project vectors through a model");
    std::string tr_model, tr_vectors, tr_out = "pca.vidx", tr_scalar = "f64";
    transform->add_option("--model", tr_model, "model file")->required();
    transform->add_option("--vectors", tr_vectors, "vectors (index or jsonl)")->required();
    transform->add_option("--out", tr_out, "output index");
    transform->add_option("--scalar", tr_scalar, "index scalar kind f32|f64");

    // index
    auto* index_cmd = app.add_subcommand("index", "build a vector index file");
    std::string ix_vectors, ix_out = "index.vidx", ix_scalar = "f32";
    index_cmd->add_option("--vectors", ix_vectors, "vectors (index or jsonl)")->required();
    index_cmd->add_option("--out", ix_out, "output index");
    index_cmd->add_option("--scalar", ix_scalar, "index scalar kind f32|f64");

    // eval / pipeline share options
    pipeline::ExperimentConfig exp;
    std::string exp_format = "auto", exp_scale = "0:1", exp_regress = "test";
    double exp_threshold = 0.0;
    auto add_experiment_options = [&](CLI::App* cmd) {
        cmd->add_option("--input", exp.dataset_path, "scored sentence-pair file")->required();
        cmd->add_option("--format", exp_format, "csv|jsonl|auto");
        cmd->add_option("--scale", exp_scale, "source score range lo:hi");
        cmd->add_option("--s1", exp.vectors1_path, "sentence1 vectors (index or jsonl)");
        cmd->add_option("--s2", exp.vectors2_path, "sentence2 vectors");
        cmd->add_option("--synthetic-dim", exp.synthetic_dim,
                        "dim for synthetic embeddings when no vectors given");
        auto* k_opt = cmd->add_option("--k", exp.k, "components to keep (default 110)");
        auto* t_opt = cmd->add_option("--threshold", exp_threshold,
                                      "pick minimal k reaching this variance ratio");
        k_opt->excludes(t_opt);
        cmd->add_option("--seed", exp.seed, "root seed (split + synthetic data)");
        cmd->add_option("--train-fraction", exp.train_fraction, "train fraction");
        cmd->add_option("--regress-on", exp_regress, "regression split: test|train|all");
        cmd->add_option("--bins", exp.histogram_bins, "histogram bin count");
        cmd->add_option("--out-dir", exp.out_dir, "output directory")->required();
    };

    auto* eval_cmd = app.add_subcommand("eval", "run the evaluation stage");
    add_experiment_options(eval_cmd);

    auto* pipe_cmd = app.add_subcommand("pipeline", "full experiment incl. benchmarks");
    add_experiment_options(pipe_cmd);
    bool no_bench = false;
    pipe_cmd->add_flag("--no-bench", no_bench, "skip kernel benchmarks");
    pipe_cmd->add_option("--bench-pairs", exp.bench.pair_count, "benchmark pair count");
    pipe_cmd->add_option("--bench-dims", exp.bench.dims_full,
                         "benchmark full dim (0 = data dim)");
    pipe_cmd->add_option("--bench-k", exp.bench.dims_pca, "benchmark pca dim (0 = chosen k)");
    pipe_cmd->add_option("--warmup", exp.bench.warmup_iters, "benchmark warmup iters");
    pipe_cmd->add_option("--iters", exp.bench.measured_iters, "benchmark measured iters");
    pipe_cmd->add_option("--bench-threads", exp.bench.threads, "benchmark thread count");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "microbenchmark the metric kernels");
    bench::BenchConfig bcfg;
    std::string bench_backend = "auto", bench_out;
    bench_cmd->add_option("--pairs", bcfg.pair_count, "pair count");
    bench_cmd->add_option("--dims", bcfg.dims_full, "full-space dimensionality");
    bench_cmd->add_option("--k", bcfg.dims_pca, "pca-space dimensionality");
    bench_cmd->add_option("--warmup", bcfg.warmup_iters, "warmup iterations");
    bench_cmd->add_option("--iters", bcfg.measured_iters, "measured iterations");
    bench_cmd->add_option("--seed", bcfg.seed, "synthetic vector seed");
    bench_cmd->add_option("--threads", bcfg.threads, "kernel thread count");
    bench_cmd->add_option("--backend", bench_backend, "scalar|avx2|auto");
    bench_cmd->add_option("--out-dir", bench_out, "write bench.csv + checksums here");

    // describe
    auto* describe = app.add_subcommand("describe", "print a decoded file header");
    std::string describe_file_path;
    describe->add_option("--file", describe_file_path, "index or model file")->required();

    try {
        app.parse(argc, argv);

        if (*ingest) return cmd_ingest(ingest_data, ingest_out);
        if (*embed_cmd) {
            return cmd_embed(embed_data, provider, cache_path, embed_s1, embed_s2,
                             embed_scalar);
        }
        if (*fit) {
            if (fit_opts.threshold != 0.0 && !(fit_opts.threshold > 0.0 &&
                                               fit_opts.threshold <= 1.0)) {
                throw UsageError("--threshold must be in (0, 1]");
            }
            return cmd_fit(fit_data, fit_opts);
        }
        if (*transform) return cmd_transform(tr_model, tr_vectors, tr_out, tr_scalar);
        if (*index_cmd) return cmd_index(ix_vectors, ix_out, ix_scalar);
        if (*eval_cmd || *pipe_cmd) {
            exp.format = resolve_format(exp_format, exp.dataset_path);
            exp.source_scale = parse_scale(exp_scale);
            if (exp_threshold != 0.0) {
                if (!(exp_threshold > 0.0 && exp_threshold <= 1.0)) {
                    throw UsageError("--threshold must be in (0, 1]");
                }
                exp.variance_threshold = exp_threshold;
            }
            if (exp_regress == "test") exp.regression_split = eval::RegressionSplit::test;
            else if (exp_regress == "train") exp.regression_split = eval::RegressionSplit::train;
            else if (exp_regress == "all") exp.regression_split = eval::RegressionSplit::all;
            else throw UsageError("--regress-on must be test, train or all");
            exp.run_bench = *pipe_cmd && !no_bench;
            if (*pipe_cmd && exp.bench.dims_full == 3072 && exp.bench.dims_pca == 110) {
                // Pipeline default: benchmark at the experiment's own dims.
                exp.bench.dims_full = 0;
                exp.bench.dims_pca = 0;
            }
            pipeline::run_experiment(exp);
            return 0;
        }
        if (*bench_cmd) return cmd_bench(bcfg, bench_backend, bench_out);
        if (*describe) {
            std::cout << store::describe_file(describe_file_path);
            return 0;
        }
        throw UsageError("no subcommand given");
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help / --version
        }
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ProviderError& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    }
}
