#include "reworkbench/harness.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <set>

#include <nlohmann/json.hpp>

#include "reworkbench/errors.hpp"

namespace reworkbench {

namespace {

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct SplitDataset {
    std::vector<LabeledVariant> normals;
    std::vector<LabeledVariant> anomalies;
};

SplitDataset load_source(const ExperimentConfig& cfg) {
    SplitDataset split;
    if (cfg.synthetic) {
        const auto& s = cfg.synthetic_spec;
        auto data = generate_synthetic(s.n_normal, s.n_anomalous, s.alphabet_size,
                                       {s.min_len, s.max_len}, cfg.policy, cfg.master_seed);
        split.normals = std::move(data.normals);
        split.anomalies = std::move(data.anomalies);
        return split;
    }
    if (!cfg.dataset_path.empty()) {
        auto ds = load_dataset(cfg.dataset_path, DatasetFormat::VariantCsv);
        for (auto& lv : ds.items) {
            (lv.label == Label::Rework ? split.anomalies : split.normals).push_back(lv);
        }
        return split;
    }
    if (!cfg.normals_path.empty() && !cfg.anomalies_path.empty()) {
        split.normals = load_dataset(cfg.normals_path, DatasetFormat::VariantCsv).items;
        split.anomalies = load_dataset(cfg.anomalies_path, DatasetFormat::VariantCsv).items;
        return split;
    }
    throw ConfigError(
        "select a dataset: --dataset, --normals + --anomalies, or --synthetic");
}

std::unique_ptr<ChatProvider> make_provider(const ExperimentConfig& cfg,
                                            const LabeledDataset& ds, std::uint64_t run_seed) {
    if (cfg.provider_kind == "openai-compatible") {
        return std::make_unique<OpenAiCompatProvider>(cfg.provider);
    }
    if (cfg.provider_kind == "mock-perfect") {
        return std::make_unique<OracleMockProvider>(ds, 0.0, 0.0, run_seed, cfg.policy);
    }
    if (cfg.provider_kind == "mock-noisy") {
        return std::make_unique<OracleMockProvider>(ds, cfg.fp_rate, cfg.fn_rate, run_seed,
                                                    cfg.policy);
    }
    if (cfg.provider_kind == "mock-delay") {
        const double delay =
            cfg.delay_secs >= 0.0 ? cfg.delay_secs : cfg.provider.run_deadline_secs * 1.2;
        return std::make_unique<DelayMockProvider>(delay);
    }
    throw ConfigError("unknown provider '" + cfg.provider_kind +
                      "' (expected openai-compatible, mock-perfect, mock-noisy or mock-delay)");
}

LayoutSpec layout_spec_for(const ExperimentConfig& cfg, LayoutKind kind,
                           std::uint64_t seed) {
    LayoutSpec spec;
    spec.kind = kind;
    spec.mean_fraction = cfg.mean_fraction;
    spec.sigma_fraction = cfg.sigma_fraction;
    spec.scale_fraction = cfg.scale_fraction;
    spec.seed = seed;
    return spec;
}

}  // namespace

GeneratedFiles generate_dataset_files(const GenerateConfig& cfg) {
    auto data = generate_synthetic(cfg.n_normal, cfg.n_anomalous, cfg.alphabet_size,
                                   {cfg.min_len, cfg.max_len}, cfg.policy, cfg.seed);
    std::filesystem::create_directories(cfg.out_dir);
    GeneratedFiles files{cfg.out_dir / "normals.csv", cfg.out_dir / "anomalies.csv"};

    LabeledDataset normals{std::move(data.normals),
                           "synthetic(seed=" + std::to_string(cfg.seed) + ")"};
    LabeledDataset anomalies{std::move(data.anomalies), normals.provenance};
    write_variant_csv(normals, files.normals_csv);
    write_variant_csv(anomalies, files.anomalies_csv);
    return files;
}

LayoutFiles lay_out_dataset_files(const LayoutConfig& cfg) {
    const auto normals = load_dataset(cfg.normals_path, DatasetFormat::VariantCsv).items;
    const auto anomalies = load_dataset(cfg.anomalies_path, DatasetFormat::VariantCsv).items;
    const auto indices =
        sample_insertion_indices(cfg.spec, anomalies.size(), normals.size());
    auto ds = arrange_dataset(normals, anomalies, indices,
                              std::string(to_string(cfg.spec.kind)) + "(seed=" +
                                  std::to_string(cfg.spec.seed) + ")");

    std::filesystem::create_directories(cfg.out_dir);
    const std::string stem = "dataset_" + std::string(to_string(cfg.spec.kind));
    LayoutFiles files{cfg.out_dir / (stem + ".csv"),
                      cfg.out_dir / ("layout_" + std::string(to_string(cfg.spec.kind)) + ".json"),
                      cfg.out_dir /
                          ("histogram_" + std::string(to_string(cfg.spec.kind)) + ".csv")};
    write_variant_csv(ds, files.dataset_csv);
    write_text(files.layout_json, layout_sidecar_json(cfg.spec, indices));
    write_text(files.histogram_csv, histogram_csv(layout_histogram(ds, cfg.histogram_bins)));
    return files;
}

MetricsRow score_files(const std::filesystem::path& dataset_csv,
                       const std::filesystem::path& predictions_txt) {
    const auto ds = load_dataset(dataset_csv, DatasetFormat::VariantCsv);
    std::set<std::uint64_t> ids;
    for (const auto& lv : ds.items) ids.insert(lv.id);
    const auto preds = parse_predictions(read_text(predictions_txt), ids);
    return metrics(score(ds, preds));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.repeats < 1) throw ConfigError("repeats must be >= 1");
    if (cfg.distributions.empty() || cfg.modes.empty()) {
        throw ConfigError("select at least one distribution and one prompt mode");
    }

    const SplitDataset split = load_source(cfg);
    std::filesystem::create_directories(cfg.out_dir / "runs");

    // One limiter: a single token budget governs the whole experiment.
    RateLimiter limiter(cfg.provider.tpm_budget);

    ExperimentResult result;
    for (const LayoutKind dist : cfg.distributions) {
        for (const PromptMode mode : cfg.modes) {
            std::vector<MetricsRow> cell_rows;
            for (int run = 0; run < cfg.repeats; ++run) {
                const std::uint64_t run_seed = cfg.master_seed + static_cast<std::uint64_t>(run);
                const std::uint64_t layout_seed =
                    cfg.relayout_per_run ? run_seed : cfg.master_seed;

                const LayoutSpec spec = layout_spec_for(cfg, dist, layout_seed);
                const auto indices = sample_insertion_indices(spec, split.anomalies.size(),
                                                              split.normals.size());
                const auto ds =
                    arrange_dataset(split.normals, split.anomalies, indices,
                                    std::string(to_string(dist)) + "(seed=" +
                                        std::to_string(layout_seed) + ")");

                const std::string dataset_stem =
                    "dataset_" + std::string(to_string(dist)) +
                    (cfg.relayout_per_run ? "_r" + std::to_string(run) : "");
                const auto dataset_path = cfg.out_dir / (dataset_stem + ".csv");
                if (run == 0 || cfg.relayout_per_run) {
                    write_variant_csv(ds, dataset_path);
                    write_text(cfg.out_dir / ("layout_" + std::string(to_string(dist)) +
                                              (cfg.relayout_per_run
                                                   ? "_r" + std::to_string(run)
                                                   : "") +
                                              ".json"),
                               layout_sidecar_json(spec, indices));
                    write_text(cfg.out_dir / ("histogram_" + std::string(to_string(dist)) +
                                              (cfg.relayout_per_run
                                                   ? "_r" + std::to_string(run)
                                                   : "") +
                                              ".csv"),
                               histogram_csv(layout_histogram(ds, cfg.histogram_bins)));
                }

                const std::string run_id = std::string(to_string(dist)) + "-" +
                                           std::string(to_string(mode)) + "-r" +
                                           std::to_string(run);
                const auto run_dir = cfg.out_dir / "runs" / run_id;
                std::filesystem::create_directories(run_dir);

                const auto chunks = plan_chunks(ds, mode, cfg.provider.tpm_budget);
                auto provider = make_provider(cfg, ds, run_seed);

                const auto started = std::chrono::steady_clock::now();
                const auto deadline =
                    started + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                  std::chrono::duration<double>(cfg.provider.run_deadline_secs));

                RunStatus run_status = RunStatus::Completed;
                std::string run_error;
                std::string predictions_text;
                AgentTranscript full_transcript;
                for (const auto& chunk : chunks) {
                    auto bundle = build_bundle(mode, chunk.lines);
                    auto outcome =
                        run_agent_loop(cfg.provider, *provider, bundle, limiter, deadline);
                    for (auto& e : outcome.transcript.entries) {
                        full_transcript.entries.push_back(std::move(e));
                    }
                    if (outcome.status == RunStatus::Completed) {
                        if (!predictions_text.empty()) predictions_text += '\n';
                        predictions_text += *outcome.final_text;
                    } else {
                        run_status = outcome.status;
                        run_error = outcome.error;
                        break;
                    }
                }
                const double duration_secs =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                        .count();

                write_text(run_dir / "transcript.jsonl", full_transcript.to_jsonl());
                write_text(run_dir / "predictions.txt", predictions_text);

                MetricsRow row;  // all-zero sentinel unless the run completed
                if (run_status == RunStatus::Completed) {
                    std::set<std::uint64_t> ids;
                    for (const auto& lv : ds.items) ids.insert(lv.id);
                    row = metrics(score(ds, parse_predictions(predictions_text, ids)));
                }
                row.distribution = to_string(dist);
                row.prompt_mode = to_string(mode);
                row.run_index = run;
                row.status = to_string(run_status);

                nlohmann::json record{
                    {"run_id", run_id},
                    {"distribution", row.distribution},
                    {"prompt", row.prompt_mode},
                    {"run_index", run},
                    {"status", row.status},
                    {"error", run_error},
                    {"master_seed", cfg.master_seed},
                    {"run_seed", run_seed},
                    {"layout_seed", layout_seed},
                    {"provider", cfg.provider_kind},
                    {"model", cfg.provider.model},
                    {"tpm_budget", cfg.provider.tpm_budget},
                    {"run_deadline_secs", cfg.provider.run_deadline_secs},
                    {"chunks", chunks.size()},
                    {"dataset", dataset_path.string()},
                    {"duration_secs", duration_secs},
                    {"metrics",
                     {{"tp", row.cm.tp},
                      {"tn", row.cm.tn},
                      {"fp", row.cm.fp},
                      {"fn", row.cm.fn},
                      {"precision", row.precision},
                      {"recall", row.recall},
                      {"f1", row.f1},
                      {"accuracy", row.accuracy},
                      {"fdr", row.fdr}}}};
                write_text(run_dir / "run.json", record.dump(2) + "\n");

                if (run_status == RunStatus::ProviderError) {
                    ++result.provider_errors;
                    if (!cfg.quiet) {
                        std::cerr << "warning: run " << run_id
                                  << " failed with a provider error and is excluded from "
                                     "averages: "
                                  << run_error << "\n";
                    }
                } else {
                    cell_rows.push_back(row);
                }
                result.rows.push_back(std::move(row));
            }
            if (!cell_rows.empty()) result.cells.push_back(aggregate(cell_rows));
        }
    }

    result.metrics_csv = cfg.out_dir / "metrics.csv";
    write_text(result.metrics_csv, to_metrics_csv(result.rows));

    const std::string label = cfg.provider_kind == "openai-compatible" && !cfg.provider.model.empty()
                                  ? cfg.provider.model
                                  : cfg.provider_kind;
    const Report report = render_report(result.rows, result.cells, builtin_baselines(), label);
    result.report_md = cfg.out_dir / "report.md";
    result.report_csv = cfg.out_dir / "report.csv";
    write_text(result.report_md, report.markdown);
    write_text(result.report_csv, report.comparison_csv);
    return result;
}

}  // namespace reworkbench
