#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "reworkbench/anomaly_layout.hpp"
#include "reworkbench/evalkit.hpp"
#include "reworkbench/llm_gateway.hpp"
#include "reworkbench/prompt_kit.hpp"

namespace reworkbench {

struct SyntheticSpec {
    std::size_t n_normal = 689;
    std::size_t n_anomalous = 71;
    std::size_t alphabet_size = 26;
    std::size_t min_len = 4;
    std::size_t max_len = 12;
};

/// Full description of one experiment sweep. Per-run seeds derive from the
/// master seed as master + run_index; the layout seed is fixed per
/// distribution cell unless relayout_per_run is set.
struct ExperimentConfig {
    // Dataset source: a single labeled VariantCsv, a normals/anomalies pair,
    // or the synthetic generator. Exactly one must be selected.
    std::filesystem::path dataset_path;
    std::filesystem::path normals_path;
    std::filesystem::path anomalies_path;
    bool synthetic = false;
    SyntheticSpec synthetic_spec;

    std::vector<LayoutKind> distributions;
    std::vector<PromptMode> modes;
    int repeats = 3;

    std::string provider_kind = "mock-perfect";  // openai-compatible | mock-*
    ProviderConfig provider;
    double fp_rate = 0.05;
    double fn_rate = 0.10;
    double delay_secs = -1.0;  // mock-delay; < 0 means 1.2 x run deadline

    DetectPolicy policy;  // synthetic labeling + mock explanations
    double mean_fraction = 0.5;
    double sigma_fraction = 1.0 / 6.0;
    double scale_fraction = 1.0 / 8.0;
    std::size_t histogram_bins = 10;

    std::filesystem::path out_dir = "out";
    std::uint64_t master_seed = 0;
    bool relayout_per_run = false;
    bool quiet = false;
};

struct ExperimentResult {
    std::vector<MetricsRow> rows;
    std::vector<CellAverage> cells;
    int provider_errors = 0;
    std::filesystem::path metrics_csv;
    std::filesystem::path report_md;
    std::filesystem::path report_csv;
};

/// Runs the full (distribution x mode x repeat) grid: layout, chunk planning,
/// agent loops under one shared rate limiter and per-run deadline, scoring,
/// aggregation, and report rendering. Every artifact needed to re-derive the
/// metrics offline is written under out_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct GenerateConfig {
    std::size_t n_normal = 689;
    std::size_t n_anomalous = 71;
    std::size_t alphabet_size = 26;
    std::size_t min_len = 4;
    std::size_t max_len = 12;
    DetectPolicy policy;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = ".";
};

struct GeneratedFiles {
    std::filesystem::path normals_csv;
    std::filesystem::path anomalies_csv;
};

GeneratedFiles generate_dataset_files(const GenerateConfig& cfg);

struct LayoutConfig {
    std::filesystem::path normals_path;
    std::filesystem::path anomalies_path;
    LayoutSpec spec;
    std::size_t histogram_bins = 10;
    std::filesystem::path out_dir = ".";
};

struct LayoutFiles {
    std::filesystem::path dataset_csv;
    std::filesystem::path layout_json;
    std::filesystem::path histogram_csv;
};

LayoutFiles lay_out_dataset_files(const LayoutConfig& cfg);

/// Offline re-scoring of stored artifacts; no network involved.
MetricsRow score_files(const std::filesystem::path& dataset_csv,
                       const std::filesystem::path& predictions_txt);

}  // namespace reworkbench
