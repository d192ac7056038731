#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "reworkbench/eventlog.hpp"

namespace reworkbench {

/// Model answer lines keyed by variant id. Lines that do not match the
/// `id# sequence` grammar (prose, headers, ids outside the scored dataset)
/// are kept verbatim in unparsed_lines; duplicates keep the first occurrence.
struct PredictionSet {
    std::map<std::uint64_t, std::string> entries;  // id -> claimed reworked sequence
    std::vector<std::string> unparsed_lines;
    std::size_t duplicate_count = 0;
};

PredictionSet parse_predictions(std::string_view text);
PredictionSet parse_predictions(std::string_view text,
                                const std::set<std::uint64_t>& dataset_ids);

struct ConfusionMatrix {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

/// Id-level scoring: a variant counts as predicted-positive iff its id occurs
/// in the prediction entries; the claimed sequence text is kept for audit but
/// not verified.
ConfusionMatrix score(const LabeledDataset& ds, const PredictionSet& preds);

/// Percentages in [0, 100]; undefined 0/0 ratios report as 0, so the
/// all-zero matrix of a DeadlineExceeded run yields an all-zero row.
struct MetricsRow {
    ConfusionMatrix cm;
    double precision = 0, recall = 0, f1 = 0, accuracy = 0, fdr = 0;
    std::string distribution;
    std::string prompt_mode;
    int run_index = 0;
    std::string status = "completed";
};

MetricsRow metrics(const ConfusionMatrix& cm);

/// Arithmetic means over the repeats of one (distribution, mode) cell.
struct CellAverage {
    std::string distribution;
    std::string prompt_mode;
    double precision = 0, recall = 0, f1 = 0, accuracy = 0, fdr = 0;
    std::size_t runs = 0;
};

CellAverage aggregate(const std::vector<MetricsRow>& rows);

struct BaselineRow {
    std::string method;
    double accuracy = 0;  // percent
    double fdr = 0;       // percent
};

/// Reference results of the prior methods, as shipped in data/baselines.csv.
const std::vector<BaselineRow>& builtin_baselines();
std::vector<BaselineRow> parse_baselines_csv(std::string_view text);
std::string_view baselines_csv_text();

struct Report {
    std::string markdown;
    std::string comparison_csv;
};

/// Per-run + per-cell result tables plus the comparison against the baseline
/// methods; the best value per criterion is flagged.
Report render_report(const std::vector<MetricsRow>& rows,
                     const std::vector<CellAverage>& cells,
                     const std::vector<BaselineRow>& baselines,
                     const std::string& method_label);

std::string to_metrics_csv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> parse_metrics_csv(std::string_view text);

}  // namespace reworkbench
