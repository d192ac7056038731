#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "reworkbench/eventlog.hpp"
#include "reworkbench/rework_detect.hpp"

namespace reworkbench {

enum class LayoutKind { NormalDist, UniformDist, ExponentialDist };

std::string_view to_string(LayoutKind kind);
LayoutKind parse_layout_kind(std::string_view token);

/// Placement distribution for anomalous variants. Fractions are relative to
/// the number of normal variants N: NormalDist draws from
/// Normal(mean_fraction*N, (sigma_fraction*N)^2), ExponentialDist from
/// Exponential(scale_fraction*N). Same spec + seed => identical layout.
struct LayoutSpec {
    LayoutKind kind = LayoutKind::UniformDist;
    double mean_fraction = 0.5;         // NormalDist only
    double sigma_fraction = 1.0 / 6.0;  // NormalDist only
    double scale_fraction = 1.0 / 8.0;  // ExponentialDist only
    std::uint64_t seed = 0;
};

struct HistogramData {
    std::vector<std::size_t> bin_edges;  // |counts| + 1 boundaries
    std::vector<std::size_t> counts;     // anomalies per bin
};

/// Draws k insertion indices in [0, n], sorted ascending, duplicates allowed.
/// Normal and exponential draws are rounded to the nearest integer and
/// clamped into range; uniform draws are with replacement.
std::vector<std::size_t> sample_insertion_indices(const LayoutSpec& spec,
                                                  std::size_t k, std::size_t n);

/// Inserts anomalies sequentially at the given sorted positions relative to
/// the normal list (each insertion shifts later ones right). Ids are
/// reassigned 1..N in final order; labels are preserved.
LabeledDataset arrange_dataset(const std::vector<LabeledVariant>& normals,
                               const std::vector<LabeledVariant>& anomalies,
                               const std::vector<std::size_t>& indices,
                               std::string provenance = {});

struct SyntheticData {
    std::vector<LabeledVariant> normals;
    std::vector<LabeledVariant> anomalies;
};

/// Builds a synthetic corpus: normals are rejection-sampled until free of
/// findings under `policy`; each anomaly is constructed by duplicating a
/// random in-place unit so it carries at least one finding. Deterministic
/// under seed.
SyntheticData generate_synthetic(std::size_t n_normal, std::size_t n_anomalous,
                                 std::size_t alphabet_size,
                                 std::pair<std::size_t, std::size_t> len_range,
                                 const DetectPolicy& policy, std::uint64_t seed);

/// Counts Rework-labeled positions per equal-width bin over [0, |ds|).
HistogramData layout_histogram(const LabeledDataset& ds, std::size_t bins);

/// `bin_start,bin_end,count` rows for external plotting.
std::string histogram_csv(const HistogramData& h);

/// Sidecar recording the spec, seed and realized insertion indices.
std::string layout_sidecar_json(const LayoutSpec& spec,
                                const std::vector<std::size_t>& indices);

}  // namespace reworkbench
