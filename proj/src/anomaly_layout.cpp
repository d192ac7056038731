#include "reworkbench/anomaly_layout.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "reworkbench/errors.hpp"
#include "reworkbench/rng.hpp"

namespace reworkbench {

namespace {

std::size_t round_clamp(double x, std::size_t n) {
    const double r = std::floor(x + 0.5);
    if (r <= 0.0) return 0;
    if (r >= static_cast<double>(n)) return n;
    return static_cast<std::size_t>(r);
}

void check_spec(const LayoutSpec& spec) {
    if (spec.kind == LayoutKind::NormalDist) {
        if (!(spec.mean_fraction > 0.0 && spec.mean_fraction < 1.0)) {
            throw ConfigError("mean_fraction must be in (0,1)");
        }
        if (!(spec.sigma_fraction > 0.0)) throw ConfigError("sigma_fraction must be > 0");
    }
    if (spec.kind == LayoutKind::ExponentialDist && !(spec.scale_fraction > 0.0)) {
        throw ConfigError("scale_fraction must be > 0");
    }
}

/// Excel-style activity names: A..Z, AA, AB, ...
std::string activity_name(std::size_t index) {
    std::string letters;
    std::size_t i = index;
    do {
        letters.insert(letters.begin(), static_cast<char>('A' + i % 26));
        i = i / 26;
    } while (i-- > 0);
    return "Activity " + letters;
}

}  // namespace

std::string_view to_string(LayoutKind kind) {
    switch (kind) {
        case LayoutKind::NormalDist: return "normal";
        case LayoutKind::UniformDist: return "uniform";
        case LayoutKind::ExponentialDist: return "exponential";
    }
    return "uniform";
}

LayoutKind parse_layout_kind(std::string_view token) {
    if (token == "normal") return LayoutKind::NormalDist;
    if (token == "uniform") return LayoutKind::UniformDist;
    if (token == "exponential") return LayoutKind::ExponentialDist;
    throw ConfigError("unknown distribution '" + std::string(token) +
                      "' (expected normal, uniform or exponential)");
}

std::vector<std::size_t> sample_insertion_indices(const LayoutSpec& spec, std::size_t k,
                                                  std::size_t n) {
    check_spec(spec);
    if (n < 1) throw ConfigError("need at least one normal variant");

    Rng rng(spec.seed);
    std::vector<std::size_t> indices;
    indices.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        switch (spec.kind) {
            case LayoutKind::NormalDist:
                indices.push_back(round_clamp(
                    rng.next_normal(spec.mean_fraction * static_cast<double>(n),
                                    spec.sigma_fraction * static_cast<double>(n)),
                    n));
                break;
            case LayoutKind::UniformDist:
                indices.push_back(static_cast<std::size_t>(rng.next_below(n + 1)));
                break;
            case LayoutKind::ExponentialDist:
                indices.push_back(round_clamp(
                    rng.next_exponential(spec.scale_fraction * static_cast<double>(n)), n));
                break;
        }
    }
    std::sort(indices.begin(), indices.end());
    return indices;
}

LabeledDataset arrange_dataset(const std::vector<LabeledVariant>& normals,
                               const std::vector<LabeledVariant>& anomalies,
                               const std::vector<std::size_t>& indices,
                               std::string provenance) {
    if (indices.size() != anomalies.size()) {
        throw ConfigError("got " + std::to_string(indices.size()) + " indices for " +
                          std::to_string(anomalies.size()) + " anomalies");
    }
    if (!std::is_sorted(indices.begin(), indices.end())) {
        throw ConfigError("insertion indices must be sorted ascending");
    }
    if (!indices.empty() && indices.back() > normals.size()) {
        throw ConfigError("insertion index " + std::to_string(indices.back()) +
                          " out of range [0, " + std::to_string(normals.size()) + "]");
    }

    LabeledDataset ds;
    ds.provenance = std::move(provenance);
    ds.items.reserve(normals.size() + anomalies.size());
    std::size_t a = 0;
    for (std::size_t j = 0; j <= normals.size(); ++j) {
        while (a < anomalies.size() && indices[a] == j) ds.items.push_back(anomalies[a++]);
        if (j < normals.size()) ds.items.push_back(normals[j]);
    }
    for (std::size_t i = 0; i < ds.items.size(); ++i) ds.items[i].id = i + 1;
    return ds;
}

SyntheticData generate_synthetic(std::size_t n_normal, std::size_t n_anomalous,
                                 std::size_t alphabet_size,
                                 std::pair<std::size_t, std::size_t> len_range,
                                 const DetectPolicy& policy, std::uint64_t seed) {
    if (alphabet_size < 2) throw ConfigError("alphabet_size must be >= 2");
    if (len_range.first < 2 || len_range.second < len_range.first) {
        throw ConfigError("len_range must satisfy max >= min >= 2");
    }

    constexpr std::size_t kMaxAttempts = 10000;
    Rng rng(seed);

    const auto random_clean_variant = [&]() -> Variant {
        for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
            const std::size_t len =
                len_range.first + rng.next_below(len_range.second - len_range.first + 1);
            Variant v;
            v.activities.reserve(len);
            for (std::size_t i = 0; i < len; ++i) {
                v.activities.push_back(Activity{activity_name(rng.next_below(alphabet_size))});
            }
            if (!is_rework(v, policy)) return v;
        }
        throw ConfigError(
            "rejection sampling gave up producing a repetition-free variant; "
            "try a larger alphabet or shorter sequences");
    };

    SyntheticData out;
    out.normals.reserve(n_normal);
    for (std::size_t i = 0; i < n_normal; ++i) {
        out.normals.push_back(LabeledVariant{i + 1, random_clean_variant(), Label::Normal});
    }

    out.anomalies.reserve(n_anomalous);
    for (std::size_t i = 0; i < n_anomalous; ++i) {
        Variant v = random_clean_variant();
        // Duplicate a random unit in place so the variant carries a tandem
        // repeat satisfying the policy.
        const std::size_t max_unit = std::min<std::size_t>(v.size(), policy.min_unit_len + 2);
        const std::size_t unit_len =
            policy.min_unit_len + rng.next_below(max_unit - policy.min_unit_len + 1);
        const std::size_t pos = rng.next_below(v.size() - unit_len + 1);
        const std::vector<Activity> unit(
            v.activities.begin() + static_cast<std::ptrdiff_t>(pos),
            v.activities.begin() + static_cast<std::ptrdiff_t>(pos + unit_len));
        for (std::size_t copy = 1; copy < policy.min_repetitions; ++copy) {
            v.activities.insert(v.activities.begin() +
                                    static_cast<std::ptrdiff_t>(pos + copy * unit_len),
                                unit.begin(), unit.end());
        }
        if (!is_rework(v, policy)) {
            throw ConfigError("internal: constructed anomaly carries no finding");
        }
        out.anomalies.push_back(LabeledVariant{i + 1, std::move(v), Label::Rework});
    }
    return out;
}

HistogramData layout_histogram(const LabeledDataset& ds, std::size_t bins) {
    if (bins < 1) throw ConfigError("bins must be >= 1");
    HistogramData h;
    const std::size_t n = ds.size();
    h.bin_edges.reserve(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) h.bin_edges.push_back(b * n / bins);
    h.counts.assign(bins, 0);
    for (std::size_t pos = 0; pos < n; ++pos) {
        if (ds.items[pos].label != Label::Rework) continue;
        const auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), pos);
        const std::size_t bin =
            static_cast<std::size_t>(std::distance(h.bin_edges.begin(), it)) - 1;
        h.counts[std::min(bin, bins - 1)] += 1;
    }
    return h;
}

std::string histogram_csv(const HistogramData& h) {
    std::string out = "bin_start,bin_end,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        out += std::to_string(h.bin_edges[b]);
        out += ',';
        out += std::to_string(h.bin_edges[b + 1]);
        out += ',';
        out += std::to_string(h.counts[b]);
        out += '\n';
    }
    return out;
}

std::string layout_sidecar_json(const LayoutSpec& spec,
                                const std::vector<std::size_t>& indices) {
    nlohmann::json j;
    j["distribution"] = to_string(spec.kind);
    j["seed"] = spec.seed;
    switch (spec.kind) {
        case LayoutKind::NormalDist:
            j["mean_fraction"] = spec.mean_fraction;
            j["sigma_fraction"] = spec.sigma_fraction;
            break;
        case LayoutKind::ExponentialDist:
            j["scale_fraction"] = spec.scale_fraction;
            break;
        case LayoutKind::UniformDist:
            break;
    }
    j["insertion_indices"] = indices;
    return j.dump(2) + "\n";
}

}  // namespace reworkbench
