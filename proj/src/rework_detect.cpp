#include "reworkbench/rework_detect.hpp"

#include <algorithm>
#include <stdexcept>

namespace reworkbench {

namespace {

void check_policy(const DetectPolicy& policy) {
    if (policy.min_unit_len < 1) throw std::invalid_argument("min_unit_len must be >= 1");
    if (policy.min_repetitions < 2) {
        throw std::invalid_argument("min_repetitions must be >= 2");
    }
}

bool equal_range_at(const std::vector<Activity>& v, std::size_t a, std::size_t b,
                    std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
        if (!(v[a + i] == v[b + i])) return false;
    }
    return true;
}

}  // namespace

std::string_view to_string(DetectMode mode) {
    return mode == DetectMode::Tandem ? "tandem" : "recurrent";
}

std::optional<ReworkFinding> find_rework(const Variant& v, const DetectPolicy& policy) {
    check_policy(policy);
    const auto& acts = v.activities;
    const std::size_t n = acts.size();

    // Scan order (start ascending, unit length ascending, repetitions
    // maximal) yields the canonical finding directly.
    for (std::size_t start = 0; start + 2 * policy.min_unit_len <= n; ++start) {
        // A second disjoint occurrence needs room for two units.
        for (std::size_t len = policy.min_unit_len; start + 2 * len <= n; ++len) {
            std::size_t reps = 1;
            if (policy.mode == DetectMode::Tandem) {
                while (start + (reps + 1) * len <= n &&
                       equal_range_at(acts, start, start + reps * len, len)) {
                    ++reps;
                }
            } else {
                // Greedy leftmost scan maximizes the count of disjoint
                // occurrences to the right of start.
                std::size_t pos = start + len;
                while (pos + len <= n) {
                    if (equal_range_at(acts, start, pos, len)) {
                        ++reps;
                        pos += len;
                    } else {
                        ++pos;
                    }
                }
            }
            if (reps >= policy.min_repetitions) {
                ReworkFinding f;
                f.start = start;
                f.unit.assign(acts.begin() + static_cast<std::ptrdiff_t>(start),
                              acts.begin() + static_cast<std::ptrdiff_t>(start + len));
                f.repetitions = reps;
                f.policy = policy.mode;
                return f;
            }
        }
    }
    return std::nullopt;
}

bool is_rework(const Variant& v, const DetectPolicy& policy) {
    return find_rework(v, policy).has_value();
}

std::string explain_finding(const Variant& v, const ReworkFinding& f) {
    const auto& acts = v.activities;
    if (f.unit.empty() || f.repetitions < 2 || f.start + f.unit.size() > acts.size() ||
        !std::equal(f.unit.begin(), f.unit.end(),
                    acts.begin() + static_cast<std::ptrdiff_t>(f.start))) {
        throw std::invalid_argument("finding does not match the variant");
    }
    std::string out;
    for (std::size_t k = 0; k < f.repetitions; ++k) {
        for (const auto& a : f.unit) {
            if (!out.empty()) out += "->";
            out += a.name;
        }
    }
    return out;
}

}  // namespace reworkbench
