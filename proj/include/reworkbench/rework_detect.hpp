#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "reworkbench/eventlog.hpp"

namespace reworkbench {

/// Tandem: k >= min_repetitions back-to-back copies of a contiguous unit.
/// Recurrent: the unit recurs at pairwise-disjoint positions anywhere to the
/// right of the first occurrence, possibly interspersed with other work.
enum class DetectMode { Tandem, Recurrent };

std::string_view to_string(DetectMode mode);

struct DetectPolicy {
    DetectMode mode = DetectMode::Tandem;
    std::size_t min_unit_len = 1;
    std::size_t min_repetitions = 2;
};

struct ReworkFinding {
    std::size_t start = 0;  // 0-based index of the first occurrence
    std::vector<Activity> unit;
    std::size_t repetitions = 0;
    DetectMode policy = DetectMode::Tandem;
};

/// Returns the canonical finding (smallest start, then smallest unit, then
/// largest repetition count) or nullopt when no qualifying repetition exists.
std::optional<ReworkFinding> find_rework(const Variant& v, const DetectPolicy& policy);

bool is_rework(const Variant& v, const DetectPolicy& policy);

/// Renders the repeated content as arrow-joined activities in the answer
/// grammar a correct model would emit, e.g. `Activity X->Activity X`.
std::string explain_finding(const Variant& v, const ReworkFinding& f);

}  // namespace reworkbench
