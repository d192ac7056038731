#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace reworkbench {

enum class Label { Normal, Rework };

std::string_view to_string(Label label);
Label parse_label(std::string_view token, std::size_t line = 0);

/// A single process activity. Names are compared by exact string equality and
/// must be non-empty, newline-free, and must not contain the arrow separator.
struct Activity {
    std::string name;

    bool operator==(const Activity&) const = default;
};

/// Ordered sequence of activities for one process-instance variant.
struct Variant {
    std::vector<Activity> activities;  // length >= 1, order significant

    bool operator==(const Variant&) const = default;
    std::size_t size() const { return activities.size(); }
};

struct LabeledVariant {
    std::uint64_t id = 0;  // positive, unique within a dataset
    Variant variant;
    Label label = Label::Normal;

    bool operator==(const LabeledVariant&) const = default;
};

/// The unit of experiments: ordered variants, in presentation order.
struct LabeledDataset {
    std::vector<LabeledVariant> items;
    std::string provenance;

    std::size_t size() const { return items.size(); }
    std::size_t count(Label label) const;
};

enum class DatasetFormat { VariantCsv, RawEventCsv };

/// Parses a dataset from a byte stream.
///
/// VariantCsv: header `variant_id,activities,label`; the activities field is
/// an arrow-joined sequence (both "->" and the typographic arrow are
/// accepted). RawEventCsv: header `case_id,activity,timestamp` with RFC 3339
/// timestamps; events are grouped per case, ordered by timestamp (ties keep
/// file order), identical sequences collapsed, label Normal, ids assigned
/// 1-based in order of first appearance.
LabeledDataset parse_dataset(std::istream& source, DatasetFormat format,
                             std::string provenance = {});

LabeledDataset load_dataset(const std::filesystem::path& path, DatasetFormat format);

/// Serializes to the VariantCsv wire format (lowercase labels, " -> " joins,
/// RFC 4180 quoting when a field contains a comma or quote).
std::string to_variant_csv(const LabeledDataset& ds);
void write_variant_csv(const LabeledDataset& ds, const std::filesystem::path& path);

/// Renders `<id># Activity X -> Activity Y -> ...` (one space after '#',
/// no trailing separator or newline).
std::string format_variant(const LabeledVariant& lv);

struct ParsedVariantLine {
    std::uint64_t id = 0;
    std::vector<Activity> activities;
};

/// Inverse of format_variant. Accepts both arrow spellings and arbitrary
/// whitespace around tokens; token text (including any "Activity " prefix)
/// is preserved verbatim after trimming.
ParsedVariantLine parse_variant_line(std::string_view line);

}  // namespace reworkbench
