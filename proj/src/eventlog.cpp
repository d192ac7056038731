#include "reworkbench/eventlog.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "reworkbench/errors.hpp"

namespace reworkbench {

namespace {

constexpr std::string_view kAsciiArrow = "->";
constexpr std::string_view kUnicodeArrow = "\xE2\x86\x92";  // U+2192

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::uint64_t parse_uint(std::string_view token, std::string_view what, std::size_t line) {
    token = trim(token);
    std::uint64_t value = 0;
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (token.empty() || ec != std::errc{} || ptr != last) {
        throw ParseError("expected integer " + std::string(what) + ", got '" +
                             std::string(token) + "'",
                         line);
    }
    return value;
}

/// Splits an arrow-joined activity sequence; both arrow spellings accepted.
std::vector<Activity> split_activities(std::string_view text, std::size_t line) {
    std::vector<Activity> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t ascii = text.find(kAsciiArrow, pos);
        const std::size_t uni = text.find(kUnicodeArrow, pos);
        const std::size_t next = std::min(ascii, uni);
        const std::string_view token =
            trim(text.substr(pos, next == std::string_view::npos ? next : next - pos));
        if (token.empty()) throw ParseError("empty activity token", line);
        out.push_back(Activity{std::string(token)});
        if (next == std::string_view::npos) break;
        pos = next + (next == ascii ? kAsciiArrow.size() : kUnicodeArrow.size());
    }
    return out;
}

// Minimal RFC 4180 record reader over one line: commas split fields, double
// quotes protect commas/quotes. Activity names cannot contain newlines, so
// records never span lines; an unterminated quote is a parse error.
std::vector<std::string> split_csv_record(std::string_view line_text, std::size_t line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    std::size_t i = 0;
    while (i < line_text.size()) {
        const char c = line_text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line_text.size() && line_text[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
        ++i;
    }
    if (quoted) throw ParseError("unterminated quoted field", line);
    fields.push_back(std::move(cur));
    return fields;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Howard Hinnant's days-from-civil, for RFC 3339 ordering without timezones
// or locale involvement.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Timestamp {
    std::int64_t seconds = 0;  // since epoch, UTC
    std::int64_t nanos = 0;

    auto operator<=>(const Timestamp&) const = default;
};

Timestamp parse_rfc3339(std::string_view text, std::size_t line) {
    text = trim(text);
    const auto fail = [&]() -> Timestamp {
        throw ParseError("invalid RFC 3339 timestamp '" + std::string(text) + "'", line);
    };
    const auto digits = [&](std::size_t pos, std::size_t count) -> std::int64_t {
        if (pos + count > text.size()) fail();
        std::int64_t v = 0;
        for (std::size_t i = 0; i < count; ++i) {
            const char c = text[pos + i];
            if (c < '0' || c > '9') fail();
            v = v * 10 + (c - '0');
        }
        return v;
    };

    if (text.size() < 20) fail();
    const std::int64_t year = digits(0, 4);
    if (text[4] != '-') fail();
    const std::int64_t month = digits(5, 2);
    if (text[7] != '-') fail();
    const std::int64_t day = digits(8, 2);
    if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') fail();
    const std::int64_t hour = digits(11, 2);
    if (text[13] != ':') fail();
    const std::int64_t minute = digits(14, 2);
    if (text[16] != ':') fail();
    const std::int64_t second = digits(17, 2);
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 ||
        second > 60) {
        fail();
    }

    std::size_t pos = 19;
    std::int64_t nanos = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::int64_t scale = 100000000;
        std::size_t ndigits = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            if (scale > 0) nanos += (text[pos] - '0') * scale;
            scale /= 10;
            ++pos;
            ++ndigits;
        }
        if (ndigits == 0) fail();
    }

    std::int64_t offset_secs = 0;
    if (pos >= text.size()) fail();
    if (text[pos] == 'Z' || text[pos] == 'z') {
        ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
        const int sign = text[pos] == '+' ? 1 : -1;
        const std::int64_t oh = digits(pos + 1, 2);
        if (pos + 3 >= text.size() || text[pos + 3] != ':') fail();
        const std::int64_t om = digits(pos + 4, 2);
        offset_secs = sign * (oh * 3600 + om * 60);
        pos += 6;
    } else {
        fail();
    }
    if (pos != text.size()) fail();

    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                              static_cast<unsigned>(day));
    return Timestamp{days * 86400 + hour * 3600 + minute * 60 + second - offset_secs, nanos};
}

void check_activity(const Activity& a, std::size_t line) {
    if (a.name.empty()) throw ParseError("empty activity", line);
    if (a.name.find('\n') != std::string::npos) {
        throw ParseError("activity contains a newline", line);
    }
    if (a.name.find(kAsciiArrow) != std::string::npos ||
        a.name.find(kUnicodeArrow) != std::string::npos) {
        throw ParseError("activity contains the arrow separator", line);
    }
}

LabeledDataset parse_variant_csv(std::istream& in, std::string provenance) {
    LabeledDataset ds;
    ds.provenance = std::move(provenance);
    std::string raw;
    std::size_t line = 0;
    std::unordered_set<std::uint64_t> seen;

    if (!std::getline(in, raw)) throw ParseError("empty input, expected header", 1);
    ++line;
    if (trim(raw) != "variant_id,activities,label") {
        throw ParseError("expected header 'variant_id,activities,label'", line);
    }

    while (std::getline(in, raw)) {
        ++line;
        if (trim(raw).empty()) continue;
        const auto fields = split_csv_record(raw, line);
        if (fields.size() != 3) {
            throw ParseError("expected 3 columns, got " + std::to_string(fields.size()), line);
        }
        LabeledVariant lv;
        lv.id = parse_uint(fields[0], "variant_id", line);
        if (lv.id == 0) throw ParseError("variant_id must be positive", line);
        if (!seen.insert(lv.id).second) {
            throw ParseError("duplicate variant_id " + std::to_string(lv.id), line);
        }
        lv.variant.activities = split_activities(fields[1], line);
        for (const auto& a : lv.variant.activities) check_activity(a, line);
        lv.label = parse_label(trim(fields[2]), line);
        ds.items.push_back(std::move(lv));
    }
    return ds;
}

LabeledDataset parse_raw_event_csv(std::istream& in, std::string provenance) {
    std::string raw;
    std::size_t line = 0;

    if (!std::getline(in, raw)) throw ParseError("empty input, expected header", 1);
    ++line;
    if (trim(raw) != "case_id,activity,timestamp") {
        throw ParseError("expected header 'case_id,activity,timestamp'", line);
    }

    struct Event {
        Timestamp ts;
        std::size_t row;
        std::string activity;
    };
    std::map<std::string, std::vector<Event>> by_case;
    std::vector<std::string> case_order;  // first appearance

    while (std::getline(in, raw)) {
        ++line;
        if (trim(raw).empty()) continue;
        const auto fields = split_csv_record(raw, line);
        if (fields.size() != 3) {
            throw ParseError("expected 3 columns, got " + std::to_string(fields.size()), line);
        }
        const std::string case_id{trim(fields[0])};
        if (case_id.empty()) throw ParseError("empty case_id", line);
        Activity act{std::string(trim(fields[1]))};
        check_activity(act, line);
        const Timestamp ts = parse_rfc3339(fields[2], line);
        auto [it, inserted] = by_case.try_emplace(case_id);
        if (inserted) case_order.push_back(case_id);
        it->second.push_back(Event{ts, line, std::move(act.name)});
    }

    LabeledDataset ds;
    ds.provenance = std::move(provenance);
    std::vector<std::vector<Activity>> seen_sequences;
    for (const auto& case_id : case_order) {
        auto& events = by_case[case_id];
        std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
            return a.ts != b.ts ? a.ts < b.ts : a.row < b.row;
        });
        std::vector<Activity> seq;
        seq.reserve(events.size());
        for (auto& e : events) seq.push_back(Activity{std::move(e.activity)});
        if (std::find(seen_sequences.begin(), seen_sequences.end(), seq) !=
            seen_sequences.end()) {
            continue;  // identical sequence collapses into the earlier variant
        }
        seen_sequences.push_back(seq);
        LabeledVariant lv;
        lv.id = ds.items.size() + 1;
        lv.variant.activities = std::move(seq);
        lv.label = Label::Normal;
        ds.items.push_back(std::move(lv));
    }
    return ds;
}

}  // namespace

std::string_view to_string(Label label) {
    return label == Label::Normal ? "normal" : "rework";
}

Label parse_label(std::string_view token, std::size_t line) {
    if (token == "normal") return Label::Normal;
    if (token == "rework") return Label::Rework;
    throw ParseError("unknown label '" + std::string(token) + "'", line);
}

std::size_t LabeledDataset::count(Label label) const {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(),
                      [label](const LabeledVariant& lv) { return lv.label == label; }));
}

LabeledDataset parse_dataset(std::istream& source, DatasetFormat format,
                             std::string provenance) {
    return format == DatasetFormat::VariantCsv
               ? parse_variant_csv(source, std::move(provenance))
               : parse_raw_event_csv(source, std::move(provenance));
}

LabeledDataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    return parse_dataset(in, format, path.string());
}

std::string to_variant_csv(const LabeledDataset& ds) {
    std::string out = "variant_id,activities,label\n";
    for (const auto& lv : ds.items) {
        std::string joined;
        for (std::size_t i = 0; i < lv.variant.activities.size(); ++i) {
            if (i > 0) joined += " -> ";
            joined += lv.variant.activities[i].name;
        }
        out += std::to_string(lv.id);
        out += ',';
        out += csv_escape(joined);
        out += ',';
        out += to_string(lv.label);
        out += '\n';
    }
    return out;
}

void write_variant_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path.string());
    out << to_variant_csv(ds);
}

std::string format_variant(const LabeledVariant& lv) {
    std::string out = std::to_string(lv.id);
    out += "# ";
    for (std::size_t i = 0; i < lv.variant.activities.size(); ++i) {
        if (i > 0) out += " -> ";
        out += lv.variant.activities[i].name;
    }
    return out;
}

ParsedVariantLine parse_variant_line(std::string_view line) {
    const std::string_view text = trim(line);
    const std::size_t hash = text.find('#');
    if (hash == std::string_view::npos) throw ParseError("missing '#' separator");
    ParsedVariantLine out;
    out.id = parse_uint(text.substr(0, hash), "variant id", 0);
    out.activities = split_activities(text.substr(hash + 1), 0);
    return out;
}

}  // namespace reworkbench
