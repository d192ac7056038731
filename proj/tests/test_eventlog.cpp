#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>

#include "reworkbench/errors.hpp"
#include "reworkbench/eventlog.hpp"
#include "reworkbench/rng.hpp"

using namespace reworkbench;

namespace {

LabeledDataset parse_variant_text(const std::string& text) {
    std::istringstream in(text);
    return parse_dataset(in, DatasetFormat::VariantCsv, "test");
}

LabeledDataset parse_events_text(const std::string& text) {
    std::istringstream in(text);
    return parse_dataset(in, DatasetFormat::RawEventCsv, "test");
}

std::vector<std::string> names(const Variant& v) {
    std::vector<std::string> out;
    for (const auto& a : v.activities) out.push_back(a.name);
    return out;
}

}  // namespace

TEST_CASE("variant csv: basic rows") {
    const auto ds = parse_variant_text(
        "variant_id,activities,label\n"
        "2,Activity A -> Activity A -> Activity Z -> Activity W,rework\n"
        "1,Activity Q,normal\n");
    REQUIRE(ds.size() == 2);
    CHECK(ds.items[0].id == 2);
    CHECK(names(ds.items[0].variant) ==
          std::vector<std::string>{"Activity A", "Activity A", "Activity Z", "Activity W"});
    CHECK(ds.items[0].label == Label::Rework);
    CHECK(ds.items[1].id == 1);  // file row order is preserved
    CHECK(names(ds.items[1].variant) == std::vector<std::string>{"Activity Q"});
    CHECK(ds.items[1].label == Label::Normal);
    CHECK(ds.count(Label::Rework) == 1);
}

TEST_CASE("variant csv: typographic arrows are accepted on input") {
    const auto ds = parse_variant_text(
        "variant_id,activities,label\n"
        "1,Activity A \xE2\x86\x92 Activity B,normal\n");
    CHECK(names(ds.items[0].variant) == std::vector<std::string>{"Activity A", "Activity B"});
}

TEST_CASE("variant csv: malformed rows name the line") {
    const std::string header = "variant_id,activities,label\n";

    const auto line_of = [](const auto& fn) -> std::size_t {
        try {
            fn();
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };

    CHECK(line_of([&] { parse_variant_text(header + "1,Activity A\n"); }) == 2);
    CHECK(line_of([&] { parse_variant_text(header + "1,A -> ,normal\n"); }) == 2);
    CHECK(line_of([&] { parse_variant_text(header + "x,A,normal\n"); }) == 2);
    CHECK(line_of([&] { parse_variant_text(header + "1,A,fine\n"); }) == 2);
    CHECK(line_of([&] { parse_variant_text(header + "0,A,normal\n"); }) == 2);
    CHECK(line_of([&] {
              parse_variant_text(header + "1,A,normal\n1,B,normal\n");
          }) == 3);
    CHECK_THROWS_AS(parse_variant_text("wrong,header,here\n"), ParseError);

    try {
        parse_variant_text(header + "1,A,nope\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("variant csv: quoted activities round-trip through the writer") {
    LabeledDataset ds;
    ds.items.push_back(LabeledVariant{
        1, Variant{{Activity{"Review, final"}, Activity{"Ship \"it\""}}}, Label::Normal});
    const std::string csv = to_variant_csv(ds);
    const auto parsed = parse_variant_text(csv);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed.items[0].variant == ds.items[0].variant);
}

TEST_CASE("raw event csv: events are ordered by timestamp within a case") {
    // Hand-ordered fixture: timestamps deliberately out of file order.
    const auto ds = parse_events_text(
        "case_id,activity,timestamp\n"
        "c1,Ship,2024-05-01T12:00:02Z\n"
        "c1,Pick,2024-05-01T12:00:00Z\n"
        "c1,Pack,2024-05-01T12:00:01Z\n");
    REQUIRE(ds.size() == 1);
    CHECK(ds.items[0].id == 1);
    CHECK(names(ds.items[0].variant) == std::vector<std::string>{"Pick", "Pack", "Ship"});
    CHECK(ds.items[0].label == Label::Normal);
}

TEST_CASE("raw event csv: timestamp ties keep file order, offsets are honored") {
    const auto ds = parse_events_text(
        "case_id,activity,timestamp\n"
        "c1,B,2024-05-01T12:00:00Z\n"
        "c1,C,2024-05-01T12:00:00Z\n"
        "c1,A,2024-05-01T13:59:59+02:00\n");  // = 11:59:59Z, earliest
    REQUIRE(ds.size() == 1);
    CHECK(names(ds.items[0].variant) == std::vector<std::string>{"A", "B", "C"});
}

TEST_CASE("raw event csv: identical sequences collapse into one variant") {
    const auto ds = parse_events_text(
        "case_id,activity,timestamp\n"
        "c1,A,2024-05-01T12:00:00Z\n"
        "c1,B,2024-05-01T12:00:01Z\n"
        "c2,A,2024-05-02T09:00:00Z\n"
        "c2,B,2024-05-02T09:00:05Z\n"
        "c3,B,2024-05-03T08:00:00Z\n"
        "c3,A,2024-05-03T08:00:01Z\n");
    REQUIRE(ds.size() == 2);
    CHECK(names(ds.items[0].variant) == std::vector<std::string>{"A", "B"});
    CHECK(names(ds.items[1].variant) == std::vector<std::string>{"B", "A"});
    CHECK(ds.items[0].id == 1);
    CHECK(ds.items[1].id == 2);
}

TEST_CASE("raw event csv: extraction is stable") {
    const std::string text =
        "case_id,activity,timestamp\n"
        "z,Last,2024-01-01T00:00:03Z\n"
        "z,First,2024-01-01T00:00:01Z\n"
        "a,Only,2024-01-01T00:00:02.500Z\n";
    const auto a = parse_events_text(text);
    const auto b = parse_events_text(text);
    CHECK(a.items == b.items);
    // case order follows first appearance in the file, not case-id order
    CHECK(names(a.items[0].variant) == std::vector<std::string>{"First", "Last"});
}

TEST_CASE("raw event csv: bad timestamps are named by line") {
    try {
        parse_events_text("case_id,activity,timestamp\nc1,A,yesterday\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("format_variant renders the wire line") {
    LabeledVariant lv{1,
                      Variant{{Activity{"Activity Q"}, Activity{"Activity C"},
                               Activity{"Activity R"}, Activity{"Activity S"}}},
                      Label::Normal};
    CHECK(format_variant(lv) ==
          "1# Activity Q -> Activity C -> Activity R -> Activity S");
    CHECK(format_variant(LabeledVariant{7, Variant{{Activity{"Activity A"}}}, Label::Normal}) ==
          "7# Activity A");
}

TEST_CASE("parse_variant_line accepts the answer grammar") {
    const auto parsed = parse_variant_line("1# A->A->B->B->A");
    CHECK(parsed.id == 1);
    CHECK(parsed.activities ==
          std::vector<Activity>{Activity{"A"}, Activity{"A"}, Activity{"B"}, Activity{"B"},
                                Activity{"A"}});

    const auto spaced = parse_variant_line("42#  Activity X  ->  Activity X ");
    CHECK(spaced.id == 42);
    CHECK(spaced.activities == std::vector<Activity>{Activity{"Activity X"}, Activity{"Activity X"}});

    CHECK_THROWS_AS(parse_variant_line("x# A"), ParseError);
    CHECK_THROWS_AS(parse_variant_line("12 A->B"), ParseError);
    CHECK_THROWS_AS(parse_variant_line("12# A->->B"), ParseError);
}

TEST_CASE("format/parse round-trip identity on random variants") {
    Rng rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        LabeledVariant lv;
        lv.id = 1 + rng.next_below(1'000'000);
        const std::size_t len = 1 + rng.next_below(12);
        for (std::size_t i = 0; i < len; ++i) {
            std::string name = "Activity ";
            name += static_cast<char>('A' + rng.next_below(26));
            lv.variant.activities.push_back(Activity{std::move(name)});
        }
        const auto parsed = parse_variant_line(format_variant(lv));
        REQUIRE(parsed.id == lv.id);
        REQUIRE(parsed.activities == lv.variant.activities);
    }
}

TEST_CASE("variant csv round-trips datasets byte-identically") {
    const std::string csv =
        "variant_id,activities,label\n"
        "1,Activity Q -> Activity C,normal\n"
        "2,Activity A -> Activity A,rework\n";
    CHECK(to_variant_csv(parse_variant_text(csv)) == csv);
}
