#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "reworkbench/rework_detect.hpp"
#include "reworkbench/rng.hpp"
#include "support/naive_scan.hpp"

using namespace reworkbench;

namespace {

Variant make_variant(const std::vector<std::string>& names) {
    Variant v;
    for (const auto& n : names) v.activities.push_back(Activity{n});
    return v;
}

std::vector<std::string> unit_names(const ReworkFinding& f) {
    std::vector<std::string> out;
    for (const auto& a : f.unit) out.push_back(a.name);
    return out;
}

}  // namespace

TEST_CASE("tandem: doubled activity at the tail") {
    const auto v = make_variant({"Q", "C", "R", "S", "G", "X", "X"});
    const auto f = find_rework(v, DetectPolicy{});
    REQUIRE(f.has_value());
    CHECK(f->start == 5);
    CHECK(unit_names(*f) == std::vector<std::string>{"X"});
    CHECK(f->repetitions == 2);
    CHECK(f->policy == DetectMode::Tandem);
}

TEST_CASE("tandem: doubled two-activity unit") {
    const auto v = make_variant({"B", "Q", "C", "Q", "C", "G", "X", "T", "O"});
    const auto f = find_rework(v, DetectPolicy{});
    REQUIRE(f.has_value());
    CHECK(f->start == 1);
    CHECK(unit_names(*f) == std::vector<std::string>{"Q", "C"});
    CHECK(f->repetitions == 2);
}

TEST_CASE("recurrent finds interspersed repeats that tandem rejects") {
    const auto v = make_variant({"Q", "C", "R", "S", "C", "R", "G", "C", "R"});
    DetectPolicy policy;
    policy.min_unit_len = 2;

    policy.mode = DetectMode::Recurrent;
    const auto f = find_rework(v, policy);
    REQUIRE(f.has_value());
    CHECK(f->start == 1);
    CHECK(unit_names(*f) == std::vector<std::string>{"C", "R"});
    CHECK(f->repetitions == 3);

    policy.mode = DetectMode::Tandem;
    CHECK(!find_rework(v, policy).has_value());
}

TEST_CASE("no repetition, no finding") {
    CHECK(!find_rework(make_variant({"Q", "C", "R", "S"}), DetectPolicy{}).has_value());
    CHECK(!find_rework(make_variant({"A"}), DetectPolicy{}).has_value());
}

TEST_CASE("is_rework basics") {
    CHECK(is_rework(make_variant({"A", "A", "Z", "W"}), DetectPolicy{}));
    DetectPolicy pair_policy;
    pair_policy.min_unit_len = 2;
    CHECK(is_rework(make_variant({"A", "B", "A", "B"}), pair_policy));
    CHECK(!is_rework(make_variant({"A", "B", "A"}), pair_policy));
}

TEST_CASE("canonical ordering: smallest start, smallest unit, most repetitions") {
    // Two candidate repeats; the left-most wins.
    auto f = find_rework(make_variant({"X", "X", "A", "B", "A", "B"}), DetectPolicy{});
    REQUIRE(f.has_value());
    CHECK(f->start == 0);
    CHECK(unit_names(*f) == std::vector<std::string>{"X"});

    // Same start: the shorter unit wins even though the longer also repeats.
    f = find_rework(make_variant({"A", "A", "A", "A"}), DetectPolicy{});
    REQUIRE(f.has_value());
    CHECK(f->start == 0);
    CHECK(unit_names(*f) == std::vector<std::string>{"A"});
    CHECK(f->repetitions == 4);  // repetitions maximal for the chosen unit
}

TEST_CASE("explain_finding renders the repeated region in answer grammar") {
    const auto v = make_variant({"Activity A", "Activity A", "Activity Z", "Activity W"});
    const auto f = find_rework(v, DetectPolicy{});
    REQUIRE(f.has_value());
    CHECK(explain_finding(v, *f) == "Activity A->Activity A");

    const auto few2 = make_variant({"Activity B", "Activity Q", "Activity C", "Activity Q",
                                    "Activity C", "Activity G", "Activity X", "Activity T",
                                    "Activity O"});
    const auto f2 = find_rework(few2, DetectPolicy{});
    REQUIRE(f2.has_value());
    CHECK(explain_finding(few2, *f2) ==
          "Activity Q->Activity C->Activity Q->Activity C");
}

TEST_CASE("explain_finding rejects findings that do not match the variant") {
    const auto v = make_variant({"A", "B"});
    ReworkFinding bogus;
    bogus.start = 0;
    bogus.unit = {Activity{"Z"}};
    bogus.repetitions = 2;
    CHECK_THROWS_AS(explain_finding(v, bogus), std::invalid_argument);
}

TEST_CASE("exhaustive agreement with the naive scanner") {
    // All non-empty sequences up to length 9 over up to 3 letters; the
    // acceptance suite extends this to length 10.
    for (std::size_t alphabet = 2; alphabet <= 3; ++alphabet) {
        for (std::size_t len = 1; len <= 9; ++len) {
            std::size_t total = 1;
            for (std::size_t i = 0; i < len; ++i) total *= alphabet;
            std::string s(len, 'a');
            for (std::size_t code = 0; code < total; ++code) {
                std::size_t c = code;
                for (std::size_t i = 0; i < len; ++i) {
                    s[i] = static_cast<char>('a' + c % alphabet);
                    c /= alphabet;
                }
                const bool expected = naive_has_tandem(s, 1, 2);
                const bool actual = is_rework(variant_from_string(s), DetectPolicy{});
                if (expected != actual) {
                    CAPTURE(s);
                    REQUIRE(expected == actual);
                }
            }
        }
    }
}

TEST_CASE("tandem findings verify by direct slicing; tandem implies recurrent") {
    Rng rng(2024);
    DetectPolicy tandem;
    DetectPolicy recurrent;
    recurrent.mode = DetectMode::Recurrent;
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t len = 1 + rng.next_below(14);
        std::string s;
        for (std::size_t i = 0; i < len; ++i) {
            s += static_cast<char>('a' + rng.next_below(3));
        }
        const Variant v = variant_from_string(s);
        const auto f = find_rework(v, tandem);
        if (f.has_value()) {
            REQUIRE(f->repetitions >= 2);
            REQUIRE(f->start + f->repetitions * f->unit.size() <= v.size());
            for (std::size_t k = 0; k < f->repetitions; ++k) {
                for (std::size_t i = 0; i < f->unit.size(); ++i) {
                    REQUIRE(v.activities[f->start + k * f->unit.size() + i] == f->unit[i]);
                }
            }
            CHECK(is_rework(v, recurrent));
        }
    }
}

TEST_CASE("find_rework is pure: identical inputs give identical findings") {
    const auto v = make_variant({"A", "B", "A", "B", "C", "C"});
    const auto f1 = find_rework(v, DetectPolicy{});
    const auto f2 = find_rework(v, DetectPolicy{});
    REQUIRE(f1.has_value());
    REQUIRE(f2.has_value());
    CHECK(f1->start == f2->start);
    CHECK(unit_names(*f1) == unit_names(*f2));
    CHECK(f1->repetitions == f2->repetitions);
}

TEST_CASE("policy invariants are enforced") {
    const auto v = make_variant({"A", "A"});
    DetectPolicy bad;
    bad.min_unit_len = 0;
    CHECK_THROWS_AS(find_rework(v, bad), std::invalid_argument);
    bad.min_unit_len = 1;
    bad.min_repetitions = 1;
    CHECK_THROWS_AS(find_rework(v, bad), std::invalid_argument);
}
