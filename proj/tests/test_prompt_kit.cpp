#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "reworkbench/anomaly_layout.hpp"
#include "reworkbench/errors.hpp"
#include "reworkbench/prompt_kit.hpp"

using namespace reworkbench;

namespace {

std::string read_fixture(const std::string& name) {
    const std::string path = std::string(RB_SOURCE_DIR) + "/prompts/" + name;
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing fixture ", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

LabeledDataset paper_shaped_dataset() {
    const auto data = generate_synthetic(689, 71, 26, {4, 12}, DetectPolicy{}, 21);
    const LayoutSpec spec{LayoutKind::UniformDist, 0.5, 1.0 / 6.0, 1.0 / 8.0, 21};
    return arrange_dataset(data.normals, data.anomalies,
                           sample_insertion_indices(spec, 71, 689));
}

}  // namespace

TEST_CASE("bundles are byte-identical to the prompt fixtures") {
    const auto bundle_for = [](PromptMode mode) { return build_bundle(mode, {"1# A"}); };

    CHECK(bundle_for(PromptMode::ZeroShot).human.content == read_fixture("zero.txt"));
    CHECK(bundle_for(PromptMode::OneShot).human.content == read_fixture("one.txt"));
    CHECK(bundle_for(PromptMode::FewShot).human.content == read_fixture("few.txt"));
    for (const auto mode : {PromptMode::ZeroShot, PromptMode::OneShot, PromptMode::FewShot}) {
        CHECK(bundle_for(mode).system.content == read_fixture("system.txt"));
        CHECK(bundle_for(mode).tool.description == read_fixture("function.txt"));
        CHECK(bundle_for(mode).tool.name == "get_event_variants");
    }
}

TEST_CASE("mode-specific worked examples") {
    const std::string zero{human_message_text(PromptMode::ZeroShot)};
    const std::string one{human_message_text(PromptMode::OneShot)};
    const std::string few{human_message_text(PromptMode::FewShot)};

    CHECK(zero.find("example of a rework") == std::string::npos);
    CHECK(one.find("Because it has two repetitions of activity X in a row.") !=
          std::string::npos);
    CHECK(few.find("1) ") != std::string::npos);
    CHECK(few.find("2) ") != std::string::npos);
    CHECK(few.find("3) ") != std::string::npos);
    CHECK(few.find("three repetitions of Activity C -> Activity R") != std::string::npos);

    // The zero-shot text is the shared skeleton: task sentence plus the
    // output-format footer, both contained verbatim in the other modes.
    const std::string task = "Detect the variants with the rework anomalies.\n";
    const std::string footer =
        "The output should be in this format:\n"
        "Variant Id# Which sequence of activities is reworked?\n"
        "Example:1# A->A->B->B->A";
    CHECK(zero == task + footer);
    for (const auto* text : {&one, &few}) {
        CHECK(text->find(task) == 0);
        CHECK(text->ends_with(footer));
    }
}

TEST_CASE("build_bundle is deterministic and mode-pure") {
    const auto a = build_bundle(PromptMode::FewShot, {"1# A", "2# B"});
    const auto b = build_bundle(PromptMode::FewShot, {"1# A", "2# B"});
    CHECK(a.system.content == b.system.content);
    CHECK(a.human.content == b.human.content);
    CHECK(a.tool.description == b.tool.description);
    CHECK(a.chunk == b.chunk);
}

TEST_CASE("token estimate formula") {
    CHECK(estimate_tokens("") == 8);
    CHECK(estimate_tokens(std::string(400, 'x')) == 108);
    CHECK(estimate_tokens("abcd") == 9);
    CHECK(estimate_tokens("abcde") == 10);
}

TEST_CASE("chunk planning packs greedily and preserves order") {
    LabeledDataset ds;
    for (std::uint64_t i = 1; i <= 6; ++i) {
        ds.items.push_back(
            LabeledVariant{i, Variant{{Activity{"Activity A"}, Activity{"Activity B"}}},
                           Label::Normal});
    }

    SUBCASE("everything fits one chunk") {
        const auto chunks = plan_chunks(ds, PromptMode::ZeroShot, 100000);
        REQUIRE(chunks.size() == 1);
        CHECK(chunks[0].ids == std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6});
    }

    SUBCASE("small budget forces several chunks, order preserved") {
        const long fixed = estimate_tokens(system_message_text()) +
                           estimate_tokens(human_message_text(PromptMode::ZeroShot)) +
                           estimate_tokens(tool_description_text());
        const long line = estimate_tokens(format_variant(ds.items[0]));
        // Room for two lines plus the reply allowance, not three.
        const long budget = fixed + 2 * line + (2 * line + 3) / 4 + 1;
        const auto chunks = plan_chunks(ds, PromptMode::ZeroShot, budget);
        REQUIRE(chunks.size() == 3);
        std::vector<std::uint64_t> ids;
        for (const auto& c : chunks) {
            CHECK(c.lines.size() == 2);
            CHECK(c.token_estimate <= budget);
            ids.insert(ids.end(), c.ids.begin(), c.ids.end());
        }
        CHECK(ids == std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6});
    }

    SUBCASE("a line that cannot fit names its variant") {
        try {
            plan_chunks(ds, PromptMode::FewShot, 10);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("variant id 1") != std::string::npos);
        }
    }
}

TEST_CASE("paper-shaped dataset exceeds one token window and needs chunking") {
    const auto ds = paper_shaped_dataset();
    REQUIRE(ds.size() == 760);

    long line_tokens = 0;
    for (const auto& lv : ds.items) line_tokens += estimate_tokens(format_variant(lv));
    const long fixed = estimate_tokens(system_message_text()) +
                       estimate_tokens(human_message_text(PromptMode::ZeroShot)) +
                       estimate_tokens(tool_description_text());
    const long single_request_estimate = fixed + line_tokens + (line_tokens + 3) / 4;
    CHECK(single_request_estimate > 30000);

    for (const auto mode : {PromptMode::ZeroShot, PromptMode::OneShot, PromptMode::FewShot}) {
        const auto chunks = plan_chunks(ds, mode, 30000);
        CHECK(chunks.size() >= 2);

        std::set<std::uint64_t> seen;
        std::size_t total = 0;
        for (const auto& c : chunks) {
            CHECK(c.token_estimate <= 30000);
            total += c.ids.size();
            seen.insert(c.ids.begin(), c.ids.end());
        }
        CHECK(total == 760);        // no duplicates across chunks
        CHECK(seen.size() == 760);  // every variant appears
    }
}
