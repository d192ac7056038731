#include "reworkbench/prompt_kit.hpp"

#include "embedded_prompts.h"
#include "reworkbench/errors.hpp"

namespace reworkbench {

std::string_view to_string(ChatRole role) {
    switch (role) {
        case ChatRole::System: return "system";
        case ChatRole::Human: return "human";
        case ChatRole::Ai: return "ai";
        case ChatRole::FunctionResult: return "function_result";
    }
    return "human";
}

std::string_view to_string(PromptMode mode) {
    switch (mode) {
        case PromptMode::ZeroShot: return "zero";
        case PromptMode::OneShot: return "one";
        case PromptMode::FewShot: return "few";
    }
    return "zero";
}

PromptMode parse_prompt_mode(std::string_view token) {
    if (token == "zero") return PromptMode::ZeroShot;
    if (token == "one") return PromptMode::OneShot;
    if (token == "few") return PromptMode::FewShot;
    throw ConfigError("unknown prompt mode '" + std::string(token) +
                      "' (expected zero, one or few)");
}

std::string_view system_message_text() { return embedded::kSystemMessage; }

std::string_view human_message_text(PromptMode mode) {
    switch (mode) {
        case PromptMode::ZeroShot: return embedded::kZeroShotHuman;
        case PromptMode::OneShot: return embedded::kOneShotHuman;
        case PromptMode::FewShot: return embedded::kFewShotHuman;
    }
    return embedded::kZeroShotHuman;
}

std::string_view tool_description_text() { return embedded::kFunctionMessage; }

PromptBundle build_bundle(PromptMode mode, std::vector<std::string> chunk) {
    PromptBundle bundle;
    bundle.system = ChatMessage{ChatRole::System, std::string(system_message_text())};
    bundle.human = ChatMessage{ChatRole::Human, std::string(human_message_text(mode))};
    bundle.tool.description = std::string(tool_description_text());
    bundle.chunk = std::move(chunk);
    return bundle;
}

long estimate_tokens(std::string_view text) {
    return static_cast<long>((text.size() + 3) / 4) + 8;
}

long estimate_request_tokens(const std::vector<ChatMessage>& messages, const ToolSpec& tool) {
    long total = estimate_tokens(tool.description);
    for (const auto& m : messages) total += estimate_tokens(m.content);
    return total;
}

std::vector<Chunk> plan_chunks(const LabeledDataset& ds, PromptMode mode,
                               long budget_tokens) {
    const long fixed = estimate_tokens(system_message_text()) +
                       estimate_tokens(human_message_text(mode)) +
                       estimate_tokens(tool_description_text());
    // Replies list only the anomalous variants; reserve a quarter of the line
    // tokens inside the budget for them.
    const auto reply_allowance = [](long line_tokens) { return (line_tokens + 3) / 4; };
    const auto chunk_total = [&](long line_tokens) {
        return fixed + line_tokens + reply_allowance(line_tokens);
    };

    std::vector<Chunk> chunks;
    Chunk cur;
    long cur_line_tokens = 0;
    for (const auto& lv : ds.items) {
        std::string line = format_variant(lv);
        const long line_tokens = estimate_tokens(line);
        if (chunk_total(line_tokens) > budget_tokens) {
            throw ConfigError("variant id " + std::to_string(lv.id) +
                              " does not fit the token budget of " +
                              std::to_string(budget_tokens) + " on its own");
        }
        if (!cur.lines.empty() && chunk_total(cur_line_tokens + line_tokens) > budget_tokens) {
            cur.token_estimate = chunk_total(cur_line_tokens);
            chunks.push_back(std::move(cur));
            cur = Chunk{};
            cur_line_tokens = 0;
        }
        cur.lines.push_back(std::move(line));
        cur.ids.push_back(lv.id);
        cur_line_tokens += line_tokens;
    }
    if (!cur.lines.empty()) {
        cur.token_estimate = chunk_total(cur_line_tokens);
        chunks.push_back(std::move(cur));
    }
    return chunks;
}

}  // namespace reworkbench
