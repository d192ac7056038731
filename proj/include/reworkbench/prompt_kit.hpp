#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "reworkbench/eventlog.hpp"

namespace reworkbench {

/// The four message kinds of the conversation protocol.
enum class ChatRole { System, Human, Ai, FunctionResult };

std::string_view to_string(ChatRole role);

struct ChatMessage {
    ChatRole role = ChatRole::Human;
    std::string content;
    // Wire plumbing for providers that correlate tool invocations with their
    // results; empty for plain messages.
    std::string tool_call_id;
    std::string tool_name;
};

struct ToolSpec {
    std::string name = "get_event_variants";
    std::string description;                 // identical across prompt modes
    std::string parameters_json = R"({"type":"object","properties":{}})";
};

enum class PromptMode { ZeroShot, OneShot, FewShot };

std::string_view to_string(PromptMode mode);
PromptMode parse_prompt_mode(std::string_view token);

/// One request conversation: fixed system/human messages, the tool schema,
/// and the chunk of formatted variant lines served through the tool.
struct PromptBundle {
    ChatMessage system;
    ChatMessage human;
    ToolSpec tool;
    std::vector<std::string> chunk;
};

/// Canonical prompt texts. The bytes come from the prompts/ fixture files,
/// embedded at build time and protected by golden tests.
std::string_view system_message_text();
std::string_view human_message_text(PromptMode mode);
std::string_view tool_description_text();

/// Assembles the bundle for one chunk; deterministic and mode-pure.
PromptBundle build_bundle(PromptMode mode, std::vector<std::string> chunk);

/// Conservative token estimate: ceil(bytes/4) + 8 overhead per message.
/// A heuristic for budget planning, never a tokenizer guarantee.
long estimate_tokens(std::string_view text);

/// Token estimate for a full request: every message plus the tool schema.
long estimate_request_tokens(const std::vector<ChatMessage>& messages, const ToolSpec& tool);

struct Chunk {
    std::vector<std::string> lines;      // formatted variant lines, dataset order
    std::vector<std::uint64_t> ids;
    long token_estimate = 0;             // fixed messages + lines + reply allowance
};

/// Greedy packing of formatted variant lines in dataset order. Each chunk's
/// estimate (fixed messages + line tokens + a 25% reply allowance on line
/// tokens) stays within the budget; every variant lands in exactly one chunk.
std::vector<Chunk> plan_chunks(const LabeledDataset& ds, PromptMode mode,
                               long budget_tokens);

}  // namespace reworkbench
