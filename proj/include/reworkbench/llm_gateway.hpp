#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "reworkbench/eventlog.hpp"
#include "reworkbench/prompt_kit.hpp"
#include "reworkbench/rework_detect.hpp"

namespace reworkbench {

struct ProviderConfig {
    std::string endpoint;        // e.g. https://api.openai.com/v1
    std::string model;
    std::string credential_env;  // name of the env var holding the API key
    long tpm_budget = 30000;     // tokens per minute
    double request_timeout_secs = 120.0;
    double run_deadline_secs = 300.0;  // wall clock per run; past it => zero performance
    int max_agent_steps = 4;
};

struct TranscriptEntry {
    double ts_unix = 0.0;  // wall-clock seconds since epoch, monotone in order
    std::string kind;      // "message", "tool_invocation", "http_request", ...
    std::string role;
    std::string content;
    std::size_t payload_bytes = 0;
    long token_estimate = 0;
};

/// Append-only record of one agent run, sufficient to replay it offline.
struct AgentTranscript {
    std::vector<TranscriptEntry> entries;

    void add(std::string kind, std::string role, std::string content,
             std::size_t payload_bytes = 0, long token_estimate = 0);
    std::string to_jsonl() const;
};

enum class RunStatus { Completed, DeadlineExceeded, ProviderError };

std::string_view to_string(RunStatus status);

struct RunOutcome {
    RunStatus status = RunStatus::ProviderError;
    std::optional<std::string> final_text;  // present iff Completed
    AgentTranscript transcript;
    std::string error;  // diagnostic for ProviderError
};

struct ToolCallRequest {
    std::string id;
    std::string name;
};

/// One model turn: either a tool invocation request or a final text answer.
struct ProviderReply {
    std::optional<ToolCallRequest> tool_call;
    std::string text;
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual ProviderReply complete(const std::vector<ChatMessage>& messages,
                                   const ToolSpec& tool, AgentTranscript& transcript) = 0;
};

/// Sliding-window token-per-minute limiter: the sum of token estimates of
/// requests sent within any trailing 60 s window never exceeds the budget.
/// A single limiter is the shared authority for one budget; concurrent
/// callers serialize through it.
class RateLimiter {
public:
    explicit RateLimiter(long tpm_budget);

    /// Delay (seconds, >= 0) required before a request of this size may be
    /// sent at `now_secs`. Throws ConfigError when the request alone exceeds
    /// the budget.
    double pace(long request_tokens, double now_secs) const;

    /// Atomically computes the delay and reserves the send at now + delay.
    double acquire(long request_tokens, double now_secs);

    void note_send(long request_tokens, double now_secs);

    long budget() const { return budget_; }

private:
    double pace_locked(long request_tokens, double now_secs) const;

    mutable std::mutex mutex_;
    long budget_;
    std::deque<std::pair<double, long>> sends_;  // (send time, tokens), ascending
};

/// Drives the agent/tool state graph for one prompt bundle: send the fixed
/// messages and tool schema; serve the chunk lines whenever the model invokes
/// the tool; stop at a final text answer, at max_agent_steps, or at the
/// deadline. `deadline` overrides cfg.run_deadline_secs when a run spans
/// several chunks under one clock.
RunOutcome run_agent_loop(const ProviderConfig& cfg, ChatProvider& provider,
                          const PromptBundle& bundle, RateLimiter& limiter,
                          std::optional<std::chrono::steady_clock::time_point> deadline = {});

/// Offline test double: answers from the dataset labels, dropping each true
/// anomaly with probability fn_rate and falsely reporting each normal variant
/// with probability fp_rate. Decisions are keyed on (seed, variant id), so
/// they are deterministic and independent of chunking.
class OracleMockProvider : public ChatProvider {
public:
    OracleMockProvider(LabeledDataset dataset, double fp_rate, double fn_rate,
                       std::uint64_t seed, DetectPolicy policy = {});

    ProviderReply complete(const std::vector<ChatMessage>& messages, const ToolSpec& tool,
                           AgentTranscript& transcript) override;

private:
    LabeledDataset dataset_;
    double fp_rate_;
    double fn_rate_;
    std::uint64_t seed_;
    DetectPolicy policy_;
};

/// Sleeps past the configured delay before every reply; used to exercise the
/// deadline rule.
class DelayMockProvider : public ChatProvider {
public:
    explicit DelayMockProvider(double delay_secs) : delay_secs_(delay_secs) {}

    ProviderReply complete(const std::vector<ChatMessage>& messages, const ToolSpec& tool,
                           AgentTranscript& transcript) override;

private:
    double delay_secs_;
};

/// Chat-completions JSON over HTTP(S) with function-call support. Credentials
/// are read from the environment variable named in the config and never
/// logged; request/response bodies are appended to the transcript.
class OpenAiCompatProvider : public ChatProvider {
public:
    explicit OpenAiCompatProvider(ProviderConfig cfg);

    ProviderReply complete(const std::vector<ChatMessage>& messages, const ToolSpec& tool,
                           AgentTranscript& transcript) override;

private:
    ProviderConfig cfg_;
    std::string api_key_;
    std::string scheme_;
    std::string host_;
    int port_ = 0;
    std::string base_path_;
};

}  // namespace reworkbench
