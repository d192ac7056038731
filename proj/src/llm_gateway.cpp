#include "reworkbench/llm_gateway.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include <nlohmann/json.hpp>

#include "reworkbench/errors.hpp"
#include "reworkbench/rng.hpp"

namespace reworkbench {

namespace {

double unix_now() {
    return std::chrono::duration<double>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

double steady_secs(std::chrono::steady_clock::time_point tp) {
    return std::chrono::duration<double>(tp.time_since_epoch()).count();
}

constexpr double kWindowSecs = 60.0;

}  // namespace

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Completed: return "completed";
        case RunStatus::DeadlineExceeded: return "deadline_exceeded";
        case RunStatus::ProviderError: return "provider_error";
    }
    return "provider_error";
}

void AgentTranscript::add(std::string kind, std::string role, std::string content,
                          std::size_t payload_bytes, long token_estimate) {
    TranscriptEntry e;
    e.ts_unix = unix_now();
    if (!entries.empty()) e.ts_unix = std::max(e.ts_unix, entries.back().ts_unix);
    e.kind = std::move(kind);
    e.role = std::move(role);
    e.content = std::move(content);
    e.payload_bytes = payload_bytes;
    e.token_estimate = token_estimate;
    entries.push_back(std::move(e));
}

std::string AgentTranscript::to_jsonl() const {
    std::string out;
    for (const auto& e : entries) {
        nlohmann::json j{{"ts", e.ts_unix},
                         {"kind", e.kind},
                         {"role", e.role},
                         {"content", e.content},
                         {"payload_bytes", e.payload_bytes},
                         {"token_estimate", e.token_estimate}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

RateLimiter::RateLimiter(long tpm_budget) : budget_(tpm_budget) {
    if (tpm_budget <= 0) throw ConfigError("tpm budget must be positive");
}

double RateLimiter::pace_locked(long request_tokens, double now_secs) const {
    if (request_tokens > budget_) {
        throw ConfigError("request of " + std::to_string(request_tokens) +
                          " tokens can never fit a tpm budget of " + std::to_string(budget_));
    }
    // Find the earliest send time T >= now such that the token sum over the
    // trailing window (T - 60, T] stays within budget. Candidates are `now`
    // and the expiry instants of recorded sends.
    double t = now_secs;
    std::size_t first = 0;  // sends_[first..) are inside (t - 60, t]
    long sum = 0;
    for (std::size_t i = 0; i < sends_.size(); ++i) {
        if (sends_[i].first > t - kWindowSecs) {
            sum += sends_[i].second;
        } else {
            first = i + 1;
        }
    }
    while (sum + request_tokens > budget_ && first < sends_.size()) {
        t = sends_[first].first + kWindowSecs;
        sum -= sends_[first].second;
        ++first;
    }
    if (sum + request_tokens > budget_) {
        throw ConfigError("rate limiter cannot satisfy the request");  // unreachable
    }
    return std::max(0.0, t - now_secs);
}

double RateLimiter::pace(long request_tokens, double now_secs) const {
    std::lock_guard<std::mutex> lock(mutex_);
    return pace_locked(request_tokens, now_secs);
}

double RateLimiter::acquire(long request_tokens, double now_secs) {
    std::lock_guard<std::mutex> lock(mutex_);
    const double wait = pace_locked(request_tokens, now_secs);
    const double at = now_secs + wait;
    // keep ascending order; a reservation can land past queued entries
    auto it = std::upper_bound(sends_.begin(), sends_.end(), at,
                               [](double t, const auto& s) { return t < s.first; });
    sends_.insert(it, {at, request_tokens});
    // trim entries that can no longer affect any future window
    while (!sends_.empty() && sends_.front().first <= at - kWindowSecs) sends_.pop_front();
    return wait;
}

void RateLimiter::note_send(long request_tokens, double now_secs) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = std::upper_bound(sends_.begin(), sends_.end(), now_secs,
                               [](double t, const auto& s) { return t < s.first; });
    sends_.insert(it, {now_secs, request_tokens});
}

RunOutcome run_agent_loop(const ProviderConfig& cfg, ChatProvider& provider,
                          const PromptBundle& bundle, RateLimiter& limiter,
                          std::optional<std::chrono::steady_clock::time_point> deadline) {
    using clock = std::chrono::steady_clock;
    const auto deadline_tp =
        deadline.value_or(clock::now() + std::chrono::duration_cast<clock::duration>(
                                             std::chrono::duration<double>(
                                                 cfg.run_deadline_secs)));

    RunOutcome outcome;
    std::vector<ChatMessage> messages{bundle.system, bundle.human};
    outcome.transcript.add("message", "system", bundle.system.content);
    outcome.transcript.add("message", "human", bundle.human.content);

    const auto past_deadline = [&] { return clock::now() >= deadline_tp; };
    const auto give_up_deadline = [&](RunOutcome& o) {
        o.status = RunStatus::DeadlineExceeded;
        o.transcript.add("note", "", "run deadline exceeded");
        return o;
    };

    for (int step = 0; step < cfg.max_agent_steps; ++step) {
        if (past_deadline()) return give_up_deadline(outcome);

        const long request_tokens = estimate_request_tokens(messages, bundle.tool);
        double wait = 0.0;
        try {
            wait = limiter.acquire(request_tokens, steady_secs(clock::now()));
        } catch (const ConfigError& e) {
            outcome.status = RunStatus::ProviderError;
            outcome.error = e.what();
            outcome.transcript.add("note", "", outcome.error);
            return outcome;
        }
        if (wait > 0.0) {
            outcome.transcript.add("note", "",
                                   "pacing wait of " + std::to_string(wait) + " s");
            std::this_thread::sleep_for(std::chrono::duration<double>(wait));
        }
        if (past_deadline()) return give_up_deadline(outcome);

        outcome.transcript.add("request", "", "chat completion request", 0, request_tokens);
        ProviderReply reply;
        try {
            reply = provider.complete(messages, bundle.tool, outcome.transcript);
        } catch (const std::exception& e) {
            outcome.status = RunStatus::ProviderError;
            outcome.error = e.what();
            outcome.transcript.add("note", "", outcome.error);
            return outcome;
        }
        // A reply that lands past the deadline counts as a timed-out run.
        if (past_deadline()) return give_up_deadline(outcome);

        if (reply.tool_call) {
            if (reply.tool_call->name != bundle.tool.name) {
                outcome.status = RunStatus::ProviderError;
                outcome.error = "provider requested unknown tool '" + reply.tool_call->name + "'";
                outcome.transcript.add("note", "", outcome.error);
                return outcome;
            }
            ChatMessage call{ChatRole::Ai, "", reply.tool_call->id, reply.tool_call->name};
            messages.push_back(call);

            std::string payload;
            for (const auto& line : bundle.chunk) {
                payload += line;
                payload += '\n';
            }
            if (!payload.empty()) payload.pop_back();
            outcome.transcript.add("tool_invocation", "ai", reply.tool_call->name,
                                   payload.size());
            ChatMessage result{ChatRole::FunctionResult, payload, reply.tool_call->id,
                               reply.tool_call->name};
            outcome.transcript.add("message", "function_result", result.content,
                                   result.content.size());
            messages.push_back(std::move(result));
            continue;
        }

        messages.push_back(ChatMessage{ChatRole::Ai, reply.text});
        outcome.transcript.add("message", "ai", reply.text);
        outcome.status = RunStatus::Completed;
        outcome.final_text = reply.text;
        return outcome;
    }

    outcome.status = RunStatus::ProviderError;
    outcome.error = "no final answer within " + std::to_string(cfg.max_agent_steps) +
                    " agent steps";
    outcome.transcript.add("note", "", outcome.error);
    return outcome;
}

OracleMockProvider::OracleMockProvider(LabeledDataset dataset, double fp_rate,
                                       double fn_rate, std::uint64_t seed,
                                       DetectPolicy policy)
    : dataset_(std::move(dataset)),
      fp_rate_(fp_rate),
      fn_rate_(fn_rate),
      seed_(seed),
      policy_(policy) {
    if (fp_rate < 0.0 || fp_rate > 1.0 || fn_rate < 0.0 || fn_rate > 1.0) {
        throw ConfigError("mock rates must be in [0, 1]");
    }
    std::sort(dataset_.items.begin(), dataset_.items.end(),
              [](const LabeledVariant& a, const LabeledVariant& b) { return a.id < b.id; });
}

ProviderReply OracleMockProvider::complete(const std::vector<ChatMessage>& messages,
                                           const ToolSpec& tool, AgentTranscript&) {
    const auto payload = std::find_if(
        messages.rbegin(), messages.rend(),
        [](const ChatMessage& m) { return m.role == ChatRole::FunctionResult; });
    if (payload == messages.rend()) {
        return ProviderReply{ToolCallRequest{"call_0", tool.name}, ""};
    }

    std::string answer;
    std::string_view rest = payload->content;
    while (!rest.empty()) {
        const std::size_t nl = rest.find('\n');
        const std::string_view line = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        if (line.empty()) continue;

        ParsedVariantLine parsed;
        try {
            parsed = parse_variant_line(line);
        } catch (const ParseError&) {
            continue;
        }
        const auto it = std::lower_bound(
            dataset_.items.begin(), dataset_.items.end(), parsed.id,
            [](const LabeledVariant& lv, std::uint64_t id) { return lv.id < id; });
        if (it == dataset_.items.end() || it->id != parsed.id) continue;

        // One Bernoulli decision per (seed, id), independent of chunking.
        const double u = mix64_unit(seed_ ^ mix64(it->id));
        if (it->label == Label::Rework) {
            if (u < fn_rate_) continue;  // dropped: false negative
            std::string claim;
            if (const auto finding = find_rework(it->variant, policy_)) {
                claim = explain_finding(it->variant, *finding);
            } else {
                // File labels override the oracle; render the whole variant.
                for (const auto& act : it->variant.activities) {
                    if (!claim.empty()) claim += "->";
                    claim += act.name;
                }
            }
            answer += std::to_string(it->id) + "# " + claim + "\n";
        } else if (u < fp_rate_) {
            const std::string& name = it->variant.activities.front().name;
            answer += std::to_string(it->id) + "# " + name + "->" + name + "\n";
        }
    }
    if (!answer.empty() && answer.back() == '\n') answer.pop_back();
    if (answer.empty()) answer = "No anomalies found.";
    return ProviderReply{std::nullopt, std::move(answer)};
}

ProviderReply DelayMockProvider::complete(const std::vector<ChatMessage>&, const ToolSpec&,
                                          AgentTranscript&) {
    std::this_thread::sleep_for(std::chrono::duration<double>(delay_secs_));
    return ProviderReply{std::nullopt, "No anomalies found."};
}

}  // namespace reworkbench
