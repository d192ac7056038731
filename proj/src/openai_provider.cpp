#include <cmath>
#include <cstdlib>
#include <memory>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "reworkbench/errors.hpp"
#include "reworkbench/llm_gateway.hpp"

namespace reworkbench {

namespace {

std::string wire_role(ChatRole role) {
    switch (role) {
        case ChatRole::System: return "system";
        case ChatRole::Human: return "user";
        case ChatRole::Ai: return "assistant";
        case ChatRole::FunctionResult: return "tool";
    }
    return "user";
}

nlohmann::json to_wire_message(const ChatMessage& m) {
    nlohmann::json j{{"role", wire_role(m.role)}, {"content", m.content}};
    if (m.role == ChatRole::Ai && !m.tool_call_id.empty()) {
        j["tool_calls"] = nlohmann::json::array(
            {{{"id", m.tool_call_id},
              {"type", "function"},
              {"function", {{"name", m.tool_name}, {"arguments", "{}"}}}}});
        if (m.content.empty()) j["content"] = nullptr;
    }
    if (m.role == ChatRole::FunctionResult) j["tool_call_id"] = m.tool_call_id;
    return j;
}

}  // namespace

OpenAiCompatProvider::OpenAiCompatProvider(ProviderConfig cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.credential_env.empty()) {
        const char* key = std::getenv(cfg_.credential_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw ConfigError("credential environment variable '" + cfg_.credential_env +
                              "' is not set");
        }
        api_key_ = key;
    }

    std::string rest = cfg_.endpoint;
    const auto scheme_end = rest.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint must start with http:// or https://");
    }
    scheme_ = rest.substr(0, scheme_end);
    if (scheme_ != "http" && scheme_ != "https") {
        throw ConfigError("unsupported endpoint scheme '" + scheme_ + "'");
    }
    rest = rest.substr(scheme_end + 3);
    const auto path_start = rest.find('/');
    std::string authority = path_start == std::string::npos ? rest : rest.substr(0, path_start);
    base_path_ = path_start == std::string::npos ? "" : rest.substr(path_start);
    while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
    const auto colon = authority.rfind(':');
    if (colon != std::string::npos) {
        port_ = std::stoi(authority.substr(colon + 1));
        host_ = authority.substr(0, colon);
    } else {
        port_ = scheme_ == "https" ? 443 : 80;
        host_ = authority;
    }
    if (host_.empty()) throw ConfigError("endpoint is missing a host");
}

ProviderReply OpenAiCompatProvider::complete(const std::vector<ChatMessage>& messages,
                                             const ToolSpec& tool,
                                             AgentTranscript& transcript) {
    nlohmann::json body;
    body["model"] = cfg_.model;
    body["messages"] = nlohmann::json::array();
    for (const auto& m : messages) body["messages"].push_back(to_wire_message(m));
    body["tools"] = nlohmann::json::array(
        {{{"type", "function"},
          {"function",
           {{"name", tool.name},
            {"description", tool.description},
            {"parameters", nlohmann::json::parse(tool.parameters_json)}}}}});

    const std::string payload = body.dump();
    // Bodies are logged verbatim; the bearer token travels only in the header
    // and never reaches the transcript.
    transcript.add("http_request", "", payload, payload.size());

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    const auto timeout = std::chrono::milliseconds(
        static_cast<long long>(std::lround(cfg_.request_timeout_secs * 1000.0)));
    httplib::Result res;
    const std::string path = base_path_ + "/chat/completions";
    if (scheme_ == "https") {
        httplib::SSLClient client(host_, port_);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        res = client.Post(path, headers, payload, "application/json");
    } else {
        httplib::Client client(host_, port_);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        res = client.Post(path, headers, payload, "application/json");
    }

    if (!res) {
        throw GatewayError("transport failure talking to " + host_ + ": " +
                           httplib::to_string(res.error()));
    }
    transcript.add("http_response", "", res->body, res->body.size());
    if (res->status != 200) {
        throw GatewayError("provider returned HTTP " + std::to_string(res->status) + ": " +
                           res->body.substr(0, 512));
    }

    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw GatewayError(std::string("provider returned unparseable JSON: ") + e.what());
    }
    if (!reply.contains("choices") || reply["choices"].empty()) {
        throw GatewayError("provider reply carries no choices");
    }
    const auto& message = reply["choices"][0]["message"];
    if (message.contains("tool_calls") && message["tool_calls"].is_array() &&
        !message["tool_calls"].empty()) {
        const auto& call = message["tool_calls"][0];
        return ProviderReply{
            ToolCallRequest{call.value("id", "call_0"),
                            call.contains("function") ? call["function"].value("name", "")
                                                      : call.value("name", "")},
            ""};
    }
    if (!message.contains("content") || message["content"].is_null()) {
        throw GatewayError("provider reply has neither content nor tool calls");
    }
    return ProviderReply{std::nullopt, message["content"].get<std::string>()};
}

}  // namespace reworkbench
