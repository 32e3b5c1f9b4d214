#include "planact/backend_http.hpp"

#include <chrono>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace planact {

using nlohmann::json;

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    const std::string& url = config_.base_url;
    auto scheme_end = url.find("://");
    size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) {
        origin_ = url;
        path_prefix_ = "";
    } else {
        origin_ = url.substr(0, path_start);
        path_prefix_ = url.substr(path_start);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }
}

Completion HttpBackend::complete(const ChatRequest& req) {
    json body;
    body["model"] = config_.model;
    body["temperature"] = req.decoding.temperature;
    body["max_tokens"] = req.decoding.max_tokens;
    body["messages"] = json::array();
    for (const auto& m : req.messages) {
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    }
    std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            auto delay = std::chrono::milliseconds(config_.backoff_base_ms << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        httplib::Client client(origin_);
        client.set_connection_timeout(config_.timeout_seconds);
        client.set_read_timeout(config_.timeout_seconds);
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        }
        auto res = client.Post(path_prefix_ + "/chat/completions", headers, payload,
                               "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw BackendUnavailable("chat completion failed with status " +
                                     std::to_string(res->status) + ": " + res->body);
        }
        json rj = json::parse(res->body, nullptr, false);
        if (rj.is_discarded() || !rj.contains("choices") || rj["choices"].empty()) {
            throw BackendUnavailable("malformed chat completion response: " + res->body);
        }
        Completion c;
        c.text = rj["choices"][0]["message"].value("content", "");
        if (rj.contains("usage")) {
            c.prompt_tokens = rj["usage"].value("prompt_tokens", 0LL);
            c.completion_tokens = rj["usage"].value("completion_tokens", 0LL);
        }
        if (c.prompt_tokens == 0) c.prompt_tokens = approx_token_count(req.messages);
        if (c.completion_tokens == 0) c.completion_tokens = approx_token_count(c.text);
        return c;
    }
    throw BackendUnavailable("chat completion failed after " +
                             std::to_string(config_.max_retries + 1) + " attempts (" +
                             last_error + ")");
}

}  // namespace planact
