#pragma once

#include <string>

#include "planact/gateway.hpp"

namespace planact {

struct HttpBackendConfig {
    std::string base_url;  // e.g. "http://localhost:8080/v1"
    std::string model;
    std::string api_key;        // empty = no Authorization header
    int max_retries = 2;        // retries after the first attempt
    int backoff_base_ms = 250;  // doubled per retry
    int timeout_seconds = 120;
};

/// OpenAI-compatible chat-completions client. Transient failures
/// (transport errors, 429, 5xx) are retried with exponential backoff;
/// after the retry budget a BackendUnavailable error is raised.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);

    Completion complete(const ChatRequest& req) override;
    std::string name() const override { return "http"; }

private:
    HttpBackendConfig config_;
    std::string origin_;       // scheme://host[:port]
    std::string path_prefix_;  // e.g. "/v1"
};

}  // namespace planact
