#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "planact/gateway.hpp"

namespace planact::testing {

inline std::filesystem::path data_dir() { return PLANACT_TEST_DATA_DIR; }

/// Returns canned responses in order and records every request.
class ScriptedBackend final : public Backend {
public:
    explicit ScriptedBackend(std::vector<std::string> responses)
        : responses_(std::move(responses)) {}

    Completion complete(const ChatRequest& req) override {
        requests.push_back(req);
        if (next_ >= responses_.size()) {
            throw ReplayExhausted("scripted backend exhausted at request " +
                                  std::to_string(next_ + 1));
        }
        Completion c;
        c.text = responses_[next_++];
        c.prompt_tokens = approx_token_count(req.messages);
        c.completion_tokens = approx_token_count(c.text);
        return c;
    }

    std::string name() const override { return "scripted"; }

    std::vector<ChatRequest> requests;

private:
    std::vector<std::string> responses_;
    size_t next_ = 0;
};

/// Computes a response per request via a callback (stateful policies).
class CallbackBackend final : public Backend {
public:
    using Fn = std::function<std::string(const ChatRequest&)>;
    explicit CallbackBackend(Fn fn) : fn_(std::move(fn)) {}

    Completion complete(const ChatRequest& req) override {
        requests.push_back(req);
        by_tag[req.component_tag] += 1;
        Completion c;
        c.text = fn_(req);
        c.prompt_tokens = approx_token_count(req.messages);
        c.completion_tokens = approx_token_count(c.text);
        return c;
    }

    std::string name() const override { return "callback"; }

    std::vector<ChatRequest> requests;
    std::map<Component, int> by_tag;

private:
    Fn fn_;
};

}  // namespace planact::testing
