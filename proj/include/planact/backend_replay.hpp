#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "planact/gateway.hpp"

namespace planact {

/// Deterministic backend replaying a recorded transcript. Matching is
/// positional: the i-th request gets the i-th response. In strict mode a
/// stored prompt prefix must also match the rendered request.
class ReplayBackend final : public Backend {
public:
    struct Entry {
        std::string expected_prompt_prefix;  // empty = not checked
        std::string response;
    };

    ReplayBackend(std::vector<Entry> entries, bool strict = false)
        : entries_(std::move(entries)), strict_(strict) {}

    static ReplayBackend load_file(const std::filesystem::path& path, bool strict = false);

    Completion complete(const ChatRequest& req) override;
    std::string name() const override { return "replay"; }

    size_t position() const { return position_; }

    /// Canonical request rendering used for prefix checks.
    static std::string fingerprint(const ChatRequest& req);

private:
    std::vector<Entry> entries_;
    bool strict_ = false;
    size_t position_ = 0;
};

}  // namespace planact
