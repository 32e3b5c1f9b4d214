#include "planact/backend_replay.hpp"

#include <fstream>

#include "json.hpp"

namespace planact {

ReplayBackend ReplayBackend::load_file(const std::filesystem::path& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw GatewayError("cannot open replay transcript: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    std::vector<Entry> entries;
    for (const auto& ej : j.at("responses")) {
        Entry e;
        e.response = ej.at("response").get<std::string>();
        if (ej.contains("expected_prompt_prefix") && !ej["expected_prompt_prefix"].is_null()) {
            e.expected_prompt_prefix = ej["expected_prompt_prefix"].get<std::string>();
        }
        entries.push_back(std::move(e));
    }
    return ReplayBackend(std::move(entries), strict);
}

std::string ReplayBackend::fingerprint(const ChatRequest& req) {
    std::string out = "[" + to_string(req.component_tag) + "]\n";
    for (const auto& m : req.messages) {
        out += "== " + m.role + " ==\n" + m.content + "\n";
    }
    return out;
}

Completion ReplayBackend::complete(const ChatRequest& req) {
    if (position_ >= entries_.size()) {
        throw ReplayExhausted("replay transcript exhausted at request " +
                              std::to_string(position_ + 1));
    }
    const Entry& e = entries_[position_];
    if (strict_ && !e.expected_prompt_prefix.empty()) {
        std::string fp = fingerprint(req);
        if (fp.rfind(e.expected_prompt_prefix, 0) != 0) {
            throw GatewayError("replay prompt mismatch at request " + std::to_string(position_ + 1) +
                               ": expected prefix \"" + e.expected_prompt_prefix + "\"");
        }
    }
    ++position_;
    Completion c;
    c.text = e.response;
    c.prompt_tokens = approx_token_count(req.messages);
    c.completion_tokens = approx_token_count(c.text);
    return c;
}

}  // namespace planact
