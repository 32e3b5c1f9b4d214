#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "planact/domain.hpp"

namespace planact {

struct GatewayError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BackendUnavailable : GatewayError {
    using GatewayError::GatewayError;
};
struct ReplayExhausted : GatewayError {
    using GatewayError::GatewayError;
};
struct OracleUnsupported : GatewayError {
    using GatewayError::GatewayError;
};
struct MissingVariable : GatewayError {
    explicit MissingVariable(const std::string& variable)
        : GatewayError("unbound template variable: " + variable), name(variable) {}
    std::string name;
};

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;
};

struct Decoding {
    double temperature = 0.0;
    int max_tokens = 1024;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;  // first message has role "system"
    Component component_tag = Component::actor;
    Decoding decoding;
};

struct Completion {
    std::string text;
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual Completion complete(const ChatRequest& req) = 0;
    virtual std::string name() const = 0;
};

/// Per-episode front door: forwards requests to the backend and records
/// token usage under the request's component tag.
class Gateway {
public:
    explicit Gateway(Backend& backend) : backend_(backend) {}

    Completion complete(const ChatRequest& req) {
        Completion c = backend_.complete(req);
        ledger_.add(req.component_tag, c.prompt_tokens, c.completion_tokens);
        return c;
    }

    const TokenLedger& ledger() const { return ledger_; }
    Backend& backend() { return backend_; }

private:
    Backend& backend_;
    TokenLedger ledger_;
};

/// Whitespace-delimited token count; the stand-in used when a backend
/// reports no usage numbers.
long long approx_token_count(std::string_view text);
long long approx_token_count(const std::vector<ChatMessage>& messages);

/// Text template with {{ variable }} placeholders. Rendering binds every
/// placeholder; an unbound variable raises MissingVariable.
class PromptTemplate {
public:
    PromptTemplate() = default;
    PromptTemplate(std::string name, std::string body);

    const std::string& name() const { return name_; }
    const std::string& body() const { return body_; }
    const std::set<std::string>& required_variables() const { return required_; }

    std::string render(const std::map<std::string, std::string>& bindings) const;

    static PromptTemplate load_file(const std::filesystem::path& path);

private:
    std::string name_;
    std::string body_;
    std::set<std::string> required_;
};

/// Loads *.txt templates from <data_dir>/templates, keyed by file stem.
class TemplateStore {
public:
    explicit TemplateStore(const std::filesystem::path& data_dir);

    const PromptTemplate& get(const std::string& name) const;
    bool has(const std::string& name) const { return templates_.count(name) > 0; }
    std::vector<std::string> names() const;

    /// The five verification questions, in prompt order.
    const std::vector<std::string>& verification_questions() const { return questions_; }

private:
    std::map<std::string, PromptTemplate> templates_;
    std::vector<std::string> questions_;
};

}  // namespace planact
