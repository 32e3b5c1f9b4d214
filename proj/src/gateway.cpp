#include "planact/gateway.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace planact {

long long approx_token_count(std::string_view text) {
    long long count = 0;
    bool in_token = false;
    for (char c : text) {
        bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r';
        if (!ws && !in_token) ++count;
        in_token = !ws;
    }
    return count;
}

long long approx_token_count(const std::vector<ChatMessage>& messages) {
    long long count = 0;
    for (const auto& m : messages) count += approx_token_count(m.content);
    return count;
}

namespace {

const std::regex kPlaceholder(R"(\{\{\s*([A-Za-z0-9_][A-Za-z0-9_ ]*?)\s*\}\})");

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

PromptTemplate::PromptTemplate(std::string name, std::string body)
    : name_(std::move(name)), body_(std::move(body)) {
    for (auto it = std::sregex_iterator(body_.begin(), body_.end(), kPlaceholder);
         it != std::sregex_iterator(); ++it) {
        required_.insert(trim((*it)[1].str()));
    }
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& bindings) const {
    for (const auto& var : required_) {
        if (!bindings.count(var)) throw MissingVariable(var);
    }
    std::string out;
    out.reserve(body_.size());
    auto begin = std::sregex_iterator(body_.begin(), body_.end(), kPlaceholder);
    size_t last = 0;
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        out.append(body_, last, static_cast<size_t>(m.position()) - last);
        out += bindings.at(trim(m[1].str()));
        last = static_cast<size_t>(m.position() + m.length());
    }
    out.append(body_, last, body_.size() - last);
    return out;
}

PromptTemplate PromptTemplate::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw GatewayError("cannot open template file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string body = ss.str();
    // strip one trailing newline added by editors; templates control spacing
    if (!body.empty() && body.back() == '\n') body.pop_back();
    return PromptTemplate(path.stem().string(), body);
}

TemplateStore::TemplateStore(const std::filesystem::path& data_dir) {
    auto dir = data_dir / "templates";
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".txt") continue;
        auto t = PromptTemplate::load_file(entry.path());
        templates_[t.name()] = std::move(t);
    }
    std::ifstream qfile(dir / "verification_questions.list");
    if (qfile) {
        std::string line;
        while (std::getline(qfile, line)) {
            if (!trim(line).empty()) questions_.push_back(line);
        }
    }
    if (questions_.empty()) throw GatewayError("verification_questions.list missing or empty");
}

const PromptTemplate& TemplateStore::get(const std::string& name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw GatewayError("unknown template: " + name);
    return it->second;
}

std::vector<std::string> TemplateStore::names() const {
    std::vector<std::string> out;
    for (const auto& [name, t] : templates_) out.push_back(name);
    return out;
}

}  // namespace planact
