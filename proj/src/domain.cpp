#include "planact/domain.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace planact {

namespace {

bool valid_token(const std::string& t) {
    if (t.empty()) return false;
    return std::all_of(t.begin(), t.end(), [](unsigned char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
}

std::string lower_strip(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    for (unsigned char c : in) {
        if (std::isspace(c)) continue;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

void fail(std::string* error, const std::string& message) {
    if (error) *error = message;
}

}  // namespace

std::string Predicate::render() const {
    if (args.empty()) return name;
    std::string out = name;
    out.push_back('(');
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) out.push_back(',');
        out += args[i];
    }
    out.push_back(')');
    return out;
}

std::optional<Predicate> canonical_predicate(std::string_view text, std::string* error) {
    std::string s = lower_strip(text);
    if (s.empty()) {
        fail(error, "empty predicate text");
        return std::nullopt;
    }
    auto open = s.find('(');
    if (open == std::string::npos) {
        if (s.find(')') != std::string::npos) {
            fail(error, "unbalanced parentheses");
            return std::nullopt;
        }
        if (!valid_token(s)) {
            fail(error, "invalid name token: " + s);
            return std::nullopt;
        }
        return Predicate{s, {}};
    }
    if (s.back() != ')' || s.find('(', open + 1) != std::string::npos ||
        s.find(')') != s.size() - 1) {
        fail(error, "unbalanced parentheses");
        return std::nullopt;
    }
    std::string name = s.substr(0, open);
    if (!valid_token(name)) {
        fail(error, "invalid name token: " + name);
        return std::nullopt;
    }
    std::string body = s.substr(open + 1, s.size() - open - 2);
    Predicate p{name, {}};
    size_t pos = 0;
    while (true) {
        size_t comma = body.find(',', pos);
        std::string arg = body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!valid_token(arg)) {
            fail(error, "empty or invalid argument");
            return std::nullopt;
        }
        p.args.push_back(arg);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (p.args.size() > 3) {
        fail(error, "too many arguments (max 3)");
        return std::nullopt;
    }
    return p;
}

ExplorerState::Entry& ExplorerState::find_or_add(const std::string& name) {
    for (auto& e : discovered) {
        if (e.name == name) return e;
    }
    discovered.push_back(Entry{name, "", false, false, {}});
    return discovered.back();
}

const ExplorerState::Entry* ExplorerState::find(const std::string& name) const {
    for (const auto& e : discovered) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

namespace {

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

void append_explorer_sections(std::ostringstream& out, const SymbolicMemory& m) {
    out << "[Agent]\n";
    if (m.agent_location) {
        out << "Location: at " << *m.agent_location << "\n";
    } else {
        out << "Location: unknown\n";
    }
    out << "Inventory:\n";
    bool any_inv = false;
    for (const auto& e : m.explorer.discovered) {
        if (!e.is_receptacle && e.at == "inventory") {
            out << "  - Obj: " << e.name << "\n";
            any_inv = true;
        }
    }
    if (!any_inv) out << "  (None)\n";

    out << "[Visited Locations]\n";
    if (m.explorer.visited.empty()) {
        out << "  (None)\n";
    } else {
        for (const auto& loc : m.explorer.visited) out << "  - Loc: " << loc << "\n";
    }

    out << "[Discovered Objects]\n";
    bool any_disc = false;
    for (const auto& e : m.explorer.discovered) {
        if (e.is_receptacle) {
            if (!e.contents_known) continue;
            out << "  - " << e.name << ": contains=[";
            for (size_t i = 0; i < e.contents.size(); ++i) {
                if (i) out << ", ";
                out << e.contents[i];
            }
            out << "]\n";
            any_disc = true;
            continue;
        }
        // Objects sitting in a receptacle with known contents are already
        // shown through that receptacle's contains=[...] line.
        if (const auto* holder = m.explorer.find(e.at);
            holder && holder->is_receptacle && holder->contents_known) {
            continue;
        }
        out << "  - Obj: " << e.name << " (at: " << e.at << ")\n";
        any_disc = true;
    }
    if (!any_disc) out << "  (None)\n";
}

}  // namespace

std::string planning_summary(const SymbolicMemory& m) {
    std::ostringstream out;
    out << "### " << upper(m.domain_name) << " Memory Summary (Step " << m.step << ") ###\n";
    bool explorer_domain = !m.explorer.empty() ||
                           m.domain_name == "adventure" || m.domain_name == "household";
    if (explorer_domain) {
        append_explorer_sections(out, m);
    } else {
        if (m.agent_location) out << "Agent Location: " << *m.agent_location << "\n";
        if (!m.holding.empty()) {
            out << "Holding: {";
            bool first = true;
            for (const auto& [manip, obj] : m.holding) {
                if (!first) out << ", ";
                first = false;
                out << manip << ": " << (obj ? *obj : "none");
            }
            out << "}\n";
        }
    }
    out << "State:\n";
    if (m.predicates.empty()) {
        out << "  (None)\n";
    } else {
        for (const auto& p : m.predicates) out << "  - " << p.render() << "\n";
    }
    out << "### END SUMMARY ###";
    return out.str();
}

std::vector<std::string> TextualMemory::append_facts(const std::vector<std::string>& facts, int step_k) {
    std::vector<std::string> added;
    for (const auto& f : facts) {
        if (f.empty()) continue;
        bool dup = std::any_of(learned_facts.begin(), learned_facts.end(),
                               [&](const LearnedFact& lf) { return lf.text == f; });
        if (dup) continue;
        learned_facts.push_back(LearnedFact{step_k, f});
        added.push_back(f);
    }
    return added;
}

std::string to_string(SubgoalStatus s) {
    switch (s) {
        case SubgoalStatus::completed: return "Completed";
        case SubgoalStatus::replan_requested: return "Replan requested";
        case SubgoalStatus::timeout: return "Timeout";
    }
    return "Unknown";
}

std::string to_string(Component c) {
    switch (c) {
        case Component::planner: return "planner";
        case Component::actor: return "actor";
        case Component::verification: return "verification";
        case Component::synthesis: return "synthesis";
    }
    return "unknown";
}

void TokenLedger::add(Component c, long long prompt_tokens, long long completion_tokens) {
    auto& counts = by_component[c];
    counts.prompt += prompt_tokens;
    counts.completion += completion_tokens;
}

TokenCounts TokenLedger::component(Component c) const {
    auto it = by_component.find(c);
    return it == by_component.end() ? TokenCounts{} : it->second;
}

TokenCounts TokenLedger::total() const {
    TokenCounts t;
    for (const auto& [c, counts] : by_component) {
        t.prompt += counts.prompt;
        t.completion += counts.completion;
    }
    return t;
}

std::string render_belief(const BeliefState& b, const BeliefContext& ctx) {
    std::ostringstream out;
    out << planning_summary(b.symbolic) << "\n\n";

    out << "[Current Plan]\n";
    out << "Subgoals:\n";
    if (ctx.latest_plan && !ctx.latest_plan->subgoals.empty()) {
        for (size_t i = 0; i < ctx.latest_plan->subgoals.size(); ++i) {
            out << (i + 1) << ". " << ctx.latest_plan->subgoals[i] << "\n";
        }
    } else {
        out << "(None)\n";
    }
    out << b.textual.status_line << "\n";

    out << "[Subgoal Verification]\n";
    out << "- Description: " << (ctx.last_subgoal ? ctx.last_subgoal->description : "(None)") << "\n";
    out << "- Outcome: " << (ctx.last_outcome ? to_string(*ctx.last_outcome) : "(None)") << "\n";
    out << "- Justification: "
        << (b.textual.justification.empty() ? "(None)" : b.textual.justification) << "\n";

    out << "[Learned Facts]\n";
    if (b.textual.learned_facts.empty()) {
        out << "(None)";
    } else {
        for (size_t i = 0; i < b.textual.learned_facts.size(); ++i) {
            if (i) out << "\n";
            out << "- " << b.textual.learned_facts[i].text;
        }
    }
    return out.str();
}

}  // namespace planact
