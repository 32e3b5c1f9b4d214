#include "planact/ruleset.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace planact {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

/// Splits "a soapbar 1, a soapbar 2 and a soapbottle 1" into item names.
/// "nothing" yields an empty list.
std::vector<std::string> split_item_list(const std::string& raw) {
    std::vector<std::string> items;
    std::string text = trim(raw);
    if (text.empty() || lower(text) == "nothing") return items;
    // Normalize " and " to the comma separator, then split.
    std::string norm;
    size_t pos = 0;
    while (pos < text.size()) {
        if (text.compare(pos, 5, " and ") == 0) {
            norm += ", ";
            pos += 5;
        } else {
            norm.push_back(text[pos++]);
        }
    }
    std::stringstream ss(norm);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (part.rfind("an ", 0) == 0) part = part.substr(3);
        else if (part.rfind("a ", 0) == 0) part = part.substr(2);
        part = trim(part);
        if (!part.empty()) items.push_back(part);
    }
    return items;
}

/// A single regex match with its capture groups resolved.
struct MatchedEffect {
    const RulePattern::Effect* effect;
    std::vector<std::string> groups;  // groups[0] = whole match
    size_t pattern_index;
};

std::string resolve_arg(const std::string& templ, const std::vector<std::string>& groups,
                        const std::optional<std::string>& location) {
    if (templ == "@location") return location.value_or("");
    std::string out;
    for (size_t i = 0; i < templ.size(); ++i) {
        if (templ[i] == '$' && i + 1 < templ.size() && std::isdigit(static_cast<unsigned char>(templ[i + 1]))) {
            size_t idx = static_cast<size_t>(templ[i + 1] - '0');
            if (idx < groups.size()) out += groups[idx];
            ++i;
        } else {
            out.push_back(templ[i]);
        }
    }
    return out;
}

struct BlocksObservations {
    std::optional<std::string> held;
    bool arm_empty_seen = false;
    std::map<std::string, std::string> on;  // top -> support
    std::set<std::string> on_table;
    std::set<std::string> clear;
    std::set<std::string> not_clear;
};

struct GripperObservations {
    std::optional<std::string> location;
    std::map<std::string, std::string> carrying;  // gripper -> ball
    std::set<std::string> freed;
    std::vector<std::pair<std::string, std::string>> ball_at;  // ball -> room, in match order
};

bool blocks_positional_name(const std::string& name) {
    return name == "on" || name == "on_table" || name == "clear" || name == "not_clear";
}

/// Rebuild-for-mentioned-blocks update. Mirrors the reference update
/// semantics: holding is resolved first (with carry-forward), every block
/// mentioned in the observation has its positional/clearness predicates
/// retracted and rebuilt, and unmentioned blocks persist.
void apply_blocksworld(SymbolicMemory& m, const BlocksObservations& obs) {
    std::optional<std::string> held;
    bool arm_empty;
    if (obs.held) {
        held = lower(*obs.held);
        arm_empty = false;
    } else if (obs.arm_empty_seen) {
        held = std::nullopt;
        arm_empty = true;
    } else {
        auto it = m.holding.find("arm");
        held = (it != m.holding.end()) ? it->second : std::nullopt;
        arm_empty = !held.has_value();
    }
    m.holding["arm"] = held;

    std::set<std::string> mentioned;
    std::set<std::string> underneath;
    for (const auto& [top, support] : obs.on) {
        mentioned.insert(top);
        mentioned.insert(support);
        underneath.insert(support);
    }
    for (const auto& b : obs.on_table) mentioned.insert(b);
    for (const auto& b : obs.clear) mentioned.insert(b);
    for (const auto& b : obs.not_clear) mentioned.insert(b);
    if (held) mentioned.insert(*held);

    std::set<Predicate> fresh;
    fresh.insert(Predicate{arm_empty ? "arm_empty" : "arm_not_empty", {}});

    for (const auto& block : mentioned) {
        if (held && block == *held) {
            // held: no positional predicate
        } else if (auto it = obs.on.find(block); it != obs.on.end()) {
            fresh.insert(Predicate{"on", {block, it->second}});
        } else if (obs.on_table.count(block)) {
            if (!underneath.count(block)) {
                fresh.insert(Predicate{"on_table", {block}});
            }
        }

        if (obs.not_clear.count(block)) {
            fresh.insert(Predicate{"not_clear", {block}});
        } else if (held && block == *held) {
            fresh.insert(Predicate{"clear", {block}});
        } else if (obs.clear.count(block)) {
            fresh.insert(Predicate{"clear", {block}});
        } else if (underneath.count(block)) {
            fresh.insert(Predicate{"not_clear", {block}});
        } else {
            fresh.insert(Predicate{"clear", {block}});
        }
    }

    std::erase_if(m.predicates, [&](const Predicate& p) {
        if (p.name == "arm_empty" || p.name == "arm_not_empty") return true;
        if (!blocks_positional_name(p.name)) return false;
        return std::any_of(p.args.begin(), p.args.end(),
                           [&](const std::string& a) { return mentioned.count(a) > 0; });
    });
    m.predicates.insert(fresh.begin(), fresh.end());
}

void apply_gripper(SymbolicMemory& m, const GripperObservations& obs) {
    for (const auto& [g, ball] : obs.carrying) m.holding[lower(g)] = lower(ball);
    for (const auto& g : obs.freed) m.holding[lower(g)] = std::nullopt;
    if (obs.location) m.agent_location = lower(*obs.location);

    std::set<std::string> held_balls;
    for (const auto& [g, ball] : m.holding) {
        if (ball) held_balls.insert(*ball);
    }
    std::set<std::string> mentioned;
    for (const auto& [ball, room] : obs.ball_at) mentioned.insert(lower(ball));
    for (const auto& [g, ball] : obs.carrying) mentioned.insert(lower(ball));
    for (const auto& b : held_balls) mentioned.insert(b);

    std::erase_if(m.predicates, [&](const Predicate& p) {
        return p.name == "at" && !p.args.empty() && mentioned.count(p.args[0]) > 0;
    });
    for (const auto& [ball, room] : obs.ball_at) {
        std::string b = lower(ball);
        if (held_balls.count(b)) continue;  // holding wins over positional text
        // last mention of a ball wins within one observation
        std::erase_if(m.predicates, [&](const Predicate& p) {
            return p.name == "at" && !p.args.empty() && p.args[0] == b;
        });
        m.predicates.insert(Predicate{"at", {b, lower(room)}});
    }
}

void apply_explorer_effect(SymbolicMemory& m, const std::string& op,
                           const std::map<std::string, std::string>& raw_args,
                           const std::vector<std::string>& groups) {
    auto arg = [&](const std::string& key) {
        auto it = raw_args.find(key);
        return it == raw_args.end() ? std::string()
                                    : resolve_arg(it->second, groups, m.agent_location);
    };

    if (op == "set_location") {
        std::string loc = trim(arg("value"));
        if (loc.empty()) return;
        m.agent_location = loc;
        m.explorer.visited.insert(loc);
    } else if (op == "mark_visited") {
        std::string loc = trim(arg("value"));
        if (!loc.empty()) m.explorer.visited.insert(loc);
    } else if (op == "discover_object") {
        std::string name = trim(arg("object"));
        if (name.empty()) return;
        auto& e = m.explorer.find_or_add(name);
        std::string at = trim(arg("at"));
        if (!at.empty()) e.at = at;
    } else if (op == "discover_receptacle") {
        std::string name = trim(arg("receptacle"));
        if (name.empty()) return;
        auto& e = m.explorer.find_or_add(name);
        e.is_receptacle = true;
    } else if (op == "discover_receptacle_list") {
        for (const auto& item : split_item_list(arg("items"))) {
            auto& e = m.explorer.find_or_add(item);
            e.is_receptacle = true;
        }
    } else if (op == "set_contents") {
        std::string recep = trim(arg("receptacle"));
        if (recep.empty()) return;
        auto& e = m.explorer.find_or_add(recep);
        e.is_receptacle = true;
        e.contents_known = true;
        e.contents = split_item_list(arg("items"));
        for (const auto& item : e.contents) {
            auto& oe = m.explorer.find_or_add(item);
            oe.at = recep;
        }
    } else if (op == "inventory_add") {
        std::string obj = trim(arg("object"));
        if (obj.empty()) return;
        auto& e = m.explorer.find_or_add(obj);
        e.at = "inventory";
        for (auto& r : m.explorer.discovered) {
            if (r.is_receptacle) std::erase(r.contents, obj);
        }
        if (!m.holding.empty()) m.holding.begin()->second = obj;
    } else if (op == "inventory_list") {
        for (const auto& item : split_item_list(arg("items"))) {
            auto& e = m.explorer.find_or_add(item);
            e.at = "inventory";
            for (auto& r : m.explorer.discovered) {
                if (r.is_receptacle) std::erase(r.contents, item);
            }
        }
    } else if (op == "place_object") {
        std::string obj = trim(arg("object"));
        std::string to = trim(arg("to"));
        if (obj.empty() || to.empty()) return;
        auto& e = m.explorer.find_or_add(obj);
        e.at = to;
        if (auto* holder = const_cast<ExplorerState::Entry*>(m.explorer.find(to));
            holder && holder->is_receptacle) {
            if (!std::count(holder->contents.begin(), holder->contents.end(), obj)) {
                holder->contents.push_back(obj);
            }
            holder->contents_known = true;
        }
        if (!m.holding.empty() && m.holding.begin()->second == obj) {
            m.holding.begin()->second = std::nullopt;
        }
    } else if (op == "add_predicate") {
        if (auto p = canonical_predicate(arg("value"))) m.predicates.insert(*p);
    } else if (op == "remove_predicate") {
        if (auto p = canonical_predicate(arg("value"))) m.predicates.erase(*p);
    }
    // Unknown ops are ignored: rules stay total under format evolution.
}

void apply_observation(const DomainRuleset& rules, SymbolicMemory& m, const std::string& observation) {
    std::vector<MatchedEffect> matched;
    for (size_t pi = 0; pi < rules.patterns.size(); ++pi) {
        const auto& pat = rules.patterns[pi];
        auto begin = std::sregex_iterator(observation.begin(), observation.end(), pat.compiled);
        for (auto it = begin; it != std::sregex_iterator(); ++it) {
            std::vector<std::string> groups;
            for (const auto& g : *it) groups.push_back(g.matched ? g.str() : "");
            for (const auto& eff : pat.effects) {
                matched.push_back(MatchedEffect{&eff, groups, pi});
            }
        }
    }

    // An observation that asserts nothing is an empty update: predicates,
    // holding, and location all carry forward.
    if (matched.empty()) return;

    if (rules.kind == "blocksworld_rebuild") {
        BlocksObservations obs;
        for (const auto& me : matched) {
            const std::string& op = me.effect->op;
            auto arg = [&](const std::string& key) {
                auto it = me.effect->args.find(key);
                return it == me.effect->args.end()
                           ? std::string()
                           : lower(resolve_arg(it->second, me.groups, std::nullopt));
            };
            if (op == "observe_holding") obs.held = arg("block");
            else if (op == "observe_arm_empty") obs.arm_empty_seen = true;
            else if (op == "observe_on") obs.on[arg("top")] = arg("support");
            else if (op == "observe_on_table") obs.on_table.insert(arg("block"));
            else if (op == "observe_clear") obs.clear.insert(arg("block"));
            else if (op == "observe_not_clear") obs.not_clear.insert(arg("block"));
        }
        apply_blocksworld(m, obs);
    } else if (rules.kind == "gripper") {
        GripperObservations obs;
        for (const auto& me : matched) {
            const std::string& op = me.effect->op;
            auto arg = [&](const std::string& key) {
                auto it = me.effect->args.find(key);
                return it == me.effect->args.end()
                           ? std::string()
                           : resolve_arg(it->second, me.groups, std::nullopt);
            };
            if (op == "set_location") obs.location = arg("value");
            else if (op == "observe_carrying") obs.carrying[lower(arg("gripper"))] = lower(arg("ball"));
            else if (op == "observe_gripper_free") obs.freed.insert(lower(arg("gripper")));
            else if (op == "observe_ball_at") obs.ball_at.emplace_back(arg("ball"), arg("room"));
        }
        apply_gripper(m, obs);
    } else {
        // explorer: apply effects in pattern order, then match order
        for (const auto& me : matched) {
            apply_explorer_effect(m, me.effect->op, me.effect->args, me.groups);
        }
    }
}

}  // namespace

DomainRuleset DomainRuleset::from_json_text(const std::string& text) {
    json j = json::parse(text);
    DomainRuleset r;
    r.format_version = j.value("format_version", 1);
    r.domain_name = j.at("domain_name").get<std::string>();
    r.kind = j.value("kind", "explorer");
    if (j.contains("manipulators")) {
        for (const auto& m : j["manipulators"]) r.manipulators.push_back(m.get<std::string>());
    }
    for (const auto& pj : j.at("patterns")) {
        RulePattern p;
        p.match = pj.at("match").get<std::string>();
        p.case_insensitive = pj.value("case_insensitive", false);
        if (pj.contains("captures")) {
            for (const auto& c : pj["captures"]) p.captures.push_back(c.get<std::string>());
        }
        for (const auto& ej : pj.at("effects")) {
            RulePattern::Effect eff;
            eff.op = ej.at("op").get<std::string>();
            for (auto it = ej.begin(); it != ej.end(); ++it) {
                if (it.key() == "op") continue;
                eff.args[it.key()] = it.value().get<std::string>();
            }
            p.effects.push_back(std::move(eff));
        }
        auto flags = std::regex::ECMAScript;
        if (p.case_insensitive) flags |= std::regex::icase;
        p.compiled = std::regex(p.match, flags);
        r.patterns.push_back(std::move(p));
    }
    return r;
}

DomainRuleset DomainRuleset::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ruleset file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("PLANACT_DATA_DIR"); env && *env) return env;
    return "data";
}

DomainRuleset ruleset_for_domain(const std::string& domain, const std::filesystem::path& data_dir) {
    return DomainRuleset::load_file(data_dir / "rulesets" / (domain + ".json"));
}

DomainRuleset blocksworld_ruleset(const std::filesystem::path& d) { return ruleset_for_domain("blocksworld", d); }
DomainRuleset gripper_ruleset(const std::filesystem::path& d) { return ruleset_for_domain("gripper", d); }
DomainRuleset household_ruleset(const std::filesystem::path& d) { return ruleset_for_domain("household", d); }
DomainRuleset adventure_ruleset(const std::filesystem::path& d) { return ruleset_for_domain("adventure", d); }

SymbolicMemory init_memory(const DomainRuleset& domain, const std::string& initial_observation) {
    SymbolicMemory m;
    m.domain_name = domain.domain_name;
    for (const auto& manip : domain.manipulators) m.holding[manip] = std::nullopt;
    apply_observation(domain, m, initial_observation);
    m.step = 0;
    return m;
}

SymbolicMemory update_memory(const DomainRuleset& domain, const SymbolicMemory& m,
                             const std::string& observation,
                             const std::optional<std::string>& /*last_action*/) {
    SymbolicMemory next = m;
    next.step += 1;
    apply_observation(domain, next, observation);
    return next;
}

}  // namespace planact
