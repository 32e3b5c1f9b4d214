#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "planact/domain.hpp"

namespace planact {

/// One text-matching rule: a regex over observations plus the effects its
/// captures trigger. Effects either feed the domain update algorithm
/// (observe_* ops) or mutate memory directly (explorer ops).
struct RulePattern {
    std::string match;  // regex source, kept for introspection/tests
    std::vector<std::string> captures;
    bool case_insensitive = false;
    struct Effect {
        std::string op;
        std::map<std::string, std::string> args;  // values may use $1..$9 and @location
    };
    std::vector<Effect> effects;
    std::regex compiled;
};

/// Observation-extraction rules for one domain, loaded from a JSON fixture.
/// Rules are total: text that matches nothing yields an empty update.
struct DomainRuleset {
    int format_version = 1;
    std::string domain_name;
    std::string kind;  // "blocksworld_rebuild" | "gripper" | "explorer"
    std::vector<std::string> manipulators;
    std::vector<RulePattern> patterns;

    static DomainRuleset from_json_text(const std::string& text);
    static DomainRuleset load_file(const std::filesystem::path& path);
};

/// Resolves the data directory: PLANACT_DATA_DIR if set, else "data".
std::filesystem::path default_data_dir();

DomainRuleset ruleset_for_domain(const std::string& domain,
                                 const std::filesystem::path& data_dir = default_data_dir());

DomainRuleset blocksworld_ruleset(const std::filesystem::path& data_dir = default_data_dir());
DomainRuleset gripper_ruleset(const std::filesystem::path& data_dir = default_data_dir());
DomainRuleset household_ruleset(const std::filesystem::path& data_dir = default_data_dir());
DomainRuleset adventure_ruleset(const std::filesystem::path& data_dir = default_data_dir());

/// Fresh memory with step = 0 after applying the extraction rules to the
/// initial observation. Manipulators are initialized per the ruleset.
SymbolicMemory init_memory(const DomainRuleset& domain, const std::string& initial_observation);

/// Pure update: returns a new memory with step incremented by one and the
/// observation's assertions folded in. Entities not mentioned keep their
/// prior predicates.
SymbolicMemory update_memory(const DomainRuleset& domain, const SymbolicMemory& m,
                             const std::string& observation,
                             const std::optional<std::string>& last_action = std::nullopt);

}  // namespace planact
