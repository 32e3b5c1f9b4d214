#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace planact {

/// A ground atom in canonical text form: `name` or `name(arg1,arg2)`.
/// Tokens are lowercase identifiers with no whitespace.
struct Predicate {
    std::string name;
    std::vector<std::string> args;

    std::string render() const;
    auto operator<=>(const Predicate&) const = default;
};

/// Parses the canonical predicate grammar. Lowercases tokens and strips
/// whitespace. Returns nullopt (and fills `error` when given) on empty
/// name, unbalanced parentheses, empty arguments, or bad token characters.
std::optional<Predicate> canonical_predicate(std::string_view text, std::string* error = nullptr);

/// Exploration-style memory extras for the adventure and household domains:
/// visited locations plus a discovery-ordered object/receptacle map.
struct ExplorerState {
    struct Entry {
        std::string name;
        std::string at;   // room name, receptacle name, or "inventory"
        bool is_receptacle = false;
        bool contents_known = false;
        std::vector<std::string> contents;

        bool operator==(const Entry&) const = default;
    };

    std::set<std::string> visited;
    std::vector<Entry> discovered;  // discovery order, names unique

    bool empty() const { return visited.empty() && discovered.empty(); }
    Entry& find_or_add(const std::string& name);
    const Entry* find(const std::string& name) const;

    bool operator==(const ExplorerState&) const = default;
};

/// Object-oriented symbolic memory m_k. Updated programmatically from
/// observations; see the ruleset module for the update mechanism.
struct SymbolicMemory {
    std::string domain_name;
    std::set<Predicate> predicates;
    std::map<std::string, std::optional<std::string>> holding;  // manipulator -> held object
    std::optional<std::string> agent_location;
    int step = 0;
    ExplorerState explorer;  // engaged for adventure/household domains only

    bool operator==(const SymbolicMemory&) const = default;
};

/// Deterministic multi-line summary used in prompts, ending with the
/// literal line "### END SUMMARY ###".
std::string planning_summary(const SymbolicMemory& m);

struct LearnedFact {
    int step_k = 0;  // planner step whose update produced the fact
    std::string text;

    bool operator==(const LearnedFact&) const = default;
};

/// Structured textual memory l_k: latest status line and justification,
/// plus the full (deduplicated) learned-facts history.
struct TextualMemory {
    std::string status_line = "Status: Not started.";
    std::string justification;
    std::vector<LearnedFact> learned_facts;

    /// Appends facts not already present (exact text match), tagging them
    /// with `step_k`. Returns the texts actually appended.
    std::vector<std::string> append_facts(const std::vector<std::string>& facts, int step_k);

    bool operator==(const TextualMemory&) const = default;
};

/// The agent's explicit world model b_k = (m_k, l_k).
struct BeliefState {
    SymbolicMemory symbolic;
    TextualMemory textual;
    int k = 0;

    bool operator==(const BeliefState&) const = default;
};

/// A planner-issued execution command e_k.
struct Subgoal {
    std::string description;  // single line; multi-line input is joined
    std::optional<std::vector<std::string>> search_locations;
    int issued_at_k = 0;

    bool operator==(const Subgoal&) const = default;
};

struct Plan {
    std::vector<std::string> subgoals;  // enumeration stripped
    int created_at_k = 0;

    bool operator==(const Plan&) const = default;
};

enum class SubgoalStatus { completed, replan_requested, timeout };

std::string to_string(SubgoalStatus s);

/// Trajectory of a single subgoal attempt. `steps` records only actions
/// actually sent to the environment; termination markers consume no step.
struct SubEpisode {
    Subgoal subgoal;
    std::vector<std::pair<std::string, std::string>> steps;  // (action, observation)
    SubgoalStatus status = SubgoalStatus::timeout;
    std::string replan_reason;
    int env_steps_consumed = 0;
};

struct VerificationReport {
    struct Entry {
        std::string question;
        std::string answer;
        std::string justification;
        bool parse_error = false;
    };
    std::vector<Entry> entries;
};

enum class Component { planner, actor, verification, synthesis };

std::string to_string(Component c);

struct TokenCounts {
    long long prompt = 0;
    long long completion = 0;

    long long total() const { return prompt + completion; }
};

/// Per-component token accounting for one episode.
struct TokenLedger {
    std::map<Component, TokenCounts> by_component;

    void add(Component c, long long prompt_tokens, long long completion_tokens);
    TokenCounts component(Component c) const;
    TokenCounts total() const;
};

/// Optional context for rendering the [Current Plan] and [Subgoal
/// Verification] sections; the plan and last-subgoal record live in the
/// planner history, not in the belief state itself.
struct BeliefContext {
    std::optional<Plan> latest_plan;
    std::optional<Subgoal> last_subgoal;
    std::optional<SubgoalStatus> last_outcome;
};

/// Two-part deterministic rendering of a belief state: the symbolic
/// planning summary followed by the structured text block with the
/// literal headings [Current Plan], [Subgoal Verification], and
/// [Learned Facts]. Empty sections render "(None)".
std::string render_belief(const BeliefState& b, const BeliefContext& ctx = {});

}  // namespace planact
