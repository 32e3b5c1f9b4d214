#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "planact/domain.hpp"
#include "planact/gateway.hpp"

namespace planact {

/// Raised when the planner produces neither an EXECUTE_SUBGOAL block nor a
/// completion declaration after the re-prompt budget.
struct PlannerParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlannerStep {
    int k = 0;
    BeliefState belief_snapshot;
    std::string reasoning;
    std::optional<Plan> plan;
    std::optional<Subgoal> subgoal;
    bool task_complete = false;
    std::string raw_completion;
    std::string analysis_feedback_json;  // filled by the orchestrator after the belief update
};

struct PlanParse {
    std::optional<Plan> plan;
    bool empty_plan = false;  // FULL PLAN token present but no enumerated lines
};

/// Collects enumerated lines after the literal token "FULL PLAN" (and an
/// optional "Subgoals:" header), stripping the leading enumeration.
PlanParse parse_full_plan(std::string_view text, int created_at_k = 0);

enum class SubgoalParseErrorKind { none, not_found, missing_desc, unterminated_block };

struct SubgoalParse {
    std::optional<Subgoal> subgoal;
    SubgoalParseErrorKind error = SubgoalParseErrorKind::none;
};

/// Parses the EXECUTE_SUBGOAL[...] block: DESC is mandatory (multi-line
/// text is joined with single spaces); SEARCH_LOCATIONS is an optional
/// bracketed list ("null" or omission means absent). The block closes at a
/// line consisting of "]".
SubgoalParse parse_execute_subgoal(std::string_view text, int issued_at_k = 0);

/// Renders a subgoal back into the documented block format; re-parsing the
/// result yields an equal subgoal.
std::string render_subgoal_block(const Subgoal& subgoal);

bool declares_task_complete(std::string_view text);

/// Text preceding the first structural token, trimmed.
std::string extract_reasoning(std::string_view text);

struct TaskContext {
    std::string domain;  // blocksworld | gripper | household | adventure
    std::string goal_text;
    std::string initial_observation;
    std::string planner_exemplars;
};

struct PlannerConfig {
    int history_window = 0;  // 0 = full history
    int reprompt_budget = 2;
    Decoding decoding;
};

/// Subgoal-level planner: renders history and belief into a chat prompt,
/// invokes the gateway, and parses the completion.
class Planner {
public:
    Planner(Gateway& gateway, const TemplateStore& templates, TaskContext task,
            PlannerConfig config = {});

    PlannerStep plan_next(const std::vector<PlannerStep>& history, const BeliefState& belief,
                          const BeliefContext& ctx) const;

    /// System/instance messages for this task, before any history.
    std::vector<ChatMessage> base_messages() const;

private:
    Gateway& gateway_;
    const TemplateStore& templates_;
    TaskContext task_;
    PlannerConfig config_;
};

}  // namespace planact
