#pragma once

#include <memory>
#include <string>
#include <vector>

namespace planact {

/// Literal response for any action that does not parse or whose
/// preconditions fail; the ground state is left unchanged.
inline constexpr const char* kInvalidActionMessage =
    "The action is not valid and therefore takes no effect. Please check valid actions.";

/// Deterministic text-observation environment. Checkpoints are annotated
/// milestones over the ground state; progress_rate is the fraction ever
/// satisfied and never decreases within an episode.
class Environment {
public:
    virtual ~Environment() = default;

    virtual std::string domain() const = 0;
    virtual std::string goal_text() const = 0;
    virtual std::string initial_observation() const = 0;

    /// Executes one action and returns its observation. Deterministic.
    virtual std::string step(const std::string& action) = 0;

    virtual bool is_success() const = 0;

    /// Every listed action, when executed, succeeds (never returns the
    /// invalid-action message).
    virtual std::vector<std::string> valid_actions() const = 0;

    virtual std::vector<std::string> checkpoint_labels() const = 0;
    virtual double progress_rate() const = 0;

    /// Deep copy, including checkpoint-hit history.
    virtual std::unique_ptr<Environment> clone() const = 0;

    /// Canonical serialization of the ground state (not the hit history);
    /// equal keys mean behaviorally identical states.
    virtual std::string state_key() const = 0;
};

/// Renders "Valid actions: a | b | c".
std::string render_valid_actions(const std::vector<std::string>& actions);

}  // namespace planact
