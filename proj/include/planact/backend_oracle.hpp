#pragma once

#include <deque>
#include <string>
#include <vector>

#include "planact/environment.hpp"
#include "planact/gateway.hpp"

namespace planact {

/// Breadth-first search from the environment's current ground state to the
/// first success state. Returns the action sequence; empty when already
/// solved. Throws GatewayError when the goal is unreachable within
/// `max_states` expansions.
std::vector<std::string> solve_bfs(const Environment& env, size_t max_states = 500000);

/// LLM-free backend for blocksworld and gripper: emits syntactically valid
/// planner/actor/verification/synthesis outputs computed by BFS over the
/// attached environment's ground state.
class OracleBackend final : public Backend {
public:
    explicit OracleBackend(std::string domain);

    /// The orchestrator attaches the live (read-only) environment after
    /// reset; the oracle only ever steps clones of it.
    void attach_environment(const Environment* env) { env_ = env; }

    Completion complete(const ChatRequest& req) override;
    std::string name() const override { return "oracle"; }

private:
    struct Chunk {
        std::string description;
        std::vector<std::string> actions;
    };

    std::string plan_completion();
    std::string actor_completion();
    std::string verification_completion(const ChatRequest& req);
    std::string synthesis_completion();
    std::vector<Chunk> chunk_actions(const std::vector<std::string>& actions) const;

    std::string domain_;
    const Environment* env_ = nullptr;
    std::deque<std::string> pending_actions_;
    std::string current_subgoal_;
    bool last_subgoal_completed_ = false;
};

}  // namespace planact
