#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "planact/environment.hpp"

namespace planact {

/// One conjunct of a blocksworld goal.
struct BlocksGoalAtom {
    enum class Kind { on, on_table };
    Kind kind;
    std::string a;
    std::string b;  // support, only for kind == on

    std::string sentence() const;
    bool operator==(const BlocksGoalAtom&) const = default;
};

/// Classic blocksworld with a single arm. Observations use the sentence
/// grammar consumed by the blocksworld ruleset ("b1 is on b2", "b2 is on
/// the table", "b1 is clear", "Robot arm is empty", "You are holding b1").
class BlocksWorldEnv final : public Environment {
public:
    BlocksWorldEnv(std::map<std::string, std::string> supports,  // block -> block or "table"
                   std::vector<BlocksGoalAtom> goal,
                   std::optional<std::string> held = std::nullopt);

    /// Random solvable instance; both start and goal arrangements are drawn
    /// from the seeded generator and the goal is never satisfied at reset.
    static BlocksWorldEnv random(unsigned seed, int num_blocks);

    std::string domain() const override { return "blocksworld"; }
    std::string goal_text() const override;
    std::string initial_observation() const override { return render_state(); }
    std::string step(const std::string& action) override;
    bool is_success() const override;
    std::vector<std::string> valid_actions() const override;
    std::vector<std::string> checkpoint_labels() const override;
    double progress_rate() const override;
    std::unique_ptr<Environment> clone() const override;
    std::string state_key() const override;

    /// Full observation of the current state in ruleset-compatible grammar.
    std::string render_state() const;

    /// Ground-truth predicate set in the memory's convention: held blocks
    /// are "clear" with no positional atom, and on_table is asserted only
    /// for table blocks that support nothing.
    std::vector<std::string> ground_truth_predicates() const;

    const std::map<std::string, std::string>& supports() const { return supports_; }
    const std::optional<std::string>& held() const { return held_; }

private:
    bool is_clear(const std::string& block) const;
    bool goal_atom_holds(const BlocksGoalAtom& atom) const;
    void refresh_checkpoints();

    std::map<std::string, std::string> supports_;
    std::optional<std::string> held_;
    std::vector<BlocksGoalAtom> goal_;
    std::vector<bool> checkpoints_hit_;
};

}  // namespace planact
