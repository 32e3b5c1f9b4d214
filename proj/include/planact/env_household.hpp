#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "planact/environment.hpp"

namespace planact {

/// Single-room household world with receptacles, loaded from a JSON
/// fixture. The agent moves between receptacles with "go to <receptacle>",
/// takes and puts objects, and may carry at most `inventory_capacity`
/// objects (default 1).
class HouseholdEnv final : public Environment {
public:
    explicit HouseholdEnv(const nlohmann::json& fixture);

    std::string domain() const override { return "household"; }
    std::string goal_text() const override { return task_; }
    std::string initial_observation() const override { return initial_observation_; }
    std::string step(const std::string& action) override;
    bool is_success() const override;
    std::vector<std::string> valid_actions() const override;
    std::vector<std::string> checkpoint_labels() const override;
    double progress_rate() const override;
    std::unique_ptr<Environment> clone() const override;
    std::string state_key() const override;

private:
    struct Receptacle {
        std::string name;
        std::string type;  // "surface" | "open" | "closed"
    };

    bool condition_holds(const nlohmann::json& cond) const;
    void refresh_checkpoints();
    const Receptacle* receptacle(const std::string& name) const;
    bool receptacle_accessible(const Receptacle& r) const;
    std::string contents_sentence(const Receptacle& r) const;
    std::vector<std::string> objects_at(const std::string& place) const;
    int inventory_count() const;

    std::string task_;
    std::vector<Receptacle> receptacles_;
    std::vector<std::string> object_order_;
    nlohmann::json goal_condition_;
    std::vector<std::pair<std::string, nlohmann::json>> checkpoints_;
    int inventory_capacity_ = 1;
    std::string initial_observation_;

    std::string agent_location_;
    std::map<std::string, std::string> object_at_;  // object -> receptacle or "inventory"
    std::set<std::string> opened_;
    std::set<std::string> visited_;
    std::set<std::string> ever_held_;
    std::vector<bool> checkpoints_hit_;
};

}  // namespace planact
