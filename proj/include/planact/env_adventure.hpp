#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "planact/environment.hpp"

namespace planact {

/// Mini text-adventure world loaded from a JSON fixture: rooms with
/// (possibly concealed) exits, objects, openable containers, and trigger
/// actions that reveal exits or objects. Blocked directions return a
/// domain error line; unparseable actions return the invalid-action
/// message.
class AdventureEnv final : public Environment {
public:
    explicit AdventureEnv(const nlohmann::json& fixture);

    std::string domain() const override { return "adventure"; }
    std::string goal_text() const override { return goal_; }
    std::string initial_observation() const override;
    std::string step(const std::string& action) override;
    bool is_success() const override;
    std::vector<std::string> valid_actions() const override;
    std::vector<std::string> checkpoint_labels() const override;
    double progress_rate() const override;
    std::unique_ptr<Environment> clone() const override;
    std::string state_key() const override;

    std::string render_room() const;

private:
    struct Exit {
        std::string label;
        std::string to;
        bool concealed = false;
    };
    struct Room {
        std::string name;
        std::string description;
        std::vector<Exit> exits;
    };
    struct Object {
        std::string name;
        std::string initial_location;
        bool takeable = false;
        bool openable = false;
        bool concealed = false;
        std::string examine_text;
        std::string open_message;
        std::vector<std::string> reveals;  // contents surfaced on open
    };
    struct Trigger {
        std::string action;
        std::string message;
        std::vector<std::string> reveal_objects;
        std::vector<std::pair<std::string, std::string>> reveal_exits;  // room, label
        std::vector<std::string> set_flags;
    };

    bool condition_holds(const nlohmann::json& cond) const;
    void refresh_checkpoints();
    const Room* room(const std::string& name) const;
    const Object* object(const std::string& name) const;
    bool object_visible_here(const std::string& name) const;
    bool exit_open(const Exit& e) const;
    std::string fire_trigger(const Trigger& t);

    // immutable world definition
    std::string goal_;
    std::string success_message_;
    std::vector<Room> rooms_;
    std::vector<Object> objects_;
    std::vector<Trigger> triggers_;
    std::vector<std::pair<std::string, nlohmann::json>> checkpoints_;
    nlohmann::json goal_condition_;
    std::string start_room_;
    std::string initial_observation_;

    // mutable ground state
    std::string agent_room_;
    std::map<std::string, std::string> object_at_;  // object -> room or "inventory"
    std::set<std::string> revealed_objects_;
    std::set<std::string> revealed_exits_;  // "room/label"
    std::set<std::string> opened_;
    std::set<std::string> fired_triggers_;
    std::set<std::string> flags_;
    std::set<std::string> visited_;
    std::vector<bool> checkpoints_hit_;
};

}  // namespace planact
