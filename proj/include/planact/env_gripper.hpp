#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "planact/environment.hpp"

namespace planact {

/// Two-gripper robot moving balls between rooms. Actions:
/// move(r1,r2) | pick(ball,room,gripper) | drop(ball,room,gripper) |
/// look | check valid actions, plus natural surface forms.
class GripperEnv final : public Environment {
public:
    GripperEnv(std::vector<std::string> rooms,
               std::string robot_room,
               std::map<std::string, std::string> ball_rooms,   // ball -> room
               std::map<std::string, std::string> goal_rooms);  // ball -> target room

    static GripperEnv random(unsigned seed, int num_balls, int num_rooms = 2);

    std::string domain() const override { return "gripper"; }
    std::string goal_text() const override;
    std::string initial_observation() const override { return render_state(); }
    std::string step(const std::string& action) override;
    bool is_success() const override;
    std::vector<std::string> valid_actions() const override;
    std::vector<std::string> checkpoint_labels() const override;
    double progress_rate() const override;
    std::unique_ptr<Environment> clone() const override;
    std::string state_key() const override;

    std::string render_state() const;

private:
    bool goal_holds(const std::string& ball) const;
    void refresh_checkpoints();

    std::vector<std::string> rooms_;
    std::string robot_room_;
    std::map<std::string, std::string> ball_rooms_;
    std::map<std::string, std::optional<std::string>> grippers_;  // left/right -> ball
    std::map<std::string, std::string> goal_rooms_;
    std::vector<std::string> goal_order_;  // checkpoint order
    std::vector<bool> checkpoints_hit_;
};

}  // namespace planact
