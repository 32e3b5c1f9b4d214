#include "planact/env_gripper.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

namespace planact {

namespace {

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

struct ParsedAction {
    std::string verb;
    std::vector<std::string> args;
};

std::optional<ParsedAction> parse_action(const std::string& raw, const std::string& current_room) {
    std::string s = lower(trim(raw));
    if (s.empty()) return std::nullopt;
    if (s == "look") return ParsedAction{"look", {}};
    if (s == "check valid actions") return ParsedAction{"check_valid_actions", {}};

    auto open = s.find('(');
    if (open != std::string::npos && s.back() == ')') {
        ParsedAction a{trim(s.substr(0, open)), {}};
        std::stringstream ss(s.substr(open + 1, s.size() - open - 2));
        std::string part;
        while (std::getline(ss, part, ',')) {
            part = trim(part);
            if (part.empty()) return std::nullopt;
            a.args.push_back(part);
        }
        return a;
    }

    std::vector<std::string> words;
    {
        std::stringstream ss(s);
        std::string t;
        while (ss >> t) words.push_back(t);
    }
    // "move to room2"
    if (words.size() == 3 && words[0] == "move" && words[1] == "to")
        return ParsedAction{"move", {current_room, words[2]}};
    // "pick up ball1 with the left gripper"
    if (words.size() == 7 && words[0] == "pick" && words[1] == "up" && words[3] == "with" &&
        words[6] == "gripper")
        return ParsedAction{"pick", {words[2], current_room, words[5]}};
    // "drop ball1 from the left gripper"
    if (words.size() == 6 && words[0] == "drop" && words[5] == "gripper")
        return ParsedAction{"drop", {words[1], current_room, words[4]}};
    return std::nullopt;
}

}  // namespace

GripperEnv::GripperEnv(std::vector<std::string> rooms, std::string robot_room,
                       std::map<std::string, std::string> ball_rooms,
                       std::map<std::string, std::string> goal_rooms)
    : rooms_(std::move(rooms)),
      robot_room_(std::move(robot_room)),
      ball_rooms_(std::move(ball_rooms)),
      goal_rooms_(std::move(goal_rooms)) {
    grippers_["left"] = std::nullopt;
    grippers_["right"] = std::nullopt;
    for (const auto& [ball, room] : goal_rooms_) goal_order_.push_back(ball);
    checkpoints_hit_.assign(goal_order_.size(), false);
    refresh_checkpoints();
}

GripperEnv GripperEnv::random(unsigned seed, int num_balls, int num_rooms) {
    std::mt19937 rng(seed);
    std::vector<std::string> rooms;
    for (int i = 1; i <= num_rooms; ++i) rooms.push_back("room" + std::to_string(i));
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::map<std::string, std::string> balls, goals;
        for (int i = 1; i <= num_balls; ++i) {
            std::string ball = "ball" + std::to_string(i);
            balls[ball] = rooms[rng() % rooms.size()];
            goals[ball] = rooms[rng() % rooms.size()];
        }
        std::string robot = rooms[rng() % rooms.size()];
        GripperEnv env(rooms, robot, balls, goals);
        if (!env.is_success()) return env;
    }
    throw std::runtime_error("gripper random generation failed to find an unsolved goal");
}

std::string GripperEnv::goal_text() const {
    std::string out = "Your goal is to move the balls so that the following conditions hold:";
    for (const auto& ball : goal_order_) {
        out += " " + ball + " should be in " + goal_rooms_.at(ball) + ".";
    }
    return out;
}

bool GripperEnv::goal_holds(const std::string& ball) const {
    auto it = ball_rooms_.find(ball);
    return it != ball_rooms_.end() && it->second == goal_rooms_.at(ball);
}

bool GripperEnv::is_success() const {
    return std::all_of(goal_order_.begin(), goal_order_.end(),
                       [&](const std::string& b) { return goal_holds(b); });
}

void GripperEnv::refresh_checkpoints() {
    for (size_t i = 0; i < goal_order_.size(); ++i) {
        if (goal_holds(goal_order_[i])) checkpoints_hit_[i] = true;
    }
}

std::vector<std::string> GripperEnv::checkpoint_labels() const {
    std::vector<std::string> labels;
    for (const auto& ball : goal_order_) {
        labels.push_back(ball + " in " + goal_rooms_.at(ball));
    }
    return labels;
}

double GripperEnv::progress_rate() const {
    if (checkpoints_hit_.empty()) return 0.0;
    size_t hit = std::count(checkpoints_hit_.begin(), checkpoints_hit_.end(), true);
    return static_cast<double>(hit) / static_cast<double>(checkpoints_hit_.size());
}

std::string GripperEnv::render_state() const {
    std::ostringstream out;
    out << "You are in " << robot_room_ << ".";
    for (const auto& [gripper, ball] : grippers_) {
        if (ball) out << " Gripper " << gripper << " is carrying " << *ball << ".";
        else out << " Gripper " << gripper << " is free.";
    }
    for (const auto& [ball, room] : ball_rooms_) {
        out << " " << ball << " is in " << room << ".";
    }
    return out.str();
}

std::vector<std::string> GripperEnv::valid_actions() const {
    std::vector<std::string> actions;
    for (const auto& room : rooms_) {
        if (room != robot_room_) actions.push_back("move(" + robot_room_ + "," + room + ")");
    }
    for (const auto& [gripper, held] : grippers_) {
        if (held) {
            actions.push_back("drop(" + *held + "," + robot_room_ + "," + gripper + ")");
        } else {
            for (const auto& [ball, room] : ball_rooms_) {
                if (room == robot_room_)
                    actions.push_back("pick(" + ball + "," + room + "," + gripper + ")");
            }
        }
    }
    actions.push_back("look");
    return actions;
}

std::string GripperEnv::step(const std::string& action) {
    auto parsed = parse_action(action, robot_room_);
    if (!parsed) return kInvalidActionMessage;
    const auto& a = *parsed;

    auto room_exists = [&](const std::string& r) {
        return std::count(rooms_.begin(), rooms_.end(), r) > 0;
    };

    if (a.verb == "look") return render_state();
    if (a.verb == "check_valid_actions") return render_valid_actions(valid_actions());

    std::string confirmation;
    if (a.verb == "move" && a.args.size() == 2) {
        const auto& from = a.args[0];
        const auto& to = a.args[1];
        if (from != robot_room_ || !room_exists(to) || from == to) return kInvalidActionMessage;
        robot_room_ = to;
        confirmation = "You moved from " + from + " to " + to + ".";
    } else if (a.verb == "pick" && a.args.size() == 3) {
        const auto& [ball, room, gripper] = std::tie(a.args[0], a.args[1], a.args[2]);
        if (!grippers_.count(gripper) || grippers_[gripper].has_value()) return kInvalidActionMessage;
        if (room != robot_room_) return kInvalidActionMessage;
        auto it = ball_rooms_.find(ball);
        if (it == ball_rooms_.end() || it->second != room) return kInvalidActionMessage;
        ball_rooms_.erase(it);
        grippers_[gripper] = ball;
        confirmation = "You picked up " + ball + " with the " + gripper + " gripper.";
    } else if (a.verb == "drop" && a.args.size() == 3) {
        const auto& [ball, room, gripper] = std::tie(a.args[0], a.args[1], a.args[2]);
        if (!grippers_.count(gripper) || grippers_[gripper] != ball) return kInvalidActionMessage;
        if (room != robot_room_) return kInvalidActionMessage;
        grippers_[gripper] = std::nullopt;
        ball_rooms_[ball] = room;
        confirmation = "You dropped " + ball + " in " + room + " from the " + gripper + " gripper.";
    } else {
        return kInvalidActionMessage;
    }

    refresh_checkpoints();
    return confirmation + " " + render_state();
}

std::unique_ptr<Environment> GripperEnv::clone() const {
    return std::make_unique<GripperEnv>(*this);
}

std::string GripperEnv::state_key() const {
    std::ostringstream out;
    out << "robot=" << robot_room_;
    for (const auto& [g, b] : grippers_) out << "|" << g << ":" << (b ? *b : "-");
    for (const auto& [ball, room] : ball_rooms_) out << "|" << ball << "@" << room;
    return out.str();
}

}  // namespace planact
