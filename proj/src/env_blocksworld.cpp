#include "planact/env_blocksworld.hpp"

#include <algorithm>
#include <random>
#include <set>
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

/// Parses "verb(a,b)", "verb(a)", "pick up a", "put down a",
/// "stack a on b", "unstack a from b" into (verb, args).
struct ParsedAction {
    std::string verb;
    std::vector<std::string> args;
};

std::optional<ParsedAction> parse_action(const std::string& raw) {
    std::string s = lower(trim(raw));
    if (s.empty()) return std::nullopt;
    if (s == "look") return ParsedAction{"look", {}};
    if (s == "check valid actions") return ParsedAction{"check_valid_actions", {}};

    auto open = s.find('(');
    if (open != std::string::npos && s.back() == ')') {
        std::string verb = trim(s.substr(0, open));
        std::string body = s.substr(open + 1, s.size() - open - 2);
        ParsedAction a{verb, {}};
        std::stringstream ss(body);
        std::string part;
        while (std::getline(ss, part, ',')) {
            part = trim(part);
            if (part.empty()) return std::nullopt;
            a.args.push_back(part);
        }
        if (verb == "pick_up" || verb == "pick up") a.verb = "pickup";
        if (verb == "put_down" || verb == "put down") a.verb = "putdown";
        return a;
    }

    // natural surface forms
    auto words = [&] {
        std::vector<std::string> w;
        std::stringstream ss(s);
        std::string t;
        while (ss >> t) w.push_back(t);
        return w;
    }();
    if (words.size() == 3 && words[0] == "pick" && words[1] == "up")
        return ParsedAction{"pickup", {words[2]}};
    if (words.size() == 3 && words[0] == "put" && words[1] == "down")
        return ParsedAction{"putdown", {words[2]}};
    if (words.size() == 2 && (words[0] == "pickup" || words[0] == "putdown"))
        return ParsedAction{words[0], {words[1]}};
    if (words.size() == 4 && words[0] == "stack" && words[2] == "on")
        return ParsedAction{"stack", {words[1], words[3]}};
    if (words.size() == 4 && words[0] == "unstack" && words[2] == "from")
        return ParsedAction{"unstack", {words[1], words[3]}};
    return std::nullopt;
}

}  // namespace

std::string BlocksGoalAtom::sentence() const {
    if (kind == Kind::on) return a + " is on " + b;
    return a + " is on the table";
}

BlocksWorldEnv::BlocksWorldEnv(std::map<std::string, std::string> supports,
                               std::vector<BlocksGoalAtom> goal,
                               std::optional<std::string> held)
    : supports_(std::move(supports)), held_(std::move(held)), goal_(std::move(goal)) {
    checkpoints_hit_.assign(goal_.size(), false);
    refresh_checkpoints();
}

BlocksWorldEnv BlocksWorldEnv::random(unsigned seed, int num_blocks) {
    std::mt19937 rng(seed);
    auto random_arrangement = [&rng, num_blocks]() {
        std::vector<std::string> blocks;
        for (int i = 1; i <= num_blocks; ++i) blocks.push_back("b" + std::to_string(i));
        for (size_t i = blocks.size(); i > 1; --i) {
            std::swap(blocks[i - 1], blocks[rng() % i]);
        }
        std::map<std::string, std::string> supports;
        std::vector<std::string> tower_tops;
        for (const auto& b : blocks) {
            // place on the table or on an existing tower top
            size_t choice = rng() % (tower_tops.size() + 1);
            if (choice == tower_tops.size()) {
                supports[b] = "table";
                tower_tops.push_back(b);
            } else {
                supports[b] = tower_tops[choice];
                tower_tops[choice] = b;
            }
        }
        return supports;
    };

    auto initial = random_arrangement();
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto target = random_arrangement();
        if (target == initial) continue;
        std::vector<BlocksGoalAtom> goal;
        for (const auto& [block, support] : target) {
            if (support == "table") {
                goal.push_back({BlocksGoalAtom::Kind::on_table, block, ""});
            } else {
                goal.push_back({BlocksGoalAtom::Kind::on, block, support});
            }
        }
        BlocksWorldEnv env(initial, goal);
        if (!env.is_success()) return env;
    }
    throw std::runtime_error("blocksworld random generation failed to find an unsolved goal");
}

std::string BlocksWorldEnv::goal_text() const {
    std::string out = "Your goal is to reach a state where the following conditions hold:";
    for (const auto& atom : goal_) out += " " + atom.sentence() + ".";
    return out;
}

bool BlocksWorldEnv::is_clear(const std::string& block) const {
    if (held_ && *held_ == block) return false;
    for (const auto& [b, support] : supports_) {
        if (support == block) return false;
    }
    return true;
}

bool BlocksWorldEnv::goal_atom_holds(const BlocksGoalAtom& atom) const {
    auto it = supports_.find(atom.a);
    if (it == supports_.end()) return false;  // held blocks satisfy nothing
    if (atom.kind == BlocksGoalAtom::Kind::on) return it->second == atom.b;
    return it->second == "table";
}

bool BlocksWorldEnv::is_success() const {
    return std::all_of(goal_.begin(), goal_.end(),
                       [&](const BlocksGoalAtom& a) { return goal_atom_holds(a); });
}

void BlocksWorldEnv::refresh_checkpoints() {
    for (size_t i = 0; i < goal_.size(); ++i) {
        if (goal_atom_holds(goal_[i])) checkpoints_hit_[i] = true;
    }
}

std::vector<std::string> BlocksWorldEnv::checkpoint_labels() const {
    std::vector<std::string> labels;
    for (const auto& atom : goal_) labels.push_back(atom.sentence());
    return labels;
}

double BlocksWorldEnv::progress_rate() const {
    if (checkpoints_hit_.empty()) return 0.0;
    size_t hit = std::count(checkpoints_hit_.begin(), checkpoints_hit_.end(), true);
    return static_cast<double>(hit) / static_cast<double>(checkpoints_hit_.size());
}

std::string BlocksWorldEnv::render_state() const {
    std::ostringstream out;
    bool first = true;
    auto emit = [&](const std::string& sentence) {
        if (!first) out << " ";
        first = false;
        out << sentence << ".";
    };
    for (const auto& [block, support] : supports_) {
        if (support == "table") emit(block + " is on the table");
        else emit(block + " is on " + support);
    }
    for (const auto& [block, support] : supports_) {
        emit(block + (is_clear(block) ? " is clear" : " is not clear"));
    }
    if (held_) emit("You are holding " + *held_);
    else emit("Robot arm is empty");
    return out.str();
}

std::vector<std::string> BlocksWorldEnv::ground_truth_predicates() const {
    std::vector<std::string> preds;
    preds.push_back(held_ ? "arm_not_empty" : "arm_empty");
    std::set<std::string> supporting;
    for (const auto& [b, s] : supports_) {
        if (s != "table") supporting.insert(s);
    }
    for (const auto& [block, support] : supports_) {
        if (support == "table") {
            if (!supporting.count(block)) preds.push_back("on_table(" + block + ")");
        } else {
            preds.push_back("on(" + block + "," + support + ")");
        }
        preds.push_back((supporting.count(block) ? "not_clear(" : "clear(") + block + ")");
    }
    if (held_) preds.push_back("clear(" + *held_ + ")");
    std::sort(preds.begin(), preds.end());
    return preds;
}

std::vector<std::string> BlocksWorldEnv::valid_actions() const {
    std::vector<std::string> actions;
    if (!held_) {
        for (const auto& [block, support] : supports_) {
            if (!is_clear(block)) continue;
            if (support == "table") actions.push_back("pickup(" + block + ")");
            else actions.push_back("unstack(" + block + "," + support + ")");
        }
    } else {
        actions.push_back("putdown(" + *held_ + ")");
        for (const auto& [block, support] : supports_) {
            if (is_clear(block)) actions.push_back("stack(" + *held_ + "," + block + ")");
        }
    }
    actions.push_back("look");
    return actions;
}

std::string BlocksWorldEnv::step(const std::string& action) {
    auto parsed = parse_action(action);
    if (!parsed) return kInvalidActionMessage;
    const auto& a = *parsed;

    auto exists = [&](const std::string& b) {
        return supports_.count(b) > 0 || (held_ && *held_ == b);
    };

    if (a.verb == "look") return render_state();
    if (a.verb == "check_valid_actions") return render_valid_actions(valid_actions());

    if (a.verb == "pickup" && a.args.size() == 1) {
        const auto& b = a.args[0];
        if (held_ || !exists(b) || !supports_.count(b) || supports_[b] != "table" || !is_clear(b))
            return kInvalidActionMessage;
        supports_.erase(b);
        held_ = b;
    } else if (a.verb == "putdown" && a.args.size() == 1) {
        const auto& b = a.args[0];
        if (!held_ || *held_ != b) return kInvalidActionMessage;
        supports_[b] = "table";
        held_.reset();
    } else if (a.verb == "unstack" && a.args.size() == 2) {
        const auto& b = a.args[0];
        const auto& under = a.args[1];
        if (held_ || !supports_.count(b) || supports_[b] != under || !is_clear(b))
            return kInvalidActionMessage;
        supports_.erase(b);
        held_ = b;
    } else if (a.verb == "stack" && a.args.size() == 2) {
        const auto& b = a.args[0];
        const auto& target = a.args[1];
        if (!held_ || *held_ != b || !supports_.count(target) || !is_clear(target))
            return kInvalidActionMessage;
        supports_[b] = target;
        held_.reset();
    } else {
        return kInvalidActionMessage;
    }

    refresh_checkpoints();
    return render_state();
}

std::unique_ptr<Environment> BlocksWorldEnv::clone() const {
    return std::make_unique<BlocksWorldEnv>(*this);
}

std::string BlocksWorldEnv::state_key() const {
    std::ostringstream out;
    out << "held=" << (held_ ? *held_ : "-");
    for (const auto& [b, s] : supports_) out << "|" << b << ":" << s;
    return out.str();
}

std::string render_valid_actions(const std::vector<std::string>& actions) {
    std::string out = "Valid actions:";
    for (size_t i = 0; i < actions.size(); ++i) {
        out += (i ? " | " : " ") + actions[i];
    }
    return out;
}

}  // namespace planact
