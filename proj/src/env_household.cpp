#include "planact/env_household.hpp"

#include <algorithm>
#include <sstream>

namespace planact {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string squeeze(const std::string& s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

constexpr const char* kStartLocation = "middle of the room";

}  // namespace

HouseholdEnv::HouseholdEnv(const json& fixture) {
    task_ = fixture.at("task").get<std::string>();
    inventory_capacity_ = fixture.value("inventory_capacity", 1);
    for (const auto& rj : fixture.at("receptacles")) {
        receptacles_.push_back(Receptacle{rj.at("name").get<std::string>(),
                                          rj.value("type", "surface")});
    }
    for (const auto& oj : fixture.at("objects")) {
        std::string name = oj.at("name").get<std::string>();
        object_order_.push_back(name);
        object_at_[name] = oj.at("location").get<std::string>();
    }
    goal_condition_ = fixture.at("goal_condition");
    for (const auto& cj : fixture.value("checkpoints", json::array())) {
        checkpoints_.emplace_back(cj.at("label").get<std::string>(), cj.at("condition"));
    }

    agent_location_ = kStartLocation;
    checkpoints_hit_.assign(checkpoints_.size(), false);
    refresh_checkpoints();

    std::ostringstream obs;
    obs << "You are in the middle of a room. Looking quickly around you, you see ";
    for (size_t i = 0; i < receptacles_.size(); ++i) {
        if (i) obs << (i + 1 == receptacles_.size() ? " and " : ", ");
        obs << "a " << receptacles_[i].name;
    }
    obs << ".";
    initial_observation_ = obs.str();
}

const HouseholdEnv::Receptacle* HouseholdEnv::receptacle(const std::string& name) const {
    for (const auto& r : receptacles_) {
        if (r.name == name) return &r;
    }
    return nullptr;
}

bool HouseholdEnv::receptacle_accessible(const Receptacle& r) const {
    return r.type != "closed" || opened_.count(r.name) > 0;
}

std::vector<std::string> HouseholdEnv::objects_at(const std::string& place) const {
    std::vector<std::string> out;
    for (const auto& name : object_order_) {
        if (object_at_.at(name) == place) out.push_back(name);
    }
    return out;
}

int HouseholdEnv::inventory_count() const {
    return static_cast<int>(objects_at("inventory").size());
}

std::string HouseholdEnv::contents_sentence(const Receptacle& r) const {
    std::string prep = r.type == "surface" ? "On" : "In";
    auto items = objects_at(r.name);
    std::string out = prep + " the " + r.name + ", you see ";
    if (items.empty()) {
        out += "nothing.";
        return out;
    }
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += (i + 1 == items.size() ? " and " : ", ");
        out += "a " + items[i];
    }
    out += ".";
    return out;
}

bool HouseholdEnv::condition_holds(const json& cond) const {
    if (cond.contains("all_of")) {
        for (const auto& c : cond["all_of"]) {
            if (!condition_holds(c)) return false;
        }
        return true;
    }
    if (cond.contains("any_of")) {
        for (const auto& c : cond["any_of"]) {
            if (condition_holds(c)) return true;
        }
        return false;
    }
    if (cond.contains("agent_at")) return agent_location_ == cond["agent_at"].get<std::string>();
    if (cond.contains("visited")) return visited_.count(cond["visited"].get<std::string>()) > 0;
    if (cond.contains("opened")) return opened_.count(cond["opened"].get<std::string>()) > 0;
    if (cond.contains("holding")) {
        auto it = object_at_.find(cond["holding"].get<std::string>());
        return it != object_at_.end() && it->second == "inventory";
    }
    if (cond.contains("ever_held")) return ever_held_.count(cond["ever_held"].get<std::string>()) > 0;
    if (cond.contains("ever_held_prefix")) {
        std::string prefix = cond["ever_held_prefix"].get<std::string>();
        return std::any_of(ever_held_.begin(), ever_held_.end(), [&](const std::string& o) {
            return o.rfind(prefix, 0) == 0;
        });
    }
    if (cond.contains("object_at")) {
        const auto& pair = cond["object_at"];
        auto it = object_at_.find(pair.at(0).get<std::string>());
        return it != object_at_.end() && it->second == pair.at(1).get<std::string>();
    }
    if (cond.contains("object_count_at")) {
        const auto& spec = cond["object_count_at"];
        std::string prefix = spec.at("name_prefix").get<std::string>();
        std::string place = spec.at("place").get<std::string>();
        int need = spec.at("count").get<int>();
        int have = 0;
        for (const auto& [obj, loc] : object_at_) {
            if (loc == place && obj.rfind(prefix, 0) == 0) ++have;
        }
        return have >= need;
    }
    return false;
}

bool HouseholdEnv::is_success() const { return condition_holds(goal_condition_); }

void HouseholdEnv::refresh_checkpoints() {
    for (size_t i = 0; i < checkpoints_.size(); ++i) {
        if (condition_holds(checkpoints_[i].second)) checkpoints_hit_[i] = true;
    }
}

std::vector<std::string> HouseholdEnv::checkpoint_labels() const {
    std::vector<std::string> labels;
    for (const auto& [label, cond] : checkpoints_) labels.push_back(label);
    return labels;
}

double HouseholdEnv::progress_rate() const {
    if (checkpoints_hit_.empty()) return 0.0;
    size_t hit = std::count(checkpoints_hit_.begin(), checkpoints_hit_.end(), true);
    return static_cast<double>(hit) / static_cast<double>(checkpoints_hit_.size());
}

std::vector<std::string> HouseholdEnv::valid_actions() const {
    std::vector<std::string> actions;
    for (const auto& r : receptacles_) {
        if (r.name != agent_location_) actions.push_back("go to " + r.name);
    }
    if (const Receptacle* here = receptacle(agent_location_)) {
        if (here->type == "closed" && !opened_.count(here->name)) {
            actions.push_back("open " + here->name);
        }
        if (receptacle_accessible(*here) && inventory_count() < inventory_capacity_) {
            for (const auto& obj : objects_at(here->name)) {
                actions.push_back("take " + obj + " from " + here->name);
            }
        }
        if (receptacle_accessible(*here)) {
            std::string prep = here->type == "surface" ? " on " : " in ";
            for (const auto& obj : objects_at("inventory")) {
                actions.push_back("put " + obj + prep + here->name);
            }
        }
        actions.push_back("examine " + here->name);
    }
    actions.push_back("look");
    actions.push_back("inventory");
    return actions;
}

std::string HouseholdEnv::step(const std::string& action) {
    std::string norm = lower(squeeze(action));
    if (norm.empty()) return kInvalidActionMessage;

    auto finish = [&](const std::string& result) {
        refresh_checkpoints();
        return result;
    };

    if (norm == "look" || (norm == "examine " + agent_location_)) {
        if (agent_location_ == kStartLocation) return finish(initial_observation_);
        const Receptacle* here = receptacle(agent_location_);
        if (!here) return kInvalidActionMessage;
        if (!receptacle_accessible(*here)) {
            return finish("The " + here->name + " is closed.");
        }
        return finish(contents_sentence(*here));
    }
    if (norm == "check valid actions") return render_valid_actions(valid_actions());
    if (norm == "inventory") {
        auto inv = objects_at("inventory");
        if (inv.empty()) return finish("You are not carrying anything.");
        std::string out = "You are carrying: ";
        for (size_t i = 0; i < inv.size(); ++i) out += (i ? ", a " : "a ") + inv[i];
        return finish(out + ".");
    }

    if (norm.rfind("go to ", 0) == 0) {
        std::string target = norm.substr(6);
        const Receptacle* r = receptacle(target);
        if (!r || target == agent_location_) return kInvalidActionMessage;
        agent_location_ = r->name;
        visited_.insert(r->name);
        std::string out = "You arrive at " + r->name + ". ";
        if (!receptacle_accessible(*r)) out += "The " + r->name + " is closed.";
        else out += contents_sentence(*r);
        return finish(out);
    }

    if (norm.rfind("open ", 0) == 0) {
        std::string target = norm.substr(5);
        const Receptacle* r = receptacle(target);
        if (!r || r->name != agent_location_ || r->type != "closed" || opened_.count(r->name))
            return kInvalidActionMessage;
        opened_.insert(r->name);
        return finish("You open the " + r->name + ". " + contents_sentence(*r));
    }

    if (norm.rfind("take ", 0) == 0) {
        auto from_pos = norm.find(" from ");
        if (from_pos == std::string::npos) return kInvalidActionMessage;
        std::string obj = norm.substr(5, from_pos - 5);
        std::string recep = norm.substr(from_pos + 6);
        const Receptacle* r = receptacle(recep);
        if (!r || r->name != agent_location_ || !receptacle_accessible(*r))
            return kInvalidActionMessage;
        auto it = object_at_.find(obj);
        if (it == object_at_.end() || it->second != r->name) return kInvalidActionMessage;
        if (inventory_count() >= inventory_capacity_) return kInvalidActionMessage;
        it->second = "inventory";
        ever_held_.insert(obj);
        return finish("You take the " + obj + " from the " + r->name + ".");
    }

    if (norm.rfind("put ", 0) == 0) {
        // accept "put X in Y", "put X on Y", "put X in/on Y"
        size_t sep_pos = std::string::npos;
        size_t sep_len = 0;
        for (const char* sep : {" in/on ", " in ", " on "}) {
            auto p = norm.find(sep);
            if (p != std::string::npos && (sep_pos == std::string::npos || p < sep_pos)) {
                sep_pos = p;
                sep_len = std::string(sep).size();
            }
        }
        if (sep_pos == std::string::npos) return kInvalidActionMessage;
        std::string obj = norm.substr(4, sep_pos - 4);
        std::string recep = norm.substr(sep_pos + sep_len);
        const Receptacle* r = receptacle(recep);
        if (!r || r->name != agent_location_ || !receptacle_accessible(*r))
            return kInvalidActionMessage;
        auto it = object_at_.find(obj);
        if (it == object_at_.end() || it->second != "inventory") return kInvalidActionMessage;
        it->second = r->name;
        std::string prep = r->type == "surface" ? " on the " : " in the ";
        return finish("You put the " + obj + prep + r->name + ".");
    }

    return kInvalidActionMessage;
}

std::unique_ptr<Environment> HouseholdEnv::clone() const {
    return std::make_unique<HouseholdEnv>(*this);
}

std::string HouseholdEnv::state_key() const {
    std::ostringstream out;
    out << "at=" << agent_location_;
    for (const auto& [obj, loc] : object_at_) out << "|" << obj << "@" << loc;
    out << "|opened=";
    for (const auto& o : opened_) out << o << ";";
    return out.str();
}

}  // namespace planact
