#include "planact/env_adventure.hpp"

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

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string squeeze(const std::string& s) {
    std::string out;
    bool space = false;
    for (char c : trim(s)) {
        if (c == ' ' || c == '\t') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

constexpr const char* kBlockedMessage = "You can't go that way.";

}  // namespace

AdventureEnv::AdventureEnv(const json& fixture) {
    goal_ = fixture.at("goal").get<std::string>();
    success_message_ = fixture.value("success_message", "You have achieved your goal.");
    start_room_ = fixture.at("start_room").get<std::string>();
    for (const auto& rj : fixture.at("rooms")) {
        Room r;
        r.name = rj.at("name").get<std::string>();
        r.description = rj.value("description", "");
        for (const auto& ej : rj.value("exits", json::array())) {
            Exit e;
            e.label = ej.at("label").get<std::string>();
            e.to = ej.at("to").get<std::string>();
            e.concealed = ej.value("concealed", false);
            r.exits.push_back(std::move(e));
        }
        rooms_.push_back(std::move(r));
    }
    for (const auto& oj : fixture.value("objects", json::array())) {
        Object o;
        o.name = oj.at("name").get<std::string>();
        o.initial_location = oj.at("location").get<std::string>();
        o.takeable = oj.value("takeable", false);
        o.openable = oj.value("openable", false);
        o.concealed = oj.value("concealed", false);
        o.examine_text = oj.value("examine", "");
        o.open_message = oj.value("open_message", "");
        for (const auto& r : oj.value("reveals", json::array())) {
            o.reveals.push_back(r.get<std::string>());
        }
        objects_.push_back(std::move(o));
    }
    for (const auto& tj : fixture.value("triggers", json::array())) {
        Trigger t;
        t.action = lower(squeeze(tj.at("action").get<std::string>()));
        t.message = tj.value("message", "Something happens.");
        for (const auto& r : tj.value("reveal_objects", json::array())) {
            t.reveal_objects.push_back(r.get<std::string>());
        }
        for (const auto& e : tj.value("reveal_exits", json::array())) {
            t.reveal_exits.emplace_back(e.at("room").get<std::string>(),
                                        e.at("label").get<std::string>());
        }
        for (const auto& f : tj.value("set_flags", json::array())) {
            t.set_flags.push_back(f.get<std::string>());
        }
        triggers_.push_back(std::move(t));
    }
    goal_condition_ = fixture.at("goal_condition");
    for (const auto& cj : fixture.value("checkpoints", json::array())) {
        checkpoints_.emplace_back(cj.at("label").get<std::string>(), cj.at("condition"));
    }

    agent_room_ = start_room_;
    visited_.insert(agent_room_);
    for (const auto& o : objects_) {
        object_at_[o.name] = o.initial_location;
        if (!o.concealed) revealed_objects_.insert(o.name);
    }
    checkpoints_hit_.assign(checkpoints_.size(), false);
    refresh_checkpoints();
    initial_observation_ = render_room();
}

const AdventureEnv::Room* AdventureEnv::room(const std::string& name) const {
    for (const auto& r : rooms_) {
        if (r.name == name) return &r;
    }
    return nullptr;
}

const AdventureEnv::Object* AdventureEnv::object(const std::string& name) const {
    for (const auto& o : objects_) {
        if (lower(o.name) == lower(name)) return &o;
    }
    return nullptr;
}

bool AdventureEnv::object_visible_here(const std::string& name) const {
    const Object* o = object(name);
    if (!o || !revealed_objects_.count(o->name)) return false;
    auto it = object_at_.find(o->name);
    return it != object_at_.end() && it->second == agent_room_;
}

bool AdventureEnv::exit_open(const Exit& e) const {
    if (!e.concealed) return true;
    return revealed_exits_.count(agent_room_ + "/" + e.label) > 0;
}

bool AdventureEnv::condition_holds(const json& cond) const {
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
    if (cond.contains("agent_at")) return agent_room_ == cond["agent_at"].get<std::string>();
    if (cond.contains("visited")) return visited_.count(cond["visited"].get<std::string>()) > 0;
    if (cond.contains("flag")) return flags_.count(cond["flag"].get<std::string>()) > 0;
    if (cond.contains("opened")) return opened_.count(cond["opened"].get<std::string>()) > 0;
    if (cond.contains("object_revealed"))
        return revealed_objects_.count(cond["object_revealed"].get<std::string>()) > 0;
    if (cond.contains("holding")) {
        auto it = object_at_.find(cond["holding"].get<std::string>());
        return it != object_at_.end() && it->second == "inventory";
    }
    if (cond.contains("object_at")) {
        const auto& pair = cond["object_at"];
        auto it = object_at_.find(pair.at(0).get<std::string>());
        return it != object_at_.end() && it->second == pair.at(1).get<std::string>();
    }
    if (cond.contains("exit_revealed")) {
        const auto& pair = cond["exit_revealed"];
        return revealed_exits_.count(pair.at(0).get<std::string>() + "/" +
                                     pair.at(1).get<std::string>()) > 0;
    }
    return false;
}

bool AdventureEnv::is_success() const { return condition_holds(goal_condition_); }

void AdventureEnv::refresh_checkpoints() {
    for (size_t i = 0; i < checkpoints_.size(); ++i) {
        if (condition_holds(checkpoints_[i].second)) checkpoints_hit_[i] = true;
    }
}

std::vector<std::string> AdventureEnv::checkpoint_labels() const {
    std::vector<std::string> labels;
    for (const auto& [label, cond] : checkpoints_) labels.push_back(label);
    return labels;
}

double AdventureEnv::progress_rate() const {
    if (checkpoints_hit_.empty()) return 0.0;
    size_t hit = std::count(checkpoints_hit_.begin(), checkpoints_hit_.end(), true);
    return static_cast<double>(hit) / static_cast<double>(checkpoints_hit_.size());
}

std::string AdventureEnv::render_room() const {
    const Room* r = room(agent_room_);
    std::ostringstream out;
    out << "You are in the " << agent_room_ << ".";
    if (r && !r->description.empty()) out << " " << r->description;
    for (const auto& o : objects_) {
        if (object_visible_here(o.name)) out << " There is a " << o.name << " here.";
    }
    if (r) {
        std::vector<std::string> open_labels;
        for (const auto& e : r->exits) {
            if (exit_open(e)) open_labels.push_back(e.label);
        }
        if (!open_labels.empty()) {
            out << " Exits:";
            for (size_t i = 0; i < open_labels.size(); ++i) {
                out << (i ? ", " : " ") << open_labels[i];
            }
            out << ".";
        }
    }
    return out.str();
}

std::string AdventureEnv::initial_observation() const { return initial_observation_; }

std::vector<std::string> AdventureEnv::valid_actions() const {
    std::vector<std::string> actions;
    const Room* r = room(agent_room_);
    if (r) {
        for (const auto& e : r->exits) {
            if (exit_open(e)) actions.push_back("go " + e.label);
        }
    }
    for (const auto& o : objects_) {
        if (!object_visible_here(o.name)) continue;
        actions.push_back("examine " + o.name);
        if (o.openable && !opened_.count(o.name)) actions.push_back("open " + o.name);
        if (o.takeable) actions.push_back("take " + o.name);
    }
    for (const auto& [obj, loc] : object_at_) {
        if (loc == "inventory") actions.push_back("drop " + obj);
    }
    for (const auto& t : triggers_) {
        if (fired_triggers_.count(t.action)) continue;
        // expose world-specific trigger actions whose object is present
        auto space = t.action.find(' ');
        if (space == std::string::npos) continue;
        std::string obj = t.action.substr(space + 1);
        if (object_visible_here(obj) &&
            std::find(actions.begin(), actions.end(), t.action) == actions.end()) {
            actions.push_back(t.action);
        }
    }
    actions.push_back("look");
    actions.push_back("inventory");
    return actions;
}

std::string AdventureEnv::fire_trigger(const Trigger& t) {
    for (const auto& name : t.reveal_objects) revealed_objects_.insert(name);
    for (const auto& [room_name, label] : t.reveal_exits) {
        revealed_exits_.insert(room_name + "/" + label);
    }
    for (const auto& f : t.set_flags) flags_.insert(f);
    fired_triggers_.insert(t.action);
    return t.message;
}

std::string AdventureEnv::step(const std::string& action) {
    std::string norm = lower(squeeze(action));
    if (norm.empty()) return kInvalidActionMessage;

    std::string result;
    bool handled = false;

    // world-specific trigger actions take precedence over generic verbs
    for (const auto& t : triggers_) {
        if (t.action != norm) continue;
        auto space = t.action.find(' ');
        std::string obj = space == std::string::npos ? "" : t.action.substr(space + 1);
        if (!obj.empty() && !object_visible_here(obj)) return kInvalidActionMessage;
        std::string message = fire_trigger(t);
        if (norm.rfind("open ", 0) == 0) {
            if (const Object* o = object(obj)) {
                opened_.insert(o->name);
                for (const auto& inner : o->reveals) {
                    revealed_objects_.insert(inner);
                    object_at_[inner] = agent_room_;
                }
            }
        }
        result = message;
        handled = true;
        break;
    }

    if (!handled && norm == "look") {
        result = render_room();
        handled = true;
    }
    if (!handled && norm == "check valid actions") {
        refresh_checkpoints();
        return render_valid_actions(valid_actions());
    }
    if (!handled && norm == "inventory") {
        std::vector<std::string> inv;
        for (const auto& o : objects_) {
            auto it = object_at_.find(o.name);
            if (it != object_at_.end() && it->second == "inventory") inv.push_back(o.name);
        }
        if (inv.empty()) {
            result = "You are empty-handed.";
        } else {
            result = "You are carrying: ";
            for (size_t i = 0; i < inv.size(); ++i) {
                result += (i ? ", a " : "a ") + inv[i];
            }
            result += ".";
        }
        handled = true;
    }

    if (!handled && norm.rfind("go ", 0) == 0) {
        std::string label = norm.substr(3);
        const Room* r = room(agent_room_);
        const Exit* found = nullptr;
        if (r) {
            for (const auto& e : r->exits) {
                if (lower(e.label) == label && exit_open(e)) {
                    found = &e;
                    break;
                }
            }
        }
        if (!found) {
            result = kBlockedMessage;
        } else {
            agent_room_ = found->to;
            visited_.insert(agent_room_);
            result = render_room();
            refresh_checkpoints();
            if (is_success()) result += " " + success_message_;
        }
        handled = true;
    }

    if (!handled && norm.rfind("examine ", 0) == 0) {
        std::string name = norm.substr(8);
        const Object* o = object(name);
        if (!o || !object_visible_here(o->name)) return kInvalidActionMessage;
        result = o->examine_text.empty()
                     ? "You see nothing special about the " + o->name + "."
                     : o->examine_text;
        handled = true;
    }

    if (!handled && norm.rfind("open ", 0) == 0) {
        std::string name = norm.substr(5);
        const Object* o = object(name);
        if (!o || !object_visible_here(o->name) || !o->openable || opened_.count(o->name))
            return kInvalidActionMessage;
        opened_.insert(o->name);
        for (const auto& inner : o->reveals) {
            revealed_objects_.insert(inner);
            object_at_[inner] = agent_room_;
        }
        result = o->open_message.empty() ? "You open the " + o->name + "." : o->open_message;
        handled = true;
    }

    if (!handled && norm.rfind("take ", 0) == 0) {
        std::string name = norm.substr(5);
        const Object* o = object(name);
        if (!o || !object_visible_here(o->name) || !o->takeable) return kInvalidActionMessage;
        object_at_[o->name] = "inventory";
        result = "You take the " + o->name + ".";
        handled = true;
    }

    if (!handled && norm.rfind("drop ", 0) == 0) {
        std::string name = norm.substr(5);
        const Object* o = object(name);
        if (!o) return kInvalidActionMessage;
        auto it = object_at_.find(o->name);
        if (it == object_at_.end() || it->second != "inventory") return kInvalidActionMessage;
        it->second = agent_room_;
        result = "You drop the " + o->name + ".";
        handled = true;
    }

    if (!handled) return kInvalidActionMessage;
    refresh_checkpoints();
    return result;
}

std::unique_ptr<Environment> AdventureEnv::clone() const {
    return std::make_unique<AdventureEnv>(*this);
}

std::string AdventureEnv::state_key() const {
    std::ostringstream out;
    out << "room=" << agent_room_;
    for (const auto& [obj, loc] : object_at_) out << "|" << obj << "@" << loc;
    out << "|opened=";
    for (const auto& o : opened_) out << o << ";";
    out << "|revealed=";
    for (const auto& o : revealed_objects_) out << o << ";";
    out << "|exits=";
    for (const auto& e : revealed_exits_) out << e << ";";
    out << "|flags=";
    for (const auto& f : flags_) out << f << ";";
    return out.str();
}

}  // namespace planact
