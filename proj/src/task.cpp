#include "planact/task.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "planact/env_adventure.hpp"
#include "planact/env_blocksworld.hpp"
#include "planact/env_gripper.hpp"
#include "planact/env_household.hpp"

namespace planact {

using nlohmann::json;

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    return json::parse(in);
}

std::unique_ptr<Environment> TaskSpec::make_env() const {
    if (domain == "blocksworld") {
        if (!generator.is_null()) {
            return std::make_unique<BlocksWorldEnv>(BlocksWorldEnv::random(
                generator.value("seed", 0u), generator.value("blocks", 4)));
        }
        std::map<std::string, std::string> supports;
        for (auto it = fixture.at("blocks").begin(); it != fixture.at("blocks").end(); ++it) {
            supports[it.key()] = it.value().get<std::string>();
        }
        std::vector<BlocksGoalAtom> goal;
        for (const auto& atom : fixture.at("goal")) {
            std::string kind = atom.at(0).get<std::string>();
            if (kind == "on") {
                goal.push_back({BlocksGoalAtom::Kind::on, atom.at(1).get<std::string>(),
                                atom.at(2).get<std::string>()});
            } else if (kind == "on_table") {
                goal.push_back({BlocksGoalAtom::Kind::on_table, atom.at(1).get<std::string>(), ""});
            } else {
                throw std::runtime_error("unknown blocksworld goal atom kind: " + kind);
            }
        }
        return std::make_unique<BlocksWorldEnv>(std::move(supports), std::move(goal));
    }
    if (domain == "gripper") {
        if (!generator.is_null()) {
            return std::make_unique<GripperEnv>(GripperEnv::random(
                generator.value("seed", 0u), generator.value("balls", 2),
                generator.value("rooms", 2)));
        }
        std::vector<std::string> rooms;
        for (const auto& r : fixture.at("rooms")) rooms.push_back(r.get<std::string>());
        std::map<std::string, std::string> balls, goals;
        for (auto it = fixture.at("balls").begin(); it != fixture.at("balls").end(); ++it) {
            balls[it.key()] = it.value().get<std::string>();
        }
        for (auto it = fixture.at("goals").begin(); it != fixture.at("goals").end(); ++it) {
            goals[it.key()] = it.value().get<std::string>();
        }
        return std::make_unique<GripperEnv>(std::move(rooms),
                                            fixture.at("robot").get<std::string>(),
                                            std::move(balls), std::move(goals));
    }
    if (domain == "adventure") return std::make_unique<AdventureEnv>(fixture);
    if (domain == "household") return std::make_unique<HouseholdEnv>(fixture);
    throw std::runtime_error("unknown domain: " + domain);
}

TaskManifest TaskManifest::load(const std::filesystem::path& data_dir) {
    json j = load_json_file(data_dir / "tasks" / "manifest.json");
    TaskManifest manifest;
    for (const auto& tj : j.at("tasks")) {
        TaskSpec spec;
        spec.id = tj.at("id").get<std::string>();
        spec.domain = tj.at("domain").get<std::string>();
        if (tj.contains("fixture")) {
            spec.fixture = load_json_file(data_dir / tj.at("fixture").get<std::string>());
        }
        if (tj.contains("generator")) spec.generator = tj.at("generator");
        manifest.tasks.push_back(std::move(spec));
    }
    return manifest;
}

const TaskSpec* TaskManifest::find(const std::string& id) const {
    for (const auto& t : tasks) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

int default_max_total_steps(const std::string& domain) {
    return domain == "adventure" ? 150 : 100;
}

}  // namespace planact
