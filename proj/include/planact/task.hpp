#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "planact/environment.hpp"

namespace planact {

/// One runnable task: either an explicit world fixture or a seeded
/// generator recipe for the random PDDL-style domains.
struct TaskSpec {
    std::string id;
    std::string domain;  // blocksworld | gripper | adventure | household
    nlohmann::json fixture;    // null when generated
    nlohmann::json generator;  // null when fixture-backed

    std::unique_ptr<Environment> make_env() const;
};

struct TaskManifest {
    std::vector<TaskSpec> tasks;

    static TaskManifest load(const std::filesystem::path& data_dir);
    const TaskSpec* find(const std::string& id) const;
};

/// 150 for adventure, 100 otherwise.
int default_max_total_steps(const std::string& domain);

nlohmann::json load_json_file(const std::filesystem::path& path);

}  // namespace planact
