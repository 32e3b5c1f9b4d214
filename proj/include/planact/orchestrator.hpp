#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "planact/belief_update.hpp"
#include "planact/domain.hpp"
#include "planact/gateway.hpp"
#include "planact/planner.hpp"
#include "planact/task.hpp"

namespace planact {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string task_id;
    std::string backend_kind = "oracle";  // http | replay | oracle

    // http backend
    std::string endpoint;
    std::string model;
    std::string api_key_env = "PLANACT_API_KEY";

    // replay backend
    std::string replay_file;
    bool strict_replay = false;

    int max_total_steps = 0;  // 0 = domain default (100, adventure 150)
    int max_sub_steps = 35;
    int history_window = 0;  // 0 = full history
    int skill_limit = 2;
    unsigned seed = 0;
    bool actor_binds_summary = true;
    Decoding decoding;

    std::string data_dir;  // empty = PLANACT_DATA_DIR or "data"
    std::string out_dir;   // empty = do not write run files
    std::string run_label;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

struct EpisodeOutcome {
    bool success = false;
    double progress_rate = 0.0;
    int total_env_steps = 0;
    bool task_complete_declared = false;
};

/// Persisted artifact of one episode. Serialization is deterministic for
/// deterministic backends; wall-clock timing is kept out of the
/// determinism-relevant payload.
struct EpisodeRecord {
    std::string task_id;
    std::string domain;
    RunConfig config;
    struct StepRecord {
        PlannerStep planner;
        std::optional<SubEpisode> sub_episode;
        std::optional<BeliefState> belief_after;
        VerificationReport verification;
    };
    std::vector<StepRecord> steps;
    EpisodeOutcome outcome;
    TokenLedger tokens;
    std::string error;  // empty = clean run
    long long duration_ms = 0;
    std::vector<nlohmann::json> trajectory;  // one event object per line

    nlohmann::json to_json(bool include_timing = true) const;
    std::string trajectory_jsonl() const;
};

/// Runs one episode end to end. `backend_override` substitutes the
/// configured backend (used by tests); `task_override` bypasses the
/// manifest. Backend and parse failures terminate the episode with a
/// recorded error, never an exception.
EpisodeRecord run_episode(const RunConfig& config, Backend* backend_override = nullptr,
                          const TaskSpec* task_override = nullptr);

struct SuiteReport {
    struct TaskResult {
        std::string task_id;
        std::string domain;
        bool success = false;
        double progress_rate = 0.0;
        int total_env_steps = 0;
        std::string error;
    };
    std::vector<TaskResult> results;
    std::map<std::string, double> success_rate_by_domain;
    std::map<std::string, double> progress_rate_by_domain;
    double success_rate = 0.0;
    double mean_progress_rate = 0.0;

    nlohmann::json to_json() const;
    std::string table() const;
};

SuiteReport aggregate_suite(const std::vector<SuiteReport::TaskResult>& results);

/// Runs every task in the manifest selection; individual failures are
/// recorded per task and never abort the suite.
SuiteReport run_suite(const std::vector<TaskSpec>& tasks, const RunConfig& base_config,
                      int workers = 1);

/// Per-component share of total tokens, in percent. Sets `zero_total` when
/// the ledger is empty (all shares 0).
std::map<Component, double> report_token_shares(const TokenLedger& ledger,
                                                bool* zero_total = nullptr);

std::string format_token_share_table(const TokenLedger& ledger);

}  // namespace planact
