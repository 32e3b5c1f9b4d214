#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "planact/orchestrator.hpp"
#include "planact/ruleset.hpp"
#include "planact/task.hpp"

namespace {

using planact::RunConfig;
using nlohmann::json;

void add_run_options(CLI::App* cmd, RunConfig& cfg, std::string& config_file) {
    cmd->add_option("--config", config_file, "JSON config file; flags override its values");
    cmd->add_option("--backend", cfg.backend_kind, "Backend: http | replay | oracle");
    cmd->add_option("--endpoint", cfg.endpoint, "OpenAI-compatible base URL (http backend)");
    cmd->add_option("--model", cfg.model, "Model name (http backend)");
    cmd->add_option("--api-key-env", cfg.api_key_env,
                    "Environment variable holding the API key");
    cmd->add_option("--replay", cfg.replay_file, "Replay transcript file (replay backend)");
    cmd->add_flag("--strict-replay", cfg.strict_replay,
                  "Check stored prompt prefixes while replaying");
    cmd->add_option("--max-total-steps", cfg.max_total_steps,
                    "Environment step budget (0 = domain default)");
    cmd->add_option("--max-sub-steps", cfg.max_sub_steps, "Per-subgoal actor step budget");
    cmd->add_option("--history-window", cfg.history_window,
                    "Planner history window (0 = full history)");
    cmd->add_option("--skill-limit", cfg.skill_limit, "Max skill exemplars per actor prompt");
    cmd->add_option("--seed", cfg.seed, "Seed recorded with the run");
    cmd->add_option("--temperature", cfg.decoding.temperature, "Decoding temperature");
    cmd->add_option("--max-tokens", cfg.decoding.max_tokens, "Decoding max tokens");
    cmd->add_option("--data-dir", cfg.data_dir, "Data directory (default: PLANACT_DATA_DIR or data)");
    cmd->add_option("--outdir", cfg.out_dir, "Directory for run artifacts");
    cmd->add_option("--label", cfg.run_label, "Run subdirectory name (default: timestamp)");
}

RunConfig merge_config_file(const RunConfig& flags, const std::string& config_file,
                            const CLI::App* cmd) {
    if (config_file.empty()) return flags;
    RunConfig base = RunConfig::from_json(planact::load_json_file(config_file));
    RunConfig merged = base;
    auto overridden = [&](const std::string& name) {
        return cmd->count(name) > 0;
    };
    if (overridden("--backend")) merged.backend_kind = flags.backend_kind;
    if (overridden("--endpoint")) merged.endpoint = flags.endpoint;
    if (overridden("--model")) merged.model = flags.model;
    if (overridden("--api-key-env")) merged.api_key_env = flags.api_key_env;
    if (overridden("--replay")) merged.replay_file = flags.replay_file;
    if (overridden("--strict-replay")) merged.strict_replay = flags.strict_replay;
    if (overridden("--max-total-steps")) merged.max_total_steps = flags.max_total_steps;
    if (overridden("--max-sub-steps")) merged.max_sub_steps = flags.max_sub_steps;
    if (overridden("--history-window")) merged.history_window = flags.history_window;
    if (overridden("--skill-limit")) merged.skill_limit = flags.skill_limit;
    if (overridden("--seed")) merged.seed = flags.seed;
    if (overridden("--temperature")) merged.decoding.temperature = flags.decoding.temperature;
    if (overridden("--max-tokens")) merged.decoding.max_tokens = flags.decoding.max_tokens;
    if (overridden("--data-dir")) merged.data_dir = flags.data_dir;
    if (overridden("--outdir")) merged.out_dir = flags.out_dir;
    if (overridden("--label")) merged.run_label = flags.run_label;
    if (!flags.task_id.empty()) merged.task_id = flags.task_id;
    return merged;
}

int print_episode_summary(const planact::EpisodeRecord& record) {
    std::cout << "task: " << record.task_id << " (" << record.domain << ")\n";
    std::cout << "success: " << (record.outcome.success ? "yes" : "no")
              << ", progress: " << record.outcome.progress_rate
              << ", env steps: " << record.outcome.total_env_steps << "\n";
    if (record.outcome.task_complete_declared) std::cout << "planner declared TASK COMPLETE\n";
    if (!record.error.empty()) std::cout << "error: " << record.error << "\n";
    std::cout << planact::format_token_share_table(record.tokens);
    return record.error.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical planner/actor agent harness with a neurosymbolic belief state"};
    app.require_subcommand(1);

    RunConfig run_cfg;
    std::string run_config_file;
    auto* run_cmd = app.add_subcommand("run", "Run a single task episode");
    run_cmd->add_option("--task", run_cfg.task_id, "Task id from the manifest")->required();
    add_run_options(run_cmd, run_cfg, run_config_file);

    RunConfig suite_cfg;
    std::string suite_config_file;
    std::string suite_domain;
    int suite_workers = 1;
    std::string suite_report_path;
    auto* suite_cmd = app.add_subcommand("suite", "Run every task in the manifest");
    suite_cmd->add_option("--domain", suite_domain, "Restrict to one domain");
    suite_cmd->add_option("--workers", suite_workers, "Parallel episode workers");
    suite_cmd->add_option("--report", suite_report_path, "Write the machine-readable report here");
    add_run_options(suite_cmd, suite_cfg, suite_config_file);

    RunConfig replay_cfg;
    std::string replay_config_file;
    auto* replay_cmd = app.add_subcommand("replay", "Re-execute an episode from a transcript");
    replay_cmd->add_option("--task", replay_cfg.task_id, "Task id from the manifest")->required();
    replay_cmd->add_option("--transcript", replay_cfg.replay_file, "Replay transcript")->required();
    add_run_options(replay_cmd, replay_cfg, replay_config_file);

    std::string report_dir;
    auto* report_cmd = app.add_subcommand("report", "Aggregate metrics from run artifacts");
    report_cmd->add_option("--runs", report_dir, "Directory with per-task run outputs")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            RunConfig cfg = merge_config_file(run_cfg, run_config_file, run_cmd);
            return print_episode_summary(planact::run_episode(cfg));
        }
        if (suite_cmd->parsed()) {
            RunConfig cfg = merge_config_file(suite_cfg, suite_config_file, suite_cmd);
            auto data_dir = cfg.data_dir.empty() ? planact::default_data_dir()
                                                 : std::filesystem::path(cfg.data_dir);
            auto manifest = planact::TaskManifest::load(data_dir);
            std::vector<planact::TaskSpec> tasks;
            for (const auto& t : manifest.tasks) {
                if (suite_domain.empty() || t.domain == suite_domain) tasks.push_back(t);
            }
            auto report = planact::run_suite(tasks, cfg, suite_workers);
            std::cout << report.table();
            if (!suite_report_path.empty()) {
                std::ofstream out(suite_report_path);
                out << report.to_json().dump(2) << "\n";
                std::cout << "report written to " << suite_report_path << "\n";
            }
            return 0;
        }
        if (replay_cmd->parsed()) {
            RunConfig cfg = merge_config_file(replay_cfg, replay_config_file, replay_cmd);
            cfg.backend_kind = "replay";
            return print_episode_summary(planact::run_episode(cfg));
        }
        if (report_cmd->parsed()) {
            planact::TokenLedger ledger;
            std::vector<planact::SuiteReport::TaskResult> results;
            for (const auto& entry :
                 std::filesystem::recursive_directory_iterator(report_dir)) {
                if (entry.path().filename() != "metrics.json") continue;
                json m = planact::load_json_file(entry.path());
                planact::SuiteReport::TaskResult r;
                r.task_id = m.value("task_id", entry.path().parent_path().string());
                r.domain = m.value("domain", "");
                r.success = m.value("success", false);
                r.progress_rate = m.value("progress_rate", 0.0);
                r.total_env_steps = m.value("total_env_steps", 0);
                r.error = m.value("error", "");
                results.push_back(std::move(r));
                if (m.contains("tokens")) {
                    for (auto c : {planact::Component::planner, planact::Component::actor,
                                   planact::Component::verification, planact::Component::synthesis}) {
                        auto key = planact::to_string(c);
                        if (m["tokens"].contains(key)) {
                            ledger.add(c, m["tokens"][key].value("prompt_tokens", 0LL),
                                       m["tokens"][key].value("completion_tokens", 0LL));
                        }
                    }
                }
            }
            if (results.empty()) {
                std::cerr << "no metrics.json files under " << report_dir << "\n";
                return 1;
            }
            auto report = planact::aggregate_suite(results);
            std::cout << report.table();
            std::cout << planact::format_token_share_table(ledger);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
