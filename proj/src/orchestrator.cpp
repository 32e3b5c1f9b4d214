#include "planact/orchestrator.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "planact/actor.hpp"
#include "planact/backend_http.hpp"
#include "planact/backend_oracle.hpp"
#include "planact/backend_replay.hpp"
#include "planact/environment.hpp"
#include "planact/ruleset.hpp"
#include "planact/skills.hpp"

namespace planact {

using nlohmann::json;

json RunConfig::to_json() const {
    json j;
    j["task_id"] = task_id;
    j["backend"] = backend_kind;
    j["endpoint"] = endpoint;
    j["model"] = model;
    j["api_key_env"] = api_key_env;
    j["replay_file"] = replay_file;
    j["strict_replay"] = strict_replay;
    j["max_total_steps"] = max_total_steps;
    j["max_sub_steps"] = max_sub_steps;
    j["history_window"] = history_window;
    j["skill_limit"] = skill_limit;
    j["seed"] = seed;
    j["actor_binds_summary"] = actor_binds_summary;
    j["temperature"] = decoding.temperature;
    j["max_tokens"] = decoding.max_tokens;
    j["data_dir"] = data_dir;
    return j;
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig c;
    c.task_id = j.value("task_id", "");
    c.backend_kind = j.value("backend", "oracle");
    c.endpoint = j.value("endpoint", "");
    c.model = j.value("model", "");
    c.api_key_env = j.value("api_key_env", "PLANACT_API_KEY");
    c.replay_file = j.value("replay_file", "");
    c.strict_replay = j.value("strict_replay", false);
    c.max_total_steps = j.value("max_total_steps", 0);
    c.max_sub_steps = j.value("max_sub_steps", 35);
    c.history_window = j.value("history_window", 0);
    c.skill_limit = j.value("skill_limit", 2);
    c.seed = j.value("seed", 0u);
    c.actor_binds_summary = j.value("actor_binds_summary", true);
    c.decoding.temperature = j.value("temperature", 0.0);
    c.decoding.max_tokens = j.value("max_tokens", 1024);
    c.data_dir = j.value("data_dir", "");
    c.out_dir = j.value("out_dir", "");
    return c;
}

namespace {

json subgoal_to_json(const Subgoal& s) {
    json j;
    j["description"] = s.description;
    j["issued_at_k"] = s.issued_at_k;
    if (s.search_locations) j["search_locations"] = *s.search_locations;
    else j["search_locations"] = nullptr;
    return j;
}

json sub_episode_to_json(const SubEpisode& e) {
    json j;
    j["subgoal"] = subgoal_to_json(e.subgoal);
    j["status"] = to_string(e.status);
    j["replan_reason"] = e.replan_reason;
    j["env_steps_consumed"] = e.env_steps_consumed;
    j["steps"] = json::array();
    for (const auto& [action, observation] : e.steps) {
        j["steps"].push_back({{"action", action}, {"observation", observation}});
    }
    return j;
}

json belief_to_json(const BeliefState& b) {
    json j;
    j["k"] = b.k;
    j["symbolic_summary"] = planning_summary(b.symbolic);
    j["status_line"] = b.textual.status_line;
    j["justification"] = b.textual.justification;
    j["learned_facts"] = json::array();
    for (const auto& f : b.textual.learned_facts) {
        j["learned_facts"].push_back({{"k", f.step_k}, {"text", f.text}});
    }
    return j;
}

json ledger_to_json(const TokenLedger& ledger) {
    json j;
    for (const auto& [component, counts] : ledger.by_component) {
        j[to_string(component)] = {{"prompt_tokens", counts.prompt},
                                   {"completion_tokens", counts.completion}};
    }
    auto total = ledger.total();
    j["total"] = {{"prompt_tokens", total.prompt}, {"completion_tokens", total.completion}};
    return j;
}

struct DomainAssets {
    DomainRuleset ruleset;
    SkillLibrary skills;
    std::string instructions;
    std::string example_format;
    std::string planner_exemplars;
};

DomainAssets load_domain_assets(const std::string& domain, const std::filesystem::path& data_dir) {
    DomainAssets assets{ruleset_for_domain(domain, data_dir),
                        SkillLibrary::load_file(data_dir / "skills" / (domain + ".json")), "", "",
                        ""};
    json dj = load_json_file(data_dir / "domains" / (domain + ".json"));
    assets.instructions = dj.value("domain_instructions", "");
    assets.example_format = dj.value("example_format", "");
    assets.planner_exemplars = dj.value("planner_exemplars", "");
    return assets;
}

std::string timestamp_label() {
    auto now = std::chrono::system_clock::now();
    auto t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << "run-" << std::put_time(&tm, "%Y%m%d-%H%M%S");
    return out.str();
}

void write_outputs(const EpisodeRecord& record, const RunConfig& config) {
    if (config.out_dir.empty()) return;
    std::string label = config.run_label.empty() ? timestamp_label() : config.run_label;
    auto dir = std::filesystem::path(config.out_dir) / record.task_id / label;
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "record.json");
        out << record.to_json(true).dump(2) << "\n";
    }
    {
        std::ofstream out(dir / "trajectory.jsonl");
        out << record.trajectory_jsonl();
    }
    {
        json metrics;
        metrics["success"] = record.outcome.success;
        metrics["progress_rate"] = record.outcome.progress_rate;
        metrics["total_env_steps"] = record.outcome.total_env_steps;
        metrics["task_id"] = record.task_id;
        metrics["domain"] = record.domain;
        metrics["error"] = record.error;
        metrics["tokens"] = ledger_to_json(record.tokens);
        metrics["duration_ms"] = record.duration_ms;
        std::ofstream out(dir / "metrics.json");
        out << metrics.dump(2) << "\n";
    }
}

}  // namespace

json EpisodeRecord::to_json(bool include_timing) const {
    json j;
    j["schema_version"] = 1;
    j["task_id"] = task_id;
    j["domain"] = domain;
    j["config"] = config.to_json();
    j["steps"] = json::array();
    for (const auto& step : steps) {
        json sj;
        sj["k"] = step.planner.k;
        sj["reasoning"] = step.planner.reasoning;
        sj["raw_completion"] = step.planner.raw_completion;
        sj["task_complete"] = step.planner.task_complete;
        if (step.planner.plan) {
            sj["plan"] = {{"created_at_k", step.planner.plan->created_at_k},
                          {"subgoals", step.planner.plan->subgoals}};
        } else {
            sj["plan"] = nullptr;
        }
        sj["subgoal"] =
            step.planner.subgoal ? subgoal_to_json(*step.planner.subgoal) : json(nullptr);
        sj["sub_episode"] = step.sub_episode ? sub_episode_to_json(*step.sub_episode) : json(nullptr);
        sj["belief_after"] = step.belief_after ? belief_to_json(*step.belief_after) : json(nullptr);
        sj["verification"] = json::array();
        for (const auto& entry : step.verification.entries) {
            sj["verification"].push_back({{"question", entry.question},
                                          {"answer", entry.answer},
                                          {"justification", entry.justification},
                                          {"parse_error", entry.parse_error}});
        }
        j["steps"].push_back(std::move(sj));
    }
    j["outcome"] = {{"success", outcome.success},
                    {"progress_rate", outcome.progress_rate},
                    {"total_env_steps", outcome.total_env_steps},
                    {"task_complete_declared", outcome.task_complete_declared}};
    j["tokens"] = ledger_to_json(tokens);
    j["error"] = error;
    if (include_timing) j["timing"] = {{"duration_ms", duration_ms}};
    return j;
}

std::string EpisodeRecord::trajectory_jsonl() const {
    std::string out;
    for (const auto& event : trajectory) {
        out += event.dump();
        out += "\n";
    }
    return out;
}

EpisodeRecord run_episode(const RunConfig& config, Backend* backend_override,
                          const TaskSpec* task_override) {
    auto start_time = std::chrono::steady_clock::now();

    EpisodeRecord record;
    record.config = config;

    std::filesystem::path data_dir =
        config.data_dir.empty() ? default_data_dir() : std::filesystem::path(config.data_dir);

    // Configuration and fixture problems are surfaced to the caller: there
    // is no episode to record yet.
    TaskSpec local_task;
    const TaskSpec* task = task_override;
    if (!task) {
        TaskManifest manifest = TaskManifest::load(data_dir);
        const TaskSpec* found = manifest.find(config.task_id);
        if (!found) throw ConfigError("task not found in manifest: " + config.task_id);
        local_task = *found;
        task = &local_task;
    }
    record.task_id = task->id;
    record.domain = task->domain;

    int max_total = config.max_total_steps > 0 ? config.max_total_steps
                                               : default_max_total_steps(task->domain);
    if (max_total <= 0 || config.max_sub_steps <= 0) {
        throw ConfigError("step budgets must be positive");
    }

    auto env = task->make_env();

    std::unique_ptr<Backend> owned_backend;
    Backend* backend = backend_override;
    if (!backend) {
        if (config.backend_kind == "oracle") {
            auto oracle = std::make_unique<OracleBackend>(task->domain);
            oracle->attach_environment(env.get());
            owned_backend = std::move(oracle);
        } else if (config.backend_kind == "replay") {
            if (config.replay_file.empty()) throw ConfigError("replay backend needs --replay file");
            owned_backend = std::make_unique<ReplayBackend>(
                ReplayBackend::load_file(config.replay_file, config.strict_replay));
        } else if (config.backend_kind == "http") {
            HttpBackendConfig http;
            http.base_url = config.endpoint;
            http.model = config.model;
            if (const char* key = std::getenv(config.api_key_env.c_str())) http.api_key = key;
            if (http.base_url.empty()) throw ConfigError("http backend needs --endpoint");
            owned_backend = std::make_unique<HttpBackend>(http);
        } else {
            throw ConfigError("unknown backend: " + config.backend_kind);
        }
        backend = owned_backend.get();
    } else if (auto* oracle = dynamic_cast<OracleBackend*>(backend)) {
        oracle->attach_environment(env.get());
    }

    TemplateStore templates(data_dir);
    DomainAssets assets = load_domain_assets(task->domain, data_dir);

    Gateway gateway(*backend);
    TaskContext task_ctx{task->domain, env->goal_text(), env->initial_observation(),
                         assets.planner_exemplars};
    PlannerConfig planner_cfg;
    planner_cfg.history_window = config.history_window;
    planner_cfg.decoding = config.decoding;
    Planner planner(gateway, templates, task_ctx, planner_cfg);

    ActorConfig actor_cfg;
    actor_cfg.skill_limit = config.skill_limit;
    actor_cfg.bind_full_summary = config.actor_binds_summary;
    actor_cfg.decoding = config.decoding;
    Actor actor(gateway, templates, assets.ruleset, assets.skills, assets.instructions,
                assets.example_format, actor_cfg);

    BeliefUpdateConfig update_cfg;
    update_cfg.decoding = config.decoding;
    BeliefUpdater updater(gateway, templates, update_cfg);

    record.trajectory.push_back(json{{"event", "episode_start"},
                                     {"task", task->id},
                                     {"domain", task->domain},
                                     {"backend", backend->name()},
                                     {"goal", env->goal_text()},
                                     {"max_total_steps", max_total},
                                     {"max_sub_steps", config.max_sub_steps},
                                     {"seed", config.seed}});

    BeliefState belief;
    belief.symbolic = init_memory(assets.ruleset, env->initial_observation());
    BeliefContext ctx;
    std::optional<Plan> latest_plan;
    std::vector<PlannerStep> history;

    int env_steps_used = 0;
    int k = 0;

    while (!env->is_success() && env_steps_used < max_total && k < max_total) {
        EpisodeRecord::StepRecord step_record;
        try {
            PlannerStep step = planner.plan_next(history, belief, ctx);
            record.trajectory.push_back(json{
                {"event", "planner_step"},
                {"k", step.k},
                {"reasoning", step.reasoning},
                {"plan", step.plan ? json(step.plan->subgoals) : json(nullptr)},
                {"subgoal", step.subgoal ? json(step.subgoal->description) : json(nullptr)},
                {"search_locations", step.subgoal && step.subgoal->search_locations
                                         ? json(*step.subgoal->search_locations)
                                         : json(nullptr)},
                {"task_complete", step.task_complete}});

            if (step.task_complete) {
                record.outcome.task_complete_declared = true;
                step_record.planner = std::move(step);
                record.steps.push_back(std::move(step_record));
                break;
            }
            if (step.plan) latest_plan = step.plan;

            int budget = std::min(config.max_sub_steps, max_total - env_steps_used);
            Actor::Result result = actor.execute_subgoal(*step.subgoal, *env, belief.symbolic, budget);
            env_steps_used += result.episode.env_steps_consumed;
            for (size_t t = 0; t < result.episode.steps.size(); ++t) {
                record.trajectory.push_back(json{{"event", "actor_step"},
                                                 {"k", step.k},
                                                 {"t", t},
                                                 {"action", result.episode.steps[t].first},
                                                 {"observation", result.episode.steps[t].second}});
            }
            record.trajectory.push_back(json{{"event", "sub_episode_end"},
                                             {"k", step.k},
                                             {"status", to_string(result.episode.status)},
                                             {"reason", result.episode.replan_reason},
                                             {"env_steps", result.episode.env_steps_consumed}});

            auto update = updater.belief_update(belief, ctx, result.memory, result.episode,
                                                *step.subgoal, latest_plan);
            ctx = BeliefContext{latest_plan, step.subgoal, result.episode.status};

            json new_facts = json::array();
            size_t prev_fact_count = belief.textual.learned_facts.size();
            for (size_t i = prev_fact_count; i < update.belief.textual.learned_facts.size(); ++i) {
                new_facts.push_back(update.belief.textual.learned_facts[i].text);
            }
            record.trajectory.push_back(json{{"event", "belief_update"},
                                             {"k", step.k},
                                             {"status_line", update.belief.textual.status_line},
                                             {"justification", update.belief.textual.justification},
                                             {"new_facts", new_facts}});

            json feedback;
            feedback["type"] = "analysis_feedback";
            feedback["subgoal"] = step.subgoal->description;
            feedback["outcome"] = to_string(result.episode.status);
            feedback["new_belief"] = render_belief(update.belief, ctx);
            step.analysis_feedback_json = feedback.dump();

            step_record.planner = step;
            step_record.sub_episode = std::move(result.episode);
            step_record.belief_after = update.belief;
            step_record.verification = std::move(update.report);
            record.steps.push_back(std::move(step_record));

            history.push_back(std::move(step));
            belief = std::move(update.belief);
            ++k;
        } catch (const std::exception& e) {
            record.error = e.what();
            record.trajectory.push_back(json{{"event", "error"}, {"k", k}, {"message", e.what()}});
            break;
        }
    }

    record.outcome.success = env->is_success();
    record.outcome.progress_rate = env->progress_rate();
    record.outcome.total_env_steps = env_steps_used;
    record.tokens = gateway.ledger();
    record.trajectory.push_back(json{{"event", "episode_end"},
                                     {"success", record.outcome.success},
                                     {"progress_rate", record.outcome.progress_rate},
                                     {"total_env_steps", env_steps_used},
                                     {"planner_steps", k},
                                     {"error", record.error}});

    auto end_time = std::chrono::steady_clock::now();
    record.duration_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(end_time - start_time).count();

    write_outputs(record, config);
    return record;
}

SuiteReport aggregate_suite(const std::vector<SuiteReport::TaskResult>& results) {
    SuiteReport report;
    report.results = results;
    std::map<std::string, std::pair<int, int>> success_by_domain;  // domain -> (successes, count)
    std::map<std::string, std::pair<double, int>> progress_by_domain;
    int successes = 0;
    double progress_sum = 0.0;
    for (const auto& r : results) {
        successes += r.success ? 1 : 0;
        progress_sum += r.progress_rate;
        auto& s = success_by_domain[r.domain];
        s.first += r.success ? 1 : 0;
        s.second += 1;
        auto& p = progress_by_domain[r.domain];
        p.first += r.progress_rate;
        p.second += 1;
    }
    if (!results.empty()) {
        report.success_rate = static_cast<double>(successes) / static_cast<double>(results.size());
        report.mean_progress_rate = progress_sum / static_cast<double>(results.size());
    }
    for (const auto& [domain, s] : success_by_domain) {
        report.success_rate_by_domain[domain] =
            static_cast<double>(s.first) / static_cast<double>(s.second);
    }
    for (const auto& [domain, p] : progress_by_domain) {
        report.progress_rate_by_domain[domain] = p.first / static_cast<double>(p.second);
    }
    return report;
}

SuiteReport run_suite(const std::vector<TaskSpec>& tasks, const RunConfig& base_config,
                      int workers) {
    if (tasks.empty()) throw ConfigError("suite manifest selection is empty");

    std::vector<SuiteReport::TaskResult> results(tasks.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            RunConfig cfg = base_config;
            cfg.task_id = tasks[i].id;
            SuiteReport::TaskResult tr;
            tr.task_id = tasks[i].id;
            tr.domain = tasks[i].domain;
            try {
                EpisodeRecord record = run_episode(cfg, nullptr, &tasks[i]);
                tr.success = record.outcome.success;
                tr.progress_rate = record.outcome.progress_rate;
                tr.total_env_steps = record.outcome.total_env_steps;
                tr.error = record.error;
            } catch (const std::exception& e) {
                tr.error = e.what();
            }
            results[i] = std::move(tr);
        }
    };

    int thread_count = std::max(1, workers);
    if (thread_count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return aggregate_suite(results);
}

json SuiteReport::to_json() const {
    json j;
    j["tasks"] = json::array();
    for (const auto& r : results) {
        j["tasks"].push_back({{"task_id", r.task_id},
                              {"domain", r.domain},
                              {"success", r.success},
                              {"progress_rate", r.progress_rate},
                              {"total_env_steps", r.total_env_steps},
                              {"error", r.error}});
    }
    j["success_rate"] = success_rate;
    j["mean_progress_rate"] = mean_progress_rate;
    j["success_rate_by_domain"] = success_rate_by_domain;
    j["progress_rate_by_domain"] = progress_rate_by_domain;
    return j;
}

std::string SuiteReport::table() const {
    std::ostringstream out;
    out << std::left << std::setw(32) << "task" << std::setw(14) << "domain" << std::setw(9)
        << "success" << std::setw(10) << "progress" << std::setw(7) << "steps"
        << "error\n";
    for (const auto& r : results) {
        out << std::left << std::setw(32) << r.task_id << std::setw(14) << r.domain << std::setw(9)
            << (r.success ? "yes" : "no") << std::setw(10) << std::fixed << std::setprecision(2)
            << r.progress_rate << std::setw(7) << r.total_env_steps << r.error << "\n";
    }
    out << "\n";
    for (const auto& [domain, sr] : success_rate_by_domain) {
        out << domain << ": sr " << std::fixed << std::setprecision(1) << sr * 100.0 << "%, pr "
            << progress_rate_by_domain.at(domain) * 100.0 << "%\n";
    }
    out << "overall: sr " << std::fixed << std::setprecision(1) << success_rate * 100.0 << "%, pr "
        << mean_progress_rate * 100.0 << "%\n";
    return out.str();
}

std::map<Component, double> report_token_shares(const TokenLedger& ledger, bool* zero_total) {
    std::map<Component, double> shares;
    long long total = ledger.total().total();
    if (zero_total) *zero_total = (total == 0);
    for (Component c : {Component::planner, Component::actor, Component::verification,
                        Component::synthesis}) {
        long long component_total = ledger.component(c).total();
        shares[c] = total == 0 ? 0.0
                               : 100.0 * static_cast<double>(component_total) /
                                     static_cast<double>(total);
    }
    return shares;
}

std::string format_token_share_table(const TokenLedger& ledger) {
    bool zero = false;
    auto shares = report_token_shares(ledger, &zero);
    std::ostringstream out;
    out << "token shares";
    if (zero) out << " (no tokens recorded)";
    out << ":\n";
    for (Component c : {Component::actor, Component::planner, Component::verification,
                        Component::synthesis}) {
        out << "  " << std::left << std::setw(13) << to_string(c) << std::fixed
            << std::setprecision(1) << shares[c] << "%\n";
    }
    return out.str();
}

}  // namespace planact
