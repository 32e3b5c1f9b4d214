#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "planact/backend_http.hpp"
#include "planact/backend_replay.hpp"
#include "planact/gateway.hpp"
#include "test_support.hpp"

using namespace planact;
using planact::testing::data_dir;

TEST_CASE("template rendering substitutes bound variables") {
    PromptTemplate t("demo", "Goal: {{ goal }}");
    CHECK(t.render({{"goal", "x"}}) == "Goal: x");
    CHECK_THROWS_AS(t.render({}), MissingVariable);
}

TEST_CASE("template scans required variables including spaced names") {
    PromptTemplate t("demo", "A {{task exemplars}} B {{ goal }} C {{goal}}");
    CHECK(t.required_variables() == std::set<std::string>{"task exemplars", "goal"});
    std::string out = t.render({{"task exemplars", "T"}, {"goal", "G"}});
    CHECK(out == "A T B G C G");
    CHECK(out.find("{{") == std::string::npos);
}

TEST_CASE("synthesis instance template renders with all fields in order") {
    TemplateStore store(data_dir());
    std::string out = store.get("synthesis_instance")
                          .render({{"previous_belief", "PB"},
                                   {"memory_summary", "MS"},
                                   {"latest_plan", "LP"},
                                   {"subgoal", "SG"},
                                   {"last_subgoal_outcome", "Completed"},
                                   {"qa_summary", "QA"}});
    auto prev = out.find("Previous Belief:");
    auto last = out.find("Last Subgoal Attempted:");
    REQUIRE(prev != std::string::npos);
    REQUIRE(last != std::string::npos);
    CHECK(prev < last);
    CHECK(out.find("{{") == std::string::npos);
}

TEST_CASE("all bundled templates render against their documented bindings") {
    TemplateStore store(data_dir());
    std::map<std::string, std::map<std::string, std::string>> bindings = {
        {"planner_system_pddl", {{"task exemplars", "E"}}},
        {"planner_system_household", {{"task exemplars", "E"}}},
        {"planner_system_adventure", {{"task exemplars", "E"}}},
        {"planner_instance_pddl", {{"goal", "G"}, {"initial_observation", "O"}}},
        {"planner_instance_adventure", {{"goal", "G"}, {"initial_observation", "O"}}},
        {"planner_instance_household", {{"task_room", "R"}, {"task", "T"}}},
        {"actor_system", {}},
        {"actor_instance",
         {{"domain_instructions", "D"}, {"example_format", "F"}, {"subgoal", "S"}, {"location", "L"}}},
        {"verification_system", {}},
        {"verification_instance", {{"context", "C"}, {"question", "Q"}}},
        {"synthesis_system", {}},
        {"synthesis_instance",
         {{"previous_belief", "PB"},
          {"memory_summary", "MS"},
          {"latest_plan", "LP"},
          {"subgoal", "SG"},
          {"last_subgoal_outcome", "LO"},
          {"qa_summary", "QA"}}},
    };
    for (const auto& name : store.names()) {
        INFO("template: ", name);
        REQUIRE(bindings.count(name) == 1);
        std::string rendered = store.get(name).render(bindings.at(name));
        CHECK(rendered.find("{{") == std::string::npos);
        CHECK(!rendered.empty());
    }
}

TEST_CASE("bundled templates carry the key literal strings") {
    TemplateStore store(data_dir());
    CHECK(store.get("planner_system_pddl").body().find("FULL PLAN") != std::string::npos);
    CHECK(store.get("planner_system_pddl").body().find("EXECUTE_SUBGOAL[") != std::string::npos);
    CHECK(store.get("planner_system_household").body().find("SEARCH_LOCATIONS:") !=
          std::string::npos);
    CHECK(store.get("planner_system_adventure").body().find("check valid actions") !=
          std::string::npos);
    CHECK(store.get("actor_system").body().find("SUBGOAL COMPLETED") != std::string::npos);
    CHECK(store.get("actor_system").body().find("REQUEST_REPLAN[") != std::string::npos);
    CHECK(store.get("actor_system").body().find(
              "The action is not valid and therefore takes no effect. Please check valid "
              "actions.") != std::string::npos);
    CHECK(store.get("verification_instance").body().find(
              "ANSWER (e.g., Yes/No/Uncertain/Value):") != std::string::npos);
    CHECK(store.get("synthesis_system").body().find("\"status_line\"") != std::string::npos);
    CHECK(store.get("synthesis_instance").body().find("Previous Belief:") != std::string::npos);

    // the five questions and their system-prompt listing stay in sync
    const auto& questions = store.verification_questions();
    REQUIRE(questions.size() == 5);
    for (const auto& q : questions) {
        CHECK(store.get("verification_system").body().find(q) != std::string::npos);
    }
    CHECK(questions[2].find("Were there any errors") != std::string::npos);
}

TEST_CASE("replay backend returns scripted responses positionally") {
    ReplayBackend backend({{"", "first"}, {"", "second"}});
    ChatRequest req{{{"system", "s"}, {"user", "u"}}, Component::planner, {}};
    CHECK(backend.complete(req).text == "first");
    CHECK(backend.complete(req).text == "second");
    CHECK_THROWS_AS(backend.complete(req), ReplayExhausted);
}

TEST_CASE("strict replay checks stored prompt prefixes") {
    ChatRequest req{{{"system", "sys prompt"}, {"user", "hello"}}, Component::actor, {}};
    std::string fp = ReplayBackend::fingerprint(req);
    CHECK(fp.find("[actor]") == 0);

    ReplayBackend good({{fp.substr(0, 20), "ok"}}, true);
    CHECK(good.complete(req).text == "ok");

    ReplayBackend bad({{"[planner]\n== system ==\nother", "ok"}}, true);
    CHECK_THROWS_AS(bad.complete(req), GatewayError);

    // non-strict mode ignores prefixes entirely
    ReplayBackend lax({{"[planner]\ncompletely different", "ok"}}, false);
    CHECK(lax.complete(req).text == "ok");
}

TEST_CASE("gateway records token usage under the component tag") {
    planact::testing::ScriptedBackend backend({"alpha beta", "gamma"});
    Gateway gw(backend);
    gw.complete({{{"system", "one two three"}}, Component::planner, {}});
    gw.complete({{{"system", "four"}}, Component::actor, {}});

    CHECK(gw.ledger().component(Component::planner).prompt == 3);
    CHECK(gw.ledger().component(Component::planner).completion == 2);
    CHECK(gw.ledger().component(Component::actor).prompt == 1);
    CHECK(gw.ledger().component(Component::actor).completion == 1);

    auto total = gw.ledger().total();
    long long sum = 0;
    for (const auto& [c, counts] : gw.ledger().by_component) sum += counts.total();
    CHECK(total.total() == sum);
}

TEST_CASE("approximate token counting is whitespace-delimited") {
    CHECK(approx_token_count("") == 0);
    CHECK(approx_token_count("one") == 1);
    CHECK(approx_token_count("  one \n two\tthree ") == 3);
}

namespace {

struct LiveServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit LiveServer(httplib::Server::Handler handler) {
        server.Post("/v1/chat/completions", std::move(handler));
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~LiveServer() {
        server.stop();
        thread.join();
    }
};

}  // namespace

TEST_CASE("http backend speaks the chat-completions protocol") {
    std::atomic<int> calls{0};
    LiveServer live([&](const httplib::Request& req, httplib::Response& res) {
        ++calls;
        auto body = nlohmann::json::parse(req.body);
        CHECK(body["model"] == "test-model");
        CHECK(body["messages"][0]["role"] == "system");
        CHECK(req.get_header_value("Authorization") == "Bearer sk-test");
        nlohmann::json reply = {
            {"choices", {{{"message", {{"role", "assistant"}, {"content", "pong"}}}}}},
            {"usage", {{"prompt_tokens", 12}, {"completion_tokens", 3}}}};
        res.set_content(reply.dump(), "application/json");
    });

    HttpBackendConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(live.port) + "/v1";
    cfg.model = "test-model";
    cfg.api_key = "sk-test";
    HttpBackend backend(cfg);

    Completion c = backend.complete({{{"system", "s"}, {"user", "ping"}}, Component::actor, {}});
    CHECK(c.text == "pong");
    CHECK(c.prompt_tokens == 12);
    CHECK(c.completion_tokens == 3);
    CHECK(calls == 1);
}

TEST_CASE("http backend retries transient failures with backoff") {
    std::atomic<int> calls{0};
    LiveServer live([&](const httplib::Request&, httplib::Response& res) {
        int n = ++calls;
        if (n < 3) {
            res.status = 500;
            res.set_content("overloaded", "text/plain");
            return;
        }
        nlohmann::json reply = {
            {"choices", {{{"message", {{"role", "assistant"}, {"content", "recovered"}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });

    HttpBackendConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(live.port) + "/v1";
    cfg.model = "m";
    cfg.max_retries = 2;
    cfg.backoff_base_ms = 1;
    HttpBackend backend(cfg);

    Completion c = backend.complete({{{"system", "s"}}, Component::planner, {}});
    CHECK(c.text == "recovered");
    CHECK(calls == 3);
    CHECK(c.prompt_tokens == 1);  // usage absent: whitespace approximation
}

TEST_CASE("http backend raises BackendUnavailable after the retry budget") {
    std::atomic<int> calls{0};
    LiveServer live([&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 503;
    });

    HttpBackendConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(live.port) + "/v1";
    cfg.model = "m";
    cfg.max_retries = 1;
    cfg.backoff_base_ms = 1;
    HttpBackend backend(cfg);

    CHECK_THROWS_AS(backend.complete({{{"system", "s"}}, Component::actor, {}}),
                    BackendUnavailable);
    CHECK(calls == 2);
}
