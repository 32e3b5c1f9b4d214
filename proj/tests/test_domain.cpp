#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "planact/domain.hpp"

using namespace planact;

TEST_CASE("canonical predicate parses the grammar") {
    auto p = canonical_predicate("on(b1,b2)");
    REQUIRE(p.has_value());
    CHECK(p->name == "on");
    CHECK(p->args == std::vector<std::string>{"b1", "b2"});

    auto zero = canonical_predicate("arm_empty");
    REQUIRE(zero.has_value());
    CHECK(zero->name == "arm_empty");
    CHECK(zero->args.empty());

    CHECK(canonical_predicate("On( B1 , b2 )")->render() == "on(b1,b2)");
}

TEST_CASE("canonical predicate rejects malformed input") {
    std::string error;
    CHECK(!canonical_predicate("on(b1,", &error));
    CHECK(!error.empty());
    CHECK(!canonical_predicate(""));
    CHECK(!canonical_predicate("on()"));
    CHECK(!canonical_predicate("on(b1,,b2)"));
    CHECK(!canonical_predicate("on)b1("));
    CHECK(!canonical_predicate("on(a,b,c,d)"));
}

TEST_CASE("predicate render/parse round-trip on generated predicates") {
    std::mt19937 rng(7);
    const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789_";
    auto token = [&] {
        std::string t;
        size_t len = 1 + rng() % 8;
        for (size_t i = 0; i < len; ++i) t.push_back(alphabet[rng() % alphabet.size()]);
        return t;
    };
    for (int i = 0; i < 1000; ++i) {
        Predicate p;
        p.name = token();
        size_t arity = rng() % 4;
        for (size_t a = 0; a < arity; ++a) p.args.push_back(token());
        auto back = canonical_predicate(p.render());
        REQUIRE(back.has_value());
        CHECK(*back == p);
    }
}

TEST_CASE("planning summary covers the empty branch and sorted predicates") {
    SymbolicMemory m;
    m.domain_name = "blocksworld";
    m.holding["arm"] = std::nullopt;

    std::string empty_summary = planning_summary(m);
    CHECK(empty_summary.find("### BLOCKSWORLD Memory Summary (Step 0) ###") == 0);
    CHECK(empty_summary.find("State:\n  (None)") != std::string::npos);
    CHECK(empty_summary.find("### END SUMMARY ###") != std::string::npos);

    m.predicates.insert(*canonical_predicate("clear(b1)"));
    m.predicates.insert(*canonical_predicate("arm_empty"));
    std::string summary = planning_summary(m);
    auto arm_pos = summary.find("- arm_empty");
    auto clear_pos = summary.find("- clear(b1)");
    REQUIRE(arm_pos != std::string::npos);
    REQUIRE(clear_pos != std::string::npos);
    CHECK(arm_pos < clear_pos);

    CHECK(planning_summary(m) == summary);
}

TEST_CASE("belief rendering of an empty state shows headers and placeholders") {
    BeliefState b;
    b.symbolic.domain_name = "blocksworld";
    std::string text = render_belief(b);
    CHECK(text.find("[Current Plan]") != std::string::npos);
    CHECK(text.find("[Subgoal Verification]") != std::string::npos);
    CHECK(text.find("[Learned Facts]") != std::string::npos);
    CHECK(text.find("(None)") != std::string::npos);
    CHECK(text.find("### END SUMMARY ###") != std::string::npos);
    CHECK(render_belief(b) == text);
}

TEST_CASE("belief rendering lists adventure inventory and location") {
    BeliefState b;
    b.symbolic.domain_name = "adventure";
    b.symbolic.agent_location = "Living room";
    for (const char* loc : {"Attic", "Behind house", "Clearing", "Forest", "Kitchen"}) {
        b.symbolic.explorer.visited.insert(loc);
    }
    auto add = [&](const char* name, const char* at) {
        auto& e = b.symbolic.explorer.find_or_add(name);
        e.at = at;
    };
    add("clove garlic", "inventory");
    add("brown sack", "inventory");
    add("kitchen table", "Kitchen");
    add("ancient map", "Living room");
    add("brass lantern", "Living room");
    add("trap door", "Living room");

    std::string text = render_belief(b);
    CHECK(text.find("Location: at Living room") != std::string::npos);
    CHECK(text.find("- Obj: brown sack") != std::string::npos);
    CHECK(text.find("- Obj: clove garlic") != std::string::npos);
    CHECK(text.find("- Loc: Attic") != std::string::npos);
    CHECK(text.find("- Obj: kitchen table (at: Kitchen)") != std::string::npos);
    CHECK(render_belief(b) == text);
}

TEST_CASE("belief rendering includes plan and verification context") {
    BeliefState b;
    b.symbolic.domain_name = "adventure";
    b.textual.status_line =
        "Status: Successfully navigated to the living room, progressing towards finding the "
        "secret passage.";
    b.textual.justification = "The last subgoal of navigating to the living room was completed.";
    b.textual.learned_facts.push_back(
        {3, "Error: Agent encountered a game error when attempting to go north, indicating a "
            "possible dead end in that direction."});

    BeliefContext ctx;
    ctx.latest_plan = Plan{{"Navigate to the living room.", "Find the secret passage."}, 3};
    ctx.last_subgoal = Subgoal{"Navigate to the living room", std::nullopt, 3};
    ctx.last_outcome = SubgoalStatus::completed;

    std::string text = render_belief(b, ctx);
    CHECK(text.find("1. Navigate to the living room.") != std::string::npos);
    CHECK(text.find("2. Find the secret passage.") != std::string::npos);
    CHECK(text.find("- Description: Navigate to the living room") != std::string::npos);
    CHECK(text.find("- Outcome: Completed") != std::string::npos);
    CHECK(text.find("- Error: Agent encountered a game error when attempting to go north") !=
          std::string::npos);
}

TEST_CASE("learned facts append with exact-match deduplication") {
    TextualMemory t;
    auto added = t.append_facts({"fact a", "fact b"}, 1);
    CHECK(added.size() == 2);
    added = t.append_facts({"fact a", "fact c", ""}, 2);
    CHECK(added == std::vector<std::string>{"fact c"});
    REQUIRE(t.learned_facts.size() == 3);
    CHECK(t.learned_facts[0].step_k == 1);
    CHECK(t.learned_facts[2].step_k == 2);
}

TEST_CASE("token ledger totals equal the component sums") {
    TokenLedger ledger;
    ledger.add(Component::planner, 10, 5);
    ledger.add(Component::actor, 100, 50);
    ledger.add(Component::planner, 1, 2);
    CHECK(ledger.component(Component::planner).prompt == 11);
    CHECK(ledger.component(Component::planner).completion == 7);
    CHECK(ledger.total().prompt == 111);
    CHECK(ledger.total().completion == 57);
    CHECK(ledger.total().total() == 168);
    CHECK(ledger.component(Component::synthesis).total() == 0);
}

TEST_CASE("sub-episode status names") {
    CHECK(to_string(SubgoalStatus::completed) == "Completed");
    CHECK(to_string(SubgoalStatus::replan_requested) == "Replan requested");
    CHECK(to_string(SubgoalStatus::timeout) == "Timeout");
}
