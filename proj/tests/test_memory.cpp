#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "planact/domain.hpp"
#include "planact/ruleset.hpp"
#include "test_support.hpp"

using namespace planact;
using planact::testing::data_dir;

namespace {

std::set<std::string> predicate_strings(const SymbolicMemory& m) {
    std::set<std::string> out;
    for (const auto& p : m.predicates) out.insert(p.render());
    return out;
}

}  // namespace

TEST_CASE("blocksworld init extracts table/clear/arm facts") {
    auto rules = blocksworld_ruleset(data_dir());
    auto m = init_memory(rules, "b1 is on the table. b1 is clear. Robot arm is empty.");
    CHECK(m.step == 0);
    CHECK(predicate_strings(m) == std::set<std::string>{"arm_empty", "clear(b1)", "on_table(b1)"});
    REQUIRE(m.holding.count("arm"));
    CHECK(!m.holding.at("arm").has_value());
}

TEST_CASE("vacuous observation yields an empty update") {
    auto rules = blocksworld_ruleset(data_dir());
    auto m = init_memory(rules, "");
    CHECK(m.predicates.empty());

    auto m2 = update_memory(rules, m, "");
    CHECK(m2.step == 1);
    CHECK(m2.predicates.empty());

    auto full = init_memory(rules, "b1 is on the table. b1 is clear. Robot arm is empty.");
    auto unchanged = update_memory(rules, full, "");
    CHECK(unchanged.predicates == full.predicates);
    CHECK(unchanged.step == 1);
}

TEST_CASE("holding retracts positional predicates for the held block") {
    auto rules = blocksworld_ruleset(data_dir());
    SymbolicMemory m;
    m.domain_name = "blocksworld";
    m.holding["arm"] = std::nullopt;
    m.predicates = {*canonical_predicate("on(b1,b2)"), *canonical_predicate("clear(b1)")};

    auto next = update_memory(rules, m, "You are holding b1. b2 is clear.");
    CHECK(next.step == 1);
    CHECK(next.holding.at("arm") == std::optional<std::string>("b1"));
    CHECK(predicate_strings(next) ==
          std::set<std::string>{"arm_not_empty", "clear(b1)", "clear(b2)"});
}

TEST_CASE("full tower observation rebuilds mentioned blocks") {
    auto rules = blocksworld_ruleset(data_dir());
    SymbolicMemory m;
    m.domain_name = "blocksworld";
    m.holding["arm"] = std::nullopt;
    m.predicates = {*canonical_predicate("arm_empty")};

    auto next = update_memory(
        rules, m, "b1 is on b2. b2 is on the table. b1 is clear. Robot arm is empty.");
    // A block that supports another never receives on_table; the support
    // fact is carried by the on() predicate above it.
    CHECK(predicate_strings(next) ==
          std::set<std::string>{"arm_empty", "clear(b1)", "not_clear(b2)", "on(b1,b2)"});
}

TEST_CASE("explicit not-clear sentences are tracked") {
    auto rules = blocksworld_ruleset(data_dir());
    auto m = init_memory(rules, "b3 is not clear");
    CHECK(predicate_strings(m).count("not_clear(b3)") == 1);
    CHECK(predicate_strings(m).count("clear(b3)") == 0);
}

TEST_CASE("unmentioned blocks persist across updates") {
    auto rules = blocksworld_ruleset(data_dir());
    auto m = init_memory(
        rules, "b1 is on the table. b2 is on the table. b1 is clear. b2 is clear. Robot arm is empty.");
    auto next = update_memory(rules, m, "b1 is not clear.");
    CHECK(predicate_strings(next).count("on_table(b2)") == 1);
    CHECK(predicate_strings(next).count("clear(b2)") == 1);
    CHECK(predicate_strings(next).count("not_clear(b1)") == 1);
    // b1's stale facts were retracted
    CHECK(predicate_strings(next).count("clear(b1)") == 0);
    CHECK(predicate_strings(next).count("on_table(b1)") == 0);
}

TEST_CASE("step counter increases by exactly one per update") {
    auto rules = blocksworld_ruleset(data_dir());
    auto m = init_memory(rules, "b1 is clear.");
    for (int i = 1; i <= 5; ++i) {
        m = update_memory(rules, m, "b1 is clear.");
        CHECK(m.step == i);
    }
}

TEST_CASE("idempotence: repeating a full observation changes nothing") {
    auto rules = blocksworld_ruleset(data_dir());
    std::string obs =
        "b1 is on b2. b2 is on the table. b3 is on the table. b1 is clear. b2 is not clear. "
        "b3 is clear. Robot arm is empty.";
    auto once = update_memory(rules, init_memory(rules, ""), obs);
    auto twice = update_memory(rules, once, obs);
    CHECK(once.predicates == twice.predicates);
    CHECK(once.holding == twice.holding);
}

TEST_CASE("mutual exclusion of arm facts and positional facts") {
    auto rules = blocksworld_ruleset(data_dir());
    std::mt19937 rng(11);
    std::vector<std::string> sentences = {
        "b1 is on b2.",        "b2 is on the table.", "b1 is clear.",
        "b2 is not clear.",    "You are holding b1.", "Robot arm is empty.",
        "b3 is on the table.", "b3 is clear.",        "b1 is on the table.",
    };
    auto m = init_memory(rules, "");
    for (int iter = 0; iter < 300; ++iter) {
        std::string obs;
        size_t n = 1 + rng() % 4;
        for (size_t i = 0; i < n; ++i) obs += sentences[rng() % sentences.size()] + " ";
        m = update_memory(rules, m, obs);

        auto preds = predicate_strings(m);
        CHECK(!(preds.count("arm_empty") && preds.count("arm_not_empty")));
        for (const char* block : {"b1", "b2", "b3"}) {
            int positional = 0;
            for (const auto& p : m.predicates) {
                if ((p.name == "on" || p.name == "on_table") && p.args[0] == block) ++positional;
            }
            bool held = m.holding.at("arm") == std::optional<std::string>(block);
            CHECK(positional + (held ? 1 : 0) <= 1);
        }
    }
}

TEST_CASE("gripper ruleset extracts location, positions, and gripper states") {
    auto rules = gripper_ruleset(data_dir());
    auto m = init_memory(rules, "You are in room1. Ball1 is in room1.");
    CHECK(m.agent_location == std::optional<std::string>("room1"));
    CHECK(predicate_strings(m) == std::set<std::string>{"at(ball1,room1)"});
    REQUIRE(m.holding.count("left"));
    REQUIRE(m.holding.count("right"));

    auto m2 = update_memory(rules, m, "Gripper left is free.");
    CHECK(!m2.holding.at("left").has_value());

    auto m3 = update_memory(
        rules, m2, "You picked up ball1 with the left gripper. You are in room1. "
                   "Gripper left is carrying ball1. Gripper right is free.");
    CHECK(m3.holding.at("left") == std::optional<std::string>("ball1"));
    // holding wins: no stale positional fact for the held ball
    CHECK(predicate_strings(m3).count("at(ball1,room1)") == 0);

    auto m4 = update_memory(rules, m3,
                            "You dropped ball1 in room2 from the left gripper. You are in room2. "
                            "Gripper left is free. Gripper right is free. ball1 is in room2.");
    CHECK(m4.agent_location == std::optional<std::string>("room2"));
    CHECK(predicate_strings(m4) == std::set<std::string>{"at(ball1,room2)"});
}

TEST_CASE("adventure ruleset tracks visited locations and discovered objects") {
    auto rules = adventure_ruleset(data_dir());
    auto m = init_memory(rules, "You are in the Kitchen. There is a kitchen table here.");
    CHECK(m.explorer.visited.count("Kitchen") == 1);
    const auto* entry = m.explorer.find("kitchen table");
    REQUIRE(entry != nullptr);
    CHECK(entry->at == "Kitchen");

    auto m2 = update_memory(rules, m, "You take the kitchen table.");
    CHECK(m2.explorer.find("kitchen table")->at == "inventory");
}

TEST_CASE("household ruleset reproduces the contains rendering") {
    auto rules = household_ruleset(data_dir());
    auto m = init_memory(
        rules, "You are in the middle of a room. Looking quickly around you, you see a "
               "countertop 1, a garbagecan 1 and a toilet 1.");
    auto m2 = update_memory(
        rules, m, "You arrive at toilet 1. On the toilet 1, you see a soapbar 1 and a soapbar 2.");
    CHECK(m2.agent_location == std::optional<std::string>("toilet 1"));
    std::string summary = planning_summary(m2);
    CHECK(summary.find("- toilet 1: contains=[soapbar 1, soapbar 2]") != std::string::npos);
    CHECK(summary.find("- Loc: toilet 1") != std::string::npos);

    auto m3 = update_memory(rules, m2, "You take the soapbar 2 from the toilet 1.");
    CHECK(m3.holding.at("hands") == std::optional<std::string>("soapbar 2"));
    std::string summary3 = planning_summary(m3);
    CHECK(summary3.find("- toilet 1: contains=[soapbar 1]") != std::string::npos);
    CHECK(summary3.find("- Obj: soapbar 2") != std::string::npos);

    auto m4 = update_memory(rules, m3, "You put the soapbar 2 in the garbagecan 1.");
    CHECK(!m4.holding.at("hands").has_value());
    CHECK(planning_summary(m4).find("- garbagecan 1: contains=[soapbar 2]") != std::string::npos);
}

TEST_CASE("ruleset fixtures declare format version and total patterns") {
    for (const char* domain : {"blocksworld", "gripper", "household", "adventure"}) {
        auto rules = ruleset_for_domain(domain, data_dir());
        CHECK(rules.format_version == 1);
        CHECK(rules.domain_name == domain);
        CHECK(!rules.patterns.empty());
        // totality: arbitrary text produces a defined (empty) update
        auto m = init_memory(rules, "zzz qqq unparseable @@@");
        auto m2 = update_memory(rules, m, "more unparseable text !!!");
        CHECK(m2.step == 1);
    }
}
