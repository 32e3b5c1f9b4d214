#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <queue>
#include <set>

#include "planact/env_adventure.hpp"
#include "planact/env_blocksworld.hpp"
#include "planact/env_gripper.hpp"
#include "planact/env_household.hpp"
#include "planact/ruleset.hpp"
#include "planact/task.hpp"
#include "test_support.hpp"

using namespace planact;
using planact::testing::data_dir;

namespace {

std::vector<std::unique_ptr<Environment>> enumerate_reachable(const Environment& start,
                                                              size_t limit = 100000) {
    std::vector<std::unique_ptr<Environment>> states;
    std::set<std::string> seen;
    std::queue<std::unique_ptr<Environment>> frontier;
    frontier.push(start.clone());
    seen.insert(start.state_key());
    while (!frontier.empty() && states.size() < limit) {
        auto env = std::move(frontier.front());
        frontier.pop();
        for (const auto& action : env->valid_actions()) {
            auto next = env->clone();
            next->step(action);
            if (seen.insert(next->state_key()).second) frontier.push(next->clone());
        }
        states.push_back(std::move(env));
    }
    return states;
}

BlocksWorldEnv simple_blocks() {
    return BlocksWorldEnv({{"b1", "table"}, {"b2", "table"}, {"b3", "b2"}},
                          {{BlocksGoalAtom::Kind::on, "b1", "b2"},
                           {BlocksGoalAtom::Kind::on_table, "b2", ""}});
}

}  // namespace

TEST_CASE("blocksworld pickup produces a holding observation") {
    BlocksWorldEnv env({{"b1", "table"}}, {{BlocksGoalAtom::Kind::on_table, "b1", ""}});
    std::string obs = env.step("pickup(b1)");
    CHECK(obs.find("You are holding b1") != std::string::npos);
}

TEST_CASE("blocksworld rejects precondition violations without state change") {
    auto env = simple_blocks();
    REQUIRE(env.step("pickup(b1)").find("You are holding b1") != std::string::npos);
    std::string key = env.state_key();
    CHECK(env.step("pickup(b2)") == kInvalidActionMessage);
    CHECK(env.step("pickup(b99)") == kInvalidActionMessage);
    CHECK(env.step("gibberish") == kInvalidActionMessage);
    CHECK(env.state_key() == key);
}

TEST_CASE("blocksworld surface forms normalize to the same operators") {
    auto a = simple_blocks();
    auto b = simple_blocks();
    a.step("pickup(b1)");
    b.step("pick up b1");
    CHECK(a.state_key() == b.state_key());
    a.step("stack(b1,b3)");
    b.step("stack b1 on b3");
    CHECK(a.state_key() == b.state_key());
}

TEST_CASE("check valid actions lists exactly the applicable operators") {
    auto env = simple_blocks();
    std::string listing = env.step("check valid actions");
    CHECK(listing.find("Valid actions:") == 0);
    CHECK(listing.find("pickup(b1)") != std::string::npos);
    CHECK(listing.find("unstack(b3,b2)") != std::string::npos);
    CHECK(listing.find("pickup(b2)") == std::string::npos);  // b2 is not clear
}

TEST_CASE("valid-action soundness on all reachable states with four blocks") {
    BlocksWorldEnv env({{"b1", "table"}, {"b2", "b1"}, {"b3", "table"}, {"b4", "b3"}},
                       {{BlocksGoalAtom::Kind::on, "b4", "b1"}});
    auto states = enumerate_reachable(env);
    CHECK(states.size() > 50);
    for (const auto& state : states) {
        for (const auto& action : state->valid_actions()) {
            auto probe = state->clone();
            CHECK(probe->step(action) != kInvalidActionMessage);
        }
    }
}

TEST_CASE("blocksworld observations are fully consumed by the ruleset") {
    auto rules = blocksworld_ruleset(data_dir());
    BlocksWorldEnv env({{"b1", "table"}, {"b2", "b1"}, {"b3", "table"}},
                       {{BlocksGoalAtom::Kind::on, "b3", "b2"}});
    for (const auto& state : enumerate_reachable(env)) {
        auto* bw = dynamic_cast<const BlocksWorldEnv*>(state.get());
        REQUIRE(bw != nullptr);
        std::string obs = bw->render_state();
        size_t start = 0;
        while (start < obs.size()) {
            size_t end = obs.find(". ", start);
            std::string sentence = obs.substr(
                start, end == std::string::npos ? std::string::npos : end - start + 1);
            bool matched = false;
            for (const auto& pattern : rules.patterns) {
                if (std::regex_search(sentence, pattern.compiled)) {
                    matched = true;
                    break;
                }
            }
            CHECK_MESSAGE(matched, "unconsumed sentence: ", sentence);
            if (end == std::string::npos) break;
            start = end + 2;
        }
    }
}

TEST_CASE("blocksworld memory matches ground truth after a full look") {
    auto rules = blocksworld_ruleset(data_dir());
    BlocksWorldEnv env({{"b1", "table"}, {"b2", "b1"}, {"b3", "table"}, {"b4", "b3"}},
                       {{BlocksGoalAtom::Kind::on, "b4", "b1"}});
    for (const auto& state : enumerate_reachable(env)) {
        auto* bw = dynamic_cast<const BlocksWorldEnv*>(state.get());
        REQUIRE(bw != nullptr);
        auto memory = init_memory(rules, bw->render_state());
        std::vector<std::string> memory_preds;
        for (const auto& p : memory.predicates) memory_preds.push_back(p.render());
        std::sort(memory_preds.begin(), memory_preds.end());
        CHECK(memory_preds == bw->ground_truth_predicates());
    }
}

TEST_CASE("blocksworld random instances are reproducible and unsolved at reset") {
    for (unsigned seed : {1u, 2u, 3u, 42u}) {
        auto a = BlocksWorldEnv::random(seed, 5);
        auto b = BlocksWorldEnv::random(seed, 5);
        CHECK(a.state_key() == b.state_key());
        CHECK(a.goal_text() == b.goal_text());
        CHECK(!a.is_success());
    }
    CHECK(BlocksWorldEnv::random(1, 5).state_key() != BlocksWorldEnv::random(9, 5).state_key());
}

TEST_CASE("gripper pick/move/drop semantics") {
    GripperEnv env({"room1", "room2"}, "room1", {{"ball1", "room1"}}, {{"ball1", "room2"}});
    std::string obs = env.step("pick(ball1,room1,left)");
    CHECK(obs.find("You picked up ball1 with the left gripper.") != std::string::npos);
    CHECK(env.step("move(room1,room1)") == kInvalidActionMessage);
    CHECK(env.step("move(room1,room2)").find("You are in room2") != std::string::npos);
    CHECK(!env.is_success());
    env.step("drop(ball1,room2,left)");
    CHECK(env.is_success());
    CHECK(env.progress_rate() == 1.0);
}

TEST_CASE("gripper precondition violations leave state unchanged") {
    GripperEnv env({"room1", "room2"}, "room1", {{"ball1", "room2"}}, {{"ball1", "room1"}});
    std::string key = env.state_key();
    CHECK(env.step("pick(ball1,room1,left)") == kInvalidActionMessage);  // ball elsewhere
    CHECK(env.step("drop(ball1,room1,left)") == kInvalidActionMessage);  // nothing held
    CHECK(env.step("move(room2,room1)") == kInvalidActionMessage);       // wrong origin
    CHECK(env.state_key() == key);
}

TEST_CASE("adventure fixture walkthrough reaches the cellar") {
    auto fixture = load_json_file(data_dir() / "tasks" / "adventure" / "zork_passage.json");
    AdventureEnv env(fixture);
    CHECK(env.initial_observation().find("There is a small mailbox here.") != std::string::npos);
    CHECK(env.progress_rate() == 0.0);

    // examine text comes straight from the fixture
    std::string expected_examine;
    for (const auto& oj : fixture["objects"]) {
        if (oj["name"] == "small mailbox") expected_examine = oj["examine"];
    }
    CHECK(env.step("examine small mailbox") == expected_examine);
    CHECK(env.step("open small mailbox").find("reveals a leaflet") != std::string::npos);
    CHECK(env.step("take leaflet") == "You take the leaflet.");

    // dead end: no north exit from North of House
    env.step("go north");
    std::string blocked = env.step("go north");
    CHECK(blocked == "You can't go that way.");

    // concealed entry requires the window trigger
    env.step("go east");  // Behind House
    CHECK(env.step("go in") == "You can't go that way.");
    CHECK(env.step("open window").find("open the window") != std::string::npos);
    CHECK(env.step("go in").find("You are in the Kitchen") != std::string::npos);

    env.step("go west");  // Living room
    CHECK(env.step("go down") == "You can't go that way.");
    CHECK(env.step("open trap door") == kInvalidActionMessage);  // still concealed
    CHECK(env.step("move rug").find("trap door") != std::string::npos);
    CHECK(env.step("open trap door").find("staircase leading down") != std::string::npos);

    double before = env.progress_rate();
    CHECK(before > 0.0);
    std::string final_obs = env.step("go down");
    CHECK(final_obs.find("secret passage") != std::string::npos);
    CHECK(env.is_success());
    CHECK(env.progress_rate() == 1.0);
}

TEST_CASE("adventure progress rate never decreases") {
    auto fixture = load_json_file(data_dir() / "tasks" / "adventure" / "zork_passage.json");
    AdventureEnv env(fixture);
    double last = env.progress_rate();
    for (const char* action :
         {"go north", "go east", "open window", "go in", "go west", "go east", "go out",
          "go south", "go west", "look"}) {
        env.step(action);
        double now = env.progress_rate();
        CHECK(now >= last);
        last = now;
    }
}

TEST_CASE("household capacity and receptacle semantics") {
    auto fixture =
        load_json_file(data_dir() / "tasks" / "household" / "put_two_soapbar_in_garbagecan.json");
    HouseholdEnv env(fixture);
    CHECK(env.initial_observation().find("you see a cabinet 1") != std::string::npos);

    CHECK(env.step("go to toilet 1") ==
          "You arrive at toilet 1. On the toilet 1, you see a soapbar 1 and a soapbar 2.");
    CHECK(env.step("take soapbar 1 from toilet 1") == "You take the soapbar 1 from the toilet 1.");
    // hands are full: the second take is rejected
    CHECK(env.step("take soapbar 2 from toilet 1") == kInvalidActionMessage);

    CHECK(env.step("go to garbagecan 1").find("You arrive at garbagecan 1") != std::string::npos);
    CHECK(env.step("put soapbar 1 in garbagecan 1") ==
          "You put the soapbar 1 in the garbagecan 1.");
    CHECK(!env.is_success());

    env.step("go to toilet 1");
    env.step("take soapbar 2 from toilet 1");
    env.step("go to garbagecan 1");
    env.step("put soapbar 2 in garbagecan 1");
    CHECK(env.is_success());
    CHECK(env.progress_rate() == 1.0);
}

TEST_CASE("household closed receptacles need opening") {
    auto fixture =
        load_json_file(data_dir() / "tasks" / "household" / "put_two_soapbar_in_garbagecan.json");
    HouseholdEnv env(fixture);
    CHECK(env.step("go to cabinet 1") == "You arrive at cabinet 1. The cabinet 1 is closed.");
    CHECK(env.step("take candle 1 from cabinet 1") == kInvalidActionMessage);
    CHECK(env.step("open cabinet 1") ==
          "You open the cabinet 1. In the cabinet 1, you see a candle 1.");
    CHECK(env.step("take candle 1 from cabinet 1") == "You take the candle 1 from the cabinet 1.");
}

TEST_CASE("determinism: identical action sequences give identical transcripts") {
    auto run = [&] {
        GripperEnv env = GripperEnv::random(77, 3, 2);
        std::string transcript = env.initial_observation();
        for (const char* action : {"look", "check valid actions", "move to room2", "look"}) {
            transcript += "\n" + env.step(action);
        }
        return transcript;
    };
    CHECK(run() == run());
}

TEST_CASE("task manifest instantiates every bundled task") {
    auto manifest = TaskManifest::load(data_dir());
    CHECK(manifest.tasks.size() >= 6);
    for (const auto& task : manifest.tasks) {
        auto env = task.make_env();
        REQUIRE(env != nullptr);
        CHECK(env->domain() == task.domain);
        CHECK(!env->is_success());
        CHECK(!env->initial_observation().empty());
        CHECK(env->checkpoint_labels().size() >= 1);
    }
    CHECK(manifest.find("zork_passage") != nullptr);
    CHECK(manifest.find("missing_task") == nullptr);
}

TEST_CASE("bundled fixtures carry three to seven checkpoints") {
    auto manifest = TaskManifest::load(data_dir());
    for (const auto& task : manifest.tasks) {
        if (!task.generator.is_null()) continue;
        auto env = task.make_env();
        CHECK(env->checkpoint_labels().size() >= 3);
        CHECK(env->checkpoint_labels().size() <= 7);
    }
}
