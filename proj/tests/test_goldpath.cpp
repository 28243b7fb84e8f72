#include <doctest.h>

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "textlab/goldpath.hpp"
#include "textlab/rng.hpp"

#include "support.hpp"

using namespace textlab;
using support::catalog;

namespace {

constexpr std::uint64_t kSeed = 7;

TaskVariation variation(const std::string& id) {
    auto v = catalog().find_variation(id, kSeed);
    REQUIRE_MESSAGE(v.has_value(), id);
    return *v;
}

GoldPath synthetic_path(const std::string& task, int index, int variant) {
    GoldPath p;
    p.task_id = task;
    p.variation_id = task + "/" + std::to_string(index);
    p.variant = variant;
    p.actions = {"look around", "wait"};
    p.final_score = 100;
    p.transcript.description = "synthetic task " + p.variation_id;
    p.transcript.turns.push_back({"look around", "You see a synthetic room.", std::nullopt});
    return p;
}

}  // namespace

TEST_CASE("every task class plans three distinct winning routes") {
    const GoldPathPlanner planner(&catalog());
    for (const TaskClassSpec& c : catalog().classes()) {
        const TaskVariation var = variation(c.id + "/0");
        const std::vector<GoldPath> paths = planner.plan(var, 3);
        REQUIRE_MESSAGE(paths.size() == 3, c.id);

        std::set<std::vector<std::string>> distinct;
        for (const GoldPath& p : paths) {
            CHECK(p.variation_id == var.id());
            CHECK(p.task_id == c.id);
            CHECK(p.final_score == 100);
            REQUIRE(!p.actions.empty());
            CHECK(p.actions.front() == "look around");
            CHECK(p.transcript.description == var.description);
            distinct.insert(p.actions);

            // Independent replay confirms the scripted win.
            const ReplayOutcome out = replay_script(catalog(), var, p.actions);
            CHECK_MESSAGE(out.won, c.id << " variant " << p.variant);
            CHECK(out.score == 100);
            CHECK(out.all_executed);
            CHECK(out.steps == static_cast<int>(out.transcript.turns.size()));
            CHECK(out.steps <= static_cast<int>(p.actions.size()));
        }
        CHECK_MESSAGE(distinct.size() == 3, c.id);
    }
}

TEST_CASE("variants diversify the shared base route") {
    const GoldPathPlanner planner(&catalog());
    const TaskVariation var = variation("freeze/0");
    const GoldPath base = planner.plan_one(var, 0);
    const GoldPath with_inventory = planner.plan_one(var, 1);

    CHECK(std::find(base.actions.begin(), base.actions.end(), "inventory") ==
          base.actions.end());
    REQUIRE(with_inventory.actions.size() >= 2);
    CHECK(with_inventory.actions[1] == "inventory");
}

TEST_CASE("replay stops at the first winning step") {
    const GoldPathPlanner planner(&catalog());
    const TaskVariation var = variation("freeze/0");
    std::vector<std::string> actions = planner.plan_one(var, 0).actions;
    const std::size_t gold_len = actions.size();
    actions.push_back("wait");
    actions.push_back("wait");

    const ReplayOutcome out = replay_script(catalog(), var, actions);
    CHECK(out.won);
    CHECK(out.steps == static_cast<int>(gold_len));
    CHECK(out.all_executed);  // the trailing padding never ran
}

TEST_CASE("replay records parser rejections instead of stepping the engine") {
    const TaskVariation var = variation("melt/0");

    ReplayOutcome gibberish = replay_script(catalog(), var, {"look around", "frobnicate"});
    CHECK_FALSE(gibberish.won);
    CHECK_FALSE(gibberish.all_executed);
    CHECK(gibberish.steps == 2);
    REQUIRE(gibberish.transcript.turns.size() == 2);
    CHECK(gibberish.transcript.turns[1].reply == "That is not a valid command.");

    ReplayOutcome ghost = replay_script(catalog(), var, {"look around", "pick up zebra"});
    CHECK_FALSE(ghost.all_executed);
    CHECK(ghost.transcript.turns[1].reply == "You don't see that here.");
}

TEST_CASE("trainset sampling nests the three corpora") {
    std::vector<GoldPath> train;
    // Task x: two variations with all three variants each.
    for (int idx : {0, 2}) {
        for (int variant = 0; variant < 3; ++variant) {
            train.push_back(synthetic_path("task-x", idx, variant));
        }
    }
    // Task y: 21 variations, one variant each -- above the per-task cap.
    for (int idx = 0; idx < 21; ++idx) {
        train.push_back(synthetic_path("task-y", idx, 0));
    }

    const TrainSets sets = sample_trainsets(train, kSeed);
    CHECK(sets.all_train.size() == train.size());

    // no_variations: exactly one pick per variation.
    std::map<std::string, int> per_variation;
    for (const GoldPath& p : sets.no_variations) ++per_variation[p.variation_id];
    CHECK(per_variation.size() == 23);  // 2 + 21 variations
    for (const auto& [id, n] : per_variation) CHECK_MESSAGE(n == 1, id);

    // up_to_18: capped per task, small tasks ride through whole.
    std::map<std::string, int> per_task;
    for (const GoldPath& p : sets.up_to_18) ++per_task[p.task_id];
    CHECK(per_task["task-x"] == 2);
    CHECK(per_task["task-y"] == 18);

    // Chain: each tier is a subset of the one above it.
    auto key_set = [](const std::vector<GoldPath>& v) {
        std::set<std::pair<std::string, int>> keys;
        for (const GoldPath& p : v) keys.insert({p.variation_id, p.variant});
        return keys;
    };
    const auto all_keys = key_set(sets.all_train);
    const auto novar_keys = key_set(sets.no_variations);
    const auto capped_keys = key_set(sets.up_to_18);
    for (const auto& k : novar_keys) CHECK(all_keys.count(k));
    for (const auto& k : capped_keys) CHECK(novar_keys.count(k));

    // Deterministic in the master seed.
    const TrainSets again = sample_trainsets(train, kSeed);
    CHECK(key_set(again.no_variations) == novar_keys);
    CHECK(key_set(again.up_to_18) == capped_keys);
}

TEST_CASE("corpus export writes one dialog document per line") {
    const std::vector<GoldPath> set = {synthetic_path("task-x", 0, 0),
                                       synthetic_path("task-x", 1, 0)};
    const std::string path = (support::fresh_dir("corpus") / "set.jsonl").string();
    const CorpusStats stats = export_training_corpus(set, path);

    CHECK(stats.documents == 2);
    CHECK(stats.mean_actions == doctest::Approx(2.0));
    const int pieces = default_piece_counter(render_transcript(set[0].transcript));
    CHECK(stats.min_pieces <= pieces);
    CHECK(stats.max_pieces >= pieces);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        REQUIRE(!line.empty());
        CHECK(line.find("\"variation\"") != std::string::npos);
        CHECK(line.find("\"text\"") != std::string::npos);
        CHECK(line.find("A:\"") == std::string::npos);  // no trailing cue
        ++rows;
    }
    CHECK(rows == 2);

    CHECK_THROWS_WITH_AS(export_training_corpus({}, path), "empty trainset",
                         std::runtime_error);
}

TEST_CASE("exported text is the rendered transcript verbatim") {
    const GoldPath p = synthetic_path("task-x", 0, 0);
    const std::string path = (support::fresh_dir("corpus") / "one.jsonl").string();
    export_training_corpus({p}, path);

    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    const std::string want = render_transcript(p.transcript);
    // The JSON-escaped text still contains the unescaped description prefix.
    CHECK(line.find("synthetic task task-x/0") != std::string::npos);
    // And round-tripping through the episode parser recovers the dialog shape.
    CHECK(want.find("A: look around\nG: You see a synthetic room.\n") != std::string::npos);
}
