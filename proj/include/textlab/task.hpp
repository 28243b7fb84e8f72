#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "textlab/messages.hpp"
#include "textlab/world.hpp"

namespace textlab {

enum class TaskCategory : std::uint8_t { matter, measurement, classification, biology };
enum class Split : std::uint8_t { train, dev, test };
enum class Convention : std::uint8_t { zero_on_fail, last_score_on_fail };

std::string split_name(Split s);
std::optional<Split> split_from_name(const std::string& s);
std::string convention_name(Convention c);
std::optional<Convention> convention_from_name(const std::string& s);

// A milestone or fail condition, evaluated against the live world after each
// engine step. Placeholders like {target} resolve against variation params.
struct PredicateSpec {
    std::string name;
    std::vector<std::string> allowed;  // focus_not_allowed whitelist
    std::string state;                 // matter state for *_state predicates
    std::string entity_name;           // focus_entity subject
    bool alive = false;                // polarity for the living-thing checks
};

struct MilestoneSpec {
    PredicateSpec predicate;
    int points = 0;
    std::string label;
};

struct TaskClassSpec {
    std::string id;
    TaskCategory category = TaskCategory::matter;
    int default_count = 0;
    std::string description_template;
    // Ordered parameter grid; the cartesian product enumerates variations.
    std::vector<std::pair<std::string, std::vector<std::string>>> params;
    // Optional n-choose-k parameter expanded into slots a, b, c, ...
    std::string combo_param;
    std::vector<std::string> combo_pool;
    int combo_choose = 0;
    // Values of holdout_param that may only appear in the test split.
    std::string holdout_param;
    std::vector<std::string> holdout_values;
    std::vector<MilestoneSpec> milestones;
    std::vector<PredicateSpec> fails;
};

struct TaskVariation {
    std::string task_id;
    int index = 0;
    std::uint64_t seed = 0;
    Split split = Split::train;
    std::map<std::string, std::string> params;
    std::string description;

    std::string id() const { return task_id + "/" + std::to_string(index); }
};

// Index-driven split: even -> train, 1 mod 4 -> dev, 3 mod 4 -> test.
Split assign_split(int variation_index);

struct SplitCounts {
    int train = 0;
    int dev = 0;
    int test = 0;
};
// Closed-form counts the index rule yields for a given total.
SplitCounts expected_split_counts(int total);

class TaskCatalog {
public:
    // Loads tasks.json, world_house.json and messages.json from data_dir.
    static TaskCatalog load(const std::string& data_dir);

    const std::vector<TaskClassSpec>& classes() const { return classes_; }
    const TaskClassSpec* find_class(const std::string& id) const;
    const MessageCatalog& messages() const { return messages_; }
    const std::map<std::string, SubstanceInfo>& substances() const { return substances_; }
    double lifespan(const std::string& animal) const;

    // `count` distinct variations, deterministic in master_seed. Held-out
    // parameter values land only on test indices; other values rotate so the
    // train split sees every non-held-out target.
    std::vector<TaskVariation> enumerate_variations(const TaskClassSpec& cls, int count,
                                                    std::uint64_t master_seed) const;
    // Every class at its shipped count.
    std::vector<TaskVariation> enumerate_all(std::uint64_t master_seed) const;
    // Resolve "task/index" against the enumeration for master_seed.
    std::optional<TaskVariation> find_variation(const std::string& variation_id,
                                                std::uint64_t master_seed) const;

    // Materializes the playable world for a variation.
    World build_world(const TaskVariation& var) const;

private:
    struct LocationSpec {
        std::string room;
        std::string holder;
    };

    MessageCatalog messages_;
    std::map<std::string, SubstanceInfo> substances_;
    std::map<std::string, LocationSpec> locations_;
    std::map<std::string, double> lifespans_;
    std::vector<TaskClassSpec> classes_;
    std::string world_json_;
};

// Latching score tracker: milestones award points once, fails are terminal.
class MilestoneTracker {
public:
    MilestoneTracker(const TaskClassSpec& cls, const TaskVariation& var, const World& world);

    // Inspect the world after an engine step; earns milestones and detects
    // fail conditions. No-op once failed.
    void update(const World& world);

    int score() const { return score_; }
    bool failed() const { return failed_; }
    bool won() const { return !failed_ && score_ == 100; }
    bool finished() const { return failed_ || won(); }
    int final_score(Convention conv) const;
    const std::vector<bool>& earned() const { return earned_; }

private:
    bool eval_milestone(const PredicateSpec& p, const World& world) const;
    bool eval_fail(const PredicateSpec& p, const World& world) const;
    std::optional<EntityId> find_target(const World& world) const;

    const TaskClassSpec* cls_;
    const TaskVariation* var_;
    std::vector<bool> earned_;
    int score_ = 0;
    bool failed_ = false;
    std::optional<MatterState> initial_state_;  // target's state at episode start
};

}  // namespace textlab
