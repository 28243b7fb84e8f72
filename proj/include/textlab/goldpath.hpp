#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textlab/task.hpp"
#include "textlab/transcript.hpp"

namespace textlab {

// A scripted solution for one variation: action surface strings plus the
// dialog transcript produced by replaying them. Every shipped path scores 100.
struct GoldPath {
    std::string variation_id;
    std::string task_id;
    int variant = 0;  // 0 = base route, 1..2 = diversified variants
    std::vector<std::string> actions;
    Transcript transcript;
    int final_score = 0;
};

// Outcome of driving a script through a freshly built world.
struct ReplayOutcome {
    int score = 0;
    bool won = false;
    bool failed = false;
    bool all_executed = true;  // every step parsed and executed cleanly
    int steps = 0;
    Transcript transcript;
};

// Replays `actions` against the variation's world with milestone tracking.
// Stops early on win or fail.
ReplayOutcome replay_script(const TaskCatalog& catalog, const TaskVariation& var,
                            const std::vector<std::string>& actions);

class GoldPathPlanner {
public:
    explicit GoldPathPlanner(const TaskCatalog* catalog) : catalog_(catalog) {}

    // Up to `max_paths` (1..3) pairwise-distinct verified paths. Throws
    // std::runtime_error naming the variation if any variant fails to reach
    // score 100 on replay.
    std::vector<GoldPath> plan(const TaskVariation& var, int max_paths = 3) const;

    // One variant: 0 = base, 1 = adds an inventory check after the opener,
    // 2 = adds a second look after the first room change.
    GoldPath plan_one(const TaskVariation& var, int variant) const;

private:
    const TaskCatalog* catalog_;
};

// The three nested training corpora drawn from train-split paths.
struct TrainSets {
    std::vector<GoldPath> all_train;      // every gold path
    std::vector<GoldPath> no_variations;  // one seeded pick per variation
    std::vector<GoldPath> up_to_18;       // per-task cap of 18, fewer takes all
};

TrainSets sample_trainsets(const std::vector<GoldPath>& train_paths, std::uint64_t master_seed);

// Document statistics recorded alongside an exported corpus.
struct CorpusStats {
    int documents = 0;
    double mean_actions = 0.0;
    int min_pieces = 0;
    int max_pieces = 0;
    double mean_pieces = 0.0;
};

// Writes one JSON object per line: {"variation": ..., "text": ...}. The text
// is the plain dialog document without a trailing completion cue. Throws on
// an empty set ("empty trainset").
CorpusStats export_training_corpus(const std::vector<GoldPath>& set, const std::string& path,
                                   const PieceCounter& counter = default_piece_counter);

}  // namespace textlab
