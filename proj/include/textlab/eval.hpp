#pragma once

// Episode runner and metrics. Drives a policy through a variation under a
// step limit, classifies every emitted action (valid / affordance violation /
// invalid object / invalid syntax / redundant / other), and aggregates runs
// into micro/macro scores, per-task tables, category shares, score-vs-steps
// curves, and Pearson correlations between result vectors.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "textlab/policy.hpp"
#include "textlab/task.hpp"
#include "textlab/transcript.hpp"

namespace textlab {

enum class Outcome : std::uint8_t { won, lost, limit_reached, aborted };

std::string outcome_name(Outcome o);
std::optional<Outcome> outcome_from_name(const std::string& s);

// One emitted action with everything the reports need. The runner issues the
// opening "look around" itself; that record carries has_prompt = false.
struct ActionRecord {
    std::string action;
    std::string reply;
    Category category = Category::valid;
    bool intercepted = false;       // swallowed by the precondition guard
    bool env_step_consumed = true;  // false only for (default-config) interceptions
    int score_after = 0;            // running milestone score once this action settled

    bool has_prompt = false;  // true for policy-emitted actions
    int prompt_turns = 0;     // whole prior turns packed into the prompt
    int prompt_pieces = 0;    // prompt cost, cue excluded
    bool prompt_has_cue = false;

    bool intercept_checked = false;  // engine ground truth probed for this interception
    bool intercept_redundant = false;
};

struct EpisodeResult {
    std::string variation_id;
    std::string task_id;
    Split split = Split::test;
    std::uint64_t episode_seed = 0;  // seeds the policy (caller-assigned)
    std::uint64_t run_seed = 0;      // seed group the episode belongs to (caller-assigned)
    Outcome outcome = Outcome::limit_reached;
    int score_zero_on_fail = 0;
    int score_last_on_fail = 0;
    int env_steps = 0;         // environment steps actually consumed
    std::string abort_reason;  // set only when outcome == aborted
    std::vector<ActionRecord> records;

    int final_score(Convention conv) const;
};

struct EvalConfig {
    int step_limit = 100;
    Convention convention = Convention::zero_on_fail;
    bool preconditions = false;             // enable the open/close guard
    bool intercepted_consume_steps = false; // when true, interceptions burn env steps
    bool verify_interceptions = false;      // probe a world copy for ground truth
    PackMode mode = PackMode::full_history;
    int budget = 2048;   // prompt piece budget
    PieceCounter counter;  // empty -> default_piece_counter
};

// Plays one episode: issue the opening look, then loop pack -> decide ->
// guard filter -> classify -> engine step -> record until win, fail, or the
// step limit. Policy transport errors mark the episode aborted instead of
// propagating. Deterministic given the policy's seed and the variation.
EpisodeResult run_episode(const TaskCatalog& catalog, const TaskVariation& var, Policy& policy,
                          const EvalConfig& cfg);

// ---------------------------------------------------------------------------
// aggregation
// ---------------------------------------------------------------------------

struct TaskSummary {
    std::string task_id;
    int games = 0;
    double mean_score = 0.0;
    std::optional<double> std_dev;  // across seed groups; absent with < 2 groups
    int won = 0;
    int lost = 0;
};

// Percentages over all policy-emitted actions of non-aborted episodes.
// The six shares partition the emissions, so they sum to 100.
struct CategoryShare {
    double valid = 0.0;
    double invalid_syntax = 0.0;
    double invalid_object = 0.0;
    double affordance_violation = 0.0;
    double redundant = 0.0;  // intercepted or not
    double other = 0.0;
};

struct RunReport {
    Convention convention = Convention::zero_on_fail;
    int episodes = 0;  // non-aborted episodes aggregated below
    int aborted = 0;   // excluded from every mean
    int won = 0;
    int lost = 0;
    int limit_reached = 0;
    double micro = 0.0;  // mean score over games
    double macro = 0.0;  // mean of per-task mean scores
    std::optional<double> std_dev;  // micro across seed groups; absent with < 2 groups
    std::vector<TaskSummary> per_task;  // sorted by task id
    long long actions_emitted = 0;  // policy-emitted actions (opener excluded)
    long long intercepted = 0;
    CategoryShare shares;
    // Redundant actions that actually reached the engine, as % of emissions.
    // This is the number the precondition guard drives down; the `redundant`
    // share above keeps counting intercepted emissions so shares stay a
    // partition.
    double redundant_env_pct = 0.0;
    double mean_env_steps = 0.0;
};

RunReport aggregate(const std::vector<EpisodeResult>& results, Convention convention);

// Score the episode would have reported had it been truncated after `step`
// environment steps. Step 0 is always 0; past the episode's end the final
// score holds.
double score_at_step(const EpisodeResult& ep, int step, Convention conv);

// Mean of score_at_step over non-aborted episodes, one value per checkpoint.
std::vector<double> score_curve(const std::vector<EpisodeResult>& results,
                                const std::vector<int>& checkpoints, Convention conv);

// Sample Pearson correlation; no value when n < 2, lengths differ, or either
// side has zero variance.
std::optional<double> pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

// Fixed-width human-readable table:
//   Train / Score / Std.Dev / Improv. / Won / Lost / Valid / AVs / IOs / IS /
//   RAs / Other
// plus aggregate lines and the per-task table. `baseline` feeds the Improv.
// column as a micro/baseline ratio; absent -> "n/a".
std::string render_report_text(const RunReport& report, const std::string& run_label,
                               std::optional<double> baseline);

// Machine-readable mirror of the text report plus the curve, stable key order.
std::string render_report_json(const RunReport& report, const std::string& run_label,
                               std::optional<double> baseline,
                               const std::vector<int>& checkpoints,
                               const std::vector<double>& curve);

std::string render_curves_csv(const std::vector<int>& checkpoints,
                              const std::vector<double>& curve);

// Transcript-layer record for JSONL storage.
EpisodeRecord to_episode_record(const EpisodeResult& ep, Convention conv);

}  // namespace textlab
