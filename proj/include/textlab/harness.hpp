#pragma once

// Command-level orchestration behind the CLI: data generation, evaluation
// runs with worker parallelism and on-disk artifacts, cross-run reporting,
// and the interactive terminal session. Everything is deterministic given
// the options; artifacts never include timestamps.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "textlab/eval.hpp"
#include "textlab/goldpath.hpp"
#include "textlab/task.hpp"

namespace textlab {

std::string pack_mode_name(PackMode m);
std::optional<PackMode> pack_mode_from_name(const std::string& s);

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenOptions {
    std::string data_dir = "data";
    std::string out_dir = "out";
    std::uint64_t seed = 7;
    std::string task_filter;  // comma-separated class ids; empty = all
};

// Writes variations.jsonl, goldpaths.jsonl (all splits), the three nested
// training corpora under <out>/trainsets/, and manifest.json. Refuses to
// write into an existing out_dir. Returns a printable inventory summary.
std::string cmd_gen(const GenOptions& opt);

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalOptions {
    std::string data_dir = "data";
    std::string runs_dir = "runs";
    std::string run_id;     // empty -> derived from the options
    std::uint64_t seed = 7;  // master seed: enumeration + per-group policy seeds
    int seed_groups = 1;     // independent repetitions for std-dev
    std::string policy = "oracle";  // oracle | random | replay:PATH | completion[:URL]
    std::string split = "test";     // train | dev | test | all
    std::string task_filter;        // comma-separated class ids; empty = all
    int limit = 100;
    Convention convention = Convention::zero_on_fail;
    bool preconditions = false;
    PackMode mode = PackMode::full_history;
    int budget = 2048;
    int workers = 1;
    std::optional<double> baseline;  // feeds the report's Improv. column
};

struct EvalArtifacts {
    std::string run_dir;
    RunReport report;
    std::vector<EpisodeResult> episodes;  // listed order: seed group, then variation
};

// Runs every selected variation once per seed group, writes
// runs/<id>/{manifest.json, transcripts.jsonl, report.json, report.txt,
// curves.csv}, and returns the in-memory results. Refuses an existing run
// directory. Policy transport failures surface as aborted episodes.
EvalArtifacts cmd_eval(const EvalOptions& opt);

// Reads an eval manifest.json back into options (runs_dir/run_id excluded).
EvalOptions eval_options_from_manifest(const std::string& manifest_path);

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

// Comparison tables over stored run directories: per-task means, micro/macro,
// and a Pearson matrix over per-task mean vectors. Throws on unreadable runs.
std::string cmd_report(const std::vector<std::string>& run_dirs);

// ---------------------------------------------------------------------------
// play
// ---------------------------------------------------------------------------

struct PlayOptions {
    std::string data_dir = "data";
    std::uint64_t seed = 7;
    std::string variation_id;     // "task/index"
    bool show_score = false;
    std::string transcript_path;  // optional JSONL episode log
};

// Interactive session on (in, out); EOF ends it cleanly. Returns 0.
int cmd_play(const PlayOptions& opt, std::istream& in, std::ostream& out);

}  // namespace textlab
