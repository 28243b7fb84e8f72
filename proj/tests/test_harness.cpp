#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "textlab/goldpath.hpp"
#include "textlab/harness.hpp"

#include "support.hpp"

using namespace textlab;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 7;

int count_lines(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE_MESSAGE(in.good(), p.string());
    int n = 0;
    std::string line;
    while (std::getline(in, line)) ++n;
    return n;
}

bool same_bytes(const fs::path& a, const fs::path& b) {
    return support::slurp(a.string()) == support::slurp(b.string());
}

GenOptions gen_opts(const fs::path& out) {
    GenOptions opt;
    opt.data_dir = support::data_dir();
    opt.out_dir = out.string();
    opt.seed = kSeed;
    opt.task_filter = "freeze";
    return opt;
}

EvalOptions eval_opts(const fs::path& runs, const std::string& run_id) {
    EvalOptions opt;
    opt.data_dir = support::data_dir();
    opt.runs_dir = runs.string();
    opt.run_id = run_id;
    opt.seed = kSeed;
    opt.policy = "oracle";
    opt.split = "dev";
    opt.task_filter = "freeze";
    opt.limit = 60;
    opt.workers = 2;
    return opt;
}

}  // namespace

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

TEST_CASE("cmd_gen writes the full dataset inventory for one task") {
    const fs::path out = support::fresh_path("gen");
    const std::string summary = cmd_gen(gen_opts(out));
    CHECK(summary.find("wrote") != std::string::npos);

    CHECK(count_lines(out / "variations.jsonl") == 12);
    CHECK(count_lines(out / "goldpaths.jsonl") == 36);  // 12 variations x 3 variants
    CHECK(fs::exists(out / "trainsets" / "all_train.jsonl"));
    CHECK(fs::exists(out / "trainsets" / "no_variations.jsonl"));
    CHECK(fs::exists(out / "trainsets" / "up_to_18.jsonl"));

    const std::string manifest = support::slurp((out / "manifest.json").string());
    CHECK(manifest.find("\"command\": \"gen\"") != std::string::npos);
    CHECK(manifest.find("\"subset_chain_ok\": true") != std::string::npos);
    CHECK(manifest.find("\"variations\": 12") != std::string::npos);
    CHECK(manifest.find("\"gold_paths\": 36") != std::string::npos);
    CHECK(manifest.find("\"task\": \"freeze\"") != std::string::npos);

    // The freeze grid splits 12 as 6 train / 3 dev / 3 test.
    CHECK(manifest.find("\"train\": 6") != std::string::npos);
    CHECK(manifest.find("\"dev\": 3") != std::string::npos);
    CHECK(manifest.find("\"test\": 3") != std::string::npos);

    // Train corpora come from train-split paths only: 6 variations x 3 variants.
    CHECK(count_lines(out / "trainsets" / "all_train.jsonl") == 18);
    CHECK(count_lines(out / "trainsets" / "no_variations.jsonl") == 6);
    CHECK(count_lines(out / "trainsets" / "up_to_18.jsonl") == 6);
}

TEST_CASE("cmd_gen is byte-deterministic across output directories") {
    const fs::path a = support::fresh_path("gen-a");
    const fs::path b = support::fresh_path("gen-b");
    cmd_gen(gen_opts(a));
    cmd_gen(gen_opts(b));
    for (const char* name : {"variations.jsonl", "goldpaths.jsonl", "manifest.json"}) {
        CHECK_MESSAGE(same_bytes(a / name, b / name), name);
    }
    for (const char* name : {"all_train.jsonl", "no_variations.jsonl", "up_to_18.jsonl"}) {
        CHECK_MESSAGE(same_bytes(a / "trainsets" / name, b / "trainsets" / name), name);
    }
}

TEST_CASE("cmd_gen refuses to clobber and rejects unknown tasks") {
    const fs::path out = support::fresh_dir("gen-exists");
    CHECK_THROWS_AS(cmd_gen(gen_opts(out)), std::runtime_error);

    GenOptions bogus = gen_opts(support::fresh_path("gen-bogus"));
    bogus.task_filter = "no-such-task";
    CHECK_THROWS_AS(cmd_gen(bogus), std::runtime_error);
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

TEST_CASE("cmd_eval runs the oracle to a perfect dev score") {
    const fs::path runs = support::fresh_path("runs");
    const EvalArtifacts art = cmd_eval(eval_opts(runs, "ora"));

    CHECK(art.report.episodes == 3);  // freeze dev split
    CHECK(art.report.won == 3);
    CHECK(art.report.micro == doctest::Approx(100.0));
    CHECK(art.report.macro == doctest::Approx(100.0));
    CHECK(art.report.aborted == 0);
    REQUIRE(art.episodes.size() == 3);
    for (const EpisodeResult& ep : art.episodes) {
        CHECK(ep.outcome == Outcome::won);
        CHECK(ep.task_id == "freeze");
        CHECK(ep.split == Split::dev);
    }

    const fs::path dir = art.run_dir;
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(count_lines(dir / "transcripts.jsonl") == 3);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "curves.csv"));
    const std::string text = support::slurp((dir / "report.txt").string());
    CHECK(text.find("run: ora") != std::string::npos);
    CHECK(text.find("freeze") != std::string::npos);

    const std::string csv = support::slurp((dir / "curves.csv").string());
    CHECK(csv.rfind("env_steps,mean_score\n", 0) == 0);
}

TEST_CASE("identical options reproduce byte-identical artifacts") {
    const fs::path runs_a = support::fresh_path("runs-a");
    const fs::path runs_b = support::fresh_path("runs-b");

    for (const std::string policy : {std::string("oracle"), std::string("random")}) {
        EvalOptions a = eval_opts(runs_a, "det-" + policy);
        a.policy = policy;
        EvalOptions b = eval_opts(runs_b, "det-" + policy);
        b.policy = policy;
        const EvalArtifacts art_a = cmd_eval(a);
        const EvalArtifacts art_b = cmd_eval(b);
        for (const char* name :
             {"manifest.json", "transcripts.jsonl", "report.json", "report.txt", "curves.csv"}) {
            CHECK_MESSAGE(same_bytes(fs::path(art_a.run_dir) / name,
                                     fs::path(art_b.run_dir) / name),
                          policy << " " << name);
        }
    }
}

TEST_CASE("seed groups repeat every variation and enable the std-dev column") {
    const fs::path runs = support::fresh_path("runs-groups");
    EvalOptions opt = eval_opts(runs, "grouped");
    opt.seed_groups = 2;
    const EvalArtifacts art = cmd_eval(opt);
    CHECK(art.report.episodes == 6);  // 3 dev variations x 2 groups
    REQUIRE(art.report.std_dev.has_value());
    CHECK(*art.report.std_dev == doctest::Approx(0.0));  // oracle wins in both groups
}

TEST_CASE("replay policy reproduces a stored run from its transcripts") {
    const fs::path runs = support::fresh_path("runs-replay");
    const EvalArtifacts oracle = cmd_eval(eval_opts(runs, "source"));

    EvalOptions opt = eval_opts(runs, "replayed");
    opt.policy = "replay:" + (fs::path(oracle.run_dir) / "transcripts.jsonl").string();
    const EvalArtifacts replayed = cmd_eval(opt);
    CHECK(replayed.report.won == 3);
    CHECK(replayed.report.micro == doctest::Approx(100.0));
}

TEST_CASE("an unconfigured completion endpoint aborts episodes, not the run") {
    ::unsetenv("TEXTLAB_COMPLETION_URL");
    const fs::path runs = support::fresh_path("runs-noend");
    EvalOptions opt = eval_opts(runs, "noend");
    opt.policy = "completion";
    opt.limit = 5;
    const EvalArtifacts art = cmd_eval(opt);
    CHECK(art.report.aborted == 3);
    CHECK(art.report.episodes == 0);
}

TEST_CASE("cmd_eval validates its inputs loudly") {
    const fs::path runs = support::fresh_path("runs-bad");

    EvalOptions bad_split = eval_opts(runs, "x1");
    bad_split.split = "validation";
    CHECK_THROWS_AS(cmd_eval(bad_split), std::runtime_error);

    EvalOptions bad_task = eval_opts(runs, "x2");
    bad_task.task_filter = "nope";
    CHECK_THROWS_AS(cmd_eval(bad_task), std::runtime_error);

    EvalOptions bad_policy = eval_opts(runs, "x3");
    bad_policy.policy = "telepathy";
    CHECK_THROWS_AS(cmd_eval(bad_policy), std::runtime_error);

    // Existing run directory: refused.
    const EvalOptions ok = eval_opts(runs, "dup");
    cmd_eval(ok);
    CHECK_THROWS_AS(cmd_eval(ok), std::runtime_error);
}

TEST_CASE("run ids derive from the options when left empty") {
    const fs::path runs = support::fresh_path("runs-derived");
    EvalOptions opt = eval_opts(runs, "");
    const EvalArtifacts art = cmd_eval(opt);
    const std::string dir = fs::path(art.run_dir).filename().string();
    CHECK(dir.find("oracle") != std::string::npos);
    CHECK(dir.find("dev") != std::string::npos);
    CHECK(dir.find("freeze") != std::string::npos);
}

TEST_CASE("eval manifests round trip into options") {
    const fs::path runs = support::fresh_path("runs-manifest");
    EvalOptions opt = eval_opts(runs, "mf");
    opt.preconditions = true;
    opt.mode = PackMode::markov;
    opt.budget = 512;
    opt.baseline = 12.5;
    const EvalArtifacts art = cmd_eval(opt);

    const EvalOptions back =
        eval_options_from_manifest((fs::path(art.run_dir) / "manifest.json").string());
    CHECK(back.seed == opt.seed);
    CHECK(back.seed_groups == opt.seed_groups);
    CHECK(back.policy == opt.policy);
    CHECK(back.split == opt.split);
    CHECK(back.task_filter == opt.task_filter);
    CHECK(back.limit == opt.limit);
    CHECK(back.convention == opt.convention);
    CHECK(back.preconditions == opt.preconditions);
    CHECK(back.mode == opt.mode);
    CHECK(back.budget == opt.budget);
    CHECK(back.workers == opt.workers);
    REQUIRE(back.baseline.has_value());
    CHECK(*back.baseline == doctest::Approx(12.5));

    CHECK_THROWS_AS(eval_options_from_manifest("/no/such/manifest.json"), std::runtime_error);
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

TEST_CASE("cmd_report compares stored runs side by side") {
    const fs::path runs = support::fresh_path("runs-report");
    const EvalArtifacts a = cmd_eval(eval_opts(runs, "alpha"));
    EvalOptions wait_opts = eval_opts(runs, "beta");
    wait_opts.policy = "replay:/dev/null";  // no transcripts: everything waits
    const EvalArtifacts b = cmd_eval(wait_opts);

    const std::string text = cmd_report({a.run_dir, b.run_dir});
    CHECK(text.find("alpha") != std::string::npos);
    CHECK(text.find("beta") != std::string::npos);
    CHECK(text.find("freeze") != std::string::npos);
    CHECK(text.find("Stored runs") != std::string::npos);

    CHECK_THROWS_AS(cmd_report({(runs / "missing").string()}), std::runtime_error);
}

// ---------------------------------------------------------------------------
// play
// ---------------------------------------------------------------------------

TEST_CASE("cmd_play drives a scripted session to the win banner") {
    const GoldPathPlanner planner(&support::catalog());
    const auto var = support::catalog().find_variation("freeze/0", kSeed);
    REQUIRE(var.has_value());
    const GoldPath gold = planner.plan_one(*var, 0);

    std::ostringstream script;
    for (const std::string& a : gold.actions) script << a << "\n";

    PlayOptions opt;
    opt.data_dir = support::data_dir();
    opt.seed = kSeed;
    opt.variation_id = "freeze/0";
    opt.transcript_path = (support::fresh_dir("play") / "episode.jsonl").string();

    std::istringstream in(script.str());
    std::ostringstream out;
    const int rc = cmd_play(opt, in, out);
    CHECK(rc == 0);
    const std::string text = out.str();
    CHECK(text.find(var->description) != std::string::npos);
    CHECK(text.find("You won! Score: 100") != std::string::npos);

    const std::string logged = support::slurp(opt.transcript_path);
    CHECK(logged.find("\"outcome\":\"won\"") != std::string::npos);

    PlayOptions unknown = opt;
    unknown.variation_id = "freeze/999";
    std::istringstream in2("");
    std::ostringstream out2;
    CHECK_THROWS_AS(cmd_play(unknown, in2, out2), std::runtime_error);
}

TEST_CASE("cmd_play answers gibberish in the game's voice and survives eof") {
    PlayOptions opt;
    opt.data_dir = support::data_dir();
    opt.seed = kSeed;
    opt.variation_id = "melt/0";

    std::istringstream in("open door to kitchen\nplease do my taxes\n");
    std::ostringstream out;
    cmd_play(opt, in, out);
    const std::string text = out.str();
    CHECK(text.find("The door is now open.") != std::string::npos);
    CHECK(text.find("That is not a valid command.") != std::string::npos);
    CHECK(text.find("> ") != std::string::npos);
}
