#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "textlab/harness.hpp"
#include "textlab/task.hpp"

namespace {

std::string category_label(textlab::TaskCategory c) {
    switch (c) {
        case textlab::TaskCategory::matter: return "Matter";
        case textlab::TaskCategory::measurement: return "Measurement";
        case textlab::TaskCategory::classification: return "Classification";
        case textlab::TaskCategory::biology: return "Biology";
    }
    return "?";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"textlab: deterministic text-game lab for language-model agents"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an ini/toml file (flags win)");

    // ---- gen -------------------------------------------------------------
    textlab::GenOptions gen;
    CLI::App* gen_cmd =
        app.add_subcommand("gen", "Generate variations, gold paths, and training corpora");
    gen_cmd->add_option("--data", gen.data_dir, "Data directory")->capture_default_str();
    gen_cmd->add_option("--out", gen.out_dir, "Output directory (must not exist)")
        ->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
    gen_cmd->add_option("--tasks", gen.task_filter, "Comma-separated task class ids");

    // ---- eval ------------------------------------------------------------
    CLI::App* eval_cmd = app.add_subcommand("eval", "Run an evaluation and write a run directory");
    std::string e_data = "data";
    std::string e_runs = "runs";
    std::string e_run_id;
    std::string e_policy = "oracle";
    std::string e_split = "test";
    std::string e_tasks;
    std::string e_convention = "zero-on-fail";
    std::string e_preconditions = "off";
    std::string e_mode = "full-history";
    std::string e_manifest;
    std::uint64_t e_seed = 7;
    int e_groups = 1;
    int e_limit = 100;
    int e_budget = 2048;
    int e_workers = 1;
    double e_baseline = 0.0;
    auto* o_data = eval_cmd->add_option("--data", e_data, "Data directory")->capture_default_str();
    auto* o_runs =
        eval_cmd->add_option("--runs", e_runs, "Directory run folders are created in")
            ->capture_default_str();
    auto* o_run_id = eval_cmd->add_option("--run-id", e_run_id,
                                          "Run directory name (default: derived from options)");
    auto* o_seed = eval_cmd->add_option("--seed", e_seed, "Master seed")->capture_default_str();
    auto* o_groups =
        eval_cmd->add_option("--seeds", e_groups, "Independent seed groups (repetitions)")
            ->capture_default_str();
    auto* o_policy =
        eval_cmd
            ->add_option("--policy", e_policy,
                         "oracle | random | replay:PATH | completion[:URL]")
            ->capture_default_str();
    auto* o_split = eval_cmd->add_option("--split", e_split, "train | dev | test | all")
                        ->check(CLI::IsMember({"train", "dev", "test", "all"}))
                        ->capture_default_str();
    auto* o_tasks = eval_cmd->add_option("--tasks", e_tasks, "Comma-separated task class ids");
    auto* o_limit =
        eval_cmd->add_option("--limit", e_limit, "Environment step limit")->capture_default_str();
    auto* o_convention =
        eval_cmd->add_option("--convention", e_convention, "Failed-game scoring convention")
            ->check(CLI::IsMember({"zero-on-fail", "last-score-on-fail"}))
            ->capture_default_str();
    auto* o_preconditions =
        eval_cmd->add_option("--preconditions", e_preconditions, "Open/close guard")
            ->check(CLI::IsMember({"on", "off"}))
            ->capture_default_str();
    auto* o_mode = eval_cmd->add_option("--mode", e_mode, "Context packing mode")
                       ->check(CLI::IsMember({"full-history", "markov"}))
                       ->capture_default_str();
    auto* o_budget =
        eval_cmd->add_option("--budget", e_budget, "Prompt piece budget")->capture_default_str();
    auto* o_workers =
        eval_cmd->add_option("--workers", e_workers, "Parallel episode workers")
            ->capture_default_str();
    auto* o_baseline = eval_cmd->add_option(
        "--baseline", e_baseline, "Baseline micro score for the Improv. column");
    eval_cmd->add_option("--manifest", e_manifest,
                         "Load options from a stored eval manifest (explicit flags win)");

    // ---- play ------------------------------------------------------------
    textlab::PlayOptions play;
    CLI::App* play_cmd = app.add_subcommand("play", "Play a variation interactively");
    play_cmd->add_option("variation", play.variation_id, "Variation id, e.g. melt/0")
        ->required();
    play_cmd->add_option("--data", play.data_dir, "Data directory")->capture_default_str();
    play_cmd->add_option("--seed", play.seed, "Master seed the id is resolved against")
        ->capture_default_str();
    play_cmd->add_flag("--show-score", play.show_score, "Print the running score");
    play_cmd->add_option("--transcript", play.transcript_path,
                         "Write the session transcript to this JSONL file");

    // ---- report ----------------------------------------------------------
    std::vector<std::string> report_dirs;
    CLI::App* report_cmd = app.add_subcommand("report", "Compare stored run directories");
    report_cmd->add_option("runs", report_dirs, "Run directories")->required()->expected(-1);

    // ---- tasks -----------------------------------------------------------
    std::string t_data = "data";
    CLI::App* tasks_cmd = app.add_subcommand("tasks", "List shipped task classes");
    tasks_cmd->add_option("--data", t_data, "Data directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_cmd->parsed()) {
            std::cout << textlab::cmd_gen(gen);
            return 0;
        }
        if (eval_cmd->parsed()) {
            textlab::EvalOptions ev;
            if (!e_manifest.empty()) ev = textlab::eval_options_from_manifest(e_manifest);
            if (o_data->count()) ev.data_dir = e_data;
            if (o_seed->count()) ev.seed = e_seed;
            if (o_groups->count()) ev.seed_groups = e_groups;
            if (o_policy->count()) ev.policy = e_policy;
            if (o_split->count()) ev.split = e_split;
            if (o_tasks->count()) ev.task_filter = e_tasks;
            if (o_limit->count()) ev.limit = e_limit;
            if (o_convention->count())
                ev.convention = *textlab::convention_from_name(e_convention);
            if (o_preconditions->count()) ev.preconditions = (e_preconditions == "on");
            if (o_mode->count()) ev.mode = *textlab::pack_mode_from_name(e_mode);
            if (o_budget->count()) ev.budget = e_budget;
            if (o_workers->count()) ev.workers = e_workers;
            if (o_baseline->count()) ev.baseline = e_baseline;
            if (o_runs->count()) ev.runs_dir = e_runs;
            if (o_run_id->count()) ev.run_id = e_run_id;

            const textlab::EvalArtifacts art = textlab::cmd_eval(ev);
            const std::string label = std::filesystem::path(art.run_dir).filename().string();
            std::cout << textlab::render_report_text(art.report, label, ev.baseline);
            std::cout << "\nwrote " << art.run_dir << "\n";
            if (art.report.episodes == 0 && art.report.aborted > 0) {
                std::cerr << "error: all episodes aborted\n";
                return 1;
            }
            return 0;
        }
        if (play_cmd->parsed()) {
            return textlab::cmd_play(play, std::cin, std::cout);
        }
        if (report_cmd->parsed()) {
            std::cout << textlab::cmd_report(report_dirs);
            return 0;
        }
        if (tasks_cmd->parsed()) {
            const textlab::TaskCatalog catalog = textlab::TaskCatalog::load(t_data);
            std::cout << "task                           category        total  train  dev  test\n";
            std::cout << "-----------------------------------------------------------------------\n";
            int total = 0;
            for (const textlab::TaskClassSpec& cls : catalog.classes()) {
                const textlab::SplitCounts c = textlab::expected_split_counts(cls.default_count);
                total += cls.default_count;
                char line[160];
                std::snprintf(line, sizeof(line), "%-30s %-15s %5d %6d %4d %5d\n", cls.id.c_str(),
                              category_label(cls.category).c_str(), cls.default_count, c.train,
                              c.dev, c.test);
                std::cout << line;
            }
            std::cout << "total variations: " << total << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
