#include "textlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include <json.hpp>

#include "textlab/rng.hpp"

namespace textlab {

namespace fs = std::filesystem;

namespace {

std::string slurp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
    if (s.size() >= width) return s;
    return std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
    if (s.size() >= width) return s;
    return s + std::string(width - s.size(), ' ');
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        const auto begin = item.find_first_not_of(" \t");
        if (begin == std::string::npos) continue;
        const auto end = item.find_last_not_of(" \t");
        out.push_back(item.substr(begin, end - begin + 1));
    }
    return out;
}

std::vector<TaskVariation> enumerate_selected(const TaskCatalog& catalog, std::uint64_t seed,
                                              const std::string& task_filter) {
    const std::vector<std::string> wanted = split_csv(task_filter);
    for (const std::string& id : wanted) {
        if (catalog.find_class(id) == nullptr)
            throw std::runtime_error("unknown task class: " + id);
    }
    std::vector<TaskVariation> out;
    for (const TaskClassSpec& cls : catalog.classes()) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), cls.id) == wanted.end())
            continue;
        std::vector<TaskVariation> vars =
            catalog.enumerate_variations(cls, cls.default_count, seed);
        out.insert(out.end(), std::make_move_iterator(vars.begin()),
                   std::make_move_iterator(vars.end()));
    }
    return out;
}

}  // namespace

std::string pack_mode_name(PackMode m) {
    return m == PackMode::full_history ? "full-history" : "markov";
}

std::optional<PackMode> pack_mode_from_name(const std::string& s) {
    if (s == "full-history") return PackMode::full_history;
    if (s == "markov") return PackMode::markov;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

std::string cmd_gen(const GenOptions& opt) {
    if (fs::exists(opt.out_dir))
        throw std::runtime_error("output directory already exists: " + opt.out_dir);

    const TaskCatalog catalog = TaskCatalog::load(opt.data_dir);
    const std::vector<TaskVariation> vars = enumerate_selected(catalog, opt.seed, opt.task_filter);
    if (vars.empty()) throw std::runtime_error("no variations selected");

    fs::create_directories(fs::path(opt.out_dir) / "trainsets");

    std::string variations_jsonl;
    for (const TaskVariation& var : vars) {
        nlohmann::ordered_json j;
        j["id"] = var.id();
        j["task"] = var.task_id;
        j["index"] = var.index;
        j["seed"] = var.seed;
        j["split"] = split_name(var.split);
        j["params"] = var.params;
        j["description"] = var.description;
        variations_jsonl += j.dump() + "\n";
    }
    write_file(fs::path(opt.out_dir) / "variations.jsonl", variations_jsonl);

    const GoldPathPlanner planner(&catalog);
    std::vector<GoldPath> train_paths;
    std::string gold_jsonl;
    std::map<std::string, int> gold_by_task;
    int gold_total = 0;
    for (const TaskVariation& var : vars) {
        std::vector<GoldPath> paths = planner.plan(var, 3);
        for (const GoldPath& p : paths) {
            nlohmann::ordered_json j;
            j["variation"] = p.variation_id;
            j["task"] = p.task_id;
            j["split"] = split_name(var.split);
            j["variant"] = p.variant;
            j["final_score"] = p.final_score;
            j["steps"] = static_cast<int>(p.actions.size());
            j["actions"] = p.actions;
            gold_jsonl += j.dump() + "\n";
        }
        gold_by_task[var.task_id] += static_cast<int>(paths.size());
        gold_total += static_cast<int>(paths.size());
        if (var.split == Split::train) {
            train_paths.insert(train_paths.end(), std::make_move_iterator(paths.begin()),
                               std::make_move_iterator(paths.end()));
        }
    }
    write_file(fs::path(opt.out_dir) / "goldpaths.jsonl", gold_jsonl);

    const TrainSets sets = sample_trainsets(train_paths, opt.seed);
    const fs::path tdir = fs::path(opt.out_dir) / "trainsets";
    const CorpusStats s_all =
        export_training_corpus(sets.all_train, (tdir / "all_train.jsonl").string());
    const CorpusStats s_no =
        export_training_corpus(sets.no_variations, (tdir / "no_variations.jsonl").string());
    const CorpusStats s_18 =
        export_training_corpus(sets.up_to_18, (tdir / "up_to_18.jsonl").string());

    auto key_set = [](const std::vector<GoldPath>& v) {
        std::set<std::pair<std::string, int>> keys;
        for (const GoldPath& p : v) keys.insert({p.variation_id, p.variant});
        return keys;
    };
    const auto all_keys = key_set(sets.all_train);
    const auto no_keys = key_set(sets.no_variations);
    const auto cap_keys = key_set(sets.up_to_18);
    const bool chain_ok =
        std::includes(all_keys.begin(), all_keys.end(), no_keys.begin(), no_keys.end()) &&
        std::includes(no_keys.begin(), no_keys.end(), cap_keys.begin(), cap_keys.end());

    // Per-class inventory in catalog order.
    struct ClassRow {
        std::string id;
        int total = 0, train = 0, dev = 0, test = 0;
    };
    std::vector<ClassRow> rows;
    std::map<std::string, std::size_t> row_index;
    for (const TaskVariation& var : vars) {
        auto it = row_index.find(var.task_id);
        if (it == row_index.end()) {
            row_index[var.task_id] = rows.size();
            rows.push_back(ClassRow{var.task_id});
            it = row_index.find(var.task_id);
        }
        ClassRow& row = rows[it->second];
        ++row.total;
        if (var.split == Split::train) ++row.train;
        if (var.split == Split::dev) ++row.dev;
        if (var.split == Split::test) ++row.test;
    }

    auto corpus_json = [](const CorpusStats& s) {
        nlohmann::ordered_json j;
        j["documents"] = s.documents;
        j["mean_actions"] = s.mean_actions;
        j["min_pieces"] = s.min_pieces;
        j["max_pieces"] = s.max_pieces;
        j["mean_pieces"] = s.mean_pieces;
        return j;
    };

    nlohmann::ordered_json manifest;
    manifest["command"] = "gen";
    manifest["data_dir"] = opt.data_dir;
    manifest["seed"] = opt.seed;
    manifest["tasks"] = opt.task_filter;
    manifest["variations"] = static_cast<int>(vars.size());
    manifest["gold_paths"] = gold_total;
    nlohmann::ordered_json classes = nlohmann::ordered_json::array();
    for (const ClassRow& row : rows) {
        nlohmann::ordered_json j;
        j["task"] = row.id;
        j["total"] = row.total;
        j["train"] = row.train;
        j["dev"] = row.dev;
        j["test"] = row.test;
        j["gold_paths"] = gold_by_task[row.id];
        classes.push_back(std::move(j));
    }
    manifest["classes"] = std::move(classes);
    manifest["trainsets"] =
        nlohmann::ordered_json{{"all_train", corpus_json(s_all)},
                               {"no_variations", corpus_json(s_no)},
                               {"up_to_18", corpus_json(s_18)}};
    manifest["subset_chain_ok"] = chain_ok;
    write_file(fs::path(opt.out_dir) / "manifest.json", manifest.dump(2) + "\n");

    std::string summary;
    summary += "generated " + std::to_string(vars.size()) + " variations across " +
               std::to_string(rows.size()) + " task classes (seed " + std::to_string(opt.seed) +
               ")\n";
    summary += pad_right("task", 28) + pad_left("total", 6) + pad_left("train", 6) +
               pad_left("dev", 5) + pad_left("test", 5) + pad_left("gold", 6) + "\n";
    summary += std::string(56, '-') + "\n";
    for (const ClassRow& row : rows) {
        summary += pad_right(row.id, 28) + pad_left(std::to_string(row.total), 6) +
                   pad_left(std::to_string(row.train), 6) + pad_left(std::to_string(row.dev), 5) +
                   pad_left(std::to_string(row.test), 5) +
                   pad_left(std::to_string(gold_by_task[row.id]), 6) + "\n";
    }
    summary += "trainsets: all-train " + std::to_string(s_all.documents) + ", no-variations " +
               std::to_string(s_no.documents) + ", up-to-18 " + std::to_string(s_18.documents) +
               " documents (subset chain " + (chain_ok ? std::string("ok") : std::string("BROKEN")) +
               ")\n";
    summary += "wrote " + opt.out_dir + "\n";
    return summary;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, std::vector<std::string>> load_replay_table(const std::string& path) {
    std::map<std::string, std::vector<std::string>> table;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read replay transcripts: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        EpisodeRecord rec = episode_from_jsonl(line);
        if (table.count(rec.variation_id)) continue;  // first episode per variation wins
        std::vector<std::string> actions;
        actions.reserve(rec.turns.size());
        for (const EpisodeTurnRecord& t : rec.turns) actions.push_back(t.action);
        table.emplace(rec.variation_id, std::move(actions));
    }
    return table;
}

PolicyProvider make_policy_provider(const std::string& spec, const TaskCatalog& catalog) {
    if (spec == "oracle") {
        return [cat = &catalog](const TaskVariation& var, std::uint64_t) {
            const GoldPathPlanner planner(cat);
            GoldPath gold = planner.plan_one(var, 0);
            return std::unique_ptr<Policy>(new OraclePolicy(std::move(gold.actions)));
        };
    }
    if (spec == "random") {
        return [](const TaskVariation&, std::uint64_t seed) {
            return std::unique_ptr<Policy>(new RandomValidPolicy(seed));
        };
    }
    if (spec.rfind("replay:", 0) == 0) {
        auto table = std::make_shared<std::map<std::string, std::vector<std::string>>>(
            load_replay_table(spec.substr(7)));
        return [table](const TaskVariation& var, std::uint64_t) {
            auto it = table->find(var.id());
            std::vector<std::string> actions =
                it != table->end() ? it->second : std::vector<std::string>{};
            return std::unique_ptr<Policy>(new ReplayPolicy(std::move(actions)));
        };
    }
    if (spec == "completion" || spec.rfind("completion:", 0) == 0) {
        CompletionClientConfig cfg;
        if (spec.rfind("completion:", 0) == 0)
            cfg.url = spec.substr(std::string("completion:").size());
        return [cfg](const TaskVariation&, std::uint64_t) {
            return std::unique_ptr<Policy>(new CompletionClientPolicy(cfg));
        };
    }
    throw std::runtime_error("unknown policy spec: " + spec);
}

std::string policy_label(const std::string& spec) {
    const auto colon = spec.find(':');
    return colon == std::string::npos ? spec : spec.substr(0, colon);
}

std::string derive_run_id(const EvalOptions& opt) {
    std::string id = policy_label(opt.policy) + "-" + opt.split + "-s" + std::to_string(opt.seed);
    if (opt.seed_groups > 1) id += "-g" + std::to_string(opt.seed_groups);
    if (opt.preconditions) id += "-guard";
    if (opt.mode == PackMode::markov) id += "-markov";
    if (opt.convention == Convention::last_score_on_fail) id += "-lastscore";
    if (!opt.task_filter.empty()) {
        std::string tag = opt.task_filter;
        std::replace(tag.begin(), tag.end(), ',', '+');
        id += "-" + tag;
    }
    return id;
}

nlohmann::ordered_json eval_manifest_json(const EvalOptions& opt) {
    nlohmann::ordered_json j;
    j["command"] = "eval";
    j["data_dir"] = opt.data_dir;
    j["seed"] = opt.seed;
    j["seed_groups"] = opt.seed_groups;
    j["policy"] = opt.policy;
    j["split"] = opt.split;
    j["tasks"] = opt.task_filter;
    j["limit"] = opt.limit;
    j["convention"] = convention_name(opt.convention);
    j["preconditions"] = opt.preconditions;
    j["mode"] = pack_mode_name(opt.mode);
    j["budget"] = opt.budget;
    j["workers"] = opt.workers;
    if (opt.baseline)
        j["baseline"] = *opt.baseline;
    else
        j["baseline"] = nullptr;
    return j;
}

}  // namespace

EvalOptions eval_options_from_manifest(const std::string& manifest_path) {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(slurp_file(manifest_path));
    if (j.value("command", std::string()) != "eval")
        throw std::runtime_error("not an eval manifest: " + manifest_path);
    EvalOptions opt;
    opt.data_dir = j.value("data_dir", opt.data_dir);
    opt.seed = j.value("seed", opt.seed);
    opt.seed_groups = j.value("seed_groups", opt.seed_groups);
    opt.policy = j.value("policy", opt.policy);
    opt.split = j.value("split", opt.split);
    opt.task_filter = j.value("tasks", opt.task_filter);
    opt.limit = j.value("limit", opt.limit);
    if (j.contains("convention")) {
        auto conv = convention_from_name(j["convention"].get<std::string>());
        if (!conv) throw std::runtime_error("unknown convention in manifest");
        opt.convention = *conv;
    }
    opt.preconditions = j.value("preconditions", opt.preconditions);
    if (j.contains("mode")) {
        auto mode = pack_mode_from_name(j["mode"].get<std::string>());
        if (!mode) throw std::runtime_error("unknown mode in manifest");
        opt.mode = *mode;
    }
    opt.budget = j.value("budget", opt.budget);
    opt.workers = j.value("workers", opt.workers);
    if (j.contains("baseline") && !j["baseline"].is_null())
        opt.baseline = j["baseline"].get<double>();
    return opt;
}

EvalArtifacts cmd_eval(const EvalOptions& opt) {
    const TaskCatalog catalog = TaskCatalog::load(opt.data_dir);

    std::optional<Split> split_filter;
    if (opt.split != "all") {
        split_filter = split_from_name(opt.split);
        if (!split_filter) throw std::runtime_error("unknown split: " + opt.split);
    }

    std::vector<TaskVariation> all_vars = enumerate_selected(catalog, opt.seed, opt.task_filter);
    std::vector<TaskVariation> vars;
    for (TaskVariation& var : all_vars) {
        if (!split_filter || var.split == *split_filter) vars.push_back(std::move(var));
    }
    if (vars.empty()) throw std::runtime_error("no variations selected");
    if (opt.seed_groups < 1) throw std::runtime_error("seed_groups must be >= 1");
    if (opt.limit < 1) throw std::runtime_error("limit must be >= 1");

    const std::string run_id = opt.run_id.empty() ? derive_run_id(opt) : opt.run_id;
    const fs::path run_dir = fs::path(opt.runs_dir) / run_id;
    if (fs::exists(run_dir))
        throw std::runtime_error("run directory already exists: " + run_dir.string());

    const PolicyProvider provider = make_policy_provider(opt.policy, catalog);

    struct EpisodeJob {
        const TaskVariation* var;
        std::uint64_t group_seed;
        std::uint64_t episode_seed;
    };
    std::vector<EpisodeJob> jobs;
    jobs.reserve(vars.size() * static_cast<std::size_t>(opt.seed_groups));
    for (int g = 0; g < opt.seed_groups; ++g) {
        const std::uint64_t group_seed = derive_seed(opt.seed, "seed-group/" + std::to_string(g));
        for (const TaskVariation& var : vars) {
            jobs.push_back(EpisodeJob{&var, group_seed, derive_seed(group_seed, var.id())});
        }
    }

    EvalConfig cfg;
    cfg.step_limit = opt.limit;
    cfg.convention = opt.convention;
    cfg.preconditions = opt.preconditions;
    cfg.intercepted_consume_steps = false;
    cfg.verify_interceptions = opt.preconditions;
    cfg.mode = opt.mode;
    cfg.budget = opt.budget;

    std::vector<EpisodeResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) break;
            const EpisodeJob& job = jobs[i];
            EpisodeResult ep;
            try {
                std::unique_ptr<Policy> policy = provider(*job.var, job.episode_seed);
                ep = run_episode(catalog, *job.var, *policy, cfg);
            } catch (const std::exception& e) {
                ep = EpisodeResult{};
                ep.variation_id = job.var->id();
                ep.task_id = job.var->task_id;
                ep.split = job.var->split;
                ep.outcome = Outcome::aborted;
                ep.abort_reason = e.what();
            }
            ep.episode_seed = job.episode_seed;
            ep.run_seed = job.group_seed;
            results[i] = std::move(ep);
        }
    };
    const int worker_count =
        std::max(1, std::min<int>(opt.workers, static_cast<int>(jobs.size())));
    if (worker_count == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(worker_count));
        for (int w = 0; w < worker_count; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    const RunReport report = aggregate(results, opt.convention);
    std::vector<int> checkpoints;
    checkpoints.reserve(static_cast<std::size_t>(opt.limit) + 1);
    for (int s = 0; s <= opt.limit; ++s) checkpoints.push_back(s);
    const std::vector<double> curve = score_curve(results, checkpoints, opt.convention);

    fs::create_directories(run_dir);
    write_file(run_dir / "manifest.json", eval_manifest_json(opt).dump(2) + "\n");
    std::string transcripts;
    for (const EpisodeResult& ep : results) {
        transcripts += episode_to_jsonl(to_episode_record(ep, opt.convention)) + "\n";
    }
    write_file(run_dir / "transcripts.jsonl", transcripts);
    write_file(run_dir / "report.txt", render_report_text(report, run_id, opt.baseline));
    write_file(run_dir / "report.json",
               render_report_json(report, run_id, opt.baseline, checkpoints, curve));
    write_file(run_dir / "curves.csv", render_curves_csv(checkpoints, curve));

    EvalArtifacts artifacts;
    artifacts.run_dir = run_dir.string();
    artifacts.report = report;
    artifacts.episodes = std::move(results);
    return artifacts;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

namespace {

struct StoredRun {
    std::string label;
    int episodes = 0;
    int won = 0;
    int lost = 0;
    int aborted = 0;
    double micro = 0.0;
    double macro = 0.0;
    std::map<std::string, std::pair<double, std::optional<double>>> per_task;
};

StoredRun load_stored_run(const std::string& dir) {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(slurp_file(dir + "/report.json"));
    StoredRun run;
    run.label = j.value("run", dir);
    run.episodes = j.value("episodes", 0);
    run.won = j.value("won", 0);
    run.lost = j.value("lost", 0);
    run.aborted = j.value("aborted", 0);
    run.micro = j.value("micro", 0.0);
    run.macro = j.value("macro", 0.0);
    for (const auto& row : j.value("per_task", nlohmann::ordered_json::array())) {
        std::optional<double> std_dev;
        if (row.contains("std") && !row["std"].is_null()) std_dev = row["std"].get<double>();
        run.per_task[row.at("task").get<std::string>()] = {row.at("mean").get<double>(), std_dev};
    }
    return run;
}

}  // namespace

std::string cmd_report(const std::vector<std::string>& run_dirs) {
    if (run_dirs.empty()) throw std::runtime_error("no run directories given");
    std::vector<StoredRun> runs;
    runs.reserve(run_dirs.size());
    for (const std::string& dir : run_dirs) runs.push_back(load_stored_run(dir));

    std::string out;
    out += "Stored runs\n";
    out += pad_right("run", 32) + pad_left("episodes", 9) + pad_left("won", 6) +
           pad_left("lost", 6) + pad_left("aborted", 8) + pad_left("micro", 8) +
           pad_left("macro", 8) + "\n";
    out += std::string(77, '-') + "\n";
    for (const StoredRun& run : runs) {
        out += pad_right(run.label.substr(0, 32), 32) + pad_left(std::to_string(run.episodes), 9) +
               pad_left(std::to_string(run.won), 6) + pad_left(std::to_string(run.lost), 6) +
               pad_left(std::to_string(run.aborted), 8) + pad_left(fixed(run.micro, 2), 8) +
               pad_left(fixed(run.macro, 2), 8) + "\n";
    }
    out += "\n";

    std::set<std::string> task_union;
    for (const StoredRun& run : runs)
        for (const auto& [task, cell] : run.per_task) task_union.insert(task);

    const std::size_t col = 18;
    out += "Per-task mean (std)\n";
    out += pad_right("task", 28);
    for (const StoredRun& run : runs) out += pad_left(run.label.substr(0, col - 2), col);
    out += "\n";
    out += std::string(28 + col * runs.size(), '-') + "\n";
    for (const std::string& task : task_union) {
        out += pad_right(task, 28);
        for (const StoredRun& run : runs) {
            auto it = run.per_task.find(task);
            if (it == run.per_task.end()) {
                out += pad_left("-", col);
            } else {
                std::string cell = fixed(it->second.first, 2);
                cell += it->second.second ? " (" + fixed(*it->second.second, 2) + ")" : "";
                out += pad_left(cell, col);
            }
        }
        out += "\n";
    }
    out += "\n";

    if (runs.size() >= 2) {
        // Pearson over per-task means restricted to tasks stored in every run.
        std::vector<std::string> common;
        for (const std::string& task : task_union) {
            bool everywhere = true;
            for (const StoredRun& run : runs)
                if (!run.per_task.count(task)) everywhere = false;
            if (everywhere) common.push_back(task);
        }
        out += "Pearson correlation (per-task means, " + std::to_string(common.size()) +
               " common tasks)\n";
        out += pad_right("", 32);
        for (const StoredRun& run : runs) out += pad_left(run.label.substr(0, 14), 16);
        out += "\n";
        for (std::size_t i = 0; i < runs.size(); ++i) {
            out += pad_right(runs[i].label.substr(0, 32), 32);
            for (std::size_t j = 0; j < runs.size(); ++j) {
                std::vector<double> xs;
                std::vector<double> ys;
                for (const std::string& task : common) {
                    xs.push_back(runs[i].per_task.at(task).first);
                    ys.push_back(runs[j].per_task.at(task).first);
                }
                const std::optional<double> r = pearson(xs, ys);
                out += pad_left(r ? fixed(*r, 4) : std::string("n/a"), 16);
            }
            out += "\n";
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// play
// ---------------------------------------------------------------------------

int cmd_play(const PlayOptions& opt, std::istream& in, std::ostream& out) {
    const TaskCatalog catalog = TaskCatalog::load(opt.data_dir);
    const std::optional<TaskVariation> var = catalog.find_variation(opt.variation_id, opt.seed);
    if (!var) throw std::runtime_error("unknown variation: " + opt.variation_id);
    const TaskClassSpec* cls = catalog.find_class(var->task_id);

    World world = catalog.build_world(*var);
    MilestoneTracker tracker(*cls, *var, world);

    out << var->description << "\n\n";

    EpisodeRecord log;
    log.variation_id = var->id();
    log.seed = opt.seed;
    log.outcome = "limit_reached";

    std::string line;
    while (out << "> " << std::flush, std::getline(in, line)) {
        EpisodeTurnRecord turn;
        turn.action = line;
        const bool blank =
            std::all_of(line.begin(), line.end(),
                        [](unsigned char c) { return std::isspace(c) != 0; });
        if (blank) {
            turn.reply = catalog.messages().get("unclear");
            turn.category = Category::other;
        } else {
            const ParseResult pr = world.parse_action(line);
            if (pr.kind == ParseResult::Kind::syntax_error) {
                turn.reply = catalog.messages().get("invalid_syntax");
                turn.category = Category::invalid_syntax;
            } else if (pr.kind == ParseResult::Kind::unresolved_object) {
                turn.reply = catalog.messages().get("invalid_object");
                turn.category = Category::invalid_object;
            } else {
                auto [obs, so] = world.step(*pr.action);
                tracker.update(world);
                turn.reply = obs.text;
                switch (so) {
                    case StepOutcome::executed: turn.category = Category::valid; break;
                    case StepOutcome::redundant: turn.category = Category::redundant; break;
                    case StepOutcome::affordance_violation:
                        turn.category = Category::affordance_violation;
                        break;
                }
            }
        }
        turn.score = tracker.score();
        log.turns.push_back(turn);

        out << turn.reply << "\n";
        if (opt.show_score) out << "score: " << tracker.score() << "\n";
        if (tracker.won()) {
            out << catalog.messages().get("play_win") << "\n";
            log.outcome = "won";
            break;
        }
        if (tracker.failed()) {
            const std::string score_str =
                std::to_string(tracker.final_score(Convention::zero_on_fail));
            out << catalog.messages().format("play_lost", {{"score", score_str}}) << "\n";
            log.outcome = "lost";
            break;
        }
    }

    log.final_score = tracker.final_score(Convention::zero_on_fail);
    if (!opt.transcript_path.empty()) {
        write_file(opt.transcript_path, episode_to_jsonl(log) + "\n");
    }
    return 0;
}

}  // namespace textlab
