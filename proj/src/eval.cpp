#include "textlab/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "textlab/guard.hpp"

namespace textlab {

namespace {

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

bool ends_with_cue(const std::string& prompt) {
    return prompt.size() >= 2 && prompt.compare(prompt.size() - 2, 2, "A:") == 0;
}

double sample_std_dev(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1.0));
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

}  // namespace

std::string outcome_name(Outcome o) {
    switch (o) {
        case Outcome::won: return "won";
        case Outcome::lost: return "lost";
        case Outcome::limit_reached: return "limit_reached";
        case Outcome::aborted: return "aborted";
    }
    return "limit_reached";
}

std::optional<Outcome> outcome_from_name(const std::string& s) {
    if (s == "won") return Outcome::won;
    if (s == "lost") return Outcome::lost;
    if (s == "limit_reached") return Outcome::limit_reached;
    if (s == "aborted") return Outcome::aborted;
    return std::nullopt;
}

int EpisodeResult::final_score(Convention conv) const {
    return conv == Convention::zero_on_fail ? score_zero_on_fail : score_last_on_fail;
}

EpisodeResult run_episode(const TaskCatalog& catalog, const TaskVariation& var, Policy& policy,
                          const EvalConfig& cfg) {
    const TaskClassSpec* cls = catalog.find_class(var.task_id);
    if (cls == nullptr) throw std::runtime_error("unknown task class: " + var.task_id);

    World world = catalog.build_world(var);
    MilestoneTracker tracker(*cls, var, world);
    PreconditionGuard guard(&catalog.messages());
    const PieceCounter counter = cfg.counter ? cfg.counter : PieceCounter(default_piece_counter);

    EpisodeResult ep;
    ep.variation_id = var.id();
    ep.task_id = var.task_id;
    ep.split = var.split;

    Transcript transcript;
    transcript.description = var.description;

    int env_steps = 0;

    auto settle = [&](ActionRecord rec) {
        rec.score_after = tracker.score();
        if (rec.env_step_consumed) ++env_steps;
        transcript.turns.push_back(DialogTurn{rec.action, rec.reply, std::nullopt});
        if (cfg.preconditions) guard.observe(rec.reply, world.current_room_name());
        ep.records.push_back(std::move(rec));
    };

    // The runner issues the opening look itself, mirroring the gold
    // transcripts; the policy sees it as the first prior turn.
    {
        ParseResult pr = world.parse_action("look around");
        auto [obs, so] = world.step(*pr.action);
        tracker.update(world);
        ActionRecord rec;
        rec.action = "look around";
        rec.reply = obs.text;
        rec.category = so == StepOutcome::executed ? Category::valid : Category::redundant;
        rec.env_step_consumed = true;
        rec.has_prompt = false;
        settle(std::move(rec));
    }

    Outcome outcome = Outcome::limit_reached;
    bool done = tracker.finished();
    if (tracker.won()) outcome = Outcome::won;
    if (tracker.failed()) outcome = Outcome::lost;

    // Interceptions can leave env_steps untouched, so a pathological policy
    // could emit forever; the emission cap turns that into limit_reached.
    const long long emission_cap = static_cast<long long>(cfg.step_limit) * 50;
    long long emissions = 0;

    while (!done && env_steps < cfg.step_limit && emissions < emission_cap) {
        PackResult pack;
        std::string action_text;
        try {
            pack = pack_context(transcript, cfg.mode, cfg.budget, counter);
            PolicyContext ctx;
            ctx.prompt = pack.prompt;
            ctx.step_index = static_cast<int>(ep.records.size());
            ctx.variation_id = ep.variation_id;
            ctx.world = &world;
            action_text = policy.decide(ctx).action_text;
        } catch (const std::exception& e) {
            outcome = Outcome::aborted;
            ep.abort_reason = e.what();
            break;
        }
        ++emissions;

        ActionRecord rec;
        rec.action = action_text;
        rec.has_prompt = true;
        rec.prompt_turns = pack.turns_included;
        rec.prompt_pieces = pack.pieces_used;
        rec.prompt_has_cue = ends_with_cue(pack.prompt);

        if (cfg.preconditions) {
            GuardDecision g = guard.filter(action_text, world.current_room_name());
            if (g.intercept) {
                rec.category = Category::redundant;
                rec.intercepted = true;
                rec.env_step_consumed = cfg.intercepted_consume_steps;
                rec.reply = g.reply;
                if (cfg.verify_interceptions) {
                    rec.intercept_checked = true;
                    World probe = world;
                    ParseResult pr = probe.parse_action(action_text);
                    rec.intercept_redundant =
                        pr.kind == ParseResult::Kind::parsed &&
                        probe.step(*pr.action).second == StepOutcome::redundant;
                }
                settle(std::move(rec));
                continue;
            }
        }

        if (is_blank(action_text)) {
            rec.category = Category::other;
            rec.reply = catalog.messages().get("unclear");
        } else {
            ParseResult pr = world.parse_action(action_text);
            if (pr.kind == ParseResult::Kind::syntax_error) {
                rec.category = Category::invalid_syntax;
                rec.reply = catalog.messages().get("invalid_syntax");
            } else if (pr.kind == ParseResult::Kind::unresolved_object) {
                rec.category = Category::invalid_object;
                rec.reply = catalog.messages().get("invalid_object");
            } else {
                auto [obs, so] = world.step(*pr.action);
                tracker.update(world);
                rec.reply = obs.text;
                switch (so) {
                    case StepOutcome::executed: rec.category = Category::valid; break;
                    case StepOutcome::redundant: rec.category = Category::redundant; break;
                    case StepOutcome::affordance_violation:
                        rec.category = Category::affordance_violation;
                        break;
                }
            }
        }
        settle(std::move(rec));

        if (tracker.won()) {
            outcome = Outcome::won;
            done = true;
        } else if (tracker.failed()) {
            outcome = Outcome::lost;
            done = true;
        }
    }

    ep.outcome = outcome;
    ep.env_steps = env_steps;
    ep.score_zero_on_fail = tracker.final_score(Convention::zero_on_fail);
    ep.score_last_on_fail = tracker.final_score(Convention::last_score_on_fail);
    return ep;
}

RunReport aggregate(const std::vector<EpisodeResult>& results, Convention convention) {
    RunReport rep;
    rep.convention = convention;

    std::vector<const EpisodeResult*> live;
    live.reserve(results.size());
    for (const auto& r : results) {
        if (r.outcome == Outcome::aborted) {
            ++rep.aborted;
        } else {
            live.push_back(&r);
        }
    }
    rep.episodes = static_cast<int>(live.size());
    if (live.empty()) return rep;

    double score_sum = 0.0;
    long long env_total = 0;
    std::array<long long, 6> cat_counts{};
    long long emitted = 0;
    long long intercepted = 0;
    long long redundant_env = 0;
    std::map<std::string, std::vector<const EpisodeResult*>> by_task;
    std::map<std::uint64_t, std::vector<double>> by_group;

    for (const EpisodeResult* e : live) {
        const double s = e->final_score(convention);
        score_sum += s;
        env_total += e->env_steps;
        by_task[e->task_id].push_back(e);
        by_group[e->run_seed].push_back(s);
        switch (e->outcome) {
            case Outcome::won: ++rep.won; break;
            case Outcome::lost: ++rep.lost; break;
            case Outcome::limit_reached: ++rep.limit_reached; break;
            case Outcome::aborted: break;
        }
        for (const ActionRecord& rec : e->records) {
            if (!rec.has_prompt) continue;  // runner-issued opener
            ++emitted;
            ++cat_counts[static_cast<std::size_t>(rec.category)];
            if (rec.intercepted) ++intercepted;
            if (rec.category == Category::redundant && !rec.intercepted) ++redundant_env;
        }
    }

    rep.micro = score_sum / static_cast<double>(live.size());
    rep.mean_env_steps = static_cast<double>(env_total) / static_cast<double>(live.size());

    double macro_sum = 0.0;
    for (const auto& [task_id, eps] : by_task) {
        TaskSummary t;
        t.task_id = task_id;
        t.games = static_cast<int>(eps.size());
        double task_sum = 0.0;
        std::map<std::uint64_t, std::pair<double, int>> group_sums;
        for (const EpisodeResult* e : eps) {
            const double s = e->final_score(convention);
            task_sum += s;
            if (e->outcome == Outcome::won) ++t.won;
            if (e->outcome == Outcome::lost) ++t.lost;
            auto& g = group_sums[e->run_seed];
            g.first += s;
            g.second += 1;
        }
        t.mean_score = task_sum / static_cast<double>(eps.size());
        if (group_sums.size() >= 2) {
            std::vector<double> means;
            means.reserve(group_sums.size());
            for (const auto& [seed, g] : group_sums)
                means.push_back(g.first / static_cast<double>(g.second));
            t.std_dev = sample_std_dev(means);
        }
        macro_sum += t.mean_score;
        rep.per_task.push_back(std::move(t));
    }
    rep.macro = macro_sum / static_cast<double>(by_task.size());

    if (by_group.size() >= 2) {
        std::vector<double> micros;
        micros.reserve(by_group.size());
        for (const auto& [seed, scores] : by_group) {
            double sum = 0.0;
            for (double s : scores) sum += s;
            micros.push_back(sum / static_cast<double>(scores.size()));
        }
        rep.std_dev = sample_std_dev(micros);
    }

    rep.actions_emitted = emitted;
    rep.intercepted = intercepted;
    if (emitted > 0) {
        const double denom = static_cast<double>(emitted);
        rep.shares.valid = 100.0 * cat_counts[static_cast<std::size_t>(Category::valid)] / denom;
        rep.shares.invalid_syntax =
            100.0 * cat_counts[static_cast<std::size_t>(Category::invalid_syntax)] / denom;
        rep.shares.invalid_object =
            100.0 * cat_counts[static_cast<std::size_t>(Category::invalid_object)] / denom;
        rep.shares.affordance_violation =
            100.0 * cat_counts[static_cast<std::size_t>(Category::affordance_violation)] / denom;
        rep.shares.redundant =
            100.0 * cat_counts[static_cast<std::size_t>(Category::redundant)] / denom;
        rep.shares.other = 100.0 * cat_counts[static_cast<std::size_t>(Category::other)] / denom;
        rep.redundant_env_pct = 100.0 * static_cast<double>(redundant_env) / denom;
    }
    return rep;
}

double score_at_step(const EpisodeResult& ep, int step, Convention conv) {
    if (step <= 0) return 0.0;
    if (ep.outcome == Outcome::lost && step >= ep.env_steps)
        return static_cast<double>(ep.final_score(conv));
    int env = 0;
    int last = 0;
    for (const ActionRecord& rec : ep.records) {
        if (!rec.env_step_consumed) continue;
        ++env;
        if (env > step) break;
        last = rec.score_after;
    }
    return static_cast<double>(last);
}

std::vector<double> score_curve(const std::vector<EpisodeResult>& results,
                                const std::vector<int>& checkpoints, Convention conv) {
    std::vector<const EpisodeResult*> live;
    for (const auto& r : results)
        if (r.outcome != Outcome::aborted) live.push_back(&r);

    std::vector<double> curve;
    curve.reserve(checkpoints.size());
    for (int step : checkpoints) {
        if (live.empty()) {
            curve.push_back(0.0);
            continue;
        }
        double sum = 0.0;
        for (const EpisodeResult* e : live) sum += score_at_step(*e, step, conv);
        curve.push_back(sum / static_cast<double>(live.size()));
    }
    return curve;
}

std::optional<double> pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) return std::nullopt;
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

std::string render_report_text(const RunReport& report, const std::string& run_label,
                               std::optional<double> baseline) {
    std::string out;
    out += "run: " + run_label + "\n";
    out += "convention: " + convention_name(report.convention) + "\n";
    out += "episodes: " + std::to_string(report.episodes + report.aborted) + " (won " +
           std::to_string(report.won) + ", lost " + std::to_string(report.lost) +
           ", limit_reached " + std::to_string(report.limit_reached) + ", aborted " +
           std::to_string(report.aborted) + ")\n\n";

    const std::string std_cell = report.std_dev ? fixed(*report.std_dev, 2) : "n/a";
    const std::string improv_cell =
        (baseline && *baseline > 0.0) ? fixed(report.micro / *baseline, 2) + "x" : "n/a";

    out += pad_right("Train", 28) + pad_left("Score", 8) + pad_left("Std.Dev", 9) +
           pad_left("Improv.", 9) + pad_left("Won", 6) + pad_left("Lost", 6) +
           pad_left("Valid", 7) + pad_left("AVs", 7) + pad_left("IOs", 7) + pad_left("IS", 7) +
           pad_left("RAs", 7) + pad_left("Other", 7) + "\n";
    out += std::string(108, '-') + "\n";
    out += pad_right(run_label.substr(0, 28), 28) + pad_left(fixed(report.micro, 2), 8) +
           pad_left(std_cell, 9) + pad_left(improv_cell, 9) +
           pad_left(std::to_string(report.won), 6) + pad_left(std::to_string(report.lost), 6) +
           pad_left(fixed(report.shares.valid, 1), 7) +
           pad_left(fixed(report.shares.affordance_violation, 1), 7) +
           pad_left(fixed(report.shares.invalid_object, 1), 7) +
           pad_left(fixed(report.shares.invalid_syntax, 1), 7) +
           pad_left(fixed(report.shares.redundant, 1), 7) +
           pad_left(fixed(report.shares.other, 1), 7) + "\n\n";

    out += "micro score: " + fixed(report.micro, 2) + "\n";
    out += "macro score: " + fixed(report.macro, 2) + "\n";
    out += "mean env steps: " + fixed(report.mean_env_steps, 2) + "\n";
    out += "actions emitted: " + std::to_string(report.actions_emitted) + " (intercepted " +
           std::to_string(report.intercepted) + ")\n";
    out += "redundant reaching environment: " + fixed(report.redundant_env_pct, 2) + "%\n\n";

    out += "Per-task results\n";
    out += pad_right("task", 28) + pad_left("games", 6) + pad_left("mean", 8) +
           pad_left("std", 8) + pad_left("won", 6) + pad_left("lost", 6) + "\n";
    out += std::string(62, '-') + "\n";
    for (const TaskSummary& t : report.per_task) {
        out += pad_right(t.task_id, 28) + pad_left(std::to_string(t.games), 6) +
               pad_left(fixed(t.mean_score, 2), 8) +
               pad_left(t.std_dev ? fixed(*t.std_dev, 2) : "n/a", 8) +
               pad_left(std::to_string(t.won), 6) + pad_left(std::to_string(t.lost), 6) + "\n";
    }
    return out;
}

std::string render_report_json(const RunReport& report, const std::string& run_label,
                               std::optional<double> baseline,
                               const std::vector<int>& checkpoints,
                               const std::vector<double>& curve) {
    nlohmann::ordered_json j;
    j["run"] = run_label;
    j["convention"] = convention_name(report.convention);
    j["episodes"] = report.episodes + report.aborted;
    j["aborted"] = report.aborted;
    j["won"] = report.won;
    j["lost"] = report.lost;
    j["limit_reached"] = report.limit_reached;
    j["micro"] = report.micro;
    j["macro"] = report.macro;
    if (report.std_dev)
        j["std_dev"] = *report.std_dev;
    else
        j["std_dev"] = nullptr;
    if (baseline && *baseline > 0.0) {
        j["baseline"] = *baseline;
        j["improvement"] = report.micro / *baseline;
    } else {
        j["baseline"] = nullptr;
        j["improvement"] = nullptr;
    }
    j["categories"] = nlohmann::ordered_json{{"valid", report.shares.valid},
                                             {"affordance_violation",
                                              report.shares.affordance_violation},
                                             {"invalid_object", report.shares.invalid_object},
                                             {"invalid_syntax", report.shares.invalid_syntax},
                                             {"redundant", report.shares.redundant},
                                             {"other", report.shares.other}};
    j["redundant_env_pct"] = report.redundant_env_pct;
    j["actions_emitted"] = report.actions_emitted;
    j["intercepted"] = report.intercepted;
    j["mean_env_steps"] = report.mean_env_steps;
    nlohmann::ordered_json tasks = nlohmann::ordered_json::array();
    for (const TaskSummary& t : report.per_task) {
        nlohmann::ordered_json row;
        row["task"] = t.task_id;
        row["games"] = t.games;
        row["mean"] = t.mean_score;
        if (t.std_dev)
            row["std"] = *t.std_dev;
        else
            row["std"] = nullptr;
        row["won"] = t.won;
        row["lost"] = t.lost;
        tasks.push_back(std::move(row));
    }
    j["per_task"] = std::move(tasks);
    nlohmann::ordered_json curve_j = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < checkpoints.size() && i < curve.size(); ++i) {
        curve_j.push_back(nlohmann::ordered_json{{"step", checkpoints[i]}, {"mean", curve[i]}});
    }
    j["curve"] = std::move(curve_j);
    return j.dump(2) + "\n";
}

std::string render_curves_csv(const std::vector<int>& checkpoints,
                              const std::vector<double>& curve) {
    std::string out = "env_steps,mean_score\n";
    for (std::size_t i = 0; i < checkpoints.size() && i < curve.size(); ++i) {
        out += std::to_string(checkpoints[i]) + "," + fixed(curve[i], 6) + "\n";
    }
    return out;
}

EpisodeRecord to_episode_record(const EpisodeResult& ep, Convention conv) {
    EpisodeRecord rec;
    rec.variation_id = ep.variation_id;
    rec.seed = ep.episode_seed;
    rec.final_score = ep.final_score(conv);
    rec.outcome = outcome_name(ep.outcome);
    rec.turns.reserve(ep.records.size());
    for (const ActionRecord& r : ep.records) {
        EpisodeTurnRecord t;
        t.action = r.action;
        t.reply = r.reply;
        t.score = r.score_after;
        t.category = r.category;
        t.intercepted = r.intercepted;
        rec.turns.push_back(std::move(t));
    }
    return rec;
}

}  // namespace textlab
