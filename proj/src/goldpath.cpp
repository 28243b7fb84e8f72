#include "textlab/goldpath.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "textlab/rng.hpp"

namespace textlab {

ReplayOutcome replay_script(const TaskCatalog& catalog, const TaskVariation& var,
                            const std::vector<std::string>& actions) {
    World world = catalog.build_world(var);
    const TaskClassSpec* cls = catalog.find_class(var.task_id);
    if (!cls) throw std::runtime_error("unknown task class: " + var.task_id);
    MilestoneTracker tracker(*cls, var, world);

    ReplayOutcome out;
    out.transcript.description = var.description;

    for (const std::string& raw : actions) {
        ParseResult parsed = world.parse_action(raw);
        DialogTurn turn;
        turn.action = raw;
        if (parsed.kind != ParseResult::Kind::parsed) {
            out.all_executed = false;
            turn.reply = world.messages().get(parsed.kind == ParseResult::Kind::syntax_error
                                                  ? "invalid_syntax"
                                                  : "invalid_object");
            out.transcript.turns.push_back(std::move(turn));
            ++out.steps;
            continue;
        }
        auto [obs, outcome] = world.step(*parsed.action);
        ++out.steps;
        if (outcome != StepOutcome::executed) out.all_executed = false;
        tracker.update(world);
        turn.reply = obs.text;
        TurnAnnotation note;
        note.score_after = tracker.score();
        note.category = outcome == StepOutcome::executed       ? Category::valid
                        : outcome == StepOutcome::redundant    ? Category::redundant
                                                               : Category::affordance_violation;
        turn.note = note;
        out.transcript.turns.push_back(std::move(turn));
        if (tracker.finished()) break;
    }
    out.won = tracker.won();
    out.failed = tracker.failed();
    out.score = tracker.final_score(Convention::zero_on_fail);
    return out;
}

// ---------------------------------------------------------------------------
// planning
// ---------------------------------------------------------------------------

namespace {

// Live planning session: every scripted action is validated by actually
// stepping the simulation, so wait counts and door states are always real.
struct Session {
    World world;
    MilestoneTracker tracker;
    std::vector<std::string> actions;
    const TaskVariation* var;
    int variant;
    bool look_inserted = false;

    Session(const TaskCatalog& catalog, const TaskVariation& v, int variant_)
        : world(catalog.build_world(v)),
          tracker(*catalog.find_class(v.task_id), v, world),
          var(&v),
          variant(variant_) {}

    void emit(const std::string& action) {
        ParseResult parsed = world.parse_action(action);
        if (parsed.kind != ParseResult::Kind::parsed) {
            throw std::runtime_error("gold-path planner failed for " + var->id() +
                                     ": action does not parse: " + action);
        }
        auto [obs, outcome] = world.step(*parsed.action);
        (void)obs;
        if (outcome != StepOutcome::executed) {
            throw std::runtime_error("gold-path planner failed for " + var->id() +
                                     ": action not executed: " + action);
        }
        tracker.update(world);
        actions.push_back(action);
        if (tracker.failed()) {
            throw std::runtime_error("gold-path planner failed for " + var->id() +
                                     ": fail condition fired on: " + action);
        }
    }

    const Entity* find(const std::string& name) const {
        for (const Entity& e : world.state().entities) {
            if (e.name == name) return &e;
        }
        return nullptr;
    }

    // Opens the named thing if it is openable and currently closed.
    void ensure_open(const std::string& name) {
        const Entity* e = find(name);
        if (e && e->openable && !e->is_open.value_or(false)) emit("open " + name);
    }

    // Shortest door route to the goal room; opens closed doors on the way.
    // Emits the variant-2 extra look after the first room change.
    void route_to(const std::string& goal) {
        const WorldState& s = world.state();
        if (world.current_room_name() == goal) return;

        auto goal_id = s.find_room(goal);
        if (!goal_id) {
            throw std::runtime_error("gold-path planner failed for " + var->id() +
                                     ": no such room: " + goal);
        }
        // BFS over the static door graph.
        std::vector<int> parent(s.rooms.size(), -1);
        std::deque<RoomId> queue{s.agent_room};
        parent[s.agent_room.value] = static_cast<int>(s.agent_room.value);
        while (!queue.empty()) {
            RoomId cur = queue.front();
            queue.pop_front();
            for (const Door& d : s.doors) {
                RoomId next;
                if (d.a == cur) {
                    next = d.b;
                } else if (d.b == cur) {
                    next = d.a;
                } else {
                    continue;
                }
                if (parent[next.value] != -1) continue;
                parent[next.value] = static_cast<int>(cur.value);
                queue.push_back(next);
            }
        }
        if (parent[goal_id->value] == -1) {
            throw std::runtime_error("gold-path planner failed for " + var->id() +
                                     ": unreachable room: " + goal);
        }
        std::vector<RoomId> hops;
        for (RoomId r = *goal_id; r.value != s.agent_room.value;
             r = RoomId{static_cast<std::uint32_t>(parent[r.value])}) {
            hops.push_back(r);
        }
        std::reverse(hops.begin(), hops.end());

        for (RoomId hop : hops) {
            const std::string& name = world.state().room(hop).name;
            const Door* door = world.door_between(world.state().agent_room, name);
            if (door && !door->is_open) emit("open door to " + name);
            emit("go to " + name);
            if (variant == 2 && !look_inserted) {
                emit("look around");
                look_inserted = true;
            }
        }
    }

    void wait_until_won(int max_waits = 500) {
        for (int i = 0; i < max_waits; ++i) {
            if (tracker.won()) return;
            emit("wait");
        }
        if (!tracker.won()) {
            throw std::runtime_error("gold-path planner failed for " + var->id() +
                                     ": did not finish within wait budget");
        }
    }

    template <typename Pred>
    void wait_until(Pred pred, int max_waits = 500) {
        for (int i = 0; i < max_waits; ++i) {
            if (pred()) return;
            emit("wait");
        }
        throw std::runtime_error("gold-path planner failed for " + var->id() +
                                 ": condition not reached within wait budget");
    }
};

// Heat source for a substance task: high-melting-point metals need the forge;
// otherwise the stove, falling back to the oven when the stove is broken.
struct HeaterPlan {
    std::string name;
    std::string room;
};

HeaterPlan choose_heater(const TaskVariation& var, const TaskCatalog& catalog, bool melting) {
    const auto& params = var.params;
    if (melting) {
        double mp = catalog.substances().at(params.at("target")).melting_point;
        if (mp > 100.0) return {"forge", "workshop"};
    }
    bool stove_broken = params.count("stove") && params.at("stove") == "broken";
    return {stove_broken ? "oven" : "stove", "kitchen"};
}

}  // namespace

GoldPath GoldPathPlanner::plan_one(const TaskVariation& var, int variant) const {
    const TaskCatalog& cat = *catalog_;
    const TaskClassSpec* cls = cat.find_class(var.task_id);
    if (!cls) throw std::runtime_error("unknown task class: " + var.task_id);
    const auto& p = var.params;

    Session s(cat, var, variant);
    s.emit("look around");
    if (variant == 1) s.emit("inventory");

    // Tasks that never change rooms get the variant-2 look right after the
    // opener so the variant still differs from the base path.
    bool will_route = false;
    if (p.count("location")) {
        will_route = true;  // kitchen and possibly workshop
    } else if (p.count("room")) {
        will_route = p.at("room") != s.world.current_room_name();
    }
    if (variant == 2 && !will_route) {
        s.emit("look around");
        s.look_inserted = true;
    }

    if (var.task_id == "find-living-thing" || var.task_id == "find-non-living-thing") {
        s.route_to(p.at("room"));
        s.emit("focus on " + p.at("target"));
    } else if (var.task_id == "identify-longest-lived") {
        s.route_to(p.at("room"));
        s.emit("focus on " + p.at("longest"));
    } else if (var.task_id == "use-thermometer") {
        s.route_to("kitchen");
        s.ensure_open(p.at("location"));
        s.emit("focus on thermometer");
        s.emit("use thermometer on " + p.at("target"));
    } else if (var.task_id == "measure-boiling-point") {
        s.route_to("kitchen");
        s.ensure_open(p.at("location"));
        s.emit("focus on thermometer");
        s.emit("pick up " + p.at("target"));
        HeaterPlan heater = choose_heater(var, cat, false);
        s.ensure_open(heater.name);
        s.emit("put " + p.at("target") + " in " + heater.name);
        if (const Entity* h = s.find(heater.name); h && !h->activated) {
            s.emit("activate " + heater.name);
        }
        const std::string target = p.at("target");
        s.wait_until([&] {
            const Entity* t = s.find(target);
            return t && t->matter_state == MatterState::gas;
        });
        s.emit("use thermometer on " + target);
        s.emit("focus on " + p.at("correct_box"));
        if (!s.tracker.won()) {
            throw std::runtime_error("gold-path planner failed for " + var.id() +
                                     ": milestones incomplete after script");
        }
    } else {
        // The matter family: melt / boil / freeze / change-state-any.
        std::string mode = var.task_id;
        if (auto it = p.find("mode"); it != p.end()) mode = it->second;

        s.route_to("kitchen");
        s.ensure_open(p.at("location"));
        s.emit("focus on " + p.at("target"));
        s.emit("pick up " + p.at("target"));

        if (mode == "freeze") {
            s.ensure_open("freezer");
            s.emit("put " + p.at("target") + " in freezer");
        } else {
            HeaterPlan heater = choose_heater(var, cat, mode == "melt");
            if (heater.room != s.world.current_room_name()) s.route_to(heater.room);
            s.ensure_open(heater.name);
            s.emit("put " + p.at("target") + " in " + heater.name);
            if (const Entity* h = s.find(heater.name); h && !h->activated) {
                s.emit("activate " + heater.name);
            }
        }
        s.wait_until_won();
    }

    GoldPath path;
    path.variation_id = var.id();
    path.task_id = var.task_id;
    path.variant = variant;
    path.actions = s.actions;
    path.final_score = 100;

    ReplayOutcome check = replay_script(cat, var, path.actions);
    if (!check.won || check.score != 100 || !check.all_executed) {
        throw std::runtime_error("gold-path planner failed for " + var.id() +
                                 ": replay verification did not reach 100");
    }
    path.transcript = std::move(check.transcript);
    return path;
}

std::vector<GoldPath> GoldPathPlanner::plan(const TaskVariation& var, int max_paths) const {
    max_paths = std::clamp(max_paths, 1, 3);
    std::vector<GoldPath> out;
    for (int variant = 0; variant < max_paths; ++variant) {
        GoldPath path = plan_one(var, variant);
        for (const GoldPath& prev : out) {
            if (prev.actions == path.actions) {
                throw std::runtime_error("gold-path planner failed for " + var.id() +
                                         ": variants collided");
            }
        }
        out.push_back(std::move(path));
    }
    return out;
}

// ---------------------------------------------------------------------------
// train sets
// ---------------------------------------------------------------------------

TrainSets sample_trainsets(const std::vector<GoldPath>& train_paths, std::uint64_t master_seed) {
    TrainSets sets;
    sets.all_train = train_paths;

    // One path per variation, picked with a per-variation derived seed so the
    // choice is order-independent.
    std::map<std::string, std::vector<const GoldPath*>> by_variation;
    std::vector<std::string> variation_order;
    for (const GoldPath& g : train_paths) {
        if (!by_variation.count(g.variation_id)) variation_order.push_back(g.variation_id);
        by_variation[g.variation_id].push_back(&g);
    }
    for (const std::string& vid : variation_order) {
        const auto& cands = by_variation[vid];
        Rng rng(derive_seed(master_seed, "no-variations/" + vid));
        sets.no_variations.push_back(*cands[rng.index(cands.size())]);
    }

    // Cap of 18 per task; tasks under the cap contribute everything.
    std::map<std::string, std::vector<std::size_t>> by_task;  // indices into no_variations
    std::vector<std::string> task_order;
    for (std::size_t i = 0; i < sets.no_variations.size(); ++i) {
        const std::string& tid = sets.no_variations[i].task_id;
        if (!by_task.count(tid)) task_order.push_back(tid);
        by_task[tid].push_back(i);
    }
    std::vector<std::size_t> chosen;
    for (const std::string& tid : task_order) {
        auto idxs = by_task[tid];
        if (idxs.size() > 18) {
            Rng rng(derive_seed(master_seed, "up-to-18/" + tid));
            rng.shuffle(idxs);
            idxs.resize(18);
            std::sort(idxs.begin(), idxs.end());
        }
        chosen.insert(chosen.end(), idxs.begin(), idxs.end());
    }
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t i : chosen) sets.up_to_18.push_back(sets.no_variations[i]);
    return sets;
}

CorpusStats export_training_corpus(const std::vector<GoldPath>& set, const std::string& path,
                                   const PieceCounter& counter) {
    if (set.empty()) throw std::runtime_error("empty trainset");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);

    CorpusStats stats;
    stats.documents = static_cast<int>(set.size());
    long long total_actions = 0;
    long long total_pieces = 0;
    stats.min_pieces = 0;
    stats.max_pieces = 0;
    bool first = true;
    for (const GoldPath& g : set) {
        std::string text = render_transcript(g.transcript);
        int pieces = counter(text);
        total_actions += static_cast<long long>(g.actions.size());
        total_pieces += pieces;
        if (first || pieces < stats.min_pieces) stats.min_pieces = pieces;
        if (first || pieces > stats.max_pieces) stats.max_pieces = pieces;
        first = false;
        nlohmann::json j;
        j["variation"] = g.variation_id;
        j["text"] = text;
        out << j.dump() << "\n";
    }
    stats.mean_actions = static_cast<double>(total_actions) / static_cast<double>(set.size());
    stats.mean_pieces = static_cast<double>(total_pieces) / static_cast<double>(set.size());
    return stats;
}

}  // namespace textlab
