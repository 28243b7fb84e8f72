#include "textlab/task.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "textlab/rng.hpp"

namespace textlab {

std::string split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::dev: return "dev";
        case Split::test: return "test";
    }
    return "train";
}

std::optional<Split> split_from_name(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "dev") return Split::dev;
    if (s == "test") return Split::test;
    return std::nullopt;
}

std::string convention_name(Convention c) {
    return c == Convention::zero_on_fail ? "zero-on-fail" : "last-score-on-fail";
}

std::optional<Convention> convention_from_name(const std::string& s) {
    if (s == "zero-on-fail") return Convention::zero_on_fail;
    if (s == "last-score-on-fail") return Convention::last_score_on_fail;
    return std::nullopt;
}

Split assign_split(int variation_index) {
    if (variation_index % 2 == 0) return Split::train;
    if (variation_index % 4 == 1) return Split::dev;
    return Split::test;
}

SplitCounts expected_split_counts(int total) {
    SplitCounts c;
    c.dev = (total + 2) / 4;   // indices ≡ 1 (mod 4) below total
    c.test = total / 4;        // indices ≡ 3 (mod 4) below total
    c.train = total - c.dev - c.test;
    return c;
}

// ---------------------------------------------------------------------------
// loading
// ---------------------------------------------------------------------------

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("data file not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

TaskCategory category_from_string(const std::string& s) {
    if (s == "Matter") return TaskCategory::matter;
    if (s == "Measurement") return TaskCategory::measurement;
    if (s == "Classification") return TaskCategory::classification;
    if (s == "Biology") return TaskCategory::biology;
    throw std::runtime_error("unknown task category: " + s);
}

PredicateSpec load_predicate(const nlohmann::ordered_json& j) {
    PredicateSpec p;
    p.name = j.at("predicate").get<std::string>();
    if (j.contains("args")) {
        const auto& a = j["args"];
        if (a.contains("allowed")) p.allowed = a["allowed"].get<std::vector<std::string>>();
        if (a.contains("state")) p.state = a["state"].get<std::string>();
        if (a.contains("name")) p.entity_name = a["name"].get<std::string>();
        if (a.contains("alive")) p.alive = a["alive"].get<bool>();
    }
    return p;
}

MatterState matter_state_from_name(const std::string& s) {
    if (s == "solid") return MatterState::solid;
    if (s == "gas") return MatterState::gas;
    return MatterState::liquid;
}

}  // namespace

TaskCatalog TaskCatalog::load(const std::string& data_dir) {
    TaskCatalog cat;
    cat.messages_ = MessageCatalog::load(data_dir + "/messages.json");
    cat.world_json_ = slurp(data_dir + "/world_house.json");

    nlohmann::ordered_json j = nlohmann::ordered_json::parse(slurp(data_dir + "/tasks.json"));

    for (auto it = j.at("substances").begin(); it != j.at("substances").end(); ++it) {
        SubstanceInfo info;
        info.melting_point = it.value().at("melting_point").get<double>();
        info.boiling_point = it.value().at("boiling_point").get<double>();
        if (it.value().contains("spawn_temperature")) {
            info.spawn_temperature = it.value()["spawn_temperature"].get<double>();
        }
        cat.substances_[it.key()] = info;
    }

    for (auto it = j.at("locations").begin(); it != j.at("locations").end(); ++it) {
        cat.locations_[it.key()] = LocationSpec{it.value().at("room").get<std::string>(),
                                                it.value().at("holder").get<std::string>()};
    }

    for (auto it = j.at("lifespans").begin(); it != j.at("lifespans").end(); ++it) {
        cat.lifespans_[it.key()] = it.value().get<double>();
    }

    for (const auto& jc : j.at("classes")) {
        TaskClassSpec cls;
        cls.id = jc.at("id").get<std::string>();
        cls.category = category_from_string(jc.at("category").get<std::string>());
        cls.default_count = jc.at("count").get<int>();
        cls.description_template = jc.at("description").get<std::string>();

        for (auto pit = jc.at("params").begin(); pit != jc.at("params").end(); ++pit) {
            if (pit.value().is_object()) {
                cls.combo_param = pit.key();
                cls.combo_pool = pit.value().at("combinations_of").get<std::vector<std::string>>();
                cls.combo_choose = pit.value().at("choose").get<int>();
            } else {
                cls.params.emplace_back(pit.key(), pit.value().get<std::vector<std::string>>());
            }
        }
        if (jc.contains("holdout")) {
            cls.holdout_param = jc["holdout"].at("param").get<std::string>();
            cls.holdout_values = jc["holdout"].at("values").get<std::vector<std::string>>();
        }
        int total_points = 0;
        for (const auto& jm : jc.at("milestones")) {
            MilestoneSpec m;
            m.predicate = load_predicate(jm);
            m.points = jm.at("points").get<int>();
            m.label = jm.at("label").get<std::string>();
            total_points += m.points;
            cls.milestones.push_back(std::move(m));
        }
        if (total_points != 100) {
            throw std::runtime_error("milestone points for " + cls.id + " sum to " +
                                     std::to_string(total_points) + ", expected 100");
        }
        for (const auto& jf : jc.at("fails")) cls.fails.push_back(load_predicate(jf));
        cat.classes_.push_back(std::move(cls));
    }
    return cat;
}

const TaskClassSpec* TaskCatalog::find_class(const std::string& id) const {
    for (const TaskClassSpec& c : classes_) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

double TaskCatalog::lifespan(const std::string& animal) const {
    auto it = lifespans_.find(animal);
    if (it == lifespans_.end()) throw std::runtime_error("unknown animal: " + animal);
    return it->second;
}

// ---------------------------------------------------------------------------
// enumeration
// ---------------------------------------------------------------------------

namespace {

using ParamTuple = std::map<std::string, std::string>;

// One grid axis: a set of slot names and the value rows that fill them.
struct Axis {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> rows;
};

void cartesian(const std::vector<Axis>& axes, std::size_t i, ParamTuple& acc,
               std::vector<ParamTuple>& out) {
    if (i == axes.size()) {
        out.push_back(acc);
        return;
    }
    for (const auto& row : axes[i].rows) {
        for (std::size_t k = 0; k < axes[i].names.size(); ++k) acc[axes[i].names[k]] = row[k];
        cartesian(axes, i + 1, acc, out);
    }
    for (const auto& name : axes[i].names) acc.erase(name);
}

// n-choose-k index combinations in lexicographic order.
void combinations(int n, int k, std::vector<std::vector<int>>& out) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (;;) {
        out.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int jj = i + 1; jj < k; ++jj) {
            idx[static_cast<std::size_t>(jj)] = idx[static_cast<std::size_t>(jj - 1)] + 1;
        }
    }
}

}  // namespace

std::vector<TaskVariation> TaskCatalog::enumerate_variations(const TaskClassSpec& cls, int count,
                                                             std::uint64_t master_seed) const {
    // Build the grid axes in declared order; the combo axis expands into
    // lettered slots (a, b, c, ...).
    std::vector<Axis> axes;
    if (!cls.combo_param.empty()) {
        Axis ax;
        for (int i = 0; i < cls.combo_choose; ++i) {
            ax.names.push_back(std::string(1, static_cast<char>('a' + i)));
        }
        std::vector<std::vector<int>> combos;
        combinations(static_cast<int>(cls.combo_pool.size()), cls.combo_choose, combos);
        for (const auto& combo : combos) {
            std::vector<std::string> row;
            for (int ix : combo) row.push_back(cls.combo_pool[static_cast<std::size_t>(ix)]);
            ax.rows.push_back(std::move(row));
        }
        axes.push_back(std::move(ax));
    }
    for (const auto& [name, values] : cls.params) {
        Axis ax;
        ax.names.push_back(name);
        for (const auto& v : values) ax.rows.push_back({v});
        axes.push_back(std::move(ax));
    }

    std::vector<ParamTuple> tuples;
    ParamTuple acc;
    cartesian(axes, 0, acc, tuples);
    if (count > static_cast<int>(tuples.size())) {
        throw std::runtime_error("insufficient parameter space for " + cls.id + ": requested " +
                                 std::to_string(count) + " of " + std::to_string(tuples.size()));
    }

    auto is_heldout = [&](const ParamTuple& t) {
        if (cls.holdout_param.empty()) return false;
        const auto it = t.find(cls.holdout_param);
        if (it == t.end()) return false;
        return std::find(cls.holdout_values.begin(), cls.holdout_values.end(), it->second) !=
               cls.holdout_values.end();
    };

    // Group key drives the round-robin that spreads targets across splits.
    std::string group_param = cls.holdout_param;
    if (group_param.empty()) {
        group_param = cls.combo_param.empty() ? cls.params.front().first : "a";
    }

    std::vector<ParamTuple> heldout;
    std::vector<std::string> group_order;
    std::map<std::string, std::vector<ParamTuple>> groups;
    for (const auto& t : tuples) {
        if (is_heldout(t)) {
            heldout.push_back(t);
            continue;
        }
        const std::string& key = t.at(group_param);
        if (!groups.count(key)) group_order.push_back(key);
        groups[key].push_back(t);
    }

    Rng rng(derive_seed(master_seed, cls.id + "/enumerate"));
    rng.shuffle(heldout);
    for (const auto& key : group_order) rng.shuffle(groups[key]);

    // Round-robin across groups in first-seen order.
    std::vector<ParamTuple> regular;
    for (std::size_t round = 0;; ++round) {
        bool any = false;
        for (const auto& key : group_order) {
            const auto& g = groups[key];
            if (round < g.size()) {
                regular.push_back(g[round]);
                any = true;
            }
        }
        if (!any) break;
    }

    std::vector<int> test_positions;
    for (int i = 3; i < count; i += 4) test_positions.push_back(i);

    std::size_t n_heldout = std::min(heldout.size(), test_positions.size());
    if (count - static_cast<int>(n_heldout) > static_cast<int>(regular.size())) {
        throw std::runtime_error("insufficient parameter space for " + cls.id +
                                 ": not enough non-held-out tuples");
    }

    std::vector<std::optional<ParamTuple>> slots(static_cast<std::size_t>(count));
    for (std::size_t h = 0; h < n_heldout; ++h) {
        slots[static_cast<std::size_t>(test_positions[h])] = heldout[h];
    }
    std::size_t next_regular = 0;
    for (auto& slot : slots) {
        if (!slot) slot = regular[next_regular++];
    }

    std::vector<TaskVariation> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        TaskVariation var;
        var.task_id = cls.id;
        var.index = i;
        var.seed = derive_seed(master_seed, cls.id + "/" + std::to_string(i));
        var.split = assign_split(i);
        var.params = *slots[static_cast<std::size_t>(i)];

        // Derived slots.
        if (auto it = var.params.find("mode_target"); it != var.params.end()) {
            std::size_t colon = it->second.find(':');
            var.params["mode"] = it->second.substr(0, colon);
            var.params["target"] = it->second.substr(colon + 1);
        }
        if (var.params.count("threshold")) {
            const std::string& target = var.params.at("target");
            double bp = substances_.at(target).boiling_point;
            double threshold = std::stod(var.params.at("threshold"));
            var.params["correct_box"] = bp > threshold ? "blue box" : "orange box";
        }
        if (var.params.count("a")) {
            std::string longest = var.params.at("a");
            for (const char* slot : {"b", "c"}) {
                if (var.params.count(slot) &&
                    lifespan(var.params.at(slot)) > lifespan(longest)) {
                    longest = var.params.at(slot);
                }
            }
            var.params["longest"] = longest;
        }

        var.description = substitute_placeholders(cls.description_template, var.params);
        out.push_back(std::move(var));
    }
    return out;
}

std::vector<TaskVariation> TaskCatalog::enumerate_all(std::uint64_t master_seed) const {
    std::vector<TaskVariation> out;
    for (const TaskClassSpec& cls : classes_) {
        auto vars = enumerate_variations(cls, cls.default_count, master_seed);
        out.insert(out.end(), vars.begin(), vars.end());
    }
    return out;
}

std::optional<TaskVariation> TaskCatalog::find_variation(const std::string& variation_id,
                                                         std::uint64_t master_seed) const {
    std::size_t slash = variation_id.rfind('/');
    if (slash == std::string::npos) return std::nullopt;
    const TaskClassSpec* cls = find_class(variation_id.substr(0, slash));
    if (!cls) return std::nullopt;
    int index;
    try {
        index = std::stoi(variation_id.substr(slash + 1));
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (index < 0 || index >= cls->default_count) return std::nullopt;
    auto vars = enumerate_variations(*cls, cls->default_count, master_seed);
    return vars[static_cast<std::size_t>(index)];
}

// ---------------------------------------------------------------------------
// world building
// ---------------------------------------------------------------------------

namespace {

std::optional<EntityId> find_entity_by_name(const WorldState& state, const std::string& name) {
    for (const Entity& e : state.entities) {
        if (e.name == name) return e.id;
    }
    return std::nullopt;
}

void move_into_holder(WorldState& state, EntityId what, EntityId holder) {
    detach_entity(state, what);
    state.entity(holder).contents.push_back(what);
}

void move_into_room(WorldState& state, EntityId what, RoomId room) {
    detach_entity(state, what);
    state.room(room).entities.push_back(what);
}

EntityId create_substance(WorldState& state, const std::string& name, const SubstanceInfo& info) {
    Entity e;
    e.id = EntityId{static_cast<std::uint32_t>(state.entities.size())};
    e.name = name;
    e.kind = EntityKind::substance;
    e.portable = true;
    e.melting_point = info.melting_point;
    e.boiling_point = info.boiling_point;
    e.article = "a";
    state.entities.push_back(std::move(e));
    return state.entities.back().id;
}

EntityId create_creature(WorldState& state, const std::string& name) {
    Entity e;
    e.id = EntityId{static_cast<std::uint32_t>(state.entities.size())};
    e.name = name;
    e.kind = EntityKind::creature;
    e.alive = true;
    e.article = (name.front() == 'a' || name.front() == 'e' || name.front() == 'i' ||
                 name.front() == 'o' || name.front() == 'u')
                    ? "an"
                    : "a";
    state.entities.push_back(std::move(e));
    return state.entities.back().id;
}

void set_matter_state(Entity& e) {
    if (!e.melting_point || !e.boiling_point) return;
    if (e.temperature < *e.melting_point) {
        e.matter_state = MatterState::solid;
    } else if (e.temperature > *e.boiling_point) {
        e.matter_state = MatterState::gas;
    } else {
        e.matter_state = MatterState::liquid;
    }
}

}  // namespace

World TaskCatalog::build_world(const TaskVariation& var) const {
    WorldState state = load_world_json(world_json_, substances_);
    const TaskClassSpec* cls = find_class(var.task_id);
    if (!cls) throw std::runtime_error("unknown task class: " + var.task_id);

    const auto& p = var.params;

    if (p.count("target") && p.count("location")) {
        // Substance task: plant the target at the named kitchen spot.
        const std::string& target = p.at("target");
        auto lit = locations_.find(p.at("location"));
        if (lit == locations_.end()) {
            throw std::runtime_error("unknown location: " + p.at("location"));
        }
        auto holder = find_entity_by_name(state, lit->second.holder);
        if (!holder) throw std::runtime_error("location holder missing: " + lit->second.holder);

        auto sit = substances_.find(target);
        if (sit == substances_.end()) throw std::runtime_error("unknown substance: " + target);

        auto existing = find_entity_by_name(state, target);
        EntityId tid = existing ? *existing : create_substance(state, target, sit->second);
        move_into_holder(state, tid, *holder);

        Entity& te = state.entity(tid);
        double temp = 10.0;
        if (lit->second.holder == "freezer") temp = -10.0;
        if (lit->second.holder == "fridge") temp = 2.0;
        if (sit->second.spawn_temperature) temp = *sit->second.spawn_temperature;
        bool melt_mode = p.count("mode") ? p.at("mode") == "melt" : var.task_id == "melt";
        if (melt_mode && sit->second.melting_point - 5.0 < temp) {
            temp = sit->second.melting_point - 5.0;
        }
        te.temperature = temp;
        set_matter_state(te);
    }

    if (p.count("stove") && p.at("stove") == "broken") {
        if (auto stove = find_entity_by_name(state, "stove")) {
            state.entity(*stove).broken = true;
        }
    }

    if (p.count("room")) {
        auto room = state.find_room(p.at("room"));
        if (!room) throw std::runtime_error("unknown room: " + p.at("room"));
        if (p.count("target") && !p.count("location")) {
            auto tid = find_entity_by_name(state, p.at("target"));
            if (!tid) throw std::runtime_error("find-task target missing: " + p.at("target"));
            move_into_room(state, *tid, *room);
        }
        if (p.count("a")) {
            for (const char* slot : {"a", "b", "c"}) {
                if (!p.count(slot)) continue;
                const std::string& animal = p.at(slot);
                auto existing = find_entity_by_name(state, animal);
                EntityId aid = existing ? *existing : create_creature(state, animal);
                move_into_room(state, aid, *room);
            }
        }
    }

    return World(std::move(state), &messages_);
}

// ---------------------------------------------------------------------------
// milestone tracking
// ---------------------------------------------------------------------------

MilestoneTracker::MilestoneTracker(const TaskClassSpec& cls, const TaskVariation& var,
                                   const World& world)
    : cls_(&cls), var_(&var), earned_(cls.milestones.size(), false) {
    if (auto target = find_target(world)) {
        initial_state_ = world.state().entity(*target).matter_state;
    }
}

std::optional<EntityId> MilestoneTracker::find_target(const World& world) const {
    auto it = var_->params.find("target");
    if (it == var_->params.end()) return std::nullopt;
    return find_entity_by_name(world.state(), it->second);
}

namespace {

// Innermost-to-outermost holders of an entity.
std::vector<EntityId> holder_chain(const WorldState& state, EntityId id) {
    std::vector<EntityId> chain;
    auto h = state.holder_of(id);
    while (h) {
        chain.push_back(*h);
        h = state.holder_of(*h);
    }
    return chain;
}

std::string resolve_slot(const std::string& text,
                         const std::map<std::string, std::string>& params) {
    return substitute_placeholders(text, params);
}

}  // namespace

bool MilestoneTracker::eval_milestone(const PredicateSpec& p, const World& world) const {
    const WorldState& s = world.state();
    auto target = find_target(world);

    auto focused_name = [&]() -> std::optional<std::string> {
        if (!s.focused) return std::nullopt;
        return s.entity(*s.focused).name;
    };

    if (p.name == "focus_target") {
        return target && s.focused && *s.focused == *target;
    }
    if (p.name == "focus_entity") {
        auto fn = focused_name();
        return fn && *fn == resolve_slot(p.entity_name, var_->params);
    }
    if (p.name == "focus_alive") {
        return s.focused && s.entity(*s.focused).alive == p.alive;
    }
    if (p.name == "target_in_heater" || p.name == "heater_active" ||
        p.name == "target_in_active_cooler" || p.name == "target_in_active_device") {
        if (!target) return false;
        for (EntityId h : holder_chain(s, *target)) {
            const Entity& e = s.entity(h);
            if (!e.heat_output || *e.heat_output == 0.0) continue;
            if (p.name == "target_in_heater") {
                if (*e.heat_output > 0) return true;
            } else if (p.name == "heater_active") {
                if (*e.heat_output > 0 && e.activated && !e.broken) return true;
            } else if (p.name == "target_in_active_cooler") {
                if (*e.heat_output < 0 && e.activated && !e.broken) return true;
            } else {
                if (e.activated && !e.broken) return true;
            }
        }
        return false;
    }
    if (p.name == "target_state") {
        if (!target) return false;
        return s.entity(*target).matter_state == matter_state_from_name(p.state);
    }
    if (p.name == "target_state_changed") {
        if (!target || !initial_state_) return false;
        return s.entity(*target).matter_state != *initial_state_;
    }
    if (p.name == "measured_target") {
        return target && world.last_event().measured && *world.last_event().measured == *target;
    }
    if (p.name == "measured_target_in_state") {
        if (!target || !world.last_event().measured || *world.last_event().measured != *target) {
            return false;
        }
        return s.entity(*target).matter_state == matter_state_from_name(p.state);
    }
    throw std::runtime_error("unknown milestone predicate: " + p.name);
}

bool MilestoneTracker::eval_fail(const PredicateSpec& p, const World& world) const {
    const StepEvent& ev = world.last_event();
    if (!ev.focused_changed || !ev.primary) return false;
    const Entity& e = world.state().entity(*ev.primary);

    if (p.name == "focus_not_allowed") {
        for (const std::string& a : p.allowed) {
            if (e.name == resolve_slot(a, var_->params)) return false;
        }
        return true;
    }
    if (p.name == "focus_not_alive_match") {
        return e.alive != p.alive;
    }
    throw std::runtime_error("unknown fail predicate: " + p.name);
}

void MilestoneTracker::update(const World& world) {
    if (failed_) return;
    for (const PredicateSpec& f : cls_->fails) {
        if (eval_fail(f, world)) {
            failed_ = true;
            return;  // the failing step earns nothing
        }
    }
    for (std::size_t i = 0; i < cls_->milestones.size(); ++i) {
        if (earned_[i]) continue;
        if (eval_milestone(cls_->milestones[i].predicate, world)) {
            earned_[i] = true;
            score_ += cls_->milestones[i].points;
        }
    }
}

int MilestoneTracker::final_score(Convention conv) const {
    if (failed_ && conv == Convention::zero_on_fail) return 0;
    return score_;
}

}  // namespace textlab
