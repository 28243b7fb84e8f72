#include "textlab/world.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace textlab {

// ---------------------------------------------------------------------------
// text normalization
// ---------------------------------------------------------------------------

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string squeeze_spaces(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true;  // also trims leading space
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(c);
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::string strip_article(std::string_view s) {
    for (std::string_view art : {"a ", "an ", "the "}) {
        if (s.size() > art.size() && s.substr(0, art.size()) == art) {
            return std::string(s.substr(art.size()));
        }
    }
    return std::string(s);
}

namespace {

// "door to (the) kitchen" -> "kitchen"
std::optional<std::string> door_target_of_phrase(const std::string& phrase) {
    constexpr std::string_view kPrefix = "door to ";
    if (phrase.size() <= kPrefix.size() || phrase.compare(0, kPrefix.size(), kPrefix) != 0) {
        return std::nullopt;
    }
    return strip_article(phrase.substr(kPrefix.size()));
}

constexpr std::string_view kInventorySuffix = " in inventory";

}  // namespace

// ---------------------------------------------------------------------------
// WorldState lookups
// ---------------------------------------------------------------------------

std::optional<RoomId> WorldState::find_room(std::string_view name) const {
    for (const Room& r : rooms) {
        if (r.name == name) return r.id;
    }
    return std::nullopt;
}

std::optional<EntityId> WorldState::holder_of(EntityId id) const {
    for (const Entity& e : entities) {
        for (EntityId c : e.contents) {
            if (c == id) return e.id;
        }
    }
    return std::nullopt;
}

std::optional<RoomId> WorldState::room_of(EntityId id) const {
    EntityId cur = id;
    for (;;) {
        for (const Room& r : rooms) {
            for (EntityId e : r.entities) {
                if (e == cur) return r.id;
            }
        }
        auto holder = holder_of(cur);
        if (!holder) return std::nullopt;  // inventory (or detached)
        cur = *holder;
    }
}

bool WorldState::in_inventory(EntityId id) const {
    EntityId cur = id;
    for (;;) {
        for (EntityId e : inventory) {
            if (e == cur) return true;
        }
        auto holder = holder_of(cur);
        if (!holder) return false;
        cur = *holder;
    }
}

// ---------------------------------------------------------------------------
// construction / loading
// ---------------------------------------------------------------------------

World::World(WorldState state, const MessageCatalog* catalog)
    : state_(std::move(state)), catalog_(catalog) {}

namespace {

EntityKind kind_from_string(const std::string& s) {
    if (s == "device") return EntityKind::device;
    if (s == "container") return EntityKind::container;
    if (s == "substance") return EntityKind::substance;
    if (s == "creature") return EntityKind::creature;
    if (s == "plant") return EntityKind::plant;
    if (s == "furniture") return EntityKind::furniture;
    if (s == "portal") return EntityKind::portal;
    throw std::runtime_error("unknown entity kind: " + s);
}

std::string default_article(const std::string& name) {
    if (!name.empty()) {
        char c = name.front();
        if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return "an";
    }
    return "a";
}

void sweep_matter_state(Entity& e) {
    if (e.kind != EntityKind::substance || !e.melting_point || !e.boiling_point) return;
    if (e.temperature < *e.melting_point) {
        e.matter_state = MatterState::solid;
    } else if (e.temperature > *e.boiling_point) {
        e.matter_state = MatterState::gas;
    } else {
        e.matter_state = MatterState::liquid;
    }
}

EntityId load_entity(const nlohmann::json& j, WorldState& state,
                     const std::map<std::string, SubstanceInfo>& substances) {
    Entity e;
    e.id = EntityId{static_cast<std::uint32_t>(state.entities.size())};
    state.entities.push_back(e);  // reserve the slot so children get later ids

    Entity& self = state.entities[e.id.value];
    self.id = e.id;
    self.name = j.at("name").get<std::string>();
    self.kind = kind_from_string(j.value("kind", std::string("furniture")));
    self.portable = j.value("portable", false);
    self.alive = j.value("alive", false);
    self.openable = j.value("openable", false);
    if (self.openable) self.is_open = j.value("open", false);
    self.temperature = j.value("temperature", 10.0);
    self.activated = j.value("activated", false);
    if (j.contains("heat_output")) self.heat_output = j["heat_output"].get<double>();
    if (j.contains("text")) self.text = j["text"].get<std::string>();
    self.measures_temperature = j.value("measures_temperature", false);
    self.article = j.value("article", default_article(self.name));
    self.prep = j.value("prep", std::string("in"));
    self.has_surface = j.contains("contents");

    std::string style = j.value("power_style", std::string("hidden"));
    self.power_style = style == "switch"       ? PowerStyle::switch_style
                       : style == "activation" ? PowerStyle::activation
                                               : PowerStyle::hidden;

    if (self.kind == EntityKind::substance) {
        auto it = substances.find(self.name);
        if (it != substances.end()) {
            self.melting_point = it->second.melting_point;
            self.boiling_point = it->second.boiling_point;
        }
        sweep_matter_state(self);
    }

    if (j.contains("contents")) {
        for (const auto& child : j["contents"]) {
            EntityId cid = load_entity(child, state, substances);
            state.entities[e.id.value].contents.push_back(cid);
        }
    }
    return e.id;
}

}  // namespace

WorldState load_world_json(const std::string& json_text,
                           const std::map<std::string, SubstanceInfo>& substances) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    WorldState state;

    for (const auto& jr : j.at("rooms")) {
        Room room;
        room.id = RoomId{static_cast<std::uint32_t>(state.rooms.size())};
        room.name = jr.at("name").get<std::string>();
        state.rooms.push_back(room);
        for (const auto& je : jr.at("entities")) {
            EntityId id = load_entity(je, state, substances);
            state.rooms.back().entities.push_back(id);
        }
    }

    for (const auto& jd : j.at("doors")) {
        std::string a = jd.at(0).get<std::string>();
        std::string b = jd.at(1).get<std::string>();
        auto ra = state.find_room(a);
        auto rb = state.find_room(b);
        if (!ra || !rb) throw std::runtime_error("door references unknown room");
        bool open = jd.size() > 2 && jd.at(2).get<bool>();
        state.doors.push_back(Door{*ra, *rb, open});
    }

    std::string agent = j.value("agent_room", std::string("hallway"));
    auto ar = state.find_room(agent);
    if (!ar) throw std::runtime_error("agent_room not found: " + agent);
    state.agent_room = *ar;
    return state;
}

// ---------------------------------------------------------------------------
// visibility
// ---------------------------------------------------------------------------

namespace {

bool contents_visible(const Entity& e) {
    // Closed openables hide their contents; everything else that can hold
    // things shows them (bowls, surfaces, device tops).
    if (e.openable) return e.is_open.value_or(false);
    return true;
}

}  // namespace

std::vector<EntityId> World::inventory_view() const {
    std::vector<EntityId> out;
    std::vector<EntityId> queue = state_.inventory;
    while (!queue.empty()) {
        EntityId id = queue.front();
        queue.erase(queue.begin());
        out.push_back(id);
        const Entity& e = state_.entity(id);
        if (contents_visible(e)) {
            for (EntityId c : e.contents) queue.push_back(c);
        }
    }
    return out;
}

std::vector<EntityId> World::visible_entities() const {
    std::vector<EntityId> out = inventory_view();
    std::vector<EntityId> queue = state_.room(state_.agent_room).entities;
    while (!queue.empty()) {
        EntityId id = queue.front();
        queue.erase(queue.begin());
        out.push_back(id);
        const Entity& e = state_.entity(id);
        if (contents_visible(e)) {
            for (EntityId c : e.contents) queue.push_back(c);
        }
    }
    return out;
}

const Door* World::door_between(RoomId from, std::string_view target_room) const {
    for (const Door& d : state_.doors) {
        RoomId other;
        if (d.a == from) {
            other = d.b;
        } else if (d.b == from) {
            other = d.a;
        } else {
            continue;
        }
        if (state_.room(other).name == target_room) return &d;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

double World::ambient_temperature() const {
    for (EntityId id : state_.room(state_.agent_room).entities) {
        const Entity& e = state_.entity(id);
        if (e.name == "air") return e.temperature;
    }
    return 10.0;
}

std::string World::render_contents(const Entity& e) const {
    if (e.contents.empty()) return catalog_->get("contents_empty");
    std::string out;
    for (std::size_t i = 0; i < e.contents.size(); ++i) {
        if (i) out += ", ";
        out += render_entity_short(state_.entity(e.contents[i]));
    }
    return out;
}

std::string World::render_entity_short(const Entity& e) const {
    if (e.kind == EntityKind::substance) {
        return catalog_->format("substance_item", {{"name", e.name}});
    }
    std::string base = catalog_->format("generic_item", {{"article", e.article}, {"name", e.name}});
    if (e.kind == EntityKind::container && !e.openable) {
        base += catalog_->format("container_inline", {{"contents", render_contents(e)}});
    }
    return base;
}

std::string World::render_entity_long(const Entity& e) const {
    if (e.kind == EntityKind::substance) {
        return catalog_->format("substance_item", {{"name", e.name}});
    }
    if (e.measures_temperature) {
        return catalog_->format("thermometer_item",
                                {{"article", e.article},
                                 {"name", e.name},
                                 {"t", format_degrees(ambient_temperature())}});
    }

    std::string out = catalog_->format("generic_item", {{"article", e.article}, {"name", e.name}});

    if (e.kind == EntityKind::device) {
        if (e.power_style == PowerStyle::switch_style) {
            out += catalog_->get(e.activated ? "device_switch_on" : "device_switch_off");
        } else if (e.power_style == PowerStyle::activation) {
            out += catalog_->get(e.activated ? "device_activated" : "device_deactivated");
        }
    }

    if (e.openable) {
        if (e.is_open.value_or(false)) {
            out += catalog_->format("openable_open", {{"name", e.name}});
            out += catalog_->format(e.prep == "on" ? "holds_on" : "holds_in",
                                    {{"name", e.name}, {"contents", render_contents(e)}});
        } else {
            out += catalog_->format("openable_closed", {{"name", e.name}});
        }
        return out;
    }

    if (e.kind == EntityKind::container) {
        out += catalog_->format("container_inline", {{"contents", render_contents(e)}});
        return out;
    }

    if (e.has_surface) {
        out += catalog_->format(e.prep == "on" ? "holds_on" : "holds_in",
                                {{"name", e.name}, {"contents", render_contents(e)}});
    }
    return out;
}

Observation World::render_room(const Room& room) const {
    std::string out = catalog_->format("room_header", {{"room", room.name}});

    std::vector<EntityId> sorted = room.entities;
    std::sort(sorted.begin(), sorted.end(), [&](EntityId a, EntityId b) {
        const Entity& ea = state_.entity(a);
        const Entity& eb = state_.entity(b);
        if (ea.name != eb.name) return ea.name < eb.name;
        return a < b;
    });

    out += catalog_->get("agent_item");
    for (EntityId id : sorted) {
        out += "; ";
        out += render_entity_long(state_.entity(id));
    }

    struct DoorView {
        std::string target;
        bool open;
    };
    std::vector<DoorView> views;
    for (const Door& d : state_.doors) {
        if (d.a == room.id) {
            views.push_back({state_.room(d.b).name, d.is_open});
        } else if (d.b == room.id) {
            views.push_back({state_.room(d.a).name, d.is_open});
        }
    }
    std::sort(views.begin(), views.end(),
              [](const DoorView& a, const DoorView& b) { return a.target < b.target; });

    if (views.empty()) {
        out += ".";
        return {out};
    }
    out += catalog_->get("doors_header");
    for (std::size_t i = 0; i < views.size(); ++i) {
        if (i) out += "; ";
        out += catalog_->format(views[i].open ? "door_item_open" : "door_item_closed",
                                {{"room", views[i].target}});
    }
    return {out};
}

Observation World::render_look() const { return render_room(state_.room(state_.agent_room)); }

Observation World::render_inventory() const {
    std::string out = catalog_->get("inventory_header");
    if (state_.inventory.empty()) {
        out += catalog_->get("contents_empty");
        return {out};
    }
    for (std::size_t i = 0; i < state_.inventory.size(); ++i) {
        if (i) out += ", ";
        out += render_entity_short(state_.entity(state_.inventory[i]));
    }
    return {out};
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

std::optional<ObjectRef> World::resolve_phrase(const std::string& raw_phrase, bool door_ok,
                                               bool room_name_ok) const {
    std::string phrase = strip_article(squeeze_spaces(lowercase(raw_phrase)));
    bool from_inventory = false;
    if (phrase.size() > kInventorySuffix.size() &&
        phrase.compare(phrase.size() - kInventorySuffix.size(), kInventorySuffix.size(),
                       kInventorySuffix) == 0) {
        from_inventory = true;
        phrase = squeeze_spaces(phrase.substr(0, phrase.size() - kInventorySuffix.size()));
    }
    if (phrase.empty()) return std::nullopt;

    if (door_ok) {
        if (auto target = door_target_of_phrase(phrase)) {
            if (const Door* d = door_between(state_.agent_room, *target)) {
                RoomId other = d->a == state_.agent_room ? d->b : d->a;
                ObjectRef ref;
                ref.target = DoorRef{state_.agent_room, other};
                ref.phrase = phrase;
                return ref;
            }
            return std::nullopt;
        }
        if (room_name_ok) {
            if (const Door* d = door_between(state_.agent_room, phrase)) {
                RoomId other = d->a == state_.agent_room ? d->b : d->a;
                ObjectRef ref;
                ref.target = DoorRef{state_.agent_room, other};
                ref.phrase = phrase;
                return ref;
            }
        }
    }

    // Tier 0: inventory, tier 1: room. Lowest (tier, id) wins.
    std::optional<EntityId> best;
    int best_tier = 2;
    auto consider = [&](EntityId id, int tier) {
        const Entity& e = state_.entity(id);
        if (lowercase(e.name) != phrase) return;
        if (tier < best_tier || (tier == best_tier && (!best || id < *best))) {
            best = id;
            best_tier = tier;
        }
    };
    for (EntityId id : inventory_view()) consider(id, 0);
    if (!from_inventory) {
        // room tier: everything visible minus the inventory prefix
        std::vector<EntityId> inv = inventory_view();
        for (EntityId id : visible_entities()) {
            if (std::find(inv.begin(), inv.end(), id) == inv.end()) consider(id, 1);
        }
    }
    if (!best) return std::nullopt;

    ObjectRef ref;
    ref.target = *best;
    ref.from_inventory = from_inventory;
    ref.phrase = phrase;
    return ref;
}

namespace {

struct VerbRule {
    std::string_view surface;
    Verb verb;
    int arity;                  // 0, 1 or 2
    std::string_view separator; // for arity 2
    bool door_ok = false;
    bool room_name_ok = false;
};

// Longer surfaces first where one is a prefix of another.
constexpr VerbRule kGrammar[] = {
    {"look around", Verb::look_around, 0, "", false, false},
    {"inventory", Verb::inventory, 0, "", false, false},
    {"wait", Verb::wait, 0, "", false, false},
    {"go to", Verb::go_to, 1, "", true, true},
    {"pick up", Verb::pick_up, 1, "", false, false},
    {"focus on", Verb::focus_on, 1, "", false, false},
    {"open", Verb::open_thing, 1, "", true, false},
    {"close", Verb::close_thing, 1, "", true, false},
    {"activate", Verb::activate, 1, "", false, false},
    {"deactivate", Verb::deactivate, 1, "", false, false},
    {"read", Verb::read, 1, "", false, false},
    {"mix", Verb::mix, 1, "", false, false},
    {"put", Verb::put_in, 2, " in ", false, false},
    {"use", Verb::use_on, 2, " on ", false, false},
    {"pour", Verb::pour_into, 2, " into ", false, false},
};

}  // namespace

ParseResult World::parse_action(const std::string& raw) const {
    std::string text = squeeze_spaces(lowercase(raw));
    while (!text.empty() && (text.back() == '.' || text.back() == '!')) {
        text.pop_back();
        text = squeeze_spaces(text);
    }
    if (text.empty()) return ParseResult::syntax();

    for (const VerbRule& rule : kGrammar) {
        if (rule.arity == 0) {
            if (text == rule.surface) {
                Action a;
                a.verb = rule.verb;
                a.surface = text;
                return ParseResult::parsed(std::move(a));
            }
            continue;
        }
        std::string prefix = std::string(rule.surface) + " ";
        if (text.size() <= prefix.size() || text.compare(0, prefix.size(), prefix) != 0) continue;
        std::string args = text.substr(prefix.size());

        if (rule.arity == 1) {
            auto ref = resolve_phrase(args, rule.door_ok, rule.room_name_ok);
            if (!ref) return ParseResult::unresolved(args);
            Action a;
            a.verb = rule.verb;
            a.args.push_back(std::move(*ref));
            a.surface = text;
            return ParseResult::parsed(std::move(a));
        }

        // arity 2: try every separator position, preferring the longest left
        // side that makes both phrases resolve.
        std::vector<std::size_t> cuts;
        for (std::size_t pos = args.find(rule.separator); pos != std::string::npos;
             pos = args.find(rule.separator, pos + 1)) {
            cuts.push_back(pos);
        }
        if (cuts.empty()) return ParseResult::syntax();

        for (auto it = cuts.rbegin(); it != cuts.rend(); ++it) {
            std::string left = args.substr(0, *it);
            std::string right = args.substr(*it + rule.separator.size());
            auto lref = resolve_phrase(left, false, false);
            auto rref = resolve_phrase(right, false, false);
            if (lref && rref) {
                Action a;
                a.verb = rule.verb;
                a.args.push_back(std::move(*lref));
                a.args.push_back(std::move(*rref));
                a.surface = text;
                return ParseResult::parsed(std::move(a));
            }
        }
        // Nothing resolved both sides: report against the first cut.
        std::string left = args.substr(0, cuts.front());
        std::string right = args.substr(cuts.front() + rule.separator.size());
        if (!resolve_phrase(left, false, false)) return ParseResult::unresolved(left);
        return ParseResult::unresolved(right);
    }
    return ParseResult::syntax();
}

// ---------------------------------------------------------------------------
// stepping
// ---------------------------------------------------------------------------

void detach_entity(WorldState& state, EntityId id) {
    for (Room& r : state.rooms) {
        auto it = std::find(r.entities.begin(), r.entities.end(), id);
        if (it != r.entities.end()) {
            r.entities.erase(it);
            return;
        }
    }
    auto inv = std::find(state.inventory.begin(), state.inventory.end(), id);
    if (inv != state.inventory.end()) {
        state.inventory.erase(inv);
        return;
    }
    for (Entity& e : state.entities) {
        auto it = std::find(e.contents.begin(), e.contents.end(), id);
        if (it != e.contents.end()) {
            e.contents.erase(it);
            return;
        }
    }
}

void World::detach(EntityId id) { detach_entity(state_, id); }

void World::apply_physics() {
    // Linear heat flow: each active powered holder pushes its heat_output
    // into everything it transitively contains, once per tick.
    std::vector<double> delta(state_.entities.size(), 0.0);
    for (const Entity& dev : state_.entities) {
        if (!dev.heat_output || *dev.heat_output == 0.0) continue;
        if (!dev.activated || dev.broken) continue;
        std::vector<EntityId> queue = dev.contents;
        while (!queue.empty()) {
            EntityId id = queue.front();
            queue.erase(queue.begin());
            delta[id.value] += *dev.heat_output;
            const Entity& e = state_.entity(id);
            queue.insert(queue.end(), e.contents.begin(), e.contents.end());
        }
    }
    for (Entity& e : state_.entities) {
        e.temperature += delta[e.id.value];
        sweep_matter_state(e);
    }
}

std::pair<Observation, StepOutcome> World::step(const Action& action) {
    state_.tick += 1;
    last_event_ = StepEvent{};
    last_event_.verb = action.verb;

    std::pair<Observation, StepOutcome> result;
    switch (action.verb) {
        case Verb::look_around:
            result = {render_look(), StepOutcome::executed};
            break;
        case Verb::inventory:
            result = {render_inventory(), StepOutcome::executed};
            break;
        case Verb::wait:
            result = {{catalog_->get("wait_ok")}, StepOutcome::executed};
            break;
        case Verb::open_thing:
            result = do_open(action);
            break;
        case Verb::close_thing:
            result = do_close(action);
            break;
        case Verb::go_to:
            result = do_go(action);
            break;
        case Verb::pick_up:
            result = do_pick_up(action);
            break;
        case Verb::put_in:
            result = do_put(action);
            break;
        case Verb::focus_on:
            result = do_focus(action);
            break;
        case Verb::activate:
            result = do_activate(action, true);
            break;
        case Verb::deactivate:
            result = do_activate(action, false);
            break;
        case Verb::use_on:
            result = do_use(action);
            break;
        case Verb::pour_into:
            result = do_pour(action);
            break;
        case Verb::mix:
            result = do_mix(action);
            break;
        case Verb::read:
            result = do_read(action);
            break;
    }

    last_event_.outcome = result.second;
    if (result.second == StepOutcome::executed) apply_physics();
    return result;
}

std::pair<Observation, StepOutcome> World::do_open(const Action& a) {
    const ObjectRef& ref = a.args.at(0);
    if (!ref.is_entity()) {
        DoorRef d = ref.door();
        for (Door& door : state_.doors) {
            bool match = (door.a == d.from && door.b == d.target) ||
                         (door.b == d.from && door.a == d.target);
            if (!match) continue;
            if (door.is_open) return {{catalog_->get("door_already_open")}, StepOutcome::redundant};
            door.is_open = true;
            return {{catalog_->get("door_now_open")}, StepOutcome::executed};
        }
        return {{catalog_->get("cant_open")}, StepOutcome::affordance_violation};
    }
    Entity& e = state_.entity(ref.entity());
    last_event_.primary = e.id;
    if (!e.openable) return {{catalog_->get("cant_open")}, StepOutcome::affordance_violation};
    if (e.is_open.value_or(false)) {
        return {{catalog_->format("entity_already_open", {{"name", e.name}})},
                StepOutcome::redundant};
    }
    e.is_open = true;
    return {{catalog_->format("entity_now_open", {{"name", e.name}})}, StepOutcome::executed};
}

std::pair<Observation, StepOutcome> World::do_close(const Action& a) {
    const ObjectRef& ref = a.args.at(0);
    if (!ref.is_entity()) {
        DoorRef d = ref.door();
        for (Door& door : state_.doors) {
            bool match = (door.a == d.from && door.b == d.target) ||
                         (door.b == d.from && door.a == d.target);
            if (!match) continue;
            if (!door.is_open) {
                return {{catalog_->get("door_already_closed")}, StepOutcome::redundant};
            }
            door.is_open = false;
            return {{catalog_->get("door_now_closed")}, StepOutcome::executed};
        }
        return {{catalog_->get("cant_close")}, StepOutcome::affordance_violation};
    }
    Entity& e = state_.entity(ref.entity());
    last_event_.primary = e.id;
    if (!e.openable) return {{catalog_->get("cant_close")}, StepOutcome::affordance_violation};
    if (!e.is_open.value_or(false)) {
        return {{catalog_->format("entity_already_closed", {{"name", e.name}})},
                StepOutcome::redundant};
    }
    e.is_open = false;
    return {{catalog_->format("entity_now_closed", {{"name", e.name}})}, StepOutcome::executed};
}

std::pair<Observation, StepOutcome> World::do_go(const Action& a) {
    const ObjectRef& ref = a.args.at(0);
    if (ref.is_entity()) {
        return {{catalog_->get("unclear")}, StepOutcome::affordance_violation};
    }
    DoorRef d = ref.door();
    const std::string& target_name = state_.room(d.target).name;
    for (const Door& door : state_.doors) {
        bool match = (door.a == d.from && door.b == d.target) ||
                     (door.b == d.from && door.a == d.target);
        if (!match) continue;
        if (!door.is_open) {
            return {{catalog_->format("door_closed_blocks", {{"room", target_name}})},
                    StepOutcome::affordance_violation};
        }
        state_.agent_room = d.target;
        return {{catalog_->format("move_to_room", {{"room", target_name}})},
                StepOutcome::executed};
    }
    return {{catalog_->get("unclear")}, StepOutcome::affordance_violation};
}

std::pair<Observation, StepOutcome> World::do_pick_up(const Action& a) {
    const ObjectRef& ref = a.args.at(0);
    if (!ref.is_entity()) {
        return {{catalog_->get("pickup_not_portable")}, StepOutcome::affordance_violation};
    }
    Entity& e = state_.entity(ref.entity());
    last_event_.primary = e.id;
    if (std::find(state_.inventory.begin(), state_.inventory.end(), e.id) !=
        state_.inventory.end()) {
        return {{catalog_->format("pickup_already_held", {{"name", e.name}})},
                StepOutcome::redundant};
    }
    if (!e.portable) {
        return {{catalog_->get("pickup_not_portable")}, StepOutcome::affordance_violation};
    }
    detach(e.id);
    state_.inventory.push_back(e.id);
    return {{catalog_->format("pickup_ok", {{"name", e.name}})}, StepOutcome::executed};
}

namespace {

bool can_hold(const Entity& e) {
    return e.kind == EntityKind::container || e.has_surface;
}

}  // namespace

std::pair<Observation, StepOutcome> World::do_put(const Action& a) {
    const ObjectRef& xr = a.args.at(0);
    const ObjectRef& yr = a.args.at(1);
    if (!xr.is_entity() || !yr.is_entity() || xr.entity() == yr.entity()) {
        return {{catalog_->get("put_bad_target")}, StepOutcome::affordance_violation};
    }
    Entity& x = state_.entity(xr.entity());
    Entity& y = state_.entity(yr.entity());
    last_event_.primary = x.id;
    last_event_.secondary = y.id;
    if (!x.portable) {
        return {{catalog_->get("pickup_not_portable")}, StepOutcome::affordance_violation};
    }
    if (!can_hold(y)) {
        return {{catalog_->get("put_bad_target")}, StepOutcome::affordance_violation};
    }
    if (y.openable && !y.is_open.value_or(false)) {
        return {{catalog_->format("put_target_closed", {{"y", y.name}})},
                StepOutcome::affordance_violation};
    }
    // no cycles: y must not live inside x
    for (auto holder = state_.holder_of(y.id); holder; holder = state_.holder_of(*holder)) {
        if (*holder == x.id) {
            return {{catalog_->get("put_bad_target")}, StepOutcome::affordance_violation};
        }
    }
    if (std::find(y.contents.begin(), y.contents.end(), x.id) != y.contents.end()) {
        return {{catalog_->format("put_same_place", {{"x", x.name}, {"y", y.name}})},
                StepOutcome::redundant};
    }
    detach(x.id);
    y.contents.push_back(x.id);
    return {{catalog_->format("put_ok", {{"x", x.name}, {"y", y.name}})}, StepOutcome::executed};
}

std::pair<Observation, StepOutcome> World::do_focus(const Action& a) {
    const ObjectRef& ref = a.args.at(0);
    if (!ref.is_entity()) {
        return {{catalog_->get("focus_bad")}, StepOutcome::affordance_violation};
    }
    Entity& e = state_.entity(ref.entity());
    state_.focused = e.id;
    last_event_.primary = e.id;
    last_event_.focused_changed = true;
    return {{catalog_->format("focus_ok", {{"name", e.name}})}, StepOutcome::executed};
}

std::pair<Observation, StepOutcome> World::do_activate(const Action& a, bool on) {
    const ObjectRef& ref = a.args.at(0);
    const char* bad = on ? "activate_bad" : "deactivate_bad";
    if (!ref.is_entity()) {
        return {{catalog_->get(bad)}, StepOutcome::affordance_violation};
    }
    Entity& e = state_.entity(ref.entity());
    last_event_.primary = e.id;
    if (e.kind != EntityKind::device) {
        return {{catalog_->get(bad)}, StepOutcome::affordance_violation};
    }
    if (e.broken) {
        return {{catalog_->format("activate_broken", {{"name", e.name}})},
                StepOutcome::affordance_violation};
    }
    if (e.activated == on) {
        return {{catalog_->format(on ? "activate_already" : "deactivate_already",
                                  {{"name", e.name}})},
                StepOutcome::redundant};
    }
    e.activated = on;
    return {{catalog_->format(on ? "activate_ok" : "deactivate_ok", {{"name", e.name}})},
            StepOutcome::executed};
}

std::pair<Observation, StepOutcome> World::do_use(const Action& a) {
    const ObjectRef& xr = a.args.at(0);
    const ObjectRef& yr = a.args.at(1);
    if (!xr.is_entity() || !yr.is_entity()) {
        return {{catalog_->get("unclear")}, StepOutcome::affordance_violation};
    }
    Entity& x = state_.entity(xr.entity());
    Entity& y = state_.entity(yr.entity());
    last_event_.primary = x.id;
    last_event_.secondary = y.id;
    if (!x.measures_temperature || x.id == y.id) {
        return {{catalog_->format("use_bad", {{"x", x.name}, {"y", y.name}})},
                StepOutcome::affordance_violation};
    }
    last_event_.measured = y.id;
    return {{catalog_->format("use_thermometer", {{"t", format_degrees(y.temperature)}})},
            StepOutcome::executed};
}

std::pair<Observation, StepOutcome> World::do_pour(const Action& a) {
    const ObjectRef& xr = a.args.at(0);
    const ObjectRef& yr = a.args.at(1);
    if (!xr.is_entity() || !yr.is_entity() || xr.entity() == yr.entity()) {
        return {{catalog_->get("pour_bad")}, StepOutcome::affordance_violation};
    }
    Entity& x = state_.entity(xr.entity());
    Entity& y = state_.entity(yr.entity());
    last_event_.primary = x.id;
    last_event_.secondary = y.id;
    if (x.kind != EntityKind::substance || x.matter_state != MatterState::liquid) {
        return {{catalog_->get("pour_bad")}, StepOutcome::affordance_violation};
    }
    if (!can_hold(y)) {
        return {{catalog_->get("pour_target_bad")}, StepOutcome::affordance_violation};
    }
    if (y.openable && !y.is_open.value_or(false)) {
        return {{catalog_->format("pour_target_closed", {{"y", y.name}})},
                StepOutcome::affordance_violation};
    }
    if (std::find(y.contents.begin(), y.contents.end(), x.id) != y.contents.end()) {
        return {{catalog_->format("put_same_place", {{"x", x.name}, {"y", y.name}})},
                StepOutcome::redundant};
    }
    detach(x.id);
    y.contents.push_back(x.id);
    return {{catalog_->format("pour_ok", {{"x", x.name}, {"y", y.name}})}, StepOutcome::executed};
}

std::pair<Observation, StepOutcome> World::do_mix(const Action& a) {
    const ObjectRef& ref = a.args.at(0);
    if (!ref.is_entity()) {
        return {{catalog_->get("mix_bad")}, StepOutcome::affordance_violation};
    }
    Entity& e = state_.entity(ref.entity());
    last_event_.primary = e.id;
    if (e.kind != EntityKind::container || e.contents.size() < 2) {
        return {{catalog_->get("mix_bad")}, StepOutcome::affordance_violation};
    }
    return {{catalog_->format("mix_ok", {{"name", e.name}})}, StepOutcome::executed};
}

std::pair<Observation, StepOutcome> World::do_read(const Action& a) {
    const ObjectRef& ref = a.args.at(0);
    if (!ref.is_entity()) {
        return {{catalog_->get("read_bad")}, StepOutcome::affordance_violation};
    }
    Entity& e = state_.entity(ref.entity());
    last_event_.primary = e.id;
    if (!e.text) {
        return {{catalog_->get("read_bad")}, StepOutcome::affordance_violation};
    }
    return {{catalog_->format("read_ok", {{"name", e.name}, {"text", *e.text}})},
            StepOutcome::executed};
}

// ---------------------------------------------------------------------------
// valid actions
// ---------------------------------------------------------------------------

std::vector<Action> World::valid_actions() const {
    std::vector<Action> out;
    auto add0 = [&](Verb v, std::string surface) {
        Action a;
        a.verb = v;
        a.surface = std::move(surface);
        out.push_back(std::move(a));
    };
    auto add1 = [&](Verb v, std::string surface, ObjectRef ref) {
        Action a;
        a.verb = v;
        a.args.push_back(std::move(ref));
        a.surface = std::move(surface);
        out.push_back(std::move(a));
    };
    auto add2 = [&](Verb v, std::string surface, ObjectRef x, ObjectRef y) {
        Action a;
        a.verb = v;
        a.args.push_back(std::move(x));
        a.args.push_back(std::move(y));
        a.surface = std::move(surface);
        out.push_back(std::move(a));
    };
    auto entity_ref = [&](EntityId id) {
        ObjectRef r;
        r.target = id;
        r.phrase = state_.entity(id).name;
        return r;
    };

    add0(Verb::look_around, "look around");
    add0(Verb::inventory, "inventory");
    add0(Verb::wait, "wait");

    for (const Door& d : state_.doors) {
        RoomId other;
        if (d.a == state_.agent_room) {
            other = d.b;
        } else if (d.b == state_.agent_room) {
            other = d.a;
        } else {
            continue;
        }
        const std::string& target = state_.room(other).name;
        ObjectRef ref;
        ref.target = DoorRef{state_.agent_room, other};
        ref.phrase = "door to " + target;
        add1(Verb::open_thing, "open door to " + target, ref);
        add1(Verb::close_thing, "close door to " + target, ref);
        if (d.is_open) {
            ObjectRef go = ref;
            go.phrase = target;
            add1(Verb::go_to, "go to " + target, go);
        }
    }

    std::vector<EntityId> visible = visible_entities();
    std::vector<EntityId> holders;
    for (EntityId id : visible) {
        const Entity& e = state_.entity(id);
        add1(Verb::focus_on, "focus on " + e.name, entity_ref(id));
        if (e.openable) {
            add1(Verb::open_thing, "open " + e.name, entity_ref(id));
            add1(Verb::close_thing, "close " + e.name, entity_ref(id));
        }
        if (e.portable) add1(Verb::pick_up, "pick up " + e.name, entity_ref(id));
        if (e.kind == EntityKind::device && !e.broken) {
            add1(Verb::activate, "activate " + e.name, entity_ref(id));
            add1(Verb::deactivate, "deactivate " + e.name, entity_ref(id));
        }
        if (e.text) add1(Verb::read, "read " + e.name, entity_ref(id));
        if (e.kind == EntityKind::container && e.contents.size() >= 2) {
            add1(Verb::mix, "mix " + e.name, entity_ref(id));
        }
        if (can_hold(e) && (!e.openable || e.is_open.value_or(false))) holders.push_back(id);
    }

    for (EntityId xid : visible) {
        const Entity& x = state_.entity(xid);
        for (EntityId yid : holders) {
            if (xid == yid) continue;
            const Entity& y = state_.entity(yid);
            // skip pairs that would create a containment cycle
            bool cyclic = false;
            for (auto h = state_.holder_of(yid); h; h = state_.holder_of(*h)) {
                if (*h == xid) {
                    cyclic = true;
                    break;
                }
            }
            if (cyclic) continue;
            if (x.portable) {
                add2(Verb::put_in, "put " + x.name + " in " + y.name, entity_ref(xid),
                     entity_ref(yid));
            }
            if (x.kind == EntityKind::substance && x.matter_state == MatterState::liquid) {
                add2(Verb::pour_into, "pour " + x.name + " into " + y.name, entity_ref(xid),
                     entity_ref(yid));
            }
        }
        if (x.measures_temperature) {
            for (EntityId yid : visible) {
                if (yid == xid) continue;
                add2(Verb::use_on, "use " + x.name + " on " + state_.entity(yid).name,
                     entity_ref(xid), entity_ref(yid));
            }
        }
    }

    std::sort(out.begin(), out.end(),
              [](const Action& a, const Action& b) { return a.surface < b.surface; });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const Action& a, const Action& b) { return a.surface == b.surface; }),
              out.end());
    return out;
}

}  // namespace textlab
