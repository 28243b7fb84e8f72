#pragma once

// Deterministic tick-based text world: rooms joined by doors, a containment
// tree of entities, linear heat flow from active devices, and a closed
// command grammar. One agent; every issued command advances time by one tick.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "textlab/messages.hpp"

namespace textlab {

// ---------------------------------------------------------------------------
// identifiers
// ---------------------------------------------------------------------------

struct EntityId {
    std::uint32_t value = 0;
    bool operator==(const EntityId&) const = default;
    auto operator<=>(const EntityId&) const = default;
};

struct RoomId {
    std::uint32_t value = 0;
    bool operator==(const RoomId&) const = default;
    auto operator<=>(const RoomId&) const = default;
};

// ---------------------------------------------------------------------------
// entities and rooms
// ---------------------------------------------------------------------------

enum class EntityKind { device, container, substance, creature, plant, furniture, portal };
enum class MatterState { solid, liquid, gas };

// How a powered entity talks about itself in renders.
//   switch_style: ", which is turned on/off."
//   activation:   ", which is activated/deactivated. "
//   hidden:       silent (household freezer/fridge style)
enum class PowerStyle { hidden, switch_style, activation };

struct Entity {
    EntityId id;
    std::string name;  // lowercase noun phrase, unique enough to resolve by
    EntityKind kind = EntityKind::furniture;

    bool openable = false;
    std::optional<bool> is_open;  // engaged iff openable

    std::vector<EntityId> contents;

    double temperature = 10.0;  // degrees celsius
    std::optional<MatterState> matter_state;  // substances only
    std::optional<double> melting_point;
    std::optional<double> boiling_point;

    bool alive = false;
    bool portable = false;

    bool activated = false;                  // devices only
    std::optional<double> heat_output;       // degrees per tick applied to contents
    PowerStyle power_style = PowerStyle::hidden;
    bool broken = false;

    bool measures_temperature = false;       // thermometer-likes
    std::optional<std::string> text;         // readable content
    std::string article = "a";               // pinned or derived at load
    std::string prep = "in";                 // "in the sink" vs "on the stove"
    bool has_surface = false;                // renders an "In/On the X is:" sentence
};

struct Door {
    RoomId a;
    RoomId b;
    bool is_open = false;  // one shared state, visible from both sides
};

struct Room {
    RoomId id;
    std::string name;
    std::vector<EntityId> entities;  // top-level only; nested live in contents
};

struct WorldState {
    std::vector<Room> rooms;
    std::vector<Entity> entities;  // index == id; ids never reused
    std::vector<Door> doors;
    RoomId agent_room;
    std::vector<EntityId> inventory;
    std::optional<EntityId> focused;
    std::uint64_t tick = 0;
    std::uint64_t rng_seed = 0;

    Entity& entity(EntityId id) { return entities[id.value]; }
    const Entity& entity(EntityId id) const { return entities[id.value]; }
    Room& room(RoomId id) { return rooms[id.value]; }
    const Room& room(RoomId id) const { return rooms[id.value]; }

    std::optional<RoomId> find_room(std::string_view name) const;
    // Room that (transitively) holds the entity; nullopt if in inventory.
    std::optional<RoomId> room_of(EntityId id) const;
    // Direct holder if the entity sits inside another entity's contents.
    std::optional<EntityId> holder_of(EntityId id) const;
    bool in_inventory(EntityId id) const;
};

// ---------------------------------------------------------------------------
// actions
// ---------------------------------------------------------------------------

enum class Verb {
    look_around, inventory, open_thing, close_thing, go_to, pick_up, put_in,
    focus_on, activate, deactivate, use_on, pour_into, mix, read, wait
};

struct DoorRef {
    RoomId from;    // side the agent is on
    RoomId target;  // room the door leads to
};

struct ObjectRef {
    std::variant<EntityId, DoorRef> target;
    bool from_inventory = false;  // "... in inventory" qualifier
    std::string phrase;           // text the player wrote

    bool is_entity() const { return std::holds_alternative<EntityId>(target); }
    EntityId entity() const { return std::get<EntityId>(target); }
    DoorRef door() const { return std::get<DoorRef>(target); }
};

struct Action {
    Verb verb = Verb::wait;
    std::vector<ObjectRef> args;
    std::string surface;  // canonical lowercase text
};

struct ParseResult {
    enum class Kind { parsed, syntax_error, unresolved_object };
    Kind kind = Kind::syntax_error;
    std::optional<Action> action;
    std::string unresolved_phrase;  // set for unresolved_object

    static ParseResult parsed(Action a) {
        return {Kind::parsed, std::move(a), {}};
    }
    static ParseResult syntax() { return {Kind::syntax_error, std::nullopt, {}}; }
    static ParseResult unresolved(std::string phrase) {
        return {Kind::unresolved_object, std::nullopt, std::move(phrase)};
    }
};

enum class StepOutcome { executed, affordance_violation, redundant };

struct Observation {
    std::string text;  // one paragraph, never empty, never mentions the score
};

// What the last step did, for milestone/fail predicates.
struct StepEvent {
    Verb verb = Verb::wait;
    StepOutcome outcome = StepOutcome::executed;
    std::optional<EntityId> primary;
    std::optional<EntityId> secondary;
    bool focused_changed = false;
    std::optional<EntityId> measured;  // entity a thermometer was used on
};

// ---------------------------------------------------------------------------
// engine
// ---------------------------------------------------------------------------

class World {
public:
    World(WorldState state, const MessageCatalog* catalog);

    const WorldState& state() const { return state_; }
    WorldState& mutable_state() { return state_; }
    const MessageCatalog& messages() const { return *catalog_; }

    // Grammar + object resolution. Never mutates.
    ParseResult parse_action(const std::string& raw) const;

    // Applies one action; always advances the tick. Physics (heat flow and
    // matter-state changes) runs only on executed steps -- refused or
    // redundant commands burn time but change nothing else.
    std::pair<Observation, StepOutcome> step(const Action& action);

    Observation render_look() const;
    Observation render_inventory() const;

    // Every action whose outcome would be executed or redundant, canonical
    // surface form, sorted and duplicate-free.
    std::vector<Action> valid_actions() const;

    const StepEvent& last_event() const { return last_event_; }

    // Entities the agent can currently refer to (room + open containers +
    // inventory), in resolution priority order: inventory first, then room,
    // alphabetical by id within a tier.
    std::vector<EntityId> visible_entities() const;
    std::vector<EntityId> inventory_view() const;

    const Door* door_between(RoomId from, std::string_view target_room) const;

    std::string current_room_name() const { return state_.room(state_.agent_room).name; }

private:
    WorldState state_;
    const MessageCatalog* catalog_;
    StepEvent last_event_;

    Observation render_room(const Room& room) const;
    std::string render_entity_long(const Entity& e) const;
    std::string render_entity_short(const Entity& e) const;
    std::string render_contents(const Entity& e) const;
    double ambient_temperature() const;

    std::optional<ObjectRef> resolve_phrase(const std::string& phrase, bool door_ok,
                                            bool room_name_ok) const;
    void apply_physics();
    void detach(EntityId id);  // remove from any holder/room/inventory

    std::pair<Observation, StepOutcome> do_open(const Action&);
    std::pair<Observation, StepOutcome> do_close(const Action&);
    std::pair<Observation, StepOutcome> do_go(const Action&);
    std::pair<Observation, StepOutcome> do_pick_up(const Action&);
    std::pair<Observation, StepOutcome> do_put(const Action&);
    std::pair<Observation, StepOutcome> do_focus(const Action&);
    std::pair<Observation, StepOutcome> do_activate(const Action&, bool on);
    std::pair<Observation, StepOutcome> do_use(const Action&);
    std::pair<Observation, StepOutcome> do_pour(const Action&);
    std::pair<Observation, StepOutcome> do_mix(const Action&);
    std::pair<Observation, StepOutcome> do_read(const Action&);
};

// Builds a WorldState from the declarative world file. `substances` supplies
// melting/boiling points joined onto substance entities by name.
struct SubstanceInfo {
    double melting_point = 0;
    double boiling_point = 0;
    std::optional<double> spawn_temperature;
};

WorldState load_world_json(const std::string& json_text,
                           const std::map<std::string, SubstanceInfo>& substances);

// Unhooks the entity from whatever room, holder, or inventory slot carries it.
// Its own contents ride along. Used by the engine and by task setup.
void detach_entity(WorldState& state, EntityId id);

// Normalization helpers shared by parser, guard and tests.
std::string lowercase(std::string_view s);
std::string squeeze_spaces(std::string_view s);
std::string strip_article(std::string_view s);

}  // namespace textlab
