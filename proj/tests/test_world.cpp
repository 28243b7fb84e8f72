#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "textlab/world.hpp"

#include "support.hpp"

using namespace textlab;
using support::house_world;
using support::step_cmd;

namespace {

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

// Inline two-device world for heat-flow checks: a hotplate (+10/tick) holding
// water and an empty chiller (-10/tick).
World thermal_world() {
    const std::string json = R"({
      "rooms": [
        {"name": "lab", "entities": [
          {"name": "hotplate", "kind": "device", "power_style": "switch",
           "heat_output": 10.0, "prep": "on", "contents": [
             {"name": "water", "kind": "substance", "portable": true, "temperature": 10.0}
           ]},
          {"name": "chiller", "kind": "device", "power_style": "switch",
           "heat_output": -10.0, "contents": []}
        ]}
      ],
      "doors": [],
      "agent_room": "lab"
    })";
    std::map<std::string, SubstanceInfo> subs;
    subs["water"] = SubstanceInfo{0.0, 100.0, std::nullopt};
    return World(load_world_json(json, subs), &support::catalog().messages());
}

double temp_of(const World& w, const std::string& name) {
    auto id = support::find_entity(w, name);
    REQUIRE(id.has_value());
    return w.state().entity(*id).temperature;
}

MatterState state_of(const World& w, const std::string& name) {
    auto id = support::find_entity(w, name);
    REQUIRE(id.has_value());
    REQUIRE(w.state().entity(*id).matter_state.has_value());
    return *w.state().entity(*id).matter_state;
}

}  // namespace

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

TEST_CASE("hallway renders byte-exactly") {
    World w = house_world();
    const std::string expected =
        "This room is called the hallway. In it, you see: the agent; "
        "a substance called air; a picture. You also see: "
        "A door to the bedroom (that is closed); "
        "A door to the greenhouse (that is closed); "
        "A door to the kitchen (that is closed); "
        "A door to the living room (that is closed); "
        "A door to the workshop (that is closed)";
    CHECK(w.render_look().text == expected);
    auto [obs, outcome] = step_cmd(w, "look around");
    CHECK(obs == expected);
    CHECK(outcome == StepOutcome::executed);
}

TEST_CASE("kitchen renders byte-exactly after walking in") {
    World w = house_world();
    CHECK(step_cmd(w, "open door to kitchen").first == "The door is now open.");
    CHECK(step_cmd(w, "go to kitchen").first == "You move to the kitchen.");
    CHECK(w.current_room_name() == "kitchen");

    const std::string expected =
        "This room is called the kitchen. In it, you see: the agent; "
        "a substance called air; "
        "a blue box (containing nothing); "
        "a chair On the chair is: nothing.; "
        "a counter On the counter is: a bowl (containing a red apple, a banana, "
        "an orange, a potato), a drawer.; "
        "a cupboard. The cupboard door is closed. ; "
        "a freezer. The freezer door is closed. ; "
        "a fridge. The fridge door is closed. ; "
        "a glass jar (containing a substance called sodium chloride); "
        "a lighter; "
        "a orange box (containing nothing); "
        "a oven, which is turned off.. The oven door is closed. ; "
        "a painting; "
        "a sink, which is turned off. In the sink is: nothing.; "
        "a substance called soap; "
        "a stopwatch, which is deactivated. ; "
        "a stove, which is turned off. On the stove is: nothing.; "
        "a table On the table is: a glass cup (containing nothing).; "
        "a thermometer, currently reading a temperature of 10 degrees celsius"
        ". You also see: A door to the hallway (that is open); "
        "A door to the outside (that is closed)";
    CHECK(step_cmd(w, "look around").first == expected);
}

TEST_CASE("opening a container reveals its contents in the render") {
    World w = house_world();
    step_cmd(w, "open door to kitchen");
    step_cmd(w, "go to kitchen");
    CHECK(step_cmd(w, "open fridge").first == "The fridge is now open.");
    const std::string look = step_cmd(w, "look around").first;
    CHECK(contains(look,
                   "a fridge. The fridge door is open. In the fridge is: "
                   "a substance called butter, a substance called milk, "
                   "a substance called orange juice."));
}

TEST_CASE("inventory render lists short forms") {
    World w = house_world();
    CHECK(w.render_inventory().text == "In your inventory, you see: nothing");
    step_cmd(w, "open door to kitchen");
    step_cmd(w, "go to kitchen");
    CHECK(step_cmd(w, "pick up soap").first == "You move the soap to the inventory.");
    CHECK(step_cmd(w, "pick up glass jar").first ==
          "You move the glass jar to the inventory.");
    CHECK(w.render_inventory().text ==
          "In your inventory, you see: a substance called soap, "
          "a glass jar (containing a substance called sodium chloride)");
    CHECK(step_cmd(w, "inventory").first == w.render_inventory().text);
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

TEST_CASE("parser normalizes case, spacing and trailing punctuation") {
    World w = house_world();
    for (const std::string raw : {"look around", "  LOOK   Around.  ", "look around!!",
                                  "Look Around..."}) {
        ParseResult pr = w.parse_action(raw);
        REQUIRE(pr.kind == ParseResult::Kind::parsed);
        CHECK(pr.action->verb == Verb::look_around);
        CHECK(pr.action->surface == "look around");
    }
    ParseResult wait = w.parse_action("wait...");
    REQUIRE(wait.kind == ParseResult::Kind::parsed);
    CHECK(wait.action->verb == Verb::wait);
}

TEST_CASE("parser resolves doors, articles and room names") {
    World w = house_world();

    ParseResult door = w.parse_action("Open the door to the kitchen.");
    REQUIRE(door.kind == ParseResult::Kind::parsed);
    CHECK(door.action->verb == Verb::open_thing);
    REQUIRE_FALSE(door.action->args.empty());
    CHECK_FALSE(door.action->args[0].is_entity());
    CHECK(w.state().room(door.action->args[0].door().target).name == "kitchen");

    ParseResult go = w.parse_action("go to kitchen");
    REQUIRE(go.kind == ParseResult::Kind::parsed);
    CHECK_FALSE(go.action->args[0].is_entity());

    // "focus on" never takes door phrases, so the words fail object lookup.
    ParseResult focus_door = w.parse_action("focus on door to kitchen");
    CHECK(focus_door.kind == ParseResult::Kind::unresolved_object);
}

TEST_CASE("parser reports unknown verbs and unknown objects distinctly") {
    World w = house_world();
    CHECK(w.parse_action("sing loudly").kind == ParseResult::Kind::syntax_error);
    CHECK(w.parse_action("open").kind == ParseResult::Kind::syntax_error);
    CHECK(w.parse_action("put soap on counter").kind == ParseResult::Kind::syntax_error);
    CHECK(w.parse_action("").kind == ParseResult::Kind::syntax_error);

    ParseResult unknown = w.parse_action("pick up zebra");
    CHECK(unknown.kind == ParseResult::Kind::unresolved_object);
    CHECK(unknown.unresolved_phrase == "zebra");

    // Out-of-room entities are invisible to the resolver.
    CHECK(w.parse_action("pick up soap").kind == ParseResult::Kind::unresolved_object);
    // Non-adjacent rooms cannot be routed to directly.
    CHECK(w.parse_action("go to outside").kind == ParseResult::Kind::unresolved_object);
}

TEST_CASE("two-argument commands split on the rightmost workable separator") {
    World w = house_world();
    step_cmd(w, "open door to kitchen");
    step_cmd(w, "go to kitchen");
    step_cmd(w, "pick up glass jar");

    // Three " in " cuts; only "sodium chloride" / "glass jar in inventory" works.
    ParseResult pr = w.parse_action("put sodium chloride in glass jar in inventory");
    REQUIRE(pr.kind == ParseResult::Kind::parsed);
    CHECK(pr.action->verb == Verb::put_in);
    CHECK(pr.action->args[1].from_inventory);
    auto [obs, outcome] = w.step(*pr.action);
    CHECK(outcome == StepOutcome::redundant);
    CHECK(obs.text == "The sodium chloride is already in the glass jar.");

    // Both sides unresolvable: the leftmost cut's left phrase gets reported.
    ParseResult bad = w.parse_action("put zebra in unicorn");
    CHECK(bad.kind == ParseResult::Kind::unresolved_object);
    CHECK(bad.unresolved_phrase == "zebra");
}

TEST_CASE("closed containers hide their contents from resolution") {
    World w = house_world();
    step_cmd(w, "open door to kitchen");
    step_cmd(w, "go to kitchen");
    CHECK(w.parse_action("pick up butter").kind == ParseResult::Kind::unresolved_object);
    step_cmd(w, "open fridge");
    CHECK(w.parse_action("pick up butter").kind == ParseResult::Kind::parsed);
}

// ---------------------------------------------------------------------------
// step outcomes
// ---------------------------------------------------------------------------

TEST_CASE("door handling distinguishes executed, redundant and refused") {
    World w = house_world();
    auto [blocked, blocked_oc] = step_cmd(w, "go to kitchen");
    CHECK(blocked_oc == StepOutcome::affordance_violation);
    CHECK(blocked == "The door to the kitchen is closed.");

    CHECK(step_cmd(w, "open door to kitchen") ==
          std::pair<std::string, StepOutcome>{"The door is now open.", StepOutcome::executed});
    CHECK(step_cmd(w, "open door to kitchen") ==
          std::pair<std::string, StepOutcome>{"The door is already open.", StepOutcome::redundant});
    CHECK(step_cmd(w, "close door to kitchen") ==
          std::pair<std::string, StepOutcome>{"The door is now closed.", StepOutcome::executed});
    CHECK(step_cmd(w, "close door to kitchen") ==
          std::pair<std::string, StepOutcome>{"The door is already closed.", StepOutcome::redundant});
}

TEST_CASE("pick up and put enforce portability, capacity and openness") {
    World w = house_world();
    step_cmd(w, "open door to kitchen");
    step_cmd(w, "go to kitchen");

    auto heavy = step_cmd(w, "pick up counter");
    CHECK(heavy.second == StepOutcome::affordance_violation);
    CHECK(heavy.first == "You can't pick that up.");

    step_cmd(w, "pick up soap");
    auto again = step_cmd(w, "pick up soap");
    CHECK(again.second == StepOutcome::redundant);
    CHECK(again.first == "The soap is already in your inventory.");

    auto closed = step_cmd(w, "put soap in fridge");
    CHECK(closed.second == StepOutcome::affordance_violation);
    CHECK(closed.first == "The fridge is closed.");

    auto into_person = step_cmd(w, "put soap in painting");
    CHECK(into_person.second == StepOutcome::affordance_violation);
    CHECK(into_person.first == "You can't put something in that.");

    CHECK(step_cmd(w, "put soap in sink") ==
          std::pair<std::string, StepOutcome>{"You move the soap to the sink.",
                                              StepOutcome::executed});
    auto same = step_cmd(w, "put soap in sink");
    CHECK(same.second == StepOutcome::redundant);
    CHECK(same.first == "The soap is already in the sink.");
}

TEST_CASE("containment cycles are refused") {
    World w = house_world();
    step_cmd(w, "open door to kitchen");
    step_cmd(w, "go to kitchen");
    CHECK(step_cmd(w, "put glass cup in glass jar").second == StepOutcome::executed);
    auto cyc = step_cmd(w, "put glass jar in glass cup");
    CHECK(cyc.second == StepOutcome::affordance_violation);
    CHECK(cyc.first == "You can't put something in that.");
}

TEST_CASE("focus always lands on visible entities") {
    World w = house_world();
    auto [obs, outcome] = step_cmd(w, "focus on picture");
    CHECK(outcome == StepOutcome::executed);
    CHECK(obs == "You focus on the picture.");
    CHECK(w.last_event().focused_changed);
    REQUIRE(w.state().focused.has_value());
    CHECK(w.state().entity(*w.state().focused).name == "picture");
}

TEST_CASE("devices activate, refuse double toggles and report broken hardware") {
    World w = house_world();
    step_cmd(w, "open door to kitchen");
    step_cmd(w, "go to kitchen");

    CHECK(step_cmd(w, "activate stove") ==
          std::pair<std::string, StepOutcome>{"The stove is now activated.",
                                              StepOutcome::executed});
    auto twice = step_cmd(w, "activate stove");
    CHECK(twice.second == StepOutcome::redundant);
    CHECK(twice.first == "The stove is already activated.");
    CHECK(step_cmd(w, "deactivate stove").second == StepOutcome::executed);

    auto not_device = step_cmd(w, "activate painting");
    CHECK(not_device.second == StepOutcome::affordance_violation);
    CHECK(not_device.first == "You can't activate that.");

    auto stove_id = support::find_entity(w, "stove");
    REQUIRE(stove_id.has_value());
    w.mutable_state().entity(*stove_id).broken = true;
    auto broken = step_cmd(w, "activate stove");
    CHECK(broken.second == StepOutcome::affordance_violation);
    CHECK(broken.first == "The stove appears to be broken.");
}

TEST_CASE("thermometer reads the temperature of its subject") {
    World w = house_world();
    step_cmd(w, "open door to kitchen");
    step_cmd(w, "go to kitchen");
    step_cmd(w, "open fridge");
    auto [obs, outcome] = step_cmd(w, "use thermometer on butter");
    CHECK(outcome == StepOutcome::executed);
    CHECK(obs == "the thermometer measures a temperature of 2 degrees celsius");
    auto butter = support::find_entity(w, "butter");
    REQUIRE(butter.has_value());
    CHECK(w.last_event().measured == butter);

    auto misuse = step_cmd(w, "use soap on butter");
    CHECK(misuse.second == StepOutcome::affordance_violation);
}

TEST_CASE("pour moves liquids only") {
    World w = house_world();
    step_cmd(w, "open door to kitchen");
    step_cmd(w, "go to kitchen");
    step_cmd(w, "open fridge");
    CHECK(step_cmd(w, "pour orange juice into glass cup") ==
          std::pair<std::string, StepOutcome>{"You pour the orange juice into the glass cup.",
                                              StepOutcome::executed});
    step_cmd(w, "open freezer");
    auto solid = step_cmd(w, "pour ice into sink");
    CHECK(solid.second == StepOutcome::affordance_violation);
    CHECK(solid.first == "You can't pour that.");
}

TEST_CASE("mix wants a container with at least two contents") {
    World w = house_world();
    step_cmd(w, "open door to kitchen");
    step_cmd(w, "go to kitchen");
    CHECK(step_cmd(w, "mix bowl") ==
          std::pair<std::string, StepOutcome>{"You mix the contents of the bowl.",
                                              StepOutcome::executed});
    auto lonely = step_cmd(w, "mix glass jar");
    CHECK(lonely.second == StepOutcome::affordance_violation);
    CHECK(lonely.first == "There is nothing to mix in that.");
}

TEST_CASE("read recites text and refuses mute objects") {
    World w = house_world();
    step_cmd(w, "open door to living room");
    step_cmd(w, "go to living room");
    CHECK(step_cmd(w, "read book").first ==
          "You read the book: Matter changes its state when it is heated or cooled "
          "past its melting or boiling point.");
    auto mute = step_cmd(w, "read sofa");
    CHECK(mute.second == StepOutcome::affordance_violation);
    CHECK(mute.first == "You can't read that.");
}

TEST_CASE("walking toward a non-door entity goes nowhere") {
    World w = house_world();
    auto [obs, outcome] = step_cmd(w, "go to picture");
    CHECK(outcome == StepOutcome::affordance_violation);
    CHECK(obs == "Nothing happens.");
}

TEST_CASE("wait passes time and nothing else") {
    World w = house_world();
    const auto tick0 = w.state().tick;
    CHECK(step_cmd(w, "wait") ==
          std::pair<std::string, StepOutcome>{"You decide to wait.", StepOutcome::executed});
    CHECK(w.state().tick == tick0 + 1);
}

// ---------------------------------------------------------------------------
// valid action enumeration
// ---------------------------------------------------------------------------

TEST_CASE("valid actions are sorted, canonical, and individually workable") {
    World w = house_world();
    step_cmd(w, "open door to kitchen");
    step_cmd(w, "go to kitchen");

    const std::vector<Action> actions = w.valid_actions();
    REQUIRE(!actions.empty());

    std::set<std::string> surfaces;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (i > 0) CHECK(actions[i - 1].surface < actions[i].surface);
        surfaces.insert(actions[i].surface);

        ParseResult pr = w.parse_action(actions[i].surface);
        REQUIRE_MESSAGE(pr.kind == ParseResult::Kind::parsed,
                        "surface did not re-parse: " << actions[i].surface);
        CHECK(pr.action->surface == actions[i].surface);

        World probe = w;  // value copy; stepping it leaves `w` untouched
        auto [obs, outcome] = probe.step(*pr.action);
        const bool ok = outcome == StepOutcome::executed || outcome == StepOutcome::redundant;
        CHECK_MESSAGE(ok, "listed action was refused: " << actions[i].surface
                                                        << " -> " << obs.text);
    }

    CHECK(surfaces.count("look around"));
    CHECK(surfaces.count("inventory"));
    CHECK(surfaces.count("wait"));
    CHECK(surfaces.count("go to hallway"));          // that door is open
    CHECK(surfaces.count("open door to outside"));
    CHECK_FALSE(surfaces.count("go to outside"));    // that door is closed
    CHECK(surfaces.count("open fridge"));
    CHECK(surfaces.count("activate stove"));
    CHECK(surfaces.count("focus on thermometer"));
    CHECK(surfaces.count("mix bowl"));
    CHECK(surfaces.count("pick up lighter"));
    CHECK_FALSE(surfaces.count("pick up counter"));  // not portable
    CHECK(surfaces.count("put lighter in sink"));
    CHECK_FALSE(surfaces.count("put lighter in fridge"));  // closed target
    CHECK(surfaces.count("use thermometer on soap"));
    CHECK_FALSE(surfaces.count("read painting"));    // nothing written on it
}

TEST_CASE("opening the door adds the matching go action") {
    World w = house_world();
    auto has_go = [&](const char* s) {
        for (const Action& a : w.valid_actions()) {
            if (a.surface == s) return true;
        }
        return false;
    };
    CHECK_FALSE(has_go("go to kitchen"));
    step_cmd(w, "open door to kitchen");
    CHECK(has_go("go to kitchen"));
}

// ---------------------------------------------------------------------------
// physics
// ---------------------------------------------------------------------------

TEST_CASE("active heaters push their contents across state boundaries") {
    World w = thermal_world();
    CHECK(state_of(w, "water") == MatterState::liquid);

    step_cmd(w, "activate hotplate");  // physics: 10 -> 20
    CHECK(temp_of(w, "water") == doctest::Approx(20.0));

    for (int i = 0; i < 8; ++i) step_cmd(w, "wait");  // -> 100
    CHECK(temp_of(w, "water") == doctest::Approx(100.0));
    CHECK(state_of(w, "water") == MatterState::liquid);  // boundary: not past it yet

    step_cmd(w, "wait");  // -> 110
    CHECK(state_of(w, "water") == MatterState::gas);

    step_cmd(w, "deactivate hotplate");
    const double settled = temp_of(w, "water");
    step_cmd(w, "wait");
    CHECK(temp_of(w, "water") == doctest::Approx(settled));  // no heat when off
}

TEST_CASE("coolers freeze strictly below the melting point") {
    World w = thermal_world();
    step_cmd(w, "activate chiller");
    step_cmd(w, "pick up water");
    step_cmd(w, "put water in chiller");  // physics: 10 -> 0
    CHECK(temp_of(w, "water") == doctest::Approx(0.0));
    CHECK(state_of(w, "water") == MatterState::liquid);  // 0 is not below 0
    step_cmd(w, "wait");  // -> -10
    CHECK(state_of(w, "water") == MatterState::solid);
}

TEST_CASE("refused and redundant steps burn a tick but never run physics") {
    World w = thermal_world();
    step_cmd(w, "activate hotplate");
    const double before = temp_of(w, "water");
    const auto tick = w.state().tick;

    auto redundant = step_cmd(w, "activate hotplate");
    CHECK(redundant.second == StepOutcome::redundant);
    CHECK(temp_of(w, "water") == doctest::Approx(before));

    auto refused = step_cmd(w, "pick up hotplate");
    CHECK(refused.second == StepOutcome::affordance_violation);
    CHECK(temp_of(w, "water") == doctest::Approx(before));

    CHECK(w.state().tick == tick + 2);
}

// ---------------------------------------------------------------------------
// state plumbing
// ---------------------------------------------------------------------------

TEST_CASE("detach_entity pulls an entity out of any holder") {
    World w = house_world();
    auto jar = support::find_entity(w, "glass jar");
    REQUIRE(jar.has_value());
    WorldState& st = w.mutable_state();
    REQUIRE(st.room_of(*jar).has_value());
    detach_entity(st, *jar);
    CHECK_FALSE(st.room_of(*jar).has_value());
    CHECK_FALSE(st.holder_of(*jar).has_value());
    CHECK_FALSE(st.in_inventory(*jar));
}

TEST_CASE("door_between answers by target room name") {
    World w = house_world();
    const RoomId hallway = w.state().agent_room;
    CHECK(w.door_between(hallway, "kitchen") != nullptr);
    CHECK(w.door_between(hallway, "outside") == nullptr);
}

TEST_CASE("world files may declare doors pre-opened") {
    const std::string json = R"({
      "rooms": [
        {"name": "north", "entities": []},
        {"name": "south", "entities": []}
      ],
      "doors": [["north", "south", true]],
      "agent_room": "north"
    })";
    World w(load_world_json(json, {}), &support::catalog().messages());
    auto [obs, outcome] = step_cmd(w, "go to south");
    CHECK(outcome == StepOutcome::executed);
    CHECK(obs == "You move to the south.");
}

TEST_CASE("text normalization helpers") {
    CHECK(lowercase("Open The DOOR") == "open the door");
    CHECK(squeeze_spaces("  a   b  ") == "a b");
    CHECK(strip_article("the stove") == "stove");
    CHECK(strip_article("an orange") == "orange");
    CHECK(strip_article("a") == "a");          // too short to strip
    CHECK(strip_article("apple") == "apple");  // no article present
}
