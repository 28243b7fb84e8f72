#include <doctest.h>

#include <stdexcept>

#include "textlab/messages.hpp"

#include "support.hpp"

using namespace textlab;

namespace {
const MessageCatalog& msgs() { return support::catalog().messages(); }
}  // namespace

TEST_CASE("catalog carries the frozen surface strings") {
    CHECK(msgs().get("room_header") == "This room is called the {room}. In it, you see: ");
    CHECK(msgs().get("agent_item") == "the agent");
    CHECK(msgs().get("doors_header") == ". You also see: ");
    CHECK(msgs().get("door_item_closed") == "A door to the {room} (that is closed)");
    CHECK(msgs().get("openable_closed") == ". The {name} door is closed. ");
    CHECK(msgs().get("device_activated") == ", which is activated. ");
    CHECK(msgs().get("invalid_syntax") == "That is not a valid command.");
    CHECK(msgs().get("invalid_object") == "You don't see that here.");
    CHECK(msgs().get("unclear") == "Nothing happens.");
    CHECK(msgs().get("play_win") == "You won! Score: 100");
    CHECK(msgs().get("wait_ok") == "You decide to wait.");
}

TEST_CASE("unknown keys are rejected loudly") {
    CHECK_THROWS_AS(msgs().get("no_such_key"), std::runtime_error);
    CHECK(msgs().has("room_header"));
    CHECK_FALSE(msgs().has("no_such_key"));
}

TEST_CASE("placeholder substitution replaces known slots and keeps unknown ones") {
    CHECK(msgs().format("move_to_room", {{"room", "kitchen"}}) == "You move to the kitchen.");
    CHECK(msgs().format("put_ok", {{"x", "soap"}, {"y", "sink"}}) ==
          "You move the soap to the sink.");
    // A template slot with no binding stays visible instead of vanishing.
    CHECK(substitute_placeholders("hello {who}", {{"other", "x"}}) == "hello {who}");
    CHECK(substitute_placeholders("{a}{a}!", {{"a", "z"}}) == "zz!");
    CHECK(substitute_placeholders("no slots", {}) == "no slots");
}

TEST_CASE("temperatures render without trailing zeros") {
    CHECK(format_degrees(10.0) == "10");
    CHECK(format_degrees(-10.0) == "-10");
    CHECK(format_degrees(32.5) == "32.5");
    CHECK(format_degrees(0.0) == "0");
    CHECK(format_degrees(2.0) == "2");
}
