#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "textlab/messages.hpp"

namespace textlab {

enum class OpenState : std::uint8_t { open, closed, unknown };

struct GuardDecision {
    bool intercept = false;
    std::string reply;  // set only when intercept is true
};

// Text-level tracker of door/drawer/container open-closed state. It reads the
// game's replies and room descriptions, remembers what it has seen, and
// swallows open/close commands whose outcome it already knows, answering in
// the game's own voice. It never looks at engine state.
class PreconditionGuard {
public:
    explicit PreconditionGuard(const MessageCatalog* catalog, bool clear_on_room_change = false);

    // Harvest open/closed evidence from one game reply or room description.
    void observe(const std::string& observation, const std::string& current_room);

    // Decide whether to intercept the action. Interception happens only for
    // open/close of a tracked object whose ledger state already equals the
    // requested end state; everything else (including unknown state) passes.
    GuardDecision filter(const std::string& action_text, const std::string& current_room);

    OpenState state_of(const std::string& room, const std::string& phrase) const;
    std::size_t ledger_size() const { return ledger_.size(); }
    void clear() { ledger_.clear(); }

private:
    struct Entry {
        OpenState state = OpenState::unknown;
        std::uint64_t tick = 0;
    };

    void record(const std::string& room, const std::string& phrase, OpenState state);
    void note_room(const std::string& current_room);

    const MessageCatalog* catalog_;
    bool clear_on_room_change_;
    std::map<std::pair<std::string, std::string>, Entry> ledger_;
    std::uint64_t tick_ = 0;
    std::optional<std::string> last_room_;
    // (room, phrase) of the most recent door open/close the agent issued,
    // used to attribute the nameless "The door is now open." reply.
    std::optional<std::pair<std::string, std::string>> pending_door_;
};

}  // namespace textlab
