#include "textlab/guard.hpp"

#include <array>
#include <regex>

#include "textlab/world.hpp"  // lowercase / squeeze_spaces / strip_article

namespace textlab {

namespace {

// Objects the guard is willing to intercept for. Doors are matched by their
// "door to X" phrase; the rest are the closeable things the house shows.
constexpr std::array<std::string_view, 4> kTrackedNames = {"drawer", "cupboard", "freezer",
                                                           "fridge"};

bool is_tracked_entity(const std::string& phrase) {
    for (std::string_view n : kTrackedNames) {
        if (phrase == n) return true;
    }
    return false;
}

// "door to kitchen" canonical form for both action phrases and observations.
std::string door_key(const std::string& target) { return "door to " + strip_article(target); }

const std::regex& door_listing_re() {
    static const std::regex re(R"(A door to the (.+?) \(that is (open|closed)\))");
    return re;
}

const std::regex& named_door_state_re() {
    static const std::regex re(R"(The (.+?) door is (open|closed)\.)");
    return re;
}

const std::regex& bare_door_now_re() {
    static const std::regex re(R"(The door is now (open|closed)\.)");
    return re;
}

const std::regex& named_now_re() {
    static const std::regex re(R"(The (.+?) is now (open|closed)\.)");
    return re;
}

OpenState state_from_word(const std::string& w) {
    return w == "open" ? OpenState::open : OpenState::closed;
}

}  // namespace

PreconditionGuard::PreconditionGuard(const MessageCatalog* catalog, bool clear_on_room_change)
    : catalog_(catalog), clear_on_room_change_(clear_on_room_change) {}

void PreconditionGuard::note_room(const std::string& current_room) {
    if (clear_on_room_change_ && last_room_ && *last_room_ != current_room) {
        ledger_.clear();
        pending_door_.reset();
    }
    last_room_ = current_room;
}

void PreconditionGuard::record(const std::string& room, const std::string& phrase,
                               OpenState state) {
    ledger_[{room, phrase}] = Entry{state, tick_};
}

OpenState PreconditionGuard::state_of(const std::string& room, const std::string& phrase) const {
    auto it = ledger_.find({room, phrase});
    return it == ledger_.end() ? OpenState::unknown : it->second.state;
}

void PreconditionGuard::observe(const std::string& observation, const std::string& current_room) {
    ++tick_;
    note_room(current_room);

    for (std::sregex_iterator it(observation.begin(), observation.end(), door_listing_re()), end;
         it != end; ++it) {
        record(current_room, door_key(lowercase((*it)[1].str())),
               state_from_word((*it)[2].str()));
    }

    for (std::sregex_iterator it(observation.begin(), observation.end(), named_door_state_re()),
         end;
         it != end; ++it) {
        // Openable fixtures render as "The drawer door is closed."
        record(current_room, lowercase((*it)[1].str()), state_from_word((*it)[2].str()));
    }

    // The nameless success reply refers to whatever door the agent just
    // operated on; without a pending action it carries no usable evidence.
    std::smatch m;
    if (std::regex_search(observation, m, bare_door_now_re()) && pending_door_) {
        record(pending_door_->first, pending_door_->second, state_from_word(m[1].str()));
    }

    for (std::sregex_iterator it(observation.begin(), observation.end(), named_now_re()), end;
         it != end; ++it) {
        std::string name = lowercase((*it)[1].str());
        if (name == "door") continue;  // handled by the pending-door rule
        record(current_room, name, state_from_word((*it)[2].str()));
    }

    pending_door_.reset();  // attribution is one-shot
}

GuardDecision PreconditionGuard::filter(const std::string& action_text,
                                        const std::string& current_room) {
    ++tick_;
    note_room(current_room);

    std::string text = squeeze_spaces(lowercase(action_text));
    while (!text.empty() && (text.back() == '.' || text.back() == '!')) {
        text.pop_back();
        text = squeeze_spaces(text);
    }

    bool requested_open;
    std::string phrase;
    if (text.rfind("open ", 0) == 0) {
        requested_open = true;
        phrase = text.substr(5);
    } else if (text.rfind("close ", 0) == 0) {
        requested_open = false;
        phrase = text.substr(6);
    } else {
        return {};
    }
    phrase = strip_article(phrase);

    bool is_door = phrase.rfind("door to ", 0) == 0;
    if (is_door) {
        phrase = door_key(phrase.substr(8));
        pending_door_ = {{current_room, phrase}};
    } else if (!is_tracked_entity(phrase)) {
        return {};
    }

    OpenState known = state_of(current_room, phrase);
    OpenState requested = requested_open ? OpenState::open : OpenState::closed;
    if (known != requested) return {};

    GuardDecision d;
    d.intercept = true;
    if (is_door) {
        d.reply = catalog_->get(requested_open ? "door_now_open" : "door_now_closed");
    } else {
        d.reply = catalog_->format(requested_open ? "entity_now_open" : "entity_now_closed",
                                   {{"name", phrase}});
    }
    return d;
}

}  // namespace textlab
