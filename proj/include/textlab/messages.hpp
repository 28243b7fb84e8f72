#pragma once

// Frozen message catalog.
//
// Every string the player can see -- room renders, refusals, success notices --
// comes from data/messages.json through this class. Tests assert byte-exactness
// against the catalog, and the precondition guard mimics replies from the same
// source, so a wording change in one place can never desynchronize the two.

#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <utility>

namespace textlab {

class MessageCatalog {
public:
    static MessageCatalog load(const std::string& path);
    static MessageCatalog from_json_text(const std::string& text);

    // Raw template for `key`. Throws std::runtime_error on unknown keys:
    // a missing message is a packaging bug, not a recoverable condition.
    const std::string& get(const std::string& key) const;

    // get() + "{placeholder}" substitution.
    std::string format(const std::string& key,
                       std::initializer_list<std::pair<std::string_view, std::string_view>> subs) const;

    bool has(const std::string& key) const { return templates_.count(key) > 0; }

private:
    std::map<std::string, std::string> templates_;
};

// "{name}" -> subs["name"], shared with task description templating.
std::string substitute_placeholders(
    std::string_view tmpl,
    std::initializer_list<std::pair<std::string_view, std::string_view>> subs);
std::string substitute_placeholders(std::string_view tmpl,
                                    const std::map<std::string, std::string>& subs);

// 10 -> "10", 32.5 -> "32.5"; used for temperatures in observations.
std::string format_degrees(double value);

}  // namespace textlab
