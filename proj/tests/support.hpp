#pragma once

// Shared fixtures for the unit tests: the data-backed catalog (loaded once),
// a fresh house world, command helpers, and per-test scratch directories.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <unistd.h>

#include "textlab/task.hpp"
#include "textlab/world.hpp"

namespace support {

inline const std::string& data_dir() {
    static const std::string dir = TEXTLAB_DATA_DIR;
    return dir;
}

inline const textlab::TaskCatalog& catalog() {
    static const textlab::TaskCatalog cat = textlab::TaskCatalog::load(data_dir());
    return cat;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// The unmodified house, agent in the hallway, nothing task-specific planted.
inline textlab::World house_world() {
    static const std::string json = slurp(data_dir() + "/world_house.json");
    return textlab::World(textlab::load_world_json(json, catalog().substances()),
                          &catalog().messages());
}

// Parse + step for commands the test knows are well formed.
inline std::pair<std::string, textlab::StepOutcome> step_cmd(textlab::World& w,
                                                             const std::string& cmd) {
    textlab::ParseResult pr = w.parse_action(cmd);
    if (pr.kind != textlab::ParseResult::Kind::parsed) {
        throw std::runtime_error("test command did not parse: " + cmd);
    }
    auto [obs, outcome] = w.step(*pr.action);
    return {obs.text, outcome};
}

inline std::optional<textlab::EntityId> find_entity(const textlab::World& w,
                                                    const std::string& name) {
    for (const textlab::Entity& e : w.state().entities) {
        if (e.name == name) return e.id;
    }
    return std::nullopt;
}

// A path under the system temp dir that is guaranteed not to exist yet.
inline std::filesystem::path fresh_path(const std::string& tag) {
    static std::atomic<int> counter{0};
    const std::filesystem::path root =
        std::filesystem::temp_directory_path() /
        ("textlab-unit-" + std::to_string(::getpid()));
    std::filesystem::create_directories(root);
    std::filesystem::path p = root / (tag + "-" + std::to_string(counter.fetch_add(1)));
    std::filesystem::remove_all(p);
    return p;
}

inline std::filesystem::path fresh_dir(const std::string& tag) {
    std::filesystem::path p = fresh_path(tag);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace support
