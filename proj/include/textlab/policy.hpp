#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "textlab/goldpath.hpp"
#include "textlab/rng.hpp"
#include "textlab/world.hpp"

namespace textlab {

struct PolicyContext {
    std::string prompt;          // packed dialog, ends with the "A:" cue
    int step_index = 0;          // index the decision will occupy in the record
    std::string variation_id;
    const World* world = nullptr;  // live engine, for engine-assisted baselines
};

struct PolicyDecision {
    std::string action_text;     // first line of the completion, trimmed
    std::string raw_completion;
    double latency_ms = 0.0;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual PolicyDecision decide(const PolicyContext& ctx) = 0;
    virtual std::string name() const = 0;
};

// Builds a fresh policy for each episode.
using PolicyProvider =
    std::function<std::unique_ptr<Policy>(const TaskVariation& var, std::uint64_t episode_seed)>;

// Serves a gold path from its second action on (the runner issues the opening
// look itself); past the end it falls back to "wait".
class OraclePolicy : public Policy {
public:
    explicit OraclePolicy(std::vector<std::string> actions);
    PolicyDecision decide(const PolicyContext& ctx) override;
    std::string name() const override { return "oracle"; }

private:
    std::vector<std::string> actions_;
    std::size_t cursor_ = 1;
};

// Uniform seeded choice over the engine's current valid-action list. Never
// emits unparseable text or unknown objects, by construction.
class RandomValidPolicy : public Policy {
public:
    explicit RandomValidPolicy(std::uint64_t seed) : rng_(seed) {}
    PolicyDecision decide(const PolicyContext& ctx) override;
    std::string name() const override { return "random"; }

private:
    Rng rng_;
};

// Replays the action column of a recorded transcript, starting after the
// opener; past the end it falls back to "wait".
class ReplayPolicy : public Policy {
public:
    explicit ReplayPolicy(std::vector<std::string> actions);
    PolicyDecision decide(const PolicyContext& ctx) override;
    std::string name() const override { return "replay"; }

private:
    std::vector<std::string> actions_;
    std::size_t cursor_ = 1;
};

// HTTP client for an external completion endpoint.
// Wire contract: POST JSON {"prompt", "max_tokens", "stop": ["\n"]} -> {"text"}.
struct CompletionClientConfig {
    std::string url;          // falls back to $TEXTLAB_COMPLETION_URL
    int max_tokens = 32;
    int retries = 2;          // attempts after the first failure
    int timeout_seconds = 10;
};

class CompletionClientPolicy : public Policy {
public:
    explicit CompletionClientPolicy(CompletionClientConfig cfg);
    PolicyDecision decide(const PolicyContext& ctx) override;
    std::string name() const override { return "completion"; }

private:
    CompletionClientConfig cfg_;
    std::string host_;
    int port_ = 80;
    std::string path_;
};

// First line, whitespace-trimmed: the action row of a raw completion.
std::string first_line_trimmed(const std::string& completion);

}  // namespace textlab
