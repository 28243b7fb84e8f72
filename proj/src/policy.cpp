#include "textlab/policy.hpp"

#include <cstdlib>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace textlab {

std::string first_line_trimmed(const std::string& completion) {
    std::size_t end = completion.find('\n');
    std::string line = completion.substr(0, end);
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    std::size_t last = line.find_last_not_of(" \t\r");
    return line.substr(first, last - first + 1);
}

// --- oracle ------------------------------------------------------------------

OraclePolicy::OraclePolicy(std::vector<std::string> actions) : actions_(std::move(actions)) {}

PolicyDecision OraclePolicy::decide(const PolicyContext&) {
    PolicyDecision d;
    if (cursor_ < actions_.size()) {
        d.action_text = actions_[cursor_++];
    } else {
        d.action_text = "wait";
    }
    d.raw_completion = d.action_text;
    return d;
}

// --- random valid --------------------------------------------------------------

PolicyDecision RandomValidPolicy::decide(const PolicyContext& ctx) {
    if (!ctx.world) throw std::runtime_error("random policy needs engine access");
    std::vector<Action> valid = ctx.world->valid_actions();
    if (valid.empty()) throw std::runtime_error("no valid actions available");
    PolicyDecision d;
    d.action_text = valid[rng_.index(valid.size())].surface;
    d.raw_completion = d.action_text;
    return d;
}

// --- replay ------------------------------------------------------------------

ReplayPolicy::ReplayPolicy(std::vector<std::string> actions) : actions_(std::move(actions)) {}

PolicyDecision ReplayPolicy::decide(const PolicyContext&) {
    PolicyDecision d;
    if (cursor_ < actions_.size()) {
        d.action_text = actions_[cursor_++];
    } else {
        d.action_text = "wait";
    }
    d.raw_completion = d.action_text;
    return d;
}

// --- completion client ----------------------------------------------------------

namespace {

void parse_http_url(const std::string& url, std::string& host, int& port, std::string& path) {
    std::string rest = url;
    const std::string scheme = "http://";
    if (rest.rfind(scheme, 0) == 0) rest = rest.substr(scheme.size());
    std::size_t slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    path = slash == std::string::npos ? "/" : rest.substr(slash);
    std::size_t colon = hostport.find(':');
    if (colon == std::string::npos) {
        host = hostport;
        port = 80;
    } else {
        host = hostport.substr(0, colon);
        port = std::stoi(hostport.substr(colon + 1));
    }
    if (host.empty()) throw std::runtime_error("completion endpoint URL has no host: " + url);
}

}  // namespace

CompletionClientPolicy::CompletionClientPolicy(CompletionClientConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.url.empty()) {
        const char* env = std::getenv("TEXTLAB_COMPLETION_URL");
        if (env) cfg_.url = env;
    }
    if (cfg_.url.empty()) {
        throw std::runtime_error(
            "no completion endpoint configured (flag or TEXTLAB_COMPLETION_URL)");
    }
    parse_http_url(cfg_.url, host_, port_, path_);
}

PolicyDecision CompletionClientPolicy::decide(const PolicyContext& ctx) {
    nlohmann::json body;
    body["prompt"] = ctx.prompt;
    body["max_tokens"] = cfg_.max_tokens;
    body["stop"] = nlohmann::json::array({"\n"});
    const std::string payload = body.dump();

    std::string error;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
        httplib::Client client(host_, port_);
        client.set_connection_timeout(cfg_.timeout_seconds, 0);
        client.set_read_timeout(cfg_.timeout_seconds, 0);
        auto res = client.Post(path_, payload, "application/json");
        if (!res) {
            error = "transport failure contacting " + cfg_.url;
            continue;
        }
        if (res->status != 200) {
            error = "completion endpoint returned status " + std::to_string(res->status);
            continue;
        }
        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(res->body);
        } catch (const std::exception& e) {
            error = std::string("malformed completion response: ") + e.what();
            continue;
        }
        if (!parsed.contains("text") || !parsed["text"].is_string()) {
            error = "completion response missing text field";
            continue;
        }
        PolicyDecision d;
        d.raw_completion = parsed["text"].get<std::string>();
        d.action_text = first_line_trimmed(d.raw_completion);
        if (d.action_text.empty()) {
            error = "empty completion";
            continue;
        }
        return d;
    }
    throw std::runtime_error("completion request failed after " +
                             std::to_string(cfg_.retries + 1) + " attempts: " + error);
}

}  // namespace textlab
