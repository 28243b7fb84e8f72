#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "textlab/mock_lm.hpp"
#include "textlab/policy.hpp"
#include "textlab/world.hpp"

#include "support.hpp"

using namespace textlab;

namespace {

PolicyContext context_for(const World* w) {
    PolicyContext ctx;
    ctx.prompt = "Some task.\n\nA: look around\nG: A room.\nA:";
    ctx.variation_id = "test/0";
    ctx.world = w;
    return ctx;
}

}  // namespace

TEST_CASE("scripted policies serve from the second action and then wait") {
    const std::vector<std::string> script = {"look around", "open door to kitchen",
                                             "go to kitchen"};
    OraclePolicy oracle(script);
    const PolicyContext ctx = context_for(nullptr);
    CHECK(oracle.decide(ctx).action_text == "open door to kitchen");
    CHECK(oracle.decide(ctx).action_text == "go to kitchen");
    CHECK(oracle.decide(ctx).action_text == "wait");
    CHECK(oracle.decide(ctx).action_text == "wait");
    CHECK(oracle.name() == "oracle");

    ReplayPolicy replay(script);
    CHECK(replay.decide(ctx).action_text == "open door to kitchen");
    CHECK(replay.name() == "replay");

    ReplayPolicy empty(std::vector<std::string>{});
    CHECK(empty.decide(ctx).action_text == "wait");
}

TEST_CASE("the random baseline emits only currently-valid actions") {
    World w = support::house_world();
    std::set<std::string> valid;
    for (const Action& a : w.valid_actions()) valid.insert(a.surface);

    RandomValidPolicy policy(42);
    const PolicyContext ctx = context_for(&w);
    for (int i = 0; i < 50; ++i) {
        const std::string choice = policy.decide(ctx).action_text;
        CHECK_MESSAGE(valid.count(choice) == 1, choice);
    }

    // Deterministic per seed.
    RandomValidPolicy a(99), b(99);
    for (int i = 0; i < 20; ++i) {
        CHECK(a.decide(ctx).action_text == b.decide(ctx).action_text);
    }
    CHECK(a.name() == "random");
}

TEST_CASE("the random baseline refuses to run blind") {
    RandomValidPolicy policy(1);
    const PolicyContext ctx = context_for(nullptr);
    CHECK_THROWS_AS(policy.decide(ctx), std::runtime_error);
}

TEST_CASE("first_line_trimmed isolates the action row") {
    CHECK(first_line_trimmed("go north") == "go north");
    CHECK(first_line_trimmed("  go north  \nand then some") == "go north");
    CHECK(first_line_trimmed("\nsecond line") == "");
    CHECK(first_line_trimmed("") == "");
    CHECK(first_line_trimmed("one\r\ntwo") == "one");
}

TEST_CASE("completion client round-trips the prompt bit-exactly") {
    MockCompletionServer server([](const std::string&) { return "go to kitchen"; });
    server.start();

    CompletionClientConfig cfg;
    cfg.url = server.url();
    CompletionClientPolicy policy(cfg);
    CHECK(policy.name() == "completion");

    const PolicyContext ctx = context_for(nullptr);
    const PolicyDecision d = policy.decide(ctx);
    CHECK(d.action_text == "go to kitchen");
    CHECK(server.last_prompt() == ctx.prompt);
    CHECK(server.request_count() == 1);
    server.stop();
}

TEST_CASE("multi-line completions are trimmed to their first line") {
    MockCompletionServer server(
        [](const std::string&) { return "  open fridge  \nthen celebrate"; });
    server.start();
    CompletionClientConfig cfg;
    cfg.url = server.url();
    CompletionClientPolicy policy(cfg);
    const PolicyDecision d = policy.decide(context_for(nullptr));
    CHECK(d.action_text == "open fridge");
    CHECK(d.raw_completion == "  open fridge  \nthen celebrate");
    server.stop();
}

TEST_CASE("empty completions are retried until the budget runs out") {
    std::atomic<int> calls{0};
    MockCompletionServer flaky([&](const std::string&) {
        return ++calls <= 2 ? std::string{} : std::string{"wait"};
    });
    flaky.start();

    CompletionClientConfig cfg;
    cfg.url = flaky.url();
    cfg.retries = 2;
    CompletionClientPolicy policy(cfg);
    CHECK(policy.decide(context_for(nullptr)).action_text == "wait");
    CHECK(flaky.request_count() == 3);  // two failures, then success
    flaky.stop();

    MockCompletionServer hopeless([](const std::string&) { return std::string{}; });
    hopeless.start();
    CompletionClientConfig cfg2;
    cfg2.url = hopeless.url();
    cfg2.retries = 2;
    CompletionClientPolicy p2(cfg2);
    try {
        p2.decide(context_for(nullptr));
        FAIL("expected the exhausted-retries throw");
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        CHECK(what.find("completion request failed after 3 attempts") != std::string::npos);
        CHECK(what.find("empty completion") != std::string::npos);
    }
    CHECK(hopeless.request_count() == 3);
    hopeless.stop();
}

TEST_CASE("an unreachable endpoint fails with a transport error") {
    CompletionClientConfig cfg;
    cfg.url = "http://127.0.0.1:9/complete";  // nothing listens there
    cfg.retries = 0;
    cfg.timeout_seconds = 1;
    CompletionClientPolicy policy(cfg);
    try {
        policy.decide(context_for(nullptr));
        FAIL("expected a transport failure");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("after 1 attempts") != std::string::npos);
    }
}

TEST_CASE("endpoint resolution: flag beats environment beats error") {
    ::unsetenv("TEXTLAB_COMPLETION_URL");
    CompletionClientConfig none;
    CHECK_THROWS_WITH_AS(CompletionClientPolicy{none},
                         "no completion endpoint configured (flag or TEXTLAB_COMPLETION_URL)",
                         std::runtime_error);

    MockCompletionServer server;
    server.start();
    ::setenv("TEXTLAB_COMPLETION_URL", server.url().c_str(), 1);
    CompletionClientPolicy from_env{CompletionClientConfig{}};
    CHECK(from_env.decide(context_for(nullptr)).action_text == "wait");  // default responder
    ::unsetenv("TEXTLAB_COMPLETION_URL");
    server.stop();
}
