// Standalone completion endpoint speaking the eval harness's wire contract:
// POST /complete {"prompt", "max_tokens", "stop"} -> {"text"}. Answers every
// prompt with a fixed action; handy for smoke-testing eval runs without a
// real model behind them.

#include <chrono>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "textlab/mock_lm.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mock completion endpoint"};
    std::string reply = "wait";
    app.add_option("--reply", reply, "Action text returned for every prompt")
        ->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    textlab::MockCompletionServer server([reply](const std::string&) { return reply; });
    server.start();
    std::cout << server.url() << std::endl;
    for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
}
