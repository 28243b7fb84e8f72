#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace textlab {

// In-process HTTP completion endpoint for hermetic tests and demos. Speaks
// the same wire contract the completion client expects:
//   POST {"prompt", "max_tokens", "stop"} -> 200 {"text": ...}
class MockCompletionServer {
public:
    using Responder = std::function<std::string(const std::string& prompt)>;

    // Default responder always answers "wait".
    explicit MockCompletionServer(Responder responder = nullptr);
    ~MockCompletionServer();

    MockCompletionServer(const MockCompletionServer&) = delete;
    MockCompletionServer& operator=(const MockCompletionServer&) = delete;

    // Binds 127.0.0.1 on a free port and serves on a background thread.
    void start();
    void stop();

    std::string url() const;  // http://127.0.0.1:<port>/complete
    int port() const { return port_; }
    int request_count() const { return request_count_.load(); }
    std::string last_prompt() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    Responder responder_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> request_count_{0};
    mutable std::mutex mutex_;
    std::string last_prompt_;
};

}  // namespace textlab
