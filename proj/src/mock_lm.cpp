#include "textlab/mock_lm.hpp"

#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace textlab {

struct MockCompletionServer::Impl {
    httplib::Server server;
};

MockCompletionServer::MockCompletionServer(Responder responder)
    : impl_(std::make_unique<Impl>()), responder_(std::move(responder)) {
    if (!responder_) {
        responder_ = [](const std::string&) { return std::string("wait"); };
    }
    impl_->server.Post("/complete", [this](const httplib::Request& req, httplib::Response& res) {
        std::string prompt;
        try {
            nlohmann::json body = nlohmann::json::parse(req.body);
            prompt = body.value("prompt", std::string());
        } catch (const std::exception&) {
            res.status = 400;
            res.set_content("{\"error\":\"bad request\"}", "application/json");
            return;
        }
        {
            std::lock_guard<std::mutex> lock(mutex_);
            last_prompt_ = prompt;
        }
        request_count_.fetch_add(1);
        nlohmann::json reply;
        reply["text"] = responder_(prompt);
        res.set_content(reply.dump(), "application/json");
    });
}

MockCompletionServer::~MockCompletionServer() { stop(); }

void MockCompletionServer::start() {
    port_ = impl_->server.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("mock completion server failed to bind");
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void MockCompletionServer::stop() {
    if (thread_.joinable()) {
        impl_->server.stop();
        thread_.join();
    }
}

std::string MockCompletionServer::url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/complete";
}

std::string MockCompletionServer::last_prompt() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return last_prompt_;
}

}  // namespace textlab
