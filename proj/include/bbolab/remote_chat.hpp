#pragma once

#include <chrono>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "bbolab/backends.hpp"
#include "bbolab/errors.hpp"

namespace bbolab {

/// Connection settings for an HTTP chat-completions endpoint. The API key
/// is read from the named environment variable and never appears in config
/// files. Sampling fields are sent only when set, so unset means the
/// provider's defaults.
struct RemoteChatConfig {
    std::string base_url;         // e.g. "https://api.openai.com/v1"
    std::string model_name;
    std::string api_key_env_var;  // empty: endpoint needs no auth
    std::optional<double> temperature;
    std::optional<double> nucleus_p; // top_p
    std::optional<int> max_response_tokens;
    double timeout_seconds = 30.0;
    double qps = 0.0;            // 0: unlimited
    int transport_retries = 3;   // backoff retries; invisible to the retry budget
};

namespace detail {

struct SplitUrl {
    std::string host; // scheme://authority
    std::string path_prefix;
};

inline SplitUrl split_base_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("base_url", "expected scheme://host[/path]");
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

/// Shared token bucket so that all sessions of one backend respect the
/// configured request rate together.
class RateLimiter {
public:
    explicit RateLimiter(double qps)
        : min_interval_(qps > 0.0 ? std::chrono::duration<double>(1.0 / qps)
                                  : std::chrono::duration<double>(0.0)) {}

    void acquire() {
        if (min_interval_.count() <= 0.0) return;
        std::unique_lock<std::mutex> lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        auto earliest = last_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(min_interval_);
        if (earliest > now) {
            lock.unlock();
            std::this_thread::sleep_until(earliest);
            lock.lock();
        }
        last_ = std::chrono::steady_clock::now();
    }

private:
    std::chrono::duration<double> min_interval_;
    std::chrono::steady_clock::time_point last_{};
    std::mutex mutex_;
};

inline bool mentions_context_length(const std::string& text) {
    return text.find("context_length") != std::string::npos ||
           text.find("context length") != std::string::npos ||
           text.find("maximum context") != std::string::npos;
}

} // namespace detail

/// Single-turn chat-completions client. Every query sends exactly one user
/// message; no conversation state is kept between queries.
class RemoteChatBackend final : public Backend {
public:
    explicit RemoteChatBackend(RemoteChatConfig config)
        : config_(std::move(config)),
          limiter_(std::make_shared<detail::RateLimiter>(config_.qps)) {
        if (config_.nucleus_p && !(*config_.nucleus_p > 0.0 && *config_.nucleus_p <= 1.0))
            throw ConfigError("top_p", "nucleus sampling p must be in (0, 1]");
        if (config_.model_name.empty()) throw ConfigError("model", "model name is required");
        (void)detail::split_base_url(config_.base_url); // validate eagerly
        if (!config_.api_key_env_var.empty()) {
            const char* key = std::getenv(config_.api_key_env_var.c_str());
            if (key == nullptr || *key == '\0')
                throw ConfigError("api_key_env",
                                  "environment variable '" + config_.api_key_env_var + "' is not set");
            api_key_ = key;
        }
    }

    std::string kind() const override { return "remote_chat"; }
    const RemoteChatConfig& config() const { return config_; }

    std::unique_ptr<BackendSession> start_session(std::uint64_t) const override {
        return std::make_unique<Session>(*this);
    }

private:
    class Session final : public BackendSession {
    public:
        explicit Session(const RemoteChatBackend& backend)
            : backend_(backend), url_(detail::split_base_url(backend.config_.base_url)) {}

        GenerateResult generate(const std::string& prompt, const GenerationContext&) override {
            const RemoteChatConfig& cfg = backend_.config_;
            nlohmann::json body;
            body["model"] = cfg.model_name;
            body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
            if (cfg.temperature) body["temperature"] = *cfg.temperature;
            if (cfg.nucleus_p) body["top_p"] = *cfg.nucleus_p;
            if (cfg.max_response_tokens) body["max_tokens"] = *cfg.max_response_tokens;
            const std::string payload = body.dump();

            GenerateResult last = GenerateResult::failure(BackendErrorKind::Transport, "not sent");
            for (int attempt = 0; attempt <= cfg.transport_retries; ++attempt) {
                if (attempt > 0) {
                    std::this_thread::sleep_for(
                        std::chrono::duration<double>(0.5 * static_cast<double>(1 << (attempt - 1))));
                }
                backend_.limiter_->acquire();
                last = post_once(payload);
                if (last.ok() || last.error != BackendErrorKind::Transport) return last;
            }
            return last;
        }

    private:
        GenerateResult post_once(const std::string& payload) {
            const RemoteChatConfig& cfg = backend_.config_;
            httplib::Client client(url_.host);
            client.set_connection_timeout(std::chrono::duration<double>(cfg.timeout_seconds));
            client.set_read_timeout(std::chrono::duration<double>(cfg.timeout_seconds));
            httplib::Headers headers;
            if (!backend_.api_key_.empty())
                headers.emplace("Authorization", "Bearer " + backend_.api_key_);

            auto res = client.Post(url_.path_prefix + "/chat/completions", headers, payload,
                                   "application/json");
            if (!res) {
                return GenerateResult::failure(BackendErrorKind::Transport,
                                               httplib::to_string(res.error()));
            }
            if (res->status < 200 || res->status >= 300) {
               const auto kind = detail::mentions_context_length(res->body)
                                      ? BackendErrorKind::ContextLength
                                      : BackendErrorKind::Api;
                return GenerateResult::failure(kind, "HTTP " + std::to_string(res->status) + ": " +
                                                         res->body.substr(0, 400));
            }
            nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
            if (reply.is_discarded())
                return GenerateResult::failure(BackendErrorKind::Api, "response is not JSON");
            if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty())
                return GenerateResult::failure(BackendErrorKind::Api, "response has no choices");
            const auto& message = reply["choices"][0]["message"];
            if (!message.contains("content") || !message["content"].is_string())
                return GenerateResult::failure(BackendErrorKind::Api, "choice has no message content");
            return GenerateResult::success(message["content"].get<std::string>());
        }

        const RemoteChatBackend& backend_;
        detail::SplitUrl url_;
    };

    RemoteChatConfig config_;
    std::string api_key_;
    std::shared_ptr<detail::RateLimiter> limiter_;
};

} // namespace bbolab
