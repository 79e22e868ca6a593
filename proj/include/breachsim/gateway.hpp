#pragma once

#include "breachsim/common.hpp"
#include "breachsim/embedder.hpp"
#include "breachsim/rng.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace breachsim {

struct ChatMessage {
    std::string role; // system | user | assistant
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.7;
    std::optional<int> max_tokens;
};

struct RetryPolicy {
    int max_attempts = 5;
    double base_delay_s = 1.0;
    double factor = 2.0;
    double jitter = 0.2; // +/- fraction of the delay
};

struct GatewayConfig {
    std::string base_url = "http://127.0.0.1:8080/v1";
    std::string model;
    double temperature = 0.7;
    std::string api_key;                     // wins over the env var when set
    std::string api_key_env = "OPENAI_API_KEY";
    int max_concurrent = 4;
    int embed_batch_size = 64;
    double timeout_s = 60.0;
    RetryPolicy retry;
    // Debug sink; everything passed here is already credential-scrubbed.
    std::function<void(const std::string&)> debug_log;
};

class GatewayError : public std::runtime_error {
public:
    enum class Kind { Auth, Transport, Exhausted, BadRequest, Malformed };

    GatewayError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct GatewayStatsSnapshot {
    uint64_t requests = 0;
    uint64_t retries = 0;
    uint64_t prompt_tokens = 0;
    uint64_t completion_tokens = 0;
    uint64_t total_tokens = 0;
    // Latency histogram: <10ms, <100ms, <1s, <10s, rest.
    std::array<uint64_t, 5> latency_buckets{};
};

class GatewayStats {
public:
    void record_request(double seconds) {
        requests_.fetch_add(1, std::memory_order_relaxed);
        size_t bucket = 4;
        if (seconds < 0.01) bucket = 0;
        else if (seconds < 0.1) bucket = 1;
        else if (seconds < 1.0) bucket = 2;
        else if (seconds < 10.0) bucket = 3;
        latency_[bucket].fetch_add(1, std::memory_order_relaxed);
    }
    void record_retry() { retries_.fetch_add(1, std::memory_order_relaxed); }
    void record_usage(uint64_t prompt, uint64_t completion, uint64_t total) {
        prompt_tokens_.fetch_add(prompt, std::memory_order_relaxed);
        completion_tokens_.fetch_add(completion, std::memory_order_relaxed);
        total_tokens_.fetch_add(total, std::memory_order_relaxed);
    }

    GatewayStatsSnapshot snapshot() const {
        GatewayStatsSnapshot s;
        s.requests = requests_.load();
        s.retries = retries_.load();
        s.prompt_tokens = prompt_tokens_.load();
        s.completion_tokens = completion_tokens_.load();
        s.total_tokens = total_tokens_.load();
        for (size_t i = 0; i < latency_.size(); ++i) s.latency_buckets[i] = latency_[i].load();
        return s;
    }

private:
    std::atomic<uint64_t> requests_{0};
    std::atomic<uint64_t> retries_{0};
    std::atomic<uint64_t> prompt_tokens_{0};
    std::atomic<uint64_t> completion_tokens_{0};
    std::atomic<uint64_t> total_tokens_{0};
    std::array<std::atomic<uint64_t>, 5> latency_{};
};

namespace detail {

// Bounds in-flight requests to the configured cap.
class Semaphore {
public:
    explicit Semaphore(int count) : count_(count) {}

    void acquire() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return count_ > 0; });
        --count_;
    }
    void release() {
        {
            std::lock_guard lock(mu_);
            ++count_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int count_;
};

struct SemaphoreGuard {
    Semaphore& sem;
    explicit SemaphoreGuard(Semaphore& s) : sem(s) { sem.acquire(); }
    ~SemaphoreGuard() { sem.release(); }
};

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string prefix; // path prefix, no trailing slash
};

inline SplitUrl split_url(const std::string& base_url) {
    const size_t scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("base_url must include a scheme: " + base_url);
    }
    const size_t path_start = base_url.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.origin = base_url;
    } else {
        out.origin = base_url.substr(0, path_start);
        out.prefix = base_url.substr(path_start);
        while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    }
    return out;
}

} // namespace detail

// Transport to any service speaking the common chat-completions JSON
// protocol. Endpoint, model, and credentials are configuration; one handle
// may be shared across concurrent sessions.
class LlmGateway {
public:
    explicit LlmGateway(GatewayConfig config)
        : config_(std::move(config)),
          url_(detail::split_url(config_.base_url)),
          semaphore_(std::max(1, config_.max_concurrent)),
          jitter_rng_(std::chrono::steady_clock::now().time_since_epoch().count()) {
        if (config_.api_key.empty()) {
            if (const char* env = std::getenv(config_.api_key_env.c_str())) {
                config_.api_key = env;
            }
        }
    }

    const GatewayConfig& config() const { return config_; }
    const GatewayStats& stats() const { return stats_; }

    std::string chat(const ChatRequest& request) {
        if (request.messages.empty()) {
            throw std::invalid_argument("chat: messages must be nonempty");
        }
        if (request.messages.front().role != "system") {
            throw std::invalid_argument("chat: first message must be the system prompt");
        }
        nlohmann::json body;
        body["model"] = request.model.empty() ? config_.model : request.model;
        body["temperature"] = request.temperature;
        if (request.max_tokens) body["max_tokens"] = *request.max_tokens;
        body["messages"] = nlohmann::json::array();
        for (const auto& m : request.messages) {
            body["messages"].push_back({{"role", m.role}, {"content", m.content}});
        }

        const nlohmann::json reply = post_with_retries("/chat/completions", body);

        if (!reply.contains("choices") || !reply["choices"].is_array() ||
            reply["choices"].empty() || !reply["choices"][0].contains("message") ||
            !reply["choices"][0]["message"].contains("content") ||
            !reply["choices"][0]["message"]["content"].is_string()) {
            throw GatewayError(GatewayError::Kind::Malformed,
                               "chat: response lacks choices[0].message.content");
        }
        if (reply.contains("usage") && reply["usage"].is_object()) {
            const auto& u = reply["usage"];
            stats_.record_usage(u.value("prompt_tokens", 0ull),
                                u.value("completion_tokens", 0ull),
                                u.value("total_tokens", 0ull));
        }
        return reply["choices"][0]["message"]["content"].get<std::string>();
    }

    std::vector<std::vector<float>> embed_texts(const std::vector<std::string>& texts) {
        if (texts.empty()) throw std::invalid_argument("embed_texts: empty input list");
        for (size_t i = 0; i < texts.size(); ++i) {
            if (texts[i].empty()) {
                throw std::invalid_argument("embed_texts: empty text at index " +
                                            std::to_string(i));
            }
        }
        std::vector<std::vector<float>> out;
        out.reserve(texts.size());
        const size_t batch = std::max(1, config_.embed_batch_size);
        for (size_t start = 0; start < texts.size(); start += batch) {
            const size_t end = std::min(texts.size(), start + batch);
            nlohmann::json body;
            body["model"] = config_.model;
            body["input"] = nlohmann::json::array();
            for (size_t i = start; i < end; ++i) body["input"].push_back(texts[i]);

            const nlohmann::json reply = post_with_retries("/embeddings", body);
            if (!reply.contains("data") || !reply["data"].is_array() ||
                reply["data"].size() != end - start) {
                throw GatewayError(GatewayError::Kind::Malformed,
                                   "embed_texts: response data size mismatch");
            }
            // Providers may reorder; the index field restores input order.
            std::vector<std::vector<float>> batch_out(end - start);
            for (const auto& item : reply["data"]) {
                const size_t idx = item.value("index", batch_out.size());
                if (idx >= batch_out.size() || !item.contains("embedding")) {
                    throw GatewayError(GatewayError::Kind::Malformed,
                                       "embed_texts: malformed embedding item");
                }
                batch_out[idx] = item["embedding"].get<std::vector<float>>();
            }
            for (auto& v : batch_out) out.push_back(std::move(v));
        }
        return out;
    }

private:
    nlohmann::json post_with_retries(const std::string& path, const nlohmann::json& body) {
        detail::SemaphoreGuard guard(semaphore_);
        const std::string full_path = url_.prefix + path;
        const std::string payload = body.dump();

        int last_status = 0;
        std::string last_error;
        for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
            if (attempt > 1) {
                stats_.record_retry();
                sleep_before(attempt);
            }
            const auto start = std::chrono::steady_clock::now();
            httplib::Client client(url_.origin);
            client.set_connection_timeout(std::chrono::milliseconds(
                static_cast<int>(config_.timeout_s * 1000)));
            client.set_read_timeout(std::chrono::milliseconds(
                static_cast<int>(config_.timeout_s * 1000)));
            httplib::Headers headers;
            if (!config_.api_key.empty()) {
                headers.emplace("Authorization", "Bearer " + config_.api_key);
            }
            if (attempt == 1) log("request body: " + scrub(payload));
            auto res = client.Post(full_path, headers, payload, "application/json");
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            stats_.record_request(elapsed);

            if (!res) {
                last_status = 0;
                last_error = httplib::to_string(res.error());
                log("POST " + full_path + " attempt " + std::to_string(attempt) +
                    " transport error: " + last_error);
                continue;
            }
            last_status = res->status;
            log("POST " + full_path + " attempt " + std::to_string(attempt) + " -> " +
                std::to_string(res->status));

            if (res->status == 401 || res->status == 403) {
                throw GatewayError(GatewayError::Kind::Auth,
                                   "authentication rejected (" +
                                       std::to_string(res->status) + ")");
            }
            if (res->status == 429 || res->status >= 500) continue;
            if (res->status != 200) {
                throw GatewayError(GatewayError::Kind::BadRequest,
                                   "request failed with status " +
                                       std::to_string(res->status) + ": " + res->body);
            }
            log("response body: " + scrub(res->body));
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::parse_error& e) {
                throw GatewayError(GatewayError::Kind::Malformed,
                                   std::string("response is not valid JSON: ") + e.what());
            }
        }
        throw GatewayError(GatewayError::Kind::Exhausted,
                           "retries exhausted after " +
                               std::to_string(config_.retry.max_attempts) +
                               " attempts (last status " + std::to_string(last_status) +
                               (last_error.empty() ? "" : ", " + last_error) + ")");
    }

    void sleep_before(int attempt) {
        const RetryPolicy& r = config_.retry;
        double delay = r.base_delay_s;
        for (int i = 2; i < attempt; ++i) delay *= r.factor;
        double jitter;
        {
            std::lock_guard lock(jitter_mu_);
            jitter = 1.0 + r.jitter * (2.0 * jitter_rng_.unit() - 1.0);
        }
        delay *= jitter;
        if (delay > 0) {
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
    }

    void log(const std::string& line) {
        if (config_.debug_log) config_.debug_log(line);
    }

    // Replaces any credential occurrence before a string may leave the
    // process via logging.
    std::string scrub(std::string text) const {
        if (config_.api_key.empty()) return text;
        size_t pos = 0;
        while ((pos = text.find(config_.api_key, pos)) != std::string::npos) {
            text.replace(pos, config_.api_key.size(), "***");
            pos += 3;
        }
        return text;
    }

    GatewayConfig config_;
    detail::SplitUrl url_;
    detail::Semaphore semaphore_;
    GatewayStats stats_;
    std::mutex jitter_mu_;
    Rng jitter_rng_;
};

// Embedder backed by the gateway's embeddings endpoint.
class GatewayEmbedder final : public Embedder {
public:
    GatewayEmbedder(LlmGateway& gateway, size_t dimension, std::string model_id)
        : gateway_(gateway), dim_(dimension), id_("remote-" + std::move(model_id)) {}

    std::vector<float> embed(std::string_view text) const override {
        if (text.empty()) throw std::invalid_argument("embed: empty text");
        auto vectors = gateway_.embed_texts({std::string(text)});
        if (vectors.size() != 1 || vectors[0].size() != dim_) {
            throw GatewayError(GatewayError::Kind::Malformed,
                               "embedding dimension mismatch against index params");
        }
        return vectors[0];
    }

    size_t dimension() const override { return dim_; }
    std::string id() const override { return id_; }

private:
    LlmGateway& gateway_;
    size_t dim_;
    std::string id_;
};

} // namespace breachsim
